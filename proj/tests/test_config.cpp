#include <catch2/catch.hpp>

#include "fuzzy/config.hpp"

using namespace fuzzy;

TEST_CASE("parse_config: minimal config fills defaults; echo round-trips") {
    std::string text = "[grid]\npoints = 128\n";
    RunConfig c = parse_config(text);
    CHECK(c.grid.points == 128);
    CHECK(c.grid.dimension == 1);
    CHECK(c.kernel.kind == KernelKind::bessel);
    CHECK(c.kernel.m == Approx(2.0));  // d + 1
    CHECK(c.kernel.nu0 == Approx(0.05));
    CHECK(c.solver.friction == 1.0);
    CHECK(c.snapshot_stride == 10);

    std::string echoed = echo_config(c);
    RunConfig c2 = parse_config(echoed);
    CHECK(echo_config(c2) == echoed);
}

TEST_CASE("parse_config: range errors name the key") {
    try {
        parse_config("[kernel]\nnu0 = -1\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("nu0") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("[grid]\npoints = 100\n"), argument_error);  // not a power of two
    CHECK_THROWS_AS(parse_config("[solver]\ndt = 0\n"), config_error);
    CHECK_THROWS_AS(parse_config("[solver]\npressure = cubic\n"), config_error);
}

TEST_CASE("parse_config: unknown keys rejected with a suggestion") {
    try {
        parse_config("[kernel]\nepsilonn = 0.1\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("epsilonn") != std::string::npos);
        CHECK(msg.find("epsilon") != std::string::npos);
        CHECK(msg.find("did you mean") != std::string::npos);
    }
    try {
        parse_config("[gird]\npoints = 64\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("grid") != std::string::npos);
    }
}

TEST_CASE("parse_config: syntax errors carry line numbers") {
    try {
        parse_config("[grid]\npoints 128\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("key = 1\n"), config_error);        // outside section
    CHECK_THROWS_AS(parse_config("[grid\npoints = 64\n"), config_error);
    CHECK_THROWS_AS(parse_config("[grid]\npoints = 64\npoints = 32\n"), config_error);
}

TEST_CASE("parse_config: lists and pairs") {
    std::string text =
        "[study]\n"
        "eps_list = 0.4, 0.2, 0.1\n"
        "lambda_list = 2,4,8\n"
        "pairs = 8,0.2,16,0.1\n"
        "n_list = 100, 1000\n";
    RunConfig c = parse_config(text);
    CHECK(c.eps_list == std::vector<double>{0.4, 0.2, 0.1});
    CHECK(c.lambda_list == std::vector<double>{2.0, 4.0, 8.0});
    REQUIRE(c.pair_list.size() == 2);
    CHECK(c.pair_list[0].first == 8.0);
    CHECK(c.pair_list[0].second == 0.2);
    CHECK(c.n_list == std::vector<std::size_t>{100, 1000});

    CHECK_THROWS_AS(parse_config("[study]\npairs = 8,0.2,16\n"), config_error);
    CHECK_THROWS_AS(parse_config("[study]\neps_list = ,\n"), config_error);
}

TEST_CASE("parse_config: kernel kinds and pressure laws") {
    RunConfig id = parse_config("[kernel]\nkind = identity\n");
    CHECK(id.kernel.kind == KernelKind::identity);
    CHECK(symbol_K(id.kernel, 123.0) == 1.0);

    RunConfig tri = parse_config("[kernel]\nkind = triangle\nepsilon = 0.3\n");
    CHECK(tri.kernel.kind == KernelKind::triangle);

    RunConfig gen = parse_config("[solver]\npressure = general\ngamma = 3\n");
    CHECK(gen.solver.pressure.kind == PressureKind::General);
    CHECK(gen.solver.pressure.gamma == 3.0);

    // gamma is only meaningful for the general law
    CHECK_THROWS_AS(parse_config("[solver]\npressure = plain\ngamma = 3\n"), config_error);
}

TEST_CASE("parse_config: comments and blank lines ignored") {
    std::string text =
        "# a comment\n"
        "\n"
        "[grid]\n"
        "; another comment\n"
        "points = 64\n";
    RunConfig c = parse_config(text);
    CHECK(c.grid.points == 64);
}
