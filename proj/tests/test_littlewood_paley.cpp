#include <catch2/catch.hpp>

#include <random>
#include <sstream>

#include "fuzzy/littlewood_paley.hpp"

using namespace fuzzy;

namespace {

SpectralField random_field(const GridSpec& g, int kmax, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(g.node_count());
    for (double& x : v) x = d(rng);
    SpectralField f = transform_forward(g, v);
    return apply_multiplier(f, [&](const std::array<double, 2>& xi) {
        double cap = 2.0 * pi * kmax / g.length;
        return (std::abs(xi[0]) <= cap + 1e-12 && std::abs(xi[1]) <= cap + 1e-12) ? 1.0 : 0.0;
    });
}

/// Unit-L2 cosine mode at integer radius k (d=1 grid).
SpectralField unit_mode(const GridSpec& g, int k) {
    SpectralField f(g, 1);
    double c = 1.0 / std::sqrt(2.0 * g.volume());
    f.at(0, static_cast<std::size_t>(k)) = c;
    f.at(0, static_cast<std::size_t>(g.points - k)) = c;
    return f;
}

} // namespace

TEST_CASE("partition: telescoping sum is 1 on the lattice range") {
    GridSpec g{1, 256, 2.0 * pi};
    DyadicPartition p = build_partition(g);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> radius(g.min_radius(), g.max_radius());
    for (int s = 0; s < 100; ++s) {
        double r = radius(rng);
        double sum = 0.0;
        for (int j = p.j_min - 2; j <= p.j_max + 2; ++j)
            sum += DyadicPartition::phi(std::ldexp(1.0, -j) * r);
        CHECK(sum == Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("partition: support and active block count") {
    CHECK(DyadicPartition::phi(0.49) == 0.0);
    CHECK(DyadicPartition::phi(2.01) == 0.0);
    CHECK(DyadicPartition::phi(1.0) == Approx(1.0));
    for (double r = 0.51; r < 2.0; r += 0.07) CHECK(DyadicPartition::phi(r) >= 0.0);

    GridSpec g{1, 256, 2.0 * pi};
    DyadicPartition p = build_partition(g);
    // radii run over the integers 1..128: active blocks are exactly those with
    // (2^{j-1}, 2^{j+1}) meeting [1, 128]
    double expected = std::log2(g.points / 2.0);
    CHECK(std::abs(p.count() - expected) <= 1.0 + 1e-9);
}

TEST_CASE("lp_block: reconstruction, locality, disjoint annuli") {
    GridSpec g{1, 128, 2.0 * pi};
    DyadicPartition p = build_partition(g);
    SpectralField z = random_field(g, 40, 9);

    SpectralField sum(g, 1);
    for (int j = p.j_min; j <= p.j_max; ++j) sum += lp_block(p, z, j);
    SpectralField target = z;
    target.at(0, 0) = 0.0;  // mean removed
    double rel = (sum - target).l2_norm() / target.l2_norm();
    CHECK(rel < 1e-8);

    // single mode |k| = 2^j0 is captured by blocks j0-1, j0, j0+1 only
    int j0 = 4;
    SpectralField mode = unit_mode(g, 1 << j0);
    for (int j = p.j_min; j <= p.j_max; ++j) {
        double n = lp_block(p, mode, j).l2_norm();
        if (std::abs(j - j0) > 1) CHECK(n == 0.0);
    }
    CHECK(lp_block(p, mode, j0).l2_norm() > 0.0);

    // blocks at distance >= 2 annihilate each other
    SpectralField zj = lp_block(p, z, 3);
    CHECK(lp_block(p, zj, 5).l2_norm() == 0.0);
    CHECK(lp_block(p, zj, 1).l2_norm() == 0.0);

    // out-of-range j yields zero
    CHECK(lp_block(p, z, p.j_max + 7).l2_norm() == 0.0);
}

TEST_CASE("besov_norm: zero field, single-mode identities") {
    GridSpec g{1, 256, 2.0 * pi};
    DyadicPartition p = build_partition(g);
    KernelFamily k = KernelFamily::bessel(1.0, 2.0);

    BesovReport rep0 = besov_norm(p, SpectralField(g, 1), 0.5, k);
    CHECK(rep0.total == 0.0);
    CHECK(rep0.low_part == 0.0);
    CHECK(rep0.high_part == 0.0);

    for (int kk : {1, 2, 4, 8, 16, 32, 3, 11, 23, 61}) {
        SpectralField mode = unit_mode(g, kk);
        CHECK(mode.l2_norm() == Approx(1.0).epsilon(1e-13));
        BesovReport rep = besov_norm(p, mode, 0.0, k);
        CHECK(rep.total == Approx(1.0).margin(1e-10));
        CHECK(rep.total == Approx(rep.low_part + rep.high_part).margin(1e-14));
    }

    // sigma = 1: weighted total within [2^(j0-1), 2^(j0+1)]
    int j0 = 4;
    BesovReport rep1 = besov_norm(p, unit_mode(g, 1 << j0), 1.0, k);
    CHECK(rep1.total >= std::ldexp(1.0, j0 - 1));
    CHECK(rep1.total <= std::ldexp(1.0, j0 + 1));
}

TEST_CASE("besov_norm: dilation scaling 2^(1/2 - sigma) in d=1") {
    GridSpec g{1, 128, 2.0 * pi};
    GridSpec g2{1, 256, 4.0 * pi};
    KernelFamily k = KernelFamily::identity();
    SpectralField z = random_field(g, 40, 13);

    // dilated field z2(x) = z(x/2): same coefficients, halved frequencies
    SpectralField z2(g2, 1);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        int kk = g.signed_mode(static_cast<int>(i));
        std::size_t i2 = static_cast<std::size_t>((kk + g2.points) % g2.points);
        z2.at(0, i2) = z.at(0, i);
    }

    for (double sigma : {-0.5, 0.0, 0.5, 1.5}) {
        double n1 = besov_total(build_partition(g), z, sigma, k);
        double n2 = besov_total(build_partition(g2), z2, sigma, k);
        CHECK(n2 / n1 == Approx(std::pow(2.0, 0.5 - sigma)).epsilon(1e-6));
    }
}

TEST_CASE("besov almost-orthogonality bound") {
    GridSpec g{1, 128, 2.0 * pi};
    DyadicPartition p = build_partition(g);
    SpectralField z = random_field(g, 40, 17);
    double n2 = z.l2_norm() * z.l2_norm();

    double rhs = z.mean() * z.mean() * g.volume();
    for (int j = p.j_min; j <= p.j_max; ++j) {
        SpectralField zj = lp_block(p, z, j);
        for (int jp = j - 1; jp <= j + 1; ++jp) {
            SpectralField zjp = lp_block(p, z, jp);
            double inner = 0.0;
            for (std::size_t i = 0; i < g.node_count(); ++i)
                inner += (zj.at(0, i) * std::conj(zjp.at(0, i))).real();
            rhs += std::abs(inner * g.volume());
        }
    }
    CHECK(n2 <= rhs * (1.0 + 1e-8));
}

TEST_CASE("bernstein comparability on single blocks") {
    GridSpec g{1, 256, 2.0 * pi};
    DyadicPartition p = build_partition(g);
    KernelFamily k = KernelFamily::bessel(1.0, 2.0);
    SpectralField z = random_field(g, 100, 21);
    for (int j = 2; j <= 6; ++j) {
        SpectralField zj = lp_block(p, z, j);
        if (zj.l2_norm() == 0.0) continue;
        SpectralField gLa = gradient(apply_radial_multiplier(
            zj, [&](double r) { return symbol_L(k, r); }));
        double lhs = gLa.l2_norm();
        double rhs = std::ldexp(1.0, j) * symbol_L(k, std::ldexp(1.0, j)) * zj.l2_norm();
        CHECK(lhs / rhs >= 0.25);
        CHECK(lhs / rhs <= 4.0);
    }
}

TEST_CASE("functional_X: zero data, positivity, hand assembly") {
    GridSpec g{1, 128, 2.0 * pi};
    DyadicPartition p = build_partition(g);
    KernelFamily k = KernelFamily::bessel(0.5, 2.0);

    SpectralField a0(g, 1), u0(g, 1);
    CHECK(functional_X(p, a0, u0, 1.5, k) == 0.0);
    CHECK(functional_H(p, a0, u0, 1.5, k) == 0.0);

    SpectralField a = random_field(g, 20, 23);
    SpectralField u = random_field(g, 20, 27);

    // independent assembly from besov_norm calls (friction = 1)
    double sigma = 1.5;
    SpectralField La = apply_radial_multiplier(a, [&](double r) { return symbol_L(k, r); });
    double by_hand = besov_total(p, a, sigma - 1, k)
                   + besov_total(p, gradient(a), sigma - 1, k)
                   + besov_total(p, gradient(gradient(La)), sigma - 1, k)
                   + besov_total(p, u, sigma, k)
                   + besov_total(p, gradient(u), sigma, k);
    CHECK(functional_X(p, a, u, sigma, k) == Approx(by_hand).epsilon(1e-12));

    // H >= the Besov norm of (u, grad u) alone
    double base = besov_total(p, u, sigma, k) + besov_total(p, gradient(u), sigma, k);
    CHECK(functional_H(p, a, u, sigma, k) >= base - 1e-12);

    // u-only data: H reduces to ||(u, grad u)||
    CHECK(functional_H(p, a0, u, sigma, k) == Approx(base).epsilon(1e-12));
}

TEST_CASE("lyapunov_blocks: zero data, equivalence, positivity, smallness") {
    GridSpec g{1, 128, 2.0 * pi};
    DyadicPartition p = build_partition(g);
    KernelFamily k = KernelFamily::bessel(0.1, 2.0);

    SpectralField zero_a(g, 1);
    SpectralField zero_u(g, 1);
    auto blocks0 = lyapunov_blocks(p, zero_a, zero_u, k);
    for (const auto& [j, lh] : blocks0) {
        CHECK(lh.first == 0.0);
        CHECK(lh.second == 0.0);
    }

    // b = c = 0: on a single high-frequency block L_j ~ ||(grad L a_j, grad u_j)|| ~ H_j
    SpectralField z = random_field(g, 60, 31);
    int j_high = 0;
    for (int j = p.j_min; j <= p.j_max; ++j)
        if (frequency_class(k, j) == FreqClass::High) j_high = j;
    SpectralField aj = lp_block(p, (1e-3 / z.l2_norm()) * z, j_high);
    SpectralField uj = lp_block(p, (1e-3 / z.l2_norm()) * random_field(g, 60, 37), j_high);

    auto blocks = lyapunov_blocks(p, aj, uj, k);
    double Lj = blocks[j_high].first, Hj = blocks[j_high].second;
    SpectralField gLa = gradient(apply_radial_multiplier(aj, [&](double r) { return symbol_L(k, r); }));
    SpectralField gu = gradient(uj);
    double mid = std::sqrt(gLa.l2_norm() * gLa.l2_norm() + gu.l2_norm() * gu.l2_norm());
    CHECK(Lj / mid > 0.1);
    CHECK(Lj / mid < 10.0);
    CHECK(Hj / mid > 0.1);
    CHECK(Hj / mid < 10.0);

    // positivity of L_j^2 for random small fields under the smallness bound
    for (unsigned seed = 40; seed < 45; ++seed) {
        SpectralField a = random_field(g, 30, seed);
        a = (0.2 / max_abs_physical(a)) * a;
        SpectralField u = random_field(g, 30, seed + 100);
        u = (0.2 / max_abs_physical(u)) * u;
        for (const auto& [j, lh] : lyapunov_blocks(p, a, u, k)) {
            CHECK(lh.first >= 0.0);
            CHECK(lh.second >= 0.0);
        }
    }

    // smallness violated -> refused
    SpectralField big = random_field(g, 10, 51);
    big = (0.5 / max_abs_physical(big)) * big;
    CHECK_THROWS_AS(lyapunov_blocks(p, big, zero_u, k), smallness_error);
}

TEST_CASE("low/high projections partition the mean-free field") {
    GridSpec g{1, 128, 2.0 * pi};
    DyadicPartition p = build_partition(g);
    KernelFamily k = KernelFamily::bessel(1.0, 2.0);
    SpectralField z = random_field(g, 40, 57);
    SpectralField lo = low_projection(p, z, k);
    SpectralField hi = high_projection(p, z, k);
    SpectralField target = z;
    target.at(0, 0) = 0.0;
    CHECK((lo + hi - target).l2_norm() / target.l2_norm() < 1e-8);
}

TEST_CASE("besov report serializes to (time, sigma, j, block_norm, class) rows") {
    GridSpec g{1, 128, 2.0 * pi};
    DyadicPartition p = build_partition(g);
    KernelFamily k = KernelFamily::bessel(1.0, 2.0, 0.05);
    SpectralField z = random_field(g, 40, 61);
    BesovReport rep = besov_norm(p, z, 0.5, k);
    std::ostringstream os;
    write_besov_csv(os, 2.5, rep, true);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "time,sigma,j,block_norm,class");
    int rows = 0;
    bool saw_low = false, saw_high = false;
    while (std::getline(is, line)) {
        ++rows;
        CHECK(line.find("2.5,0.5,") == 0);
        if (line.find(",low") != std::string::npos) saw_low = true;
        if (line.find(",high") != std::string::npos) saw_high = true;
    }
    CHECK(rows == p.count());
    CHECK(saw_low);
    CHECK(saw_high);
}

TEST_CASE("besov truncation mass vanishes on a covered lattice") {
    GridSpec g{1, 128, 2.0 * pi};
    DyadicPartition p = build_partition(g);
    KernelFamily k = KernelFamily::bessel(1.0, 2.0);
    SpectralField z = random_field(g, 40, 71);
    BesovReport rep = besov_norm(p, z, 0.5, k);
    CHECK(rep.truncated_mass < 1e-12 * z.l2_norm());

    // shrink the active range artificially: the excluded mass is reported
    DyadicPartition clipped = p;
    clipped.j_max = p.j_max - 3;
    BesovReport rep2 = besov_norm(clipped, z, 0.5, k);
    CHECK(rep2.truncated_mass > 1e-6 * z.l2_norm());
}
