#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "fuzzy/errors.hpp"

namespace fuzzy {

constexpr double pi = 3.14159265358979323846;

/// Periodic grid: d in {1,2}, N points per axis (power of two), torus side L.
/// Frequency lattice is {2*pi*k/L : k in [-N/2, N/2)^d}.
struct GridSpec {
    int dimension = 1;
    int points = 64;
    double length = 2.0 * pi;

    void validate() const {
        if (dimension != 1 && dimension != 2)
            throw argument_error("grid: dimension must be 1 or 2, got " + std::to_string(dimension));
        if (points < 16 || (points & (points - 1)) != 0)
            throw argument_error("grid: points must be a power of two >= 16, got " + std::to_string(points));
        if (!(length > 0.0) || !std::isfinite(length))
            throw argument_error("grid: length must be positive and finite");
    }

    std::size_t node_count() const {
        std::size_t n = static_cast<std::size_t>(points);
        return dimension == 1 ? n : n * n;
    }

    double spacing() const { return length / points; }

    double cell_volume() const {
        double h = spacing();
        return dimension == 1 ? h : h * h;
    }

    double volume() const { return dimension == 1 ? length : length * length; }

    /// Signed integer mode for storage index m in [0, N).
    int signed_mode(int m) const { return m < points / 2 ? m : m - points; }

    /// Physical wavenumber 2*pi*k/L for storage index m.
    double wavenumber(int m) const { return 2.0 * pi * signed_mode(m) / length; }

    /// Frequency vector of the lattice site with flat index idx.
    std::array<double, 2> xi(std::size_t idx) const {
        if (dimension == 1) return {wavenumber(static_cast<int>(idx)), 0.0};
        int i = static_cast<int>(idx / points);
        int j = static_cast<int>(idx % points);
        return {wavenumber(i), wavenumber(j)};
    }

    double xi_norm(std::size_t idx) const {
        auto v = xi(idx);
        return std::hypot(v[0], v[1]);
    }

    /// Smallest and largest nonzero lattice radii.
    double min_radius() const { return 2.0 * pi / length; }
    double max_radius() const {
        double r = pi * points / length;
        return dimension == 1 ? r : std::sqrt(2.0) * r;
    }

    bool operator==(const GridSpec&) const = default;
};

} // namespace fuzzy
