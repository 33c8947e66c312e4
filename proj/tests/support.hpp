#pragma once

// Shared helpers for the unit tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "dissipwave/grid.hpp"

namespace testing {

using dissipwave::Field;
using dissipwave::Grid;
using dissipwave::SpectralField;

inline Field random_field(const Grid& grid, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(grid.size());
    for (auto& x : v) x = dist(rng);
    return Field(grid, std::move(v));
}

/// Random real field whose spectrum is confined to |j| <= cap on every axis.
inline Field band_limited_field(const Grid& grid, int cap, unsigned seed) {
    SpectralField f = dissipwave::forward_transform(random_field(grid, seed));
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto idx = grid.unflatten(i);
        for (int d = 0; d < grid.n_dims(); ++d)
            if (std::abs(grid.lattice_index(idx[d])) > cap) f[i] = 0.0;
    }
    return dissipwave::inverse_transform(f);
}

inline Field sample(const Grid& grid, const std::function<double(double, double, double)>& fn) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto idx = grid.unflatten(i);
        double x[3] = {0.0, 0.0, 0.0};
        for (int d = 0; d < grid.n_dims(); ++d) x[d] = grid.coordinate(idx[d]);
        v[i] = fn(x[0], x[1], x[2]);
    }
    return Field(grid, std::move(v));
}

inline double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

inline double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testing
