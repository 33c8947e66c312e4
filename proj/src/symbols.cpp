#include "dissipwave/symbols.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dissipwave {

namespace {

// |w| below this uses the Taylor series; equivalent to |z| < 1e-2 for z = sqrt(|w|).
constexpr double kSeriesBound = 1e-4;

// sum_k w^k / (2k+1)!
double sinhc_series(double w) {
    return 1.0 + w / 6.0 * (1.0 + w / 20.0 * (1.0 + w / 42.0 * (1.0 + w / 72.0 * (1.0 + w / 110.0))));
}

// sum_k w^k / (2k)!
double cosh_series(double w) {
    return 1.0 + w / 2.0 * (1.0 + w / 12.0 * (1.0 + w / 30.0 * (1.0 + w / 56.0 * (1.0 + w / 90.0))));
}

constexpr std::array<double, 8> kGaussNodes{
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights{
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

}  // namespace

std::pair<std::complex<double>, std::complex<double>> mu_pm(double xi_sq) {
    if (xi_sq < 0.0) throw std::invalid_argument("mu_pm: xi_sq must be nonnegative");
    const double m = 1.0 - 4.0 * xi_sq;
    if (m >= 0.0) {
        const double s = std::sqrt(m);
        // mu_+ in the cancellation-free form; mu_+ mu_- = xi_sq.
        return {{-2.0 * xi_sq / (1.0 + s), 0.0}, {-0.5 * (1.0 + s), 0.0}};
    }
    const double s = 0.5 * std::sqrt(-m);
    return {{-0.5, s}, {-0.5, -s}};
}

std::complex<double> mu_0(double xi_sq) {
    const double m = 1.0 - 4.0 * xi_sq;
    return m >= 0.0 ? std::complex<double>(std::sqrt(m), 0.0)
                    : std::complex<double>(0.0, std::sqrt(-m));
}

double green_hat(double xi_sq, double t) {
    if (t < 0.0) throw std::invalid_argument("green_hat: t must be nonnegative");
    if (t == 0.0) return 0.0;
    const double m = 1.0 - 4.0 * xi_sq;
    const double w = 0.25 * m * t * t;
    if (std::abs(w) < kSeriesBound) return t * std::exp(-0.5 * t) * sinhc_series(w);
    if (m > 0.0) {
        const double s = std::sqrt(m);
        const double mu_plus = -2.0 * xi_sq / (1.0 + s);
        const double mu_minus = -0.5 * (1.0 + s);
        return (std::exp(mu_plus * t) - std::exp(mu_minus * t)) / s;
    }
    const double s = std::sqrt(-m);
    return 2.0 * std::exp(-0.5 * t) * std::sin(0.5 * t * s) / s;
}

double green_hat_dt(double xi_sq, double t) {
    if (t < 0.0) throw std::invalid_argument("green_hat_dt: t must be nonnegative");
    const double m = 1.0 - 4.0 * xi_sq;
    const double w = 0.25 * m * t * t;
    if (std::abs(w) < kSeriesBound)
        return std::exp(-0.5 * t) * (cosh_series(w) - 0.5 * t * sinhc_series(w));
    if (m > 0.0) {
        const double s = std::sqrt(m);
        const double mu_plus = -2.0 * xi_sq / (1.0 + s);
        const double mu_minus = -0.5 * (1.0 + s);
        return (mu_plus * std::exp(mu_plus * t) - mu_minus * std::exp(mu_minus * t)) / s;
    }
    const double s = std::sqrt(-m);
    const double z = 0.5 * t * s;
    return std::exp(-0.5 * t) * (std::cos(z) - std::sin(z) / s);
}

double green_hat_dtt(double xi_sq, double t) {
    return -green_hat_dt(xi_sq, t) - xi_sq * green_hat(xi_sq, t);
}

SymbolTable build_symbol_table(const Grid& grid, double step) {
    if (!(step >= 0.0) || !std::isfinite(step))
        throw std::invalid_argument("build_symbol_table: step must be nonnegative");
    SymbolTable table{grid, step, grid.squared_frequencies(), {}, {}, {}, {}, {}, {}, {}};
    const std::size_t n = grid.size();
    table.g.resize(n);
    table.gt.resize(n);
    table.gtt.resize(n);
    table.du0.assign(n, 0.0);
    table.du1.assign(n, 0.0);
    table.dv0.assign(n, 0.0);
    table.dv1.assign(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const double k2 = table.xi_sq[i];
        table.g[i] = green_hat(k2, step);
        table.gt[i] = green_hat_dt(k2, step);
        table.gtt[i] = -table.gt[i] - k2 * table.g[i];
        if (step == 0.0) continue;
        for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
            const double frac = 0.5 * (1.0 + kGaussNodes[q]);  // s / step
            const double wq = 0.5 * step * kGaussWeights[q];
            const double lag = step * (1.0 - frac);
            const double gq = green_hat(k2, lag);
            const double gtq = green_hat_dt(k2, lag);
            table.du0[i] += wq * gq * (1.0 - frac);
            table.du1[i] += wq * gq * frac;
            table.dv0[i] += wq * gtq * (1.0 - frac);
            table.dv1[i] += wq * gtq * frac;
        }
    }
    return table;
}

void validate(const CutoffSpec& spec) {
    if (!(spec.eps > 0.0) || !(spec.R > 0.0))
        throw std::invalid_argument("cutoff: eps and R must be positive");
    if (!(2.0 * spec.eps < spec.R - 1.0))
        throw std::invalid_argument("cutoff: requires 2 eps < R - 1");
}

double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

double cutoff(int band, double xi_norm, const CutoffSpec& spec) {
    validate(spec);
    if (xi_norm < 0.0) throw std::invalid_argument("cutoff: negative radius");
    const double low = 1.0 - smooth_step((xi_norm - spec.eps) / spec.eps);
    const double high = smooth_step(xi_norm - (spec.R - 1.0));
    switch (band) {
        case 1: return low;
        case 2: return 1.0 - low - high;
        case 3: return high;
        default: throw std::invalid_argument("cutoff: band must be 1, 2 or 3");
    }
}

int modes_in_interval(const Grid& grid, double lo, double hi) {
    int count = 0;
    for (int j = 1; j < grid.points_per_dim() / 2; ++j) {
        const double xi = grid.frequency_step() * j;
        if (xi > lo && xi < hi) ++count;
    }
    return count;
}

SpectralField green_band_spectral(int band, const Grid& grid, double t, const CutoffSpec& spec) {
    validate(spec);
    if (band < 1 || band > 3) throw std::invalid_argument("green_band: band must be 1, 2 or 3");
    if (!(t > 0.0)) throw std::invalid_argument("green_band: t must be positive");

    constexpr int kMinModes = 8;
    const bool needs_low = band != 3;
    const bool needs_high = band != 1;
    if (needs_low && modes_in_interval(grid, spec.eps, 2.0 * spec.eps) < kMinModes)
        throw std::invalid_argument("green_band: low-frequency transition under-resolved");
    if (needs_high && modes_in_interval(grid, spec.R - 1.0, spec.R) < kMinModes)
        throw std::invalid_argument("green_band: high-frequency transition under-resolved");

    const double scale =
        std::pow(static_cast<double>(grid.points_per_dim()) / (2.0 * grid.half_width()), grid.n_dims());
    const auto xi_sq = grid.squared_frequencies();
    SpectralField out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto idx = grid.unflatten(i);
        int parity = 0;
        for (int d = 0; d < grid.n_dims(); ++d) parity += grid.lattice_index(idx[d]);
        // (-1)^j moves the kernel origin from x = -L to x = 0.
        const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
        const double chi = cutoff(band, std::sqrt(xi_sq[i]), spec);
        out[i] = chi == 0.0 ? 0.0 : sign * scale * chi * green_hat(xi_sq[i], t);
    }
    return out;
}

Field green_band(int band, const Grid& grid, double t, const CutoffSpec& spec) {
    return inverse_transform(green_band_spectral(band, grid, t, spec));
}

}  // namespace dissipwave
