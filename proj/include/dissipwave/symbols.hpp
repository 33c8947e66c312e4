#pragma once

/// @file symbols.hpp
/// @brief Fourier symbol of the linear dissipative wave operator.
///
/// For each frequency the Green symbol solves v'' + v' + |xi|^2 v = 0 with
/// v(0) = 0, v'(0) = 1. With m = 1 - 4|xi|^2 the closed form is
///
///     G(xi, t) = (e^{mu_+ t} - e^{mu_- t}) / sqrt(m),   mu_pm = (-1 +- sqrt(m)) / 2,
///
/// which has a removable singularity at |xi| = 1/2. All evaluations below go
/// through t e^{-t/2} S(m t^2 / 4) with S(w) = sinh(sqrt w)/sqrt w continued
/// analytically to w < 0, so the branch point needs no special casing.

#include <complex>
#include <utility>
#include <vector>

#include "dissipwave/grid.hpp"

namespace dissipwave {

/// Roots (mu_+, mu_-) of tau^2 + tau + xi_sq = 0.
std::pair<std::complex<double>, std::complex<double>> mu_pm(double xi_sq);

/// mu_0 = sqrt(1 - 4 xi_sq), purely imaginary above the branch point.
std::complex<double> mu_0(double xi_sq);

double green_hat(double xi_sq, double t);
double green_hat_dt(double xi_sq, double t);

/// Second time derivative from the mode equation: -G_t - xi_sq G.
double green_hat_dtt(double xi_sq, double t);

/// Per-mode symbol values for one fixed step, plus the exact-kernel weights of
/// the linear-in-time Duhamel quadrature used by the exponential integrator:
///   du0 = int_0^D G(D - s)(1 - s/D) ds,  du1 = int_0^D G(D - s)(s/D) ds,
/// and dv0, dv1 likewise with G_t.
struct SymbolTable {
    Grid grid;
    double step = 0.0;
    std::vector<double> xi_sq;
    std::vector<double> g;
    std::vector<double> gt;
    std::vector<double> gtt;
    std::vector<double> du0, du1, dv0, dv1;
};

/// step >= 0 (step 0 yields the identity propagator).
SymbolTable build_symbol_table(const Grid& grid, double step);

struct CutoffSpec {
    double eps = 0.4;
    double R = 2.0;
};

/// Throws std::invalid_argument unless 0 < eps, 0 < R and 2 eps < R - 1.
void validate(const CutoffSpec& spec);

/// C-infinity step: 0 for s <= 0, 1 for s >= 1, built from exp(-1/s).
double smooth_step(double s);

/// chi_1 (low), chi_2 (middle) and chi_3 (high) at radius |xi|.
double cutoff(int band, double xi_norm, const CutoffSpec& spec);

/// Band-restricted symbol chi_i G on the grid's lattice, scaled so that its
/// inverse transform samples the whole-space kernel G_i(x, t) centred at x = 0.
/// Throws if fewer than 8 lattice modes fall inside any transition zone the
/// band depends on, or if t <= 0.
SpectralField green_band_spectral(int band, const Grid& grid, double t, const CutoffSpec& spec);

Field green_band(int band, const Grid& grid, double t, const CutoffSpec& spec);

/// Number of positive lattice frequencies strictly inside (lo, hi).
int modes_in_interval(const Grid& grid, double lo, double hi);

}  // namespace dissipwave
