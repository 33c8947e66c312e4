#pragma once

// Independent reference computations. Nothing here calls into the symbol or
// solver code it is used to check.

#include <utility>

#include "dissipwave/grid.hpp"

namespace dissipwave::oracle {

struct OdeResult {
    double value = 0.0;       // G
    double derivative = 0.0;  // dG/dt
    double est_error = 0.0;   // |difference| from the run at tol, bounds the error of the returned values
    int steps = 0;
};

/// Integrates v'' + v' + xi_sq v = 0, v(0) = 0, v'(0) = 1 to time t with an
/// adaptive Dormand-Prince 5(4) pair, local error per step <= tol (1 + |y|).
/// Two passes are made, at tol and tol/16; the second is returned. tol >= 1e-12.
/// Throws std::runtime_error on step-size underflow.
OdeResult mode_ode(double xi_sq, double t, double tol);

/// One-dimensional free-wave kernels applied to h by direct evaluation of its
/// trigonometric interpolant (naive DFT, no FFT):
///   first  = ½ ∫_{x-t}^{x+t} h(y) dy
///   second = ½ [h(x-t) + h(x+t)]
/// Requires n = 1 and 0 < t < L/2.
std::pair<Field, Field> dalembert(const Field& h, double t);

/// Heat semigroup e^{tΔ} g through the multiplier e^{-|xi|² t}.
Field heat_reference(const Field& g, double t);

}  // namespace dissipwave::oracle
