#pragma once

/// @file solver.hpp
/// @brief Time integration of u_tt - Δu + u_t = f(u) on a periodic grid.
///
/// The state is carried in Fourier space as (u_hat, v_hat) with v = u_t.
/// Linear propagation is exact per mode through the Green symbol; the
/// nonlinearity is evaluated pseudo-spectrally.

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dissipwave/grid.hpp"
#include "dissipwave/symbols.hpp"

namespace dissipwave {

/// f(u) = 0, -|u|^theta u (absorbing) or +|u|^theta u (source).
enum class Nonlinearity { none, absorbing, source };

enum class Integrator { reference_rk4, exponential_duhamel };

std::string to_string(Nonlinearity n);
std::string to_string(Integrator i);
Nonlinearity parse_nonlinearity(const std::string& s);
Integrator parse_integrator(const std::string& s);

struct SolverState {
    SpectralField u_hat;
    SpectralField v_hat;
    double time = 0.0;
    int theta = 1;
    Nonlinearity nonlinearity = Nonlinearity::absorbing;

    const Grid& grid() const { return u_hat.grid(); }
};

SolverState make_state(const Field& u0, const Field& u1, int theta,
                       Nonlinearity nonlinearity = Nonlinearity::absorbing, double time = 0.0);

struct SolverConfig {
    int theta = 3;
    double dt = 0.01;
    double t_final = 1.0;
    Integrator integrator = Integrator::exponential_duhamel;
    Nonlinearity nonlinearity = Nonlinearity::absorbing;
    bool dealias = true;
    std::vector<double> snapshot_times;
    double delta_bar = 0.5;

    /// Runs abort once sup|u| exceeds this.
    double instability_threshold() const { return 10.0 * delta_bar; }
};

/// 2/3-rule dealiasing is the default for theta >= 2.
inline bool default_dealias(int theta) { return theta >= 2; }

/// Throws std::invalid_argument on dt <= 0, dt >= t_final, t_final not a whole
/// number of steps, theta < 1, delta_bar outside (0, 1), or misaligned snapshots.
void validate(const SolverConfig& config);

/// Thrown when sup|u| exceeds the instability threshold.
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(double time, double sup_norm);
    double time() const { return time_; }
    double sup_norm() const { return sup_; }

private:
    double time_;
    double sup_;
};

/// Exact free evolution: (u(t), u_t(t)) for data (u0, u1).
std::pair<Field, Field> linear_solution(const Field& u0, const Field& u1, double t);

/// 2x2 per-mode propagator [[G_t + G, G], [G_tt + G_t, G_t]] at step delta, row-major.
std::array<double, 4> propagator(double xi_sq, double delta);

SolverState linear_step(const SolverState& state, const SymbolTable& table);

/// Pointwise -|u|^theta u.
Field apply_nonlinearity(const Field& u, int theta);

/// Pointwise f(u) for the given sign convention.
Field nonlinear_term(const Field& u, int theta, Nonlinearity kind);

/// Fourier coefficients of f(u) evaluated pseudo-spectrally, optionally with
/// 2/3-rule truncation applied to u before the power and to the result.
SpectralField nonlinear_spectral(const SpectralField& u_hat, int theta, Nonlinearity kind,
                                 bool dealias);

/// One step of config.integrator; table must be built for config.dt on the state's grid.
/// Throws InstabilityError when sup|u| at the step end exceeds the threshold.
SolverState step_semilinear(const SolverState& state, const SolverConfig& config,
                            const SymbolTable& table);

/// Observers see immutable states: on_step after every step (and once at t = 0),
/// on_snapshot at each configured snapshot time.
struct Observers {
    std::function<void(const SolverState&)> on_step;
    std::function<void(const SolverState&)> on_snapshot;
};

struct RunRecord {
    SolverConfig config;
    Grid grid;
    std::size_t steps = 0;
    SolverState final_state;
    double wall_seconds = 0.0;
};

/// Integrates from (u0, u1) at t = 0 to config.t_final. Deterministic given config.
RunRecord solve(const Field& u0, const Field& u1, const SolverConfig& config,
                const Observers& observers = {});

/// d^h u / dt^h for h in {0, 1, 2}; h = 2 uses the equation: Δu - u_t + f(u).
Field time_derivative(const SolverState& state, int h);

}  // namespace dissipwave
