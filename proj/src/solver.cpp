#include "dissipwave/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace dissipwave {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

// |u|^theta * u for integer theta >= 1 without calling pow at u = 0.
double signed_power(double u, int theta) {
    const double u2 = u * u;
    double p = 1.0;
    for (int k = 0; k < theta / 2; ++k) p *= u2;
    if (theta % 2 == 1) p *= std::abs(u);
    return p * u;
}

double sign_of(Nonlinearity kind) {
    switch (kind) {
        case Nonlinearity::none: return 0.0;
        case Nonlinearity::absorbing: return -1.0;
        case Nonlinearity::source: return 1.0;
    }
    return 0.0;
}

std::vector<double> build_dealias_mask(const Grid& grid) {
    const int cut = grid.points_per_dim() / 3;
    std::vector<double> mask(grid.size(), 1.0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        auto idx = grid.unflatten(i);
        for (int d = 0; d < grid.n_dims(); ++d)
            if (std::abs(grid.lattice_index(idx[d])) > cut) mask[i] = 0.0;
    }
    return mask;
}

const std::vector<double>& dealias_mask(const Grid& grid) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::vector<double>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(grid.n_dims(), grid.points_per_dim());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_dealias_mask(grid)).first;
    return it->second;
}

double sup_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(const SpectralField& f) {
    for (auto c : f.coefficients())
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

// (u', v') = (v, -|xi|^2 u - v + F(u))
std::pair<SpectralField, SpectralField> rhs(const SpectralField& u, const SpectralField& v,
                                            const std::vector<double>& xi_sq, int theta,
                                            Nonlinearity kind, bool dealias) {
    SpectralField du = v;
    SpectralField dv(u.grid());
    if (kind != Nonlinearity::none) dv = nonlinear_spectral(u, theta, kind, dealias);
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] += -xi_sq[i] * u[i] - v[i];
    return {std::move(du), std::move(dv)};
}

SpectralField axpy(const SpectralField& y, double a, const SpectralField& x) {
    SpectralField out = y;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * x[i];
    return out;
}

SolverState rk4_step(const SolverState& s, const SolverConfig& config, const SymbolTable& table) {
    const double h = config.dt;
    const auto& k2v = table.xi_sq;
    auto f = [&](const SpectralField& u, const SpectralField& v) {
        return rhs(u, v, k2v, s.theta, s.nonlinearity, config.dealias);
    };
    auto [a1, b1] = f(s.u_hat, s.v_hat);
    auto [a2, b2] = f(axpy(s.u_hat, 0.5 * h, a1), axpy(s.v_hat, 0.5 * h, b1));
    auto [a3, b3] = f(axpy(s.u_hat, 0.5 * h, a2), axpy(s.v_hat, 0.5 * h, b2));
    auto [a4, b4] = f(axpy(s.u_hat, h, a3), axpy(s.v_hat, h, b3));

    SolverState out = s;
    for (std::size_t i = 0; i < out.u_hat.size(); ++i) {
        out.u_hat[i] += h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
        out.v_hat[i] += h / 6.0 * (b1[i] + 2.0 * b2[i] + 2.0 * b3[i] + b4[i]);
    }
    out.time += h;
    return out;
}

// Exact linear part plus int_0^D G(D - s) F(s) ds with F linear in s between
// the step start and an exponential-Euler prediction of the step end.
SolverState exponential_step(const SolverState& s, const SolverConfig& config,
                             const SymbolTable& table) {
    SolverState lin = linear_step(s, table);
    if (s.nonlinearity == Nonlinearity::none) return lin;

    const SpectralField f0 = nonlinear_spectral(s.u_hat, s.theta, s.nonlinearity, config.dealias);
    SpectralField u_pred = lin.u_hat;
    for (std::size_t i = 0; i < u_pred.size(); ++i) u_pred[i] += (table.du0[i] + table.du1[i]) * f0[i];
    const SpectralField f1 = nonlinear_spectral(u_pred, s.theta, s.nonlinearity, config.dealias);

    for (std::size_t i = 0; i < lin.u_hat.size(); ++i) {
        lin.u_hat[i] += table.du0[i] * f0[i] + table.du1[i] * f1[i];
        lin.v_hat[i] += table.dv0[i] * f0[i] + table.dv1[i] * f1[i];
    }
    return lin;
}

std::size_t step_count(double span, double dt) {
    return static_cast<std::size_t>(std::llround(span / dt));
}

bool is_whole_steps(double span, double dt) {
    const double q = span / dt;
    return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
}

}  // namespace

std::string to_string(Nonlinearity n) {
    switch (n) {
        case Nonlinearity::none: return "none";
        case Nonlinearity::absorbing: return "absorbing";
        case Nonlinearity::source: return "source";
    }
    return "?";
}

std::string to_string(Integrator i) {
    return i == Integrator::reference_rk4 ? "reference_rk4" : "exponential_duhamel";
}

Nonlinearity parse_nonlinearity(const std::string& s) {
    if (s == "none") return Nonlinearity::none;
    if (s == "absorbing") return Nonlinearity::absorbing;
    if (s == "source") return Nonlinearity::source;
    throw std::invalid_argument("unknown nonlinearity '" + s + "'");
}

Integrator parse_integrator(const std::string& s) {
    if (s == "reference_rk4") return Integrator::reference_rk4;
    if (s == "exponential_duhamel") return Integrator::exponential_duhamel;
    throw std::invalid_argument("unknown integrator '" + s + "'");
}

SolverState make_state(const Field& u0, const Field& u1, int theta, Nonlinearity nonlinearity,
                       double time) {
    require_same_grid(u0.grid(), u1.grid(), "make_state");
    if (theta < 1) throw std::invalid_argument("make_state: theta must be >= 1");
    return SolverState{forward_transform(u0), forward_transform(u1), time, theta, nonlinearity};
}

void validate(const SolverConfig& config) {
    if (config.theta < 1) throw std::invalid_argument("solver: theta must be a positive integer");
    if (!(config.dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
    if (!(config.dt < config.t_final)) throw std::invalid_argument("solver: dt must be < t_final");
    if (!is_whole_steps(config.t_final, config.dt))
        throw std::invalid_argument("solver: t_final must be a whole number of steps");
    if (!(config.delta_bar > 0.0 && config.delta_bar < 1.0))
        throw std::invalid_argument("solver: delta_bar must lie in (0, 1)");
    for (double t : config.snapshot_times) {
        if (t < 0.0 || t > config.t_final * (1.0 + 1e-12))
            throw std::invalid_argument("solver: snapshot time outside [0, t_final]");
        if (!is_whole_steps(t, config.dt))
            throw std::invalid_argument("solver: snapshot time not on the step lattice");
    }
}

InstabilityError::InstabilityError(double time, double sup_norm)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "instability: sup|u| = " << sup_norm << " at t = " << time;
          return os.str();
      }()),
      time_(time),
      sup_(sup_norm) {}

std::array<double, 4> propagator(double xi_sq, double delta) {
    const double g = green_hat(xi_sq, delta);
    const double gt = green_hat_dt(xi_sq, delta);
    const double gtt = -gt - xi_sq * g;
    return {gt + g, g, gtt + gt, gt};
}

std::pair<Field, Field> linear_solution(const Field& u0, const Field& u1, double t) {
    require_same_grid(u0.grid(), u1.grid(), "linear_solution");
    if (t < 0.0) throw std::invalid_argument("linear_solution: t must be nonnegative");
    const auto a = forward_transform(u0);
    const auto b = forward_transform(u1);
    const auto xi_sq = u0.grid().squared_frequencies();
    SpectralField u(u0.grid()), v(u0.grid());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double g = green_hat(xi_sq[i], t);
        const double gt = green_hat_dt(xi_sq[i], t);
        const double gtt = -gt - xi_sq[i] * g;
        u[i] = g * (a[i] + b[i]) + gt * a[i];
        v[i] = gt * (a[i] + b[i]) + gtt * a[i];
    }
    return {inverse_transform(u), inverse_transform(v)};
}

SolverState linear_step(const SolverState& state, const SymbolTable& table) {
    require_same_grid(state.grid(), table.grid, "linear_step");
    SolverState out = state;
    for (std::size_t i = 0; i < out.u_hat.size(); ++i) {
        const Complex u = state.u_hat[i];
        const Complex v = state.v_hat[i];
        out.u_hat[i] = (table.gt[i] + table.g[i]) * u + table.g[i] * v;
        out.v_hat[i] = (table.gtt[i] + table.gt[i]) * u + table.gt[i] * v;
    }
    out.time += table.step;
    return out;
}

Field apply_nonlinearity(const Field& u, int theta) {
    return nonlinear_term(u, theta, Nonlinearity::absorbing);
}

Field nonlinear_term(const Field& u, int theta, Nonlinearity kind) {
    if (theta < 1) throw std::invalid_argument("nonlinearity: theta must be >= 1");
    const double sign = sign_of(kind);
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sign * signed_power(u[i], theta);
    return Field(u.grid(), std::move(out));
}

SpectralField nonlinear_spectral(const SpectralField& u_hat, int theta, Nonlinearity kind,
                                 bool dealias) {
    if (kind == Nonlinearity::none) return SpectralField(u_hat.grid());
    if (!dealias) return forward_transform(nonlinear_term(inverse_transform(u_hat), theta, kind));

    const auto& mask = dealias_mask(u_hat.grid());
    SpectralField filtered = u_hat;
    for (std::size_t i = 0; i < filtered.size(); ++i) filtered[i] *= mask[i];
    SpectralField out = forward_transform(nonlinear_term(inverse_transform(filtered), theta, kind));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
    return out;
}

SolverState step_semilinear(const SolverState& state, const SolverConfig& config,
                            const SymbolTable& table) {
    require_same_grid(state.grid(), table.grid, "step_semilinear");
    if (std::abs(table.step - config.dt) > 1e-14 * config.dt)
        throw std::invalid_argument("step_semilinear: table step does not match dt");

    constexpr double kInf = std::numeric_limits<double>::infinity();
    SolverState next = [&] {
        try {
            return config.integrator == Integrator::reference_rk4
                       ? rk4_step(state, config, table)
                       : exponential_step(state, config, table);
        } catch (const std::domain_error&) {
            throw InstabilityError(state.time + config.dt, kInf);
        }
    }();
    if (!all_finite(next.u_hat) || !all_finite(next.v_hat))
        throw InstabilityError(next.time, kInf);
    if (next.nonlinearity != Nonlinearity::none) {
        const double sup = [&] {
            try {
                return sup_abs(inverse_transform(next.u_hat));
            } catch (const std::domain_error&) {
                return kInf;
            }
        }();
        if (sup > config.instability_threshold()) throw InstabilityError(next.time, sup);
    }
    return next;
}

RunRecord solve(const Field& u0, const Field& u1, const SolverConfig& config,
                const Observers& observers) {
    validate(config);
    require_same_grid(u0.grid(), u1.grid(), "solve");
    const auto start = std::chrono::steady_clock::now();

    const std::size_t total = step_count(config.t_final, config.dt);
    std::vector<std::size_t> snapshot_steps;
    for (double t : config.snapshot_times) snapshot_steps.push_back(step_count(t, config.dt));
    std::sort(snapshot_steps.begin(), snapshot_steps.end());
    snapshot_steps.erase(std::unique(snapshot_steps.begin(), snapshot_steps.end()),
                         snapshot_steps.end());
    auto next_snapshot = snapshot_steps.begin();

    const SymbolTable table = build_symbol_table(u0.grid(), config.dt);
    SolverState state = make_state(u0, u1, config.theta, config.nonlinearity);

    auto notify = [&](std::size_t k) {
        if (observers.on_step) observers.on_step(state);
        if (next_snapshot != snapshot_steps.end() && *next_snapshot == k) {
            if (observers.on_snapshot) observers.on_snapshot(state);
            ++next_snapshot;
        }
    };

    notify(0);
    for (std::size_t k = 1; k <= total; ++k) {
        state = step_semilinear(state, config, table);
        state.time = static_cast<double>(k) * config.dt;
        notify(k);
    }

    const auto stop = std::chrono::steady_clock::now();
    return RunRecord{config, u0.grid(), total, std::move(state),
                     std::chrono::duration<double>(stop - start).count()};
}

Field time_derivative(const SolverState& state, int h) {
    switch (h) {
        case 0: return inverse_transform(state.u_hat);
        case 1: return inverse_transform(state.v_hat);
        case 2: {
            SpectralField acc = nonlinear_spectral(state.u_hat, state.theta, state.nonlinearity, false);
            const auto xi_sq = state.grid().squared_frequencies();
            for (std::size_t i = 0; i < acc.size(); ++i)
                acc[i] += -xi_sq[i] * state.u_hat[i] - state.v_hat[i];
            return inverse_transform(acc);
        }
        default: throw std::invalid_argument("time_derivative: h must be 0, 1 or 2");
    }
}

}  // namespace dissipwave
