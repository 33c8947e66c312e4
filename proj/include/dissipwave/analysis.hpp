#pragma once

/// @file analysis.hpp
/// @brief Norms, energies, weighted profiles and decay-rate fits.

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dissipwave/grid.hpp"
#include "dissipwave/solver.hpp"

namespace dissipwave {

using Series = std::vector<std::pair<double, double>>;

/// Named time series, iterated in key order.
using TimeSeries = std::map<std::string, Series>;

/// Discrete L^p norm (sum |f|^p dx^n)^(1/p); p = infinity gives max |f|. Requires p >= 1.
double lp_norm(const Field& f, double p);

/// (sum_{k=0}^{s} ||∇^k f||^2)^(1/2), computed from Fourier weights sum_k |xi|^{2k}.
double sobolev_norm(const Field& f, int s);
double sobolev_norm(const SpectralField& f, int s);

/// ||f||^2 dx^n / N^n of a spectral field, i.e. ||f||_{L^2}^2 by Parseval.
double l2_squared(const SpectralField& f);

/// E = ½||u_t||² + ½||∇u||² + ||u||_{θ+2}^{θ+2}/(θ+2). The potential term is
/// dropped for linear states (Nonlinearity::none).
double basic_energy(const SolverState& state);

/// ||u0||_{H^{s+1}} + ||u1||_{H^s}
double e0_norm(const Field& u0, const Field& u1, int s);

/// sup_x |f(x)| (1+t)^{(n+|alpha|)/2} (1 + |x|²/(1+t))^r. Requires r > max(n/2, 1).
double weighted_profile(const Field& f, double t, double r, int alpha_order = 0);

struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
};

/// Least squares of log(value) against log(1+t) over t in [t_lo, t_hi].
/// Needs at least min_points (>= 3) points in the window, all with value > 0.
SlopeFit fit_decay_rate(std::span<const std::pair<double, double>> series, double t_lo, double t_hi,
                        std::size_t min_points = 5);

struct AffineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least squares of log(value) against t (exponential-rate fit) with R².
AffineFit fit_log_affine(std::span<const std::pair<double, double>> series, double t_lo, double t_hi,
                         std::size_t min_points = 5);

/// A norm ||d_t^h d_{x_1}^alpha u||_{L^p}.
struct QuantitySpec {
    double p = 0.0;
    int alpha = 0;
    int h = 0;
};

std::string label(const QuantitySpec& q);

/// Parses "p:alpha:h" with p one of 1, 2, inf (or any real >= 1).
QuantitySpec parse_quantity(const std::string& text);

double measure(const SolverState& state, const QuantitySpec& q);

struct DecayContext {
    int n_dims = 1;
    bool semilinear = false;
    double t_lo = 0.0;
    double t_hi = 0.0;
};

struct DecayReport {
    std::string quantity;
    double slope = 0.0;
    double std_error = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool one_sided = false;
    bool pass = false;
};

/// Target slope: linear runs -(n/2)(1-1/p) - (|alpha| + 2h)/2; semilinear runs
/// -(n/2)(1-1/p) - |alpha|/2, time derivatives contributing nothing.
double target_slope(const QuantitySpec& q, int n_dims, bool semilinear);

/// 0.15 for linear time derivatives, 0.10 otherwise.
double slope_tolerance(const QuantitySpec& q, bool semilinear);

/// Semilinear time derivatives are checked one-sided: slope <= target + tol.
std::vector<DecayReport> decay_report(const TimeSeries& series, const DecayContext& context,
                                      const std::vector<QuantitySpec>& targets);

/// Per-step energy bookkeeping along a run.
class EnergyLedger {
public:
    /// `s` selects the a priori norms ||u||_{H^{s+1}} and ||u_t||_{H^s}; e0 is the data size.
    EnergyLedger(int s, double e0);

    void record(const SolverState& state);

    int sobolev_index() const { return s_; }
    double e0() const { return e0_; }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& energy() const { return energy_; }
    const std::vector<double>& dissipation_integral() const { return dissipation_; }
    const std::vector<double>& sup_norm() const { return sup_; }
    const std::vector<double>& sobolev_u() const { return sob_u_; }
    const std::vector<double>& sobolev_v() const { return sob_v_; }

    /// ||u||²_{H^{s+1}} + ||u_t||²_{H^s} + E at each record.
    const std::vector<double>& apriori() const { return apriori_; }

    /// max_k (E_{k+1} - E_k) / E_0; negative when strictly decreasing.
    double max_step_increase() const;

    /// max_k |E_k - E_0 + D_k| / E_0 with D the trapezoid integral of ||u_t||².
    double balance_residual() const;

    double max_apriori() const;
    double max_sup() const;

private:
    int s_;
    double e0_;
    std::vector<double> times_, energy_, dissipation_, sup_, sob_u_, sob_v_, apriori_;
    std::vector<double> kinetic_;
};

void write_time_series_csv(std::ostream& out, const TimeSeries& series);
void write_decay_csv(std::ostream& out, const std::vector<DecayReport>& reports);
void write_decay_text(std::ostream& out, const std::vector<DecayReport>& reports);

/// Shortest round-trip decimal text for a double.
std::string format_number(double v);

}  // namespace dissipwave
