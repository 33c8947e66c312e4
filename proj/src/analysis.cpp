#include "dissipwave/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dissipwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sobolev_weight(double xi_sq, int s) {
    double w = 0.0, p = 1.0;
    for (int k = 0; k <= s; ++k) {
        w += p;
        p *= xi_sq;
    }
    return w;
}

double weighted_l2_squared(const SpectralField& f, int s) {
    const Grid& g = f.grid();
    const auto xi_sq = g.squared_frequencies();
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += sobolev_weight(xi_sq[i], s) * std::norm(f[i]);
    return acc * g.cell_volume() / static_cast<double>(g.size());
}

std::vector<std::pair<double, double>> window(std::span<const std::pair<double, double>> series,
                                              double t_lo, double t_hi, std::size_t min_points) {
    if (min_points < 3) throw std::invalid_argument("fit: min_points must be >= 3");
    std::vector<std::pair<double, double>> out;
    for (const auto& [t, v] : series) {
        if (t < t_lo || t > t_hi) continue;
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("fit: nonpositive value in fit window at t = " +
                                        format_number(t));
        out.emplace_back(t, v);
    }
    if (out.size() < min_points)
        throw std::invalid_argument("fit: fewer than " + std::to_string(min_points) + " points in window");
    return out;
}

struct LineFit {
    double slope, intercept, ssr, sxx, syy;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit: degenerate abscissae");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (intercept + slope * x[i]);
        ssr += r * r;
    }
    return {slope, intercept, ssr, sxx, syy};
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, end);
}

double lp_norm(const Field& f, double p) {
    if (p == kInf) {
        double m = 0.0;
        for (double v : f.values()) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    double acc = 0.0;
    if (p == 1.0) {
        for (double v : f.values()) acc += std::abs(v);
        return acc * f.grid().cell_volume();
    }
    if (p == 2.0) {
        for (double v : f.values()) acc += v * v;
        return std::sqrt(acc * f.grid().cell_volume());
    }
    for (double v : f.values()) acc += std::pow(std::abs(v), p);
    return std::pow(acc * f.grid().cell_volume(), 1.0 / p);
}

double sobolev_norm(const SpectralField& f, int s) {
    if (s < 0) throw std::invalid_argument("sobolev_norm: s must be nonnegative");
    if (s > f.grid().points_per_dim() / 4) throw std::invalid_argument("sobolev_norm: s exceeds N/4");
    return std::sqrt(weighted_l2_squared(f, s));
}

double sobolev_norm(const Field& f, int s) { return sobolev_norm(forward_transform(f), s); }

double l2_squared(const SpectralField& f) { return weighted_l2_squared(f, 0); }

double basic_energy(const SolverState& state) {
    const Grid& g = state.grid();
    const double scale = g.cell_volume() / static_cast<double>(g.size());
    const auto xi_sq = g.squared_frequencies();
    double kinetic = 0.0, gradient = 0.0;
    for (std::size_t i = 0; i < state.u_hat.size(); ++i) {
        kinetic += std::norm(state.v_hat[i]);
        gradient += xi_sq[i] * std::norm(state.u_hat[i]);
    }
    double energy = 0.5 * (kinetic + gradient) * scale;
    if (state.nonlinearity != Nonlinearity::none) {
        const Field u = inverse_transform(state.u_hat);
        const int q = state.theta + 2;
        double potential = 0.0;
        for (double v : u.values()) {
            const double a = std::abs(v);
            double p = 1.0;
            for (int k = 0; k < q; ++k) p *= a;
            potential += p;
        }
        energy += potential * g.cell_volume() / q;
    }
    return energy;
}

double e0_norm(const Field& u0, const Field& u1, int s) {
    if (!(u0.grid() == u1.grid())) throw std::invalid_argument("e0_norm: grid mismatch");
    return sobolev_norm(u0, s + 1) + sobolev_norm(u1, s);
}

double weighted_profile(const Field& f, double t, double r, int alpha_order) {
    const int n = f.grid().n_dims();
    if (!(r > std::max(0.5 * n, 1.0)))
        throw std::invalid_argument("weighted_profile: r must exceed max(n/2, 1)");
    if (t < 0.0) throw std::invalid_argument("weighted_profile: t must be nonnegative");
    const auto radii = f.grid().squared_radii();
    const double time_weight = std::pow(1.0 + t, 0.5 * (n + alpha_order));
    double best = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double w = std::pow(1.0 + radii[i] / (1.0 + t), r);
        best = std::max(best, std::abs(f[i]) * w);
    }
    return best * time_weight;
}

SlopeFit fit_decay_rate(std::span<const std::pair<double, double>> series, double t_lo, double t_hi,
                        std::size_t min_points) {
    const auto pts = window(series, t_lo, t_hi, min_points);
    std::vector<double> x, y;
    for (const auto& [t, v] : pts) {
        x.push_back(std::log1p(t));
        y.push_back(std::log(v));
    }
    const auto fit = least_squares(x, y);
    const double dof = static_cast<double>(pts.size()) - 2.0;
    return SlopeFit{fit.slope, std::sqrt(fit.ssr / dof / fit.sxx), fit.intercept, pts.size()};
}

AffineFit fit_log_affine(std::span<const std::pair<double, double>> series, double t_lo, double t_hi,
                         std::size_t min_points) {
    const auto pts = window(series, t_lo, t_hi, min_points);
    std::vector<double> x, y;
    for (const auto& [t, v] : pts) {
        x.push_back(t);
        y.push_back(std::log(v));
    }
    const auto fit = least_squares(x, y);
    const double r2 = fit.syy == 0.0 ? 1.0 : 1.0 - fit.ssr / fit.syy;
    return AffineFit{fit.slope, fit.intercept, r2};
}

std::string label(const QuantitySpec& q) {
    std::string norm = q.p == kInf ? "Linf" : "L" + format_number(q.p);
    std::string op;
    if (q.h == 1) op += "dt ";
    if (q.h > 1) op += "dt^" + std::to_string(q.h) + " ";
    if (q.alpha == 1) op += "dx ";
    if (q.alpha > 1) op += "dx^" + std::to_string(q.alpha) + " ";
    return norm + "(" + op + "u)";
}

QuantitySpec parse_quantity(const std::string& text) {
    std::stringstream ss(text);
    std::string p, a, h;
    if (!std::getline(ss, p, ':') || !std::getline(ss, a, ':') || !std::getline(ss, h))
        throw std::invalid_argument("quantity '" + text + "' is not of the form p:alpha:h");
    QuantitySpec q;
    try {
        q.p = (p == "inf" || p == "infinity") ? kInf : std::stod(p);
        q.alpha = std::stoi(a);
        q.h = std::stoi(h);
    } catch (const std::exception&) {
        throw std::invalid_argument("quantity '" + text + "' has a malformed field");
    }
    if (!(q.p >= 1.0) || q.alpha < 0 || q.h < 0 || q.h > 2)
        throw std::invalid_argument("quantity '" + text + "' out of range");
    return q;
}

double measure(const SolverState& state, const QuantitySpec& q) {
    Field f = time_derivative(state, q.h);
    if (q.alpha > 0) f = derivative(f, MultiIndex{q.alpha, 0, 0});
    return lp_norm(f, q.p);
}

double target_slope(const QuantitySpec& q, int n_dims, bool semilinear) {
    const double integrability = q.p == kInf ? 1.0 : 1.0 - 1.0 / q.p;
    const double base = -0.5 * n_dims * integrability - 0.5 * q.alpha;
    return semilinear ? base : base - q.h;
}

double slope_tolerance(const QuantitySpec& q, bool semilinear) {
    return (!semilinear && q.h >= 1) ? 0.15 : 0.10;
}

std::vector<DecayReport> decay_report(const TimeSeries& series, const DecayContext& context,
                                      const std::vector<QuantitySpec>& targets) {
    std::vector<DecayReport> out;
    for (const auto& q : targets) {
        const std::string name = label(q);
        auto it = series.find(name);
        if (it == series.end()) throw std::invalid_argument("decay_report: missing series " + name);
        const auto fit = fit_decay_rate(it->second, context.t_lo, context.t_hi);
        DecayReport r;
        r.quantity = name;
        r.slope = fit.slope;
        r.std_error = fit.std_error;
        r.t_lo = context.t_lo;
        r.t_hi = context.t_hi;
        r.target = target_slope(q, context.n_dims, context.semilinear);
        r.tolerance = slope_tolerance(q, context.semilinear);
        r.one_sided = context.semilinear && q.h >= 1;
        r.pass = r.one_sided ? r.slope <= r.target + r.tolerance
                             : std::abs(r.slope - r.target) <= r.tolerance;
        out.push_back(r);
    }
    return out;
}

EnergyLedger::EnergyLedger(int s, double e0) : s_(s), e0_(e0) {
    if (s < 0) throw std::invalid_argument("ledger: s must be nonnegative");
}

void EnergyLedger::record(const SolverState& state) {
    const double kinetic = l2_squared(state.v_hat);
    const double e = basic_energy(state);
    if (!times_.empty() && state.time < times_.back())
        throw std::invalid_argument("ledger: time went backwards");
    const double d = times_.empty()
                         ? 0.0
                         : dissipation_.back() + 0.5 * (state.time - times_.back()) * (kinetic + kinetic_.back());
    const double su = weighted_l2_squared(state.u_hat, s_ + 1);
    const double sv = weighted_l2_squared(state.v_hat, s_);

    times_.push_back(state.time);
    energy_.push_back(e);
    kinetic_.push_back(kinetic);
    dissipation_.push_back(d);
    sup_.push_back(lp_norm(inverse_transform(state.u_hat), kInf));
    sob_u_.push_back(std::sqrt(su));
    sob_v_.push_back(std::sqrt(sv));
    apriori_.push_back(su + sv + e);
}

double EnergyLedger::max_step_increase() const {
    if (energy_.size() < 2 || energy_.front() == 0.0) return 0.0;
    double worst = -kInf;
    for (std::size_t k = 1; k < energy_.size(); ++k) worst = std::max(worst, energy_[k] - energy_[k - 1]);
    return worst / energy_.front();
}

double EnergyLedger::balance_residual() const {
    if (energy_.empty() || energy_.front() == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < energy_.size(); ++k)
        worst = std::max(worst, std::abs(energy_[k] - energy_.front() + dissipation_[k]));
    return worst / energy_.front();
}

double EnergyLedger::max_apriori() const {
    return apriori_.empty() ? 0.0 : *std::max_element(apriori_.begin(), apriori_.end());
}

double EnergyLedger::max_sup() const {
    return sup_.empty() ? 0.0 : *std::max_element(sup_.begin(), sup_.end());
}

void write_time_series_csv(std::ostream& out, const TimeSeries& series) {
    // Rows grouped by time, quantities in key order within a time.
    std::map<double, std::vector<std::pair<std::string, double>>> rows;
    for (const auto& [name, values] : series)
        for (const auto& [t, v] : values) rows[t].emplace_back(name, v);
    out << "t,quantity,value\n";
    for (const auto& [t, entries] : rows)
        for (const auto& [name, v] : entries)
            out << format_number(t) << ',' << name << ',' << format_number(v) << '\n';
}

void write_decay_csv(std::ostream& out, const std::vector<DecayReport>& reports) {
    out << "quantity,slope,stderr,target,tolerance,verdict\n";
    for (const auto& r : reports) {
        out << r.quantity << ',' << format_number(r.slope) << ',' << format_number(r.std_error) << ','
            << format_number(r.target) << ',' << format_number(r.tolerance)
            << ',' << (r.pass ? "pass" : "fail") << '\n';
    }
}

void write_decay_text(std::ostream& out, const std::vector<DecayReport>& reports) {
    for (const auto& r : reports) {
        char line[256];
        std::snprintf(line, sizeof(line),
                      "%-16s slope %+.4f (stderr %.1e) over [%g, %g]; target %+.3f %s %.2f: %s\n",
                      r.quantity.c_str(), r.slope, r.std_error, r.t_lo, r.t_hi, r.target,
                      r.one_sided ? "upper bound, tol" : "+-", r.tolerance, r.pass ? "PASS" : "FAIL");
        out << line;
    }
}

}  // namespace dissipwave
