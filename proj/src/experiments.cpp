#include "dissipwave/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "dissipwave/oracle.hpp"
#include "dissipwave/snapshot.hpp"
#include "dissipwave/symbols.hpp"

namespace dissipwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sup_abs(const Field& f) { return lp_norm(f, kInf); }

Field load_field(const std::string& path, const Grid& grid) {
    Snapshot snap = read_snapshot(std::filesystem::path(path));
    if (!(snap.field.grid() == grid))
        throw ConfigError("snapshot " + path + " does not match the preset grid");
    return std::move(snap.field);
}

}  // namespace

Verdict make_verdict(std::string check, double value, std::string relation, double threshold) {
    bool pass = false;
    if (relation == "<=")
        pass = value <= threshold;
    else if (relation == "<")
        pass = value < threshold;
    else if (relation == ">=")
        pass = value >= threshold;
    else if (relation == ">")
        pass = value > threshold;
    else
        throw std::invalid_argument("make_verdict: unknown relation " + relation);
    return Verdict{std::move(check), value, std::move(relation), threshold, pass};
}

bool all_pass(const std::vector<Verdict>& verdicts) {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

void write_verdicts_csv(std::ostream& out, const std::vector<Verdict>& verdicts) {
    out << "check,value,relation,threshold,verdict\n";
    for (const auto& v : verdicts)
        out << v.check << ',' << format_number(v.value) << ',' << v.relation << ','
            << format_number(v.threshold) << ',' << (v.pass ? "pass" : "fail") << '\n';
}

void write_verdicts_text(std::ostream& out, const std::vector<Verdict>& verdicts) {
    for (const auto& v : verdicts) {
        char line[256];
        std::snprintf(line, sizeof line, "%-28s %14.6g %-2s %12.6g  %s\n", v.check.c_str(), v.value,
                      v.relation.c_str(), v.threshold, v.pass ? "PASS" : "FAIL");
        out << line;
    }
}

Field gaussian(const Grid& grid, const GaussianData& data) {
    const auto r2 = grid.squared_radii();
    std::vector<double> values(grid.size());
    const double denom = 2.0 * data.width * data.width;
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = data.amplitude * std::exp(-r2[i] / denom);
    return Field(grid, std::move(values));
}

Grid preset_grid(const ExperimentPreset& preset) {
    return make_grid(preset.dim, preset.points, preset.half_width);
}

std::pair<Field, Field> initial_data(const ExperimentPreset& preset) {
    const Grid grid = preset_grid(preset);
    Field u0 = preset.u0_file.empty() ? gaussian(grid, preset.u0) : load_field(preset.u0_file, grid);
    Field u1 = preset.u1_file.empty() ? gaussian(grid, preset.u1) : load_field(preset.u1_file, grid);
    return {std::move(u0), std::move(u1)};
}

// ---- symbols ----

SymbolSweep verify_symbols(const ExperimentPreset& preset) {
    SymbolSweep sweep;
    auto sample = [&](double xi_sq, double t) {
        const auto ode = oracle::mode_ode(xi_sq, t, preset.ode_tol);
        SymbolSample s;
        s.xi_sq = xi_sq;
        s.t = t;
        s.green = green_hat(xi_sq, t);
        s.green_dt = green_hat_dt(xi_sq, t);
        s.green_ode = ode.value;
        s.green_dt_ode = ode.derivative;
        s.deviation = std::max(std::abs(s.green - s.green_ode), std::abs(s.green_dt - s.green_dt_ode));
        sweep.max_deviation = std::max(sweep.max_deviation, s.deviation);
        sweep.samples.push_back(s);
    };

    const int m = preset.symbol_samples;
    for (int i = 0; i < m; ++i) {
        const double xi_sq = preset.symbol_xi_max * i / (m - 1);
        for (int j = 0; j < m; ++j) sample(xi_sq, preset.symbol_t_max * j / (m - 1));
    }
    std::mt19937_64 rng(static_cast<std::uint64_t>(preset.seed));
    std::uniform_real_distribution<double> xi_dist(0.0, preset.symbol_xi_max);
    std::uniform_real_distribution<double> t_dist(0.0, preset.symbol_t_max);
    for (int k = 0; k < preset.random_samples; ++k) {
        const double xi_sq = xi_dist(rng);
        sample(xi_sq, t_dist(rng));
    }

    for (double t : {0.1, 1.0, 10.0, 50.0}) {
        for (double d : {1e-10, 1e-12, 1e-14}) {
            const double jump = std::max(std::abs(green_hat(0.25 + d, t) - green_hat(0.25 - d, t)),
                                         std::abs(green_hat_dt(0.25 + d, t) - green_hat_dt(0.25 - d, t)));
            sweep.branch_jump = std::max(sweep.branch_jump, jump);
        }
    }
    return sweep;
}

std::vector<Verdict> symbol_verdicts(const SymbolSweep& sweep, const ExperimentPreset& preset) {
    return {make_verdict("symbol_vs_ode", sweep.max_deviation, "<=", preset.symbol_tol),
            make_verdict("branch_point_jump", sweep.branch_jump, "<=", preset.symbol_tol)};
}

void write_symbols_csv(std::ostream& out, const SymbolSweep& sweep) {
    out << "xi_sq,t,green,green_ode,green_dt,green_dt_ode,deviation\n";
    for (const auto& s : sweep.samples)
        out << format_number(s.xi_sq) << ',' << format_number(s.t) << ',' << format_number(s.green) << ','
            << format_number(s.green_ode) << ',' << format_number(s.green_dt) << ','
            << format_number(s.green_dt_ode) << ',' << format_number(s.deviation) << '\n';
}

// ---- frequency bands ----

BandSweep green_bands(const ExperimentPreset& preset) {
    const Grid grid = preset_grid(preset);
    const CutoffSpec spec = preset.cutoff();
    BandSweep out;
    MultiIndex dx{0, 0, 0};
    dx[0] = 1;
    for (double t : preset.band_times) {
        const SpectralField g1 = green_band_spectral(1, grid, t, spec);
        out.series["Linf(G1)"].emplace_back(t, sup_abs(inverse_transform(g1)));
        out.series["Linf(dx G1)"].emplace_back(t, sup_abs(inverse_transform(spectral_derivative(g1, dx))));
    }
    for (double t : preset.band2_times)
        out.series["Linf(G2)"].emplace_back(t, sup_abs(green_band(2, grid, t, spec)));

    const auto span_of = [](const std::vector<double>& ts) {
        return std::pair{*std::min_element(ts.begin(), ts.end()), *std::max_element(ts.begin(), ts.end())};
    };
    const auto [lo, hi] = span_of(preset.band_times);
    out.low = fit_decay_rate(out.series["Linf(G1)"], lo, hi, 3);
    out.low_dx = fit_decay_rate(out.series["Linf(dx G1)"], lo, hi, 3);
    const auto [lo2, hi2] = span_of(preset.band2_times);
    out.middle = fit_log_affine(out.series["Linf(G2)"], lo2, hi2, 3);
    return out;
}

std::vector<Verdict> band_verdicts(const BandSweep& bands, const ExperimentPreset& preset) {
    const double n = preset.dim;
    const double tol = 0.10;
    return {
        make_verdict("G1_slope_error", std::abs(bands.low.slope + 0.5 * n), "<=", tol),
        make_verdict("dx_G1_slope_error", std::abs(bands.low_dx.slope + 0.5 * n + 0.5), "<=", tol),
        make_verdict("G2_log_slope", bands.middle.slope, "<", preset.band2_slope_max),
        make_verdict("G2_r_squared", bands.middle.r_squared, ">=", preset.band2_r2_min),
    };
}

// ---- time stepping ----

Simulation simulate(const ExperimentPreset& preset, const std::optional<std::filesystem::path>& snapshot_dir) {
    validate(preset);
    auto [u0, u1] = initial_data(preset);
    const SolverConfig config = preset.solver_config();
    const int s = preset.resolved_sobolev_s();
    const double e0 = e0_norm(u0, u1, s);

    std::vector<QuantitySpec> quantities;
    for (const auto& r : preset.reports) quantities.push_back(parse_quantity(r));
    for (const auto& extra : {"inf:0:0", "2:0:0"}) {
        const QuantitySpec q = parse_quantity(extra);
        const bool present = std::any_of(quantities.begin(), quantities.end(),
                                         [&](const QuantitySpec& x) { return label(x) == label(q); });
        if (!present) quantities.push_back(q);
    }

    std::optional<Field> heat_data;
    if (preset.heat_compare) {
        std::vector<double> sum(u0.size());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = u0[i] + u1[i];
        heat_data.emplace(u0.grid(), std::move(sum));
    }

    TimeSeries series;
    EnergyLedger ledger(s, e0);
    int snapshot_index = 0;
    if (snapshot_dir) std::filesystem::create_directories(*snapshot_dir);

    Observers observers;
    observers.on_step = [&](const SolverState& state) { ledger.record(state); };
    observers.on_snapshot = [&](const SolverState& state) {
        const double t = state.time;
        for (const auto& q : quantities) series[label(q)].emplace_back(t, measure(state, q));
        series["E"].emplace_back(t, basic_energy(state));
        if (preset.weight_r > 0.0) {
            const Field u = inverse_transform(state.u_hat);
            series["profile(u)"].emplace_back(t, weighted_profile(u, t, preset.weight_r, 0));
        }
        if (heat_data && t > 0.0) {
            const Field u = inverse_transform(state.u_hat);
            const Field h = oracle::heat_reference(*heat_data, t);
            double worst = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) worst = std::max(worst, std::abs(u[i] - h[i]));
            series["Linf(u - heat)"].emplace_back(t, worst);
        }
        if (snapshot_dir) {
            char name[32];
            std::snprintf(name, sizeof name, "u_%05d.dwf", snapshot_index);
            write_snapshot(*snapshot_dir / name, inverse_transform(state.u_hat), t);
            std::snprintf(name, sizeof name, "ut_%05d.dwf", snapshot_index);
            write_snapshot(*snapshot_dir / name, inverse_transform(state.v_hat), t);
        }
        ++snapshot_index;
    };

    RunRecord run = solve(u0, u1, config, observers);
    return Simulation{std::move(run), std::move(series), std::move(ledger), e0};
}

std::vector<DecayReport> decay_reports(const Simulation& sim, const ExperimentPreset& preset) {
    std::vector<QuantitySpec> targets;
    for (const auto& r : preset.reports) targets.push_back(parse_quantity(r));
    const auto [lo, hi] = preset.resolved_fit_window();
    return decay_report(sim.series, DecayContext{preset.dim, preset.semilinear(), lo, hi}, targets);
}

std::vector<Verdict> decay_verdicts(const Simulation& sim, const ExperimentPreset& preset,
                                    const std::vector<DecayReport>& reports) {
    std::vector<Verdict> out;
    for (const auto& r : reports) {
        if (r.one_sided)
            out.push_back(make_verdict("slope " + r.quantity, r.slope, "<=", r.target + r.tolerance));
        else
            out.push_back(make_verdict("slope_error " + r.quantity, std::abs(r.slope - r.target), "<=",
                                       r.tolerance));
    }
    const auto [lo, hi] = preset.resolved_fit_window();
    if (preset.heat_compare) {
        const auto fit = fit_decay_rate(sim.series.at("Linf(u - heat)"), lo, hi);
        out.push_back(make_verdict("slope Linf(u - heat)", fit.slope, "<", preset.heat_slope_max));
    }
    if (preset.weight_r > 0.0) {
        const auto [plo, phi] = preset.resolved_profile_window();
        const auto& profile = sim.series.at("profile(u)");
        double start = -1.0, peak = 0.0;
        for (const auto& [t, v] : profile) {
            if (t < plo || t > phi) continue;
            if (start < 0.0) start = v;
            peak = std::max(peak, v);
        }
        if (!(start > 0.0)) throw std::invalid_argument("decay_verdicts: empty profile window");
        out.push_back(make_verdict("profile_growth_ratio", peak / start, "<=", preset.profile_factor));
    }
    return out;
}

FlipResult flip_check(const ExperimentPreset& preset) {
    ExperimentPreset flipped = preset;
    flipped.nonlinearity = Nonlinearity::source;
    flipped.u0.amplitude = preset.flip_amplitude;
    flipped.reports.clear();
    flipped.weight_r = 0.0;
    flipped.heat_compare = false;
    flipped.snapshot_interval = 0.0;

    auto [u0, u1] = initial_data(flipped);
    const SolverConfig config = flipped.solver_config();
    EnergyLedger ledger(flipped.resolved_sobolev_s(), e0_norm(u0, u1, flipped.resolved_sobolev_s()));
    Observers observers;
    observers.on_step = [&](const SolverState& state) { ledger.record(state); };

    FlipResult out;
    try {
        solve(u0, u1, config, observers);
    } catch (const InstabilityError& e) {
        out.unstable = true;
        out.failure_time = e.time();
    }
    const auto& energy = ledger.energy();
    out.max_step_increase = ledger.max_step_increase();
    out.energy_growth = energy.empty() || energy.front() == 0.0
                            ? 0.0
                            : *std::max_element(energy.begin(), energy.end()) / energy.front();
    out.grew = (out.unstable && out.energy_growth > 1.0) || out.max_step_increase > preset.monotone_tol;
    return out;
}

std::vector<Verdict> energy_verdicts(const Simulation& sim, const ExperimentPreset& preset,
                                     const std::optional<FlipResult>& flip) {
    const auto& ledger = sim.ledger;
    std::vector<Verdict> out{
        make_verdict("energy_max_step_increase", ledger.max_step_increase(), "<=", preset.monotone_tol),
        make_verdict("energy_balance_residual", ledger.balance_residual(), "<=", preset.balance_tol),
    };
    // The smallness bounds only concern the nonlinear problem.
    if (preset.semilinear()) {
        out.push_back(
            make_verdict("apriori_max", ledger.max_apriori(), "<=", preset.apriori_factor * sim.e0 * sim.e0));
        out.push_back(make_verdict("sup_norm_max", ledger.max_sup(), "<=", preset.delta_bar));
    }
    if (flip) {
        const double indicator = flip->grew ? 1.0 : 0.0;
        out.push_back(make_verdict("source_sign_energy_growth", indicator, ">=", 1.0));
    }
    return out;
}

void write_energy_csv(std::ostream& out, const EnergyLedger& ledger) {
    out << "t,energy,dissipation,balance,sup,sobolev_u,sobolev_ut,apriori\n";
    const auto& t = ledger.times();
    const double e_start = ledger.energy().empty() ? 0.0 : ledger.energy().front();
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double balance = ledger.energy()[k] - e_start + ledger.dissipation_integral()[k];
        out << format_number(t[k]) << ',' << format_number(ledger.energy()[k]) << ','
            << format_number(ledger.dissipation_integral()[k]) << ',' << format_number(balance) << ','
            << format_number(ledger.sup_norm()[k]) << ',' << format_number(ledger.sobolev_u()[k]) << ','
            << format_number(ledger.sobolev_v()[k]) << ',' << format_number(ledger.apriori()[k]) << '\n';
    }
}

}  // namespace dissipwave
