#include "dissipwave/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "dissipwave/experiments.hpp"

namespace dissipwave {

namespace {

namespace fs = std::filesystem;

struct Invocation {
    std::string command;
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_root;
};

fs::path output_root(const Invocation& inv) {
    if (!inv.out_root.empty()) return inv.out_root;
    if (const char* env = std::getenv("DISSIPWAVE_OUT"); env && *env) return env;
    return "runs";
}

std::string utc_stamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
    return ss.str();
}

fs::path make_run_dir(const Invocation& inv, const ExperimentPreset& preset) {
    const fs::path base = output_root(inv) / preset.name;
    const std::string stamp = utc_stamp();
    fs::path dir = base / stamp;
    for (int k = 2; fs::exists(dir); ++k) dir = base / (stamp + "-" + std::to_string(k));
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    body(out);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

class RunDirectory {
public:
    RunDirectory(const Invocation& inv, const ExperimentPreset& preset)
        : inv_(inv), preset_(preset), dir_(make_run_dir(inv, preset)),
          start_(std::chrono::steady_clock::now()) {}

    const fs::path& path() const { return dir_; }

    /// Manifest: resolved keys (relaunchable) followed by comment lines.
    void finish(int status, const std::vector<std::string>& notes = {}) const {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_file(dir_ / "manifest.txt", [&](std::ostream& out) {
            out << "# dissipwave " << inv_.command << '\n';
            if (!inv_.config_path.empty()) out << "# config " << inv_.config_path << '\n';
            for (const auto& o : inv_.overrides) out << "# set " << o << '\n';
            out << to_config_text(preset_);
            out << "# wall_seconds " << format_number(wall) << '\n';
            for (const auto& n : notes) out << "# " << n << '\n';
            out << "# exit_status " << status << '\n';
        });
    }

private:
    const Invocation& inv_;
    const ExperimentPreset& preset_;
    fs::path dir_;
    std::chrono::steady_clock::time_point start_;
};

int verdict_status(const std::vector<Verdict>& verdicts) {
    return all_pass(verdicts) ? kPass : kVerdictFailed;
}

int finish_with_verdicts(const RunDirectory& run, const std::vector<Verdict>& verdicts, std::ostream& out) {
    write_file(run.path() / "verdicts.csv", [&](std::ostream& o) { write_verdicts_csv(o, verdicts); });
    write_verdicts_text(out, verdicts);
    const int status = verdict_status(verdicts);
    run.finish(status);
    out << "results: " << run.path().string() << '\n';
    return status;
}

int cmd_verify_symbols(const Invocation& inv, const ExperimentPreset& preset, std::ostream& out) {
    RunDirectory run(inv, preset);
    const SymbolSweep sweep = verify_symbols(preset);
    write_file(run.path() / "symbols.csv", [&](std::ostream& o) { write_symbols_csv(o, sweep); });
    return finish_with_verdicts(run, symbol_verdicts(sweep, preset), out);
}

int cmd_green_bands(const Invocation& inv, const ExperimentPreset& preset, std::ostream& out) {
    RunDirectory run(inv, preset);
    const BandSweep bands = green_bands(preset);
    write_file(run.path() / "bands.csv", [&](std::ostream& o) { write_time_series_csv(o, bands.series); });
    return finish_with_verdicts(run, band_verdicts(bands, preset), out);
}

std::optional<fs::path> snapshot_dir(const RunDirectory& run, const ExperimentPreset& preset) {
    if (!preset.write_snapshots) return std::nullopt;
    return run.path() / "snapshots";
}

Simulation simulate_in(const RunDirectory& run, const ExperimentPreset& preset) {
    try {
        return simulate(preset, snapshot_dir(run, preset));
    } catch (const InstabilityError& e) {
        run.finish(kUnstable, {"unstable at t = " + format_number(e.time())});
        throw;
    }
}

void write_simulation(const RunDirectory& run, const Simulation& sim) {
    write_file(run.path() / "timeseries.csv", [&](std::ostream& o) { write_time_series_csv(o, sim.series); });
    write_file(run.path() / "energy.csv", [&](std::ostream& o) { write_energy_csv(o, sim.ledger); });
}

int cmd_simulate(const Invocation& inv, const ExperimentPreset& preset, std::ostream& out) {
    RunDirectory run(inv, preset);
    const Simulation sim = simulate_in(run, preset);
    write_simulation(run, sim);
    run.finish(kPass, {"steps " + std::to_string(sim.run.steps)});
    out << "completed " << sim.run.steps << " steps to t = " << format_number(sim.run.final_state.time)
        << "\nresults: " << run.path().string() << '\n';
    return kPass;
}

int cmd_decay_report(const Invocation& inv, const ExperimentPreset& preset, std::ostream& out) {
    if (preset.reports.empty()) throw ConfigError("decay-report needs a non-empty 'reports' key");
    RunDirectory run(inv, preset);
    const Simulation sim = simulate_in(run, preset);
    write_simulation(run, sim);
    const auto reports = decay_reports(sim, preset);
    write_file(run.path() / "decay_report.csv", [&](std::ostream& o) { write_decay_csv(o, reports); });
    write_file(run.path() / "decay_report.txt", [&](std::ostream& o) { write_decay_text(o, reports); });
    write_decay_text(out, reports);
    return finish_with_verdicts(run, decay_verdicts(sim, preset, reports), out);
}

int cmd_energy_audit(const Invocation& inv, const ExperimentPreset& preset, std::ostream& out) {
    RunDirectory run(inv, preset);
    const Simulation sim = simulate_in(run, preset);
    write_simulation(run, sim);
    std::optional<FlipResult> flip;
    if (preset.flip_check) {
        flip = flip_check(preset);
        out << "source-sign rerun: " << (flip->unstable ? "unstable at t = " + format_number(flip->failure_time)
                                                        : std::string("completed"))
            << ", max E(t)/E(0) = " << format_number(flip->energy_growth) << '\n';
    }
    return finish_with_verdicts(run, energy_verdicts(sim, preset, flip), out);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pseudo-spectral experiments for the damped wave equation with absorption"};
    app.require_subcommand(1);

    Invocation inv;
    struct Command {
        const char* name;
        const char* help;
        bool config_required;
        int (*run)(const Invocation&, const ExperimentPreset&, std::ostream&);
    };
    const std::vector<Command> commands = {
        {"verify-symbols", "Compare the Green symbol against an ODE integrator", false, cmd_verify_symbols},
        {"green-bands", "Decay of the frequency-localized kernels", false, cmd_green_bands},
        {"simulate", "Run a preset and write time series and snapshots", true, cmd_simulate},
        {"decay-report", "Run a preset and fit decay rates", true, cmd_decay_report},
        {"energy-audit", "Run a preset and check the energy law", true, cmd_energy_audit},
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        auto* opt = sub->add_option("config", inv.config_path, "Preset file (key = value)");
        if (c.config_required) opt->required();
        sub->add_option("--set", inv.overrides, "Override a key, key=value")->take_all();
        sub->add_option("--out", inv.out_root, "Output root (default $DISSIPWAVE_OUT or ./runs)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kPass : kConfigError;
    }

    const Command* chosen = nullptr;
    for (const auto& c : commands)
        if (app.got_subcommand(c.name)) {
            chosen = &c;
            inv.command = c.name;
        }

    ExperimentPreset preset;
    try {
        std::optional<fs::path> path;
        if (!inv.config_path.empty()) path = inv.config_path;
        preset = load_preset(path, inv.overrides);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        return chosen->run(inv, preset, out);
    } catch (const InstabilityError& e) {
        err << "unstable: sup|u| = " << format_number(e.sup_norm()) << " at t = " << format_number(e.time())
            << '\n';
        return kUnstable;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace dissipwave
