#pragma once

/// @file experiments.hpp
/// @brief Drivers behind the command-line subcommands. Each returns structured
/// results plus a list of pass/fail verdicts; file output lives in cli.cpp.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dissipwave/analysis.hpp"
#include "dissipwave/config.hpp"

namespace dissipwave {

struct Verdict {
    std::string check;
    double value = 0.0;
    std::string relation;  // "<=", ">=", "<", ">"
    double threshold = 0.0;
    bool pass = false;
};

Verdict make_verdict(std::string check, double value, std::string relation, double threshold);
bool all_pass(const std::vector<Verdict>& verdicts);
void write_verdicts_csv(std::ostream& out, const std::vector<Verdict>& verdicts);
void write_verdicts_text(std::ostream& out, const std::vector<Verdict>& verdicts);

/// a exp(-|x|² / (2 w²)) sampled on the grid.
Field gaussian(const Grid& grid, const GaussianData& data);

Grid preset_grid(const ExperimentPreset& preset);

/// Initial displacement and velocity, from snapshot files when given.
std::pair<Field, Field> initial_data(const ExperimentPreset& preset);

// ---- symbols ----

struct SymbolSample {
    double xi_sq = 0.0;
    double t = 0.0;
    double green = 0.0;
    double green_ode = 0.0;
    double green_dt = 0.0;
    double green_dt_ode = 0.0;
    double deviation = 0.0;  // max of the two absolute differences
};

struct SymbolSweep {
    std::vector<SymbolSample> samples;  // tensor sweep, then seeded random draws
    double max_deviation = 0.0;
    double branch_jump = 0.0;  // max |G(1/4 + d) - G(1/4 - d)| (and of G_t) for tiny d
};

SymbolSweep verify_symbols(const ExperimentPreset& preset);
std::vector<Verdict> symbol_verdicts(const SymbolSweep& sweep, const ExperimentPreset& preset);
void write_symbols_csv(std::ostream& out, const SymbolSweep& sweep);

// ---- frequency bands ----

struct BandSweep {
    TimeSeries series;  // Linf(G1), Linf(dx G1), Linf(G2)
    SlopeFit low;
    SlopeFit low_dx;
    AffineFit middle;
};

BandSweep green_bands(const ExperimentPreset& preset);
std::vector<Verdict> band_verdicts(const BandSweep& bands, const ExperimentPreset& preset);

// ---- time stepping ----

struct Simulation {
    RunRecord run;
    TimeSeries series;  // sampled at snapshot times
    EnergyLedger ledger;  // every step
    double e0 = 0.0;
};

/// Runs the preset. Snapshot files are written to `snapshot_dir` when given.
/// Throws InstabilityError if the run blows up.
Simulation simulate(const ExperimentPreset& preset,
                    const std::optional<std::filesystem::path>& snapshot_dir = std::nullopt);

std::vector<DecayReport> decay_reports(const Simulation& sim, const ExperimentPreset& preset);

/// Decay rows plus the heat-comparison and weighted-profile checks where enabled.
std::vector<Verdict> decay_verdicts(const Simulation& sim, const ExperimentPreset& preset,
                                    const std::vector<DecayReport>& reports);

struct FlipResult {
    bool unstable = false;
    double failure_time = 0.0;
    double max_step_increase = 0.0;  // relative to E(0)
    double energy_growth = 0.0;      // max_t E(t) / E(0)
    bool grew = false;
};

/// Reruns the preset with the source sign at flip_amplitude.
FlipResult flip_check(const ExperimentPreset& preset);

std::vector<Verdict> energy_verdicts(const Simulation& sim, const ExperimentPreset& preset,
                                     const std::optional<FlipResult>& flip);

void write_energy_csv(std::ostream& out, const EnergyLedger& ledger);

}  // namespace dissipwave
