#pragma once

/// @file config.hpp
/// @brief Experiment presets and their flat `key = value` text form.
///
/// One assignment per line, `#` starts a comment, lists are comma separated.
/// Unknown keys are errors. Writing a preset and parsing the text back yields
/// the same preset, so manifests can be used to relaunch a run.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dissipwave/solver.hpp"
#include "dissipwave/symbols.hpp"

namespace dissipwave {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GaussianData {
    double amplitude = 0.0;
    double width = 1.0;
};

struct ExperimentPreset {
    std::string name = "custom";

    // grid
    int dim = 1;
    int points = 256;
    double half_width = 20.0;

    // equation and integrator
    Nonlinearity nonlinearity = Nonlinearity::absorbing;
    int theta = 3;
    double dt = 0.01;
    double t_final = 1.0;
    Integrator integrator = Integrator::exponential_duhamel;
    std::optional<bool> dealias;  // unset: on for theta >= 2
    double snapshot_interval = 1.0;
    double delta_bar = 0.5;

    // initial data: Gaussians a exp(-|x|^2 / (2 w^2)) unless a snapshot file is given
    GaussianData u0{1.0, 1.0};
    GaussianData u1{0.0, 1.0};
    std::string u0_file;
    std::string u1_file;

    // measurements
    std::vector<std::string> reports;  // "p:alpha:h"
    std::vector<double> fit_window;    // empty: [t_final/5, t_final]
    int sobolev_s = -1;                // negative: n + 1
    double weight_r = 0.0;             // 0 disables the weighted profile
    std::vector<double> profile_window;  // empty: [10, t_final]
    double profile_factor = 3.0;
    bool heat_compare = false;
    double heat_slope_max = -0.6;
    bool write_snapshots = false;
    int seed = 1;

    // frequency bands
    double cutoff_eps = CutoffSpec{}.eps;
    double cutoff_R = CutoffSpec{}.R;
    std::vector<double> band_times{10, 20, 40, 80};
    std::vector<double> band2_times{5, 10, 15, 20, 25, 30, 35, 40};
    double band2_slope_max = -0.05;
    double band2_r2_min = 0.99;

    // energy audit
    double balance_tol = 1e-6;
    double monotone_tol = 1e-8;
    double apriori_factor = 10.0;
    bool flip_check = false;
    double flip_amplitude = 0.5;

    // symbol verification
    int symbol_samples = 32;
    double symbol_xi_max = 4.0;
    double symbol_t_max = 10.0;
    double symbol_tol = 1e-8;
    double ode_tol = 1e-12;
    int random_samples = 64;

    int resolved_sobolev_s() const { return sobolev_s >= 0 ? sobolev_s : dim + 1; }
    bool resolved_dealias() const { return dealias.value_or(default_dealias(theta)); }
    std::pair<double, double> resolved_fit_window() const;
    std::pair<double, double> resolved_profile_window() const;
    CutoffSpec cutoff() const { return CutoffSpec{cutoff_eps, cutoff_R}; }
    bool semilinear() const { return nonlinearity != Nonlinearity::none; }

    SolverConfig solver_config() const;
};

using KeyValues = std::map<std::string, std::string>;

/// Parses `key = value` lines; duplicate keys and malformed lines throw ConfigError.
KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::filesystem::path& path);

/// Applies assignments to a preset; unknown keys or bad values throw ConfigError.
void apply_settings(ExperimentPreset& preset, const KeyValues& values);

/// Parses a single "key=value" override.
std::pair<std::string, std::string> parse_override(const std::string& text);

/// Checks every precondition the modules impose (grid sizes, cutoff ordering,
/// step alignment, decay-theorem hypotheses, domain size); throws ConfigError.
void validate(const ExperimentPreset& preset);

/// Fully resolved `key = value` text of every field, in a fixed order.
std::string to_config_text(const ExperimentPreset& preset);

/// Loads a config file (if any) then applies overrides, then validates.
ExperimentPreset load_preset(const std::optional<std::filesystem::path>& path,
                             const std::vector<std::string>& overrides);

}  // namespace dissipwave
