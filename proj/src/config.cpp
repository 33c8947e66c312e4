#include "dissipwave/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "dissipwave/analysis.hpp"

namespace dissipwave {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("empty list element in '" + s + "'");
        out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(out))
        throw ConfigError(key + ": expected a finite number, got '" + v + "'");
    return out;
}

int to_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
    return out;
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += format_number(xs[i]);
    }
    return out;
}

std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += xs[i];
    }
    return out;
}

struct Key {
    const char* name;
    std::function<void(ExperimentPreset&, const std::string&)> set;
    std::function<std::string(const ExperimentPreset&)> get;
};

#define DW_DOUBLE(key, member)                                                          \
    Key {                                                                               \
        key, [](ExperimentPreset& p, const std::string& v) { p.member = to_double(key, v); }, \
            [](const ExperimentPreset& p) { return format_number(p.member); }           \
    }
#define DW_INT(key, member)                                                             \
    Key {                                                                               \
        key, [](ExperimentPreset& p, const std::string& v) { p.member = to_int(key, v); }, \
            [](const ExperimentPreset& p) { return std::to_string(p.member); }          \
    }
#define DW_BOOL(key, member)                                                            \
    Key {                                                                               \
        key, [](ExperimentPreset& p, const std::string& v) { p.member = to_bool(key, v); }, \
            [](const ExperimentPreset& p) { return std::string(p.member ? "true" : "false"); } \
    }
#define DW_DOUBLES(key, member)                                                         \
    Key {                                                                               \
        key, [](ExperimentPreset& p, const std::string& v) { p.member = to_doubles(key, v); }, \
            [](const ExperimentPreset& p) { return join(p.member); }                    \
    }
#define DW_STRING(key, member)                                                          \
    Key {                                                                               \
        key, [](ExperimentPreset& p, const std::string& v) { p.member = v; },           \
            [](const ExperimentPreset& p) { return p.member; }                          \
    }

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        DW_STRING("name", name),
        DW_INT("dim", dim),
        DW_INT("points", points),
        DW_DOUBLE("half_width", half_width),
        Key{"nonlinearity",
            [](ExperimentPreset& p, const std::string& v) {
                try {
                    p.nonlinearity = parse_nonlinearity(v);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(std::string("nonlinearity: ") + e.what());
                }
            },
            [](const ExperimentPreset& p) { return to_string(p.nonlinearity); }},
        DW_INT("theta", theta),
        DW_DOUBLE("dt", dt),
        DW_DOUBLE("t_final", t_final),
        Key{"integrator",
            [](ExperimentPreset& p, const std::string& v) {
                try {
                    p.integrator = parse_integrator(v);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(std::string("integrator: ") + e.what());
                }
            },
            [](const ExperimentPreset& p) { return to_string(p.integrator); }},
        Key{"dealias",
            [](ExperimentPreset& p, const std::string& v) {
                if (v == "auto")
                    p.dealias.reset();
                else
                    p.dealias = to_bool("dealias", v);
            },
            [](const ExperimentPreset& p) {
                return std::string(!p.dealias ? "auto" : (*p.dealias ? "true" : "false"));
            }},
        DW_DOUBLE("snapshot_interval", snapshot_interval),
        DW_DOUBLE("delta_bar", delta_bar),
        DW_DOUBLE("u0_amplitude", u0.amplitude),
        DW_DOUBLE("u0_width", u0.width),
        DW_DOUBLE("u1_amplitude", u1.amplitude),
        DW_DOUBLE("u1_width", u1.width),
        DW_STRING("u0_file", u0_file),
        DW_STRING("u1_file", u1_file),
        Key{"reports",
            [](ExperimentPreset& p, const std::string& v) {
                p.reports = split_list(v);
                for (const auto& r : p.reports) {
                    try {
                        (void)parse_quantity(r);
                    } catch (const std::invalid_argument& e) {
                        throw ConfigError(std::string("reports: ") + e.what());
                    }
                }
            },
            [](const ExperimentPreset& p) { return join(p.reports); }},
        DW_DOUBLES("fit_window", fit_window),
        DW_INT("sobolev_s", sobolev_s),
        DW_DOUBLE("weight_r", weight_r),
        DW_DOUBLES("profile_window", profile_window),
        DW_DOUBLE("profile_factor", profile_factor),
        DW_BOOL("heat_compare", heat_compare),
        DW_DOUBLE("heat_slope_max", heat_slope_max),
        DW_BOOL("write_snapshots", write_snapshots),
        DW_INT("seed", seed),
        DW_DOUBLE("cutoff_eps", cutoff_eps),
        DW_DOUBLE("cutoff_R", cutoff_R),
        DW_DOUBLES("band_times", band_times),
        DW_DOUBLES("band2_times", band2_times),
        DW_DOUBLE("band2_slope_max", band2_slope_max),
        DW_DOUBLE("band2_r2_min", band2_r2_min),
        DW_DOUBLE("balance_tol", balance_tol),
        DW_DOUBLE("monotone_tol", monotone_tol),
        DW_DOUBLE("apriori_factor", apriori_factor),
        DW_BOOL("flip_check", flip_check),
        DW_DOUBLE("flip_amplitude", flip_amplitude),
        DW_INT("symbol_samples", symbol_samples),
        DW_DOUBLE("symbol_xi_max", symbol_xi_max),
        DW_DOUBLE("symbol_t_max", symbol_t_max),
        DW_DOUBLE("symbol_tol", symbol_tol),
        DW_DOUBLE("ode_tol", ode_tol),
        DW_INT("random_samples", random_samples),
    };
    return table;
}

#undef DW_DOUBLE
#undef DW_INT
#undef DW_BOOL
#undef DW_DOUBLES
#undef DW_STRING

bool whole_steps(double t, double dt) {
    const double k = std::round(t / dt);
    return k >= 1 && std::abs(k * dt - t) <= 1e-9 * std::max(1.0, t);
}

}  // namespace

std::pair<double, double> ExperimentPreset::resolved_fit_window() const {
    if (fit_window.empty()) return {t_final / 5.0, t_final};
    return {fit_window.at(0), fit_window.at(1)};
}

std::pair<double, double> ExperimentPreset::resolved_profile_window() const {
    if (profile_window.empty()) return {std::min(10.0, t_final), t_final};
    return {profile_window.at(0), profile_window.at(1)};
}

SolverConfig ExperimentPreset::solver_config() const {
    SolverConfig c;
    c.theta = theta;
    c.dt = dt;
    c.t_final = t_final;
    c.integrator = integrator;
    c.nonlinearity = nonlinearity;
    c.dealias = resolved_dealias();
    c.delta_bar = delta_bar;
    if (snapshot_interval > 0.0) {
        const long count = std::lround(t_final / snapshot_interval);
        for (long k = 0; k <= count; ++k) c.snapshot_times.push_back(static_cast<double>(k) * snapshot_interval);
    } else {
        c.snapshot_times = {0.0, t_final};
    }
    return c;
}

KeyValues parse_key_values(const std::string& text) {
    KeyValues out;
    std::stringstream ss(text);
    std::string line;
    int number = 0;
    while (std::getline(ss, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
        if (!out.emplace(key, value).second)
            throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_key_values(buffer.str());
}

void apply_settings(ExperimentPreset& preset, const KeyValues& values) {
    const auto& table = keys();
    for (const auto& [key, value] : values) {
        const auto it = std::find_if(table.begin(), table.end(),
                                     [&](const Key& k) { return key == k.name; });
        if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
        it->set(preset, value);
    }
}

std::pair<std::string, std::string> parse_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + text + "' is not key=value");
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError("override '" + text + "' has an empty key");
    return {key, trim(text.substr(eq + 1))};
}

void validate(const ExperimentPreset& p) {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };

    if (p.name.empty() || p.name.find_first_of("/\\ ") != std::string::npos)
        fail("name must be non-empty without spaces or slashes");
    if (p.dim < 1 || p.dim > 3) fail("dim must be 1, 2 or 3");
    if (p.points < 16 || (p.points & (p.points - 1)) != 0) fail("points must be a power of two >= 16");
    if (!(p.half_width > 0.0)) fail("half_width must be positive");
    if (p.theta < 1) fail("theta must be >= 1");
    if (!(p.dt > 0.0)) fail("dt must be positive");
    if (!(p.t_final > p.dt)) fail("t_final must exceed dt");
    if (!whole_steps(p.t_final, p.dt)) fail("t_final must be a whole number of steps");
    if (p.snapshot_interval < 0.0) fail("snapshot_interval must be nonnegative");
    if (p.snapshot_interval > 0.0) {
        if (!whole_steps(p.snapshot_interval, p.dt))
            fail("snapshot_interval must be a whole number of steps");
        if (!whole_steps(p.t_final, p.snapshot_interval))
            fail("t_final must be a whole number of snapshot intervals");
    }
    if (!(p.delta_bar > 0.0 && p.delta_bar < 1.0)) fail("delta_bar must lie in (0, 1)");
    if (!(p.u0.width > 0.0) || !(p.u1.width > 0.0)) fail("data widths must be positive");

    // Waves travel at unit speed; keep fronts well away from the periodic images.
    if (p.t_final > p.half_width / 1.6) fail("t_final must not exceed half_width / 1.6");

    if (p.fit_window.size() != 0 && p.fit_window.size() != 2) fail("fit_window takes two values");
    if (p.profile_window.size() != 0 && p.profile_window.size() != 2)
        fail("profile_window takes two values");
    const auto [lo, hi] = p.resolved_fit_window();
    if (!(lo >= 0.0 && lo < hi && hi <= p.t_final)) fail("fit_window must satisfy 0 <= lo < hi <= t_final");
    if (p.weight_r != 0.0 && !(p.weight_r > std::max(p.dim / 2.0, 1.0)))
        fail("weight_r must exceed max(dim/2, 1)");
    if (p.sobolev_s > p.points / 4) fail("sobolev_s is too large for the grid");

    if (p.semilinear() && !p.reports.empty()) {
        const int needed = 2 + (p.dim == 1 ? 1 : 0);
        if (p.theta < needed)
            fail("decay reports on semilinear runs need theta >= " + std::to_string(needed));
    }

    try {
        validate(p.cutoff());
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    for (double t : p.band_times)
        if (!(t > 0.0)) fail("band_times must be positive");
    for (double t : p.band2_times)
        if (!(t > 0.0)) fail("band2_times must be positive");

    if (p.symbol_samples < 2) fail("symbol_samples must be >= 2");
    if (!(p.symbol_xi_max > 0.0 && p.symbol_t_max > 0.0)) fail("symbol ranges must be positive");
    if (!(p.ode_tol >= 1e-12)) fail("ode_tol must be >= 1e-12");
    if (p.random_samples < 0) fail("random_samples must be nonnegative");
    if (!(p.flip_amplitude > 0.0)) fail("flip_amplitude must be positive");
}

std::string to_config_text(const ExperimentPreset& preset) {
    std::string out;
    for (const auto& k : keys()) {
        out += k.name;
        out += " = ";
        out += k.get(preset);
        out += '\n';
    }
    return out;
}

ExperimentPreset load_preset(const std::optional<std::filesystem::path>& path,
                             const std::vector<std::string>& overrides) {
    ExperimentPreset preset;
    if (path) apply_settings(preset, read_key_values(*path));
    KeyValues extra;
    for (const auto& o : overrides) {
        auto [k, v] = parse_override(o);
        extra[k] = v;
    }
    apply_settings(preset, extra);
    validate(preset);
    return preset;
}

}  // namespace dissipwave
