// config.hpp — JSON configuration parsing and report/CSV serialization.
//
// System config schema (all frequencies/rates in units of the reference
// mechanical frequency; omega_m_hz is optional SI metadata):
//   { "omega_m_hz": 1e6, "omega": [...N], "G": [...N], "gamma": [...N],
//     "nbar": [...N], "chi": [...N-1], "theta": [...N-1],
//     "Delta": x, "kappa": x }
// chi/theta may be omitted (default: all zero). Unknown fields are rejected
// by name. Sweep specs wrap a system config under "base" together with
// "axes" and "outputs".

#pragma once

#include "omsim/entanglement.hpp"
#include "omsim/model.hpp"
#include "omsim/modes.hpp"
#include "omsim/solver.hpp"
#include "omsim/sweep.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace omsim {

// Raised for malformed input: unreadable files, bad JSON, schema violations,
// or parameter values that fail validation.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SystemConfig {
    NetworkParams params;
    std::optional<double> omega_m_hz;
};

namespace detail {

inline void reject_unknown_fields(const nlohmann::json& j,
                                  const std::vector<std::string>& allowed,
                                  const std::string& where) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const auto& a : allowed)
            if (item.key() == a) { known = true; break; }
        if (!known)
            throw ConfigError(where + ": unknown field '" + item.key() + "'");
    }
}

inline double number_field(const nlohmann::json& j, const std::string& key,
                           const std::string& where) {
    if (!j.contains(key))
        throw ConfigError(where + ": missing required field '" + key + "'");
    if (!j.at(key).is_number())
        throw ConfigError(where + ": field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline std::vector<double> array_field(const nlohmann::json& j, const std::string& key,
                                       std::size_t expect, const std::string& where) {
    if (!j.contains(key))
        throw ConfigError(where + ": missing required field '" + key + "'");
    const auto& a = j.at(key);
    if (!a.is_array())
        throw ConfigError(where + ": field '" + key + "' must be an array of numbers");
    std::vector<double> out;
    out.reserve(a.size());
    for (const auto& x : a) {
        if (!x.is_number())
            throw ConfigError(where + ": field '" + key + "' must be an array of numbers");
        out.push_back(x.get<double>());
    }
    if (expect != 0 && out.size() != expect)
        throw ConfigError(where + ": field '" + key + "' expects " + std::to_string(expect) +
                          " entries, got " + std::to_string(out.size()));
    return out;
}

}  // namespace detail

inline SystemConfig parse_system_config(const nlohmann::json& j,
                                        const std::string& where = "config") {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    detail::reject_unknown_fields(
        j, {"omega_m_hz", "omega", "G", "gamma", "nbar", "chi", "theta", "Delta", "kappa"},
        where);

    SystemConfig cfg;
    cfg.params.omega = detail::array_field(j, "omega", 0, where);
    const std::size_t N = cfg.params.omega.size();
    if (N < 2) throw ConfigError(where + ": field 'omega' needs at least 2 entries");
    cfg.params.G = detail::array_field(j, "G", N, where);
    cfg.params.gamma = detail::array_field(j, "gamma", N, where);
    cfg.params.nbar = detail::array_field(j, "nbar", N, where);
    cfg.params.chi = j.contains("chi") ? detail::array_field(j, "chi", N - 1, where)
                                       : std::vector<double>(N - 1, 0.0);
    cfg.params.Theta = j.contains("theta") ? detail::array_field(j, "theta", N - 1, where)
                                           : std::vector<double>(N - 1, 0.0);
    cfg.params.Delta = detail::number_field(j, "Delta", where);
    cfg.params.kappa = detail::number_field(j, "kappa", where);

    if (j.contains("omega_m_hz")) {
        if (!j.at("omega_m_hz").is_number())
            throw ConfigError(where + ": field 'omega_m_hz' must be a number");
        cfg.omega_m_hz = j.at("omega_m_hz").get<double>();
        if (!(*cfg.omega_m_hz > 0.0))
            throw ConfigError(where + ": field 'omega_m_hz' must be > 0");
    }

    try {
        cfg.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    cfg.params = cfg.params.canonical();
    return cfg;
}

inline SweepSpec parse_sweep_spec(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("sweep spec: expected a JSON object");
    detail::reject_unknown_fields(j, {"base", "axes", "outputs"}, "sweep spec");
    for (const char* key : {"base", "axes", "outputs"})
        if (!j.contains(key))
            throw ConfigError(std::string("sweep spec: missing required field '") + key + "'");

    SweepSpec spec;
    spec.base = parse_system_config(j.at("base"), "sweep spec: base").params;

    const auto& axes = j.at("axes");
    if (!axes.is_array() || axes.empty() || axes.size() > 2)
        throw ConfigError("sweep spec: field 'axes' must be an array of 1 or 2 objects");
    for (std::size_t k = 0; k < axes.size(); ++k) {
        const auto& a = axes[k];
        const std::string where = "sweep spec: axes[" + std::to_string(k) + "]";
        if (!a.is_object()) throw ConfigError(where + ": expected a JSON object");
        detail::reject_unknown_fields(a, {"param", "start", "stop", "count", "scale"}, where);
        SweepAxis ax;
        if (!a.contains("param") || !a.at("param").is_string())
            throw ConfigError(where + ": field 'param' must be a string");
        ax.param = a.at("param").get<std::string>();
        ax.start = detail::number_field(a, "start", where);
        ax.stop = detail::number_field(a, "stop", where);
        if (!a.contains("count") || !a.at("count").is_number_integer())
            throw ConfigError(where + ": field 'count' must be an integer");
        ax.count = a.at("count").get<int>();
        if (a.contains("scale")) {
            if (!a.at("scale").is_string())
                throw ConfigError(where + ": field 'scale' must be \"linear\" or \"log\"");
            const std::string s = a.at("scale").get<std::string>();
            if (s == "log") ax.log_scale = true;
            else if (s != "linear")
                throw ConfigError(where + ": field 'scale' must be \"linear\" or \"log\"");
        }
        spec.axes.push_back(std::move(ax));
    }

    const auto& outputs = j.at("outputs");
    if (!outputs.is_array() || outputs.empty())
        throw ConfigError("sweep spec: field 'outputs' must be a non-empty array of strings");
    for (const auto& o : outputs) {
        if (!o.is_string())
            throw ConfigError("sweep spec: field 'outputs' must be a non-empty array of strings");
        spec.outputs.push_back(o.get<std::string>());
    }

    // surface bad axis params / outputs at parse time
    try {
        for (const auto& ax : spec.axes) {
            NetworkParams probe = spec.base;
            set_param(probe, ax.param, ax.start);
            axis_values(ax);
        }
        detail::expand_outputs(spec.outputs, spec.base.modes());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("sweep spec: ") + e.what());
    }
    return spec;
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("failed to parse '" + path + "': " + e.what());
    }
}

// --- serialization -----------------------------------------------------------

// 12 significant digits, lowercase exponent; enough to round-trip the physics
// while keeping tables diff-friendly.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline nlohmann::json to_json(const StabilityReport& r) {
    nlohmann::json spectrum = nlohmann::json::array();
    for (const auto& ev : r.spectrum)
        spectrum.push_back({{"re", ev.real()}, {"im", ev.imag()}});
    return {{"stable", r.stable}, {"margin", r.margin}, {"spectrum", spectrum}};
}

inline nlohmann::json to_json(const EntanglementReport& r) {
    nlohmann::json out{{"E_N", r.E_N}, {"stability_margin", r.stability_margin}};
    if (r.contangle) {
        out["E_tau"] = r.contangle->E_tau;
        out["residuals"] = {{"d1", r.contangle->per_pivot[0]},
                            {"d2", r.contangle->per_pivot[1]},
                            {"c", r.contangle->per_pivot[2]}};
        out["monogamy_ok"] = r.contangle->monogamy_ok;
    }
    return out;
}

inline nlohmann::json to_json(const ModeDecomposition& dec, bool dark_present) {
    nlohmann::json couplings = nlohmann::json::array();
    nlohmann::json magnitudes = nlohmann::json::array();
    for (int k = 0; k < dec.effective_couplings.size(); ++k) {
        const auto g = dec.effective_couplings(k);
        couplings.push_back({{"re", g.real()}, {"im", g.imag()}});
        magnitudes.push_back(std::abs(g));
    }
    nlohmann::json out{{"effective_couplings", couplings},
                       {"coupling_magnitudes", magnitudes},
                       {"dark_mode_present", dark_present},
                       {"verdict", dark_present ? "DMU" : "DMB"},
                       {"degenerate_fallback", dec.degenerate_fallback}};
    if (dec.frequencies.size() > 0) {
        nlohmann::json freqs = nlohmann::json::array();
        for (int k = 0; k < dec.frequencies.size(); ++k) freqs.push_back(dec.frequencies(k));
        out["frequencies"] = freqs;
    }
    return out;
}

inline nlohmann::json to_json(const ThresholdResult& r, const std::string& param,
                              const std::string& target) {
    return {{"param", param},
            {"target", target},
            {"threshold", r.threshold},
            {"prescan", {{"params", r.prescan_params}, {"values", r.prescan_values}}}};
}

// CSV: header row, then one line per grid point; empty cells for outputs a
// point failed to produce. Byte-identical across reruns and thread counts.
inline void write_csv(const SweepResult& result, std::ostream& out) {
    for (std::size_t k = 0; k < result.columns.size(); ++k)
        out << (k ? "," : "") << result.columns[k];
    out << "\n";
    for (const auto& row : result.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out << ",";
            if (row[k]) out << format_double(*row[k]);
        }
        out << "\n";
    }
}

}  // namespace omsim
