#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "hprbm/errors.hpp"
#include "hprbm/model.hpp"
#include "hprbm/simulate.hpp"
#include "hprbm/version.hpp"

namespace hprbm {

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

namespace detail {

inline double json_number(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) throw IoError(where + " is missing field '" + key + "'");
    const json& v = j.at(key);
    if (!v.is_number()) throw IoError(where + " field '" + key + "' must be a number");
    return v.get<double>();
}

inline void reject_unknown(const json& j, const std::string& where,
                           std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) throw IoError(where + " has unrecognized field '" + it.key() + "'");
    }
}

} // namespace detail

// Problem file layout:
//   {"sigma": [[s11,s12],[s12,s22]], "mu": [m1,m2], "r_plus": rp, "r_minus": rm}
inline ModelParams parse_model(const json& j) {
    const std::string where = "model file";
    if (!j.is_object()) throw IoError(where + " must be a JSON object");
    detail::reject_unknown(j, where, {"sigma", "mu", "r_plus", "r_minus"});
    if (!j.contains("sigma") || !j.contains("mu")) {
        throw IoError(where + " needs 'sigma' and 'mu'");
    }
    const json& s = j.at("sigma");
    if (!s.is_array() || s.size() != 2 || !s[0].is_array() || !s[1].is_array() ||
        s[0].size() != 2 || s[1].size() != 2) {
        throw IoError(where + " field 'sigma' must be a 2x2 array");
    }
    const json& mu = j.at("mu");
    if (!mu.is_array() || mu.size() != 2) {
        throw IoError(where + " field 'mu' must have two entries");
    }
    for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 2; ++k) {
            if (!s[i][k].is_number()) throw IoError(where + " field 'sigma' must be numeric");
        }
        if (!mu[i].is_number()) throw IoError(where + " field 'mu' must be numeric");
    }

    ModelParams p;
    p.s11 = s[0][0].get<double>();
    p.s12 = s[0][1].get<double>();
    p.s22 = s[1][1].get<double>();
    const double s21 = s[1][0].get<double>();
    const double scale = std::abs(p.s11) + std::abs(p.s22);
    if (std::abs(p.s12 - s21) > 1e-12 * scale) {
        throw IoError(where + " field 'sigma' must be symmetric");
    }
    p.mu1 = mu[0].get<double>();
    p.mu2 = mu[1].get<double>();
    p.r_plus = detail::json_number(j, where, "r_plus");
    p.r_minus = detail::json_number(j, where, "r_minus");
    return p;
}

inline ModelParams load_model(const std::string& path) {
    return parse_model(load_json_file(path));
}

struct SimInputs {
    SimConfig config;
    HistogramSpec histogram;
};

// Every field is optional and falls back to the built-in default.
inline SimInputs parse_sim_inputs(const json& j) {
    const std::string where = "simulation config";
    if (!j.is_object()) throw IoError(where + " must be a JSON object");
    detail::reject_unknown(j, where,
                           {"step", "n_steps", "burn_in", "seed", "strip", "histogram"});
    SimInputs out;
    if (j.contains("step")) out.config.step = detail::json_number(j, where, "step");
    if (j.contains("n_steps")) {
        out.config.n_steps = static_cast<std::uint64_t>(detail::json_number(j, where, "n_steps"));
    }
    if (j.contains("burn_in")) {
        out.config.burn_in = static_cast<std::uint64_t>(detail::json_number(j, where, "burn_in"));
    }
    if (j.contains("seed")) {
        out.config.seed = static_cast<std::uint64_t>(detail::json_number(j, where, "seed"));
    }
    if (j.contains("strip")) out.config.strip = detail::json_number(j, where, "strip");
    if (j.contains("histogram")) {
        const json& h = j.at("histogram");
        const std::string hw = where + " histogram";
        detail::reject_unknown(h, hw, {"u_lo", "u_hi", "v_hi", "nu", "nv", "boundary_bins"});
        HistogramSpec& spec = out.histogram;
        if (h.contains("u_lo")) spec.u_lo = detail::json_number(h, hw, "u_lo");
        if (h.contains("u_hi")) spec.u_hi = detail::json_number(h, hw, "u_hi");
        if (h.contains("v_hi")) spec.v_hi = detail::json_number(h, hw, "v_hi");
        if (h.contains("nu")) spec.nu = static_cast<int>(detail::json_number(h, hw, "nu"));
        if (h.contains("nv")) spec.nv = static_cast<int>(detail::json_number(h, hw, "nv"));
        if (h.contains("boundary_bins")) {
            spec.boundary_bins = static_cast<int>(detail::json_number(h, hw, "boundary_bins"));
        }
    }
    return out;
}

inline SimInputs load_sim_inputs(const std::string& path) {
    return parse_sim_inputs(load_json_file(path));
}

// %.17g round-trips doubles exactly, which the replay guarantee relies on
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

// Every command drops one of these next to its outputs.  The stored overrides
// are the fully resolved settings, so replaying the manifest needs no other
// flags to reproduce the run byte for byte (duration aside).
struct RunManifest {
    std::string command;
    std::string model_path;
    std::string out_dir;
    json overrides = json::object();
    std::string version = kVersion;
    double duration_seconds = 0.0;

    json to_json() const {
        json j;
        j["command"] = command;
        j["model"] = model_path;
        j["out_dir"] = out_dir;
        j["overrides"] = overrides;
        j["version"] = version;
        j["duration_seconds"] = duration_seconds;
        return j;
    }

    static RunManifest parse(const json& j) {
        const std::string where = "manifest";
        if (!j.is_object()) throw IoError(where + " must be a JSON object");
        RunManifest m;
        for (const char* key : {"command", "model", "out_dir", "version"}) {
            if (!j.contains(key) || !j.at(key).is_string()) {
                throw IoError(where + " is missing string field '" + std::string(key) + "'");
            }
        }
        m.command = j.at("command").get<std::string>();
        m.model_path = j.at("model").get<std::string>();
        m.out_dir = j.at("out_dir").get<std::string>();
        m.version = j.at("version").get<std::string>();
        m.overrides = j.value("overrides", json::object());
        m.duration_seconds = j.value("duration_seconds", 0.0);
        return m;
    }

    void save(const std::filesystem::path& dir) const {
        write_text_file(dir / "manifest.json", to_json().dump(2) + "\n");
    }
};

inline RunManifest load_manifest(const std::string& path) {
    return RunManifest::parse(load_json_file(path));
}

} // namespace hprbm
