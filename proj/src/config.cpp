#include "drto/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace drto {

std::string to_string(Formulation f) {
    switch (f) {
        case Formulation::Deterministic: return "deterministic";
        case Formulation::Mean: return "mean";
        case Formulation::Wasserstein: return "wasserstein";
        case Formulation::Moment: return "moment";
        case Formulation::Cvar: return "cvar";
        case Formulation::CvarDro: return "cvar_dro";
    }
    return "deterministic";
}

Formulation formulation_from_string(const std::string& s, int line) {
    if (s == "deterministic") return Formulation::Deterministic;
    if (s == "mean") return Formulation::Mean;
    if (s == "wasserstein") return Formulation::Wasserstein;
    if (s == "moment") return Formulation::Moment;
    if (s == "cvar") return Formulation::Cvar;
    if (s == "cvar_dro") return Formulation::CvarDro;
    throw std::invalid_argument("config line " + std::to_string(line) +
                                ": unknown formulation '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Setter {
    std::string section;
    std::function<void(RunConfig&, const std::string&, int)> apply;
};

double parse_double(const std::string& v, const std::string& key, int line) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (...) {
        throw std::invalid_argument("config line " + std::to_string(line) + ": value '" + v +
                                    "' for key '" + key + "' is not a number");
    }
}

int parse_int(const std::string& v, const std::string& key, int line) {
    try {
        size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (...) {
        throw std::invalid_argument("config line " + std::to_string(line) + ": value '" + v +
                                    "' for key '" + key + "' is not an integer");
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key, int line) {
    try {
        size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return static_cast<std::uint64_t>(x);
    } catch (...) {
        throw std::invalid_argument("config line " + std::to_string(line) + ": value '" + v +
                                    "' for key '" + key + "' is not an unsigned integer");
    }
}

bool parse_bool(const std::string& v, const std::string& key, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config line " + std::to_string(line) + ": value '" + v +
                                "' for key '" + key + "' is not a boolean");
}

#define DRTO_DOUBLE_KEY(sec, name, field)                                                  \
    {                                                                                      \
        name, {                                                                            \
            sec, [](RunConfig& c, const std::string& v, int ln) {                          \
                c.field = parse_double(v, name, ln);                                       \
            }                                                                              \
        }                                                                                  \
    }
#define DRTO_INT_KEY(sec, name, field)                                                     \
    {                                                                                      \
        name, {                                                                            \
            sec, [](RunConfig& c, const std::string& v, int ln) {                          \
                c.field = parse_int(v, name, ln);                                          \
            }                                                                              \
        }                                                                                  \
    }
#define DRTO_BOOL_KEY(sec, name, field)                                                    \
    {                                                                                      \
        name, {                                                                            \
            sec, [](RunConfig& c, const std::string& v, int ln) {                          \
                c.field = parse_bool(v, name, ln);                                         \
            }                                                                              \
        }                                                                                  \
    }

const std::map<std::string, Setter>& key_table() {
    static const std::map<std::string, Setter> table = {
        {"preset",
         {"problem",
          [](RunConfig& c, const std::string& v, int) { c.preset = v; }}},
        {"formulation",
         {"problem",
          [](RunConfig& c, const std::string& v, int ln) {
              c.formulation = formulation_from_string(v, ln);
          }}},
        DRTO_INT_KEY("problem", "nx", nx),
        DRTO_INT_KEY("problem", "ny", ny),
        DRTO_DOUBLE_KEY("problem", "volume_target", volume_target),
        DRTO_BOOL_KEY("problem", "volume_constraint", volume_constraint),
        DRTO_DOUBLE_KEY("problem", "young_modulus", young_modulus),
        DRTO_DOUBLE_KEY("problem", "poisson_ratio", poisson_ratio),
        DRTO_DOUBLE_KEY("problem", "eta", eta),
        DRTO_DOUBLE_KEY("problem", "simp_p", simp_p),
        DRTO_DOUBLE_KEY("problem", "filter_radius_factor", filter_radius_factor),
        DRTO_DOUBLE_KEY("problem", "patch_fraction", patch_fraction),
        DRTO_DOUBLE_KEY("uncertainty", "xi_radius", xi_radius),
        DRTO_DOUBLE_KEY("uncertainty", "sigma2", sigma2),
        DRTO_DOUBLE_KEY("uncertainty", "law_sigma2", law_sigma2),
        DRTO_INT_KEY("uncertainty", "n_inner", n_inner),
        DRTO_INT_KEY("uncertainty", "n_samples", n_samples),
        DRTO_DOUBLE_KEY("ambiguity", "m", m),
        DRTO_DOUBLE_KEY("ambiguity", "eps", eps),
        DRTO_DOUBLE_KEY("ambiguity", "lambda_min", lambda_min),
        DRTO_DOUBLE_KEY("ambiguity", "m1", m1),
        DRTO_DOUBLE_KEY("ambiguity", "m2", m2),
        DRTO_DOUBLE_KEY("ambiguity", "beta", beta),
        DRTO_DOUBLE_KEY("ambiguity", "c_threshold", c_threshold),
        DRTO_DOUBLE_KEY("ambiguity", "gamma", gamma),
        DRTO_INT_KEY("kl", "modes", kl_modes),
        DRTO_DOUBLE_KEY("kl", "amplitude", kl_amplitude),
        DRTO_DOUBLE_KEY("kl", "correlation_length", kl_correlation_length),
        DRTO_INT_KEY("optimizer", "iterations", iterations),
        DRTO_DOUBLE_KEY("optimizer", "step_h", step_h),
        DRTO_DOUBLE_KEY("optimizer", "step_lambda", step_lambda),
        DRTO_DOUBLE_KEY("optimizer", "step_tau", step_tau),
        DRTO_DOUBLE_KEY("optimizer", "step_s", step_s),
        DRTO_DOUBLE_KEY("optimizer", "step_alpha", step_alpha),
        DRTO_DOUBLE_KEY("optimizer", "decay_t0", decay_t0),
        DRTO_DOUBLE_KEY("optimizer", "restore", restore),
        DRTO_DOUBLE_KEY("optimizer", "active_tol", active_tol),
        DRTO_DOUBLE_KEY("optimizer", "penalty_volume", penalty_volume),
        DRTO_DOUBLE_KEY("optimizer", "penalty_compliance", penalty_compliance),
        {"dir",
         {"output",
          [](RunConfig& c, const std::string& v, int) { c.output_dir = v; }}},
        {"seed",
         {"output",
          [](RunConfig& c, const std::string& v, int ln) { c.seed = parse_u64(v, "seed", ln); }}},
        DRTO_BOOL_KEY("output", "write_vtk", write_vtk),
    };
    return table;
}

#undef DRTO_DOUBLE_KEY
#undef DRTO_INT_KEY
#undef DRTO_BOOL_KEY

void require(bool present, const std::string& key, const std::string& formulation) {
    if (!present)
        throw std::invalid_argument("config: formulation '" + formulation +
                                    "' requires the key '" + key + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, bool> seen;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": malformed section header '" + t + "'");
            section = t.substr(1, t.size() - 2);
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value', got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const auto it = key_table().find(key);
        if (it == key_table().end())
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "'");
        if (!section.empty() && section != it->second.section)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": key '" +
                                        key + "' belongs to section [" + it->second.section +
                                        "], found in [" + section + "]");
        it->second.apply(cfg, value, line_no);
        seen[key] = true;
    }

    const std::string f = to_string(cfg.formulation);
    if (cfg.formulation == Formulation::Wasserstein || cfg.formulation == Formulation::CvarDro)
        require(seen.count("m") > 0, "m", f);
    if (cfg.formulation == Formulation::Moment) {
        require(seen.count("m1") > 0, "m1", f);
        require(seen.count("m2") > 0, "m2", f);
    }
    if (cfg.formulation == Formulation::Cvar || cfg.formulation == Formulation::CvarDro) {
        require(seen.count("beta") > 0, "beta", f);
        require(seen.count("c_threshold") > 0, "c_threshold", f);
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[problem]\n";
    out << "preset = " << cfg.preset << "\n";
    out << "formulation = " << to_string(cfg.formulation) << "\n";
    out << "nx = " << cfg.nx << "\n";
    out << "ny = " << cfg.ny << "\n";
    out << "volume_target = " << fmt(cfg.volume_target) << "\n";
    out << "volume_constraint = " << (cfg.volume_constraint ? "true" : "false") << "\n";
    out << "young_modulus = " << fmt(cfg.young_modulus) << "\n";
    out << "poisson_ratio = " << fmt(cfg.poisson_ratio) << "\n";
    out << "eta = " << fmt(cfg.eta) << "\n";
    out << "simp_p = " << fmt(cfg.simp_p) << "\n";
    out << "filter_radius_factor = " << fmt(cfg.filter_radius_factor) << "\n";
    out << "patch_fraction = " << fmt(cfg.patch_fraction) << "\n";
    out << "\n[uncertainty]\n";
    out << "xi_radius = " << fmt(cfg.xi_radius) << "\n";
    out << "sigma2 = " << fmt(cfg.sigma2) << "\n";
    out << "law_sigma2 = " << fmt(cfg.law_sigma2) << "\n";
    out << "n_inner = " << cfg.n_inner << "\n";
    out << "n_samples = " << cfg.n_samples << "\n";
    out << "\n[ambiguity]\n";
    out << "m = " << fmt(cfg.m) << "\n";
    out << "eps = " << fmt(cfg.eps) << "\n";
    out << "lambda_min = " << fmt(cfg.lambda_min) << "\n";
    out << "m1 = " << fmt(cfg.m1) << "\n";
    out << "m2 = " << fmt(cfg.m2) << "\n";
    out << "beta = " << fmt(cfg.beta) << "\n";
    out << "c_threshold = " << fmt(cfg.c_threshold) << "\n";
    out << "gamma = " << fmt(cfg.gamma) << "\n";
    out << "\n[kl]\n";
    out << "modes = " << cfg.kl_modes << "\n";
    out << "amplitude = " << fmt(cfg.kl_amplitude) << "\n";
    out << "correlation_length = " << fmt(cfg.kl_correlation_length) << "\n";
    out << "\n[optimizer]\n";
    out << "iterations = " << cfg.iterations << "\n";
    out << "step_h = " << fmt(cfg.step_h) << "\n";
    out << "step_lambda = " << fmt(cfg.step_lambda) << "\n";
    out << "step_tau = " << fmt(cfg.step_tau) << "\n";
    out << "step_s = " << fmt(cfg.step_s) << "\n";
    out << "step_alpha = " << fmt(cfg.step_alpha) << "\n";
    out << "decay_t0 = " << fmt(cfg.decay_t0) << "\n";
    out << "restore = " << fmt(cfg.restore) << "\n";
    out << "active_tol = " << fmt(cfg.active_tol) << "\n";
    out << "penalty_volume = " << fmt(cfg.penalty_volume) << "\n";
    out << "penalty_compliance = " << fmt(cfg.penalty_compliance) << "\n";
    out << "\n[output]\n";
    out << "dir = " << cfg.output_dir << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "write_vtk = " << (cfg.write_vtk ? "true" : "false") << "\n";
    return out.str();
}

}  // namespace drto
