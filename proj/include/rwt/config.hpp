// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: a small TOML-style document (sections, scalar
// and array values) or the equivalent JSON object.  Both parse into one
// nlohmann::json tree; validation reports every problem at once and
// resolution fills in defaults so a run can be replayed byte-for-byte from
// its echoed config.

#ifndef RWT_CONFIG_HPP
#define RWT_CONFIG_HPP

#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwt/common.hpp"
#include "rwt/regvar.hpp"
#include "rwt/tail_measure.hpp"
#include "rwt/weights.hpp"

namespace rwt {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// TOML-subset parsing

namespace detail {

inline std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline json parse_toml_scalar(const std::string& tok, int line_no) {
    if (tok.empty()) throw config_error("line " + std::to_string(line_no) +
                                        ": empty value");
    if (tok.front() == '"') {
        if (tok.size() < 2 || tok.back() != '"')
            throw config_error("line " + std::to_string(line_no) +
                               ": unterminated string");
        return tok.substr(1, tok.size() - 2);
    }
    if (tok == "true") return true;
    if (tok == "false") return false;
    try {
        std::size_t used = 0;
        if (tok.find_first_of(".eE") == std::string::npos &&
            tok.find("inf") == std::string::npos) {
            const long long v = std::stoll(tok, &used);
            if (used == tok.size()) return v;
        }
        const double d = std::stod(tok, &used);
        if (used == tok.size()) return d;
    } catch (const std::exception&) {
    }
    throw config_error("line " + std::to_string(line_no) +
                       ": cannot parse value '" + tok + "'");
}

inline json parse_toml_value(const std::string& raw, int line_no) {
    const std::string v = trim(raw);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']')
            throw config_error("line " + std::to_string(line_no) +
                               ": unterminated array");
        json arr = json::array();
        std::string inner = v.substr(1, v.size() - 2);
        std::string tok;
        bool in_str = false;
        for (char c : inner) {
            if (c == '"') in_str = !in_str;
            if (c == ',' && !in_str) {
                if (!trim(tok).empty()) arr.push_back(parse_toml_scalar(trim(tok), line_no));
                tok.clear();
            } else {
                tok += c;
            }
        }
        if (!trim(tok).empty()) arr.push_back(parse_toml_scalar(trim(tok), line_no));
        return arr;
    }
    return parse_toml_scalar(v, line_no);
}

} // namespace detail

/// Parse a config document.  A leading '{' selects JSON; anything else is
/// treated as the TOML subset (comments, [sections], key = value).
inline json parse_config_text(const std::string& text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') return json::parse(text);
        break;
    }
    json root = json::object();
    json* current = &root;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = detail::trim(detail::strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw config_error("line " + std::to_string(line_no) +
                                   ": unterminated section header");
            const std::string name = detail::trim(s.substr(1, s.size() - 2));
            if (name.empty())
                throw config_error("line " + std::to_string(line_no) +
                                   ": empty section name");
            root[name] = root.contains(name) ? root[name] : json::object();
            current = &root[name];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(line_no) +
                               ": expected key = value");
        const std::string key = detail::trim(s.substr(0, eq));
        if (key.empty())
            throw config_error("line " + std::to_string(line_no) + ": empty key");
        (*current)[key] = detail::parse_toml_value(s.substr(eq + 1), line_no);
    }
    return root;
}

inline json parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

// ---------------------------------------------------------------------------
// schema

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "breiman",    "finite-sum",       "series",          "converse",
        "mellin",     "check-conditions", "scaling-identity"};
    return names;
}

/// Fully resolved configuration: every default filled in, ready to echo.
struct ResolvedConfig {
    std::string experiment;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::vector<double> probs;
    double ci = 0.99;
    std::string out_dir;
    json doc; // resolved echo

    std::optional<RegVarLaw> x_law;
    std::optional<WeightSequence> weights;
    std::size_t n_terms = 1;
    bool comonotone_x = false;

    // measure / rho blocks
    double measure_alpha = 1.0, measure_beta0 = M_PI, measure_a = 0.0,
           measure_b = 0.0;
    bool measure_oscillating = false;
    double b_threshold = 0.0;
    std::vector<MeasureAtom> rho_atoms;

    // mellin block
    double mellin_alpha = 1.0, mellin_lo = 0.1, mellin_hi = 6.0,
           mellin_tol = 1e-9;
    std::vector<double> mellin_expected;

    // conditions block
    double cond_alpha = 1.0, cond_eps = 0.25;
    std::size_t cond_t_max = 1000;

    // series block
    double epsilon_trunc = 1e-4;
    std::optional<double> p_force;

    // scaling block
    double grid_lo = 1.0, grid_hi = 1e6;
    std::size_t grid_points = 50;
    double residual_tol = 1e-8, min_amplitude = 0.2;
    // hill acceptance band, relative to alpha
    double hill_band = 0.2;
};

namespace detail {

struct Getter {
    const json& doc;
    std::vector<std::string>& errors;

    const json* section(const std::string& name, bool required) const {
        if (!doc.contains(name)) {
            if (required)
                errors.push_back("missing [" + name + "] section");
            return nullptr;
        }
        return &doc.at(name);
    }

    template <typename T>
    T value(const json* sec, const std::string& sec_name, const std::string& key,
            std::optional<T> fallback, bool required) const {
        if (sec && sec->contains(key)) {
            try {
                return sec->at(key).get<T>();
            } catch (const std::exception&) {
                errors.push_back(sec_name + "." + key + ": wrong type");
                return fallback ? *fallback : T{};
            }
        }
        if (required) errors.push_back("missing " + sec_name + "." + key);
        return fallback ? *fallback : T{};
    }
};

} // namespace detail

/// Validate and resolve a parsed config.  On failure the error list carries
/// every problem found; on success the returned config echoes all defaults.
inline ResolvedConfig validate_config(const json& doc,
                                      std::vector<std::string>& errors) {
    ResolvedConfig rc;
    detail::Getter get{doc, errors};

    const json* exp = get.section("experiment", true);
    rc.experiment =
        get.value<std::string>(exp, "experiment", "name", std::nullopt, true);
    if (!rc.experiment.empty()) {
        bool known = false;
        for (const auto& n : experiment_names()) known |= (n == rc.experiment);
        if (!known) errors.push_back("unknown experiment name '" + rc.experiment + "'");
    }
    if (exp && exp->contains("seed")) {
        rc.seed = get.value<std::uint64_t>(exp, "experiment", "seed", std::nullopt,
                                           true);
    } else {
        errors.push_back(
            "missing experiment.seed (no wall-clock default by policy)");
    }
    rc.n = get.value<std::uint64_t>(exp, "experiment", "n",
                                    std::optional<std::uint64_t>(100000), false);
    if (rc.n < 1) errors.push_back("experiment.n must be >= 1");
    rc.probs = get.value<std::vector<double>>(
        exp, "experiment", "probs",
        std::optional<std::vector<double>>({1e-2, 1e-3}), false);
    for (double p : rc.probs)
        if (!(p > 0.0 && p < 1.0))
            errors.push_back("experiment.probs entries must lie in (0,1)");
    rc.ci = get.value<double>(exp, "experiment", "ci", std::optional<double>(0.99),
                              false);
    if (!(rc.ci > 0.0 && rc.ci < 1.0))
        errors.push_back("experiment.ci must lie in (0,1)");
    rc.out_dir = get.value<std::string>(exp, "experiment", "out_dir",
                                        std::optional<std::string>(""), false);
    rc.hill_band = get.value<double>(exp, "experiment", "hill_band",
                                     std::optional<double>(0.2), false);

    const bool wants_x_law = rc.experiment == "breiman" ||
                             rc.experiment == "finite-sum" ||
                             rc.experiment == "series" ||
                             rc.experiment == "check-conditions";
    if (wants_x_law) {
        const json* lx = get.section("x_law", true);
        const std::string family = get.value<std::string>(
            lx, "x_law", "family", std::optional<std::string>("pareto"), false);
        const double alpha =
            get.value<double>(lx, "x_law", "alpha", std::nullopt, true);
        if (!(alpha > 0.0)) {
            errors.push_back("x_law.alpha must be positive");
        } else if (family == "pareto") {
            const double x_min = get.value<double>(lx, "x_law", "x_min",
                                                   std::optional<double>(1.0), false);
            if (!(x_min > 0.0))
                errors.push_back("x_law.x_min must be positive");
            else
                rc.x_law = RegVarLaw::pareto(alpha, x_min);
        } else if (family == "log_pareto") {
            const double gamma = get.value<double>(lx, "x_law", "gamma",
                                                   std::optional<double>(1.0), false);
            rc.x_law = RegVarLaw::log_pareto(alpha, gamma);
        } else if (family == "weibull_sv") {
            const double shape = get.value<double>(lx, "x_law", "shape",
                                                   std::optional<double>(0.5), false);
            const double scale = get.value<double>(lx, "x_law", "scale",
                                                   std::optional<double>(1.0), false);
            if (!(shape > 0.0 && shape < 1.0))
                errors.push_back("x_law.shape must lie in (0,1)");
            else
                rc.x_law = RegVarLaw::weibull_sv(alpha, shape, scale);
        } else {
            errors.push_back("unknown x_law.family '" + family + "'");
        }
    }

    const bool wants_weights = wants_x_law;
    if (wants_weights) {
        const json* w = get.section("weights", true);
        const std::string kind = get.value<std::string>(
            w, "weights", "kind", std::optional<std::string>("iid_atoms"), false);
        rc.n_terms = get.value<std::uint64_t>(w, "weights", "count",
                                              std::optional<std::uint64_t>(1), false);
        rc.comonotone_x = get.value<bool>(w, "weights", "comonotone_x",
                                          std::optional<bool>(false), false);
        const double alpha_hint = rc.x_law ? rc.x_law->alpha() : 1.0;
        if (kind == "iid_atoms") {
            const auto values = get.value<std::vector<double>>(
                w, "weights", "values", std::nullopt, true);
            const auto probs = get.value<std::vector<double>>(
                w, "weights", "probs", std::nullopt, true);
            if (values.size() != probs.size() || values.empty()) {
                errors.push_back("weights.values and weights.probs must match");
            } else {
                std::vector<WeightLaw::Atom> atoms;
                double mass = 0.0;
                for (std::size_t i = 0; i < values.size(); ++i) {
                    atoms.push_back({values[i], probs[i]});
                    mass += probs[i];
                }
                if (std::fabs(mass - 1.0) > 1e-12) {
                    errors.push_back("weights.probs must sum to 1");
                } else if (rc.n_terms < 1) {
                    errors.push_back("weights.count must be >= 1");
                } else {
                    rc.weights = WeightSequence::iid(WeightLaw::atoms(atoms),
                                                     rc.n_terms, alpha_hint);
                }
            }
        } else if (kind == "degenerate_geometric") {
            const double c = get.value<double>(w, "weights", "c",
                                               std::optional<double>(1.0), false);
            const double r = get.value<double>(w, "weights", "r",
                                               std::optional<double>(0.5), false);
            if (!(c > 0.0) || !(r > 0.0 && r < 1.0))
                errors.push_back("weights: need c > 0 and r in (0,1)");
            else
                rc.weights = WeightSequence::geometric(c, r, alpha_hint);
        } else if (kind == "pathological") {
            const double a = get.value<double>(w, "weights", "alpha",
                                               std::optional<double>(alpha_hint),
                                               false);
            if (!(a > 0.0 && a < 1.0))
                errors.push_back("weights.alpha must lie in (0,1) for the "
                                 "pathological rule");
            else
                rc.weights = WeightSequence::pathological(a);
        } else {
            errors.push_back("unknown weights.kind '" + kind + "'");
        }
    }

    if (rc.experiment == "scaling-identity" || rc.experiment == "converse") {
        const json* m = get.section("measure", true);
        const std::string type = get.value<std::string>(
            m, "measure", "type", std::optional<std::string>("oscillating"),
            false);
        rc.measure_alpha =
            get.value<double>(m, "measure", "alpha", std::optional<double>(1.0),
                              false);
        if (!(rc.measure_alpha > 0.0))
            errors.push_back("measure.alpha must be positive");
        if (type == "oscillating") {
            rc.measure_oscillating = true;
            rc.measure_beta0 = get.value<double>(m, "measure", "beta0",
                                                 std::optional<double>(M_PI), false);
            rc.measure_a =
                get.value<double>(m, "measure", "a", std::optional<double>(0.5),
                                  false);
            rc.measure_b =
                get.value<double>(m, "measure", "b", std::optional<double>(0.0),
                                  false);
            const double r2 = rc.measure_a * rc.measure_a + rc.measure_b * rc.measure_b;
            if ((rc.measure_a != 0.0 || rc.measure_b != 0.0) &&
                !(r2 > 0.0 && r2 <= 1.0))
                errors.push_back("measure: a^2 + b^2 must lie in (0, 1]");
            if (rc.measure_beta0 == 0.0 && r2 > 0.0)
                errors.push_back("measure.beta0 must be nonzero");
        } else if (type == "nu_alpha") {
            rc.measure_oscillating = false;
        } else {
            errors.push_back("unknown measure.type '" + type + "'");
        }
        rc.b_threshold = get.value<double>(
            m, "measure", "b_threshold",
            std::optional<double>(std::pow(2.0, 1.0 / std::max(rc.measure_alpha,
                                                               1e-12))),
            false);

        const json* r = get.section("rho", rc.experiment != "scaling-identity");
        std::string preset =
            get.value<std::string>(r, "rho", "preset",
                                   std::optional<std::string>(""), false);
        if (!r && rc.experiment == "scaling-identity") preset = "mellin_zero";
        if (preset == "mellin_zero") {
            const double e = std::exp(1.0);
            rc.rho_atoms = {{1.0, e / (1.0 + e)}, {e, 1.0 / (1.0 + e)}};
        } else if (r) {
            const auto locs = get.value<std::vector<double>>(r, "rho", "locations",
                                                             std::nullopt, true);
            const auto masses = get.value<std::vector<double>>(r, "rho", "masses",
                                                               std::nullopt, true);
            if (locs.size() != masses.size() || locs.empty()) {
                errors.push_back("rho.locations and rho.masses must match");
            } else {
                for (std::size_t i = 0; i < locs.size(); ++i) {
                    if (!(locs[i] > 0.0) || !(masses[i] > 0.0))
                        errors.push_back("rho atoms need positive location and mass");
                    rc.rho_atoms.push_back({locs[i], masses[i]});
                }
            }
        }
    }

    if (rc.experiment == "mellin") {
        const json* m = get.section("mellin", true);
        rc.mellin_alpha =
            get.value<double>(m, "mellin", "alpha", std::optional<double>(1.0),
                              false);
        rc.mellin_lo = get.value<double>(m, "mellin", "beta_lo",
                                         std::optional<double>(0.1), false);
        rc.mellin_hi = get.value<double>(m, "mellin", "beta_hi",
                                         std::optional<double>(6.0), false);
        rc.mellin_tol = get.value<double>(m, "mellin", "tol",
                                          std::optional<double>(1e-9), false);
        rc.mellin_expected = get.value<std::vector<double>>(
            m, "mellin", "expected", std::optional<std::vector<double>>({}),
            false);
        if (!(rc.mellin_hi > rc.mellin_lo))
            errors.push_back("mellin.beta_hi must exceed mellin.beta_lo");
        if (!(rc.mellin_tol > 0.0)) errors.push_back("mellin.tol must be positive");
        const json* r = get.section("rho", true);
        std::string preset = get.value<std::string>(
            r, "rho", "preset", std::optional<std::string>(""), false);
        if (preset == "mellin_zero") {
            const double e = std::exp(1.0);
            rc.rho_atoms = {{1.0, e / (1.0 + e)}, {e, 1.0 / (1.0 + e)}};
        } else if (r) {
            const auto locs = get.value<std::vector<double>>(r, "rho", "locations",
                                                             std::nullopt, true);
            const auto masses = get.value<std::vector<double>>(r, "rho", "masses",
                                                               std::nullopt, true);
            if (locs.size() == masses.size())
                for (std::size_t i = 0; i < locs.size(); ++i)
                    rc.rho_atoms.push_back({locs[i], masses[i]});
            else
                errors.push_back("rho.locations and rho.masses must match");
        }
    }

    if (rc.experiment == "check-conditions") {
        const json* c = get.section("conditions", false);
        rc.cond_alpha = get.value<double>(
            c, "conditions", "alpha",
            std::optional<double>(rc.x_law ? rc.x_law->alpha() : 1.0), false);
        rc.cond_eps = get.value<double>(c, "conditions", "eps",
                                        std::optional<double>(rc.cond_alpha / 2.0),
                                        false);
        rc.cond_t_max = get.value<std::uint64_t>(
            c, "conditions", "t_max", std::optional<std::uint64_t>(1000), false);
        if (!(rc.cond_eps > 0.0 && rc.cond_eps < rc.cond_alpha))
            errors.push_back("conditions.eps must lie in (0, alpha)");
    }

    if (rc.experiment == "series") {
        const json* s = get.section("series", false);
        rc.epsilon_trunc = get.value<double>(s, "series", "epsilon_trunc",
                                             std::optional<double>(1e-4), false);
        if (s && s->contains("p"))
            rc.p_force = get.value<double>(s, "series", "p", std::nullopt, true);
        if (!(rc.epsilon_trunc > 0.0))
            errors.push_back("series.epsilon_trunc must be positive");
    }

    if (rc.experiment == "scaling-identity") {
        const json* s = get.section("scaling", false);
        rc.grid_lo = get.value<double>(s, "scaling", "grid_lo",
                                       std::optional<double>(1.0), false);
        rc.grid_hi = get.value<double>(s, "scaling", "grid_hi",
                                       std::optional<double>(1e6), false);
        rc.grid_points = get.value<std::uint64_t>(
            s, "scaling", "grid_points", std::optional<std::uint64_t>(50), false);
        rc.residual_tol = get.value<double>(s, "scaling", "residual_tol",
                                            std::optional<double>(1e-8), false);
        rc.min_amplitude = get.value<double>(
            s, "scaling", "min_amplitude",
            std::optional<double>(rc.measure_oscillating &&
                                          (rc.measure_a != 0.0 ||
                                           rc.measure_b != 0.0)
                                      ? 0.2
                                      : 0.0),
            false);
        if (!(rc.grid_hi > rc.grid_lo && rc.grid_lo > 0.0))
            errors.push_back("scaling grid bounds must satisfy 0 < lo < hi");
        if (rc.grid_points < 2)
            errors.push_back("scaling.grid_points must be >= 2");
    }

    // resolved echo
    rc.doc = doc;
    rc.doc["experiment"]["name"] = rc.experiment;
    rc.doc["experiment"]["seed"] = rc.seed;
    rc.doc["experiment"]["n"] = rc.n;
    rc.doc["experiment"]["probs"] = rc.probs;
    rc.doc["experiment"]["ci"] = rc.ci;
    rc.doc["experiment"]["hill_band"] = rc.hill_band;
    if (rc.experiment == "series") {
        rc.doc["series"]["epsilon_trunc"] = rc.epsilon_trunc;
        if (rc.p_force) rc.doc["series"]["p"] = *rc.p_force;
    }
    if (rc.experiment == "scaling-identity") {
        rc.doc["scaling"]["grid_lo"] = rc.grid_lo;
        rc.doc["scaling"]["grid_hi"] = rc.grid_hi;
        rc.doc["scaling"]["grid_points"] = rc.grid_points;
        rc.doc["scaling"]["residual_tol"] = rc.residual_tol;
        rc.doc["scaling"]["min_amplitude"] = rc.min_amplitude;
    }
    return rc;
}

} // namespace rwt

#endif
