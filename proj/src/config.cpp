// Copyright 2026 The RQML Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rqml/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "rqml/report.hpp"

namespace rqml {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a number");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

std::string_view adversary_name(AdversaryKind k) {
    switch (k) {
        case AdversaryKind::None: return "none";
        case AdversaryKind::Intercept: return "intercept";
        case AdversaryKind::RefTamper: return "ref_tamper";
        case AdversaryKind::Mitm: return "mitm";
    }
    return "none";
}

using Setter = void (*)(ExperimentConfig&, const std::string& key, const std::string& value);

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"d", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.d = parse_number<std::size_t>(k, v); }},
        {"n_l", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.n_l = parse_number<std::size_t>(k, v); }},
        {"fiducial", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.fiducial = {v}; }},
        {"target", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.target = {v}; }},
        {"decoy_probability", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.decoy_probability = parse_number<double>(k, v); }},
        {"hardened", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.hardened = parse_bool(k, v); }},
        {"canary_probability", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.canary_probability = parse_number<double>(k, v); }},
        {"max_iterations", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.max_iterations = parse_number<std::uint64_t>(k, v); }},
        {"engine", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "fast") c.engine = Engine::Fast;
             else if (v == "full") c.engine = Engine::Full;
             else throw ConfigError("key '" + k + "': expected fast or full");
         }},
        {"step_halfwidth", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.step_halfwidth = parse_number<double>(k, v); }},
        {"wrap_params", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.wrap_params = parse_bool(k, v); }},
        {"seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
        {"runs", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.runs = parse_number<std::size_t>(k, v); }},
        {"threads", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.threads = parse_number<int>(k, v); }},
        {"trace", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trace = parse_bool(k, v); }},
        {"sweep_n_l", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.sweep_n_l.clear();
             if (v.empty()) return;
             for (const auto& item : split(v, ',')) c.sweep_n_l.push_back(parse_number<std::size_t>(k, item));
         }},
        {"sweep_p_int", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.sweep_p_int.clear();
             if (v.empty()) return;
             for (const auto& item : split(v, ',')) c.sweep_p_int.push_back(parse_number<double>(k, item));
         }},
        {"adversary", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "none") c.adversary = AdversaryKind::None;
             else if (v == "intercept") c.adversary = AdversaryKind::Intercept;
             else if (v == "ref_tamper") c.adversary = AdversaryKind::RefTamper;
             else if (v == "mitm") c.adversary = AdversaryKind::Mitm;
             else throw ConfigError("key '" + k + "': unknown adversary '" + v + "'");
         }},
        {"p_int", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.p_int = parse_number<double>(k, v); }},
        {"clone_overlap_sq", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.clone_overlap_sq = parse_number<double>(k, v); }},
        {"eve_learner", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.eve_learner = parse_bool(k, v); }},
        {"tamper_channel", [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "ab") c.tamper_channel = TamperChannel::AliceToBob;
             else if (v == "ba") c.tamper_channel = TamperChannel::BobToAlice;
             else throw ConfigError("key '" + k + "': expected ab or ba");
         }},
        {"eve_target", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.eve_target = {v}; }},
        {"output_dir", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
    };
    return table;
}

void check_state_spec(const std::string& key, const StateSpec& spec, std::size_t d, bool allow_haar,
                      bool allow_orthogonal) {
    const std::string& t = spec.text;
    if (t == "haar") {
        if (!allow_haar) throw ConfigError("key '" + key + "': 'haar' is not allowed here");
        return;
    }
    if (t == "orthogonal") {
        if (!allow_orthogonal) throw ConfigError("key '" + key + "': 'orthogonal' is not allowed here");
        return;
    }
    try {
        Rng rng = make_rng(0);
        const QState anchor = QState::basis(d, 0);
        (void)resolve_state(spec, d, rng, &anchor);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (d < 2) throw ConfigError("d must be at least 2");
    if (n_l == 0) throw ConfigError("n_l must be positive");
    if (!(decoy_probability >= 0.0 && decoy_probability < 1.0)) {
        throw ConfigError("decoy_probability must lie in [0, 1)");
    }
    if (!(canary_probability >= 0.0 && canary_probability < 1.0)) {
        throw ConfigError("canary_probability must lie in [0, 1)");
    }
    if (max_iterations != 0 && max_iterations < n_l) throw ConfigError("max_iterations must be >= n_l");
    if (!(step_halfwidth > 0.0) || !std::isfinite(step_halfwidth)) {
        throw ConfigError("step_halfwidth must be positive");
    }
    if (runs == 0) throw ConfigError("runs must be positive");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    for (const std::size_t n : sweep_n_l) {
        if (n == 0) throw ConfigError("sweep_n_l entries must be positive");
    }
    for (const double p : sweep_p_int) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("sweep_p_int entries must lie in [0, 1]");
    }
    if (!(p_int >= 0.0 && p_int <= 1.0)) throw ConfigError("p_int must lie in [0, 1]");
    if (!(clone_overlap_sq >= 0.0 && clone_overlap_sq <= 1.0)) {
        throw ConfigError("clone_overlap_sq must lie in [0, 1]");
    }
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
    check_state_spec("fiducial", fiducial, d, false, false);
    check_state_spec("target", target, d, true, false);
    check_state_spec("eve_target", eve_target, d, true, true);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::resolved() const {
    return {
        {"d", std::to_string(d)},
        {"n_l", std::to_string(n_l)},
        {"fiducial", fiducial.text},
        {"target", target.text},
        {"decoy_probability", format_double(decoy_probability)},
        {"hardened", hardened ? "true" : "false"},
        {"canary_probability", format_double(canary_probability)},
        {"max_iterations", std::to_string(max_iterations)},
        {"engine", engine == Engine::Fast ? "fast" : "full"},
        {"step_halfwidth", format_double(step_halfwidth)},
        {"wrap_params", wrap_params ? "true" : "false"},
        {"seed", std::to_string(seed)},
        {"runs", std::to_string(runs)},
        {"threads", std::to_string(threads)},
        {"trace", trace ? "true" : "false"},
        {"sweep_n_l", join_sizes(sweep_n_l)},
        {"sweep_p_int", join_doubles(sweep_p_int)},
        {"adversary", std::string(adversary_name(adversary))},
        {"p_int", format_double(p_int)},
        {"clone_overlap_sq", format_double(clone_overlap_sq)},
        {"eve_learner", eve_learner ? "true" : "false"},
        {"tamper_channel", tamper_channel == TamperChannel::AliceToBob ? "ab" : "ba"},
        {"eve_target", eve_target.text},
        {"output_dir", output_dir},
    };
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::map<std::string, std::size_t, std::less<>> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(std::string_view(line).substr(0, line.find('#')));
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        if (const auto prev = seen.find(key); prev != seen.end()) {
            throw ConfigError("line " + std::to_string(lineno) + ": key '" + key +
                              "' already set on line " + std::to_string(prev->second));
        }
        seen.emplace(key, lineno);
        it->second(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_config_text(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg.resolved()) out += k + " = " + v + "\n";
    return out;
}

QState resolve_state(const StateSpec& spec, std::size_t d, Rng& rng, const QState* fiducial) {
    const std::string& t = spec.text;
    if (t == "haar") return random_state(d, rng);
    if (t == "plus" || t == "minus") {
        if (d == 2) return t == "plus" ? QState::plus() : QState::minus();
        CVector v = CVector::Zero(static_cast<Eigen::Index>(d));
        v(0) = 1.0;
        v(1) = t == "plus" ? 1.0 : -1.0;
        return QState::normalized(std::move(v));
    }
    if (t.rfind("basis:", 0) == 0) {
        const auto k = parse_number<std::size_t>("basis", t.substr(6));
        if (k >= d) throw ConfigError("basis index " + std::to_string(k) + " out of range for d=" + std::to_string(d));
        return QState::basis(d, k);
    }
    if (t == "orthogonal") {
        if (fiducial == nullptr) throw ConfigError("'orthogonal' needs a fiducial state");
        // Project the basis vector least aligned with the fiducial.
        Eigen::Index best = 0;
        fiducial->amplitudes().cwiseAbs().minCoeff(&best);
        CVector v = CVector::Zero(static_cast<Eigen::Index>(d));
        v(best) = 1.0;
        v -= fiducial->amplitudes().dot(v) * fiducial->amplitudes();
        return QState::normalized(std::move(v));
    }
    const auto parts = split(t, ',');
    if (parts.size() != d) {
        throw ConfigError("state '" + t + "' must list " + std::to_string(d) + " amplitudes");
    }
    CVector v(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        const auto ri = split(parts[i], ':');
        if (ri.size() > 2) throw ConfigError("amplitude '" + parts[i] + "' must be re or re:im");
        const double re = parse_number<double>("amplitude", ri[0]);
        const double im = ri.size() == 2 ? parse_number<double>("amplitude", ri[1]) : 0.0;
        v(static_cast<Eigen::Index>(i)) = Complex(re, im);
    }
    if (v.norm() == 0.0) throw ConfigError("state '" + t + "' has zero norm");
    return QState::normalized(std::move(v));
}

namespace {

SessionConfig base_session(const ExperimentConfig& cfg) {
    SessionConfig s;
    s.d = cfg.d;
    s.n_l = cfg.n_l;
    Rng none = make_rng(cfg.seed, Stream::Target);
    s.fiducial = resolve_state(cfg.fiducial, cfg.d, none);
    s.target = s.fiducial;
    s.decoy_probability = cfg.decoy_probability;
    s.hardened = cfg.hardened;
    s.canary_probability = cfg.canary_probability;
    s.max_iterations = cfg.max_iterations;
    s.seed = cfg.seed;
    s.engine = cfg.engine;
    s.learner = LearnerOptions{cfg.step_halfwidth, cfg.wrap_params};
    return s;
}

}  // namespace

SessionConfig make_session_config(const ExperimentConfig& cfg) {
    SessionConfig s = base_session(cfg);
    Rng rng = make_rng(cfg.seed, Stream::Target);
    s.target = resolve_state(cfg.target, cfg.d, rng);
    s.record_trace = cfg.trace;
    return s;
}

EnsembleConfig make_ensemble_config(const ExperimentConfig& cfg, bool with_adversary) {
    EnsembleConfig e;
    e.session = base_session(cfg);
    e.runs = cfg.runs;
    e.seed = cfg.seed;
    e.random_target = cfg.target.text == "haar";
    if (!e.random_target) {
        Rng rng = make_rng(cfg.seed, Stream::Target);
        e.session.target = resolve_state(cfg.target, cfg.d, rng);
    }
    if (with_adversary) e.adversary = make_adversary_factory(cfg);
    return e;
}

AdversaryFactory make_adversary_factory(const ExperimentConfig& cfg) {
    switch (cfg.adversary) {
        case AdversaryKind::None: return {};
        case AdversaryKind::Intercept: {
            InterceptEveConfig ic{cfg.p_int, cfg.clone_overlap_sq, cfg.eve_learner, cfg.n_l};
            const std::size_t d = cfg.d;
            return [ic, d](std::uint64_t seed) -> std::unique_ptr<Adversary> {
                return std::make_unique<InterceptEve>(ic, d, seed);
            };
        }
        case AdversaryKind::RefTamper: {
            const TamperChannel ch = cfg.tamper_channel;
            return [ch](std::uint64_t) -> std::unique_ptr<Adversary> {
                return std::make_unique<RefTamperEve>(ch);
            };
        }
        case AdversaryKind::Mitm: {
            const ExperimentConfig copy = cfg;
            return [copy](std::uint64_t seed) -> std::unique_ptr<Adversary> {
                Rng none = make_rng(copy.seed, Stream::Target);
                const QState fid = resolve_state(copy.fiducial, copy.d, none);
                Rng rng = make_rng(seed, Stream::Eve);
                MitmEveConfig mc{resolve_state(copy.eve_target, copy.d, rng, &fid)};
                return std::make_unique<MitmEve>(std::move(mc));
            };
        }
    }
    return {};
}

}  // namespace rqml
