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

#include "rqml/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rqml/report.hpp"

namespace rqml {

namespace {

std::filesystem::path output_dir(ExperimentConfig& cfg, const CommandOptions& opts) {
    if (!opts.out.empty()) cfg.output_dir = opts.out.string();
    return cfg.output_dir;
}

std::ostream& log_of(const CommandOptions& opts) {
    static std::ostringstream sink;
    return opts.log != nullptr ? *opts.log : sink;
}

Json optional_fit(const std::optional<FitResult>& fit) {
    return fit ? fit_json(*fit) : Json(nullptr);
}

std::optional<FitResult> try_fit(const SurvivalCurve& curve, std::vector<std::string>& warnings) {
    try {
        return fit_survival_exponential(curve);
    } catch (const FitUnavailable& e) {
        warnings.emplace_back(e.what());
        return std::nullopt;
    }
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

template <typename T>
std::optional<T> median(std::vector<T> v) {
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

Json warnings_json(const std::vector<std::string>& w) {
    Json j = Json::array();
    for (const auto& s : w) j.push_back(s);
    return j;
}

}  // namespace

void cmd_run(ExperimentConfig cfg, const CommandOptions& opts) {
    const auto dir = output_dir(cfg, opts);
    const SessionConfig s = make_session_config(cfg);
    std::unique_ptr<Adversary> adv;
    if (const AdversaryFactory f = make_adversary_factory(cfg)) adv = f(cfg.seed);
    const SessionResult r = run_session(s, adv.get());

    if (cfg.trace) write_file(dir / "trace.jsonl", trace_jsonl(cfg, r));
    Json summary;
    summary["command"] = "run";
    summary["config"] = config_json(cfg);
    summary["result"] = session_summary_json(r);
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    log_of(opts) << "halted=" << (r.halted ? "true" : "false") << " n=" << r.n_effective
                 << " trials=" << r.total_trials << " epsilon_L=" << format_double(r.epsilon_l)
                 << " alarms=" << r.alarms.total() << "\n";
    if (r.protocol_error) throw std::runtime_error("protocol error: " + *r.protocol_error);
}

void cmd_sweep(ExperimentConfig cfg, const CommandOptions& opts) {
    if (cfg.sweep_n_l.empty() && cfg.sweep_p_int.empty()) {
        throw ConfigError("sweep needs a non-empty sweep_n_l or sweep_p_int list");
    }
    const auto dir = output_dir(cfg, opts);
    std::ostream& log = log_of(opts);
    Json fits;
    fits["command"] = "sweep";
    fits["config"] = config_json(cfg);

    if (!cfg.sweep_n_l.empty()) {
        std::vector<MemorySweepRow> rows;
        Json per_nl = Json::array();
        std::string csv = csv_preamble(cfg) + "N_L,n_c,n_bar,n_bar_sim,eps_L,runs,halted\n";
        for (const std::size_t n_l : cfg.sweep_n_l) {
            ExperimentConfig c = cfg;
            c.n_l = n_l;
            EnsembleResult e = run_ensemble(make_ensemble_config(c, true), cfg.threads);
            MemorySweepRow row{n_l, try_fit(e.curve, e.warnings), e.n_bar_sim, e.mean_epsilon, cfg.runs,
                               e.halted_runs};
            write_file(dir / ("survival_nl" + std::to_string(n_l) + ".csv"), survival_csv(c, e.curve));
            csv += std::to_string(n_l) + "," + cell(row.fit ? std::optional(row.fit->n_c) : std::nullopt) +
                   "," + cell(row.fit ? std::optional(row.fit->n_bar) : std::nullopt) + "," +
                   format_double(row.n_bar_sim) + "," + format_double(row.mean_epsilon) + "," +
                   std::to_string(row.runs) + "," + std::to_string(row.halted) + "\n";
            Json j;
            j["n_l"] = n_l;
            j["fit"] = optional_fit(row.fit);
            j["warnings"] = warnings_json(e.warnings);
            per_nl.push_back(std::move(j));
            log << "N_L=" << n_l << " n_bar_sim=" << format_double(row.n_bar_sim)
                << " eps_L=" << format_double(row.mean_epsilon) << " halted=" << row.halted << "/"
                << row.runs << "\n";
            rows.push_back(std::move(row));
        }
        write_file(dir / "sweep_nl.csv", csv);
        const ScalingFits sf = fit_scaling(rows);
        fits["n_l"] = std::move(per_nl);
        fits["time_scaling"] = optional_fit(sf.time);
        fits["error_scaling"] = optional_fit(sf.error);
        fits["trade_off"] = optional_fit(sf.trade_off);
        fits["alpha"] = sf.time ? Json(sf.time->exponent) : Json(nullptr);
        fits["beta"] = sf.error ? Json(-sf.error->exponent) : Json(nullptr);
    }

    if (!cfg.sweep_p_int.empty()) {
        Json per_p = Json::array();
        std::string csv = csv_preamble(cfg) + "p_int,n_c,n_bar,n_bar_sim,eps_L,runs,halted\n";
        for (const double p : cfg.sweep_p_int) {
            ExperimentConfig c = cfg;
            c.p_int = p;
            c.adversary = p > 0.0 ? AdversaryKind::Intercept : AdversaryKind::None;
            EnsembleResult e = run_ensemble(make_ensemble_config(c, true), cfg.threads);
            const auto fit = try_fit(e.curve, e.warnings);
            write_file(dir / ("survival_pint" + format_double(p) + ".csv"), survival_csv(c, e.curve));
            csv += format_double(p) + "," + cell(fit ? std::optional(fit->n_c) : std::nullopt) + "," +
                   cell(fit ? std::optional(fit->n_bar) : std::nullopt) + "," +
                   format_double(e.n_bar_sim) + "," + format_double(e.mean_epsilon) + "," +
                   std::to_string(cfg.runs) + "," + std::to_string(e.halted_runs) + "\n";
            Json j;
            j["p_int"] = p;
            j["fit"] = optional_fit(fit);
            j["warnings"] = warnings_json(e.warnings);
            per_p.push_back(std::move(j));
            log << "p_int=" << format_double(p) << " n_bar_sim=" << format_double(e.n_bar_sim)
                << " eps_L=" << format_double(e.mean_epsilon) << " halted=" << e.halted_runs << "/"
                << cfg.runs << "\n";
        }
        write_file(dir / "sweep_pint.csv", csv);
        fits["p_int"] = std::move(per_p);
    }
    write_file(dir / "fits.json", fits.dump(2) + "\n");
}

namespace {

Json calibration_json(const CalibrationReport& rep) {
    Json j;
    j["runs"] = rep.runs;
    j["fit"] = optional_fit(rep.fit);
    j["n_c"] = rep.fit ? Json(rep.fit->n_c) : Json(nullptr);
    j["n_bar"] = rep.fit ? Json(rep.fit->n_bar) : Json(nullptr);
    j["n_bar_sim"] = rep.n_bar_sim;
    j["eps_L"] = rep.mean_epsilon;
    j["threshold_quantile"] = rep.threshold_quantile;
    j["late_learning_threshold"] = rep.threshold;
    j["false_alarm_rate"] = rep.false_alarm_rate;
    j["halted"] = rep.baseline.halted_runs;
    j["warnings"] = warnings_json(rep.baseline.warnings);
    return j;
}

}  // namespace

void cmd_calibrate(ExperimentConfig cfg, const CommandOptions& opts) {
    const auto dir = output_dir(cfg, opts);
    const CalibrationReport rep = calibrate_baseline(make_ensemble_config(cfg, false), cfg.threads);
    Json j;
    j["command"] = "calibrate";
    j["config"] = config_json(cfg);
    j["baseline"] = calibration_json(rep);
    write_file(dir / "calibration.json", j.dump(2) + "\n");
    write_file(dir / "survival_baseline.csv", survival_csv(cfg, rep.baseline.curve));
    log_of(opts) << "n_bar_sim=" << format_double(rep.n_bar_sim) << " threshold=" << rep.threshold
                 << " false_alarm_rate=" << format_double(rep.false_alarm_rate) << "\n";
}

void cmd_attack(ExperimentConfig cfg, const CommandOptions& opts) {
    if (cfg.adversary == AdversaryKind::None) {
        throw ConfigError("attack needs adversary = intercept, ref_tamper or mitm");
    }
    const auto dir = output_dir(cfg, opts);
    const CalibrationReport base = calibrate_baseline(make_ensemble_config(cfg, false), cfg.threads);
    EnsembleResult attacked = run_ensemble(make_ensemble_config(cfg, true), cfg.threads);
    const auto fit = try_fit(attacked.curve, attacked.warnings);

    const double exceed = exceedance_fraction(attacked.sessions, base.threshold);
    // Late learning is flagged when exceedances beat the baseline false-alarm
    // rate by more than three binomial standard deviations.
    const double p0 = std::max(base.false_alarm_rate, 1.0 / static_cast<double>(base.runs));
    const double sigma = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(attacked.sessions.size()));
    const bool late = exceed > p0 + 3.0 * sigma;

    std::uint64_t m_pm = 0;
    std::uint64_t canary_alarms = 0;
    std::uint64_t canaries = 0;
    std::size_t alarmed = 0;
    std::vector<std::uint64_t> first_trial;
    std::vector<std::uint64_t> first_canary;
    for (const SessionResult& s : attacked.sessions) {
        m_pm += s.alarms.m_pm_violations;
        canary_alarms += s.alarms.canary_violations;
        canaries += s.canary_trials;
        if (s.first_alarm_trial) {
            ++alarmed;
            first_trial.push_back(*s.first_alarm_trial);
        }
        if (s.canaries_to_first_alarm) first_canary.push_back(*s.canaries_to_first_alarm);
    }

    Json j;
    j["command"] = "attack";
    j["config"] = config_json(cfg);
    j["baseline"] = calibration_json(base);
    Json a;
    a["n_bar_sim"] = attacked.n_bar_sim;
    a["eps_L"] = attacked.mean_epsilon;
    a["halted"] = attacked.halted_runs;
    a["capped"] = attacked.capped_runs;
    a["fit"] = optional_fit(fit);
    a["threshold_exceedance_fraction"] = exceed;
    a["late_learning_flag"] = late;
    a["sessions_alarmed_fraction"] =
        static_cast<double>(alarmed) / static_cast<double>(attacked.sessions.size());
    a["m_pm_violations"] = m_pm;
    a["canary_violations"] = canary_alarms;
    a["canary_trials"] = canaries;
    a["per_canary_alarm_rate"] =
        canaries > 0 ? Json(static_cast<double>(canary_alarms) / static_cast<double>(canaries))
                     : Json(nullptr);
    const auto mt = median(first_trial);
    const auto mc = median(first_canary);
    a["median_first_alarm_trial"] = mt ? Json(*mt) : Json(nullptr);
    a["median_canaries_to_first_alarm"] = mc ? Json(*mc) : Json(nullptr);
    if (cfg.adversary == AdversaryKind::Mitm && !cfg.hardened) {
        a["note"] = "no canary trials without the controlled-T safeguard; this configuration cannot detect a man in the middle";
    }
    a["warnings"] = warnings_json(attacked.warnings);
    j["attacked"] = std::move(a);
    write_file(dir / "attack.json", j.dump(2) + "\n");
    write_file(dir / "survival_attacked.csv", survival_csv(cfg, attacked.curve));

    log_of(opts) << "baseline n_bar_sim=" << format_double(base.n_bar_sim)
                 << " threshold=" << base.threshold << "; attacked n_bar_sim="
                 << format_double(attacked.n_bar_sim) << " exceedance=" << format_double(exceed)
                 << " late_learning=" << (late ? "true" : "false")
                 << " alarmed_sessions=" << alarmed << "/" << attacked.sessions.size() << "\n";
}

void cmd_fit(const std::filesystem::path& input, const CommandOptions& opts) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + input.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto preamble = read_csv_preamble(text);
    std::vector<std::string> columns;
    const auto rows = read_csv_table(text, columns);
    auto col = [&](std::string_view name) -> std::optional<std::size_t> {
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) return std::nullopt;
        return static_cast<std::size_t>(it - columns.begin());
    };
    auto meta = [&](std::string_view key) -> std::optional<std::string> {
        for (const auto& [k, v] : preamble) {
            if (k == key) return v;
        }
        return std::nullopt;
    };

    Json j;
    j["command"] = "fit";
    j["source"] = input.filename().string();
    Json pre = Json::object();
    for (const auto& [k, v] : preamble) pre[k] = v;
    j["source_preamble"] = std::move(pre);

    if (col("n") && col("P_L") && col("P_S")) {
        const auto n_l = meta("n_l");
        const auto runs = meta("halted_runs");
        if (!n_l || !runs) throw ConfigError("survival CSV lacks n_l / halted_runs in its preamble");
        const std::size_t total = std::stoul(*runs);
        // Rebuild the halting sample from the EDF steps.
        std::vector<std::uint64_t> sample;
        double prev = 0.0;
        for (const auto& r : rows) {
            const double pl = r[*col("P_L")];
            const auto count = static_cast<std::size_t>(std::llround((pl - prev) * static_cast<double>(total)));
            sample.insert(sample.end(), count, static_cast<std::uint64_t>(r[*col("n")]));
            prev = pl;
        }
        const SurvivalCurve curve(std::stoul(*n_l), std::move(sample));
        j["fit"] = fit_json(fit_survival_exponential(curve));
    } else if (col("N_L") && col("n_bar_sim") && col("eps_L")) {
        std::vector<MemorySweepRow> sweep;
        for (const auto& r : rows) {
            MemorySweepRow m;
            m.n_l = static_cast<std::size_t>(r[*col("N_L")]);
            m.n_bar_sim = r[*col("n_bar_sim")];
            m.mean_epsilon = r[*col("eps_L")];
            m.halted = col("halted") ? static_cast<std::size_t>(r[*col("halted")]) : 1;
            sweep.push_back(m);
        }
        const ScalingFits sf = fit_scaling(sweep);
        if (!sf.time) throw FitUnavailable("power-law fits need at least 3 sweep rows");
        j["time_scaling"] = optional_fit(sf.time);
        j["error_scaling"] = optional_fit(sf.error);
        j["trade_off"] = optional_fit(sf.trade_off);
        j["alpha"] = sf.time->exponent;
        j["beta"] = sf.error ? Json(-sf.error->exponent) : Json(nullptr);
    } else {
        throw ConfigError("'" + input.string() + "' is neither a survival CSV nor an N_L sweep CSV");
    }
    const std::filesystem::path dir = opts.out.empty() ? std::filesystem::path("out") : opts.out;
    write_file(dir / "fit.json", j.dump(2) + "\n");
    log_of(opts) << j.dump() << "\n";
}

}  // namespace rqml
