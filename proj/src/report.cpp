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

#include "rqml/report.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rqml {

std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) throw std::runtime_error("cannot format number");
    return std::string(buf.data(), ptr);
}

Json config_json(const ExperimentConfig& cfg) {
    Json j = Json::object();
    for (const auto& [k, v] : cfg.resolved()) j[k] = v;
    return j;
}

Json fit_json(const FitResult& fit) {
    Json j;
    if (fit.model == FitModel::ExpDecay) {
        j["model"] = "exp_decay";
        j["n_c"] = fit.n_c;
        j["n_bar"] = fit.n_bar;
    } else {
        j["model"] = "power_law";
        j["coefficient"] = fit.coefficient;
        j["exponent"] = fit.exponent;
    }
    j["r_squared"] = fit.r_squared;
    j["window"] = {fit.window_lo, fit.window_hi};
    j["points"] = fit.points;
    return j;
}

Json session_summary_json(const SessionResult& r) {
    Json j;
    j["halted"] = r.halted;
    j["n_effective"] = r.n_effective;
    j["total_trials"] = r.total_trials;
    j["decoy_trials"] = r.decoy_trials;
    j["canary_trials"] = r.canary_trials;
    j["epsilon_l"] = r.epsilon_l;
    j["m_pm_violations"] = r.alarms.m_pm_violations;
    j["canary_violations"] = r.alarms.canary_violations;
    j["first_alarm_trial"] = r.first_alarm_trial ? Json(*r.first_alarm_trial) : Json(nullptr);
    j["protocol_error"] = r.protocol_error ? Json(*r.protocol_error) : Json(nullptr);
    Json params = Json::array();
    for (Eigen::Index i = 0; i < r.final_params.size(); ++i) params.push_back(r.final_params(i));
    j["final_params"] = std::move(params);
    return j;
}

std::string csv_preamble(const ExperimentConfig& cfg, std::string_view extra) {
    std::string out;
    for (const auto& [k, v] : cfg.resolved()) out += "# " + k + "=" + v + "\n";
    out += extra;
    return out;
}

std::string trace_jsonl(const ExperimentConfig& cfg, const SessionResult& r) {
    std::string out;
    Json head;
    head["record"] = "config";
    head["config"] = config_json(cfg);
    out += head.dump() + "\n";
    for (const TrialRecord& t : r.trace) {
        Json j;
        j["trial_id"] = t.trial_id;
        j["kind"] = std::string(to_string(t.kind));
        j["outcome"] = t.outcome;
        j["alarm"] = t.alarm;
        j["learning"] = t.learning;
        j["n_f"] = t.n_fails;
        j["coefficient"] = t.coefficient;
        j["fidelity"] = t.fidelity;
        out += j.dump() + "\n";
    }
    return out;
}

std::string survival_csv(const ExperimentConfig& cfg, const SurvivalCurve& curve) {
    std::string out = csv_preamble(cfg, "# halted_runs=" + std::to_string(curve.runs()) + "\n");
    out += "n,P_L,P_S\n";
    auto row = [&](std::uint64_t n) {
        out += std::to_string(n) + "," + format_double(curve.learning_probability(n)) + "," +
               format_double(curve.survival_probability(n)) + "\n";
    };
    if (curve.n_l() > 0) row(curve.n_l() - 1);
    for (const std::uint64_t n : curve.steps()) row(n);
    return out;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<std::pair<std::string, std::string>> read_csv_preamble(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() != '#') break;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        out.emplace_back(std::move(key), line.substr(eq + 1));
    }
    return out;
}

std::vector<std::vector<double>> read_csv_table(std::string_view text,
                                                std::vector<std::string>& columns) {
    std::vector<std::vector<double>> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    columns.clear();
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (columns.empty()) {
            columns = std::move(cells);
            continue;
        }
        if (cells.size() != columns.size()) throw std::runtime_error("ragged CSV row: " + line);
        std::vector<double> row;
        for (const std::string& c : cells) {
            double v = std::numeric_limits<double>::quiet_NaN();
            if (!c.empty()) {
                const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
                if (ec != std::errc{} || ptr != c.data() + c.size()) {
                    throw std::runtime_error("non-numeric CSV cell '" + c + "'");
                }
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace rqml
