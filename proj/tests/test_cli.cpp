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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

#include "rqml/report.hpp"

namespace fs = std::filesystem;
using rqml::Json;

namespace {

const fs::path kWork = fs::path(RQML_TEST_TMP) / "cli";

int cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + std::string(RQML_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
    fs::create_directories(kWork);
    const fs::path p = kWork / name;
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
    return out;
}

Json load_json(const fs::path& p) { return Json::parse(slurp(p)); }

std::vector<std::vector<double>> table(const fs::path& p, std::vector<std::string>& cols) {
    return rqml::read_csv_table(slurp(p), cols);
}

std::string out_dir(const std::string& name) {
    const fs::path p = kWork / name;
    fs::remove_all(p);
    return p.string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run writes a halted summary and a trace") {
    const auto cfg = write_config("run.cfg", "n_l = 30\nseed = 4\n");
    const std::string out = out_dir("run");
    REQUIRE(cli("run --config " + cfg.string() + " --out " + out) == 0);
    const Json summary = load_json(fs::path(out) / "summary.json");
    CHECK(summary["result"]["halted"] == true);
    CHECK(summary["config"]["n_l"] == "30");
    CHECK(summary["config"]["seed"] == "4");
    std::istringstream trace(slurp(fs::path(out) / "trace.jsonl"));
    std::string first;
    std::getline(trace, first);
    CHECK(Json::parse(first)["record"] == "config");
    std::size_t learning = 0;
    for (std::string line; std::getline(trace, line);) {
        const Json rec = Json::parse(line);
        CHECK(rec.contains("fidelity"));
        CHECK(rec.contains("n_f"));
        CHECK(rec.contains("coefficient"));
        learning += rec["learning"].get<bool>() ? 1 : 0;
    }
    CHECK(learning == summary["result"]["n_effective"].get<std::size_t>());
}

TEST_CASE("flags override the config file") {
    const auto cfg = write_config("flags.cfg", "n_l = 30\nseed = 4\nruns = 50\n");
    const std::string out = out_dir("flags");
    REQUIRE(cli("run --config " + cfg.string() + " --out " + out + " --seed 11 --runs 3 --threads 1") == 0);
    const Json summary = load_json(fs::path(out) / "summary.json");
    CHECK(summary["config"]["seed"] == "11");
    CHECK(summary["config"]["runs"] == "3");
    CHECK(summary["config"]["threads"] == "1");
    CHECK(summary["config"]["output_dir"] == out);
}

TEST_CASE("configuration errors exit with 2") {
    CHECK(cli("run --config " + write_config("zero.cfg", "n_l = 0\n").string() + " --out " + out_dir("e1")) == 2);
    CHECK(cli("attack --config " + write_config("adv.cfg", "adversary = dragon\n").string() + " --out " + out_dir("e2")) == 2);
    CHECK(cli("sweep --config " + write_config("empty.cfg", "n_l = 10\n").string() + " --out " + out_dir("e3")) == 2);
    CHECK(cli("attack --config " + write_config("none.cfg", "n_l = 10\n").string() + " --out " + out_dir("e4")) == 2);
    CHECK(cli("run --config " + (kWork / "missing.cfg").string()) == 2);
    CHECK(cli("run --runs 0") == 2);
    CHECK(cli("run --bogus") == 2);
    CHECK(cli("") == 2);
    CHECK(cli("fit --input " + (kWork / "missing.csv").string()) == 2);
}

TEST_CASE("runtime errors exit with 3") {
    const auto bad = write_config("notcsv.csv", "x,y\n1,2\n3,4\n");
    CHECK(cli("fit --input " + bad.string() + " --out " + out_dir("e5")) == 2);
    const auto thin = write_config("thin.csv", "N_L,n_bar_sim,eps_L\n10,20,0.1\n");
    CHECK(cli("fit --input " + thin.string() + " --out " + out_dir("e6")) == 3);
}

TEST_CASE("memory sweep table") {
    const auto cfg = write_config("sweep_nl.cfg", "sweep_n_l = 50, 100\nruns = 200\nseed = 3\n");
    const std::string out = out_dir("sweep_nl");
    REQUIRE(cli("sweep --config " + cfg.string() + " --out " + out) == 0);
    std::vector<std::string> cols;
    const auto rows = table(fs::path(out) / "sweep_nl.csv", cols);
    CHECK(cols == std::vector<std::string>{"N_L", "n_c", "n_bar", "n_bar_sim", "eps_L", "runs", "halted"});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][4] > rows[1][4]);
    CHECK(rows[0][3] < rows[1][3]);
    CHECK(fs::exists(fs::path(out) / "survival_nl50.csv"));
    CHECK(fs::exists(fs::path(out) / "fits.json"));
    const auto preamble = rqml::read_csv_preamble(slurp(fs::path(out) / "sweep_nl.csv"));
    CHECK(preamble.size() >= 20);
}

TEST_CASE("interception sweep table") {
    const auto cfg = write_config("sweep_p.cfg", "sweep_p_int = 0, 0.1\nruns = 200\nseed = 3\n");
    const std::string out = out_dir("sweep_p");
    REQUIRE(cli("sweep --config " + cfg.string() + " --out " + out) == 0);
    std::vector<std::string> cols;
    const auto rows = table(fs::path(out) / "sweep_pint.csv", cols);
    CHECK(cols == std::vector<std::string>{"p_int", "n_c", "n_bar", "n_bar_sim", "eps_L", "runs", "halted"});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][2] < rows[1][2]);
    CHECK(rows[0][3] < rows[1][3]);
}

TEST_CASE("fit re-derives the sweep's exponential fit") {
    const std::string out = (kWork / "sweep_nl").string();
    REQUIRE(fs::exists(fs::path(out) / "survival_nl100.csv"));
    const std::string refit = out_dir("refit");
    REQUIRE(cli("fit --input " + out + "/survival_nl100.csv --out " + refit) == 0);
    const Json fit = load_json(fs::path(refit) / "fit.json");
    const Json fits = load_json(fs::path(out) / "fits.json");
    CHECK(fit["fit"]["n_c"].get<double>() == doctest::Approx(fits["n_l"][1]["fit"]["n_c"].get<double>()).epsilon(1e-12));
    CHECK(fit["source_preamble"]["n_l"] == "100");

    const auto cfg = write_config("sweep3.cfg", "sweep_n_l = 20, 40, 80\nruns = 100\n");
    const std::string s3 = out_dir("sweep3");
    REQUIRE(cli("sweep --config " + cfg.string() + " --out " + s3) == 0);
    const std::string refit3 = out_dir("refit3");
    REQUIRE(cli("fit --input " + s3 + "/sweep_nl.csv --out " + refit3) == 0);
    const Json f3 = load_json(fs::path(refit3) / "fit.json");
    CHECK(f3["alpha"].get<double>() == doctest::Approx(load_json(fs::path(s3) / "fits.json")["alpha"].get<double>()));
}

TEST_CASE("calibrate and attack reports") {
    const auto cal = write_config("cal.cfg", "runs = 300\n");
    const std::string out = out_dir("calibrate");
    REQUIRE(cli("calibrate --config " + cal.string() + " --out " + out) == 0);
    const Json c = load_json(fs::path(out) / "calibration.json");
    CHECK(c["baseline"]["late_learning_threshold"].get<double>() > c["baseline"]["n_bar_sim"].get<double>());
    CHECK(c["config"]["runs"] == "300");

    const auto atk = write_config("atk.cfg", "runs = 300\nadversary = intercept\np_int = 0.1\n");
    const std::string aout = out_dir("attack");
    REQUIRE(cli("attack --config " + atk.string() + " --out " + aout) == 0);
    const Json a = load_json(fs::path(aout) / "attack.json");
    CHECK(a["attacked"].contains("late_learning_flag"));
    CHECK(a["attacked"]["late_learning_flag"].is_boolean());
    CHECK(a["attacked"]["threshold_exceedance_fraction"].get<double>() >
          a["baseline"]["false_alarm_rate"].get<double>());
}

TEST_CASE("man in the middle without and with the safeguard") {
    const auto plain = write_config("mitm0.cfg", "runs = 100\nadversary = mitm\nn_l = 30\n");
    const std::string p = out_dir("mitm0");
    REQUIRE(cli("attack --config " + plain.string() + " --out " + p) == 0);
    const Json a = load_json(fs::path(p) / "attack.json");
    CHECK(a["attacked"]["sessions_alarmed_fraction"].get<double>() == 0.0);
    CHECK(a["attacked"]["canary_trials"] == 0);
    CHECK(a["attacked"].contains("note"));

    const auto hard = write_config("mitm1.cfg", "runs = 100\nadversary = mitm\nn_l = 30\nhardened = true\n");
    const std::string h = out_dir("mitm1");
    REQUIRE(cli("attack --config " + hard.string() + " --out " + h) == 0);
    const Json b = load_json(fs::path(h) / "attack.json");
    CHECK(b["attacked"]["sessions_alarmed_fraction"].get<double>() == 1.0);
    // Geometric with p = 1/2 per canary: median 1, and 2/p = 4 is generous.
    CHECK(b["attacked"]["median_canaries_to_first_alarm"].get<double>() <= 4.0);
    CHECK(b["attacked"]["per_canary_alarm_rate"].get<double>() == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("repeated commands produce byte-identical files") {
    const auto cfg = write_config(
        "det.cfg", "n_l = 20\nruns = 60\nsweep_n_l = 10, 20, 30\nsweep_p_int = 0, 0.2\nadversary = intercept\np_int = 0.2\n");
    for (const std::string cmd : {"run", "sweep", "calibrate", "attack"}) {
        CAPTURE(cmd);
        const std::string out = out_dir("det_" + cmd);
        REQUIRE(cli(cmd + " --config " + cfg.string() + " --out " + out) == 0);
        const auto first = snapshot(out);
        REQUIRE(cli(cmd + " --config " + cfg.string() + " --out " + out, "OMP_NUM_THREADS=3") == 0);
        CHECK(first == snapshot(out));
        CHECK(!first.empty());
    }
}

TEST_CASE("every output embeds the resolved config") {
    for (const std::string dir : {"det_run", "det_sweep", "det_calibrate", "det_attack"}) {
        for (const auto& [name, body] : snapshot(kWork / dir)) {
            CAPTURE(name);
            if (name.ends_with(".json")) {
                CHECK(Json::parse(body)["config"]["seed"] == "1");
            } else if (name.ends_with(".jsonl")) {
                CHECK(body.find("\"record\":\"config\"") == 1);
            } else if (name.ends_with(".csv")) {
                CHECK(body.find("# seed=1\n") != std::string::npos);
                CHECK(body.find("# output_dir=") != std::string::npos);
            }
        }
    }
}

}  // TEST_SUITE
