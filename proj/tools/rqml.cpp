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

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include "rqml/commands.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::optional<int> threads;
    std::string out;
};

void add_common(CLI::App* sub, CommonFlags& f, bool with_config) {
    if (with_config) sub->add_option("--config", f.config, "Experiment config file (key = value)");
    sub->add_option("--seed", f.seed, "Master seed");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--threads", f.threads, "OpenMP threads (0 = runtime default)");
    sub->add_option("--runs", f.runs, "Runs per ensemble");
}

rqml::ExperimentConfig resolve(const CommonFlags& f) {
    rqml::ExperimentConfig cfg = f.config.empty() ? rqml::ExperimentConfig{} : rqml::load_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    if (f.runs) cfg.runs = *f.runs;
    if (f.threads) cfg.threads = *f.threads;
    cfg.validate();
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Remote quantum machine learning protocol simulator"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string input;
    auto* run = app.add_subcommand("run", "Single protocol session with per-trial trace");
    auto* sweep = app.add_subcommand("sweep", "Ensembles over memory capacity and/or interception probability");
    auto* attack = app.add_subcommand("attack", "Honest baseline against an attacked ensemble");
    auto* calibrate = app.add_subcommand("calibrate", "Honest baseline and late-learning threshold");
    auto* fit = app.add_subcommand("fit", "Re-fit a survival or sweep CSV");
    for (auto* sub : {run, sweep, attack, calibrate}) add_common(sub, flags, true);
    add_common(fit, flags, false);
    fit->add_option("--input", input, "CSV written by sweep/calibrate/attack")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return rqml::kExitConfig;
    }

    rqml::CommandOptions opts;
    opts.out = flags.out;
    opts.log = &std::cout;
    return rqml::guarded(std::cerr, [&] {
        if (fit->parsed()) {
            if (flags.threads && *flags.threads > 0) omp_set_num_threads(*flags.threads);
            rqml::cmd_fit(input, opts);
            return;
        }
        const rqml::ExperimentConfig cfg = resolve(flags);
        if (run->parsed()) rqml::cmd_run(cfg, opts);
        if (sweep->parsed()) rqml::cmd_sweep(cfg, opts);
        if (attack->parsed()) rqml::cmd_attack(cfg, opts);
        if (calibrate->parsed()) rqml::cmd_calibrate(cfg, opts);
    });
}
