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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "rqml/config.hpp"

namespace rqml {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct CommandOptions {
    /// Overrides cfg.output_dir when non-empty.
    std::filesystem::path out;
    std::ostream* log = nullptr;
};

/// One session: trace.jsonl (when trace = true) and summary.json.
void cmd_run(ExperimentConfig cfg, const CommandOptions& opts);
/// Ensembles over sweep_n_l and/or sweep_p_int.
void cmd_sweep(ExperimentConfig cfg, const CommandOptions& opts);
/// Honest baseline plus attacked ensemble; attack.json.
void cmd_attack(ExperimentConfig cfg, const CommandOptions& opts);
/// Honest baseline and late-learning threshold; calibration.json.
void cmd_calibrate(ExperimentConfig cfg, const CommandOptions& opts);
/// Re-fits a survival CSV or an N_L sweep CSV written by this tool; fit.json.
void cmd_fit(const std::filesystem::path& input, const CommandOptions& opts);

/// Runs `body`, reporting exceptions on `err` and mapping them to exit codes:
/// configuration problems give kExitConfig, anything else kExitRuntime.
template <typename F>
int guarded(std::ostream& err, F&& body);

}  // namespace rqml

#include <exception>
#include <ostream>

namespace rqml {

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace rqml
