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

// Experiment configuration: a flat `key = value` text file. Lines starting
// with '#' are comments. Unknown or repeated keys are rejected.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rqml/adversary.hpp"
#include "rqml/experiments.hpp"
#include "rqml/protocol.hpp"

namespace rqml {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class AdversaryKind { None, Intercept, RefTamper, Mitm };

/// A state given in a config file: "haar", "basis:K", "plus", "minus",
/// "orthogonal" (to the fiducial; eve_target only) or explicit amplitudes
/// "re:im,re:im,...".
struct StateSpec {
    std::string text = "basis:0";
};

struct ExperimentConfig {
    std::size_t d = 2;
    std::size_t n_l = 100;
    StateSpec fiducial{"basis:0"};
    StateSpec target{"haar"};
    double decoy_probability = 0.5;
    bool hardened = false;
    double canary_probability = 0.5;
    std::uint64_t max_iterations = 0;
    Engine engine = Engine::Fast;
    double step_halfwidth = 3.141592653589793;
    bool wrap_params = true;
    std::uint64_t seed = 1;
    std::size_t runs = 1000;
    int threads = 0;
    bool trace = true;
    std::vector<std::size_t> sweep_n_l;
    std::vector<double> sweep_p_int;

    AdversaryKind adversary = AdversaryKind::None;
    double p_int = 0.0;
    double clone_overlap_sq = 2.0 / 3.0;
    bool eve_learner = false;
    TamperChannel tamper_channel = TamperChannel::AliceToBob;
    StateSpec eve_target{"orthogonal"};
    std::string output_dir = "out";

    /// Range and consistency checks; throws ConfigError.
    void validate() const;
    /// Every key with its canonical value, in file order.
    std::vector<std::pair<std::string, std::string>> resolved() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_config_text(const ExperimentConfig& cfg);

/// Materializes a state spec for dimension d. `rng` is used for "haar";
/// `fiducial` anchors "orthogonal".
QState resolve_state(const StateSpec& spec, std::size_t d, Rng& rng,
                     const QState* fiducial = nullptr);

/// Session for a single run (target resolved from the seed when "haar").
SessionConfig make_session_config(const ExperimentConfig& cfg);
/// Ensemble over cfg.runs with per-run Haar targets when target = haar.
EnsembleConfig make_ensemble_config(const ExperimentConfig& cfg, bool with_adversary);
/// Factory for the configured adversary; empty when adversary = none.
AdversaryFactory make_adversary_factory(const ExperimentConfig& cfg);

}  // namespace rqml
