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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rqml/protocol.hpp"

namespace rqml {

/// Builds a fresh attacker for one run; the argument is that run's seed.
using AdversaryFactory = std::function<std::unique_ptr<Adversary>(std::uint64_t run_seed)>;

struct EnsembleConfig {
    /// Template for every run. seed and (when random_target) target are
    /// replaced per run.
    SessionConfig session;
    std::size_t runs = 1000;
    std::uint64_t seed = 0;
    bool random_target = true;
    AdversaryFactory adversary;
};

/// Run r uses seed + r, and a Haar target drawn from that seed.
SessionConfig session_for_run(const EnsembleConfig& cfg, std::size_t run);

/// Empirical learning / survival probabilities over halted runs.
class SurvivalCurve {
  public:
    SurvivalCurve(std::size_t n_l, std::vector<std::uint64_t> halting_n);

    std::size_t n_l() const { return n_l_; }
    std::size_t runs() const { return n_.size(); }
    const std::vector<std::uint64_t>& n_values() const { return n_; }
    /// P_L(n): fraction of runs halted at or before n.
    double learning_probability(std::uint64_t n) const;
    /// P_S(n) = 1 - P_L(n).
    double survival_probability(std::uint64_t n) const;
    /// Sorted distinct halting counts (where the EDF steps).
    std::vector<std::uint64_t> steps() const;

  private:
    std::size_t n_l_;
    std::vector<std::uint64_t> n_;
};

struct EnsembleResult {
    std::vector<SessionResult> sessions;
    SurvivalCurve curve{1, {}};
    std::size_t halted_runs = 0;
    std::size_t capped_runs = 0;
    /// Means over halted runs.
    double n_bar_sim = 0.0;
    double mean_epsilon = 0.0;
    std::vector<std::string> warnings;
};

/// Runs in parallel (OpenMP); threads <= 0 uses the OpenMP default.
EnsembleResult run_ensemble(const EnsembleConfig& cfg, int threads = 0);
/// Serial reference; bitwise-identical results to run_ensemble.
EnsembleResult run_ensemble_serial(const EnsembleConfig& cfg);

enum class FitModel { ExpDecay, PowerLaw };

struct FitResult {
    FitModel model = FitModel::ExpDecay;
    /// ExpDecay: characteristic constant and derived mean n_c + N_L.
    double n_c = 0.0;
    double n_bar = 0.0;
    /// PowerLaw: y = coefficient * x^exponent.
    double coefficient = 0.0;
    double exponent = 0.0;
    double r_squared = 0.0;
    /// Range of the abscissa actually used.
    double window_lo = 0.0;
    double window_hi = 0.0;
    std::size_t points = 0;
};

class FitUnavailable : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Least squares of ln P_S(n) = -(n + 1 - N_L) / n_c over the steps where
/// P_S >= max(0.02, 10 / runs).
FitResult fit_survival_exponential(const SurvivalCurve& curve);

/// Log-log least squares of y = c x^e.
FitResult fit_power_law(std::span<const double> x, std::span<const double> y);

/// Nearest-rank quantile of a sample.
std::uint64_t quantile(std::vector<std::uint64_t> values, double q);

struct CalibrationReport {
    std::size_t runs = 0;
    std::optional<FitResult> fit;
    double n_bar_sim = 0.0;
    double mean_epsilon = 0.0;
    double threshold_quantile = 0.99;
    /// Late-learning alarm: sessions needing more effective iterations than
    /// this are flagged.
    std::uint64_t threshold = 0;
    double false_alarm_rate = 0.0;
    EnsembleResult baseline;
};

CalibrationReport calibrate_baseline(const EnsembleConfig& honest, int threads = 0,
                                     double threshold_quantile = 0.99);

/// Fraction of sessions whose effective iteration count exceeds the
/// threshold; sessions that hit the cap count as exceeding.
double exceedance_fraction(std::span<const SessionResult> sessions, std::uint64_t threshold);

struct MemorySweepRow {
    std::size_t n_l = 0;
    std::optional<FitResult> fit;
    double n_bar_sim = 0.0;
    double mean_epsilon = 0.0;
    std::size_t runs = 0;
    std::size_t halted = 0;
};

struct ScalingFits {
    std::optional<FitResult> time;       // n_bar_sim = c1 N_L^alpha
    std::optional<FitResult> error;      // eps_L = c2 N_L^-beta
    std::optional<FitResult> trade_off;  // eps_L = c n_bar^exponent
};

ScalingFits fit_scaling(std::span<const MemorySweepRow> rows);

}  // namespace rqml
