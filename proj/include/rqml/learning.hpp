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
#include <deque>
#include <numbers>

#include "rqml/qmath.hpp"

namespace rqml {

enum class Outcome : std::uint8_t { NotFail, Fail };

/// Bounded first-in-first-out record of fail / not-fail results. Pushing into a
/// full memory evicts the oldest entry.
class FifoMemory {
  public:
    explicit FifoMemory(std::size_t capacity);

    void push(Outcome outcome);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t fails() const { return fails_; }
    std::size_t not_fails() const { return entries_.size() - fails_; }
    bool full() const { return entries_.size() == capacity_; }
    const std::deque<Outcome>& entries() const { return entries_; }

  private:
    std::size_t capacity_;
    std::size_t fails_ = 0;
    std::deque<Outcome> entries_;
};

struct LearnerOptions {
    /// Half-width of the uniform box the random step r_l is drawn from.
    double step_halfwidth = std::numbers::pi;
    /// Reduce each parameter into [-pi, pi] after an update.
    bool wrap_params = true;
};

struct LearnerState {
    ParamVector params;
    FifoMemory memory;
    std::uint64_t iteration = 0;
    LearnerOptions options;
    /// N_F / N applied by the most recent update, 0 after a not-fail.
    double last_coefficient = 0.0;
};

/// Fresh learner with parameters uniform on [-pi, pi].
LearnerState make_learner(std::size_t param_count, std::size_t memory_capacity,
                          const LearnerOptions& options, Rng& rng);

/// Push the outcome, then on a fail move params by (N_F / N) r_l with
/// N = min(N_L, N_F + N_nF) counted after the push.
LearnerState record_and_update(LearnerState state, Outcome outcome, Rng& rng);

/// Memory full and free of fails.
bool halted(const LearnerState& state);

/// Maps x into [-pi, pi).
double wrap_angle(double x);

}  // namespace rqml
