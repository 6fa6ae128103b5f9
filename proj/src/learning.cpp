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

#include "rqml/learning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rqml {

FifoMemory::FifoMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("FIFO memory capacity must be positive");
}

void FifoMemory::push(Outcome outcome) {
    if (entries_.size() == capacity_) {
        if (entries_.front() == Outcome::Fail) --fails_;
        entries_.pop_front();
    }
    entries_.push_back(outcome);
    if (outcome == Outcome::Fail) ++fails_;
}

double wrap_angle(double x) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(x + std::numbers::pi, two_pi);
    if (r < 0.0) r += two_pi;
    return r - std::numbers::pi;
}

LearnerState make_learner(std::size_t param_count, std::size_t memory_capacity,
                          const LearnerOptions& options, Rng& rng) {
    if (!(options.step_halfwidth > 0.0)) {
        throw std::invalid_argument("step half-width must be positive");
    }
    ParamVector a(static_cast<Eigen::Index>(param_count));
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        a(j) = uniform(rng, -std::numbers::pi, std::numbers::pi);
    }
    return LearnerState{std::move(a), FifoMemory(memory_capacity), 0, options, 0.0};
}

LearnerState record_and_update(LearnerState state, Outcome outcome, Rng& rng) {
    state.memory.push(outcome);
    ++state.iteration;
    if (outcome == Outcome::NotFail) {
        state.last_coefficient = 0.0;
        return state;
    }
    const std::size_t n = std::min(state.memory.capacity(), state.memory.size());
    const double coefficient =
        static_cast<double>(state.memory.fails()) / static_cast<double>(n);
    const double delta = state.options.step_halfwidth;
    for (Eigen::Index j = 0; j < state.params.size(); ++j) {
        double next = state.params(j) + coefficient * uniform(rng, -delta, delta);
        if (state.options.wrap_params) next = wrap_angle(next);
        state.params(j) = next;
    }
    state.last_coefficient = coefficient;
    return state;
}

bool halted(const LearnerState& state) {
    return state.memory.full() && state.memory.fails() == 0;
}

}  // namespace rqml
