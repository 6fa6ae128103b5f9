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

#include <cmath>
#include <deque>
#include <numbers>

#include "rqml/learning.hpp"

using namespace rqml;

namespace {

constexpr double kPi = std::numbers::pi;

LearnerState learner(std::size_t capacity, bool wrap = true, std::uint64_t seed = 1) {
    Rng rng = make_rng(seed, Stream::Alice);
    LearnerOptions opts;
    opts.wrap_params = wrap;
    return make_learner(3, capacity, opts, rng);
}

}  // namespace

TEST_SUITE("learning") {

TEST_CASE("FIFO memory keeps the newest entries and consistent counts") {
    FifoMemory m(3);
    CHECK(m.size() == 0);
    m.push(Outcome::Fail);
    m.push(Outcome::NotFail);
    m.push(Outcome::NotFail);
    CHECK(m.full());
    CHECK(m.fails() == 1);
    m.push(Outcome::NotFail);
    CHECK(m.size() == 3);
    CHECK(m.fails() == 0);
    CHECK(m.entries().back() == Outcome::NotFail);
    CHECK_THROWS_AS(FifoMemory(0), std::invalid_argument);
}

TEST_CASE("FIFO memory agrees with a plain deque over random pushes") {
    Rng rng = make_rng(2, Stream::Nature);
    for (std::size_t cap : {1u, 4u, 17u}) {
        FifoMemory m(cap);
        std::deque<Outcome> ref;
        for (int i = 0; i < 500; ++i) {
            const Outcome o = bernoulli(rng, 0.3) ? Outcome::Fail : Outcome::NotFail;
            m.push(o);
            ref.push_back(o);
            if (ref.size() > cap) ref.pop_front();
            std::size_t fails = 0;
            for (Outcome x : ref) fails += x == Outcome::Fail ? 1 : 0;
            REQUIRE(m.size() == ref.size());
            REQUIRE(m.fails() == fails);
            REQUIRE(m.fails() + m.not_fails() == m.size());
            REQUIRE(m.entries() == ref);
        }
    }
}

TEST_CASE("a not-fail leaves the parameters bitwise unchanged") {
    LearnerState s = learner(10);
    Rng rng = make_rng(3, Stream::Alice);
    const ParamVector before = s.params;
    s = record_and_update(std::move(s), Outcome::NotFail, rng);
    CHECK(s.params == before);
    CHECK(s.iteration == 1);
    CHECK(s.last_coefficient == 0.0);
}

TEST_CASE("an all-fail memory takes a full-scale step") {
    LearnerState s = learner(4, false);
    Rng rng = make_rng(4, Stream::Alice);
    for (int i = 0; i < 4; ++i) s = record_and_update(std::move(s), Outcome::Fail, rng);
    CHECK(s.last_coefficient == 1.0);
}

TEST_CASE("hand-traced FIFO eviction gives coefficient 2/4") {
    LearnerState s = learner(4, false);
    Rng rng = make_rng(5, Stream::Alice);
    for (Outcome o : {Outcome::Fail, Outcome::Fail, Outcome::NotFail, Outcome::NotFail}) {
        s = record_and_update(std::move(s), o, rng);
    }
    const ParamVector before = s.params;
    Rng replay = rng;
    s = record_and_update(std::move(s), Outcome::Fail, rng);
    CHECK(s.memory.fails() == 2);
    CHECK(s.memory.not_fails() == 2);
    CHECK(s.last_coefficient == 0.5);
    for (Eigen::Index j = 0; j < before.size(); ++j) {
        CHECK(s.params(j) == before(j) + 0.5 * uniform(replay, -kPi, kPi));
    }
}

TEST_CASE("counts are taken after the push while the memory is filling") {
    LearnerState s = learner(10, false);
    Rng rng = make_rng(6, Stream::Alice);
    s = record_and_update(std::move(s), Outcome::Fail, rng);
    CHECK(s.last_coefficient == 1.0);
    s = record_and_update(std::move(s), Outcome::NotFail, rng);
    s = record_and_update(std::move(s), Outcome::Fail, rng);
    CHECK(s.last_coefficient == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("step size is bounded by the fail fraction times the half-width") {
    Rng rng = make_rng(7, Stream::Alice);
    Rng outcomes = make_rng(7, Stream::Nature);
    LearnerState s = learner(8, false);
    for (int i = 0; i < 2000; ++i) {
        const Outcome o = bernoulli(outcomes, 0.4) ? Outcome::Fail : Outcome::NotFail;
        const ParamVector before = s.params;
        s = record_and_update(std::move(s), o, rng);
        const double bound = s.last_coefficient * s.options.step_halfwidth;
        REQUIRE((s.params - before).cwiseAbs().maxCoeff() <= bound + 1e-15);
        REQUIRE(s.iteration == static_cast<std::uint64_t>(i + 1));
    }
}

TEST_CASE("replacing one fail by a not-fail lowers the coefficient") {
    for (std::size_t n_l : {2u, 5u, 20u}) {
        for (std::size_t fails = 1; fails <= n_l; ++fails) {
            LearnerState a = learner(n_l, false);
            LearnerState b = learner(n_l, false);
            Rng ra = make_rng(8, Stream::Alice);
            Rng rb = make_rng(8, Stream::Alice);
            // Same contents except one early entry; the final push is a fail in both.
            for (std::size_t i = 0; i + 1 < n_l; ++i) {
                const bool fail_a = i < fails - 1;
                const bool fail_b = i < fails - 1 && i != 0;
                a = record_and_update(std::move(a), fail_a ? Outcome::Fail : Outcome::NotFail, ra);
                b = record_and_update(std::move(b), fail_b ? Outcome::Fail : Outcome::NotFail, rb);
            }
            a = record_and_update(std::move(a), Outcome::Fail, ra);
            b = record_and_update(std::move(b), Outcome::Fail, rb);
            if (fails >= 2) {
                CHECK(b.last_coefficient < a.last_coefficient);
            } else {
                CHECK(b.last_coefficient == a.last_coefficient);
            }
        }
    }
}

TEST_CASE("wrapping keeps every parameter in [-pi, pi]") {
    Rng rng = make_rng(9, Stream::Alice);
    LearnerState s = learner(3, true);
    for (int i = 0; i < 5000; ++i) {
        s = record_and_update(std::move(s), Outcome::Fail, rng);
        REQUIRE(s.params.maxCoeff() <= kPi);
        REQUIRE(s.params.minCoeff() >= -kPi);
    }
}

TEST_CASE("without wrapping the parameters drift freely") {
    Rng rng = make_rng(10, Stream::Alice);
    LearnerState s = learner(3, false);
    double max_abs = 0.0;
    for (int i = 0; i < 5000; ++i) {
        s = record_and_update(std::move(s), Outcome::Fail, rng);
        max_abs = std::max(max_abs, s.params.cwiseAbs().maxCoeff());
    }
    CHECK(max_abs > kPi);
}

TEST_CASE("wrap_angle") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(kPi) == doctest::Approx(-kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(-kPi));
    CHECK(wrap_angle(3 * kPi + 0.5) == doctest::Approx(-kPi + 0.5));
    CHECK(wrap_angle(-7.0) == doctest::Approx(-7.0 + 2 * kPi));
    for (double x = -50.0; x < 50.0; x += 0.37) {
        const double w = wrap_angle(x);
        CHECK(w >= -kPi);
        CHECK(w < kPi);
        CHECK(std::abs(std::remainder(w - x, 2 * kPi)) <= 1e-12);
    }
}

TEST_CASE("halting condition") {
    LearnerState s = learner(5);
    Rng rng = make_rng(11, Stream::Alice);
    for (int i = 0; i < 4; ++i) s = record_and_update(std::move(s), Outcome::NotFail, rng);
    CHECK_FALSE(halted(s));
    s = record_and_update(std::move(s), Outcome::NotFail, rng);
    CHECK(halted(s));

    LearnerState t = learner(5);
    t = record_and_update(std::move(t), Outcome::Fail, rng);
    for (int i = 0; i < 4; ++i) t = record_and_update(std::move(t), Outcome::NotFail, rng);
    CHECK(t.memory.full());
    CHECK_FALSE(halted(t));
    t = record_and_update(std::move(t), Outcome::NotFail, rng);
    CHECK(halted(t));
}

TEST_CASE("same seed and outcome sequence give the same trajectory") {
    auto trajectory = [](std::uint64_t seed) {
        Rng rng = make_rng(seed, Stream::Alice);
        Rng outcomes = make_rng(99, Stream::Nature);
        LearnerState s = make_learner(8, 6, LearnerOptions{}, rng);
        std::vector<ParamVector> out;
        for (int i = 0; i < 300; ++i) {
            s = record_and_update(std::move(s), bernoulli(outcomes, 0.5) ? Outcome::Fail : Outcome::NotFail, rng);
            out.push_back(s.params);
        }
        return out;
    };
    CHECK(trajectory(12) == trajectory(12));
    CHECK(trajectory(12) != trajectory(13));
}

TEST_CASE("initial parameters are uniform on [-pi, pi]") {
    Rng rng = make_rng(14, Stream::Alice);
    const LearnerState s = make_learner(20000, 1, LearnerOptions{}, rng);
    CHECK(s.params.maxCoeff() <= kPi);
    CHECK(s.params.minCoeff() >= -kPi);
    CHECK(std::abs(s.params.mean()) <= 0.05);
    // Var of U(-pi, pi) is pi^2 / 3.
    const double var = (s.params.array() - s.params.mean()).square().mean();
    CHECK(var == doctest::Approx(kPi * kPi / 3).epsilon(0.03));
    LearnerOptions bad;
    bad.step_halfwidth = 0.0;
    CHECK_THROWS_AS(make_learner(3, 1, bad, rng), std::invalid_argument);
}

}  // TEST_SUITE
