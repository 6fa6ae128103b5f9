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

#include <algorithm>
#include <cmath>

#include "rqml/adversary.hpp"
#include "rqml/experiments.hpp"
#include "support.hpp"

using namespace rqml;

namespace {

SessionConfig honest(std::uint64_t seed, std::size_t n_l = 100) {
    SessionConfig s;
    s.n_l = n_l;
    s.seed = seed;
    Rng rng = make_rng(seed, Stream::Target);
    s.target = random_state(2, rng);
    return s;
}

InterceptEveConfig intercept(double p, double overlap = 2.0 / 3.0) {
    InterceptEveConfig c;
    c.p_int = p;
    c.clone_overlap_sq = overlap;
    return c;
}

ChannelMessage output_msg(QState s) { return ChannelMessage{ChannelMode::Output, std::move(s), 0}; }

}  // namespace

TEST_SUITE("adversary") {

TEST_CASE("imperfect copies have exactly the requested overlap") {
    Rng rng = make_rng(1, Stream::Eve);
    for (std::size_t d : {2u, 3u, 4u}) {
        for (double q : {0.0, 4.0 / 9.0, 2.0 / 3.0, 0.9, 1.0}) {
            const QState psi = random_state(d, rng);
            for (int i = 0; i < 10; ++i) {
                CHECK(fidelity(imperfect_copy(psi, q, rng), psi) == doctest::Approx(q).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("intercept hook replaces with probability p_int") {
    Rng rng = make_rng(2, Stream::Eve);
    const QState psi = random_state(2, rng);
    for (int i = 0; i < 1000; ++i) {
        CHECK(intercept_hook(intercept(0.0), output_msg(psi), rng).state.amplitudes() == psi.amplitudes());
        CHECK(fidelity(intercept_hook(intercept(1.0), output_msg(psi), rng).state, psi) ==
              doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    int replaced = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        replaced += intercept_hook(intercept(0.3), output_msg(psi), rng).state.amplitudes() != psi.amplitudes();
    }
    CHECK(std::abs(replaced / static_cast<double>(n) - 0.3) <= 3 * std::sqrt(0.21 / n));
}

TEST_CASE("an idle interceptor leaves sessions identical to honest ones") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        InterceptEve eve(intercept(0.0), 2, seed);
        const SessionResult a = run_session(honest(seed), &eve);
        const SessionResult b = run_session(honest(seed));
        CHECK(a.n_effective == b.n_effective);
        CHECK(a.final_params == b.final_params);
        CHECK(eve.interceptions() == 0);
    }
}

TEST_CASE("a perfect copy does not affect learning") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        InterceptEve eve(intercept(1.0, 1.0), 2, seed);
        const SessionResult a = run_session(honest(seed), &eve);
        const SessionResult b = run_session(honest(seed));
        CHECK(a.n_effective == b.n_effective);
        CHECK(a.epsilon_l == doctest::Approx(b.epsilon_l).epsilon(1e-12));
        CHECK(eve.interceptions() > 0);
    }
}

TEST_CASE("the interceptor only touches estimation states") {
    InterceptEve eve(intercept(1.0), 2, 3);
    Rng rng = make_rng(3, Stream::Eve);
    const QState psi = random_state(2, rng);
    ChannelMessage m = output_msg(psi);
    eve.on_forward_output(m, false, rng);
    CHECK(m.state.amplitudes() == psi.amplitudes());
    CHECK(eve.interceptions() == 0);
    eve.on_forward_output(m, true, rng);
    CHECK(eve.interceptions() == 1);
    CHECK(fidelity(m.state, psi) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("a learning interceptor resends her own estimate") {
    InterceptEveConfig cfg = intercept(1.0);
    cfg.eve_learner = true;
    cfg.eve_memory = 10;
    InterceptEve eve(cfg, 2, 4);
    const SessionResult r = run_session(honest(4, 20), &eve);
    CHECK(eve.interceptions() == r.n_effective);
    InterceptEveConfig bad = cfg;
    bad.eve_memory = 0;
    CHECK_THROWS(bad.validate());
    CHECK_THROWS(intercept(1.5).validate());
    CHECK_THROWS(intercept(0.5, -0.1).validate());
}

TEST_CASE("interception slows learning monotonically") {
    EnsembleConfig e;
    e.session.n_l = 50;
    e.session.max_iterations = 5000000;
    e.runs = 200;
    e.seed = 100;
    double last = 0.0;
    for (double p : {0.0, 0.1, 0.2, 0.3}) {
        if (p > 0.0) {
            e.adversary = [p](std::uint64_t s) { return std::make_unique<InterceptEve>(intercept(p), 2, s); };
        }
        const EnsembleResult r = run_ensemble(e);
        CAPTURE(p);
        CHECK(r.halted_runs == e.runs);
        CHECK(r.n_bar_sim >= last);
        last = r.n_bar_sim;
    }
}

TEST_CASE("intercepted states average to the maximally mixed state within one session") {
    SessionConfig s = honest(1);
    s.max_iterations = 20000;
    InterceptEve eve(intercept(1.0), 2, 1);
    Session session(s, &eve);
    std::vector<double> distances;
    std::size_t next = 1000;
    while (!session.halted() && !session.capped()) {
        session.run_trial();
        if (eve.interceptions() == next) {
            distances.push_back(trace_distance_to_maximally_mixed(eve.mean_intercepted_density()));
            next *= 10;
        }
    }
    REQUIRE(distances.size() >= 2);
    for (double t : distances) CHECK(t <= 0.15);
    CHECK(distances.back() < distances.front());
}

TEST_CASE("intercepted states pooled over sessions with independent targets are mixed") {
    CMatrix rho = CMatrix::Zero(2, 2);
    std::size_t total = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        InterceptEve eve(intercept(0.2), 2, seed);
        (void)run_session(honest(seed), &eve);
        rho += eve.mean_intercepted_density() * static_cast<double>(eve.interceptions());
        total += eve.interceptions();
    }
    REQUIRE(total >= 1000);
    CHECK(trace_distance_to_maximally_mixed(rho / static_cast<double>(total)) <= 0.15);
}

TEST_CASE("trace distance to the maximally mixed state") {
    CHECK(trace_distance_to_maximally_mixed(CMatrix::Identity(2, 2) / 2.0) == doctest::Approx(0.0));
    const CVector z = QState::basis(2, 0).amplitudes();
    CHECK(trace_distance_to_maximally_mixed(z * z.adjoint()) == doctest::Approx(0.5));
    const CVector w = QState::basis(3, 1).amplitudes();
    CHECK(trace_distance_to_maximally_mixed(w * w.adjoint()) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("a Z-measured plus decoy fails M_pm half the time") {
    Rng rng = make_rng(5, Stream::Eve);
    int violations = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const ChannelMessage m = ref_tamper_hook(ChannelMessage{ChannelMode::Ref, QState::plus(), 0}, rng);
        violations += measurement_m_pm(m.state, ReferenceKind::Plus, rng) == PmResult::Violation;
    }
    CHECK(std::abs(violations / static_cast<double>(n) - 0.5) <= 3 * std::sqrt(0.25 / n));
    for (std::size_t c : {0u, 1u}) {
        const ChannelMessage m = ref_tamper_hook(ChannelMessage{ChannelMode::Ref, QState::basis(2, c), 0}, rng);
        CHECK(m.state.amplitudes() == QState::basis(2, c).amplitudes());
    }
}

TEST_CASE("reference tampering is detected quickly on either channel") {
    for (TamperChannel ch : {TamperChannel::AliceToBob, TamperChannel::BobToAlice}) {
        std::vector<double> first;
        int within_50 = 0;
        const int sessions = 1000;
        for (int s = 0; s < sessions; ++s) {
            RefTamperEve eve(ch);
            SessionConfig cfg = honest(static_cast<std::uint64_t>(s + 1));
            const SessionResult r = run_session(cfg, &eve);
            REQUIRE(r.first_alarm_trial.has_value());
            CHECK(r.alarms.canary_violations == 0);
            first.push_back(static_cast<double>(*r.first_alarm_trial + 1));
            within_50 += *r.first_alarm_trial < 50 ? 1 : 0;
        }
        CHECK(within_50 >= 999);
        // Alarms arrive at rate p_dec / 2 per trial: geometric with mean 4.
        double mean = 0.0;
        for (double x : first) mean += x;
        mean /= sessions;
        CHECK(std::abs(mean - 4.0) <= 3.0 * std::sqrt(12.0 / sessions));
    }
}

TEST_CASE("man-in-the-middle canary alarm probability") {
    Rng rng = make_rng(6, Stream::Eve);
    const QState fid = QState::basis(2, 0);
    const ChannelMessage ref{ChannelMode::Ref, QState::basis(2, 1), 0};
    const ChannelMessage out{ChannelMode::Output, fid, 0};
    CHECK(mitm_alarm_probability(fid, fid) == doctest::Approx(0.0));
    CHECK(mitm_alarm_probability(fid, QState::basis(2, 1)) == doctest::Approx(0.5));
    for (int i = 0; i < 50; ++i) {
        const QState te = random_state(2, rng);
        const QState back = mitm_canary_response(MitmEveConfig{te}, ref, out);
        CHECK(ref_probabilities(back)[0] == doctest::Approx(mitm_alarm_probability(fid, te)).epsilon(1e-12));
    }
    CHECK(ref_probabilities(mitm_canary_response(MitmEveConfig{fid}, ref, out))[0] <= 1e-12);

    double alarms = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const QState back = mitm_canary_response(MitmEveConfig{random_state(2, rng)}, ref, out);
        alarms += measure_ref_qubit(back, rng).outcome == 0 ? 1 : 0;
    }
    CHECK(std::abs(alarms / n - 0.25) <= 0.02);
}

TEST_CASE("a man in the middle trips canaries in hardened sessions only") {
    const MitmEveConfig orth{QState::basis(2, 1)};
    std::uint64_t canaries = 0;
    std::uint64_t alarms = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        SessionConfig s = honest(seed, 30);
        s.hardened = true;
        MitmEve eve(orth);
        const SessionResult r = run_session(s, &eve);
        canaries += r.canary_trials;
        alarms += r.alarms.canary_violations;

        SessionConfig p = honest(seed, 30);
        MitmEve eve2(orth);
        const SessionResult q = run_session(p, &eve2);
        CHECK(q.canary_trials == 0);
        CHECK(q.alarms.canary_violations == 0);
    }
    REQUIRE(canaries > 1000);
    const double rate = static_cast<double>(alarms) / static_cast<double>(canaries);
    CHECK(std::abs(rate - 0.5) <= 3 * std::sqrt(0.25 / static_cast<double>(canaries)));
}

}  // TEST_SUITE
