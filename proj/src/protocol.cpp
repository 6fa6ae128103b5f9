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

#include "rqml/protocol.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include "rqml/kernels.hpp"

namespace rqml {

std::string_view to_string(ReferenceKind kind) {
    switch (kind) {
        case ReferenceKind::C0: return "c0";
        case ReferenceKind::C1: return "c1";
        case ReferenceKind::Plus: return "plus";
        case ReferenceKind::Minus: return "minus";
    }
    return "?";
}

void Adversary::on_forward_ref(ChannelMessage&, Rng&) {}
void Adversary::on_forward_output(ChannelMessage&, bool, Rng&) {}
std::optional<ChannelMessage> Adversary::answer_in_place_of_bob(const ChannelMessage&,
                                                                const ChannelMessage&, Rng&) {
    return std::nullopt;
}
void Adversary::on_return_ref(ChannelMessage&, Rng&) {}

void SessionConfig::validate() const {
    if (d < 2) throw DimensionError("d must be at least 2");
    if (n_l == 0) throw std::invalid_argument("N_L must be positive");
    if (fiducial.dim() != d) throw DimensionError("fiducial dimension does not match d");
    if (target.dim() != d) throw DimensionError("target dimension does not match d");
    if (!(decoy_probability >= 0.0 && decoy_probability < 1.0)) {
        throw std::invalid_argument("decoy probability must lie in [0, 1)");
    }
    if (hardened && !(canary_probability >= 0.0 && canary_probability < 1.0)) {
        throw std::invalid_argument("canary probability must lie in [0, 1)");
    }
    if (max_iterations != 0 && max_iterations < n_l) {
        throw std::invalid_argument("max_iterations must be at least N_L");
    }
    if (initial_params && static_cast<std::size_t>(initial_params->size()) != d * d - 1) {
        throw DimensionError("initial parameter vector must have d^2 - 1 entries");
    }
}

std::uint64_t SessionConfig::effective_max_iterations() const {
    if (max_iterations != 0) return max_iterations;
    return static_cast<std::uint64_t>(std::ceil(100.0 * std::pow(static_cast<double>(n_l), 1.5)));
}

PmResult measurement_m_pm(const QState& returned_ref, ReferenceKind expected, Rng& rng) {
    if (expected != ReferenceKind::Plus && expected != ReferenceKind::Minus) {
        throw std::invalid_argument("M_pm expects a Plus or Minus reference");
    }
    CVector amps = returned_ref.amplitudes();
    kernels::apply_ref_gate({amps.data(), static_cast<std::size_t>(amps.size())},
                            kernels::hadamard_gate());
    const int outcome = measure_ref_qubit(QState::normalized(std::move(amps)), rng).outcome;
    const ReferenceKind seen = outcome == 0 ? ReferenceKind::Plus : ReferenceKind::Minus;
    return seen == expected ? PmResult::Ok : PmResult::Violation;
}

// -- Alice -------------------------------------------------------------------

namespace {

LearnerState initial_learner(const Alice::Config& cfg, Rng& rng) {
    LearnerState s = make_learner(cfg.d * cfg.d - 1, cfg.n_l, cfg.learner, rng);
    if (cfg.initial_params) s.params = *cfg.initial_params;
    return s;
}

ParamVector random_params(std::size_t count, Rng& rng) {
    ParamVector r(static_cast<Eigen::Index>(count));
    for (Eigen::Index j = 0; j < r.size(); ++j) {
        r(j) = uniform(rng, -std::numbers::pi, std::numbers::pi);
    }
    return r;
}

}  // namespace

Alice::Alice(Config cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      gens_(build_generators(cfg_.d)),
      rng_(make_rng(seed, Stream::Alice)),
      learner_(initial_learner(cfg_, rng_)),
      estimate_(unitary_from_params(learner_.params, gens_).apply(cfg_.fiducial)) {}

Alice::Prepared Alice::prepare(std::uint64_t trial_id) {
    ReferenceKind kind;
    std::optional<QState> output;
    if (bernoulli(rng_, cfg_.decoy_probability)) {
        kind = bernoulli(rng_, 0.5) ? ReferenceKind::Minus : ReferenceKind::Plus;
        const ParamVector r_h = random_params(gens_.size(), rng_);
        output = unitary_from_params(r_h, gens_).apply(cfg_.fiducial);
    } else if (cfg_.hardened) {
        if (bernoulli(rng_, cfg_.canary_probability)) {
            kind = ReferenceKind::C1;
            output = cfg_.fiducial;
        } else {
            kind = ReferenceKind::C0;
        }
    } else {
        kind = bernoulli(rng_, 0.5) ? ReferenceKind::C1 : ReferenceKind::C0;
    }
    if (!output) output = estimate_;

    QState ref = [&] {
        switch (kind) {
            case ReferenceKind::C0: return QState::basis(2, 0);
            case ReferenceKind::C1: return QState::basis(2, 1);
            case ReferenceKind::Plus: return QState::plus();
            case ReferenceKind::Minus: break;
        }
        return QState::minus();
    }();
    return Prepared{kind, ChannelMessage{ChannelMode::Ref, std::move(ref), trial_id},
                    ChannelMessage{ChannelMode::Output, std::move(*output), trial_id}};
}

TrialOutcome Alice::check(ReferenceKind kind, const ChannelMessage& returned, Rng& nature) {
    TrialOutcome out{kind, 0, false, std::nullopt};
    if (kind == ReferenceKind::Plus || kind == ReferenceKind::Minus) {
        out.alarm = measurement_m_pm(returned.state, kind, nature) == PmResult::Violation;
        const bool saw_plus = (kind == ReferenceKind::Plus) != out.alarm;
        out.measured = saw_plus ? 0 : 1;
        return out;
    }
    if (kind == ReferenceKind::C1 && cfg_.hardened) {
        // Canary: read before any flip; an honest Bob returns |1>.
        out.measured = measure_ref_qubit(returned.state, nature).outcome;
        out.alarm = out.measured == 0;
        return out;
    }
    CVector amps = returned.state.amplitudes();
    if (kind == ReferenceKind::C1) {
        kernels::apply_ref_gate({amps.data(), static_cast<std::size_t>(amps.size())},
                                kernels::x_gate());
    }
    out.measured = measure_ref_qubit(QState::normalized(std::move(amps)), nature).outcome;
    out.learning = out.measured == 1 ? Outcome::Fail : Outcome::NotFail;
    learner_ = record_and_update(std::move(learner_), *out.learning, rng_);
    if (*out.learning == Outcome::Fail) {
        estimate_ = unitary_from_params(learner_.params, gens_).apply(cfg_.fiducial);
    }
    return out;
}

// -- Bob ---------------------------------------------------------------------

Bob::Bob(BobModuleConfig cfg, Engine engine) : cfg_(std::move(cfg)), engine_(engine) {
    cfg_.validate();
}

ChannelMessage Bob::respond(const ChannelMessage& ref, const ChannelMessage& output,
                            Rng& nature) const {
    if (engine_ == Engine::Fast) {
        // A computational-basis reference leaves the returned qubit diagonal
        // in Z, so sampling the basis state is exact in distribution.
        for (int c = 0; c < 2; ++c) {
            if (std::norm(ref.state[static_cast<std::size_t>(c)]) < 1.0 - 1e-12) continue;
            if (cfg_.hardened && c == 1) break;
            const double f = fidelity(cfg_.target, output.state);
            const int corrected = bernoulli(nature, outcome_prob(f, 0)) ? 0 : 1;
            return ChannelMessage{ChannelMode::Ref, QState::basis(2, static_cast<std::size_t>(corrected ^ c)),
                                  ref.trial_id};
        }
    }
    const QState pair = tensor(ref.state, output.state);
    return ChannelMessage{ChannelMode::Ref, apply_bob_module(cfg_, pair), ref.trial_id};
}

// -- Session -----------------------------------------------------------------

namespace {

Alice::Config alice_config(const SessionConfig& cfg) {
    return Alice::Config{cfg.d, cfg.n_l, cfg.fiducial, cfg.decoy_probability, cfg.hardened,
                         cfg.canary_probability, cfg.learner, cfg.initial_params};
}

BobModuleConfig bob_config(const SessionConfig& cfg) {
    BobModuleConfig b{cfg.d, cfg.hardened, cfg.target, std::nullopt};
    if (cfg.hardened) {
        b.task_unitary = task_unitary_between(cfg.fiducial, cfg.target);
        b.check_task_unitary(cfg.fiducial);
    }
    return b;
}

const SessionConfig& validated(const SessionConfig& cfg) {
    cfg.validate();
    return cfg;
}

}  // namespace

Session::Session(SessionConfig cfg, Adversary* adversary)
    : cfg_(validated(cfg)),
      alice_(alice_config(cfg_), cfg_.seed),
      bob_(bob_config(cfg_), cfg_.engine),
      adversary_(adversary),
      nature_(make_rng(cfg_.seed, Stream::Nature)),
      eve_rng_(make_rng(cfg_.seed, Stream::Eve)) {}

bool Session::capped() const { return result_.n_effective >= cfg_.effective_max_iterations(); }

double Session::oracle_fidelity() const { return fidelity(cfg_.target, alice_.estimation_state()); }

TrialOutcome Session::run_trial() {
    const std::uint64_t id = result_.total_trials;
    Alice::Prepared p = alice_.prepare(id);
    const bool canary = cfg_.hardened && p.kind == ReferenceKind::C1;
    const bool decoy = p.kind == ReferenceKind::Plus || p.kind == ReferenceKind::Minus;

    if (adversary_ != nullptr) {
        adversary_->on_forward_ref(p.ref, eve_rng_);
        adversary_->on_forward_output(p.output, !decoy && !canary, eve_rng_);
    }
    if (p.ref.state.dim() != 2 || p.output.state.dim() != cfg_.d) {
        throw ProtocolError("forward channel delivered a state of the wrong dimension");
    }

    std::optional<ChannelMessage> returned;
    if (adversary_ != nullptr) returned = adversary_->answer_in_place_of_bob(p.ref, p.output, eve_rng_);
    if (!returned) returned = bob_.respond(p.ref, p.output, nature_);
    if (adversary_ != nullptr) adversary_->on_return_ref(*returned, eve_rng_);
    if (returned->state.dim() % 2 != 0) {
        throw ProtocolError("return channel delivered a state without a reference qubit");
    }

    const double f_before = cfg_.record_trace ? oracle_fidelity() : 0.0;
    TrialOutcome out = alice_.check(p.kind, *returned, nature_);

    ++result_.total_trials;
    if (decoy) ++result_.decoy_trials;
    if (canary) ++result_.canary_trials;
    if (out.learning) ++result_.n_effective;
    if (out.alarm) {
        if (decoy) ++result_.alarms.m_pm_violations;
        if (canary) ++result_.alarms.canary_violations;
        if (!result_.first_alarm_trial) result_.first_alarm_trial = id;
        if (canary && !result_.canaries_to_first_alarm) {
            result_.canaries_to_first_alarm = result_.canary_trials;
        }
    }
    if (cfg_.record_trace) {
        const LearnerState& l = alice_.learner();
        result_.trace.push_back(TrialRecord{id, p.kind, out.measured, out.alarm,
                                            out.learning.has_value(), l.memory.fails(),
                                            out.learning ? l.last_coefficient : 0.0, f_before});
    }
    return out;
}

SessionResult Session::finish() && {
    result_.halted = alice_.halted();
    result_.epsilon_l = std::min(1.0, std::max(0.0, 1.0 - oracle_fidelity()));
    result_.final_params = alice_.learner().params;
    return std::move(result_);
}

SessionResult run_session(const SessionConfig& cfg, Adversary* adversary) {
    Session s(cfg, adversary);
    std::optional<std::string> error;
    try {
        while (!s.halted() && !s.capped()) s.run_trial();
    } catch (const ProtocolError& e) {
        error = e.what();
    }
    SessionResult r = std::move(s).finish();
    r.protocol_error = std::move(error);
    if (r.protocol_error) r.halted = false;
    return r;
}

}  // namespace rqml
