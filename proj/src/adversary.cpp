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

#include "rqml/adversary.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rqml/gate_module.hpp"

namespace rqml {

void InterceptEveConfig::validate() const {
    if (!(p_int >= 0.0 && p_int <= 1.0)) throw std::invalid_argument("p_int must lie in [0, 1]");
    if (!(clone_overlap_sq >= 0.0 && clone_overlap_sq <= 1.0)) {
        throw std::invalid_argument("clone_overlap_sq must lie in [0, 1]");
    }
    if (eve_learner && eve_memory == 0) throw std::invalid_argument("eve_memory must be positive");
}

QState imperfect_copy(const QState& psi, double overlap_sq, Rng& rng) {
    const QState perp = random_orthogonal_state(psi, rng);
    const double c = std::sqrt(overlap_sq);
    const double s = std::sqrt(1.0 - overlap_sq);
    return QState::normalized(c * psi.amplitudes() + s * perp.amplitudes());
}

ChannelMessage intercept_hook(const InterceptEveConfig& cfg, ChannelMessage msg, Rng& rng) {
    if (bernoulli(rng, cfg.p_int)) {
        msg.state = imperfect_copy(msg.state, cfg.clone_overlap_sq, rng);
    }
    return msg;
}

InterceptEve::InterceptEve(InterceptEveConfig cfg, std::size_t d, std::uint64_t seed)
    : cfg_(cfg),
      d_(d),
      rho_sum_(CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))),
      gens_(build_generators(d)),
      eve_fiducial_(QState::basis(d, 0)) {
    cfg_.validate();
    if (cfg_.eve_learner) {
        Rng init = make_rng(seed, Stream::Eve);
        learner_ = make_learner(d * d - 1, cfg_.eve_memory, LearnerOptions{}, init);
    }
}

void InterceptEve::on_forward_output(ChannelMessage& msg, bool estimation_state, Rng& rng) {
    if (!estimation_state || !bernoulli(rng, cfg_.p_int)) return;
    ++interceptions_;
    const CVector& a = msg.state.amplitudes();
    rho_sum_ += a * a.adjoint();
    if (!learner_) {
        msg.state = imperfect_copy(msg.state, cfg_.clone_overlap_sq, rng);
        return;
    }
    // Eve compares the stolen state with her own estimate (swap-test
    // statistics), updates, and sends her estimate on.
    const QState estimate = unitary_from_params(learner_->params, gens_).apply(eve_fiducial_);
    const double f = fidelity(estimate, msg.state);
    const Outcome o = bernoulli(rng, outcome_prob(f, 0)) ? Outcome::NotFail : Outcome::Fail;
    learner_ = record_and_update(std::move(*learner_), o, rng);
    msg.state = unitary_from_params(learner_->params, gens_).apply(eve_fiducial_);
}

CMatrix InterceptEve::mean_intercepted_density() const {
    if (interceptions_ == 0) return rho_sum_;
    return rho_sum_ / static_cast<double>(interceptions_);
}

OutputTap::OutputTap(std::size_t d)
    : rho_sum_(CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))) {}

void OutputTap::on_forward_output(ChannelMessage& msg, bool, Rng&) {
    const CVector& a = msg.state.amplitudes();
    rho_sum_ += a * a.adjoint();
    ++observed_;
}

CMatrix OutputTap::mean_density() const {
    if (observed_ == 0) return rho_sum_;
    return rho_sum_ / static_cast<double>(observed_);
}

double trace_distance_to_maximally_mixed(const CMatrix& rho) {
    const auto n = rho.rows();
    const CMatrix diff = rho - CMatrix::Identity(n, n) / static_cast<double>(n);
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(diff);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

ChannelMessage ref_tamper_hook(ChannelMessage msg, Rng& rng) {
    msg.state = measure_ref_qubit(msg.state, rng).collapsed;
    return msg;
}

void RefTamperEve::on_forward_ref(ChannelMessage& msg, Rng& rng) {
    if (channel_ == TamperChannel::AliceToBob) msg = ref_tamper_hook(std::move(msg), rng);
}

void RefTamperEve::on_return_ref(ChannelMessage& msg, Rng& rng) {
    if (channel_ == TamperChannel::BobToAlice) msg = ref_tamper_hook(std::move(msg), rng);
}

QState mitm_canary_response(const MitmEveConfig& cfg, const ChannelMessage& canary_ref,
                            const ChannelMessage& canary_output) {
    return apply_comparator(tensor(canary_ref.state, canary_output.state), cfg.eve_target);
}

double mitm_alarm_probability(const QState& fiducial, const QState& eve_target) {
    return swap_test_flip_probability(fiducial, eve_target);
}

std::optional<ChannelMessage> MitmEve::answer_in_place_of_bob(const ChannelMessage& ref,
                                                              const ChannelMessage& output, Rng&) {
    if (output.state.dim() != cfg_.eve_target.dim()) {
        throw DimensionError("Eve's target dimension does not match the intercepted output");
    }
    return ChannelMessage{ChannelMode::Ref, mitm_canary_response(cfg_, ref, output), ref.trial_id};
}

}  // namespace rqml
