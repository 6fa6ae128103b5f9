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
#include <optional>

#include "rqml/learning.hpp"
#include "rqml/protocol.hpp"

namespace rqml {

// -- intercept-and-resend on the output channel --------------------------------

struct InterceptEveConfig {
    double p_int = 0.0;
    /// |<resent|intercepted>|^2. 2/3 is the optimal single-copy estimate for a
    /// qubit; 4/9 reads the overlap as an amplitude instead.
    double clone_overlap_sq = 2.0 / 3.0;
    /// Run an Eve-side learner and resend her own estimate instead of a
    /// fixed-overlap copy.
    bool eve_learner = false;
    std::size_t eve_memory = 100;

    void validate() const;
};

/// A state psi' with |<psi'|psi>|^2 = overlap_sq: cos(t) psi + sin(t) psi_perp
/// with psi_perp Haar-random in the orthogonal complement.
QState imperfect_copy(const QState& psi, double overlap_sq, Rng& rng);

/// Stateless form of the hook: with probability p_int return an imperfect
/// copy, otherwise the message unchanged.
ChannelMessage intercept_hook(const InterceptEveConfig& cfg, ChannelMessage msg, Rng& rng);

/// Attaches to the output channel and only touches estimation states.
class InterceptEve final : public Adversary {
  public:
    InterceptEve(InterceptEveConfig cfg, std::size_t d, std::uint64_t seed);

    void on_forward_output(ChannelMessage& msg, bool estimation_state, Rng& rng) override;

    std::size_t interceptions() const { return interceptions_; }
    /// Density matrix averaged over every state stolen so far.
    CMatrix mean_intercepted_density() const;

  private:
    InterceptEveConfig cfg_;
    std::size_t d_;
    std::size_t interceptions_ = 0;
    CMatrix rho_sum_;
    GeneratorSet gens_;
    std::optional<LearnerState> learner_;
    QState eve_fiducial_;
};

/// Passive observer of the output channel: keeps the running mean of every
/// state it sees (estimation and blinded alike) and forwards them untouched.
class OutputTap final : public Adversary {
  public:
    explicit OutputTap(std::size_t d);

    void on_forward_output(ChannelMessage& msg, bool estimation_state, Rng& rng) override;

    std::size_t observed() const { return observed_; }
    CMatrix mean_density() const;

  private:
    std::size_t observed_ = 0;
    CMatrix rho_sum_;
};

/// 0.5 * sum |eigenvalues(rho - 1/d)|.
double trace_distance_to_maximally_mixed(const CMatrix& rho);

// -- naive reference tamperer --------------------------------------------------

enum class TamperChannel { AliceToBob, BobToAlice };

/// Measures the reference qubit in {|0>,|1>} and forwards the collapsed state.
ChannelMessage ref_tamper_hook(ChannelMessage msg, Rng& rng);

class RefTamperEve final : public Adversary {
  public:
    explicit RefTamperEve(TamperChannel channel) : channel_(channel) {}

    void on_forward_ref(ChannelMessage& msg, Rng& rng) override;
    void on_return_ref(ChannelMessage& msg, Rng& rng) override;

  private:
    TamperChannel channel_;
};

// -- man in the middle ---------------------------------------------------------

struct MitmEveConfig {
    /// The state Eve steers Alice's device toward.
    QState eve_target = QState::basis(2, 0);
};

/// Eve's reply to a canary: her comparator on (|1>, received output, tau_E)
/// without a controlled-T. Returns the composite she sends back.
QState mitm_canary_response(const MitmEveConfig& cfg, const ChannelMessage& canary_ref,
                            const ChannelMessage& canary_output);

/// Closed-form canary alarm probability (1 - |<chi_A|tau_E>|^2) / 2.
double mitm_alarm_probability(const QState& fiducial, const QState& eve_target);

/// Impersonates Bob on every trial. She cannot tell canaries from learning
/// trials, so she answers all of them with her own comparator.
class MitmEve final : public Adversary {
  public:
    explicit MitmEve(MitmEveConfig cfg) : cfg_(std::move(cfg)) {}

    std::optional<ChannelMessage> answer_in_place_of_bob(const ChannelMessage& ref,
                                                         const ChannelMessage& output,
                                                         Rng& rng) override;

  private:
    MitmEveConfig cfg_;
};

}  // namespace rqml
