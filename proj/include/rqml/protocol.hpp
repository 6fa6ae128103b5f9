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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rqml/gate_module.hpp"
#include "rqml/learning.hpp"
#include "rqml/qmath.hpp"

namespace rqml {

/// Reference states |0>, |1>, |+>, |->. C0/C1 drive learning, Plus/Minus are
/// decoys; in hardened mode C1 trials are canaries.
enum class ReferenceKind : std::uint8_t { C0, C1, Plus, Minus };

std::string_view to_string(ReferenceKind kind);

class ProtocolError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ChannelMode : std::uint8_t { Ref, Output };

/// A state in flight on one of the three one-way channels. On the return
/// channel the state is the full composite with the reference qubit leading;
/// only that qubit is addressable by anyone along the way.
struct ChannelMessage {
    ChannelMode mode;
    QState state;
    std::uint64_t trial_id;
};

/// Everything a third party can attach to. Default implementations pass
/// messages through untouched.
class Adversary {
  public:
    virtual ~Adversary() = default;
    virtual void on_forward_ref(ChannelMessage& msg, Rng& rng);
    /// `estimation_state` is only meaningful to an attacker granted the
    /// ability to tell Alice's learning outputs from blinded ones.
    virtual void on_forward_output(ChannelMessage& msg, bool estimation_state, Rng& rng);
    /// Returning a value replaces Bob entirely for this trial.
    virtual std::optional<ChannelMessage> answer_in_place_of_bob(const ChannelMessage& ref,
                                                                 const ChannelMessage& output,
                                                                 Rng& rng);
    virtual void on_return_ref(ChannelMessage& msg, Rng& rng);
};

enum class Engine : std::uint8_t {
    /// Closed-form outcome sampling for untouched learning trials.
    Fast,
    /// Full gate network on every trial.
    Full,
};

struct SessionConfig {
    std::size_t d = 2;
    std::size_t n_l = 100;
    QState fiducial = QState::basis(2, 0);
    QState target = QState::basis(2, 0);
    double decoy_probability = 0.5;
    bool hardened = false;
    /// Weight of C1 among non-decoy trials in hardened mode.
    double canary_probability = 0.5;
    /// Cap on effective iterations; 0 selects 100 * N_L^1.5.
    std::uint64_t max_iterations = 0;
    std::uint64_t seed = 0;
    Engine engine = Engine::Fast;
    LearnerOptions learner;
    /// When set, the learner starts from these parameters instead of random ones.
    std::optional<ParamVector> initial_params;
    bool record_trace = false;

    void validate() const;
    std::uint64_t effective_max_iterations() const;
};

struct SecurityAlarms {
    std::uint64_t m_pm_violations = 0;
    std::uint64_t canary_violations = 0;
    std::uint64_t total() const { return m_pm_violations + canary_violations; }
};

struct TrialRecord {
    std::uint64_t trial_id;
    ReferenceKind kind;
    /// Raw measurement result (0/1, or 0 = '+', 1 = '-' for decoys).
    int outcome;
    bool alarm;
    bool learning;
    std::size_t n_fails;
    double coefficient;
    /// Harness-side f(a); never visible to Alice.
    double fidelity;
};

struct TrialOutcome {
    ReferenceKind kind;
    int measured = 0;
    bool alarm = false;
    std::optional<Outcome> learning;
};

struct SessionResult {
    bool halted = false;
    std::uint64_t n_effective = 0;
    std::uint64_t total_trials = 0;
    std::uint64_t decoy_trials = 0;
    std::uint64_t canary_trials = 0;
    double epsilon_l = 1.0;
    SecurityAlarms alarms;
    std::optional<std::uint64_t> first_alarm_trial;
    /// Canary trials sent up to and including the first canary alarm.
    std::optional<std::uint64_t> canaries_to_first_alarm;
    /// Set when a party or an attacker put a malformed state on a channel.
    std::optional<std::string> protocol_error;
    ParamVector final_params;
    std::vector<TrialRecord> trace;
};

/// The learner's side. Holds the fiducial and the learner state; there is no
/// target anywhere in here.
class Alice {
  public:
    struct Config {
        std::size_t d = 2;
        std::size_t n_l = 100;
        QState fiducial = QState::basis(2, 0);
        double decoy_probability = 0.5;
        bool hardened = false;
        double canary_probability = 0.5;
        LearnerOptions learner;
        std::optional<ParamVector> initial_params;
    };

    struct Prepared {
        ReferenceKind kind;
        ChannelMessage ref;
        ChannelMessage output;
    };

    Alice(Config cfg, std::uint64_t seed);

    Prepared prepare(std::uint64_t trial_id);
    /// Measures the returned reference. Learning trials feed the learner.
    TrialOutcome check(ReferenceKind kind, const ChannelMessage& returned, Rng& nature);

    const LearnerState& learner() const { return learner_; }
    const GeneratorSet& generators() const { return gens_; }
    const QState& estimation_state() const { return estimate_; }
    bool halted() const { return rqml::halted(learner_); }

  private:
    Config cfg_;
    GeneratorSet gens_;
    Rng rng_;
    LearnerState learner_;
    QState estimate_;
};

/// The provider's side. Holds the target (and T in hardened mode); never sees
/// Alice's parameters.
class Bob {
  public:
    Bob(BobModuleConfig cfg, Engine engine);

    ChannelMessage respond(const ChannelMessage& ref, const ChannelMessage& output, Rng& nature) const;

  private:
    BobModuleConfig cfg_;
    Engine engine_;
};

/// One learning session: Alice, Bob, and the channels between them.
class Session {
  public:
    explicit Session(SessionConfig cfg, Adversary* adversary = nullptr);

    TrialOutcome run_trial();
    bool halted() const { return alice_.halted(); }
    bool capped() const;
    const SessionResult& progress() const { return result_; }
    const Alice& alice() const { return alice_; }
    /// Harness oracle f(a) = |<tau_B|U(a) chi_A>|^2.
    double oracle_fidelity() const;
    /// Final bookkeeping (epsilon_L, final params).
    SessionResult finish() &&;

  private:
    SessionConfig cfg_;
    Alice alice_;
    Bob bob_;
    Adversary* adversary_;
    Rng nature_;
    Rng eve_rng_;
    SessionResult result_;
};

SessionResult run_session(const SessionConfig& cfg, Adversary* adversary = nullptr);

enum class PmResult : std::uint8_t { Ok, Violation };

/// {|+>,|->} measurement of the returned reference qubit.
PmResult measurement_m_pm(const QState& returned_ref, ReferenceKind expected, Rng& rng);

}  // namespace rqml
