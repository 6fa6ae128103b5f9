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

#include "rqml/qmath.hpp"

namespace rqml {

/// Bob's comparator. Mode order of the composite is (reference, output, target).
struct BobModuleConfig {
    std::size_t d = 2;
    bool hardened = false;
    QState target = QState::basis(2, 0);
    /// T with T|chi_A> = |tau_B>; required iff hardened.
    std::optional<Operator> task_unitary;

    void validate() const;
    /// Hardened-mode precondition, checked where the fiducial is known.
    void check_task_unitary(const QState& fiducial) const;
};

/// Runs (W), H_r, C-SWAP, H_r on ref_and_output (x) target and returns the full
/// 2d^2 composite. The reference qubit is the leading factor; it is what goes
/// back to Alice.
QState apply_bob_module(const BobModuleConfig& cfg, const QState& ref_and_output);

/// Same network with an explicit target and optional controlled-T; used for
/// both Bob and impostors who run the comparator with their own target.
QState apply_comparator(const QState& ref_and_output, const QState& target,
                        const Operator* controlled_t = nullptr);

/// Pr(k | a) = (1 + (-1)^k f) / 2 after the sigma_x^c correction.
double outcome_prob(double f, int k);

/// |0><0| (x) 1 + |1><1| (x) S on 2 d^2 dimensions, built by permuting basis states.
Operator cswap_operator(std::size_t d);

/// A unitary mapping `from` to `to` exactly (up to rounding).
Operator task_unitary_between(const QState& from, const QState& to);

/// Probability that a comparator fed |1>_r x |x> x |y> returns the reference as |0>.
double swap_test_flip_probability(const QState& x, const QState& y);

}  // namespace rqml
