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

#include "rqml/gate_module.hpp"

#include <span>
#include <stdexcept>

#include <Eigen/QR>

#include "rqml/kernels.hpp"

namespace rqml {

void BobModuleConfig::validate() const {
    if (d < 2) throw DimensionError("Bob module needs d >= 2");
    if (target.dim() != d) throw DimensionError("target dimension does not match d");
    if (hardened) {
        if (!task_unitary) throw std::invalid_argument("hardened module requires a task unitary");
        if (!task_unitary->is_unitary()) throw std::invalid_argument("task operator is not unitary");
        if (task_unitary->dim() != d) throw DimensionError("task unitary dimension does not match d");
    }
}

void BobModuleConfig::check_task_unitary(const QState& fiducial) const {
    if (!hardened) return;
    validate();
    const CVector mapped = task_unitary->matrix() * fiducial.amplitudes();
    if ((mapped - target.amplitudes()).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("task unitary does not map the fiducial onto the target");
    }
}

QState apply_comparator(const QState& ref_and_output, const QState& target,
                        const Operator* controlled_t) {
    const std::size_t d = target.dim();
    if (ref_and_output.dim() != 2 * d) {
        throw DimensionError("reference/output pair must have dimension 2d");
    }
    CVector amps = tensor(ref_and_output, target).amplitudes();
    std::span<Complex> view{amps.data(), static_cast<std::size_t>(amps.size())};
    if (controlled_t != nullptr) {
        if (controlled_t->dim() != d) throw DimensionError("controlled-T dimension mismatch");
        kernels::controlled_first_factor(view, d, controlled_t->matrix());
    }
    kernels::apply_ref_gate(view, kernels::hadamard_gate());
    kernels::controlled_swap(view, d);
    kernels::apply_ref_gate(view, kernels::hadamard_gate());
    return QState::normalized(std::move(amps));
}

QState apply_bob_module(const BobModuleConfig& cfg, const QState& ref_and_output) {
    cfg.validate();
    if (ref_and_output.dim() != 2 * cfg.d) {
        throw DimensionError("reference/output pair must have dimension 2d");
    }
    const Operator* t = cfg.hardened ? &*cfg.task_unitary : nullptr;
    return apply_comparator(ref_and_output, cfg.target, t);
}

double outcome_prob(double f, int k) {
    if (!(f >= 0.0 && f <= 1.0)) throw std::domain_error("fidelity must lie in [0, 1]");
    if (k != 0 && k != 1) throw std::domain_error("outcome must be 0 or 1");
    return k == 0 ? (1.0 + f) / 2.0 : (1.0 - f) / 2.0;
}

Operator cswap_operator(std::size_t d) {
    if (d < 2) throw DimensionError("C-SWAP needs d >= 2");
    const std::size_t half = d * d;
    const auto n = static_cast<Eigen::Index>(2 * half);
    CMatrix m = CMatrix::Zero(n, n);
    for (std::size_t i = 0; i < half; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        m(row, row) = 1.0;
    }
    for (std::size_t x = 0; x < d; ++x) {
        for (std::size_t y = 0; y < d; ++y) {
            const auto from = static_cast<Eigen::Index>(half + x * d + y);
            const auto to = static_cast<Eigen::Index>(half + y * d + x);
            m(to, from) = 1.0;
        }
    }
    return Operator::unitary(std::move(m));
}

namespace {

// Unitary whose first column is exactly psi.
CMatrix completion_basis(const QState& psi) {
    const auto n = static_cast<Eigen::Index>(psi.dim());
    CMatrix seed = CMatrix::Identity(n, n);
    seed.col(0) = psi.amplitudes();
    const Eigen::HouseholderQR<CMatrix> qr(seed);
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    const Complex overlap = q.col(0).dot(psi.amplitudes());
    q.col(0) *= overlap / std::abs(overlap);
    return q;
}

}  // namespace

Operator task_unitary_between(const QState& from, const QState& to) {
    if (from.dim() != to.dim()) throw DimensionError("task unitary endpoints differ in dimension");
    const CMatrix a = completion_basis(from);
    const CMatrix b = completion_basis(to);
    return Operator::unitary(b * a.adjoint());
}

double swap_test_flip_probability(const QState& x, const QState& y) {
    return (1.0 - fidelity(x, y)) / 2.0;
}

}  // namespace rqml
