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

#include "rqml/qmath.hpp"

#include <cmath>
#include <span>

#include <Eigen/Eigenvalues>

#include "rqml/kernels.hpp"

namespace rqml {

namespace {

std::span<const Complex> view(const CVector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

QState QState::from_amplitudes(CVector amplitudes) {
    if (amplitudes.size() < 2) {
        throw DimensionError("state dimension must be at least 2, got " +
                             std::to_string(amplitudes.size()));
    }
    const double norm2 = amplitudes.squaredNorm();
    if (std::abs(norm2 - 1.0) > kNormTolerance) {
        throw std::invalid_argument("state is not normalized (|psi|^2 = " + std::to_string(norm2) +
                                    ")");
    }
    return QState(std::move(amplitudes));
}

QState QState::normalized(CVector amplitudes) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    }
    amplitudes /= norm;
    return from_amplitudes(std::move(amplitudes));
}

QState QState::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw DimensionError("basis index out of range");
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return from_amplitudes(std::move(v));
}

QState QState::plus() {
    CVector v(2);
    v << M_SQRT1_2, M_SQRT1_2;
    return from_amplitudes(std::move(v));
}

QState QState::minus() {
    CVector v(2);
    v << M_SQRT1_2, -M_SQRT1_2;
    return from_amplitudes(std::move(v));
}

double unitarity_error(const CMatrix& m) {
    const CMatrix d = m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols());
    return d.cwiseAbs().maxCoeff();
}

double hermiticity_error(const CMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

Operator Operator::unitary(CMatrix m) {
    if (m.rows() != m.cols()) throw DimensionError("operator must be square");
    if (unitarity_error(m) > kUnitaryTolerance) {
        throw std::invalid_argument("operator is not unitary");
    }
    const bool herm = hermiticity_error(m) <= kHermitianTolerance;
    return Operator(std::move(m), true, herm);
}

Operator Operator::hermitian(CMatrix m) {
    if (m.rows() != m.cols()) throw DimensionError("operator must be square");
    if (hermiticity_error(m) > kHermitianTolerance) {
        throw std::invalid_argument("operator is not Hermitian");
    }
    const bool unit = unitarity_error(m) <= kUnitaryTolerance;
    return Operator(std::move(m), unit, true);
}

Operator Operator::general(CMatrix m) {
    if (m.rows() != m.cols()) throw DimensionError("operator must be square");
    return Operator(std::move(m), false, false);
}

QState Operator::apply(const QState& psi) const {
    if (!unitary_) throw std::logic_error("only unitary operators map states to states");
    if (psi.dim() != dim()) throw DimensionError("operator/state dimension mismatch");
    return QState::normalized(m_ * psi.amplitudes());
}

Operator identity(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    return Operator::unitary(CMatrix::Identity(n, n));
}

Operator pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return Operator::unitary(std::move(m));
}

Operator pauli_y() {
    CMatrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return Operator::unitary(std::move(m));
}

Operator pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return Operator::unitary(std::move(m));
}

Operator hadamard() {
    CMatrix m(2, 2);
    m << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2;
    return Operator::unitary(std::move(m));
}

GeneratorSet build_generators(std::size_t d) {
    if (d < 2) throw DimensionError("SU(d) generators need d >= 2");
    const auto n = static_cast<Eigen::Index>(d);
    const Complex i_unit(0.0, 1.0);
    GeneratorSet set;
    set.d = d;
    set.generators.reserve(d * d - 1);

    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            CMatrix u = CMatrix::Zero(n, n);
            u(j, k) = 1.0;
            u(k, j) = 1.0;
            set.generators.push_back(Operator::hermitian(std::move(u)));
        }
    }
    // Sign chosen so that d = 2 gives sigma_y exactly.
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            CMatrix v = CMatrix::Zero(n, n);
            v(j, k) = -i_unit;
            v(k, j) = i_unit;
            set.generators.push_back(Operator::hermitian(std::move(v)));
        }
    }
    for (Eigen::Index l = 1; l < n; ++l) {
        const double scale = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
        CMatrix w = CMatrix::Zero(n, n);
        for (Eigen::Index i = 0; i < l; ++i) w(i, i) = scale;
        w(l, l) = -scale * static_cast<double>(l);
        set.generators.push_back(Operator::hermitian(std::move(w)));
    }
    return set;
}

Operator unitary_from_params(const ParamVector& a, const GeneratorSet& gens) {
    if (static_cast<std::size_t>(a.size()) != gens.size()) {
        throw DimensionError("parameter vector has length " + std::to_string(a.size()) +
                             ", expected " + std::to_string(gens.size()));
    }
    const auto n = static_cast<Eigen::Index>(gens.d);
    CMatrix h = CMatrix::Zero(n, n);
    for (std::size_t j = 0; j < gens.size(); ++j) {
        h += a(static_cast<Eigen::Index>(j)) * gens[j].matrix();
    }
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const Eigen::VectorXd& lambda = es.eigenvalues();
    CVector phases(n);
    for (Eigen::Index i = 0; i < n; ++i) phases(i) = std::polar(1.0, -lambda(i));
    CMatrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return Operator::unitary(std::move(u));
}

double fidelity(const QState& x, const QState& y) {
    if (x.dim() != y.dim()) throw DimensionError("fidelity of states with different dimensions");
    const double f = std::norm(x.amplitudes().dot(y.amplitudes()));
    return std::min(1.0, std::max(0.0, f));
}

QState tensor(const QState& a, const QState& b) {
    const auto na = static_cast<Eigen::Index>(a.dim());
    const auto nb = static_cast<Eigen::Index>(b.dim());
    CVector out(na * nb);
    for (Eigen::Index i = 0; i < na; ++i) {
        out.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
    }
    return QState::normalized(std::move(out));
}

Operator tensor(const Operator& a, const Operator& b) {
    const auto na = static_cast<Eigen::Index>(a.dim());
    const auto nb = static_cast<Eigen::Index>(b.dim());
    CMatrix out(na * nb, na * nb);
    for (Eigen::Index i = 0; i < na; ++i) {
        for (Eigen::Index j = 0; j < na; ++j) {
            out.block(i * nb, j * nb, nb, nb) = a.matrix()(i, j) * b.matrix();
        }
    }
    if (a.is_unitary() && b.is_unitary()) return Operator::unitary(std::move(out));
    if (a.is_hermitian() && b.is_hermitian()) return Operator::hermitian(std::move(out));
    return Operator::general(std::move(out));
}

std::array<double, 2> ref_probabilities(const QState& composite) {
    if (composite.dim() % 2 != 0) {
        throw DimensionError("composite dimension must be even to carry a reference qubit");
    }
    return kernels::ref_block_norms(view(composite.amplitudes()));
}

RefMeasurement measure_ref_qubit(const QState& composite, Rng& rng) {
    const auto [p0, p1] = ref_probabilities(composite);
    const int outcome = uniform01(rng) * (p0 + p1) < p0 ? 0 : 1;
    const auto half = static_cast<Eigen::Index>(composite.dim() / 2);
    CVector collapsed = composite.amplitudes();
    collapsed.segment(outcome == 0 ? half : 0, half).setZero();
    return {outcome, QState::normalized(std::move(collapsed))};
}

QState random_state(std::size_t d, Rng& rng) {
    if (d < 2) throw DimensionError("random_state needs d >= 2");
    CVector v(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = complex_normal(rng);
    return QState::normalized(std::move(v));
}

QState random_orthogonal_state(const QState& psi, Rng& rng) {
    for (;;) {
        CVector v = random_state(psi.dim(), rng).amplitudes();
        v -= psi.amplitudes().dot(v) * psi.amplitudes();
        if (v.norm() > 1e-6) return QState::normalized(std::move(v));
    }
}

}  // namespace rqml
