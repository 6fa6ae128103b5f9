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

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rqml/rng.hpp"

namespace rqml {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using ParamVector = Eigen::VectorXd;

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-12;

class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Normalized pure state. The norm invariant is checked on construction.
class QState {
  public:
    /// Takes amplitudes that must already have unit norm.
    static QState from_amplitudes(CVector amplitudes);
    /// Rescales arbitrary nonzero amplitudes to unit norm.
    static QState normalized(CVector amplitudes);
    static QState basis(std::size_t dim, std::size_t index);
    static QState plus();
    static QState minus();

    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    const CVector& amplitudes() const { return amps_; }
    Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

  private:
    explicit QState(CVector amps) : amps_(std::move(amps)) {}
    CVector amps_;
};

/// Square matrix tagged with what was validated at construction.
class Operator {
  public:
    static Operator unitary(CMatrix m);
    static Operator hermitian(CMatrix m);
    static Operator general(CMatrix m);

    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }
    bool is_unitary() const { return unitary_; }
    bool is_hermitian() const { return hermitian_; }

    /// Only defined for unitary-validated operators; the result is a QState.
    QState apply(const QState& psi) const;

  private:
    Operator(CMatrix m, bool unitary, bool hermitian)
        : m_(std::move(m)), unitary_(unitary), hermitian_(hermitian) {}
    CMatrix m_;
    bool unitary_ = false;
    bool hermitian_ = false;
};

double unitarity_error(const CMatrix& m);
double hermiticity_error(const CMatrix& m);

Operator identity(std::size_t dim);
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();
Operator hadamard();

/// SU(d) generators in a frozen order: every symmetric u_jk (j < k,
/// lexicographic), then every antisymmetric v_jk in the same order, then the
/// diagonal w_1 ... w_{d-1}. For d = 2 this is (sigma_x, sigma_y, sigma_z).
struct GeneratorSet {
    std::size_t d = 0;
    std::vector<Operator> generators;

    std::size_t size() const { return generators.size(); }
    const Operator& operator[](std::size_t i) const { return generators[i]; }
};

GeneratorSet build_generators(std::size_t d);

/// exp(-i sum_j a_j G_j) through the eigendecomposition of the Hermitian sum.
Operator unitary_from_params(const ParamVector& a, const GeneratorSet& gens);

/// |<x|y>|^2
double fidelity(const QState& x, const QState& y);

QState tensor(const QState& a, const QState& b);
Operator tensor(const Operator& a, const Operator& b);

template <typename T, typename... Rest>
T tensor(const T& a, const T& b, const Rest&... rest) {
    return tensor(tensor(a, b), rest...);
}

/// Probabilities of the leading qubit being 0 or 1 (squared block norms).
std::array<double, 2> ref_probabilities(const QState& composite);

struct RefMeasurement {
    int outcome;
    QState collapsed;
};

/// Projective {|0>,|1>} measurement of the leading qubit of a composite state.
RefMeasurement measure_ref_qubit(const QState& composite, Rng& rng);

/// Haar-random pure state from normalized i.i.d. complex Gaussians.
QState random_state(std::size_t d, Rng& rng);

/// Unit vector orthogonal to psi, Haar-distributed on that complement.
QState random_orthogonal_state(const QState& psi, Rng& rng);

}  // namespace rqml
