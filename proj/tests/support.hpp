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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rqml/qmath.hpp"

namespace rqml::test {

/// Two-sample Kolmogorov-Smirnov statistic.
template <typename T>
double ks_statistic(std::vector<T> a, std::vector<T> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const T x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

template <typename T>
double ks_p_value(const std::vector<T>& a, const std::vector<T>& b) {
    const double ne = static_cast<double>(a.size()) * static_cast<double>(b.size()) /
                      static_cast<double>(a.size() + b.size());
    const double sq = std::sqrt(ne);
    return kolmogorov_q((sq + 0.12 + 0.11 / sq) * ks_statistic(a, b));
}

/// Dense Kronecker product, written independently of the library's tensor().
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline CVector kron(const CVector& a, const CVector& b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

/// |0><0| (x) 1 + |1><1| (x) S as a sum of projectors and a swap built from
/// |y><x| (x) |x><y|.
inline CMatrix dense_cswap(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    CMatrix swap = CMatrix::Zero(n * n, n * n);
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = 0; y < n; ++y) {
            CMatrix exy = CMatrix::Zero(n, n);
            exy(y, x) = 1.0;
            swap += kron(exy, CMatrix(exy.adjoint()));
        }
    }
    CMatrix p0 = CMatrix::Zero(2, 2);
    CMatrix p1 = CMatrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    return kron(p0, CMatrix::Identity(n * n, n * n)) + kron(p1, swap);
}

inline CMatrix dense_hadamard() {
    CMatrix h(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    h << s, s, s, -s;
    return h;
}

/// The comparator network multiplied out as one dense matrix.
inline CMatrix dense_comparator(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d * d);
    const CMatrix h = kron(dense_hadamard(), CMatrix::Identity(n, n));
    return h * dense_cswap(d) * h;
}

/// Probability of the leading qubit reading k.
inline double leading_qubit_probability(const CVector& psi, int k) {
    const Eigen::Index half = psi.size() / 2;
    return psi.segment(k * half, half).squaredNorm();
}

/// Reduced density matrix of the leading qubit.
inline CMatrix leading_qubit_density(const CVector& psi) {
    const Eigen::Index half = psi.size() / 2;
    CMatrix rho(2, 2);
    for (Eigen::Index a = 0; a < 2; ++a) {
        for (Eigen::Index b = 0; b < 2; ++b) {
            rho(a, b) = psi.segment(b * half, half).dot(psi.segment(a * half, half));
        }
    }
    return rho;
}

}  // namespace rqml::test
