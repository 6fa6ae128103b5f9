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

// State-vector kernels on composite amplitude arrays laid out as
// (reference qubit) x (rest), i.e. index = r * (size / 2) + rest.
// Each kernel has a serial reference version and an OpenMP version; the
// unqualified entry points dispatch on problem size.

#include <array>
#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace rqml::kernels {

using Complex = std::complex<double>;
/// Row-major 2x2 gate {g00, g01, g10, g11}.
using Gate2 = std::array<Complex, 4>;

/// Below this many amplitudes the OpenMP versions are not worth the fork.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 14;

namespace serial {
void apply_ref_gate(std::span<Complex> amps, const Gate2& g);
/// Swaps the two d-dimensional factors of the rest when the reference is |1>.
void controlled_swap(std::span<Complex> amps, std::size_t d);
/// Applies t to the first d-dimensional factor of the rest when the reference is |1>.
void controlled_first_factor(std::span<Complex> amps, std::size_t d, const Eigen::MatrixXcd& t);
std::array<double, 2> ref_block_norms(std::span<const Complex> amps);
}  // namespace serial

namespace omp {
void apply_ref_gate(std::span<Complex> amps, const Gate2& g);
void controlled_swap(std::span<Complex> amps, std::size_t d);
void controlled_first_factor(std::span<Complex> amps, std::size_t d, const Eigen::MatrixXcd& t);
std::array<double, 2> ref_block_norms(std::span<const Complex> amps);
}  // namespace omp

void apply_ref_gate(std::span<Complex> amps, const Gate2& g);
void controlled_swap(std::span<Complex> amps, std::size_t d);
void controlled_first_factor(std::span<Complex> amps, std::size_t d, const Eigen::MatrixXcd& t);
std::array<double, 2> ref_block_norms(std::span<const Complex> amps);

inline Gate2 hadamard_gate() {
    const double s = 0.70710678118654752440;
    return {Complex{s}, Complex{s}, Complex{s}, Complex{-s}};
}
inline Gate2 x_gate() { return {Complex{0}, Complex{1}, Complex{1}, Complex{0}}; }

}  // namespace rqml::kernels
