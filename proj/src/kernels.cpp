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

#include "rqml/kernels.hpp"

#include <cassert>
#include <vector>

namespace rqml::kernels {

namespace {

inline void mix(Complex& a0, Complex& a1, const Gate2& g) {
    const Complex x0 = a0;
    const Complex x1 = a1;
    a0 = g[0] * x0 + g[1] * x1;
    a1 = g[2] * x0 + g[3] * x1;
}

}  // namespace

namespace serial {

void apply_ref_gate(std::span<Complex> amps, const Gate2& g) {
    const std::size_t half = amps.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
        mix(amps[i], amps[half + i], g);
    }
}

void controlled_swap(std::span<Complex> amps, std::size_t d) {
    const std::size_t half = amps.size() / 2;
    assert(half == d * d);
    Complex* upper = amps.data() + half;
    for (std::size_t o = 0; o < d; ++o) {
        for (std::size_t t = o + 1; t < d; ++t) {
            std::swap(upper[o * d + t], upper[t * d + o]);
        }
    }
}

void controlled_first_factor(std::span<Complex> amps, std::size_t d, const Eigen::MatrixXcd& t) {
    const std::size_t half = amps.size() / 2;
    const std::size_t inner = half / d;
    Complex* upper = amps.data() + half;
    std::vector<Complex> column(d);
    for (std::size_t rest = 0; rest < inner; ++rest) {
        for (std::size_t k = 0; k < d; ++k) column[k] = upper[k * inner + rest];
        for (std::size_t o = 0; o < d; ++o) {
            Complex acc{0.0, 0.0};
            for (std::size_t k = 0; k < d; ++k) {
                acc += t(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(k)) * column[k];
            }
            upper[o * inner + rest] = acc;
        }
    }
}

std::array<double, 2> ref_block_norms(std::span<const Complex> amps) {
    const std::size_t half = amps.size() / 2;
    double p0 = 0.0;
    double p1 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        p0 += std::norm(amps[i]);
        p1 += std::norm(amps[half + i]);
    }
    return {p0, p1};
}

}  // namespace serial

namespace omp {

void apply_ref_gate(std::span<Complex> amps, const Gate2& g) {
    const auto half = static_cast<std::ptrdiff_t>(amps.size() / 2);
    Complex* data = amps.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < half; ++i) {
        mix(data[i], data[half + i], g);
    }
}

void controlled_swap(std::span<Complex> amps, std::size_t d) {
    const std::size_t half = amps.size() / 2;
    assert(half == d * d);
    Complex* upper = amps.data() + half;
    const auto rows = static_cast<std::ptrdiff_t>(d);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t o = 0; o < rows; ++o) {
        const auto uo = static_cast<std::size_t>(o);
        for (std::size_t t = uo + 1; t < d; ++t) {
            std::swap(upper[uo * d + t], upper[t * d + uo]);
        }
    }
}

void controlled_first_factor(std::span<Complex> amps, std::size_t d, const Eigen::MatrixXcd& t) {
    const std::size_t half = amps.size() / 2;
    const std::size_t inner = half / d;
    Complex* upper = amps.data() + half;
    const auto columns = static_cast<std::ptrdiff_t>(inner);
#pragma omp parallel
    {
        std::vector<Complex> column(d);
#pragma omp for schedule(static)
        for (std::ptrdiff_t r = 0; r < columns; ++r) {
            const auto rest = static_cast<std::size_t>(r);
            for (std::size_t k = 0; k < d; ++k) column[k] = upper[k * inner + rest];
            for (std::size_t o = 0; o < d; ++o) {
                Complex acc{0.0, 0.0};
                for (std::size_t k = 0; k < d; ++k) {
                    acc += t(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(k)) * column[k];
                }
                upper[o * inner + rest] = acc;
            }
        }
    }
}

std::array<double, 2> ref_block_norms(std::span<const Complex> amps) {
    const auto half = static_cast<std::ptrdiff_t>(amps.size() / 2);
    const Complex* data = amps.data();
    double p0 = 0.0;
    double p1 = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : p0, p1)
    for (std::ptrdiff_t i = 0; i < half; ++i) {
        p0 += std::norm(data[i]);
        p1 += std::norm(data[half + i]);
    }
    return {p0, p1};
}

}  // namespace omp

void apply_ref_gate(std::span<Complex> amps, const Gate2& g) {
    if (amps.size() >= kParallelThreshold) {
        omp::apply_ref_gate(amps, g);
    } else {
        serial::apply_ref_gate(amps, g);
    }
}

void controlled_swap(std::span<Complex> amps, std::size_t d) {
    if (amps.size() >= kParallelThreshold) {
        omp::controlled_swap(amps, d);
    } else {
        serial::controlled_swap(amps, d);
    }
}

void controlled_first_factor(std::span<Complex> amps, std::size_t d, const Eigen::MatrixXcd& t) {
    if (amps.size() >= kParallelThreshold) {
        omp::controlled_first_factor(amps, d, t);
    } else {
        serial::controlled_first_factor(amps, d, t);
    }
}

std::array<double, 2> ref_block_norms(std::span<const Complex> amps) {
    // The serial sum is the reference; keep reductions order-stable below
    // the threshold so small-state sampling is bit-reproducible.
    if (amps.size() >= kParallelThreshold) return omp::ref_block_norms(amps);
    return serial::ref_block_norms(amps);
}

}  // namespace rqml::kernels
