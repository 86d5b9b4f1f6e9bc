// Copyright 2026 The Laconic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance
// with the License. You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace laconic::test {

// Seeded draws with the mapping written out, so fixtures never depend on the
// standard library's unspecified distribution algorithms.
class Rng {
 public:
    explicit Rng(uint64_t seed) : gen_(seed) {
    }

    // Uniform in [0, 1) with 53 random bits.
    double
    uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double
    uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Uniform integer in [0, n) by rejection, bias-free.
    uint64_t
    below(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    uint64_t
    raw() {
        return gen_();
    }

 private:
    std::mt19937_64 gen_;
};

}  // namespace laconic::test
