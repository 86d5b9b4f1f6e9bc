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

#include "laconic/sparse_vector.hpp"

#include <cmath>
#include <cstddef>
#include <string>

namespace laconic {

namespace {

template <typename T>
SparseVector
from_dense_impl(std::span<const T> values) {
    std::vector<TermWeight> entries;
    for (std::size_t j = 0; j < values.size(); ++j) {
        const T v = values[j];
        if (std::isnan(static_cast<double>(v)) || v < T(0)) {
            throw ContractViolation("from_dense: negative or NaN value at index " + std::to_string(j));
        }
        const float w = static_cast<float>(v);
        if (w > 0.0f) {
            entries.push_back({static_cast<uint32_t>(j), w});
        }
    }
    return SparseVector::from_entries(static_cast<uint32_t>(values.size()), std::move(entries));
}

}  // namespace

SparseVector
SparseVector::from_dense(std::span<const double> values) {
    return from_dense_impl(values);
}

SparseVector
SparseVector::from_dense(std::span<const float> values) {
    return from_dense_impl(values);
}

SparseVector
SparseVector::from_entries(uint32_t vocab_size, std::vector<TermWeight> entries) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!(entries[i].weight > 0.0f)) {
            throw ContractViolation("SparseVector: weight at term " + std::to_string(entries[i].term) +
                                    " must be strictly positive");
        }
        if (entries[i].term >= vocab_size) {
            throw ContractViolation("SparseVector: term " + std::to_string(entries[i].term) +
                                    " outside vocabulary of size " + std::to_string(vocab_size));
        }
        if (i > 0 && entries[i].term <= entries[i - 1].term) {
            throw ContractViolation("SparseVector: term ids must be strictly increasing");
        }
    }
    SparseVector v(vocab_size);
    v.entries_ = std::move(entries);
    return v;
}

std::vector<double>
SparseVector::to_dense() const {
    std::vector<double> out(vocab_size_, 0.0);
    for (const auto& e : entries_) {
        out[e.term] = static_cast<double>(e.weight);
    }
    return out;
}

double
dot(const SparseVector& a, const SparseVector& b) {
    if (a.vocab_size() != b.vocab_size()) {
        throw ContractViolation("dot: vectors over different vocabularies (" + std::to_string(a.vocab_size()) +
                                " vs " + std::to_string(b.vocab_size()) + ")");
    }
    const auto ea = a.entries();
    const auto eb = b.entries();
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < ea.size() && j < eb.size()) {
        if (ea[i].term < eb[j].term) {
            ++i;
        } else if (eb[j].term < ea[i].term) {
            ++j;
        } else {
            acc += static_cast<double>(ea[i].weight) * static_cast<double>(eb[j].weight);
            ++i;
            ++j;
        }
    }
    return acc;
}

}  // namespace laconic
