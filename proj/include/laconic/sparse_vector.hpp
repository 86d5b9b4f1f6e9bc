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
#include <span>
#include <vector>

#include "laconic/error.hpp"

namespace laconic {

// Vocabulary a corpus is encoded against. Fixed once anything is encoded.
struct VocabSpec {
    uint32_t size = 0;

    explicit VocabSpec(uint32_t s) : size(s) {
        if (s == 0) {
            throw ContractViolation("VocabSpec: size must be positive");
        }
    }
    VocabSpec() = default;

    bool
    operator==(const VocabSpec&) const = default;
};

struct TermWeight {
    uint32_t term;
    float weight;

    bool
    operator==(const TermWeight&) const = default;
};

// Vocabulary-indexed nonnegative weight vector. Entries are sorted by term id,
// unique, and strictly positive; zero weights are never stored. Immutable after
// construction, safe to share across threads.
class SparseVector {
 public:
    SparseVector() = default;

    explicit SparseVector(uint32_t vocab_size) : vocab_size_(vocab_size) {
    }

    // Keeps exactly the strictly-positive coordinates. Negative values are a
    // contract violation; vocab size is the array length.
    static SparseVector
    from_dense(std::span<const double> values);

    static SparseVector
    from_dense(std::span<const float> values);

    // Validates the full invariant set (sorted unique ids, weights > 0, ids < vocab).
    static SparseVector
    from_entries(uint32_t vocab_size, std::vector<TermWeight> entries);

    uint32_t
    vocab_size() const noexcept {
        return vocab_size_;
    }

    std::span<const TermWeight>
    entries() const noexcept {
        return entries_;
    }

    std::size_t
    nnz() const noexcept {
        return entries_.size();
    }

    bool
    empty() const noexcept {
        return entries_.empty();
    }

    std::vector<double>
    to_dense() const;

    bool
    operator==(const SparseVector&) const = default;

 private:
    uint32_t vocab_size_ = 0;
    std::vector<TermWeight> entries_;
};

// <a, b> over the shared coordinates. Sorted two-pointer merge, f64 accumulation.
// Both vectors must be over the same vocabulary.
double
dot(const SparseVector& a, const SparseVector& b);

}  // namespace laconic
