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
#include <string>
#include <vector>

#include "laconic/sparse_vector.hpp"
#include "laconic/vector_io.hpp"

namespace laconic {

struct Posting {
    uint32_t doc_ordinal;
    float impact;

    bool
    operator==(const Posting&) const = default;
};

struct SearchHit {
    std::string id;
    float score;

    bool
    operator==(const SearchHit&) const = default;
};

// Exact impact-ordered inverted index. Lossless: the postings reassemble every input
// vector bit-for-bit. Immutable once built; concurrent searches are safe.
class InvertedIndex {
 public:
    InvertedIndex() = default;

    // Duplicate external ids and vocabulary mismatches are contract violations.
    static InvertedIndex
    build(const VocabSpec& vocab, std::span<const NamedVector> corpus);

    // Term-at-a-time scoring into a per-doc accumulator, then a bounded top-k heap.
    // Results sorted by descending score, ties by ascending external id; only docs
    // with positive score are returned. f64 accumulation, f32 reported scores.
    std::vector<SearchHit>
    search(const SparseVector& query, std::size_t k) const;

    // Reassembles every document from the postings (ordinal order).
    std::vector<SparseVector>
    reconstruct_all() const;

    const VocabSpec&
    vocab() const noexcept {
        return vocab_;
    }

    uint32_t
    doc_count() const noexcept {
        return static_cast<uint32_t>(doc_ids_.size());
    }

    const std::vector<std::string>&
    doc_ids() const noexcept {
        return doc_ids_;
    }

    // Per-term postings sorted by descending impact; empty list for unused terms.
    const std::vector<Posting>&
    postings(uint32_t term) const {
        if (term >= vocab_.size) {
            throw ContractViolation("postings: term " + std::to_string(term) + " outside vocabulary");
        }
        return postings_[term];
    }

    uint64_t
    total_postings() const noexcept {
        return total_postings_;
    }

    bool
    operator==(const InvertedIndex&) const = default;

 private:
    friend class IndexCodec;

    VocabSpec vocab_;
    std::vector<std::string> doc_ids_;             // ordinal -> external id
    std::vector<std::vector<Posting>> postings_;   // one list per term id
    uint64_t total_postings_ = 0;
};

}  // namespace laconic
