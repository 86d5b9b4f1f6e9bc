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

#include "laconic/exact_index.hpp"
#include "laconic/sparse_vector.hpp"
#include "laconic/vector_io.hpp"

namespace laconic {

struct ApproxParams {
    double alpha = 0.5;          // fraction of each posting list kept, (0, 1]
    uint32_t block_size = 8;     // max postings per block
    uint32_t summary_levels = 16;  // quantization levels, 2..256 (codes are one byte)
    double heap_factor = 0.9;    // (0, 1]; < 1 prunes more aggressively

    void
    validate() const;

    bool
    operator==(const ApproxParams&) const = default;
};

// One run of consecutive impact-ordered postings plus a quantized upper-bound summary
// of its members' kept coordinates.
struct Block {
    std::vector<uint32_t> docs;        // member ordinals, impact-descending
    float scale = 0.0f;                // quantization step for this block
    std::vector<TermWeight> summary;   // dequantized per-coordinate upper bounds, term-ascending
    std::vector<uint8_t> codes;        // level codes, parallel to summary

    bool
    operator==(const Block&) const = default;
};

// Statically pruned, blocked, summarized inverted index. Candidate blocks are ranked
// by their summary-vs-query bound and skipped once the bound cannot beat the current
// k-th best score (scaled by heap_factor); surviving docs are rescored exactly from
// the lossless forward store. Immutable after build; concurrent searches are safe.
class ApproxIndex {
 public:
    ApproxIndex() = default;

    static ApproxIndex
    build(const VocabSpec& vocab, std::span<const NamedVector> corpus, const ApproxParams& params);

    std::vector<SearchHit>
    search(const SparseVector& query, std::size_t k) const;

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

    const std::vector<SparseVector>&
    forward_store() const noexcept {
        return forward_;
    }

    const std::vector<Block>&
    blocks(uint32_t term) const {
        if (term >= vocab_.size) {
            throw ContractViolation("blocks: term " + std::to_string(term) + " outside vocabulary");
        }
        return term_blocks_[term];
    }

    const ApproxParams&
    params() const noexcept {
        return params_;
    }

    bool
    operator==(const ApproxIndex&) const = default;

 private:
    friend class IndexCodec;

    VocabSpec vocab_;
    std::vector<std::string> doc_ids_;
    std::vector<SparseVector> forward_;            // ordinal -> full vector
    std::vector<std::vector<Block>> term_blocks_;  // one block list per term id
    ApproxParams params_;
};

// Mean over queries of |approx top-k intersect exact top-k| / |exact top-k|, skipping
// queries whose exact top-k is empty; 1.0 when nothing contributes.
double
recall_vs_exact(const ApproxIndex& index, const InvertedIndex& exact, std::span<const SparseVector> queries,
                std::size_t k);

}  // namespace laconic
