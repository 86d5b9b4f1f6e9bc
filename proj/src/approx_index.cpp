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

#include "laconic/approx_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_set>

#include "laconic/error.hpp"
#include "laconic/topk.hpp"

namespace laconic {

void
ApproxParams::validate() const {
    if (!(alpha > 0.0) || alpha > 1.0 || !std::isfinite(alpha)) {
        throw ContractViolation("ApproxParams: alpha must be in (0, 1]");
    }
    if (block_size == 0) {
        throw ContractViolation("ApproxParams: block_size must be >= 1");
    }
    if (summary_levels < 2 || summary_levels > 256) {
        throw ContractViolation("ApproxParams: summary_levels must be in [2, 256]");
    }
    if (!(heap_factor > 0.0) || heap_factor > 1.0 || !std::isfinite(heap_factor)) {
        throw ContractViolation("ApproxParams: heap_factor must be in (0, 1]");
    }
}

namespace {

// Retained prefix length for an impact-sorted list: ceil(alpha * len), computed with a
// small downward nudge so float noise cannot bump an exact product to the next integer
// (alpha = 0.3 over 10 postings keeps 3, never 4). Always keeps at least one posting.
std::size_t
kept_count(double alpha, std::size_t len) {
    const auto kept = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(len) - 1e-12));
    return std::clamp<std::size_t>(kept, 1, len);
}

// Smallest level whose dequantized value covers w; level 0 is reserved for zero.
uint8_t
quantize_up(float w, float scale, uint32_t levels) {
    double raw = std::ceil(static_cast<double>(w) / static_cast<double>(scale));
    if (!(raw >= 1.0)) {
        raw = 1.0;
    }
    if (raw > static_cast<double>(levels - 1)) {
        raw = static_cast<double>(levels - 1);
    }
    auto c = static_cast<uint32_t>(raw);
    while (c > 1 && static_cast<float>(static_cast<double>(c - 1) * static_cast<double>(scale)) >= w) {
        --c;
    }
    while (static_cast<float>(static_cast<double>(c) * static_cast<double>(scale)) < w && c < levels - 1) {
        ++c;
    }
    return static_cast<uint8_t>(c);
}

}  // namespace

ApproxIndex
ApproxIndex::build(const VocabSpec& vocab, std::span<const NamedVector> corpus, const ApproxParams& params) {
    params.validate();
    if (vocab.size == 0) {
        throw ContractViolation("build_approx: vocabulary size must be positive");
    }
    ApproxIndex idx;
    idx.vocab_ = vocab;
    idx.params_ = params;
    idx.term_blocks_.resize(vocab.size);
    idx.doc_ids_.reserve(corpus.size());
    idx.forward_.reserve(corpus.size());
    std::unordered_set<std::string> seen;
    seen.reserve(corpus.size());
    std::vector<std::vector<Posting>> postings(vocab.size);
    for (const auto& doc : corpus) {
        if (!seen.insert(doc.id).second) {
            throw ContractViolation("build_approx: duplicate document id \"" + doc.id + "\"");
        }
        if (doc.vec.vocab_size() != vocab.size) {
            throw ContractViolation("build_approx: document \"" + doc.id + "\" has a mismatched vocabulary");
        }
        const auto ordinal = static_cast<uint32_t>(idx.doc_ids_.size());
        idx.doc_ids_.push_back(doc.id);
        idx.forward_.push_back(doc.vec);
        for (const auto& e : doc.vec.entries()) {
            postings[e.term].push_back({ordinal, e.weight});
        }
    }

    // Static pruning first: a document's "kept" coordinates are whatever survives
    // across all of its terms, and summaries bound exactly those.
    std::vector<std::vector<TermWeight>> kept_coords(idx.doc_ids_.size());
    for (uint32_t term = 0; term < vocab.size; ++term) {
        auto& list = postings[term];
        if (list.empty()) {
            continue;
        }
        std::stable_sort(list.begin(), list.end(),
                         [](const Posting& a, const Posting& b) { return a.impact > b.impact; });
        list.resize(kept_count(params.alpha, list.size()));
        for (const auto& p : list) {
            kept_coords[p.doc_ordinal].push_back({term, p.impact});
        }
    }
    // Term-major fill above leaves each document's kept list term-ascending already.

    for (uint32_t term = 0; term < vocab.size; ++term) {
        const auto& list = postings[term];
        for (std::size_t begin = 0; begin < list.size(); begin += params.block_size) {
            const std::size_t end = std::min(begin + params.block_size, list.size());
            Block block;
            std::map<uint32_t, float> bound;  // coordinate-wise max over members' kept coords
            for (std::size_t i = begin; i < end; ++i) {
                block.docs.push_back(list[i].doc_ordinal);
                for (const auto& kc : kept_coords[list[i].doc_ordinal]) {
                    auto [it, fresh] = bound.try_emplace(kc.term, kc.weight);
                    if (!fresh && kc.weight > it->second) {
                        it->second = kc.weight;
                    }
                }
            }
            float block_max = 0.0f;
            for (const auto& [t, w] : bound) {
                block_max = std::max(block_max, w);
            }
            // Uniform levels spanning [0, block max]; nudge the step up until the top
            // level covers the max so rounding up can never overflow a code.
            float scale = static_cast<float>(static_cast<double>(block_max) / (params.summary_levels - 1));
            while (static_cast<float>(static_cast<double>(params.summary_levels - 1) * static_cast<double>(scale)) <
                   block_max) {
                scale = std::nextafter(scale, std::numeric_limits<float>::infinity());
            }
            block.scale = scale;
            block.summary.reserve(bound.size());
            block.codes.reserve(bound.size());
            for (const auto& [t, w] : bound) {
                const uint8_t code = quantize_up(w, scale, params.summary_levels);
                block.summary.push_back({t, static_cast<float>(code * static_cast<double>(scale))});
                block.codes.push_back(code);
            }
            idx.term_blocks_[term].push_back(std::move(block));
        }
    }
    return idx;
}

std::vector<SearchHit>
ApproxIndex::search(const SparseVector& query, std::size_t k) const {
    if (k == 0) {
        throw ContractViolation("search_approx: k must be >= 1");
    }
    if (query.vocab_size() != vocab_.size) {
        throw ContractViolation("search_approx: query vocabulary does not match the index");
    }
    std::vector<double> qdense(vocab_.size, 0.0);
    for (const auto& e : query.entries()) {
        qdense[e.term] = static_cast<double>(e.weight);
    }

    struct Candidate {
        double bound;
        uint32_t term;
        uint32_t index;
    };
    std::vector<Candidate> cands;
    for (const auto& qe : query.entries()) {
        const auto& blocks = term_blocks_[qe.term];
        for (uint32_t bi = 0; bi < blocks.size(); ++bi) {
            // Summary entries are term-ascending, so this matches dot(query, summary)
            // bit-for-bit (zero products leave the f64 accumulator untouched).
            double bound = 0.0;
            for (const auto& sw : blocks[bi].summary) {
                bound += qdense[sw.term] * static_cast<double>(sw.weight);
            }
            cands.push_back({bound, qe.term, bi});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.bound != b.bound) {
            return a.bound > b.bound;
        }
        if (a.term != b.term) {
            return a.term < b.term;
        }
        return a.index < b.index;
    });

    TopK topk(k, doc_ids_);
    std::vector<uint8_t> visited(doc_ids_.size(), 0);
    for (const auto& cand : cands) {
        // Bounds arrive in descending order and the threshold only rises, so the
        // first unqualified block ends the scan.
        if (topk.full() && !(cand.bound > static_cast<double>(topk.threshold()) / params_.heap_factor)) {
            break;
        }
        for (uint32_t ordinal : term_blocks_[cand.term][cand.index].docs) {
            if (visited[ordinal]) {
                continue;
            }
            visited[ordinal] = 1;
            double acc = 0.0;
            for (const auto& e : forward_[ordinal].entries()) {
                acc += qdense[e.term] * static_cast<double>(e.weight);
            }
            const auto score = static_cast<float>(acc);
            if (score > 0.0f) {
                topk.offer(score, ordinal);
            }
        }
    }
    std::vector<SearchHit> hits;
    for (const auto& e : topk.take_sorted()) {
        hits.push_back({doc_ids_[e.ordinal], e.score});
    }
    return hits;
}

double
recall_vs_exact(const ApproxIndex& index, const InvertedIndex& exact, std::span<const SparseVector> queries,
                std::size_t k) {
    if (index.doc_count() != exact.doc_count()) {
        throw ContractViolation("recall_vs_exact: indexes cover different corpora");
    }
    double sum = 0.0;
    std::size_t contributing = 0;
    for (const auto& q : queries) {
        const auto truth = exact.search(q, k);
        if (truth.empty()) {
            continue;
        }
        std::unordered_set<std::string> truth_ids;
        for (const auto& hit : truth) {
            truth_ids.insert(hit.id);
        }
        std::size_t overlap = 0;
        for (const auto& hit : index.search(q, k)) {
            overlap += truth_ids.count(hit.id);
        }
        sum += static_cast<double>(overlap) / static_cast<double>(truth.size());
        ++contributing;
    }
    return contributing > 0 ? sum / static_cast<double>(contributing) : 1.0;
}

}  // namespace laconic
