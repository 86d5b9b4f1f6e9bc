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

#include "laconic/exact_index.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "laconic/error.hpp"
#include "laconic/topk.hpp"

namespace laconic {

InvertedIndex
InvertedIndex::build(const VocabSpec& vocab, std::span<const NamedVector> corpus) {
    if (vocab.size == 0) {
        throw ContractViolation("build_exact: vocabulary size must be positive");
    }
    InvertedIndex idx;
    idx.vocab_ = vocab;
    idx.postings_.resize(vocab.size);
    idx.doc_ids_.reserve(corpus.size());
    std::unordered_set<std::string> seen;
    seen.reserve(corpus.size());
    for (const auto& doc : corpus) {
        if (!seen.insert(doc.id).second) {
            throw ContractViolation("build_exact: duplicate document id \"" + doc.id + "\"");
        }
        if (doc.vec.vocab_size() != vocab.size) {
            throw ContractViolation("build_exact: document \"" + doc.id + "\" has a mismatched vocabulary");
        }
        const auto ordinal = static_cast<uint32_t>(idx.doc_ids_.size());
        idx.doc_ids_.push_back(doc.id);
        for (const auto& e : doc.vec.entries()) {
            idx.postings_[e.term].push_back({ordinal, e.weight});
            ++idx.total_postings_;
        }
    }
    // Impact-ordered lists; stable sort keeps equal impacts in ascending ordinal order.
    for (auto& list : idx.postings_) {
        std::stable_sort(list.begin(), list.end(),
                         [](const Posting& a, const Posting& b) { return a.impact > b.impact; });
    }
    return idx;
}

std::vector<SearchHit>
InvertedIndex::search(const SparseVector& query, std::size_t k) const {
    if (k == 0) {
        throw ContractViolation("search_exact: k must be >= 1");
    }
    if (query.vocab_size() != vocab_.size) {
        throw ContractViolation("search_exact: query vocabulary does not match the index");
    }
    std::unordered_map<uint32_t, double> acc;
    for (const auto& qe : query.entries()) {
        const double qw = static_cast<double>(qe.weight);
        for (const auto& p : postings_[qe.term]) {
            acc[p.doc_ordinal] += qw * static_cast<double>(p.impact);
        }
    }
    TopK topk(k, doc_ids_);
    for (const auto& [ordinal, sum] : acc) {
        const auto score = static_cast<float>(sum);
        if (score > 0.0f) {
            topk.offer(score, ordinal);
        }
    }
    std::vector<SearchHit> hits;
    for (const auto& e : topk.take_sorted()) {
        hits.push_back({doc_ids_[e.ordinal], e.score});
    }
    return hits;
}

std::vector<SparseVector>
InvertedIndex::reconstruct_all() const {
    std::vector<std::vector<TermWeight>> entries(doc_ids_.size());
    for (uint32_t term = 0; term < vocab_.size; ++term) {
        for (const auto& p : postings_[term]) {
            entries[p.doc_ordinal].push_back({term, p.impact});
        }
    }
    std::vector<SparseVector> docs;
    docs.reserve(entries.size());
    for (auto& e : entries) {
        docs.push_back(SparseVector::from_entries(vocab_.size, std::move(e)));
    }
    return docs;
}

}  // namespace laconic
