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

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "laconic/error.hpp"

namespace laconic {

// Bounded top-k accumulator over (score, doc ordinal) pairs, ordered by descending
// score with ties going to the ascending external string id. The kept set is the k
// best under that total order regardless of offer order, so results are deterministic.
class TopK {
 public:
    struct Entry {
        float score;
        uint32_t ordinal;
    };

    TopK(std::size_t k, const std::vector<std::string>& ids) : k_(k), ids_(ids) {
        if (k == 0) {
            throw ContractViolation("TopK: k must be >= 1");
        }
        heap_.reserve(k);
    }

    void
    offer(float score, uint32_t ordinal) {
        if (heap_.size() < k_) {
            heap_.push_back({score, ordinal});
            std::push_heap(heap_.begin(), heap_.end(), better_);
            return;
        }
        // The heap root is the worst kept entry; evict it when the newcomer beats it.
        if (better_(Entry{score, ordinal}, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), better_);
            heap_.back() = {score, ordinal};
            std::push_heap(heap_.begin(), heap_.end(), better_);
        }
    }

    bool
    full() const noexcept {
        return heap_.size() == k_;
    }

    // Current k-th best score; -inf until the heap fills.
    float
    threshold() const noexcept {
        return full() ? heap_.front().score : -std::numeric_limits<float>::infinity();
    }

    // Drains the heap, best first.
    std::vector<Entry>
    take_sorted() {
        std::vector<Entry> out = std::move(heap_);
        heap_.clear();
        std::sort(out.begin(), out.end(), better_);
        return out;
    }

 private:
    // "a ranks ahead of b". Used as the heap comparator, which floats the
    // worst-ranked entry to the root (make_heap's maximum is the element nothing
    // compares "ahead of" under the predicate's role as operator<).
    struct Better {
        const std::vector<std::string>* ids;

        bool
        operator()(const Entry& a, const Entry& b) const {
            if (a.score != b.score) {
                return a.score > b.score;
            }
            return (*ids)[a.ordinal] < (*ids)[b.ordinal];
        }
    };

    std::size_t k_;
    const std::vector<std::string>& ids_;
    Better better_{&ids_};
    std::vector<Entry> heap_;
};

}  // namespace laconic
