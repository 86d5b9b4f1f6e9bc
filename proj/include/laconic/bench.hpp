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
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "laconic/approx_index.hpp"
#include "laconic/exact_index.hpp"
#include "laconic/sparse_vector.hpp"

namespace laconic {

struct BenchReport {
    double queries_per_second = 0.0;
    double p50_ms = 0.0;  // nearest-rank percentiles over per-query latencies
    double p95_ms = 0.0;
    double p99_ms = 0.0;
    uint32_t thread_count = 1;
    uint64_t total_queries = 0;
    double wall_time_s = 0.0;
};

enum class MemoryKind {
    dense,
    sparse,
};

struct MemoryEstimate {
    MemoryKind kind = MemoryKind::dense;
    uint64_t bytes = 0;
    // Inputs echoed for reporting; the unused ones stay zero.
    uint64_t doc_count = 0;
    uint64_t dim = 0;
    uint64_t total_postings = 0;
    uint64_t bytes_per_unit = 0;
    uint64_t overhead_bytes = 0;
};

// Runs `warmup_iters` untimed passes over the whole query set, then one timed pass
// with the queries split into contiguous chunks across `threads` workers. Search
// results are discarded; only latency is recorded.
BenchReport
measure_qps(const std::function<void(const SparseVector&)>& search_one, std::span<const SparseVector> queries,
            uint32_t threads, uint32_t warmup_iters);

BenchReport
measure_qps(const InvertedIndex& index, std::span<const SparseVector> queries, std::size_t k, uint32_t threads,
            uint32_t warmup_iters);

BenchReport
measure_qps(const ApproxIndex& index, std::span<const SparseVector> queries, std::size_t k, uint32_t threads,
            uint32_t warmup_iters);

// bytes = doc_count * dim * bytes_per_value (flat dense embedding matrix).
MemoryEstimate
estimate_memory_dense(uint64_t doc_count, uint64_t dim, uint64_t bytes_per_value);

// bytes = total_postings * bytes_per_posting + overhead_bytes (inverted index).
MemoryEstimate
estimate_memory_sparse(uint64_t total_postings, uint64_t bytes_per_posting, uint64_t overhead_bytes);

void
write_bench_json(std::ostream& out, const BenchReport& report);

std::string
bench_csv_header();

// One plot-ready row; `ndcg` fills the quality column when provided.
std::string
bench_csv_row(const BenchReport& report, const std::string& label, std::optional<double> ndcg = std::nullopt);

}  // namespace laconic
