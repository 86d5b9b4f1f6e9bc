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

#include "laconic/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>
#include <vector>

#include "json.hpp"

#include "laconic/error.hpp"

namespace laconic {

namespace {

using Clock = std::chrono::steady_clock;

double
nearest_rank(const std::vector<double>& sorted, double percentile) {
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

}  // namespace

BenchReport
measure_qps(const std::function<void(const SparseVector&)>& search_one, std::span<const SparseVector> queries,
            uint32_t threads, uint32_t warmup_iters) {
    if (queries.empty()) {
        throw ContractViolation("measure_qps: query set must be nonempty");
    }
    if (threads == 0) {
        throw ContractViolation("measure_qps: thread count must be >= 1");
    }
    for (uint32_t w = 0; w < warmup_iters; ++w) {
        for (const auto& q : queries) {
            search_one(q);
        }
    }

    const std::size_t n = queries.size();
    std::vector<std::vector<double>> lat_per_worker(threads);
    std::vector<std::thread> workers;
    workers.reserve(threads);
    const auto t0 = Clock::now();
    for (uint32_t w = 0; w < threads; ++w) {
        const std::size_t begin = n * w / threads;
        const std::size_t end = n * (w + 1) / threads;
        workers.emplace_back([&, w, begin, end] {
            auto& lat = lat_per_worker[w];
            lat.reserve(end - begin);
            for (std::size_t i = begin; i < end; ++i) {
                const auto q0 = Clock::now();
                search_one(queries[i]);
                lat.push_back(std::chrono::duration<double, std::milli>(Clock::now() - q0).count());
            }
        });
    }
    for (auto& t : workers) {
        t.join();
    }
    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();

    std::vector<double> lat;
    lat.reserve(n);
    for (const auto& chunk : lat_per_worker) {
        lat.insert(lat.end(), chunk.begin(), chunk.end());
    }
    std::sort(lat.begin(), lat.end());

    BenchReport r;
    r.total_queries = n;
    r.thread_count = threads;
    r.wall_time_s = wall;
    r.queries_per_second = static_cast<double>(n) / wall;
    r.p50_ms = nearest_rank(lat, 50.0);
    r.p95_ms = nearest_rank(lat, 95.0);
    r.p99_ms = nearest_rank(lat, 99.0);
    return r;
}

BenchReport
measure_qps(const InvertedIndex& index, std::span<const SparseVector> queries, std::size_t k, uint32_t threads,
            uint32_t warmup_iters) {
    if (k == 0) {
        throw ContractViolation("measure_qps: k must be >= 1");
    }
    for (const auto& q : queries) {
        if (q.vocab_size() != index.vocab().size) {
            throw ContractViolation("measure_qps: query vocabulary does not match the index");
        }
    }
    return measure_qps([&](const SparseVector& q) { (void)index.search(q, k); }, queries, threads, warmup_iters);
}

BenchReport
measure_qps(const ApproxIndex& index, std::span<const SparseVector> queries, std::size_t k, uint32_t threads,
            uint32_t warmup_iters) {
    if (k == 0) {
        throw ContractViolation("measure_qps: k must be >= 1");
    }
    for (const auto& q : queries) {
        if (q.vocab_size() != index.vocab().size) {
            throw ContractViolation("measure_qps: query vocabulary does not match the index");
        }
    }
    return measure_qps([&](const SparseVector& q) { (void)index.search(q, k); }, queries, threads, warmup_iters);
}

MemoryEstimate
estimate_memory_dense(uint64_t doc_count, uint64_t dim, uint64_t bytes_per_value) {
    MemoryEstimate e;
    e.kind = MemoryKind::dense;
    e.doc_count = doc_count;
    e.dim = dim;
    e.bytes_per_unit = bytes_per_value;
    e.bytes = doc_count * dim * bytes_per_value;
    return e;
}

MemoryEstimate
estimate_memory_sparse(uint64_t total_postings, uint64_t bytes_per_posting, uint64_t overhead_bytes) {
    MemoryEstimate e;
    e.kind = MemoryKind::sparse;
    e.total_postings = total_postings;
    e.bytes_per_unit = bytes_per_posting;
    e.overhead_bytes = overhead_bytes;
    e.bytes = total_postings * bytes_per_posting + overhead_bytes;
    return e;
}

void
write_bench_json(std::ostream& out, const BenchReport& report) {
    nlohmann::json doc;
    doc["queries_per_second"] = report.queries_per_second;
    doc["p50_ms"] = report.p50_ms;
    doc["p95_ms"] = report.p95_ms;
    doc["p99_ms"] = report.p99_ms;
    doc["thread_count"] = report.thread_count;
    doc["total_queries"] = report.total_queries;
    doc["wall_time_s"] = report.wall_time_s;
    out << doc.dump(2) << '\n';
}

std::string
bench_csv_header() {
    return "label,qps,p50_ms,p95_ms,p99_ms,threads,total_queries,ndcg\n";
}

std::string
bench_csv_row(const BenchReport& report, const std::string& label, std::optional<double> ndcg) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%.6g,%.6g,%.6g,%.6g,%u,%llu,", label.c_str(), report.queries_per_second,
                  report.p50_ms, report.p95_ms, report.p99_ms, report.thread_count,
                  static_cast<unsigned long long>(report.total_queries));
    std::string row(buf);
    if (ndcg.has_value()) {
        std::snprintf(buf, sizeof buf, "%.6g", *ndcg);
        row += buf;
    }
    row += '\n';
    return row;
}

}  // namespace laconic
