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

#include <atomic>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "laconic/bench.hpp"
#include "laconic/error.hpp"
#include "laconic/index_io.hpp"

#include "support/test_rng.hpp"
#include "support/toy_corpus.hpp"

using namespace laconic;

TEST_CASE("measure_qps reports consistent numbers") {
    test::Rng rng(83);
    std::vector<SparseVector> queries;
    for (int i = 0; i < 64; ++i) {
        queries.push_back(test::random_vector(rng, 16, 3));
    }
    std::atomic<uint64_t> calls{0};
    const auto report = measure_qps([&](const SparseVector&) { calls.fetch_add(1); }, queries, 2, 1);
    CHECK(calls.load() == 2 * queries.size());  // one warmup pass + one timed pass
    CHECK(report.total_queries == queries.size());
    CHECK(report.thread_count == 2);
    CHECK(report.wall_time_s > 0.0);
    CHECK(report.queries_per_second ==
          doctest::Approx(static_cast<double>(queries.size()) / report.wall_time_s).epsilon(1e-12));
    CHECK(report.p50_ms <= report.p95_ms);
    CHECK(report.p95_ms <= report.p99_ms);
    CHECK(report.p50_ms >= 0.0);
}

TEST_CASE("single query percentiles coincide") {
    std::vector<SparseVector> one{SparseVector::from_entries(4, {{0, 1.0f}})};
    const auto report = measure_qps([](const SparseVector&) {}, one, 1, 0);
    CHECK(report.total_queries == 1);
    CHECK(report.p50_ms == report.p95_ms);
    CHECK(report.p95_ms == report.p99_ms);
}

TEST_CASE("measure_qps validates inputs eagerly") {
    std::vector<SparseVector> none;
    CHECK_THROWS_AS(measure_qps([](const SparseVector&) {}, none, 1, 0), ContractViolation);

    std::vector<SparseVector> one{SparseVector::from_entries(4, {{0, 1.0f}})};
    CHECK_THROWS_AS(measure_qps([](const SparseVector&) {}, one, 0, 0), ContractViolation);

    std::vector<NamedVector> docs;
    docs.push_back({"a", SparseVector::from_entries(8, {{1, 2.0f}})});
    const auto idx = InvertedIndex::build(VocabSpec{8}, docs);
    std::vector<SparseVector> wrong{SparseVector::from_entries(4, {{0, 1.0f}})};
    CHECK_THROWS_AS(measure_qps(idx, wrong, 5, 1, 0), ContractViolation);
    std::vector<SparseVector> ok{SparseVector::from_entries(8, {{1, 1.0f}})};
    CHECK_THROWS_AS(measure_qps(idx, ok, 0, 1, 0), ContractViolation);
    CHECK(measure_qps(idx, ok, 5, 1, 0).total_queries == 1);
}

TEST_CASE("index overloads run the real search") {
    test::Rng rng(89);
    const auto corpus = test::random_corpus(rng, 80, 32, 6);
    const auto exact = InvertedIndex::build(VocabSpec{32}, corpus);
    const auto approx = ApproxIndex::build(VocabSpec{32}, corpus, ApproxParams{});
    std::vector<SparseVector> queries;
    for (int i = 0; i < 16; ++i) {
        queries.push_back(test::random_vector(rng, 32, 3));
    }
    const auto re = measure_qps(exact, queries, 10, 2, 1);
    const auto ra = measure_qps(approx, queries, 10, 2, 1);
    CHECK(re.total_queries == 16);
    CHECK(ra.total_queries == 16);
    CHECK(re.queries_per_second > 0.0);
    CHECK(ra.queries_per_second > 0.0);
}

TEST_CASE("dense memory estimates") {
    const auto zero = estimate_memory_dense(0, 4096, 4);
    CHECK(zero.bytes == 0);

    const auto small = estimate_memory_dense(10, 8, 4);
    CHECK(small.bytes == 320);
    CHECK(small.kind == MemoryKind::dense);
    CHECK(small.doc_count == 10);
    CHECK(small.dim == 8);
    CHECK(small.bytes_per_unit == 4);

    // A corpus-scale fp32 embedding matrix: ~135 GiB for 8.8M docs at dim 4096.
    const auto big = estimate_memory_dense(8841823, 4096, 4);
    CHECK(big.bytes == 144864428032ULL);
    CHECK(std::fabs(static_cast<double>(big.bytes) / (1024.0 * 1024.0 * 1024.0) - 134.9) < 0.5);
}

TEST_CASE("sparse memory estimates") {
    const auto zero = estimate_memory_sparse(0, 8, 0);
    CHECK(zero.bytes == 0);
    CHECK(zero.kind == MemoryKind::sparse);

    const auto e = estimate_memory_sparse(1000000, 8, 4096);
    CHECK(e.bytes == 8004096ULL);
    CHECK(e.total_postings == 1000000);
    CHECK(e.bytes_per_unit == 8);
    CHECK(e.overhead_bytes == 4096);

    // Linear in postings once overhead is fixed.
    const auto a = estimate_memory_sparse(100, 8, 64);
    const auto b = estimate_memory_sparse(200, 8, 64);
    const auto c = estimate_memory_sparse(300, 8, 64);
    CHECK(b.bytes - a.bytes == c.bytes - b.bytes);
}

TEST_CASE("saved exact index size tracks the sparse estimator") {
    test::Rng rng(97);
    const auto corpus = test::random_corpus(rng, 400, 64, 12, "doc");
    const auto idx = InvertedIndex::build(VocabSpec{64}, corpus);

    std::stringstream buf;
    save_index(buf, idx);
    const auto actual = static_cast<double>(buf.str().size());

    // Fixed section: header + id table + per-term posting counts.
    uint64_t overhead = 4 + 2 + 1 + 1 + 4 + 4 + 8 + 4ULL * idx.vocab().size;
    for (const auto& id : idx.doc_ids()) {
        overhead += 4 + id.size();
    }
    const auto est = estimate_memory_sparse(idx.total_postings(), 8, overhead);
    CHECK(std::fabs(static_cast<double>(est.bytes) - actual) <= 0.10 * actual);
}

TEST_CASE("bench json payload") {
    BenchReport r;
    r.queries_per_second = 1234.5;
    r.p50_ms = 0.5;
    r.p95_ms = 1.25;
    r.p99_ms = 2.0;
    r.thread_count = 4;
    r.total_queries = 100;
    r.wall_time_s = 0.081;
    std::stringstream buf;
    write_bench_json(buf, r);
    const auto parsed = nlohmann::json::parse(buf.str());
    CHECK(parsed.at("queries_per_second").get<double>() == 1234.5);
    CHECK(parsed.at("p50_ms").get<double>() == 0.5);
    CHECK(parsed.at("p95_ms").get<double>() == 1.25);
    CHECK(parsed.at("p99_ms").get<double>() == 2.0);
    CHECK(parsed.at("thread_count").get<uint32_t>() == 4);
    CHECK(parsed.at("total_queries").get<uint64_t>() == 100);
    CHECK(parsed.at("wall_time_s").get<double>() == 0.081);
}

TEST_CASE("bench csv rows") {
    CHECK(bench_csv_header() == "label,qps,p50_ms,p95_ms,p99_ms,threads,total_queries,ndcg\n");
    BenchReport r;
    r.queries_per_second = 1000.0;
    r.p50_ms = 0.25;
    r.p95_ms = 0.5;
    r.p99_ms = 0.75;
    r.thread_count = 2;
    r.total_queries = 64;
    const auto with = bench_csv_row(r, "exact", 0.75);
    CHECK(with == "exact,1000,0.25,0.5,0.75,2,64,0.75\n");
    const auto without = bench_csv_row(r, "approx");
    CHECK(without == "approx,1000,0.25,0.5,0.75,2,64,\n");
}
