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
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace laconic {

// Graded judgments: query -> doc -> relevance (>= 0). TREC text form:
// `query_id iter doc_id rel`, whitespace-separated.
struct Qrels {
    std::map<std::string, std::map<std::string, int32_t>> judgments;
};

struct RunEntry {
    std::string doc_id;
    double score;

    bool
    operator==(const RunEntry&) const = default;
};

// Ranked results per query, held sorted by (descending score, ascending doc_id).
// TREC text form: `query_id Q0 doc_id rank score tag`.
struct RunFile {
    std::map<std::string, std::vector<RunEntry>> rankings;
    std::string tag = "laconic";
};

struct MetricSummary {
    double mean = 0.0;
    std::size_t evaluated_queries = 0;
    std::size_t unjudged_run_queries = 0;  // run queries with no qrels entry at all
};

// Gain (2^rel - 1), discount log2(rank + 1), ideal ordering from the qrels. Queries
// whose ideal DCG is zero are left out of the mean; a judged query missing from the
// run contributes 0. An empty evaluated set yields mean 1.0 by convention.
MetricSummary
ndcg_at_k(const RunFile& run, const Qrels& qrels, std::size_t k);

// |relevant (rel > 0) in top-k| / |relevant|; queries without relevant docs are left
// out; same vacuous-mean convention as ndcg_at_k.
MetricSummary
recall_at_k(const RunFile& run, const Qrels& qrels, std::size_t k);

Qrels
parse_qrels(std::istream& in, const std::string& source_name = "qrels");

Qrels
parse_qrels_file(const std::string& path);

RunFile
parse_run(std::istream& in, const std::string& source_name = "run");

RunFile
parse_run_file(const std::string& path);

// Emits `query_id Q0 doc_id rank score tag` rows, queries in map order, ranks 1-based,
// scores with %.9g so single-precision scores survive a parse round-trip.
void
write_run(std::ostream& out, const RunFile& run);

void
write_run_file(const std::string& path, const RunFile& run);

}  // namespace laconic
