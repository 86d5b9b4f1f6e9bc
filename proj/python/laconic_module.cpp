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

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "laconic/approx_index.hpp"
#include "laconic/bench.hpp"
#include "laconic/encoder.hpp"
#include "laconic/error.hpp"
#include "laconic/eval.hpp"
#include "laconic/exact_index.hpp"
#include "laconic/index_io.hpp"
#include "laconic/training.hpp"

namespace py = pybind11;

namespace {

using namespace laconic;

using Entries = std::vector<std::pair<uint32_t, float>>;
using Hits = std::vector<std::pair<std::string, float>>;

SparseVector
vec_of(uint32_t vocab, const Entries& entries) {
    std::vector<TermWeight> tw;
    tw.reserve(entries.size());
    for (const auto& [term, weight] : entries) {
        tw.push_back({term, weight});
    }
    // Python callers hand entries in whatever order they like; canonicalize here
    // and let from_entries reject duplicates.
    std::stable_sort(tw.begin(), tw.end(), [](const TermWeight& a, const TermWeight& b) {
        return a.term < b.term;
    });
    return SparseVector::from_entries(vocab, std::move(tw));
}

Entries
entries_of(const SparseVector& v) {
    Entries out;
    out.reserve(v.nnz());
    for (const auto& e : v.entries()) {
        out.emplace_back(e.term, e.weight);
    }
    return out;
}

Hits
hits_of(const std::vector<SearchHit>& hits) {
    Hits out;
    out.reserve(hits.size());
    for (const auto& h : hits) {
        out.emplace_back(h.id, h.score);
    }
    return out;
}

LogitMatrix
matrix_of(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        throw ContractViolation("logit matrix needs at least one row");
    }
    LogitMatrix H;
    H.rows = rows.size();
    H.cols = rows[0].size();
    H.values.reserve(H.rows * H.cols);
    for (const auto& row : rows) {
        if (row.size() != H.cols) {
            throw ContractViolation("logit matrix rows must share one width");
        }
        H.values.insert(H.values.end(), row.begin(), row.end());
    }
    return H;
}

RunFile
run_of(const std::map<std::string, Hits>& rankings) {
    RunFile run;
    for (const auto& [qid, entries] : rankings) {
        auto& out = run.rankings[qid];
        for (const auto& [doc, score] : entries) {
            out.push_back({doc, static_cast<double>(score)});
        }
        std::sort(out.begin(), out.end(), [](const RunEntry& a, const RunEntry& b) {
            if (a.score != b.score) {
                return a.score > b.score;
            }
            return a.doc_id < b.doc_id;
        });
    }
    return run;
}

Qrels
qrels_of(const std::map<std::string, std::map<std::string, int32_t>>& judgments) {
    Qrels q;
    q.judgments = judgments;
    return q;
}

}  // namespace

PYBIND11_MODULE(_laconic, m) {
    m.doc() = "Learned-sparse-retrieval core: encoding, contrastive losses, exact and approximate search";

    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def(
        "dot",
        [](uint32_t vocab, const Entries& a, const Entries& b) {
            return dot(vec_of(vocab, a), vec_of(vocab, b));
        },
        py::arg("vocab"), py::arg("a"), py::arg("b"),
        "Sparse dot product of two term->weight entry lists over a shared vocabulary.");

    m.def(
        "splade_pool",
        [](const std::vector<std::vector<double>>& rows) { return entries_of(splade_pool(matrix_of(rows))); },
        py::arg("logits"), "log(1 + relu(column max)) pooling; returns sorted (term, weight) pairs.");

    m.def(
        "infonce",
        [](const std::vector<std::vector<double>>& scores, const std::vector<uint32_t>& positives) {
            const auto H = matrix_of(scores);
            ScoreMatrix s(H.rows, H.cols);
            s.scores = H.values;
            if (positives.size() != s.rows) {
                throw ContractViolation("infonce: one positive index per row required");
            }
            s.positive_index = positives;
            return infonce_loss(s);
        },
        py::arg("scores"), py::arg("positives"), "Mean InfoNCE over a query-by-candidate score grid.");

    m.def(
        "flops_reg",
        [](uint32_t vocab, const std::vector<Entries>& batch) {
            std::vector<SparseVector> vecs;
            vecs.reserve(batch.size());
            for (const auto& entries : batch) {
                vecs.push_back(vec_of(vocab, entries));
            }
            return flops_reg(vecs);
        },
        py::arg("vocab"), py::arg("batch"), "Sum over terms of squared mean activation.");

    m.def("warmup", &warmup, py::arg("step"), py::arg("total_steps"), py::arg("exponent") = 2.0,
          "Regularizer ramp: min(1, (step/total)^exponent).");

    m.def(
        "ndcg_at_k",
        [](const std::map<std::string, Hits>& run,
           const std::map<std::string, std::map<std::string, int32_t>>& qrels, std::size_t k) {
            return ndcg_at_k(run_of(run), qrels_of(qrels), k).mean;
        },
        py::arg("run"), py::arg("qrels"), py::arg("k"));

    m.def(
        "recall_at_k",
        [](const std::map<std::string, Hits>& run,
           const std::map<std::string, std::map<std::string, int32_t>>& qrels, std::size_t k) {
            return recall_at_k(run_of(run), qrels_of(qrels), k).mean;
        },
        py::arg("run"), py::arg("qrels"), py::arg("k"));

    m.def(
        "estimate_memory_dense",
        [](uint64_t doc_count, uint64_t dim, uint64_t bytes_per_value) {
            return estimate_memory_dense(doc_count, dim, bytes_per_value).bytes;
        },
        py::arg("doc_count"), py::arg("dim"), py::arg("bytes_per_value"));

    m.def(
        "estimate_memory_sparse",
        [](uint64_t total_postings, uint64_t bytes_per_posting, uint64_t overhead_bytes) {
            return estimate_memory_sparse(total_postings, bytes_per_posting, overhead_bytes).bytes;
        },
        py::arg("total_postings"), py::arg("bytes_per_posting"), py::arg("overhead_bytes"));

    py::class_<InvertedIndex>(m, "ExactIndex")
        .def_static(
            "build",
            [](uint32_t vocab, const std::vector<std::pair<std::string, Entries>>& corpus) {
                std::vector<NamedVector> named;
                named.reserve(corpus.size());
                for (const auto& [id, entries] : corpus) {
                    named.push_back({id, vec_of(vocab, entries)});
                }
                return InvertedIndex::build(VocabSpec{vocab}, named);
            },
            py::arg("vocab"), py::arg("corpus"))
        .def(
            "search",
            [](const InvertedIndex& idx, const Entries& query, std::size_t k) {
                return hits_of(idx.search(vec_of(idx.vocab().size, query), k));
            },
            py::arg("query"), py::arg("k"))
        .def_property_readonly("doc_count", &InvertedIndex::doc_count)
        .def_property_readonly("total_postings", &InvertedIndex::total_postings)
        .def("save", [](const InvertedIndex& idx, const std::string& path) { save_index_file(path, idx); },
             py::arg("path"));

    py::class_<ApproxIndex>(m, "ApproxIndex")
        .def_static(
            "build",
            [](uint32_t vocab, const std::vector<std::pair<std::string, Entries>>& corpus, double alpha,
               uint32_t block_size, uint32_t summary_levels, double heap_factor) {
                std::vector<NamedVector> named;
                named.reserve(corpus.size());
                for (const auto& [id, entries] : corpus) {
                    named.push_back({id, vec_of(vocab, entries)});
                }
                ApproxParams params;
                params.alpha = alpha;
                params.block_size = block_size;
                params.summary_levels = summary_levels;
                params.heap_factor = heap_factor;
                return ApproxIndex::build(VocabSpec{vocab}, named, params);
            },
            py::arg("vocab"), py::arg("corpus"), py::arg("alpha") = 0.5, py::arg("block_size") = 8,
            py::arg("summary_levels") = 16, py::arg("heap_factor") = 0.9)
        .def(
            "search",
            [](const ApproxIndex& idx, const Entries& query, std::size_t k) {
                return hits_of(idx.search(vec_of(idx.vocab().size, query), k));
            },
            py::arg("query"), py::arg("k"))
        .def_property_readonly("doc_count", &ApproxIndex::doc_count)
        .def("save", [](const ApproxIndex& idx, const std::string& path) { save_index_file(path, idx); },
             py::arg("path"));

    m.def(
        "load_index",
        [](const std::string& path) -> py::object {
            auto loaded = load_index_file(path);
            if (std::holds_alternative<InvertedIndex>(loaded)) {
                return py::cast(std::get<InvertedIndex>(std::move(loaded)));
            }
            return py::cast(std::get<ApproxIndex>(std::move(loaded)));
        },
        py::arg("path"));
}
