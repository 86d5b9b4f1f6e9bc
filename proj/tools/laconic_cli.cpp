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
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "laconic/bench.hpp"
#include "laconic/encoder.hpp"
#include "laconic/error.hpp"
#include "laconic/eval.hpp"
#include "laconic/index_io.hpp"
#include "laconic/training.hpp"
#include "laconic/vector_io.hpp"

namespace {

using namespace laconic;

// LACONIC_THREADS, when set to a positive integer, caps every worker pool.
uint32_t
capped_threads(uint32_t requested) {
    const char* env = std::getenv("LACONIC_THREADS");
    if (env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) {
            return static_cast<uint32_t>(std::min<unsigned long>(requested, cap));
        }
    }
    return requested;
}

std::string
single_line(std::string text) {
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

struct IndexArgs {
    std::string corpus_path;
    std::string out_path;
    uint32_t vocab = 0;
    std::string kind = "exact";
    ApproxParams approx;
};

struct SearchArgs {
    std::string index_path;
    std::string queries_path;
    std::string out_path;
    std::size_t k = 10;
    uint32_t threads = 1;
};

struct EvalArgs {
    std::string run_path;
    std::string qrels_path;
    std::size_t k = 10;
};

struct BenchArgs {
    std::string index_path;
    std::string queries_path;
    std::string json_path;
    std::string csv_path;
    std::string qrels_path;
    std::string label;
    std::size_t k = 10;
    uint32_t threads = 1;
    uint32_t warmup = 1;
};

struct TrainArgs {
    std::string corpus_path;
    std::string params_out;
    std::string metrics_out;
    uint64_t seed = 0;
    std::string phase = "pre_finetune";
    TrainConfig cfg;
};

struct EncodeArgs {
    std::string params_path;
    std::string tokens_path;
    std::string out_path;
};

uint64_t
id_table_bytes(const std::vector<std::string>& ids) {
    uint64_t bytes = 0;
    for (const auto& id : ids) {
        bytes += 4 + id.size();
    }
    return bytes;
}

constexpr uint64_t kHeaderBytes = 16;  // magic + version + kind + pad + vocab + doc count

MemoryEstimate
estimate_exact(const InvertedIndex& idx) {
    const uint64_t overhead = kHeaderBytes + id_table_bytes(idx.doc_ids()) + 8 + 4ULL * idx.vocab().size;
    return estimate_memory_sparse(idx.total_postings(), 8, overhead);
}

MemoryEstimate
estimate_approx(const ApproxIndex& idx) {
    uint64_t postings = 0;
    for (const auto& vec : idx.forward_store()) {
        postings += vec.nnz();
    }
    uint64_t overhead = kHeaderBytes + id_table_bytes(idx.doc_ids()) + 24 + 4ULL * idx.doc_count();
    for (uint32_t t = 0; t < idx.vocab().size; ++t) {
        overhead += 4;
        for (const auto& b : idx.blocks(t)) {
            overhead += 12 + 4ULL * b.docs.size() + 5ULL * b.summary.size();
        }
    }
    return estimate_memory_sparse(postings, 8, overhead);
}

int
run_index(const IndexArgs& args) {
    const VocabSpec vocab{args.vocab};
    const auto corpus = read_vectors_jsonl_file(args.corpus_path, vocab);
    uint64_t postings = 0;
    MemoryEstimate estimate;
    if (args.kind == "exact") {
        const auto idx = InvertedIndex::build(vocab, corpus);
        save_index_file(args.out_path, idx);
        postings = idx.total_postings();
        estimate = estimate_exact(idx);
    } else {
        const auto idx = ApproxIndex::build(vocab, corpus, args.approx);
        save_index_file(args.out_path, idx);
        estimate = estimate_approx(idx);
        postings = estimate.total_postings;
    }
    std::printf("docs: %zu\n", corpus.size());
    std::printf("postings: %llu\n", static_cast<unsigned long long>(postings));
    std::printf("estimated_memory_bytes: %llu\n", static_cast<unsigned long long>(estimate.bytes));
    return 0;
}

int
run_search(const SearchArgs& args) {
    const auto loaded = load_index_file(args.index_path);
    const auto vocab = std::holds_alternative<InvertedIndex>(loaded)
                           ? std::get<InvertedIndex>(loaded).vocab()
                           : std::get<ApproxIndex>(loaded).vocab();
    const auto queries = read_vectors_jsonl_file(args.queries_path, vocab);
    if (args.k == 0) {
        throw ContractViolation("search: k must be >= 1");
    }

    auto search_one = [&](const SparseVector& q) {
        return std::holds_alternative<InvertedIndex>(loaded) ? std::get<InvertedIndex>(loaded).search(q, args.k)
                                                             : std::get<ApproxIndex>(loaded).search(q, args.k);
    };

    std::vector<std::vector<SearchHit>> hits(queries.size());
    const auto threads = std::max<uint32_t>(1, capped_threads(args.threads));
    if (threads == 1 || queries.size() <= 1) {
        for (std::size_t i = 0; i < queries.size(); ++i) {
            hits[i] = search_one(queries[i].vec);
        }
    } else {
        const auto workers = std::min<std::size_t>(threads, queries.size());
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = queries.size() * w / workers; i < queries.size() * (w + 1) / workers; ++i) {
                    hits[i] = search_one(queries[i].vec);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    RunFile run;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        auto& entries = run.rankings[queries[i].id];
        for (const auto& hit : hits[i]) {
            entries.push_back({hit.id, static_cast<double>(hit.score)});
        }
    }
    write_run_file(args.out_path, run);
    std::printf("queries: %zu\n", queries.size());
    return 0;
}

int
run_eval(const EvalArgs& args) {
    const auto run = parse_run_file(args.run_path);
    const auto qrels = parse_qrels_file(args.qrels_path);
    const auto ndcg = ndcg_at_k(run, qrels, args.k);
    const auto recall = recall_at_k(run, qrels, args.k);
    std::printf("nDCG@%zu: %.4f\n", args.k, ndcg.mean);
    std::printf("recall@%zu: %.4f\n", args.k, recall.mean);
    std::printf("evaluated queries: %zu\n", ndcg.evaluated_queries);
    std::printf("unjudged run queries: %zu\n", ndcg.unjudged_run_queries);
    return 0;
}

int
run_bench(const BenchArgs& args) {
    const auto loaded = load_index_file(args.index_path);
    const auto vocab = std::holds_alternative<InvertedIndex>(loaded)
                           ? std::get<InvertedIndex>(loaded).vocab()
                           : std::get<ApproxIndex>(loaded).vocab();
    const auto named_queries = read_vectors_jsonl_file(args.queries_path, vocab);
    std::vector<SparseVector> queries;
    queries.reserve(named_queries.size());
    for (const auto& nq : named_queries) {
        queries.push_back(nq.vec);
    }
    const auto threads = std::max<uint32_t>(1, capped_threads(args.threads));
    const auto report = std::holds_alternative<InvertedIndex>(loaded)
                            ? measure_qps(std::get<InvertedIndex>(loaded), queries, args.k, threads, args.warmup)
                            : measure_qps(std::get<ApproxIndex>(loaded), queries, args.k, threads, args.warmup);

    std::optional<double> ndcg;
    if (!args.qrels_path.empty()) {
        RunFile run;
        for (std::size_t i = 0; i < queries.size(); ++i) {
            const auto hits = std::holds_alternative<InvertedIndex>(loaded)
                                  ? std::get<InvertedIndex>(loaded).search(queries[i], args.k)
                                  : std::get<ApproxIndex>(loaded).search(queries[i], args.k);
            auto& entries = run.rankings[named_queries[i].id];
            for (const auto& hit : hits) {
                entries.push_back({hit.id, static_cast<double>(hit.score)});
            }
        }
        ndcg = ndcg_at_k(run, parse_qrels_file(args.qrels_path), args.k).mean;
    }

    if (args.json_path.empty()) {
        write_bench_json(std::cout, report);
    } else {
        std::ofstream out(args.json_path);
        if (!out) {
            throw IoError("cannot open " + args.json_path + " for writing");
        }
        write_bench_json(out, report);
    }
    if (!args.csv_path.empty()) {
        const bool fresh = !std::ifstream(args.csv_path).good();
        std::ofstream out(args.csv_path, std::ios::app);
        if (!out) {
            throw IoError("cannot open " + args.csv_path + " for writing");
        }
        if (fresh) {
            out << bench_csv_header();
        }
        const auto label = args.label.empty()
                               ? (std::holds_alternative<InvertedIndex>(loaded) ? "exact" : "approx")
                               : args.label;
        out << bench_csv_row(report, label, ndcg);
    }
    std::printf("qps: %.6g\n", report.queries_per_second);
    if (ndcg.has_value()) {
        std::printf("nDCG@%zu: %.4f\n", args.k, *ndcg);
    }
    return 0;
}

int
run_train(const TrainArgs& args) {
    TrainConfig cfg = args.cfg;
    cfg.phase = args.phase == "finetune" ? TrainPhase::finetune : TrainPhase::pre_finetune;
    cfg.validate();
    const auto corpus = read_triplets_jsonl_file(args.corpus_path);
    const auto result = train_toy(corpus, cfg, args.seed);
    result.params.save_json_file(args.params_out);
    write_metrics_csv_file(args.metrics_out, result.metrics);
    if (result.metrics.empty()) {
        std::printf("epochs: 0\n");
    } else {
        std::printf("epochs: %zu\n", result.metrics.size());
        std::printf("final_loss: %.9g\n", result.metrics.back().loss);
    }
    return 0;
}

int
run_encode(const EncodeArgs& args) {
    const auto params = ToyEncoderParams::load_json_file(args.params_path);
    const auto sequences = read_tokens_jsonl_file(args.tokens_path);
    std::vector<NamedVector> rows;
    rows.reserve(sequences.size());
    for (const auto& seq : sequences) {
        rows.push_back({seq.id, splade_pool(toy_encode(seq.tokens, params))});
    }
    write_vectors_jsonl_file(args.out_path, rows);
    std::printf("encoded: %zu\n", rows.size());
    return 0;
}

void
add_config_flag(CLI::App* cmd) {
    static std::string sink;  // value is consumed in expand_config, before CLI11 sees it
    cmd->add_option("--config", sink, "key=value defaults for this command; explicit flags win");
}

std::string
trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    return s.substr(begin, s.find_last_not_of(" \t\r") - begin + 1);
}

// Merges `key=value` lines from a --config file into the argument list as `--key value`
// pairs, skipping keys already given explicitly so command-line flags win. Unknown keys
// then fail CLI11 parsing by name. Returns the args in natural order, without argv[0].
std::vector<std::string>
expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            break;
        }
    }
    if (path.empty()) {
        return args;
    }
    std::ifstream in(path);
    if (!in) {
        throw ContractViolation("cannot open config file '" + path + "'");
    }
    std::set<std::string> given;
    for (const auto& a : args) {
        if (a.rfind("--", 0) == 0) {
            given.insert(a.substr(0, a.find('=')));
        }
    }
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto entry = trimmed(line);
        if (entry.empty() || entry[0] == '#' || entry[0] == ';') {
            continue;
        }
        const auto eq = entry.find('=');
        if (eq == std::string::npos || trimmed(entry.substr(0, eq)).empty()) {
            throw ContractViolation(path + " line " + std::to_string(lineno) + ": expected key=value");
        }
        const auto key = "--" + trimmed(entry.substr(0, eq));
        auto value = trimmed(entry.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
            value.back() == value.front()) {
            value = value.substr(1, value.size() - 2);
        }
        if (given.count(key) != 0) {
            continue;
        }
        args.push_back(key);
        args.push_back(value);
    }
    return args;
}

}  // namespace

int
main(int argc, char** argv) {
    CLI::App app{"laconic: learned-sparse-retrieval toolkit", "laconic"};
    app.require_subcommand(1);

    IndexArgs index_args;
    auto* cmd_index = app.add_subcommand("index", "Build an LCNX index from sparse-vector JSONL");
    add_config_flag(cmd_index);
    cmd_index->add_option("--corpus", index_args.corpus_path, "corpus JSONL path")->required();
    cmd_index->add_option("--out", index_args.out_path, "output index path")->required();
    cmd_index->add_option("--vocab", index_args.vocab, "vocabulary size")->required()
        ->check(CLI::Range(1u, 4294967295u));
    cmd_index->add_option("--kind", index_args.kind, "index kind")->check(CLI::IsMember({"exact", "approx"}));
    cmd_index->add_option("--alpha", index_args.approx.alpha, "fraction of each posting list kept");
    cmd_index->add_option("--block-size", index_args.approx.block_size, "max postings per block");
    cmd_index->add_option("--summary-levels", index_args.approx.summary_levels, "quantization levels");
    cmd_index->add_option("--heap-factor", index_args.approx.heap_factor, "dynamic pruning factor");

    SearchArgs search_args;
    auto* cmd_search = app.add_subcommand("search", "Run top-k queries against an index, write a TREC run");
    add_config_flag(cmd_search);
    cmd_search->add_option("--index", search_args.index_path, "LCNX index path")->required();
    cmd_search->add_option("--queries", search_args.queries_path, "query JSONL path")->required();
    cmd_search->add_option("--out", search_args.out_path, "output run-file path")->required();
    cmd_search->add_option("--k", search_args.k, "results per query");
    cmd_search->add_option("--threads", search_args.threads, "search worker count");

    EvalArgs eval_args;
    auto* cmd_eval = app.add_subcommand("eval", "Score a TREC run against qrels");
    add_config_flag(cmd_eval);
    cmd_eval->add_option("--run", eval_args.run_path, "run file path")->required();
    cmd_eval->add_option("--qrels", eval_args.qrels_path, "qrels path")->required();
    cmd_eval->add_option("--k", eval_args.k, "metric cutoff");

    BenchArgs bench_args;
    auto* cmd_bench = app.add_subcommand("bench", "Measure search throughput and latency percentiles");
    add_config_flag(cmd_bench);
    cmd_bench->add_option("--index", bench_args.index_path, "LCNX index path")->required();
    cmd_bench->add_option("--queries", bench_args.queries_path, "query JSONL path")->required();
    cmd_bench->add_option("--k", bench_args.k, "results per query");
    cmd_bench->add_option("--threads", bench_args.threads, "search worker count");
    cmd_bench->add_option("--warmup", bench_args.warmup, "untimed passes before measuring");
    cmd_bench->add_option("--json", bench_args.json_path, "write the report here instead of stdout");
    cmd_bench->add_option("--csv", bench_args.csv_path, "append a plot-ready CSV row here");
    cmd_bench->add_option("--label", bench_args.label, "CSV row label");
    cmd_bench->add_option("--qrels", bench_args.qrels_path, "fill the CSV quality column from these qrels");

    TrainArgs train_args;
    auto* cmd_train = app.add_subcommand("train-toy", "Train the toy encoder on triplet JSONL");
    add_config_flag(cmd_train);
    cmd_train->add_option("--corpus", train_args.corpus_path, "triplet JSONL path")->required();
    cmd_train->add_option("--params-out", train_args.params_out, "output params JSON path")->required();
    cmd_train->add_option("--metrics-out", train_args.metrics_out, "output metrics CSV path")->required();
    cmd_train->add_option("--seed", train_args.seed, "RNG seed");
    cmd_train->add_option("--phase", train_args.phase, "curriculum phase")
        ->check(CLI::IsMember({"pre_finetune", "finetune"}));
    cmd_train->add_option("--lambda-q", train_args.cfg.lambda_q, "query FLOPs weight");
    cmd_train->add_option("--lambda-d", train_args.cfg.lambda_d, "document FLOPs weight");
    cmd_train->add_option("--warmup-steps", train_args.cfg.warmup_steps, "regularizer ramp length");
    cmd_train->add_option("--warmup-exponent", train_args.cfg.warmup_exponent, "regularizer ramp exponent");
    cmd_train->add_option("--hard-negatives", train_args.cfg.hard_negatives_per_query,
                          "hard negatives per query (finetune)");
    cmd_train->add_option("--batch-size", train_args.cfg.batch_size, "triplets per step");
    cmd_train->add_option("--epochs", train_args.cfg.epochs, "passes over the corpus");
    cmd_train->add_option("--lr", train_args.cfg.learning_rate, "SGD step size");
    cmd_train->add_option("--temperature", train_args.cfg.temperature, "score temperature");
    cmd_train->add_option("--tokens", train_args.cfg.model_tokens, "token table size");
    cmd_train->add_option("--dim", train_args.cfg.model_dim, "hidden width");
    cmd_train->add_option("--vocab", train_args.cfg.model_vocab, "output vocabulary size");
    cmd_train->add_option("--init-scale", train_args.cfg.init_scale, "uniform init half-range");

    EncodeArgs encode_args;
    auto* cmd_encode = app.add_subcommand("encode", "Encode token-id JSONL into sparse-vector JSONL");
    add_config_flag(cmd_encode);
    cmd_encode->add_option("--params", encode_args.params_path, "encoder params JSON")->required();
    cmd_encode->add_option("--tokens", encode_args.tokens_path, "token JSONL path")->required();
    cmd_encode->add_option("--out", encode_args.out_path, "output vector JSONL path")->required();

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());  // parse(vector) pops from the back
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help / --version
        }
        std::cerr << "error: " << single_line(e.what()) << '\n';
        return 1;
    } catch (const ContractViolation& e) {
        std::cerr << "error: " << single_line(e.what()) << '\n';
        return 1;
    }

    try {
        if (app.got_subcommand(cmd_index)) {
            return run_index(index_args);
        }
        if (app.got_subcommand(cmd_search)) {
            return run_search(search_args);
        }
        if (app.got_subcommand(cmd_eval)) {
            return run_eval(eval_args);
        }
        if (app.got_subcommand(cmd_bench)) {
            return run_bench(bench_args);
        }
        if (app.got_subcommand(cmd_train)) {
            return run_train(train_args);
        }
        if (app.got_subcommand(cmd_encode)) {
            return run_encode(encode_args);
        }
    } catch (const ContractViolation& e) {
        std::cerr << "error: " << single_line(e.what()) << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << single_line(e.what()) << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << single_line(e.what()) << '\n';
        return 3;
    }
    std::cerr << "error: no subcommand selected\n";
    return 1;
}
