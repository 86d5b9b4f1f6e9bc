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

#include "laconic/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "laconic/error.hpp"

namespace laconic {

namespace {

double
gain(int32_t rel) {
    return std::ldexp(1.0, rel) - 1.0;
}

double
discount(std::size_t rank_1based) {
    return std::log2(static_cast<double>(rank_1based + 1));
}

std::size_t
count_unjudged(const RunFile& run, const Qrels& qrels) {
    std::size_t n = 0;
    for (const auto& [qid, entries] : run.rankings) {
        if (qrels.judgments.find(qid) == qrels.judgments.end()) {
            ++n;
        }
    }
    return n;
}

std::vector<std::string>
split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    std::string t;
    while (ss >> t) {
        tokens.push_back(std::move(t));
    }
    return tokens;
}

}  // namespace

MetricSummary
ndcg_at_k(const RunFile& run, const Qrels& qrels, std::size_t k) {
    if (k == 0) {
        throw ContractViolation("ndcg_at_k: k must be >= 1");
    }
    MetricSummary out;
    out.unjudged_run_queries = count_unjudged(run, qrels);
    double sum = 0.0;
    for (const auto& [qid, judged] : qrels.judgments) {
        std::vector<int32_t> rels;
        rels.reserve(judged.size());
        for (const auto& [doc, rel] : judged) {
            rels.push_back(rel);
        }
        std::sort(rels.rbegin(), rels.rend());
        double idcg = 0.0;
        for (std::size_t i = 0; i < std::min(k, rels.size()); ++i) {
            idcg += gain(rels[i]) / discount(i + 1);
        }
        if (idcg <= 0.0) {
            continue;
        }
        double dcg = 0.0;
        auto it = run.rankings.find(qid);
        if (it != run.rankings.end()) {
            const auto& entries = it->second;
            for (std::size_t i = 0; i < std::min(k, entries.size()); ++i) {
                auto jt = judged.find(entries[i].doc_id);
                if (jt != judged.end()) {
                    dcg += gain(jt->second) / discount(i + 1);
                }
            }
        }
        sum += dcg / idcg;
        ++out.evaluated_queries;
    }
    out.mean = out.evaluated_queries > 0 ? sum / static_cast<double>(out.evaluated_queries) : 1.0;
    return out;
}

MetricSummary
recall_at_k(const RunFile& run, const Qrels& qrels, std::size_t k) {
    if (k == 0) {
        throw ContractViolation("recall_at_k: k must be >= 1");
    }
    MetricSummary out;
    out.unjudged_run_queries = count_unjudged(run, qrels);
    double sum = 0.0;
    for (const auto& [qid, judged] : qrels.judgments) {
        std::size_t relevant = 0;
        for (const auto& [doc, rel] : judged) {
            relevant += rel > 0 ? 1 : 0;
        }
        if (relevant == 0) {
            continue;
        }
        std::size_t found = 0;
        auto it = run.rankings.find(qid);
        if (it != run.rankings.end()) {
            const auto& entries = it->second;
            for (std::size_t i = 0; i < std::min(k, entries.size()); ++i) {
                auto jt = judged.find(entries[i].doc_id);
                if (jt != judged.end() && jt->second > 0) {
                    ++found;
                }
            }
        }
        sum += static_cast<double>(found) / static_cast<double>(relevant);
        ++out.evaluated_queries;
    }
    out.mean = out.evaluated_queries > 0 ? sum / static_cast<double>(out.evaluated_queries) : 1.0;
    return out;
}

Qrels
parse_qrels(std::istream& in, const std::string& source) {
    Qrels q;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = split_ws(line);
        if (tokens.empty()) {
            continue;
        }
        if (tokens.size() != 4) {
            throw ParseError(source + " line " + std::to_string(line_no) + ": expected `query iter doc rel`",
                             line_no);
        }
        int32_t rel = 0;
        try {
            std::size_t pos = 0;
            rel = std::stoi(tokens[3], &pos);
            if (pos != tokens[3].size() || rel < 0) {
                throw std::invalid_argument(tokens[3]);
            }
        } catch (const std::exception&) {
            throw ParseError(source + " line " + std::to_string(line_no) + ": bad relevance \"" + tokens[3] + "\"",
                             line_no);
        }
        auto [it, fresh] = q.judgments[tokens[0]].try_emplace(tokens[2], rel);
        if (!fresh) {
            throw ParseError(source + " line " + std::to_string(line_no) + ": duplicate judgment for (" + tokens[0] +
                                 ", " + tokens[2] + ")",
                             line_no);
        }
    }
    return q;
}

Qrels
parse_qrels_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path + " for reading");
    }
    return parse_qrels(in, path);
}

RunFile
parse_run(std::istream& in, const std::string& source) {
    RunFile run;
    std::set<std::pair<std::string, std::string>> seen;
    std::string line;
    std::size_t line_no = 0;
    bool tag_set = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = split_ws(line);
        if (tokens.empty()) {
            continue;
        }
        if (tokens.size() != 6) {
            throw ParseError(source + " line " + std::to_string(line_no) +
                                 ": expected `query Q0 doc rank score tag`",
                             line_no);
        }
        double score = 0.0;
        try {
            std::size_t pos = 0;
            score = std::stod(tokens[4], &pos);
            if (pos != tokens[4].size() || !std::isfinite(score)) {
                throw std::invalid_argument(tokens[4]);
            }
        } catch (const std::exception&) {
            throw ParseError(source + " line " + std::to_string(line_no) + ": bad score \"" + tokens[4] + "\"",
                             line_no);
        }
        if (!seen.emplace(tokens[0], tokens[2]).second) {
            throw ParseError(source + " line " + std::to_string(line_no) + ": duplicate document " + tokens[2] +
                                 " for query " + tokens[0],
                             line_no);
        }
        run.rankings[tokens[0]].push_back({tokens[2], score});
        if (!tag_set) {
            run.tag = tokens[5];
            tag_set = true;
        }
    }
    for (auto& [qid, entries] : run.rankings) {
        std::sort(entries.begin(), entries.end(), [](const RunEntry& a, const RunEntry& b) {
            if (a.score != b.score) {
                return a.score > b.score;
            }
            return a.doc_id < b.doc_id;
        });
    }
    return run;
}

RunFile
parse_run_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path + " for reading");
    }
    return parse_run(in, path);
}

void
write_run(std::ostream& out, const RunFile& run) {
    char score_buf[64];
    for (const auto& [qid, entries] : run.rankings) {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            std::snprintf(score_buf, sizeof score_buf, "%.9g", entries[i].score);
            out << qid << " Q0 " << entries[i].doc_id << ' ' << (i + 1) << ' ' << score_buf << ' ' << run.tag
                << '\n';
        }
    }
}

void
write_run_file(const std::string& path, const RunFile& run) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    write_run(out, run);
}

}  // namespace laconic
