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

#include "laconic/vector_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace laconic {

namespace {

using nlohmann::json;

json
parse_line(const std::string& line, std::size_t line_no, const std::string& source) {
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ParseError(source + " line " + std::to_string(line_no) + ": malformed JSON object", line_no);
    }
    return doc;
}

std::string
require_id(const json& doc, std::size_t line_no, const std::string& source) {
    if (!doc.contains("id") || !doc["id"].is_string()) {
        throw ParseError(source + " line " + std::to_string(line_no) + ": missing string field \"id\"", line_no);
    }
    return doc["id"].get<std::string>();
}

std::ifstream
open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path + " for reading");
    }
    return in;
}

std::ofstream
open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    return out;
}

}  // namespace

std::vector<NamedVector>
read_vectors_jsonl(std::istream& in, const VocabSpec& vocab, const std::string& source) {
    std::vector<NamedVector> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        json doc = parse_line(line, line_no, source);
        NamedVector row;
        row.id = require_id(doc, line_no, source);
        if (!doc.contains("vector") || !doc["vector"].is_object()) {
            throw ParseError(source + " line " + std::to_string(line_no) + ": missing object field \"vector\"",
                             line_no);
        }
        std::vector<TermWeight> entries;
        for (const auto& [key, value] : doc["vector"].items()) {
            uint32_t term = 0;
            try {
                std::size_t pos = 0;
                unsigned long parsed = std::stoul(key, &pos);
                if (pos != key.size() || parsed > 0xffffffffull) {
                    throw std::invalid_argument(key);
                }
                term = static_cast<uint32_t>(parsed);
            } catch (const std::exception&) {
                throw ParseError(source + " line " + std::to_string(line_no) + ": bad term id \"" + key + "\"",
                                 line_no);
            }
            if (!value.is_number()) {
                throw ParseError(source + " line " + std::to_string(line_no) + ": non-numeric weight for term " + key,
                                 line_no);
            }
            const double w = value.get<double>();
            if (w < 0.0) {
                throw ParseError(source + " line " + std::to_string(line_no) + ": negative weight for term " + key,
                                 line_no);
            }
            if (static_cast<float>(w) > 0.0f) {
                entries.push_back({term, static_cast<float>(w)});
            }
        }
        std::sort(entries.begin(), entries.end(), [](const TermWeight& a, const TermWeight& b) {
            return a.term < b.term;
        });
        try {
            row.vec = SparseVector::from_entries(vocab.size, std::move(entries));
        } catch (const ContractViolation& e) {
            throw ParseError(source + " line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<NamedVector>
read_vectors_jsonl_file(const std::string& path, const VocabSpec& vocab) {
    auto in = open_input(path);
    return read_vectors_jsonl(in, vocab, path);
}

void
write_vectors_jsonl(std::ostream& out, std::span<const NamedVector> rows) {
    for (const auto& row : rows) {
        json vec = json::object();
        for (const auto& e : row.vec.entries()) {
            vec[std::to_string(e.term)] = static_cast<double>(e.weight);
        }
        json doc;
        doc["id"] = row.id;
        doc["vector"] = vec;
        out << doc.dump() << '\n';
    }
}

void
write_vectors_jsonl_file(const std::string& path, std::span<const NamedVector> rows) {
    auto out = open_output(path);
    write_vectors_jsonl(out, rows);
}

std::vector<TokenSequence>
read_tokens_jsonl(std::istream& in, const std::string& source) {
    std::vector<TokenSequence> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        json doc = parse_line(line, line_no, source);
        TokenSequence row;
        row.id = require_id(doc, line_no, source);
        if (!doc.contains("tokens") || !doc["tokens"].is_array()) {
            throw ParseError(source + " line " + std::to_string(line_no) + ": missing array field \"tokens\"",
                             line_no);
        }
        for (const auto& t : doc["tokens"]) {
            if (!t.is_number_unsigned()) {
                throw ParseError(source + " line " + std::to_string(line_no) + ": token ids must be nonnegative",
                                 line_no);
            }
            row.tokens.push_back(t.get<uint32_t>());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<TokenSequence>
read_tokens_jsonl_file(const std::string& path) {
    auto in = open_input(path);
    return read_tokens_jsonl(in, path);
}

}  // namespace laconic
