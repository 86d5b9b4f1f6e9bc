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

#include <iosfwd>
#include <string>
#include <vector>

#include "laconic/sparse_vector.hpp"

namespace laconic {

struct NamedVector {
    std::string id;
    SparseVector vec;
};

struct TokenSequence {
    std::string id;
    std::vector<uint32_t> tokens;
};

// Sparse-vector JSONL: one `{"id": ..., "vector": {"<term>": weight, ...}}` object per
// line. Term keys are decimal strings; weights round-trip exactly. Zero weights are
// dropped on read, negatives rejected. Parse errors carry the 1-based line number.
std::vector<NamedVector>
read_vectors_jsonl(std::istream& in, const VocabSpec& vocab, const std::string& source_name = "input");

std::vector<NamedVector>
read_vectors_jsonl_file(const std::string& path, const VocabSpec& vocab);

void
write_vectors_jsonl(std::ostream& out, std::span<const NamedVector> rows);

void
write_vectors_jsonl_file(const std::string& path, std::span<const NamedVector> rows);

// Token-id JSONL: `{"id": ..., "tokens": [t0, t1, ...]}` per line.
std::vector<TokenSequence>
read_tokens_jsonl(std::istream& in, const std::string& source_name = "input");

std::vector<TokenSequence>
read_tokens_jsonl_file(const std::string& path);

}  // namespace laconic
