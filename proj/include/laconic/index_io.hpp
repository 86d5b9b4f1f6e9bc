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
#include <variant>

#include "laconic/approx_index.hpp"
#include "laconic/exact_index.hpp"

namespace laconic {

// `LCNX` container, version 1, little-endian. Common header: magic, u16 version,
// u8 kind (0 exact / 1 approx), u8 pad, u32 vocab size, u32 doc count, then the
// length-prefixed doc-id table. Exact payload: u64 total postings, per-term u32
// counts, postings as (u32 ordinal, f32 impact). Approx payload: params, the lossless
// forward store, and per-term block lists with u8 summary codes + per-block f32 scale.
// Round-trips are bit-exact.

using AnyIndex = std::variant<InvertedIndex, ApproxIndex>;

void
save_index(std::ostream& out, const InvertedIndex& index);

void
save_index(std::ostream& out, const ApproxIndex& index);

void
save_index_file(const std::string& path, const InvertedIndex& index);

void
save_index_file(const std::string& path, const ApproxIndex& index);

// Throws ParseError on bad magic, unknown version/kind, or structural corruption.
AnyIndex
load_index(std::istream& in, const std::string& source_name = "index");

AnyIndex
load_index_file(const std::string& path);

}  // namespace laconic
