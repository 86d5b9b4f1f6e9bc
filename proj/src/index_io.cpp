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

#include "laconic/index_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <type_traits>

#include "laconic/error.hpp"

namespace laconic {

namespace {

constexpr char kMagic[4] = {'L', 'C', 'N', 'X'};
constexpr uint16_t kVersion = 1;
constexpr uint32_t kMaxCount = 1u << 28;  // implausibility guard for corrupt headers

template <typename T>
void
put(std::ostream& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void
put_string(std::ostream& out, const std::string& s) {
    put<uint32_t>(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

struct Reader {
    std::istream& in;
    const std::string& source;

    [[noreturn]] void
    fail(const std::string& what) const {
        throw ParseError(source + ": " + what);
    }

    template <typename T>
    T
    get() {
        static_assert(std::is_trivially_copyable_v<T>);
        T v;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        if (!in) {
            fail("truncated index file");
        }
        return v;
    }

    std::string
    get_string() {
        const auto len = get<uint32_t>();
        if (len > kMaxCount) {
            fail("implausible string length");
        }
        std::string s(len, '\0');
        in.read(s.data(), static_cast<std::streamsize>(len));
        if (!in) {
            fail("truncated index file");
        }
        return s;
    }
};

void
write_header(std::ostream& out, uint8_t kind, uint32_t vocab, const std::vector<std::string>& doc_ids) {
    out.write(kMagic, sizeof kMagic);
    put<uint16_t>(out, kVersion);
    put<uint8_t>(out, kind);
    put<uint8_t>(out, 0);
    put<uint32_t>(out, vocab);
    put<uint32_t>(out, static_cast<uint32_t>(doc_ids.size()));
    for (const auto& id : doc_ids) {
        put_string(out, id);
    }
}

std::ofstream
open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    return out;
}

}  // namespace

class IndexCodec {
 public:
    static void
    save(std::ostream& out, const InvertedIndex& idx) {
        write_header(out, 0, idx.vocab_.size, idx.doc_ids_);
        put<uint64_t>(out, idx.total_postings_);
        for (const auto& list : idx.postings_) {
            put<uint32_t>(out, static_cast<uint32_t>(list.size()));
        }
        for (const auto& list : idx.postings_) {
            for (const auto& p : list) {
                put<uint32_t>(out, p.doc_ordinal);
                put<float>(out, p.impact);
            }
        }
        if (!out) {
            throw IoError("index write failed");
        }
    }

    static void
    save(std::ostream& out, const ApproxIndex& idx) {
        write_header(out, 1, idx.vocab_.size, idx.doc_ids_);
        put<double>(out, idx.params_.alpha);
        put<uint32_t>(out, idx.params_.block_size);
        put<uint32_t>(out, idx.params_.summary_levels);
        put<double>(out, idx.params_.heap_factor);
        for (const auto& vec : idx.forward_) {
            put<uint32_t>(out, static_cast<uint32_t>(vec.nnz()));
            for (const auto& e : vec.entries()) {
                put<uint32_t>(out, e.term);
                put<float>(out, e.weight);
            }
        }
        for (const auto& blocks : idx.term_blocks_) {
            put<uint32_t>(out, static_cast<uint32_t>(blocks.size()));
            for (const auto& b : blocks) {
                put<uint32_t>(out, static_cast<uint32_t>(b.docs.size()));
                for (uint32_t d : b.docs) {
                    put<uint32_t>(out, d);
                }
                put<uint32_t>(out, static_cast<uint32_t>(b.summary.size()));
                for (const auto& sw : b.summary) {
                    put<uint32_t>(out, sw.term);
                }
                put<float>(out, b.scale);
                out.write(reinterpret_cast<const char*>(b.codes.data()),
                          static_cast<std::streamsize>(b.codes.size()));
            }
        }
        if (!out) {
            throw IoError("index write failed");
        }
    }

    static InvertedIndex
    load_exact(Reader& r, uint32_t vocab, std::vector<std::string> doc_ids) {
        InvertedIndex idx;
        idx.vocab_ = VocabSpec(vocab);
        idx.doc_ids_ = std::move(doc_ids);
        idx.postings_.resize(vocab);
        const auto total = r.get<uint64_t>();
        std::vector<uint32_t> counts(vocab);
        uint64_t sum = 0;
        for (uint32_t t = 0; t < vocab; ++t) {
            counts[t] = r.get<uint32_t>();
            sum += counts[t];
        }
        if (sum != total) {
            r.fail("posting counts disagree with the recorded total");
        }
        for (uint32_t t = 0; t < vocab; ++t) {
            auto& list = idx.postings_[t];
            list.reserve(counts[t]);
            float prev = std::numeric_limits<float>::infinity();
            for (uint32_t i = 0; i < counts[t]; ++i) {
                const auto ord = r.get<uint32_t>();
                const auto impact = r.get<float>();
                if (ord >= idx.doc_ids_.size()) {
                    r.fail("posting references a document outside the corpus");
                }
                if (!(impact > 0.0f) || !std::isfinite(impact)) {
                    r.fail("posting with non-positive impact");
                }
                if (impact > prev) {
                    r.fail("posting list not impact-ordered");
                }
                prev = impact;
                list.push_back({ord, impact});
            }
        }
        idx.total_postings_ = total;
        return idx;
    }

    static ApproxIndex
    load_approx(Reader& r, uint32_t vocab, std::vector<std::string> doc_ids) {
        ApproxIndex idx;
        idx.vocab_ = VocabSpec(vocab);
        idx.doc_ids_ = std::move(doc_ids);
        idx.params_.alpha = r.get<double>();
        idx.params_.block_size = r.get<uint32_t>();
        idx.params_.summary_levels = r.get<uint32_t>();
        idx.params_.heap_factor = r.get<double>();
        try {
            idx.params_.validate();
        } catch (const ContractViolation& e) {
            r.fail(e.what());
        }
        idx.forward_.reserve(idx.doc_ids_.size());
        for (std::size_t d = 0; d < idx.doc_ids_.size(); ++d) {
            const auto nnz = r.get<uint32_t>();
            if (nnz > kMaxCount) {
                r.fail("implausible forward-store entry count");
            }
            std::vector<TermWeight> entries;
            entries.reserve(nnz);
            for (uint32_t i = 0; i < nnz; ++i) {
                const auto term = r.get<uint32_t>();
                const auto weight = r.get<float>();
                entries.push_back({term, weight});
            }
            try {
                idx.forward_.push_back(SparseVector::from_entries(vocab, std::move(entries)));
            } catch (const ContractViolation& e) {
                r.fail(e.what());
            }
        }
        idx.term_blocks_.resize(vocab);
        for (uint32_t t = 0; t < vocab; ++t) {
            const auto nblocks = r.get<uint32_t>();
            if (nblocks > kMaxCount) {
                r.fail("implausible block count");
            }
            idx.term_blocks_[t].reserve(nblocks);
            for (uint32_t bi = 0; bi < nblocks; ++bi) {
                Block b;
                const auto ndocs = r.get<uint32_t>();
                if (ndocs == 0 || ndocs > idx.params_.block_size) {
                    r.fail("block size out of range");
                }
                b.docs.reserve(ndocs);
                for (uint32_t i = 0; i < ndocs; ++i) {
                    const auto ord = r.get<uint32_t>();
                    if (ord >= idx.doc_ids_.size()) {
                        r.fail("block references a document outside the corpus");
                    }
                    b.docs.push_back(ord);
                }
                const auto nsummary = r.get<uint32_t>();
                if (nsummary > vocab) {
                    r.fail("summary wider than the vocabulary");
                }
                std::vector<uint32_t> terms(nsummary);
                for (uint32_t i = 0; i < nsummary; ++i) {
                    terms[i] = r.get<uint32_t>();
                    if (terms[i] >= vocab || (i > 0 && terms[i] <= terms[i - 1])) {
                        r.fail("summary terms not strictly ascending");
                    }
                }
                b.scale = r.get<float>();
                if (!(b.scale >= 0.0f) || !std::isfinite(b.scale)) {
                    r.fail("block scale must be finite and nonnegative");
                }
                b.codes.resize(nsummary);
                r.in.read(reinterpret_cast<char*>(b.codes.data()), static_cast<std::streamsize>(nsummary));
                if (!r.in) {
                    r.fail("truncated index file");
                }
                b.summary.reserve(nsummary);
                for (uint32_t i = 0; i < nsummary; ++i) {
                    if (b.codes[i] == 0 || b.codes[i] >= idx.params_.summary_levels) {
                        r.fail("summary code outside the level range");
                    }
                    b.summary.push_back(
                        {terms[i], static_cast<float>(b.codes[i] * static_cast<double>(b.scale))});
                }
                idx.term_blocks_[t].push_back(std::move(b));
            }
        }
        return idx;
    }
};

void
save_index(std::ostream& out, const InvertedIndex& index) {
    IndexCodec::save(out, index);
}

void
save_index(std::ostream& out, const ApproxIndex& index) {
    IndexCodec::save(out, index);
}

void
save_index_file(const std::string& path, const InvertedIndex& index) {
    auto out = open_out(path);
    save_index(out, index);
}

void
save_index_file(const std::string& path, const ApproxIndex& index) {
    auto out = open_out(path);
    save_index(out, index);
}

AnyIndex
load_index(std::istream& in, const std::string& source_name) {
    Reader r{in, source_name};
    char magic[4];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        r.fail("not a LCNX index file (bad magic)");
    }
    const auto version = r.get<uint16_t>();
    if (version != kVersion) {
        r.fail("unsupported index version " + std::to_string(version));
    }
    const auto kind = r.get<uint8_t>();
    r.get<uint8_t>();  // pad
    const auto vocab = r.get<uint32_t>();
    const auto doc_count = r.get<uint32_t>();
    if (vocab == 0 || vocab > kMaxCount || doc_count > kMaxCount) {
        r.fail("implausible header counts");
    }
    std::vector<std::string> doc_ids;
    doc_ids.reserve(doc_count);
    for (uint32_t i = 0; i < doc_count; ++i) {
        doc_ids.push_back(r.get_string());
    }
    if (kind != 0 && kind != 1) {
        r.fail("unknown index kind " + std::to_string(kind));
    }
    AnyIndex loaded = kind == 0 ? AnyIndex{IndexCodec::load_exact(r, vocab, std::move(doc_ids))}
                                : AnyIndex{IndexCodec::load_approx(r, vocab, std::move(doc_ids))};
    if (in.peek() != std::char_traits<char>::eof()) {
        r.fail("trailing bytes after index payload");
    }
    return loaded;
}

AnyIndex
load_index_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path + " for reading");
    }
    return load_index(in, path);
}

}  // namespace laconic
