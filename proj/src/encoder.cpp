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

#include "laconic/encoder.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

#include "laconic/error.hpp"

namespace laconic {

namespace {

void
check_matrix(const LogitMatrix& H, const char* who) {
    if (H.rows == 0 || H.cols == 0) {
        throw ContractViolation(std::string(who) + ": matrix dimensions must be positive");
    }
    if (H.values.size() != H.rows * H.cols) {
        throw ContractViolation(std::string(who) + ": value buffer does not match dimensions");
    }
    for (double v : H.values) {
        if (!std::isfinite(v)) {
            throw ContractViolation(std::string(who) + ": non-finite logit");
        }
    }
}

// 53-bit uniform in [0,1). std:: distributions are implementation-defined, so the
// mapping is spelled out to keep seeded runs reproducible everywhere.
double
uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

ToyEncoderParams
ToyEncoderParams::random_init(uint32_t token_count, uint32_t dim, uint32_t vocab_size, uint64_t seed, double scale) {
    if (token_count == 0 || dim == 0 || vocab_size == 0) {
        throw ContractViolation("ToyEncoderParams: dimensions must be positive");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw ContractViolation("ToyEncoderParams: init scale must be positive and finite");
    }
    ToyEncoderParams p;
    p.token_count = token_count;
    p.dim = dim;
    p.vocab_size = vocab_size;
    std::mt19937_64 gen(seed);
    p.embedding.resize(static_cast<std::size_t>(token_count) * dim);
    for (double& v : p.embedding) {
        v = (2.0 * uniform01(gen) - 1.0) * scale;
    }
    p.projection.resize(static_cast<std::size_t>(dim) * vocab_size);
    for (double& v : p.projection) {
        v = (2.0 * uniform01(gen) - 1.0) * scale;
    }
    return p;
}

void
ToyEncoderParams::validate() const {
    if (token_count == 0 || dim == 0 || vocab_size == 0) {
        throw ContractViolation("ToyEncoderParams: dimensions must be positive");
    }
    if (embedding.size() != static_cast<std::size_t>(token_count) * dim) {
        throw ContractViolation("ToyEncoderParams: embedding size does not match token_count x dim");
    }
    if (projection.size() != static_cast<std::size_t>(dim) * vocab_size) {
        throw ContractViolation("ToyEncoderParams: projection size does not match dim x vocab_size");
    }
    for (double v : embedding) {
        if (!std::isfinite(v)) {
            throw ContractViolation("ToyEncoderParams: non-finite embedding value");
        }
    }
    for (double v : projection) {
        if (!std::isfinite(v)) {
            throw ContractViolation("ToyEncoderParams: non-finite projection value");
        }
    }
}

void
ToyEncoderParams::save_json(std::ostream& out) const {
    nlohmann::json doc;
    doc["token_count"] = token_count;
    doc["dim"] = dim;
    doc["vocab_size"] = vocab_size;
    doc["embedding"] = embedding;
    doc["projection"] = projection;
    out << doc.dump(2) << '\n';
}

void
ToyEncoderParams::save_json_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    save_json(out);
}

ToyEncoderParams
ToyEncoderParams::load_json(std::istream& in, const std::string& source_name) {
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ParseError(source_name + ": malformed JSON");
    }
    ToyEncoderParams p;
    try {
        p.token_count = doc.at("token_count").get<uint32_t>();
        p.dim = doc.at("dim").get<uint32_t>();
        p.vocab_size = doc.at("vocab_size").get<uint32_t>();
        p.embedding = doc.at("embedding").get<std::vector<double>>();
        p.projection = doc.at("projection").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source_name + ": " + e.what());
    }
    try {
        p.validate();
    } catch (const ContractViolation& e) {
        throw ParseError(source_name + ": " + e.what());
    }
    return p;
}

ToyEncoderParams
ToyEncoderParams::load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path + " for reading");
    }
    return load_json(in, path);
}

PoolDetail
splade_pool_detail(const LogitMatrix& H) {
    check_matrix(H, "splade_pool");
    PoolDetail d;
    d.value.assign(H.cols, 0.0);
    d.colmax.assign(H.cols, 0.0);
    d.argmax.assign(H.cols, 0);
    for (std::size_t j = 0; j < H.cols; ++j) {
        double best = H.at(0, j);
        uint32_t best_row = 0;
        for (std::size_t i = 1; i < H.rows; ++i) {
            // Strict > keeps the lowest row on ties.
            if (H.at(i, j) > best) {
                best = H.at(i, j);
                best_row = static_cast<uint32_t>(i);
            }
        }
        d.colmax[j] = best;
        d.argmax[j] = best_row;
        d.value[j] = best > 0.0 ? std::log1p(best) : 0.0;
    }
    return d;
}

SparseVector
splade_pool(const LogitMatrix& H) {
    PoolDetail d = splade_pool_detail(H);
    return SparseVector::from_dense(std::span<const double>(d.value));
}

LogitMatrix
splade_pool_backward(const LogitMatrix& H, std::span<const double> upstream_grad) {
    check_matrix(H, "splade_pool_backward");
    if (upstream_grad.size() != H.cols) {
        throw ContractViolation("splade_pool_backward: upstream gradient size does not match vocabulary");
    }
    PoolDetail d = splade_pool_detail(H);
    LogitMatrix grad(H.rows, H.cols);
    for (std::size_t j = 0; j < H.cols; ++j) {
        if (d.colmax[j] > 0.0) {
            grad.at(d.argmax[j], j) = upstream_grad[j] / (1.0 + d.colmax[j]);
        }
    }
    return grad;
}

LogitMatrix
toy_encode(std::span<const uint32_t> token_ids, const ToyEncoderParams& params) {
    params.validate();
    if (token_ids.empty()) {
        throw ContractViolation("toy_encode: token sequence must be nonempty");
    }
    for (uint32_t t : token_ids) {
        if (t >= params.token_count) {
            throw ContractViolation("toy_encode: token id " + std::to_string(t) + " outside embedding table");
        }
    }
    LogitMatrix H(token_ids.size(), params.vocab_size);
    for (std::size_t i = 0; i < token_ids.size(); ++i) {
        const double* emb = params.embedding.data() + static_cast<std::size_t>(token_ids[i]) * params.dim;
        double* row = H.values.data() + i * H.cols;
        for (uint32_t f = 0; f < params.dim; ++f) {
            const double e = emb[f];
            const double* proj = params.projection.data() + static_cast<std::size_t>(f) * params.vocab_size;
            for (uint32_t j = 0; j < params.vocab_size; ++j) {
                row[j] += e * proj[j];
            }
        }
    }
    return H;
}

void
toy_encode_backward(std::span<const uint32_t> token_ids, const ToyEncoderParams& params,
                    const LogitMatrix& grad_logits, std::span<double> grad_embedding,
                    std::span<double> grad_projection) {
    params.validate();
    if (grad_logits.rows != token_ids.size() || grad_logits.cols != params.vocab_size) {
        throw ContractViolation("toy_encode_backward: gradient shape does not match sequence x vocabulary");
    }
    if (grad_embedding.size() != params.embedding.size() || grad_projection.size() != params.projection.size()) {
        throw ContractViolation("toy_encode_backward: gradient buffers must match parameter sizes");
    }
    for (std::size_t i = 0; i < token_ids.size(); ++i) {
        const uint32_t t = token_ids[i];
        if (t >= params.token_count) {
            throw ContractViolation("toy_encode_backward: token id outside embedding table");
        }
        const double* emb = params.embedding.data() + static_cast<std::size_t>(t) * params.dim;
        const double* g_row = grad_logits.values.data() + i * grad_logits.cols;
        double* g_emb = grad_embedding.data() + static_cast<std::size_t>(t) * params.dim;
        for (uint32_t f = 0; f < params.dim; ++f) {
            const double* proj = params.projection.data() + static_cast<std::size_t>(f) * params.vocab_size;
            double* g_proj = grad_projection.data() + static_cast<std::size_t>(f) * params.vocab_size;
            double acc = 0.0;
            for (uint32_t j = 0; j < params.vocab_size; ++j) {
                acc += g_row[j] * proj[j];
                g_proj[j] += emb[f] * g_row[j];
            }
            g_emb[f] += acc;
        }
    }
}

}  // namespace laconic
