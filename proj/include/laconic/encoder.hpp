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
#include <span>
#include <string>
#include <vector>

#include "laconic/sparse_vector.hpp"

namespace laconic {

// Per-token vocabulary logits, row-major L x V. Values may be negative but must be finite.
struct LogitMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;  // rows * cols, row-major

    LogitMatrix() = default;

    LogitMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {
    }

    double&
    at(std::size_t i, std::size_t j) {
        return values[i * cols + j];
    }

    double
    at(std::size_t i, std::size_t j) const {
        return values[i * cols + j];
    }
};

// Tiny embedding-table + linear-projection encoder. Stands in for a language model:
// row i of the produced LogitMatrix is embedding(token_ids[i]) * projection.
struct ToyEncoderParams {
    uint32_t token_count = 0;  // size of the token-id space
    uint32_t dim = 0;          // embedding width d
    uint32_t vocab_size = 0;   // output vocabulary V
    std::vector<double> embedding;   // token_count x dim, row-major
    std::vector<double> projection;  // dim x vocab_size, row-major

    // Uniform values in [-scale, scale] drawn from a seeded generator; reproducible
    // across runs and platforms (no implementation-defined distributions involved).
    static ToyEncoderParams
    random_init(uint32_t token_count, uint32_t dim, uint32_t vocab_size, uint64_t seed, double scale = 0.5);

    // Throws ContractViolation unless dimensions are positive, array sizes match,
    // and every value is finite.
    void
    validate() const;

    void
    save_json(std::ostream& out) const;

    void
    save_json_file(const std::string& path) const;

    static ToyEncoderParams
    load_json(std::istream& in, const std::string& source_name = "params");

    static ToyEncoderParams
    load_json_file(const std::string& path);

    bool
    operator==(const ToyEncoderParams&) const = default;
};

// Column-wise max over the sequence, ReLU, then log(1 + x). Coordinates that come out
// zero are not stored. Ties in the max belong to the lowest row.
SparseVector
splade_pool(const LogitMatrix& H);

// Same pooling with the bookkeeping the backward pass needs.
struct PoolDetail {
    std::vector<double> value;     // V: log1p(relu(column max))
    std::vector<double> colmax;    // V: raw column max (pre-ReLU)
    std::vector<uint32_t> argmax;  // V: lowest row attaining the max
};

PoolDetail
splade_pool_detail(const LogitMatrix& H);

// Gradient of the pooled output w.r.t. H. `upstream_grad` has one slot per vocabulary
// coordinate; the subgradient routes to the arg-max row, gated by max > 0, with
// factor 1/(1 + max).
LogitMatrix
splade_pool_backward(const LogitMatrix& H, std::span<const double> upstream_grad);

LogitMatrix
toy_encode(std::span<const uint32_t> token_ids, const ToyEncoderParams& params);

// Accumulates d(loss)/d(embedding) and d(loss)/d(projection) given d(loss)/d(logits).
// Gradient buffers must be pre-sized (token_count*dim and dim*vocab_size); contributions
// are added, not assigned, so batches can share the buffers.
void
toy_encode_backward(std::span<const uint32_t> token_ids, const ToyEncoderParams& params,
                    const LogitMatrix& grad_logits, std::span<double> grad_embedding,
                    std::span<double> grad_projection);

}  // namespace laconic
