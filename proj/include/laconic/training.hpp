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
#include <span>
#include <string>
#include <vector>

#include "laconic/encoder.hpp"
#include "laconic/sparse_vector.hpp"

namespace laconic {

// Query-by-candidate score grid. positive_index[i] names row i's relevant column;
// every other column of the row is a negative.
struct ScoreMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> scores;           // rows * cols, row-major
    std::vector<uint32_t> positive_index;  // one per row

    ScoreMatrix() = default;

    ScoreMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), scores(r * c, 0.0), positive_index(r, 0) {
    }

    double&
    at(std::size_t i, std::size_t j) {
        return scores[i * cols + j];
    }

    double
    at(std::size_t i, std::size_t j) const {
        return scores[i * cols + j];
    }
};

enum class TrainPhase {
    pre_finetune,  // in-batch negatives only
    finetune,      // hard negatives plus in-batch negatives
};

struct TrainConfig {
    double lambda_q = 0.0;
    double lambda_d = 0.0;
    uint32_t warmup_steps = 0;
    double warmup_exponent = 2.0;
    TrainPhase phase = TrainPhase::pre_finetune;
    uint32_t hard_negatives_per_query = 0;
    uint32_t batch_size = 8;
    uint32_t epochs = 1;
    double learning_rate = 0.5;
    double temperature = 1.0;  // divides scores; 1 leaves the objective untouched
    // Toy encoder shape for train_toy.
    uint32_t model_tokens = 64;
    uint32_t model_dim = 8;
    uint32_t model_vocab = 64;
    double init_scale = 0.5;

    // Throws ContractViolation on out-of-range fields or an inconsistent
    // phase/hard-negative combination.
    void
    validate() const;
};

// Mean over rows of  -log( exp(s+) / sum_c exp(s_c) ), log-sum-exp stabilized.
// Every row needs at least one negative column.
double
infonce_loss(const ScoreMatrix& scores);

// Sum over vocabulary coordinates of the squared mean activation across the batch.
double
flops_reg(std::span<const SparseVector> batch);

// Regularizer ramp: min(1, (step/T)^exponent); 1 when T == 0.
double
warmup(uint64_t step, uint32_t T, double exponent = 2.0);

// infonce + warmup(step) * (lambda_q * flops_reg(queries) + lambda_d * flops_reg(docs)).
double
total_loss(const ScoreMatrix& scores, std::span<const SparseVector> q_acts, std::span<const SparseVector> d_acts,
           const TrainConfig& cfg, uint64_t step);

// One training example: token-id sequences for the query, its relevant document, and
// optional mined hard negatives.
struct Triplet {
    std::vector<uint32_t> query;
    std::vector<uint32_t> positive;
    std::vector<std::vector<uint32_t>> negatives;
};

// Triplet JSONL: `{"query": [ids], "positive": [ids], "negatives": [[ids], ...]}` per line.
std::vector<Triplet>
read_triplets_jsonl(std::istream& in, const std::string& source_name = "input");

std::vector<Triplet>
read_triplets_jsonl_file(const std::string& path);

struct EpochMetrics {
    uint32_t epoch = 0;  // 1-based
    double loss = 0.0;
    double mean_q_nnz = 0.0;
    double mean_d_nnz = 0.0;
};

// CSV with header `epoch,loss,mean_q_nnz,mean_d_nnz`.
void
write_metrics_csv(std::ostream& out, std::span<const EpochMetrics> metrics);

void
write_metrics_csv_file(const std::string& path, std::span<const EpochMetrics> metrics);

struct ToyTrainResult {
    ToyEncoderParams params;
    std::vector<EpochMetrics> metrics;  // one row per epoch
};

// Forward pass over one batch of triplets: encode, score, and assemble total_loss.
// Candidates are all batch positives plus every hard negative in the batch; row i's
// positive column is i. Pure, so finite-difference checks can probe it.
double
batch_loss(std::span<const Triplet> batch, const ToyEncoderParams& params, const TrainConfig& cfg, uint64_t step);

// Same forward pass plus analytic gradients, accumulated into the provided buffers
// (sized like params.embedding / params.projection, caller-zeroed).
double
batch_loss_grad(std::span<const Triplet> batch, const ToyEncoderParams& params, const TrainConfig& cfg, uint64_t step,
                std::span<double> grad_embedding, std::span<double> grad_projection);

// Plain-SGD loop over the corpus in fixed order, deterministic for a given seed.
// epochs == 0 returns the seeded initialization untouched.
ToyTrainResult
train_toy(std::span<const Triplet> corpus, const TrainConfig& cfg, uint64_t seed);

}  // namespace laconic
