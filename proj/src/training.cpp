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

#include "laconic/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "laconic/error.hpp"

namespace laconic {

void
TrainConfig::validate() const {
    if (lambda_q < 0.0 || lambda_d < 0.0 || !std::isfinite(lambda_q) || !std::isfinite(lambda_d)) {
        throw ContractViolation("TrainConfig: lambda_q and lambda_d must be finite and >= 0");
    }
    if (!(warmup_exponent > 0.0) || !std::isfinite(warmup_exponent)) {
        throw ContractViolation("TrainConfig: warmup_exponent must be positive");
    }
    if (phase == TrainPhase::pre_finetune && hard_negatives_per_query != 0) {
        throw ContractViolation("TrainConfig: pre_finetune trains on in-batch negatives only");
    }
    if (batch_size == 0) {
        throw ContractViolation("TrainConfig: batch_size must be >= 1");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ContractViolation("TrainConfig: learning_rate must be positive");
    }
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw ContractViolation("TrainConfig: temperature must be positive");
    }
    if (model_tokens == 0 || model_dim == 0 || model_vocab == 0) {
        throw ContractViolation("TrainConfig: model dimensions must be positive");
    }
    if (!(init_scale > 0.0) || !std::isfinite(init_scale)) {
        throw ContractViolation("TrainConfig: init_scale must be positive");
    }
}

double
infonce_loss(const ScoreMatrix& s) {
    if (s.rows == 0) {
        throw ContractViolation("infonce_loss: score matrix must have at least one row");
    }
    if (s.cols < 2) {
        throw ContractViolation("infonce_loss: each query needs at least one negative candidate");
    }
    if (s.scores.size() != s.rows * s.cols || s.positive_index.size() != s.rows) {
        throw ContractViolation("infonce_loss: inconsistent score matrix layout");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < s.rows; ++i) {
        if (s.positive_index[i] >= s.cols) {
            throw ContractViolation("infonce_loss: positive_index out of range");
        }
        const double* row = s.scores.data() + i * s.cols;
        double m = row[0];
        for (std::size_t c = 0; c < s.cols; ++c) {
            if (!std::isfinite(row[c])) {
                throw ContractViolation("infonce_loss: non-finite score");
            }
            m = std::max(m, row[c]);
        }
        double z = 0.0;
        for (std::size_t c = 0; c < s.cols; ++c) {
            z += std::exp(row[c] - m);
        }
        sum += m + std::log(z) - row[s.positive_index[i]];
    }
    return sum / static_cast<double>(s.rows);
}

double
flops_reg(std::span<const SparseVector> batch) {
    if (batch.empty()) {
        throw ContractViolation("flops_reg: batch must be nonempty");
    }
    const uint32_t vocab = batch[0].vocab_size();
    for (const auto& v : batch) {
        if (v.vocab_size() != vocab) {
            throw ContractViolation("flops_reg: mixed vocabulary sizes in batch");
        }
    }
    std::vector<double> sums(vocab, 0.0);
    for (const auto& v : batch) {
        for (const auto& e : v.entries()) {
            sums[e.term] += static_cast<double>(e.weight);
        }
    }
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    double acc = 0.0;
    for (double svar : sums) {
        const double m = svar * inv_b;
        acc += m * m;
    }
    return acc;
}

double
warmup(uint64_t step, uint32_t T, double exponent) {
    if (!(exponent > 0.0) || !std::isfinite(exponent)) {
        throw ContractViolation("warmup: exponent must be positive");
    }
    if (T == 0 || step >= T) {
        return 1.0;
    }
    return std::pow(static_cast<double>(step) / static_cast<double>(T), exponent);
}

double
total_loss(const ScoreMatrix& scores, std::span<const SparseVector> q_acts, std::span<const SparseVector> d_acts,
           const TrainConfig& cfg, uint64_t step) {
    cfg.validate();
    double loss = infonce_loss(scores);
    if (cfg.lambda_q > 0.0 || cfg.lambda_d > 0.0) {
        const double w = warmup(step, cfg.warmup_steps, cfg.warmup_exponent);
        if (w > 0.0) {
            loss += w * (cfg.lambda_q * flops_reg(q_acts) + cfg.lambda_d * flops_reg(d_acts));
        }
    }
    return loss;
}

namespace {

using nlohmann::json;

std::vector<uint32_t>
token_array(const json& arr, const char* field, std::size_t line_no, const std::string& source) {
    if (!arr.is_array() || arr.empty()) {
        throw ParseError(source + " line " + std::to_string(line_no) + ": \"" + field +
                             "\" must be a nonempty token array",
                         line_no);
    }
    std::vector<uint32_t> out;
    out.reserve(arr.size());
    for (const auto& t : arr) {
        if (!t.is_number_unsigned() || t.get<uint64_t>() > 0xffffffffull) {
            throw ParseError(source + " line " + std::to_string(line_no) + ": \"" + field +
                                 "\" holds a non-token value",
                             line_no);
        }
        out.push_back(t.get<uint32_t>());
    }
    return out;
}

}  // namespace

std::vector<Triplet>
read_triplets_jsonl(std::istream& in, const std::string& source) {
    std::vector<Triplet> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        json doc = json::parse(line, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
            throw ParseError(source + " line " + std::to_string(line_no) + ": malformed JSON object", line_no);
        }
        Triplet t;
        if (!doc.contains("query") || !doc.contains("positive")) {
            throw ParseError(source + " line " + std::to_string(line_no) + ": need \"query\" and \"positive\"",
                             line_no);
        }
        t.query = token_array(doc["query"], "query", line_no, source);
        t.positive = token_array(doc["positive"], "positive", line_no, source);
        if (doc.contains("negatives")) {
            if (!doc["negatives"].is_array()) {
                throw ParseError(source + " line " + std::to_string(line_no) + ": \"negatives\" must be an array",
                                 line_no);
            }
            for (const auto& n : doc["negatives"]) {
                t.negatives.push_back(token_array(n, "negatives", line_no, source));
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<Triplet>
read_triplets_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path + " for reading");
    }
    return read_triplets_jsonl(in, path);
}

void
write_metrics_csv(std::ostream& out, std::span<const EpochMetrics> metrics) {
    out << "epoch,loss,mean_q_nnz,mean_d_nnz\n";
    out.precision(17);
    for (const auto& m : metrics) {
        out << m.epoch << ',' << m.loss << ',' << m.mean_q_nnz << ',' << m.mean_d_nnz << '\n';
    }
}

void
write_metrics_csv_file(const std::string& path, std::span<const EpochMetrics> metrics) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    write_metrics_csv(out, metrics);
}

namespace {

struct BatchStats {
    double q_nnz_sum = 0.0;
    double d_nnz_sum = 0.0;
    std::size_t q_count = 0;
    std::size_t d_count = 0;
};

// Shared forward(+backward) pass. Candidate documents are all batch positives, then
// every triplet's hard negatives (finetune only); row i's positive column is i.
double
run_batch(std::span<const Triplet> batch, const ToyEncoderParams& params, const TrainConfig& cfg, uint64_t step,
          bool want_grad, std::span<double> grad_embedding, std::span<double> grad_projection, BatchStats* stats) {
    cfg.validate();
    if (batch.empty()) {
        throw ContractViolation("batch_loss: batch must be nonempty");
    }
    const std::size_t b = batch.size();
    const bool finetune = cfg.phase == TrainPhase::finetune;
    std::vector<std::span<const uint32_t>> cand_tokens;
    cand_tokens.reserve(finetune ? b * (1 + cfg.hard_negatives_per_query) : b);
    for (const auto& t : batch) {
        cand_tokens.push_back(t.positive);
    }
    if (finetune) {
        for (const auto& t : batch) {
            if (t.negatives.size() != cfg.hard_negatives_per_query) {
                throw ContractViolation("batch_loss: finetune triplets must carry exactly " +
                                        std::to_string(cfg.hard_negatives_per_query) + " hard negatives");
            }
            for (const auto& n : t.negatives) {
                cand_tokens.push_back(n);
            }
        }
    }
    const std::size_t c = cand_tokens.size();

    std::vector<LogitMatrix> q_logits(b), d_logits(c);
    std::vector<PoolDetail> q_pool(b), d_pool(c);
    for (std::size_t i = 0; i < b; ++i) {
        q_logits[i] = toy_encode(batch[i].query, params);
        q_pool[i] = splade_pool_detail(q_logits[i]);
    }
    for (std::size_t j = 0; j < c; ++j) {
        d_logits[j] = toy_encode(cand_tokens[j], params);
        d_pool[j] = splade_pool_detail(d_logits[j]);
    }

    const double inv_tau = 1.0 / cfg.temperature;
    ScoreMatrix scores(b, c);
    for (std::size_t i = 0; i < b; ++i) {
        scores.positive_index[i] = static_cast<uint32_t>(i);
        for (std::size_t j = 0; j < c; ++j) {
            double acc = 0.0;
            for (uint32_t v = 0; v < params.vocab_size; ++v) {
                acc += q_pool[i].value[v] * d_pool[j].value[v];
            }
            scores.at(i, j) = acc * inv_tau;
        }
    }

    // The objective stays in f64 end to end; rounding activations to their f32
    // storage form here would turn the regularizer into a step function and break
    // gradient checks. total_loss's formula is reproduced on the pooled values.
    const double w = warmup(step, cfg.warmup_steps, cfg.warmup_exponent);
    auto flops_dense = [&](const std::vector<PoolDetail>& pools) {
        double total = 0.0;
        for (uint32_t v = 0; v < params.vocab_size; ++v) {
            double mean = 0.0;
            for (const auto& p : pools) {
                mean += p.value[v];
            }
            mean /= static_cast<double>(pools.size());
            total += mean * mean;
        }
        return total;
    };
    double loss = infonce_loss(scores);
    if (w > 0.0 && (cfg.lambda_q > 0.0 || cfg.lambda_d > 0.0)) {
        loss += w * (cfg.lambda_q * flops_dense(q_pool) + cfg.lambda_d * flops_dense(d_pool));
    }

    if (stats != nullptr) {
        // nnz is a property of the stored f32 form, so round before counting.
        for (const auto& p : q_pool) {
            stats->q_nnz_sum += static_cast<double>(SparseVector::from_dense(std::span<const double>(p.value)).nnz());
        }
        for (const auto& p : d_pool) {
            stats->d_nnz_sum += static_cast<double>(SparseVector::from_dense(std::span<const double>(p.value)).nnz());
        }
        stats->q_count += b;
        stats->d_count += c;
    }

    if (!want_grad) {
        return loss;
    }
    if (grad_embedding.size() != params.embedding.size() || grad_projection.size() != params.projection.size()) {
        throw ContractViolation("batch_loss_grad: gradient buffers must match parameter sizes");
    }

    // dL/ds = (softmax(row) - onehot(positive)) / B, rows independent.
    std::vector<double> g_scores(b * c, 0.0);
    const double inv_b = 1.0 / static_cast<double>(b);
    for (std::size_t i = 0; i < b; ++i) {
        const double* row = scores.scores.data() + i * c;
        double m = row[0];
        for (std::size_t j = 1; j < c; ++j) {
            m = std::max(m, row[j]);
        }
        double z = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            z += std::exp(row[j] - m);
        }
        double* g_row = g_scores.data() + i * c;
        for (std::size_t j = 0; j < c; ++j) {
            g_row[j] = std::exp(row[j] - m) / z * inv_b;
        }
        g_row[i] -= inv_b;
    }

    // FLOPs term: d/d a_ij of w * lambda * sum_v mean_v^2 is 2 * w * lambda * mean_v / B,
    // identical for every row; means come from the same pooled values the loss used.
    std::vector<double> q_flops(params.vocab_size, 0.0), d_flops(params.vocab_size, 0.0);
    if (w > 0.0 && (cfg.lambda_q > 0.0 || cfg.lambda_d > 0.0)) {
        for (const auto& p : q_pool) {
            for (uint32_t v = 0; v < params.vocab_size; ++v) {
                q_flops[v] += p.value[v];
            }
        }
        for (const auto& p : d_pool) {
            for (uint32_t v = 0; v < params.vocab_size; ++v) {
                d_flops[v] += p.value[v];
            }
        }
        const double qk = 2.0 * w * cfg.lambda_q / (static_cast<double>(b) * static_cast<double>(b));
        const double dk = 2.0 * w * cfg.lambda_d / (static_cast<double>(c) * static_cast<double>(c));
        for (uint32_t v = 0; v < params.vocab_size; ++v) {
            q_flops[v] *= qk;
            d_flops[v] *= dk;
        }
    }

    std::vector<double> upstream(params.vocab_size);
    for (std::size_t i = 0; i < b; ++i) {
        for (uint32_t v = 0; v < params.vocab_size; ++v) {
            double acc = q_flops[v];
            for (std::size_t j = 0; j < c; ++j) {
                acc += g_scores[i * c + j] * d_pool[j].value[v] * inv_tau;
            }
            upstream[v] = acc;
        }
        LogitMatrix g = splade_pool_backward(q_logits[i], upstream);
        toy_encode_backward(batch[i].query, params, g, grad_embedding, grad_projection);
    }
    for (std::size_t j = 0; j < c; ++j) {
        for (uint32_t v = 0; v < params.vocab_size; ++v) {
            double acc = d_flops[v];
            for (std::size_t i = 0; i < b; ++i) {
                acc += g_scores[i * c + j] * q_pool[i].value[v] * inv_tau;
            }
            upstream[v] = acc;
        }
        LogitMatrix g = splade_pool_backward(d_logits[j], upstream);
        toy_encode_backward(cand_tokens[j], params, g, grad_embedding, grad_projection);
    }
    return loss;
}

}  // namespace

double
batch_loss(std::span<const Triplet> batch, const ToyEncoderParams& params, const TrainConfig& cfg, uint64_t step) {
    return run_batch(batch, params, cfg, step, false, {}, {}, nullptr);
}

double
batch_loss_grad(std::span<const Triplet> batch, const ToyEncoderParams& params, const TrainConfig& cfg, uint64_t step,
                std::span<double> grad_embedding, std::span<double> grad_projection) {
    return run_batch(batch, params, cfg, step, true, grad_embedding, grad_projection, nullptr);
}

ToyTrainResult
train_toy(std::span<const Triplet> corpus, const TrainConfig& cfg, uint64_t seed) {
    cfg.validate();
    if (corpus.empty()) {
        throw ContractViolation("train_toy: corpus must be nonempty");
    }
    if (cfg.phase == TrainPhase::pre_finetune && corpus.size() < 2) {
        throw ContractViolation("train_toy: pre_finetune needs at least two triplets for in-batch negatives");
    }
    for (const auto& t : corpus) {
        if (cfg.phase == TrainPhase::finetune && t.negatives.size() != cfg.hard_negatives_per_query) {
            throw ContractViolation("train_toy: finetune triplets must carry exactly " +
                                    std::to_string(cfg.hard_negatives_per_query) + " hard negatives");
        }
    }

    ToyTrainResult result;
    result.params = ToyEncoderParams::random_init(cfg.model_tokens, cfg.model_dim, cfg.model_vocab, seed,
                                                  cfg.init_scale);
    std::vector<double> grad_emb(result.params.embedding.size());
    std::vector<double> grad_proj(result.params.projection.size());

    uint64_t step = 0;
    for (uint32_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        double loss_sum = 0.0;
        std::size_t batches = 0;
        BatchStats stats;
        for (std::size_t begin = 0; begin < corpus.size(); begin += cfg.batch_size) {
            const std::size_t len = std::min<std::size_t>(cfg.batch_size, corpus.size() - begin);
            auto batch = corpus.subspan(begin, len);
            // A lone pre_finetune triplet has no negatives at all; skip the tail batch.
            if (cfg.phase == TrainPhase::pre_finetune && len < 2) {
                continue;
            }
            std::fill(grad_emb.begin(), grad_emb.end(), 0.0);
            std::fill(grad_proj.begin(), grad_proj.end(), 0.0);
            loss_sum += run_batch(batch, result.params, cfg, step, true, grad_emb, grad_proj, &stats);
            for (std::size_t i = 0; i < grad_emb.size(); ++i) {
                result.params.embedding[i] -= cfg.learning_rate * grad_emb[i];
            }
            for (std::size_t i = 0; i < grad_proj.size(); ++i) {
                result.params.projection[i] -= cfg.learning_rate * grad_proj[i];
            }
            ++step;
            ++batches;
        }
        EpochMetrics m;
        m.epoch = epoch;
        m.loss = batches > 0 ? loss_sum / static_cast<double>(batches) : 0.0;
        m.mean_q_nnz = stats.q_count > 0 ? stats.q_nnz_sum / static_cast<double>(stats.q_count) : 0.0;
        m.mean_d_nnz = stats.d_count > 0 ? stats.d_nnz_sum / static_cast<double>(stats.d_count) : 0.0;
        result.metrics.push_back(m);
    }
    return result;
}

}  // namespace laconic
