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

#include <cmath>
#include <sstream>

#include "doctest.h"

#include "laconic/error.hpp"
#include "laconic/training.hpp"

#include "support/test_rng.hpp"
#include "support/toy_corpus.hpp"

using namespace laconic;

namespace {

ScoreMatrix
uniform_scores(std::size_t rows, std::size_t cols, double value) {
    ScoreMatrix s(rows, cols);
    for (auto& x : s.scores) {
        x = value;
    }
    for (std::size_t i = 0; i < rows; ++i) {
        s.positive_index[i] = static_cast<uint32_t>(i % cols);
    }
    return s;
}

SparseVector
vec(uint32_t vocab, std::vector<TermWeight> entries) {
    return SparseVector::from_entries(vocab, std::move(entries));
}

// True when any pooled column of any sequence in the batch sits within eps of zero
// or of a max-pool tie; finite differences are meaningless there.
bool
batch_has_hazard(std::span<const Triplet> batch, const ToyEncoderParams& params, const TrainConfig& cfg, double eps) {
    std::vector<std::span<const uint32_t>> seqs;
    for (const auto& t : batch) {
        seqs.emplace_back(t.query);
        seqs.emplace_back(t.positive);
        if (cfg.phase == TrainPhase::finetune) {
            for (const auto& n : t.negatives) {
                seqs.emplace_back(n);
            }
        }
    }
    for (const auto& seq : seqs) {
        const auto detail = splade_pool_detail(toy_encode(seq, params));
        const auto H = toy_encode(seq, params);
        for (std::size_t j = 0; j < detail.colmax.size(); ++j) {
            if (std::fabs(detail.colmax[j]) < eps) {
                return true;
            }
            for (std::size_t i = 0; i < H.rows; ++i) {
                const double v = H.at(i, j);
                if (i != detail.argmax[j] && detail.colmax[j] - v < eps) {
                    return true;
                }
            }
        }
    }
    return false;
}

}  // namespace

TEST_CASE("infonce on uniform scores is ln(k)") {
    CHECK(std::fabs(infonce_loss(uniform_scores(1, 4, 2.5)) - std::log(4.0)) < 1e-12);
    CHECK(std::fabs(infonce_loss(uniform_scores(2, 8, -3.0)) - std::log(8.0)) < 1e-12);
}

TEST_CASE("infonce closed form for one strong positive") {
    ScoreMatrix s(1, 2);
    s.at(0, 0) = 10.0;
    s.at(0, 1) = 0.0;
    s.positive_index[0] = 0;
    CHECK(infonce_loss(s) == doctest::Approx(std::log1p(std::exp(-10.0))).epsilon(1e-12));
    CHECK(infonce_loss(s) == doctest::Approx(4.5398899216870535e-05).epsilon(1e-9));
}

TEST_CASE("infonce is invariant under per-row shifts") {
    test::Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto rows = 1 + rng.below(5);
        const auto cols = 2 + rng.below(7);
        ScoreMatrix s(rows, cols);
        for (auto& x : s.scores) {
            x = rng.uniform(-5.0, 5.0);
        }
        for (std::size_t i = 0; i < rows; ++i) {
            s.positive_index[i] = static_cast<uint32_t>(rng.below(cols));
        }
        ScoreMatrix shifted = s;
        for (std::size_t i = 0; i < rows; ++i) {
            const double c = rng.uniform(-50.0, 50.0);
            for (std::size_t j = 0; j < cols; ++j) {
                shifted.at(i, j) += c;
            }
        }
        CHECK(std::fabs(infonce_loss(s) - infonce_loss(shifted)) < 1e-9);
    }
}

TEST_CASE("infonce validates its inputs") {
    ScoreMatrix s(1, 1);
    CHECK_THROWS_AS(infonce_loss(s), ContractViolation);  // no negatives

    ScoreMatrix bad(1, 3);
    bad.positive_index[0] = 3;
    CHECK_THROWS_AS(infonce_loss(bad), ContractViolation);  // positive out of range
}

TEST_CASE("flops_reg closed forms") {
    std::vector<SparseVector> empties{SparseVector(4), SparseVector(4)};
    CHECK(flops_reg(empties) == 0.0);

    std::vector<SparseVector> single{vec(4, {{2, 1.5f}})};
    CHECK(flops_reg(single) == doctest::Approx(2.25).epsilon(1e-12));

    std::vector<SparseVector> pair{vec(2, {{0, 1.0f}}), vec(2, {{1, 1.0f}})};
    CHECK(flops_reg(pair) == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(flops_reg(std::vector<SparseVector>{}), ContractViolation);
}

TEST_CASE("flops_reg is permutation invariant and scales quadratically") {
    test::Rng rng(5);
    std::vector<SparseVector> batch;
    for (int i = 0; i < 6; ++i) {
        batch.push_back(test::random_vector(rng, 24, 1 + rng.below(10)));
    }
    auto shuffled = batch;
    std::swap(shuffled[0], shuffled[5]);
    std::swap(shuffled[2], shuffled[3]);
    CHECK(flops_reg(batch) == doctest::Approx(flops_reg(shuffled)).epsilon(1e-12));

    const double c = 3.0;
    std::vector<SparseVector> scaled;
    for (const auto& v : batch) {
        std::vector<TermWeight> entries(v.entries().begin(), v.entries().end());
        for (auto& e : entries) {
            e.weight *= static_cast<float>(c);
        }
        scaled.push_back(SparseVector::from_entries(v.vocab_size(), std::move(entries)));
    }
    CHECK(flops_reg(scaled) == doctest::Approx(c * c * flops_reg(batch)).epsilon(1e-6));
}

TEST_CASE("warmup ramp") {
    CHECK(warmup(0, 100) == 0.0);
    CHECK(warmup(100, 100) == 1.0);
    CHECK(warmup(250, 100) == 1.0);
    CHECK(warmup(50, 100) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(warmup(5, 0) == 1.0);
    CHECK(warmup(30, 100, 1.0) == doctest::Approx(0.3).epsilon(1e-12));
    double prev = -1.0;
    for (uint64_t step = 0; step <= 120; ++step) {
        const double w = warmup(step, 100);
        CHECK(w >= prev);
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
        prev = w;
    }
}

TEST_CASE("total_loss composes the pieces") {
    ScoreMatrix s = uniform_scores(2, 4, 1.0);
    std::vector<SparseVector> q{vec(4, {{0, 1.0f}}), vec(4, {{1, 2.0f}})};
    std::vector<SparseVector> d{vec(4, {{2, 1.0f}}), vec(4, {{3, 0.5f}})};

    TrainConfig cfg;
    cfg.lambda_q = 0.0;
    cfg.lambda_d = 0.0;
    CHECK(total_loss(s, q, d, cfg, 1000) == infonce_loss(s));

    cfg.lambda_q = 1e-3;
    cfg.lambda_d = 1e-3;
    cfg.warmup_steps = 10;
    CHECK(total_loss(s, q, d, cfg, 0) == infonce_loss(s));  // ramp starts at zero
    const double expect = infonce_loss(s) + 1e-3 * (flops_reg(q) + flops_reg(d));
    CHECK(total_loss(s, q, d, cfg, 10) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(total_loss(s, q, d, cfg, 99) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("triplet JSONL parses and validates") {
    std::stringstream buf;
    buf << R"({"query": [1, 2], "positive": [3], "negatives": [[4], [5, 6]]})" << '\n';
    buf << R"({"query": [7], "positive": [8]})" << '\n';
    const auto triplets = read_triplets_jsonl(buf, "buffer");
    REQUIRE(triplets.size() == 2);
    CHECK(triplets[0].query == std::vector<uint32_t>{1, 2});
    CHECK(triplets[0].negatives.size() == 2);
    CHECK(triplets[1].negatives.empty());

    std::stringstream bad;
    bad << R"({"query": [], "positive": [1]})" << '\n';
    try {
        read_triplets_jsonl(bad, "buffer");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
}

TEST_CASE("metrics CSV layout") {
    std::vector<EpochMetrics> rows{{1, 2.5, 3.0, 4.5}, {2, 1.25, 2.0, 4.0}};
    std::stringstream buf;
    write_metrics_csv(buf, rows);
    std::string line;
    std::getline(buf, line);
    CHECK(line == "epoch,loss,mean_q_nnz,mean_d_nnz");
    std::getline(buf, line);
    CHECK(line == "1,2.5,3,4.5");
    std::getline(buf, line);
    CHECK(line == "2,1.25,2,4");
}

TEST_CASE("train config validation") {
    TrainConfig cfg;
    cfg.phase = TrainPhase::pre_finetune;
    cfg.hard_negatives_per_query = 2;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);

    cfg.hard_negatives_per_query = 0;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);

    cfg = TrainConfig{};
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("batch gradients match finite differences") {
    test::Rng rng(31);
    const double step = 1e-5;
    int instances_checked = 0;
    for (int trial = 0; trial < 30 || instances_checked < 20; ++trial) {
        REQUIRE(trial < 200);
        TrainConfig cfg;
        cfg.model_tokens = 6;
        cfg.model_dim = 3;
        cfg.model_vocab = 8;
        cfg.batch_size = 2;
        cfg.lambda_q = trial % 2 == 0 ? 1e-2 : 0.0;
        cfg.lambda_d = trial % 2 == 0 ? 1e-2 : 0.0;
        cfg.warmup_steps = 4;
        cfg.phase = trial % 3 == 0 ? TrainPhase::finetune : TrainPhase::pre_finetune;
        cfg.hard_negatives_per_query = cfg.phase == TrainPhase::finetune ? 1 : 0;
        cfg.temperature = trial % 5 == 0 ? 0.7 : 1.0;

        std::vector<Triplet> batch(2);
        for (auto& t : batch) {
            t.query = {static_cast<uint32_t>(rng.below(6))};
            t.positive = {static_cast<uint32_t>(rng.below(6)), static_cast<uint32_t>(rng.below(6))};
            if (cfg.phase == TrainPhase::finetune) {
                t.negatives.push_back({static_cast<uint32_t>(rng.below(6))});
            }
        }
        const auto params = ToyEncoderParams::random_init(cfg.model_tokens, cfg.model_dim, cfg.model_vocab,
                                                          rng.raw());
        if (batch_has_hazard(batch, params, cfg, 5e-3)) {
            continue;
        }

        std::vector<double> ge(params.embedding.size(), 0.0);
        std::vector<double> gp(params.projection.size(), 0.0);
        const double base = batch_loss_grad(batch, params, cfg, 2, ge, gp);
        CHECK(base == doctest::Approx(batch_loss(batch, params, cfg, 2)).epsilon(1e-12));

        auto check_param = [&](bool is_embedding, std::size_t slot, double analytic) {
            auto probe = params;
            auto& arr = is_embedding ? probe.embedding : probe.projection;
            arr[slot] += step;
            const double hi = batch_loss(batch, probe, cfg, 2);
            arr[slot] -= 2.0 * step;
            const double lo = batch_loss(batch, probe, cfg, 2);
            const double fd = (hi - lo) / (2.0 * step);
            CHECK(std::fabs(analytic - fd) <= 1e-3 * std::max({std::fabs(analytic), std::fabs(fd), 1e-5}));
        };
        for (std::size_t i = 0; i < ge.size(); ++i) {
            check_param(true, i, ge[i]);
        }
        for (std::size_t i = 0; i < gp.size(); ++i) {
            check_param(false, i, gp[i]);
        }
        ++instances_checked;
    }
    CHECK(instances_checked >= 20);
}

TEST_CASE("train_toy with zero epochs returns the seeded init") {
    const auto corpus = test::separable_corpus(8);
    TrainConfig cfg;
    cfg.epochs = 0;
    cfg.model_tokens = 16;
    cfg.model_dim = 4;
    cfg.model_vocab = 16;
    const auto result = train_toy(corpus, cfg, 42);
    CHECK(result.params == ToyEncoderParams::random_init(16, 4, 16, 42, cfg.init_scale));
    CHECK(result.metrics.empty());
}

TEST_CASE("train_toy is deterministic and learns a separable corpus") {
    const auto corpus = test::separable_corpus(16);
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch_size = 8;
    cfg.model_tokens = 32;
    cfg.model_dim = 8;
    cfg.model_vocab = 32;
    cfg.learning_rate = 0.5;

    const auto a = train_toy(corpus, cfg, 7);
    const auto b = train_toy(corpus, cfg, 7);
    CHECK(a.params == b.params);
    REQUIRE(a.metrics.size() == 20);
    CHECK(a.metrics.back().loss < a.metrics.front().loss);
    for (const auto& m : a.metrics) {
        CHECK(std::isfinite(m.loss));
        CHECK(m.mean_q_nnz >= 0.0);
        CHECK(m.mean_d_nnz >= 0.0);
    }

    const auto c = train_toy(corpus, cfg, 8);
    CHECK(c.params != a.params);
}

TEST_CASE("train_toy validates corpus against config") {
    CHECK_THROWS_AS(train_toy(std::vector<Triplet>{}, TrainConfig{}, 1), ContractViolation);

    // Finetune demands the declared number of hard negatives on every triplet.
    auto corpus = test::separable_corpus(4, 2);
    TrainConfig cfg;
    cfg.phase = TrainPhase::finetune;
    cfg.hard_negatives_per_query = 3;
    cfg.model_tokens = 8;
    cfg.model_vocab = 8;
    CHECK_THROWS_AS(train_toy(corpus, cfg, 1), ContractViolation);
    cfg.hard_negatives_per_query = 2;
    CHECK_NOTHROW(train_toy(corpus, cfg, 1));
}
