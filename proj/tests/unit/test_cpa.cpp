/*
 * Copyright 2026 The amtj Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "amtj/cpa.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <random>
#include <set>

using namespace amtj;
using namespace amtj::cpa;

namespace {

const present::Key80 kKey{0xFEDCBA9876543210ull, 0x1357};

// n traces whose only data-dependent sample is HW(sbox(pt ^ k)) of each
// nibble at sample j, with a constant background elsewhere.
TraceSet synthetic_hw_set(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    TraceSet ts;
    ts.meta.samples_per_period = 20;
    ts.meta.cycles = 1;
    ts.meta.n_samples = 20;
    ts.meta.n_traces = n;
    ts.meta.key_present = true;
    ts.key = kKey;
    for (std::size_t i = 0; i < n; ++i) {
        const present::State64 pt = rng();
        ts.plaintexts.push_back(pt);
        const auto t = present::round1_targets(pt, kKey);
        for (int s = 0; s < 20; ++s) {
            const double v = s < 16 ? std::popcount(unsigned(t[std::size_t(s)].sbox_out)) : 0.25;
            ts.samples.push_back(float(scale * v));
        }
    }
    return ts;
}

TraceSet constant_set(std::size_t n) {
    TraceSet ts = synthetic_hw_set(n, 3);
    std::fill(ts.samples.begin(), ts.samples.end(), 0.3f);
    return ts;
}

} // namespace

TEST(Hypothesis, HammingWeightOfSboxOutput) {
    const std::vector<present::State64> pts = {0x0};
    const auto h = hypothesis_matrix(pts, 0, HypothesisModel::hamming_weight());
    EXPECT_EQ(h[0][0], 2); // HW(0xC)
    for (int g = 0; g < 16; ++g)
        EXPECT_EQ(h[0][std::size_t(g)], std::popcount(unsigned(present::sbox(std::uint8_t(g)))));
}

TEST(Hypothesis, GuessColumnsPermuteSboxWeights) {
    std::multiset<int> ref;
    for (int x = 0; x < 16; ++x)
        ref.insert(std::popcount(unsigned(present::sbox(std::uint8_t(x)))));
    for (int v = 0; v < 16; ++v) {
        const std::vector<present::State64> pts = {present::State64(v) << 8};
        const auto h = hypothesis_matrix(pts, 2, HypothesisModel::hamming_weight());
        EXPECT_EQ(std::multiset<int>(h[0].begin(), h[0].end()), ref);
    }
}

TEST(Hypothesis, DistanceToOwnOutputIsZeroForCorrectGuess) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 50; ++i) {
        const present::State64 pt = rng();
        const int j = int(rng() % 16);
        const std::uint8_t k = present::nibble(kKey.hi, j);
        const std::uint8_t ref = present::sbox(std::uint8_t(present::nibble(pt, j) ^ k));
        const std::vector<present::State64> pts = {pt};
        const auto h = hypothesis_matrix(pts, j, HypothesisModel::hamming_distance(ref));
        EXPECT_EQ(h[0][k], 0);
    }
}

TEST(Hypothesis, Validation) {
    HypothesisModel m;
    m.kind = ModelKind::HammingDistance;
    EXPECT_THROW(m.validate(), InvalidArgument);
    HypothesisModel w;
    w.reference = 3;
    EXPECT_THROW(w.validate(), InvalidArgument);
    const std::vector<present::State64> pts = {0};
    EXPECT_THROW(hypothesis_matrix(pts, 16, HypothesisModel::hamming_weight()), InvalidArgument);
}

TEST(Pearson, Basics) {
    EXPECT_NEAR(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}), 1.0, 1e-15);
    EXPECT_NEAR(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0, 1e-15);
    EXPECT_EQ(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}), 0.0);
    EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), InvalidArgument);
    EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{1}), InvalidArgument);
}

TEST(PearsonProperty, MatchesTwoPassOracle) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng() % (t < 5 ? 100000 : 3000);
        const double off = (t % 3) * 1e3, slope = nd(rng);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = off + nd(rng);
            y[i] = slope * x[i] + nd(rng);
        }
        EXPECT_NEAR(pearson(x, y), oracle::pearson_two_pass(x, y), 1e-12) << "n=" << n;
    }
}

TEST(PearsonProperty, SymmetryAffineInvarianceAndSign) {
    std::mt19937_64 rng(32);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> pos(0.1, 10.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 3 + rng() % 200;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = nd(rng);
            y[i] = x[i] * nd(rng) + nd(rng);
        }
        const double r = pearson(x, y);
        EXPECT_NEAR(pearson(y, x), r, 1e-12);
        const double a = pos(rng), b = nd(rng);
        std::vector<double> xa(n), xn(n);
        for (std::size_t i = 0; i < n; ++i) {
            xa[i] = a * x[i] + b;
            xn[i] = -a * x[i];
        }
        EXPECT_NEAR(pearson(xa, y), r, 1e-10);
        EXPECT_NEAR(pearson(xn, y), -r, 1e-10);
    }
}

TEST(CpaNibble, ExactLeakageGivesUnitCorrelation) {
    const TraceSet ts = synthetic_hw_set(2000, 5);
    for (int j = 0; j < 16; ++j) {
        const auto r = cpa_nibble(ts, j);
        const std::uint8_t k = present::nibble(kKey.hi, j);
        EXPECT_EQ(r.best_guess, k);
        EXPECT_EQ(r.ranking[0], k);
        EXPECT_NEAR(std::abs(r.corr.at(k, std::size_t(j))), 1.0, 1e-9);
        for (int g = 0; g < 16; ++g)
            if (g != k)
                EXPECT_LT(r.peak_per_guess[std::size_t(g)], r.peak_abs_corr - 1e-6);
        EXPECT_EQ(r.corr.n_samples, 20u);
        EXPECT_EQ(r.corr.values.size(), 16u * 20u);
    }
}

TEST(CpaNibble, MatchesColumnwiseOracle) {
    TraceSet ts = synthetic_hw_set(300, 6);
    std::mt19937_64 rng(7);
    std::normal_distribution<float> nd(0.0f, 0.5f);
    for (float &v : ts.samples)
        v += nd(rng);
    const int j = 9;
    const auto r = cpa_nibble(ts, j);
    const auto h = hypothesis_matrix(ts.plaintexts, j, HypothesisModel::hamming_weight());
    for (int g = 0; g < 16; ++g)
        for (std::size_t s = 0; s < ts.meta.n_samples; ++s) {
            std::vector<double> hx, sx;
            for (std::size_t i = 0; i < ts.meta.n_traces; ++i) {
                hx.push_back(h[i][std::size_t(g)]);
                sx.push_back(ts.row(i)[s]);
            }
            EXPECT_NEAR(r.corr.at(g, s), oracle::pearson_two_pass(hx, sx), 1e-9);
        }
}

TEST(CpaNibble, ConstantTracesGiveZeroAndGuessOrder) {
    const auto r = cpa_nibble(constant_set(500), 4);
    for (double v : r.corr.values)
        EXPECT_EQ(v, 0.0);
    for (int g = 0; g < 16; ++g)
        EXPECT_EQ(r.ranking[std::size_t(g)], g);
}

TEST(CpaNibble, RankingIsPermutationAndScaleInvariant) {
    TraceSet ts = synthetic_hw_set(400, 8);
    std::mt19937_64 rng(9);
    std::normal_distribution<float> nd(0.0f, 2.0f);
    for (float &v : ts.samples)
        v += nd(rng);
    TraceSet scaled = ts;
    for (float &v : scaled.samples)
        v *= 4.0f;
    for (int j = 0; j < 16; ++j) {
        const auto a = cpa_nibble(ts, j), b = cpa_nibble(scaled, j);
        std::set<int> seen(a.ranking.begin(), a.ranking.end());
        EXPECT_EQ(seen.size(), 16u);
        EXPECT_EQ(a.best_guess, a.ranking[0]);
        EXPECT_EQ(a.ranking, b.ranking);
    }
}

TEST(CpaNibble, Errors) {
    TraceSet empty;
    EXPECT_THROW(cpa_nibble(empty, 0), InvalidArgument);
    EXPECT_THROW(cpa_nibble(synthetic_hw_set(10, 1), 16), InvalidArgument);
}

TEST(CpaFull, RecoversKeyAndReportsSuccess) {
    const TraceSet ts = synthetic_hw_set(1000, 10);
    const auto r = cpa_full(ts);
    EXPECT_EQ(r.recovered_roundkey, kKey.hi);
    ASSERT_TRUE(r.success.has_value());
    EXPECT_TRUE(*r.success);
    EXPECT_EQ(r.nibbles_correct(), 16);
}

TEST(CpaFull, BlindModeHasNoSuccessFlag) {
    TraceSet ts = synthetic_hw_set(1000, 10);
    ts.key.reset();
    ts.meta.key_present = false;
    const auto r = cpa_full(ts);
    EXPECT_FALSE(r.success.has_value());
    EXPECT_EQ(r.recovered_roundkey, kKey.hi);
    const auto j = nlohmann::json::parse(result_to_json(r));
    EXPECT_FALSE(j.contains("success"));
    EXPECT_EQ(j["recovered_roundkey"], present::to_hex(kKey.hi));
}

TEST(CpaFull, JsonAndCsvShapes) {
    const auto r = cpa_full(synthetic_hw_set(300, 11));
    const auto j = nlohmann::json::parse(result_to_json(r));
    EXPECT_EQ(j["nibbles"].size(), 16u);
    EXPECT_EQ(j["nibbles"][0]["ranking"].size(), 16u);
    EXPECT_TRUE(j["success"].get<bool>());
    const std::string csv = corr_csv(r.per_nibble[0].corr);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 16 * 20);
}

TEST(Mtd, StableAndMonotone) {
    TraceSet ts = synthetic_hw_set(3000, 12);
    std::mt19937_64 rng(13);
    std::normal_distribution<float> nd(0.0f, 6.0f);
    for (float &v : ts.samples)
        v += nd(rng);
    const auto m = mtd(ts, kKey.hi, 100);
    ASSERT_TRUE(m.has_value());
    const auto pr = prefix_ranks(ts, kKey.hi, 100);
    for (std::size_t p = 0; p < pr.sizes.size(); ++p)
        if (pr.sizes[p] >= *m)
            for (int rank : pr.true_rank[p])
                EXPECT_EQ(rank, 0) << "prefix " << pr.sizes[p];
    // The prefix just below the reported value must not be fully ranked.
    for (std::size_t p = 0; p < pr.sizes.size(); ++p)
        if (pr.sizes[p] + 100 == *m)
            EXPECT_TRUE(std::any_of(pr.true_rank[p].begin(), pr.true_rank[p].end(), [](int r) { return r != 0; }));
}

TEST(Mtd, StepLargerThanSetEvaluatesOnce) {
    EXPECT_EQ(prefix_sizes(50, 128), std::vector<std::size_t>{50});
    EXPECT_EQ(prefix_sizes(256, 128), (std::vector<std::size_t>{128, 256}));
    EXPECT_EQ(prefix_sizes(300, 128), (std::vector<std::size_t>{128, 256, 300}));
    const auto m = mtd(synthetic_hw_set(60, 14), kKey.hi, 1000);
    ASSERT_TRUE(m.has_value());
    EXPECT_EQ(*m, 60u);
    EXPECT_THROW(prefix_sizes(10, 0), InvalidArgument);
}

TEST(Mtd, NotFoundOnConstantTraces) {
    EXPECT_FALSE(mtd(constant_set(400), kKey.hi, 64).has_value());
}

TEST(Progression, FinalPointMatchesFullRun) {
    TraceSet ts = synthetic_hw_set(700, 15);
    std::mt19937_64 rng(16);
    std::normal_distribution<float> nd(0.0f, 1.0f);
    for (float &v : ts.samples)
        v += nd(rng);
    const auto prog = cpa_progression(ts, 3, 128);
    ASSERT_EQ(prog.sizes.back(), 700u);
    const auto full = cpa_nibble(ts, 3);
    for (int g = 0; g < 16; ++g)
        EXPECT_NEAR(prog.peak_per_guess.back()[std::size_t(g)], full.peak_per_guess[std::size_t(g)], 1e-9);
}
