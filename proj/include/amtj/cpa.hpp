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

//
// First-order correlation power analysis against the round-1 S-box outputs.
//

#pragma once

#include "amtj/traces.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace amtj::cpa {

using present::State64;
using trace::TraceSet;

enum class ModelKind { HammingWeight, HammingDistance };

struct HypothesisModel {
    ModelKind kind = ModelKind::HammingWeight;
    std::optional<std::uint8_t> reference; // HD baseline nibble

    static HypothesisModel hamming_weight() { return {}; }
    static HypothesisModel hamming_distance(std::uint8_t reference) {
        return {ModelKind::HammingDistance, std::uint8_t(reference & 0xF)};
    }
    /// A reference is required for HD and forbidden for HW.
    void validate() const;
    /// Hypothetical leakage for plaintext nibble v under key guess g.
    int predict(std::uint8_t v, std::uint8_t g) const;
};

/// n x 16 matrix; row i holds the leakage predicted for trace i under each
/// of the 16 key guesses.
std::vector<std::array<std::uint8_t, 16>> hypothesis_matrix(std::span<const State64> plaintexts,
                                                            int nibble_idx, const HypothesisModel &model);

/// Sample Pearson coefficient, computed in a single streaming pass. Zero when
/// either input has zero variance.
double pearson(std::span<const double> h, std::span<const double> s);

/// Correlations of the 16 guesses against every sample column.
struct CorrMatrix {
    std::size_t n_samples = 0;
    std::vector<double> values; // row-major 16 x n_samples

    double at(int guess, std::size_t sample) const { return values[std::size_t(guess) * n_samples + sample]; }
    std::span<const double> row(int guess) const {
        return {values.data() + std::size_t(guess) * n_samples, n_samples};
    }
};

struct NibbleResult {
    CorrMatrix corr;
    std::array<double, 16> peak_per_guess{}; // max |r| over samples
    std::array<std::uint8_t, 16> ranking{};  // best first
    std::uint8_t best_guess = 0;
    double peak_abs_corr = 0.0;
};

struct CpaResult {
    std::size_t n_traces = 0;
    HypothesisModel model;
    std::array<NibbleResult, 16> per_nibble;
    State64 recovered_roundkey = 0;
    std::optional<State64> true_roundkey; // present when the trace set carries the key
    std::optional<bool> success;

    /// Nibbles whose best guess matches the true round key (needs the key).
    int nibbles_correct() const;
};

NibbleResult cpa_nibble(const TraceSet &ts, int nibble_idx,
                        const HypothesisModel &model = HypothesisModel::hamming_weight());

CpaResult cpa_full(const TraceSet &ts, const HypothesisModel &model = HypothesisModel::hamming_weight());

/// Prefix sizes evaluated by mtd and cpa_progression: step, 2*step, ... and
/// always the full set size.
std::vector<std::size_t> prefix_sizes(std::size_t n_traces, std::size_t step);

/// Rank of the true guess (0 = best) of every nibble at each prefix size.
struct PrefixRanks {
    std::vector<std::size_t> sizes;
    std::vector<std::array<int, 16>> true_rank;
};

PrefixRanks prefix_ranks(const TraceSet &ts, State64 true_roundkey, std::size_t step = 128,
                         const HypothesisModel &model = HypothesisModel::hamming_weight());

/// Measurements to disclosure: smallest tested prefix from which all 16
/// nibbles rank the true guess first at every larger tested prefix.
std::optional<std::size_t> mtd(const TraceSet &ts, State64 true_roundkey, std::size_t step = 128,
                               const HypothesisModel &model = HypothesisModel::hamming_weight());

/// Peak |r| of each guess of one nibble as a function of the prefix size.
struct Progression {
    int nibble = 0;
    std::vector<std::size_t> sizes;
    std::vector<std::array<double, 16>> peak_per_guess;
};

Progression cpa_progression(const TraceSet &ts, int nibble_idx, std::size_t step = 128,
                            const HypothesisModel &model = HypothesisModel::hamming_weight());

/// JSON document with the per-nibble rankings, peak correlations, the
/// recovered key and, when known, the success flag.
std::string result_to_json(const CpaResult &result, int indent = 2);

/// Long-format CSV "guess,sample,r": one row per (guess, sample).
std::string corr_csv(const CorrMatrix &corr);

} // namespace amtj::cpa
