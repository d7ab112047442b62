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

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace amtj::cpa {

namespace {

void check_nibble_index(int idx) {
    if (idx < 0 || idx > 15)
        throw InvalidArgument("nibble index must lie in [0, 15], got " + std::to_string(idx));
}

void check_nonempty(const TraceSet &ts) {
    if (ts.meta.n_traces == 0 || ts.meta.n_samples == 0)
        throw InvalidArgument("CPA needs a nonempty trace set");
    if (ts.samples.size() != ts.meta.n_traces * ts.meta.n_samples ||
        ts.plaintexts.size() != ts.meta.n_traces)
        throw InvalidArgument("CPA: trace set dimensions are inconsistent");
}

using Table = std::array<std::array<double, 16>, 16>; // [v][g]

Table prediction_table(const HypothesisModel &model) {
    Table t{};
    for (int v = 0; v < 16; ++v)
        for (int g = 0; g < 16; ++g)
            t[std::size_t(v)][std::size_t(g)] = model.predict(std::uint8_t(v), std::uint8_t(g));
    return t;
}

void rank(NibbleResult &r) {
    std::iota(r.ranking.begin(), r.ranking.end(), std::uint8_t(0));
    std::stable_sort(r.ranking.begin(), r.ranking.end(), [&](std::uint8_t a, std::uint8_t b) {
        return r.peak_per_guess[a] > r.peak_per_guess[b];
    });
    r.best_guess = r.ranking[0];
    r.peak_abs_corr = r.peak_per_guess[r.best_guess];
}

// Running per-class statistics of one nibble over a growing prefix. Samples
// are shifted by the first trace so the moment sums stay well conditioned.
class ClassAccumulator {
  public:
    ClassAccumulator(const TraceSet &ts, int nibble_idx)
        : ts_(ts), nibble_(nibble_idx), ns_(ts.meta.n_samples), count_{},
          class_sum_(16 * ns_, 0.0), sum_(ns_, 0.0), sum_sq_(ns_, 0.0), first_change_(ns_, SIZE_MAX) {}

    void extend_to(std::size_t n) {
        const auto base = ts_.row(0);
        for (; n_ < n; ++n_) {
            const auto row = ts_.row(n_);
            const std::size_t v = present::nibble(ts_.plaintexts[n_], nibble_);
            ++count_[v];
            double *cs = class_sum_.data() + v * ns_;
            for (std::size_t s = 0; s < ns_; ++s) {
                const double x = double(row[s]) - double(base[s]);
                cs[s] += x;
                sum_[s] += x;
                sum_sq_[s] += x * x;
                if (row[s] != base[s] && first_change_[s] == SIZE_MAX)
                    first_change_[s] = n_;
            }
        }
    }

    // Correlations of all guesses over the current prefix.
    CorrMatrix correlations(const Table &pred) const {
        CorrMatrix m;
        m.n_samples = ns_;
        m.values.assign(16 * ns_, 0.0);
        const double n = double(n_);
        for (int g = 0; g < 16; ++g) {
            double sh = 0.0, shh = 0.0;
            for (std::size_t v = 0; v < 16; ++v) {
                sh += count_[v] * pred[v][std::size_t(g)];
                shh += count_[v] * pred[v][std::size_t(g)] * pred[v][std::size_t(g)];
            }
            const double h_mean = sh / n;
            const double var_h = shh - sh * h_mean;
            if (!(var_h > 1e-9 * std::max(1.0, shh)))
                continue;
            for (std::size_t s = 0; s < ns_; ++s) {
                if (first_change_[s] >= n_)
                    continue; // constant column
                const double t_mean = sum_[s] / n;
                const double var_t = sum_sq_[s] - sum_[s] * t_mean;
                if (!(var_t > 0.0))
                    continue;
                double cov = 0.0;
                for (std::size_t v = 0; v < 16; ++v)
                    cov += pred[v][std::size_t(g)] * (class_sum_[v * ns_ + s] - count_[v] * t_mean);
                m.values[std::size_t(g) * ns_ + s] = std::clamp(cov / std::sqrt(var_h * var_t), -1.0, 1.0);
            }
        }
        return m;
    }

  private:
    const TraceSet &ts_;
    int nibble_;
    std::size_t ns_;
    std::size_t n_ = 0;
    std::array<double, 16> count_;
    std::vector<double> class_sum_;
    std::vector<double> sum_;
    std::vector<double> sum_sq_;
    std::vector<std::size_t> first_change_;
};

NibbleResult summarize(CorrMatrix corr) {
    NibbleResult r;
    for (int g = 0; g < 16; ++g) {
        double peak = 0.0;
        for (double v : corr.row(g))
            peak = std::max(peak, std::abs(v));
        r.peak_per_guess[std::size_t(g)] = peak;
    }
    r.corr = std::move(corr);
    rank(r);
    return r;
}

int rank_of(const NibbleResult &r, std::uint8_t guess) {
    for (int i = 0; i < 16; ++i)
        if (r.ranking[std::size_t(i)] == guess)
            return i;
    return 16;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

void HypothesisModel::validate() const {
    if (kind == ModelKind::HammingDistance && !reference)
        throw InvalidArgument("Hamming-distance model needs a reference nibble");
    if (kind == ModelKind::HammingWeight && reference)
        throw InvalidArgument("Hamming-weight model takes no reference nibble");
    if (reference && *reference > 0xF)
        throw InvalidArgument("reference must be a nibble");
}

int HypothesisModel::predict(std::uint8_t v, std::uint8_t g) const {
    std::uint8_t y = present::sbox(std::uint8_t((v ^ g) & 0xF));
    if (kind == ModelKind::HammingDistance)
        y ^= reference.value_or(0);
    return std::popcount(unsigned(y));
}

std::vector<std::array<std::uint8_t, 16>> hypothesis_matrix(std::span<const State64> plaintexts,
                                                            int nibble_idx, const HypothesisModel &model) {
    check_nibble_index(nibble_idx);
    model.validate();
    std::vector<std::array<std::uint8_t, 16>> h(plaintexts.size());
    for (std::size_t i = 0; i < plaintexts.size(); ++i) {
        const std::uint8_t v = present::nibble(plaintexts[i], nibble_idx);
        for (int g = 0; g < 16; ++g)
            h[i][std::size_t(g)] = std::uint8_t(model.predict(v, std::uint8_t(g)));
    }
    return h;
}

double pearson(std::span<const double> h, std::span<const double> s) {
    if (h.size() != s.size())
        throw InvalidArgument("pearson: vectors differ in length (" + std::to_string(h.size()) + " vs " +
                              std::to_string(s.size()) + ")");
    if (h.size() < 2)
        throw InvalidArgument("pearson: at least two observations are required");
    // Welford co-moment update.
    double mh = 0.0, ms = 0.0, m2h = 0.0, m2s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double k = double(i + 1);
        const double dh = h[i] - mh;
        const double ds = s[i] - ms;
        mh += dh / k;
        ms += ds / k;
        m2h += dh * (h[i] - mh);
        m2s += ds * (s[i] - ms);
        c += dh * (s[i] - ms);
    }
    const bool h_const = std::all_of(h.begin(), h.end(), [&](double x) { return x == h[0]; });
    const bool s_const = std::all_of(s.begin(), s.end(), [&](double x) { return x == s[0]; });
    if (h_const || s_const || !(m2h > 0.0) || !(m2s > 0.0))
        return 0.0;
    return std::clamp(c / std::sqrt(m2h * m2s), -1.0, 1.0);
}

int CpaResult::nibbles_correct() const {
    if (!true_roundkey)
        throw InvalidArgument("nibbles_correct: the true round key is unknown");
    int ok = 0;
    for (int j = 0; j < 16; ++j)
        ok += per_nibble[std::size_t(j)].best_guess == present::nibble(*true_roundkey, j);
    return ok;
}

NibbleResult cpa_nibble(const TraceSet &ts, int nibble_idx, const HypothesisModel &model) {
    check_nibble_index(nibble_idx);
    model.validate();
    check_nonempty(ts);
    const std::size_t n = ts.meta.n_traces;
    const std::size_t ns = ts.meta.n_samples;
    const Table pred = prediction_table(model);

    // First pass: class sums and column means.
    std::array<double, 16> count{};
    std::vector<double> class_sum(16 * ns, 0.0);
    std::vector<double> mean(ns, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t v = present::nibble(ts.plaintexts[i], nibble_idx);
        ++count[v];
        const auto row = ts.row(i);
        double *cs = class_sum.data() + v * ns;
        for (std::size_t s = 0; s < ns; ++s) {
            cs[s] += row[s];
            mean[s] += row[s];
        }
    }
    for (double &m : mean)
        m /= double(n);

    // Second pass: centered column variances and exact-constant detection.
    std::vector<double> var_t(ns, 0.0);
    std::vector<char> constant(ns, 1);
    const auto first = ts.row(0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = ts.row(i);
        for (std::size_t s = 0; s < ns; ++s) {
            const double d = row[s] - mean[s];
            var_t[s] += d * d;
            if (row[s] != first[s])
                constant[s] = 0;
        }
    }

    CorrMatrix corr;
    corr.n_samples = ns;
    corr.values.assign(16 * ns, 0.0);
    for (int g = 0; g < 16; ++g) {
        double h_mean = 0.0;
        for (std::size_t v = 0; v < 16; ++v)
            h_mean += count[v] * pred[v][std::size_t(g)];
        h_mean /= double(n);
        double var_h = 0.0;
        for (std::size_t v = 0; v < 16; ++v) {
            const double d = pred[v][std::size_t(g)] - h_mean;
            var_h += count[v] * d * d;
        }
        if (!(var_h > 0.0))
            continue;
        for (std::size_t s = 0; s < ns; ++s) {
            if (constant[s] || !(var_t[s] > 0.0))
                continue;
            // sum_i (h_i - h_mean)(t_i - t_mean) = sum_v (H_v - h_mean) * (S_v - n_v t_mean)
            double cov = 0.0;
            for (std::size_t v = 0; v < 16; ++v)
                cov += (pred[v][std::size_t(g)] - h_mean) * (class_sum[v * ns + s] - count[v] * mean[s]);
            corr.values[std::size_t(g) * ns + s] = std::clamp(cov / std::sqrt(var_h * var_t[s]), -1.0, 1.0);
        }
    }
    return summarize(std::move(corr));
}

CpaResult cpa_full(const TraceSet &ts, const HypothesisModel &model) {
    check_nonempty(ts);
    CpaResult r;
    r.n_traces = ts.meta.n_traces;
    r.model = model;
    for (int j = 0; j < 16; ++j) {
        r.per_nibble[std::size_t(j)] = cpa_nibble(ts, j, model);
        r.recovered_roundkey |= State64(r.per_nibble[std::size_t(j)].best_guess) << (4 * j);
    }
    if (ts.key) {
        r.true_roundkey = ts.key->round_key();
        r.success = r.recovered_roundkey == *r.true_roundkey;
    }
    return r;
}

std::vector<std::size_t> prefix_sizes(std::size_t n_traces, std::size_t step) {
    if (step == 0)
        throw InvalidArgument("prefix step must be at least 1");
    std::vector<std::size_t> sizes;
    for (std::size_t m = step; m < n_traces; m += step)
        sizes.push_back(m);
    if (n_traces > 0)
        sizes.push_back(n_traces);
    return sizes;
}

PrefixRanks prefix_ranks(const TraceSet &ts, State64 true_roundkey, std::size_t step,
                         const HypothesisModel &model) {
    check_nonempty(ts);
    model.validate();
    const Table pred = prediction_table(model);
    PrefixRanks out;
    out.sizes = prefix_sizes(ts.meta.n_traces, step);
    out.true_rank.assign(out.sizes.size(), {});
    for (int j = 0; j < 16; ++j) {
        ClassAccumulator acc(ts, j);
        const auto truth = present::nibble(true_roundkey, j);
        for (std::size_t p = 0; p < out.sizes.size(); ++p) {
            acc.extend_to(out.sizes[p]);
            out.true_rank[p][std::size_t(j)] = rank_of(summarize(acc.correlations(pred)), truth);
        }
    }
    return out;
}

std::optional<std::size_t> mtd(const TraceSet &ts, State64 true_roundkey, std::size_t step,
                               const HypothesisModel &model) {
    const PrefixRanks pr = prefix_ranks(ts, true_roundkey, step, model);
    std::optional<std::size_t> found;
    for (std::size_t p = pr.sizes.size(); p-- > 0;) {
        const auto &ranks = pr.true_rank[p];
        if (!std::all_of(ranks.begin(), ranks.end(), [](int r) { return r == 0; }))
            break;
        found = pr.sizes[p];
    }
    return found;
}

Progression cpa_progression(const TraceSet &ts, int nibble_idx, std::size_t step,
                            const HypothesisModel &model) {
    check_nibble_index(nibble_idx);
    check_nonempty(ts);
    model.validate();
    const Table pred = prediction_table(model);
    Progression out;
    out.nibble = nibble_idx;
    out.sizes = prefix_sizes(ts.meta.n_traces, step);
    ClassAccumulator acc(ts, nibble_idx);
    for (std::size_t m : out.sizes) {
        acc.extend_to(m);
        out.peak_per_guess.push_back(summarize(acc.correlations(pred)).peak_per_guess);
    }
    return out;
}

std::string result_to_json(const CpaResult &result, int indent) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["n_traces"] = result.n_traces;
    j["model"] = result.model.kind == ModelKind::HammingWeight ? "hw" : "hd";
    if (result.model.reference)
        j["reference"] = int(*result.model.reference);
    j["recovered_roundkey"] = present::to_hex(result.recovered_roundkey);
    if (result.true_roundkey) {
        j["true_roundkey"] = present::to_hex(*result.true_roundkey);
        j["nibbles_correct"] = result.nibbles_correct();
    }
    if (result.success)
        j["success"] = *result.success;
    ordered_json nibbles = ordered_json::array();
    for (int i = 0; i < 16; ++i) {
        const NibbleResult &n = result.per_nibble[std::size_t(i)];
        ordered_json e;
        e["index"] = i;
        e["best_guess"] = int(n.best_guess);
        e["peak_abs_corr"] = n.peak_abs_corr;
        e["ranking"] = std::vector<int>(n.ranking.begin(), n.ranking.end());
        e["peak_per_guess"] = std::vector<double>(n.peak_per_guess.begin(), n.peak_per_guess.end());
        nibbles.push_back(std::move(e));
    }
    j["nibbles"] = std::move(nibbles);
    return j.dump(indent);
}

std::string corr_csv(const CorrMatrix &corr) {
    std::string out = "guess,sample,r\n";
    for (int g = 0; g < 16; ++g)
        for (std::size_t s = 0; s < corr.n_samples; ++s)
            out += std::to_string(g) + "," + std::to_string(s) + "," + format_double(corr.at(g, s)) + "\n";
    return out;
}

} // namespace amtj::cpa
