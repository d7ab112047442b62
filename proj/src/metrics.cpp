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

#include "amtj/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace amtj::metrics {

namespace {

void check_energies(std::span<const double> e) {
    if (e.empty())
        throw InvalidArgument("energy list is empty");
    for (double v : e)
        if (!std::isfinite(v) || v < 0.0)
            throw InvalidArgument("energies must be finite and non-negative");
}

double mean_of(std::span<const double> e) { return std::accumulate(e.begin(), e.end(), 0.0) / double(e.size()); }

double population_sigma(std::span<const double> e, double mean) {
    double ss = 0.0;
    for (double v : e)
        ss += (v - mean) * (v - mean);
    return std::sqrt(ss / double(e.size()));
}

bool all_equal(std::span<const double> e) {
    return std::all_of(e.begin(), e.end(), [&](double v) { return v == e[0]; });
}

} // namespace

double ned(std::span<const double> energies) {
    check_energies(energies);
    const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
    if (!(*hi > 0.0))
        throw InvalidArgument("ned: all energies are zero");
    return (*hi - *lo) / *hi;
}

double nsd(std::span<const double> energies) {
    check_energies(energies);
    const double mean = mean_of(energies);
    if (!(mean > 0.0))
        throw InvalidArgument("nsd: mean energy is zero");
    if (all_equal(energies))
        return 0.0;
    return population_sigma(energies, mean) / mean;
}

EnergyReport summarize(std::vector<double> energies) {
    EnergyReport r;
    r.ned = ned(energies);
    r.nsd = nsd(energies);
    const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
    r.e_min = *lo;
    r.e_max = *hi;
    r.e_avg = std::clamp(mean_of(energies), r.e_min, r.e_max);
    r.sigma = all_equal(energies) ? 0.0 : population_sigma(energies, r.e_avg);
    r.energies = std::move(energies);
    return r;
}

EnergyReport energy_report(const trace::FamilyCfg &cfg) {
    cfg.validate();
    std::vector<double> e;
    if (cfg.family == trace::Family::AdiabaticMtj) {
        present::MtjSboxLut lut(trace::lut_instance_gate(cfg, 0), cfg.clock, cfg.samples_per_period, cfg.mtj);
        lut.program(present::kSbox);
        for (int x = 0; x < 16; ++x)
            e.push_back(lut.read(std::uint8_t(x)).energy());
    } else {
        for (int prev = 0; prev < 16; ++prev)
            for (int next = 0; next < 16; ++next)
                e.push_back(trace::cmos_sbox_cycle(cfg.gate, cfg.clock, std::uint8_t(prev), std::uint8_t(next),
                                                   cfg.samples_per_period)
                                .energy);
    }
    return summarize(std::move(e));
}

} // namespace amtj::metrics
