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

#pragma once

#include "amtj/traces.hpp"

#include <span>
#include <vector>

namespace amtj::metrics {

/// Normalized energy deviation (E_max - E_min) / E_max.
double ned(std::span<const double> energies);

/// Population standard deviation over mean.
double nsd(std::span<const double> energies);

struct EnergyReport {
    std::vector<double> energies; // J, one per input or input transition
    double e_min = 0.0;
    double e_max = 0.0;
    double e_avg = 0.0;
    double sigma = 0.0; // population standard deviation, J
    double ned = 0.0;
    double nsd = 0.0;
};

EnergyReport summarize(std::vector<double> energies);

/// Per-input energies of one S-box instance under the given family:
///  - AdiabaticMtj: the 16 reads of the MTJ LUT (four PCSA sense cycles each).
///  - Cmos: the 256 transitions prev -> new of the gate-level S-box model.
EnergyReport energy_report(const trace::FamilyCfg &cfg);

} // namespace amtj::metrics
