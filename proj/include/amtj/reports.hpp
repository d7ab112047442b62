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
// Report assembly: energy sweeps, CPA plots and the JSON report envelope.
// All emitters are deterministic; every file is written to a temporary name
// and renamed into place.
//

#pragma once

#include "amtj/cpa.hpp"
#include "amtj/device.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace amtj::reports {

std::string tool_version();

/// Measured energy per cycle of one PRESENT round (pJ) for both families.
struct ReferencePoint {
    double freq_mhz;
    double cmos_pj;
    double adiabatic_pj;
};
const std::array<ReferencePoint, 5> &reference_energy_table();

/// Default coefficient sets: CMOS fitted with A held at 0, the adiabatic row
/// fitted with all three terms, both by least squares over the full table.
struct Calibration {
    device::EnergyModelCoeffs cmos;
    device::EnergyModelCoeffs adiabatic;
};
Calibration default_calibration();

struct SweepRow {
    double freq_mhz;
    double cmos_pj;
    double adiabatic_pj;
    double reduction_pct; // 100 (cmos - adiabatic) / cmos
};

std::vector<SweepRow> energy_sweep(const std::vector<double> &freqs_mhz, const Calibration &cal);

/// CSV with columns freq_mhz, cmos_pj, adiabatic_pj, reduction_pct.
std::string sweep_csv(const std::vector<SweepRow> &rows);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color; // empty selects from the palette
    double width = 1.5;
};

/// Self-contained SVG line chart.
std::string line_chart_svg(const std::string &title, const std::string &x_label, const std::string &y_label,
                           const std::vector<Series> &series);

/// Writes sweep CSV and, when svg_path is given, the chart of pJ/cycle vs MHz.
void emit_energy_sweep(const std::vector<SweepRow> &rows, const std::filesystem::path &csv_path,
                       const std::optional<std::filesystem::path> &svg_path = std::nullopt);

/// Writes <prefix>_corr.csv/.svg (|r| vs sample per guess) and
/// <prefix>_progression.csv/.svg (peak |r| vs prefix size per guess).
/// true_guess, when known, is drawn on top in a distinct colour.
std::vector<std::filesystem::path> emit_cpa_plots(const cpa::NibbleResult &result, const cpa::Progression &progression,
                                                  const std::filesystem::path &prefix,
                                                  std::optional<std::uint8_t> true_guess = std::nullopt);

/// 64-bit FNV-1a of the compact serialization, as 16 hex digits.
std::string config_hash(const nlohmann::ordered_json &config);

/// {"command", "tool_version", "config_hash", "config", "results"}.
nlohmann::ordered_json make_report(const std::string &command, const nlohmann::ordered_json &config,
                                   const nlohmann::ordered_json &results);

/// Creates or replaces path through a temporary sibling and a rename.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

} // namespace amtj::reports
