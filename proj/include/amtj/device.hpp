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
// Behavioral device and energy models: MTJ resistance, adiabatic and
// conventional switching energy, two-phase power clocks, the pre-charged
// sense amplifier race, and the per-cycle energy-vs-frequency model.
//

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace amtj::device {

enum class MtjState { Parallel, Antiparallel };

inline MtjState opposite(MtjState s) {
    return s == MtjState::Parallel ? MtjState::Antiparallel : MtjState::Parallel;
}

/// Perpendicular CoFeB/MgO junction. Lengths in nm, resistances in ohms,
/// resistance-area product in ohm*um^2. Defaults are the reference device.
struct MtjParams {
    double free_layer_thickness_nm = 1.3;
    double axis_a_nm = 40.0;
    double axis_b_nm = 40.0;
    double oxide_thickness_nm = 0.85;
    double tmr = 1.5; // as stated for the device; see tmr_ratio() for the computed contrast
    double resistance_area_product = 5.0;
    double r_parallel = 6.21e3;
    double r_antiparallel = 18.64e3;

    MtjParams() = default;
    /// Throws InvalidArgument unless r_antiparallel > r_parallel > 0.
    MtjParams(double r_p, double r_ap);

    void validate() const;
};

/// Resistance implied by RA over the elliptical surface (pi/4 * a * b).
double ra_derived_resistance(const MtjParams &params);

double mtj_resistance(MtjState state, const MtjParams &params);

/// (r_ap - r_p) / r_p.
double tmr_ratio(double r_p, double r_ap);

/// Dissipation of one adiabatic transition, (R*C/T) * C * Vdd^2.
double adiabatic_transition_energy(double r, double c, double t_period, double vdd);

/// 1/2 * C * Vdd^2 per output transition.
double conventional_switching_energy(double c, double vdd);

enum class ClockShape { Sinusoidal, Trapezoidal };

struct PowerClockCfg {
    ClockShape shape = ClockShape::Sinusoidal;
    double frequency = 12.5e6; // Hz
    double vdd = 1.0;          // V
    double phase_deg = 0.0;    // 0 or 90
    double discharge_fraction = 0.25; // duty of the discharge signal within a period

    double period() const { return 1.0 / frequency; }
    void validate() const;

    /// Same clock shifted to the given phase.
    PowerClockCfg with_phase(double degrees) const {
        PowerClockCfg c = *this;
        c.phase_deg = degrees;
        return c;
    }
};

/// Power-clock voltage at time t. A clock of phase p lags the 0-degree
/// clock by p/360 of a period.
double power_clock_sample(const PowerClockCfg &cfg, double t);

struct GateCfg {
    double load_capacitance = 10e-15; // F
    double on_resistance = 5e3;       // ohms, transistor path of logic gates
    double residual_imbalance_epsilon = 0.005;
    double leakage_power = 0.0;       // W
    double resolve_threshold_fraction = 0.45;
    double discharge_energy_fraction = 0.10;
    std::uint64_t mismatch_seed = 0;  // identifies the physical instance

    void validate() const;
};

struct WaveformPoint {
    double time;    // s, relative to the cycle start
    double current; // A
};

struct CycleResult {
    bool out = false;
    bool out_bar = true;
    double energy = 0.0; // J
    std::vector<WaveformPoint> waveform;
    /// Latch resolution time for PCSA cycles, NaN otherwise.
    double resolve_time = std::numeric_limits<double>::quiet_NaN();
};

/// Trapezoidal integral of vdd * i(t) over a waveform.
double waveform_energy(std::span<const WaveformPoint> waveform, double vdd);

/// One read of a dual-rail MTJ pair through a pre-charged sense amplifier.
/// The node above the Parallel branch resolves to 0. Throws DegenerateRace
/// when both branches hold the same state.
CycleResult pcsa_cycle(const GateCfg &cfg, const PowerClockCfg &clock,
                       MtjState branch_true, MtjState branch_comp,
                       int samples_per_period,
                       const MtjParams &mtj = MtjParams{});

/// Dual-rail adiabatic XOR; prev is the output left by the previous cycle.
CycleResult adiabatic_xor_cycle(const GateCfg &cfg, const PowerClockCfg &clock,
                                bool a, bool b, bool prev,
                                int samples_per_period = 80);

/// Static CMOS group switching from prev_bits to new_bits (0/1 per entry).
/// Throws InvalidArgument on a length mismatch.
CycleResult cmos_gate_cycle(const GateCfg &cfg, const PowerClockCfg &clock,
                            std::span<const std::uint8_t> prev_bits,
                            std::span<const std::uint8_t> new_bits,
                            int samples_per_period = 80);

/// Same as cmos_gate_cycle for a group whose toggle count is already known.
CycleResult cmos_toggle_cycle(const GateCfg &cfg, const PowerClockCfg &clock,
                              int toggles, int samples_per_period = 80);

/// E(f) = A*f + B/f + gamma, with f in MHz and E in pJ.
struct EnergyModelCoeffs {
    double adiabatic_coeff = 0.0; // A, pJ/MHz
    double leakage_coeff = 0.0;   // B, pJ*MHz
    double constant = 0.0;        // gamma, pJ
};

double energy_per_cycle(const EnergyModelCoeffs &coeffs, double f_mhz);

/// Which coefficients the fit may move; the rest are held at 0.
struct FitTerms {
    bool adiabatic = true;
    bool leakage = true;
    bool constant = true;
    int count() const { return int(adiabatic) + int(leakage) + int(constant); }
};

/// Non-negative least-squares fit of EnergyModelCoeffs to (MHz, pJ)
/// points. Exact when the number of points equals the number of free terms
/// and the exact solution is non-negative.
EnergyModelCoeffs calibrate_energy_model(std::span<const std::pair<double, double>> points,
                                         FitTerms terms = {});

} // namespace amtj::device
