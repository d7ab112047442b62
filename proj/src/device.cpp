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

#include "amtj/device.hpp"
#include "amtj/error.hpp"
#include "amtj/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace amtj::device {

using std::numbers::pi;

MtjParams::MtjParams(double r_p, double r_ap) : r_parallel(r_p), r_antiparallel(r_ap) {
    validate();
}

void MtjParams::validate() const {
    if (!(r_parallel > 0.0))
        throw InvalidArgument("MTJ parallel resistance must be positive");
    if (!(r_antiparallel > r_parallel))
        throw InvalidArgument("MTJ antiparallel resistance must exceed the parallel resistance");
}

double ra_derived_resistance(const MtjParams &params) {
    const double area_um2 = pi / 4.0 * (params.axis_a_nm * 1e-3) * (params.axis_b_nm * 1e-3);
    if (!(area_um2 > 0.0))
        throw InvalidArgument("MTJ surface area must be positive");
    return params.resistance_area_product / area_um2;
}

double mtj_resistance(MtjState state, const MtjParams &params) {
    params.validate();
    return state == MtjState::Parallel ? params.r_parallel : params.r_antiparallel;
}

double tmr_ratio(double r_p, double r_ap) {
    if (!(r_p > 0.0))
        throw InvalidArgument("tmr_ratio: parallel resistance must be positive");
    return (r_ap - r_p) / r_p;
}

double adiabatic_transition_energy(double r, double c, double t_period, double vdd) {
    if (!(r > 0.0) || !(c > 0.0) || !(t_period > 0.0))
        throw InvalidArgument("adiabatic_transition_energy: R, C and T must be positive");
    if (vdd < 0.0)
        throw InvalidArgument("adiabatic_transition_energy: negative supply swing");
    return (r * c / t_period) * c * vdd * vdd;
}

double conventional_switching_energy(double c, double vdd) {
    if (c < 0.0)
        throw InvalidArgument("conventional_switching_energy: negative capacitance");
    return 0.5 * c * vdd * vdd;
}

void PowerClockCfg::validate() const {
    if (!(frequency > 0.0))
        throw InvalidArgument("power clock frequency must be positive");
    if (!(vdd > 0.0))
        throw InvalidArgument("power clock swing must be positive");
    if (phase_deg != 0.0 && phase_deg != 90.0)
        throw InvalidArgument("two-phase power clock phase must be 0 or 90 degrees");
    if (!(discharge_fraction > 0.0 && discharge_fraction < 1.0))
        throw InvalidArgument("discharge fraction must lie in (0, 1)");
}

namespace {

// Time since the clock's own rising flank started, in [0, T).
double local_time(const PowerClockCfg &cfg, double t) {
    const double period = cfg.period();
    const double shifted = t - cfg.phase_deg / 360.0 * period;
    double u = std::fmod(shifted, period);
    if (u < 0.0)
        u += period;
    return u;
}

// (dv/dt)^2 normalized so that it integrates to 1 over one period.
double loss_profile(const PowerClockCfg &cfg, double u) {
    const double period = cfg.period();
    if (cfg.shape == ClockShape::Sinusoidal) {
        const double s = std::sin(2.0 * pi * u / period);
        return 2.0 / period * s * s;
    }
    // Trapezoid: ramp up, high, ramp down, low; one quarter each.
    const double q = u / (period / 4.0);
    const double eps = 1e-9;
    auto on_edge = [&](double edge) { return std::abs(q - edge) < eps; };
    if (on_edge(0.0) || on_edge(1.0) || on_edge(2.0) || on_edge(3.0) || on_edge(4.0))
        return 1.0 / period;
    return (q < 1.0 || (q > 2.0 && q < 3.0)) ? 2.0 / period : 0.0;
}

// Raised-cosine pulse over the discharge window that closes the period.
double discharge_profile(const PowerClockCfg &cfg, double u) {
    const double period = cfg.period();
    const double width = cfg.discharge_fraction * period;
    const double start = period - width;
    if (u < start)
        return 0.0;
    const double s = std::sin(pi * (u - start) / width);
    return 2.0 / width * s * s;
}

void check_samples(int samples_per_period) {
    if (samples_per_period < 8)
        throw InvalidArgument("samples_per_period must be at least 8");
}

} // namespace

double power_clock_sample(const PowerClockCfg &cfg, double t) {
    cfg.validate();
    const double period = cfg.period();
    const double u = local_time(cfg, t);
    if (cfg.shape == ClockShape::Sinusoidal)
        return 0.5 * cfg.vdd * (1.0 - std::cos(2.0 * pi * u / period));
    const double q = u / (period / 4.0);
    if (q < 1.0)
        return cfg.vdd * q;
    if (q < 2.0)
        return cfg.vdd;
    if (q < 3.0)
        return cfg.vdd * (3.0 - q);
    return 0.0;
}

void GateCfg::validate() const {
    if (!(load_capacitance > 0.0))
        throw InvalidArgument("load capacitance must be positive");
    if (!(on_resistance > 0.0))
        throw InvalidArgument("on resistance must be positive");
    if (!(residual_imbalance_epsilon >= 0.0 && residual_imbalance_epsilon <= 1.0))
        throw InvalidArgument("residual imbalance epsilon must lie in [0, 1]");
    if (leakage_power < 0.0)
        throw InvalidArgument("leakage power must be non-negative");
    if (!(resolve_threshold_fraction > 0.0 && resolve_threshold_fraction < 1.0))
        throw InvalidArgument("resolve threshold fraction must lie in (0, 1)");
    if (!(discharge_energy_fraction >= 0.0 && discharge_energy_fraction < 1.0))
        throw InvalidArgument("discharge energy fraction must lie in [0, 1)");
}

double waveform_energy(std::span<const WaveformPoint> waveform, double vdd) {
    double e = 0.0;
    for (std::size_t k = 1; k < waveform.size(); ++k) {
        const double dt = waveform[k].time - waveform[k - 1].time;
        e += 0.5 * dt * (waveform[k].current + waveform[k - 1].current);
    }
    return e * vdd;
}

CycleResult pcsa_cycle(const GateCfg &cfg, const PowerClockCfg &clock, MtjState branch_true,
                       MtjState branch_comp, int samples_per_period, const MtjParams &mtj) {
    cfg.validate();
    clock.validate();
    mtj.validate();
    check_samples(samples_per_period);
    if (branch_true == branch_comp)
        throw DegenerateRace("pcsa_cycle: both branches hold the same MTJ state");

    const double period = clock.period();
    const double c = cfg.load_capacitance;
    const double vdd = clock.vdd;
    const double r_win = mtj.r_parallel;
    const double r_both = mtj.r_parallel * mtj.r_antiparallel / (mtj.r_parallel + mtj.r_antiparallel);

    // The Parallel-side node discharges fastest and trips the latch once its
    // deviation reaches the threshold; until then both branches conduct.
    const double t_res = std::min(r_win * c * std::log(1.0 / (1.0 - cfg.resolve_threshold_fraction)),
                                  0.5 * period);

    const double f_dis = cfg.discharge_energy_fraction;
    const double e_win = adiabatic_transition_energy(r_win, c, period, vdd) / (1.0 + f_dis);
    const double e_both = adiabatic_transition_energy(r_both, c, period, vdd) / (1.0 + f_dis);
    const double e_dis = f_dis * e_win;

    CycleResult res;
    res.out = branch_true == MtjState::Antiparallel;
    res.out_bar = !res.out;
    res.resolve_time = t_res;

    const double scale =
        1.0 + cfg.residual_imbalance_epsilon * mismatch_unit(cfg.mismatch_seed, res.out ? 1u : 0u);

    res.waveform.reserve(std::size_t(samples_per_period) + 1);
    for (int k = 0; k <= samples_per_period; ++k) {
        const double t = period * k / samples_per_period;
        const double u = local_time(clock, t);
        const double e_eval = u < t_res ? e_both : e_win;
        const double p = e_eval * loss_profile(clock, u) + e_dis * discharge_profile(clock, u);
        res.waveform.push_back({t, scale * p / vdd});
    }
    res.energy = waveform_energy(res.waveform, vdd);
    return res;
}

CycleResult adiabatic_xor_cycle(const GateCfg &cfg, const PowerClockCfg &clock, bool a, bool b,
                                bool prev, int samples_per_period) {
    cfg.validate();
    clock.validate();
    check_samples(samples_per_period);

    const double period = clock.period();
    const double vdd = clock.vdd;
    const double e_dyn = adiabatic_transition_energy(cfg.on_resistance, cfg.load_capacitance, period, vdd);
    const std::uint64_t data = (std::uint64_t(a) << 2) | (std::uint64_t(b) << 1) | std::uint64_t(prev);
    const double scale = 1.0 + cfg.residual_imbalance_epsilon * mismatch_unit(cfg.mismatch_seed, data);
    const double i_leak = cfg.leakage_power / vdd;

    CycleResult res;
    res.out = a != b;
    res.out_bar = !res.out;
    res.waveform.reserve(std::size_t(samples_per_period) + 1);
    for (int k = 0; k <= samples_per_period; ++k) {
        const double t = period * k / samples_per_period;
        const double p = scale * e_dyn * loss_profile(clock, local_time(clock, t));
        res.waveform.push_back({t, p / vdd + i_leak});
    }
    res.energy = waveform_energy(res.waveform, vdd);
    return res;
}

CycleResult cmos_toggle_cycle(const GateCfg &cfg, const PowerClockCfg &clock, int toggles,
                              int samples_per_period) {
    cfg.validate();
    clock.validate();
    check_samples(samples_per_period);
    if (toggles < 0)
        throw InvalidArgument("cmos_toggle_cycle: negative toggle count");

    const double period = clock.period();
    const double vdd = clock.vdd;
    const double tau = cfg.on_resistance * cfg.load_capacitance;
    const double e_toggle = conventional_switching_energy(cfg.load_capacitance, vdd);
    const double i_leak = cfg.leakage_power / vdd;
    // Charge per toggle is e_toggle / vdd, delivered as q/tau * exp(-t/tau).
    const double i_peak = toggles * e_toggle / vdd / tau;

    CycleResult res;
    res.out = toggles > 0;
    res.out_bar = !res.out;
    res.energy = toggles * e_toggle + cfg.leakage_power * period;

    const double spike_end = std::min(12.0 * tau, period);
    const double h = std::min(tau / 16.0, period / samples_per_period);
    if (toggles > 0) {
        const int n_fine = int(std::ceil(spike_end / h));
        for (int k = 0; k <= n_fine; ++k) {
            const double t = std::min(k * h, spike_end);
            if (!res.waveform.empty() && t <= res.waveform.back().time)
                break;
            res.waveform.push_back({t, i_peak * std::exp(-t / tau) + i_leak});
        }
    }
    for (int k = 0; k <= samples_per_period; ++k) {
        const double tg = period * k / samples_per_period;
        if (!res.waveform.empty() && tg <= res.waveform.back().time)
            continue;
        res.waveform.push_back({tg, i_peak * std::exp(-tg / tau) + i_leak});
    }
    return res;
}

CycleResult cmos_gate_cycle(const GateCfg &cfg, const PowerClockCfg &clock,
                            std::span<const std::uint8_t> prev_bits,
                            std::span<const std::uint8_t> new_bits, int samples_per_period) {
    if (prev_bits.size() != new_bits.size())
        throw InvalidArgument("cmos_gate_cycle: bit vectors differ in length (" +
                              std::to_string(prev_bits.size()) + " vs " +
                              std::to_string(new_bits.size()) + ")");
    int toggles = 0;
    for (std::size_t i = 0; i < new_bits.size(); ++i)
        toggles += (prev_bits[i] != 0) != (new_bits[i] != 0);
    return cmos_toggle_cycle(cfg, clock, toggles, samples_per_period);
}

double energy_per_cycle(const EnergyModelCoeffs &coeffs, double f_mhz) {
    if (!(f_mhz > 0.0))
        throw InvalidArgument("energy_per_cycle: frequency must be positive");
    return coeffs.adiabatic_coeff * f_mhz + coeffs.leakage_coeff / f_mhz + coeffs.constant;
}

EnergyModelCoeffs calibrate_energy_model(std::span<const std::pair<double, double>> points,
                                         FitTerms terms) {
    const int n_terms = terms.count();
    if (n_terms == 0)
        throw InvalidArgument("calibrate_energy_model: no free terms");
    if (points.size() < std::size_t(n_terms))
        throw InvalidArgument("calibrate_energy_model: need at least " + std::to_string(n_terms) +
                              " points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].first > 0.0))
            throw InvalidArgument("calibrate_energy_model: frequencies must be positive");
        if (points[i].second < 0.0)
            throw InvalidArgument("calibrate_energy_model: negative energy point");
        for (std::size_t j = 0; j < i; ++j)
            if (points[j].first == points[i].first)
                throw InvalidArgument("calibrate_energy_model: duplicate frequency " +
                                      std::to_string(points[i].first) + " MHz");
    }

    const bool free_term[3] = {terms.adiabatic, terms.leakage, terms.constant};
    auto basis = [](int term, double f) { return term == 0 ? f : term == 1 ? 1.0 / f : 1.0; };

    // Non-negative least squares on three variables: the optimum is the
    // unconstrained solution on its own support, so enumerate supports.
    const Eigen::Index m = Eigen::Index(points.size());
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i)
        y(i) = points[std::size_t(i)].second;

    double best_residual = y.squaredNorm();
    Eigen::Vector3d best = Eigen::Vector3d::Zero();
    for (int mask = 1; mask < 8; ++mask) {
        int cols[3];
        int nc = 0;
        bool allowed = true;
        for (int t = 0; t < 3; ++t) {
            if (mask & (1 << t)) {
                if (!free_term[t])
                    allowed = false;
                cols[nc++] = t;
            }
        }
        if (!allowed)
            continue;
        Eigen::MatrixXd design(m, nc);
        for (Eigen::Index i = 0; i < m; ++i)
            for (int c = 0; c < nc; ++c)
                design(i, c) = basis(cols[c], points[std::size_t(i)].first);
        const Eigen::VectorXd x = design.colPivHouseholderQr().solve(y);
        if ((x.array() < 0.0).any())
            continue;
        const double residual = (design * x - y).squaredNorm();
        if (residual < best_residual) {
            best_residual = residual;
            best.setZero();
            for (int c = 0; c < nc; ++c)
                best(cols[c]) = x(c);
        }
    }
    return {best(0), best(1), best(2)};
}

} // namespace amtj::device
