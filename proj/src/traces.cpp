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

#include "amtj/traces.hpp"
#include "amtj/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace amtj::trace {

using device::CycleResult;
using device::GateCfg;
using device::PowerClockCfg;

namespace {

// Settling offsets of the CMOS groups, as fractions of the period.
constexpr double kCmosXorOffset = 0.05;
constexpr double kCmosSboxOffset = 0.20;
constexpr double kCmosSboxStagger = 0.04;
constexpr double kCmosRegisterOffset = 0.90;

// Tags separating the per-instance mismatch seeds of each gate kind.
constexpr std::uint64_t kXorTag = 1;
constexpr std::uint64_t kLutTag = 2;

std::uint64_t low_mask(int bits) {
    return bits >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << bits) - 1;
}

} // namespace

std::string_view family_name(Family f) {
    return f == Family::Cmos ? "cmos" : "adiabatic-mtj";
}

Family parse_family(std::string_view name) {
    if (name == "cmos")
        return Family::Cmos;
    if (name == "adiabatic-mtj")
        return Family::AdiabaticMtj;
    throw InvalidArgument("unknown logic family '" + std::string(name) +
                          "' (expected cmos or adiabatic-mtj)");
}

FamilyCfg FamilyCfg::defaults(Family family) {
    FamilyCfg cfg;
    cfg.family = family;
    if (family == Family::Cmos) {
        cfg.gate.residual_imbalance_epsilon = 0.0;
        cfg.gate.leakage_power = 50e-9;
    } else {
        cfg.gate.leakage_power = 0.1e-9;
    }
    return cfg;
}

void FamilyCfg::validate() const {
    gate.validate();
    clock.validate();
    mtj.validate();
    if (samples_per_period < 8)
        throw InvalidArgument("samples_per_period must be at least 8");
    if (flipflop_count < 0 || flipflop_count > 64)
        throw InvalidArgument("flipflop_count must lie in [0, 64]");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
        throw InvalidArgument("noise sigma must be a finite non-negative value");
}

void TraceSet::validate() const {
    if (meta.samples_per_period < 1 || meta.cycles < 1)
        throw InvalidArgument("trace set: invalid sampling configuration");
    if (meta.n_samples != std::size_t(meta.samples_per_period) * std::size_t(meta.cycles))
        throw InvalidArgument("trace set: n_samples must equal samples_per_period x cycles");
    if (plaintexts.size() != meta.n_traces)
        throw InvalidArgument("trace set: plaintext count does not match n_traces");
    if (samples.size() != meta.n_traces * meta.n_samples)
        throw InvalidArgument("trace set: sample matrix does not match n_traces x n_samples");
    if (meta.key_present != key.has_value())
        throw InvalidArgument("trace set: key_present flag does not match the stored key");
    for (float v : samples)
        if (!std::isfinite(v))
            throw InvalidArgument("trace set: non-finite sample");
}

std::mt19937_64 trace_stream(std::uint64_t seed, std::size_t index) {
    return std::mt19937_64(derive_seed(seed, {std::uint64_t(index)}));
}

std::vector<double> noise_row(std::mt19937_64 &rng, std::size_t n_samples, double sigma) {
    std::vector<double> noise(n_samples, 0.0);
    if (sigma > 0.0) {
        std::normal_distribution<double> dist(0.0, sigma);
        for (double &v : noise)
            v = dist(rng);
    }
    return noise;
}

GateCfg xor_instance_gate(const FamilyCfg &cfg, int bit) {
    GateCfg gate = cfg.gate;
    gate.mismatch_seed = derive_seed(cfg.gate.mismatch_seed, {kXorTag, std::uint64_t(bit)});
    return gate;
}

GateCfg lut_instance_gate(const FamilyCfg &cfg, int lut) {
    GateCfg gate = cfg.gate;
    gate.mismatch_seed = derive_seed(cfg.gate.mismatch_seed, {kLutTag, std::uint64_t(lut)});
    return gate;
}

State64 round1_output(State64 pt, Key80 key) {
    return present::player(present::sbox_layer(present::add_round_key(pt, key.round_key())));
}

std::vector<std::uint8_t> cmos_sbox_nodes(std::uint8_t x, bool include_inputs) {
    x &= 0xF;
    std::vector<std::uint8_t> nodes;
    nodes.reserve(24);
    if (include_inputs)
        for (int b = 0; b < 4; ++b)
            nodes.push_back((x >> b) & 1u);
    for (int line = 0; line < 16; ++line)
        nodes.push_back(line == x);
    const std::uint8_t y = present::sbox(x);
    for (int b = 0; b < 4; ++b)
        nodes.push_back((y >> b) & 1u);
    return nodes;
}

CycleResult cmos_sbox_cycle(const GateCfg &gate, const PowerClockCfg &clock, std::uint8_t prev_in,
                            std::uint8_t new_in, int samples_per_period) {
    const auto prev = cmos_sbox_nodes(prev_in, true);
    const auto next = cmos_sbox_nodes(new_in, true);
    return device::cmos_gate_cycle(gate, clock, prev, next, samples_per_period);
}

void accumulate_waveform(std::span<double> row, double sample_spacing,
                         std::span<const device::WaveformPoint> waveform, double offset) {
    if (row.empty() || waveform.size() < 2)
        return;
    const double window = sample_spacing * double(row.size());
    const std::size_t last_bin = row.size() - 1;

    // Integrates the linear segment (a, ia) -> (b, ib) restricted to [x0, x1],
    // both inside [0, window], into the bins it covers.
    auto deposit = [&](double a, double b, double ia, double ib, double x0, double x1) {
        const double slope = (ib - ia) / (b - a);
        auto current = [&](double x) { return ia + slope * (x - a); };
        std::size_t bin = std::min(std::size_t(x0 / sample_spacing), last_bin);
        while (x0 < x1) {
            const double edge = bin == last_bin ? x1 : std::min(double(bin + 1) * sample_spacing, x1);
            row[bin] += (edge - x0) * 0.5 * (current(x0) + current(edge)) / sample_spacing;
            x0 = edge;
            ++bin;
        }
    };

    for (std::size_t k = 1; k < waveform.size(); ++k) {
        double a = waveform[k - 1].time + offset;
        double b = waveform[k].time + offset;
        if (!(b > a))
            continue;
        const double wraps = std::floor(a / window);
        a -= wraps * window;
        b -= wraps * window;
        const double ia = waveform[k - 1].current;
        const double ib = waveform[k].current;
        // Walk the segment window by window.
        double lo = a;
        double base = 0.0;
        while (lo < b) {
            const double hi = std::min(b, base + window);
            deposit(a - base, b - base, ia, ib, lo - base, hi - base);
            lo = hi;
            base += window;
        }
    }
}

struct RoundSimulator::Impl {
    FamilyCfg cfg;
    Key80 key;
    std::size_t n_samples = 0;
    double dt = 0.0;

    // Adiabatic family: XOR gate g with plaintext bit p at [2g + p]; LUT j
    // read at cell x at [16j + x].
    std::vector<std::vector<double>> xor_rows;
    std::vector<double> xor_energy;
    std::vector<std::vector<double>> lut_rows;
    std::vector<double> lut_energy;

    // CMOS family: XOR layer and register by toggle count, S-box j at input x.
    std::vector<std::vector<double>> cmos_xor_rows;
    std::vector<double> cmos_xor_energy;
    std::vector<std::vector<double>> cmos_sbox_rows;
    std::vector<double> cmos_sbox_energy;
    std::vector<std::vector<double>> cmos_reg_rows;
    std::vector<double> cmos_reg_energy;

    std::vector<double> binned(const CycleResult &c, double offset) const {
        std::vector<double> row(n_samples, 0.0);
        accumulate_waveform(row, dt, c.waveform, offset);
        return row;
    }

    void build_adiabatic() {
        const int spp = cfg.samples_per_period;
        const double period = cfg.clock.period();
        const PowerClockCfg phase0 = cfg.clock.with_phase(0.0);
        const PowerClockCfg phase90 = cfg.clock.with_phase(90.0);

        xor_rows.resize(128);
        xor_energy.resize(128);
        for (int g = 0; g < 64; ++g) {
            const GateCfg gate = xor_instance_gate(cfg, g);
            const bool kb = (key.round_key() >> g) & 1u;
            for (int p = 0; p < 2; ++p) {
                // Outputs are discharged before every evaluation.
                const CycleResult c = device::adiabatic_xor_cycle(gate, phase0, p != 0, kb, false, spp);
                xor_rows[std::size_t(2 * g + p)] = binned(c, 0.0);
                xor_energy[std::size_t(2 * g + p)] = c.energy;
            }
        }

        lut_rows.resize(256);
        lut_energy.resize(256);
        for (int j = 0; j < 16; ++j) {
            const GateCfg gate = lut_instance_gate(cfg, j);
            present::MtjSboxLut lut(gate, phase90, spp, cfg.mtj);
            lut.program(present::kSbox);
            for (int x = 0; x < 16; ++x) {
                const present::LutRead &r = lut.read(std::uint8_t(x));
                std::vector<double> row(n_samples, 0.0);
                for (const CycleResult &c : r.cycles)
                    accumulate_waveform(row, dt, c.waveform, period);
                lut_rows[std::size_t(16 * j + x)] = std::move(row);
                lut_energy[std::size_t(16 * j + x)] = r.energy();
            }
        }
    }

    void build_cmos() {
        const int spp = cfg.samples_per_period;
        const double period = cfg.clock.period();

        for (int t = 0; t <= 64; ++t) {
            const CycleResult c = device::cmos_toggle_cycle(cfg.gate, cfg.clock, t, spp);
            cmos_xor_rows.push_back(binned(c, kCmosXorOffset * period));
            cmos_xor_energy.push_back(c.energy);
        }
        for (int j = 0; j < 16; ++j) {
            const double offset = (kCmosSboxOffset + kCmosSboxStagger * j) * period;
            for (int x = 0; x < 16; ++x) {
                // The S-box inputs are the XOR-layer output nets, already
                // accounted for in the XOR group.
                const auto nodes = cmos_sbox_nodes(std::uint8_t(x), false);
                const std::vector<std::uint8_t> reset(nodes.size(), 0);
                const CycleResult c = device::cmos_gate_cycle(cfg.gate, cfg.clock, reset, nodes, spp);
                cmos_sbox_rows.push_back(binned(c, offset));
                cmos_sbox_energy.push_back(c.energy);
            }
        }
        if (cfg.flipflop_count > 0) {
            for (int t = 0; t <= cfg.flipflop_count; ++t) {
                const CycleResult c = device::cmos_toggle_cycle(cfg.gate, cfg.clock, t, spp);
                cmos_reg_rows.push_back(binned(c, kCmosRegisterOffset * period));
                cmos_reg_energy.push_back(c.energy);
            }
        }
    }
};

RoundSimulator::RoundSimulator(const FamilyCfg &cfg, Key80 key) : impl_(std::make_unique<Impl>()) {
    cfg.validate();
    impl_->cfg = cfg;
    impl_->key = key;
    impl_->n_samples = cfg.n_samples();
    impl_->dt = cfg.sample_spacing();
    if (cfg.family == Family::Cmos)
        impl_->build_cmos();
    else
        impl_->build_adiabatic();
}

RoundSimulator::~RoundSimulator() = default;
RoundSimulator::RoundSimulator(RoundSimulator &&) noexcept = default;
RoundSimulator &RoundSimulator::operator=(RoundSimulator &&) noexcept = default;

const FamilyCfg &RoundSimulator::config() const { return impl_->cfg; }

std::vector<double> RoundSimulator::simulate(State64 pt, State64 prev_register) const {
    const Impl &m = *impl_;
    std::vector<double> row(m.n_samples, 0.0);
    auto add = [&row](const std::vector<double> &part) {
        for (std::size_t s = 0; s < row.size(); ++s)
            row[s] += part[s];
    };
    const State64 x = present::add_round_key(pt, m.key.round_key());
    if (m.cfg.family == Family::AdiabaticMtj) {
        for (int g = 0; g < 64; ++g)
            add(m.xor_rows[std::size_t(2 * g + int((pt >> g) & 1u))]);
        for (int j = 0; j < 16; ++j)
            add(m.lut_rows[std::size_t(16 * j + present::nibble(x, j))]);
    } else {
        add(m.cmos_xor_rows[std::size_t(std::popcount(x))]);
        for (int j = 0; j < 16; ++j)
            add(m.cmos_sbox_rows[std::size_t(16 * j + present::nibble(x, j))]);
        if (m.cfg.flipflop_count > 0) {
            const State64 diff = (prev_register ^ round1_output(pt, m.key)) & low_mask(m.cfg.flipflop_count);
            add(m.cmos_reg_rows[std::size_t(std::popcount(diff))]);
        }
    }
    return row;
}

double RoundSimulator::round_energy(State64 pt, State64 prev_register) const {
    const Impl &m = *impl_;
    const State64 x = present::add_round_key(pt, m.key.round_key());
    double e = 0.0;
    if (m.cfg.family == Family::AdiabaticMtj) {
        for (int g = 0; g < 64; ++g)
            e += m.xor_energy[std::size_t(2 * g + int((pt >> g) & 1u))];
        for (int j = 0; j < 16; ++j)
            e += m.lut_energy[std::size_t(16 * j + present::nibble(x, j))];
    } else {
        e += m.cmos_xor_energy[std::size_t(std::popcount(x))];
        for (int j = 0; j < 16; ++j)
            e += m.cmos_sbox_energy[std::size_t(16 * j + present::nibble(x, j))];
        if (m.cfg.flipflop_count > 0) {
            const State64 diff = (prev_register ^ round1_output(pt, m.key)) & low_mask(m.cfg.flipflop_count);
            e += m.cmos_reg_energy[std::size_t(std::popcount(diff))];
        }
    }
    return e;
}

std::vector<double> synthesize_trace(State64 pt, Key80 key, const FamilyCfg &cfg, std::mt19937_64 &rng,
                                     State64 prev_register) {
    const RoundSimulator sim(cfg, key);
    std::vector<double> row = sim.simulate(pt, prev_register);
    const std::vector<double> noise = noise_row(rng, row.size(), cfg.noise_sigma);
    for (std::size_t s = 0; s < row.size(); ++s)
        row[s] += noise[s];
    return row;
}

TraceSet gen_trace_set(std::size_t n, Key80 key, const FamilyCfg &cfg, std::uint64_t seed) {
    if (n == 0)
        throw InvalidArgument("gen_trace_set: at least one trace is required");
    const RoundSimulator sim(cfg, key);

    TraceSet ts;
    ts.meta.family = cfg.family;
    ts.meta.frequency = cfg.clock.frequency;
    ts.meta.vdd = cfg.clock.vdd;
    ts.meta.samples_per_period = cfg.samples_per_period;
    ts.meta.cycles = cfg.cycles();
    ts.meta.n_traces = n;
    ts.meta.n_samples = cfg.n_samples();
    ts.meta.noise_sigma = cfg.noise_sigma;
    ts.meta.seed = seed;
    ts.meta.key_present = true;
    ts.key = key;

    ts.plaintexts.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        ts.plaintexts[i] = trace_stream(seed, i)();

    const std::size_t ns = ts.meta.n_samples;
    ts.samples.resize(n * ns);
    for (std::size_t i = 0; i < n; ++i) {
        std::mt19937_64 rng = trace_stream(seed, i);
        rng.discard(1); // plaintext
        const State64 prev =
            (cfg.family == Family::Cmos && i > 0) ? round1_output(ts.plaintexts[i - 1], key) : 0;
        const std::vector<double> row = sim.simulate(ts.plaintexts[i], prev);
        const std::vector<double> noise = noise_row(rng, ns, cfg.noise_sigma);
        for (std::size_t s = 0; s < ns; ++s)
            ts.samples[i * ns + s] = float(row[s] + noise[s]);
    }
    return ts;
}

} // namespace amtj::trace
