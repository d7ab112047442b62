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
// Power-trace synthesis for one PRESENT round under either logic family,
// plus the on-disk trace-set format.
//
// A trace holds the bin-averaged dissipation current p(t)/Vdd on a fixed
// grid of samples_per_period samples per clock period:
//   - CMOS: one period. The XOR layer, the 16 S-box instances and the
//     output register switch at distinct offsets inside the period.
//   - Adiabatic-MTJ: two periods. XOR stage on the 0-degree clock, then the
//     MTJ S-box LUT reads on the 90-degree clock.
//

#pragma once

#include "amtj/device.hpp"
#include "amtj/error.hpp"
#include "amtj/present.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace amtj::trace {

using present::Key80;
using present::State64;

enum class Family { Cmos, AdiabaticMtj };

std::string_view family_name(Family f);
/// Accepts "cmos" and "adiabatic-mtj".
Family parse_family(std::string_view name);

struct FamilyCfg {
    Family family = Family::AdiabaticMtj;
    device::GateCfg gate;
    device::PowerClockCfg clock;
    device::MtjParams mtj;
    int samples_per_period = 80;
    int flipflop_count = 64; // CMOS output register width
    double noise_sigma = 0.0; // A, per sample

    /// Reference configuration of each family at 12.5 MHz.
    static FamilyCfg defaults(Family family);

    int cycles() const { return family == Family::Cmos ? 1 : 2; }
    std::size_t n_samples() const { return std::size_t(samples_per_period) * std::size_t(cycles()); }
    double sample_spacing() const { return clock.period() / samples_per_period; }
    void validate() const;
};

struct TraceMeta {
    Family family = Family::AdiabaticMtj;
    double frequency = 0.0; // Hz
    double vdd = 0.0;       // V
    int samples_per_period = 0;
    int cycles = 0;
    std::size_t n_traces = 0;
    std::size_t n_samples = 0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    bool key_present = false;

    bool operator==(const TraceMeta &) const = default;
};

struct TraceSet {
    TraceMeta meta;
    std::vector<State64> plaintexts;
    std::optional<Key80> key;
    std::vector<float> samples; // row-major n_traces x n_samples

    std::span<const float> row(std::size_t i) const {
        return {samples.data() + i * meta.n_samples, meta.n_samples};
    }
    /// Checks dimensions against meta and that every sample is finite.
    void validate() const;
    bool operator==(const TraceSet &) const = default;
};

/// Independent random stream for trace `index` of a set generated from `seed`.
std::mt19937_64 trace_stream(std::uint64_t seed, std::size_t index);

/// Zero-mean Gaussian noise row drawn from rng.
std::vector<double> noise_row(std::mt19937_64 &rng, std::size_t n_samples, double sigma);

/// Gate configuration, with its own mismatch seed, of the XOR gate for state
/// bit `bit` and of S-box LUT instance `lut` in the adiabatic round.
device::GateCfg xor_instance_gate(const FamilyCfg &cfg, int bit);
device::GateCfg lut_instance_gate(const FamilyCfg &cfg, int lut);

/// Contents of the CMOS output register after one round.
State64 round1_output(State64 pt, Key80 key);

/// Node vector of the CMOS S-box model for input x: optionally the 4 input
/// nodes, then a one-hot 16-line decoder, then the 4 outputs.
std::vector<std::uint8_t> cmos_sbox_nodes(std::uint8_t x, bool include_inputs);

/// Isolated CMOS S-box switching from input prev_in to new_in.
device::CycleResult cmos_sbox_cycle(const device::GateCfg &gate, const device::PowerClockCfg &clock,
                                    std::uint8_t prev_in, std::uint8_t new_in,
                                    int samples_per_period = 80);

/// Adds a gate waveform to a row of bin-averaged samples. The waveform is
/// shifted by `offset` and wraps around the row's time window.
void accumulate_waveform(std::span<double> row, double sample_spacing,
                         std::span<const device::WaveformPoint> waveform, double offset);

/// Precomputed per-gate sample rows for a fixed key and configuration.
class RoundSimulator {
  public:
    RoundSimulator(const FamilyCfg &cfg, Key80 key);
    ~RoundSimulator();
    RoundSimulator(RoundSimulator &&) noexcept;
    RoundSimulator &operator=(RoundSimulator &&) noexcept;

    /// Noiseless row. prev_register is the CMOS output register content left
    /// by the previous encryption (ignored for the adiabatic family).
    std::vector<double> simulate(State64 pt, State64 prev_register = 0) const;

    /// Sum of the per-gate cycle energies of one round.
    double round_energy(State64 pt, State64 prev_register = 0) const;

    const FamilyCfg &config() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One trace row: noiseless round simulation plus Gaussian noise of
/// cfg.noise_sigma drawn from rng.
std::vector<double> synthesize_trace(State64 pt, Key80 key, const FamilyCfg &cfg,
                                     std::mt19937_64 &rng, State64 prev_register = 0);

/// n traces with uniformly random plaintexts. Trace i draws its plaintext
/// and then its noise from trace_stream(seed, i). For CMOS the output
/// register starts at 0 and then holds the previous trace's round output.
TraceSet gen_trace_set(std::size_t n, Key80 key, const FamilyCfg &cfg, std::uint64_t seed);

class TraceFileError : public Error {
  public:
    enum class Kind { Io, BadMagic, VersionMismatch, BadMetadata, TruncatedPayload, DimensionMismatch, BadSample };

    TraceFileError(Kind kind, const std::string &what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

inline constexpr std::uint16_t kTraceFormatVersion = 1;

void write_trace_file(const TraceSet &ts, const std::filesystem::path &path);
TraceSet read_trace_file(const std::filesystem::path &path);

/// Comment line with metadata, a column header, then one row per trace:
/// plaintext hex followed by the samples at 9 significant digits.
void export_csv(const TraceSet &ts, const std::filesystem::path &path);

} // namespace amtj::trace
