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
// PRESENT-80 block cipher. Bit 63 of a state is the most significant bit,
// nibble 0 is bits 3..0, and hex strings are written most significant
// nibble first.
//

#pragma once

#include "amtj/device.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace amtj::present {

using State64 = std::uint64_t;
using RoundKey64 = std::uint64_t;

/// 80-bit key register: hi holds bits 79..16, lo holds bits 15..0.
struct Key80 {
    std::uint64_t hi = 0;
    std::uint16_t lo = 0;

    /// Leftmost 64 bits, i.e. the round key extracted from this register.
    RoundKey64 round_key() const { return hi; }
    bool operator==(const Key80 &) const = default;
};

inline constexpr std::array<std::uint8_t, 16> kSbox = {0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD,
                                                       0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2};
inline constexpr int kFullRounds = 31;

std::uint8_t sbox(std::uint8_t x);
State64 sbox_layer(State64 s);
State64 player(State64 s);
State64 add_round_key(State64 s, RoundKey64 k);

/// One key-register update; round_counter in [1, 31].
Key80 key_schedule_round(Key80 k, int round_counter);

/// rounds x (addRoundKey, sBoxLayer, pLayer) followed by a final addRoundKey.
State64 present_encrypt(State64 pt, Key80 key, int rounds = kFullRounds);

struct SboxTarget {
    std::uint8_t sbox_in;
    std::uint8_t sbox_out;
};

/// First-round S-box inputs and outputs, indexed by nibble.
std::array<SboxTarget, 16> round1_targets(State64 pt, Key80 key);

inline std::uint8_t nibble(std::uint64_t word, int index) {
    return std::uint8_t((word >> (4 * index)) & 0xF);
}

State64 parse_state_hex(std::string_view hex);
Key80 parse_key_hex(std::string_view hex);
std::string to_hex(State64 s);
std::string to_hex(Key80 k);

/// Readout of one LUT cell: the stored nibble plus the four sense cycles
/// (output bit 0 first) that produced it.
struct LutRead {
    std::uint8_t value = 0;
    std::array<device::CycleResult, 4> cycles;

    double energy() const {
        return cycles[0].energy + cycles[1].energy + cycles[2].energy + cycles[3].energy;
    }
};

/// 16 x 4-bit look-up table in complementary MTJ pairs, sensed through a
/// PCSA per output bit. A stored 1 is the Antiparallel state on the true
/// branch. The table is written once; afterwards it is immutable.
class MtjSboxLut {
  public:
    MtjSboxLut(device::GateCfg gate, device::PowerClockCfg clock, int samples_per_period,
               device::MtjParams mtj = {});

    /// Throws WriteOnceViolation if the table has already been written.
    void program(std::span<const std::uint8_t, 16> table);
    bool programmed() const { return programmed_; }

    /// Throws Error if the table has not been written yet.
    const LutRead &read(std::uint8_t x) const;

    /// Pair state held on the true branch for (cell, output bit).
    device::MtjState stored_state(std::uint8_t x, int bit) const;

  private:
    device::GateCfg gate_;
    device::PowerClockCfg clock_;
    int samples_per_period_;
    device::MtjParams mtj_;
    bool programmed_ = false;
    std::array<std::array<device::MtjState, 4>, 16> cells_{};
    std::array<LutRead, 16> reads_{};
};

/// Per-pair mismatch seed used by a LUT whose gate seed is lut_seed.
std::uint64_t lut_pair_seed(std::uint64_t lut_seed, std::uint8_t cell, int bit);

} // namespace amtj::present
