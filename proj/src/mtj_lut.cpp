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

#include "amtj/error.hpp"
#include "amtj/present.hpp"
#include "amtj/rng.hpp"

namespace amtj::present {

using device::MtjState;

std::uint64_t lut_pair_seed(std::uint64_t lut_seed, std::uint8_t cell, int bit) {
    return derive_seed(lut_seed, {0x4C55548Dull, cell, std::uint64_t(bit)});
}

MtjSboxLut::MtjSboxLut(device::GateCfg gate, device::PowerClockCfg clock, int samples_per_period,
                       device::MtjParams mtj)
    : gate_(gate), clock_(clock), samples_per_period_(samples_per_period), mtj_(mtj) {
    gate_.validate();
    clock_.validate();
    mtj_.validate();
    if (samples_per_period_ < 8)
        throw InvalidArgument("MtjSboxLut: samples_per_period must be at least 8");
}

void MtjSboxLut::program(std::span<const std::uint8_t, 16> table) {
    if (programmed_)
        throw WriteOnceViolation("MtjSboxLut: table is write-once and has already been programmed");
    for (std::size_t x = 0; x < 16; ++x) {
        if (table[x] > 0xF)
            throw InvalidArgument("MtjSboxLut: table entries must be nibbles");
        for (int b = 0; b < 4; ++b)
            cells_[x][std::size_t(b)] =
                ((table[x] >> b) & 1u) ? MtjState::Antiparallel : MtjState::Parallel;
    }
    // Every read of a cell senses the same stored pairs, so the sense cycles
    // are evaluated once here.
    for (std::size_t x = 0; x < 16; ++x) {
        LutRead &r = reads_[x];
        r.value = 0;
        for (int b = 0; b < 4; ++b) {
            device::GateCfg pair = gate_;
            pair.mismatch_seed = lut_pair_seed(gate_.mismatch_seed, std::uint8_t(x), b);
            const MtjState t = cells_[x][std::size_t(b)];
            r.cycles[std::size_t(b)] =
                device::pcsa_cycle(pair, clock_, t, device::opposite(t), samples_per_period_, mtj_);
            r.value |= std::uint8_t(r.cycles[std::size_t(b)].out) << b;
        }
    }
    programmed_ = true;
}

const LutRead &MtjSboxLut::read(std::uint8_t x) const {
    if (!programmed_)
        throw Error("MtjSboxLut: read before programming");
    return reads_[x & 0xF];
}

MtjState MtjSboxLut::stored_state(std::uint8_t x, int bit) const {
    if (!programmed_)
        throw Error("MtjSboxLut: read before programming");
    if (bit < 0 || bit > 3)
        throw InvalidArgument("MtjSboxLut: output bit must lie in [0, 3]");
    return cells_[x & 0xF][std::size_t(bit)];
}

} // namespace amtj::present
