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

// Test-only PRESENT-80 written on explicit bit arrays, sharing no code with
// the library. Bit index 0 is the least significant bit everywhere.

#pragma once

#include <array>
#include <cstdint>

namespace refpresent {

using Bits64 = std::array<int, 64>;
using Bits80 = std::array<int, 80>;

inline constexpr int kSbox[16] = {12, 5, 6, 11, 9, 0, 10, 13, 3, 14, 15, 8, 4, 7, 1, 2};
inline constexpr int kInvSbox[16] = {5, 14, 15, 8, 12, 1, 2, 13, 11, 4, 6, 3, 0, 7, 9, 10};

inline Bits64 bits_of(std::uint64_t w) {
    Bits64 b{};
    for (int i = 0; i < 64; ++i)
        b[i] = int((w >> i) & 1);
    return b;
}

inline std::uint64_t word_of(const Bits64 &b) {
    std::uint64_t w = 0;
    for (int i = 63; i >= 0; --i)
        w = (w << 1) | std::uint64_t(b[i]);
    return w;
}

// Key given as (top 64 bits, low 16 bits).
inline Bits80 key_bits(std::uint64_t hi, std::uint16_t lo) {
    Bits80 k{};
    for (int i = 0; i < 16; ++i)
        k[i] = (lo >> i) & 1;
    for (int i = 0; i < 64; ++i)
        k[16 + i] = int((hi >> i) & 1);
    return k;
}

inline Bits64 round_key(const Bits80 &k) {
    Bits64 rk{};
    for (int i = 0; i < 64; ++i)
        rk[i] = k[16 + i];
    return rk;
}

inline void substitute(Bits64 &s, const int *table) {
    for (int n = 0; n < 16; ++n) {
        int v = s[4 * n] | (s[4 * n + 1] << 1) | (s[4 * n + 2] << 2) | (s[4 * n + 3] << 3);
        v = table[v];
        for (int j = 0; j < 4; ++j)
            s[4 * n + j] = (v >> j) & 1;
    }
}

inline int perm_target(int i) { return i == 63 ? 63 : (i * 16) % 63; }

inline void permute(Bits64 &s) {
    Bits64 o{};
    for (int i = 0; i < 64; ++i)
        o[perm_target(i)] = s[i];
    s = o;
}

inline void inv_permute(Bits64 &s) {
    Bits64 o{};
    for (int i = 0; i < 64; ++i)
        o[i] = s[perm_target(i)];
    s = o;
}

inline void update_key(Bits80 &k, int counter) {
    Bits80 r{};
    // Rotation by 61 to the left: new bit i comes from old bit (i - 61) mod 80.
    for (int i = 0; i < 80; ++i)
        r[i] = k[(i + 80 - 61) % 80];
    int top = r[76] | (r[77] << 1) | (r[78] << 2) | (r[79] << 3);
    top = kSbox[top];
    for (int j = 0; j < 4; ++j)
        r[76 + j] = (top >> j) & 1;
    for (int j = 0; j < 5; ++j)
        r[15 + j] ^= (counter >> j) & 1;
    k = r;
}

inline std::uint64_t encrypt(std::uint64_t pt, std::uint64_t key_hi, std::uint16_t key_lo, int rounds = 31) {
    Bits64 s = bits_of(pt);
    Bits80 k = key_bits(key_hi, key_lo);
    for (int r = 1; r <= rounds; ++r) {
        const Bits64 rk = round_key(k);
        for (int i = 0; i < 64; ++i)
            s[i] ^= rk[i];
        substitute(s, kSbox);
        permute(s);
        update_key(k, r);
    }
    const Bits64 rk = round_key(k);
    for (int i = 0; i < 64; ++i)
        s[i] ^= rk[i];
    return word_of(s);
}

inline std::uint64_t decrypt(std::uint64_t ct, std::uint64_t key_hi, std::uint16_t key_lo, int rounds = 31) {
    std::array<Bits64, 32> rks{};
    Bits80 k = key_bits(key_hi, key_lo);
    for (int r = 1; r <= rounds; ++r) {
        rks[r - 1] = round_key(k);
        update_key(k, r);
    }
    rks[rounds] = round_key(k);
    Bits64 s = bits_of(ct);
    for (int i = 0; i < 64; ++i)
        s[i] ^= rks[rounds][i];
    for (int r = rounds; r >= 1; --r) {
        inv_permute(s);
        substitute(s, kInvSbox);
        for (int i = 0; i < 64; ++i)
            s[i] ^= rks[r - 1][i];
    }
    return word_of(s);
}

} // namespace refpresent
