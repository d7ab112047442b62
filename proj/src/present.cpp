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

#include "amtj/present.hpp"
#include "amtj/error.hpp"

#include <cctype>

namespace amtj::present {

namespace {
__extension__ typedef unsigned __int128 u128;

constexpr u128 kKeyMask = (u128(1) << 80) - 1;

u128 to_u128(Key80 k) { return (u128(k.hi) << 16) | k.lo; }
Key80 from_u128(u128 v) { return {std::uint64_t(v >> 16), std::uint16_t(v & 0xFFFF)}; }

int hex_digit(char c) {
    if (c >= '0' && c <= '9')
        return c - '0';
    c = char(std::tolower(static_cast<unsigned char>(c)));
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    return -1;
}

u128 parse_hex(std::string_view hex, std::size_t digits, const char *what) {
    if (hex.size() != digits)
        throw InvalidArgument(std::string(what) + " must be exactly " + std::to_string(digits) +
                              " hex digits, got " + std::to_string(hex.size()));
    u128 v = 0;
    for (char c : hex) {
        const int d = hex_digit(c);
        if (d < 0)
            throw InvalidArgument(std::string(what) + " contains a non-hex character '" + c + "'");
        v = (v << 4) | u128(d);
    }
    return v;
}

std::string format_hex(u128 v, int digits) {
    static const char *const kDigits = "0123456789ABCDEF";
    std::string s(std::size_t(digits), '0');
    for (int i = digits - 1; i >= 0; --i) {
        s[std::size_t(i)] = kDigits[unsigned(v & 0xF)];
        v >>= 4;
    }
    return s;
}
} // namespace

std::uint8_t sbox(std::uint8_t x) { return kSbox[x & 0xF]; }

State64 sbox_layer(State64 s) {
    State64 out = 0;
    for (int i = 0; i < 16; ++i)
        out |= State64(sbox(nibble(s, i))) << (4 * i);
    return out;
}

State64 player(State64 s) {
    State64 out = 0;
    for (int i = 0; i < 63; ++i)
        out |= ((s >> i) & 1u) << ((16 * i) % 63);
    out |= s & (State64(1) << 63);
    return out;
}

State64 add_round_key(State64 s, RoundKey64 k) { return s ^ k; }

Key80 key_schedule_round(Key80 k, int round_counter) {
    if (round_counter < 1 || round_counter > kFullRounds)
        throw InvalidArgument("key_schedule_round: round counter must lie in [1, 31]");
    u128 v = to_u128(k);
    v = ((v << 61) | (v >> 19)) & kKeyMask;
    const u128 top = sbox(std::uint8_t(v >> 76));
    v = (v & ~(u128(0xF) << 76)) | (top << 76);
    v ^= u128(round_counter) << 15;
    return from_u128(v);
}

State64 present_encrypt(State64 pt, Key80 key, int rounds) {
    if (rounds < 1 || rounds > kFullRounds)
        throw InvalidArgument("present_encrypt: rounds must lie in [1, 31]");
    State64 s = pt;
    for (int r = 1; r <= rounds; ++r) {
        s = add_round_key(s, key.round_key());
        s = sbox_layer(s);
        s = player(s);
        key = key_schedule_round(key, r);
    }
    return add_round_key(s, key.round_key());
}

std::array<SboxTarget, 16> round1_targets(State64 pt, Key80 key) {
    const State64 x = add_round_key(pt, key.round_key());
    std::array<SboxTarget, 16> t{};
    for (int j = 0; j < 16; ++j) {
        const std::uint8_t in = nibble(x, j);
        t[std::size_t(j)] = {in, sbox(in)};
    }
    return t;
}

State64 parse_state_hex(std::string_view hex) { return State64(parse_hex(hex, 16, "64-bit block")); }

Key80 parse_key_hex(std::string_view hex) { return from_u128(parse_hex(hex, 20, "80-bit key")); }

std::string to_hex(State64 s) { return format_hex(s, 16); }
std::string to_hex(Key80 k) { return format_hex(to_u128(k), 20); }

} // namespace amtj::present
