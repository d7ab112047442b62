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

// File layout, all integers little-endian unless noted:
//
//   "AMTJ"                  4 bytes
//   version                 u16
//   metadata length L       u32
//   metadata                L bytes of UTF-8 JSON
//   plaintexts              n_traces x u64, big-endian
//   samples                 n_traces x n_samples x f32, row-major

#include "amtj/traces.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

namespace amtj::trace {

namespace {

using Kind = TraceFileError::Kind;
using nlohmann::json;

constexpr std::array<char, 4> kMagic = {'A', 'M', 'T', 'J'};
constexpr std::size_t kHeaderBytes = 4 + 2 + 4;

void put_le(std::string &out, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i)
        out.push_back(char((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(const unsigned char *p, int bytes) {
    std::uint64_t v = 0;
    for (int i = bytes - 1; i >= 0; --i)
        v = (v << 8) | p[i];
    return v;
}

json meta_to_json(const TraceSet &ts) {
    json j;
    j["family"] = std::string(family_name(ts.meta.family));
    j["frequency"] = ts.meta.frequency;
    j["vdd"] = ts.meta.vdd;
    j["samples_per_period"] = ts.meta.samples_per_period;
    j["cycles"] = ts.meta.cycles;
    j["n_traces"] = ts.meta.n_traces;
    j["n_samples"] = ts.meta.n_samples;
    j["noise_sigma"] = ts.meta.noise_sigma;
    j["seed"] = ts.meta.seed;
    j["key_present"] = ts.meta.key_present;
    if (ts.key)
        j["key"] = present::to_hex(*ts.key);
    return j;
}

TraceMeta meta_from_json(const json &j, std::optional<Key80> &key) {
    TraceMeta m;
    try {
        m.family = parse_family(j.at("family").get<std::string>());
        m.frequency = j.at("frequency").get<double>();
        m.vdd = j.at("vdd").get<double>();
        m.samples_per_period = j.at("samples_per_period").get<int>();
        m.cycles = j.at("cycles").get<int>();
        m.n_traces = j.at("n_traces").get<std::size_t>();
        m.n_samples = j.at("n_samples").get<std::size_t>();
        m.noise_sigma = j.at("noise_sigma").get<double>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.key_present = j.at("key_present").get<bool>();
        if (m.key_present)
            key = present::parse_key_hex(j.at("key").get<std::string>());
    } catch (const json::exception &e) {
        throw TraceFileError(Kind::BadMetadata, std::string("trace file metadata: ") + e.what());
    } catch (const InvalidArgument &e) {
        throw TraceFileError(Kind::BadMetadata, std::string("trace file metadata: ") + e.what());
    }
    return m;
}

void write_atomically(const std::filesystem::path &path, const std::string &bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw TraceFileError(Kind::Io, "cannot open '" + tmp.string() + "' for writing");
        os.write(bytes.data(), std::streamsize(bytes.size()));
        os.flush();
        if (!os) {
            os.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw TraceFileError(Kind::Io, "write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw TraceFileError(Kind::Io, "cannot move output into place at '" + path.string() + "'");
    }
}

} // namespace

void write_trace_file(const TraceSet &ts, const std::filesystem::path &path) {
    try {
        ts.validate();
    } catch (const InvalidArgument &e) {
        throw TraceFileError(Kind::DimensionMismatch, e.what());
    }
    const std::string meta = meta_to_json(ts).dump();

    std::string out;
    out.reserve(kHeaderBytes + meta.size() + ts.plaintexts.size() * 8 + ts.samples.size() * 4);
    out.append(kMagic.data(), kMagic.size());
    put_le(out, kTraceFormatVersion, 2);
    put_le(out, meta.size(), 4);
    out += meta;
    for (State64 pt : ts.plaintexts)
        for (int i = 7; i >= 0; --i)
            out.push_back(char((pt >> (8 * i)) & 0xFF));
    for (float v : ts.samples)
        put_le(out, std::bit_cast<std::uint32_t>(v), 4);
    write_atomically(path, out);
}

TraceSet read_trace_file(const std::filesystem::path &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw TraceFileError(Kind::Io, "cannot open trace file '" + path.string() + "'");
    const std::string raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (is.bad())
        throw TraceFileError(Kind::Io, "read error on '" + path.string() + "'");
    const auto *p = reinterpret_cast<const unsigned char *>(raw.data());

    if (raw.size() < kMagic.size() || std::memcmp(raw.data(), kMagic.data(), kMagic.size()) != 0)
        throw TraceFileError(Kind::BadMagic, "'" + path.string() + "' is not an amtj trace file");
    if (raw.size() < kHeaderBytes)
        throw TraceFileError(Kind::TruncatedPayload, "trace file header is truncated");
    const auto version = std::uint16_t(get_le(p + 4, 2));
    if (version != kTraceFormatVersion)
        throw TraceFileError(Kind::VersionMismatch, "unsupported trace format version " +
                                                        std::to_string(version) + " (expected " +
                                                        std::to_string(kTraceFormatVersion) + ")");
    const std::size_t meta_len = std::size_t(get_le(p + 6, 4));
    if (raw.size() - kHeaderBytes < meta_len)
        throw TraceFileError(Kind::TruncatedPayload, "trace file metadata is truncated");

    json j;
    try {
        j = json::parse(raw.begin() + std::ptrdiff_t(kHeaderBytes),
                        raw.begin() + std::ptrdiff_t(kHeaderBytes + meta_len));
    } catch (const json::exception &e) {
        throw TraceFileError(Kind::BadMetadata, std::string("trace file metadata is not JSON: ") + e.what());
    }
    if (!j.is_object())
        throw TraceFileError(Kind::BadMetadata, "trace file metadata must be a JSON object");

    TraceSet ts;
    ts.meta = meta_from_json(j, ts.key);
    const TraceMeta &m = ts.meta;
    if (m.samples_per_period < 1 || m.cycles < 1 ||
        m.n_samples != std::size_t(m.samples_per_period) * std::size_t(m.cycles))
        throw TraceFileError(Kind::DimensionMismatch, "trace file metadata has inconsistent sample dimensions");
    if (m.n_traces > 0 && m.n_samples > (std::size_t(1) << 40) / m.n_traces)
        throw TraceFileError(Kind::DimensionMismatch, "trace file dimensions are implausibly large");

    const std::size_t body = raw.size() - kHeaderBytes - meta_len;
    const std::size_t expect = m.n_traces * 8 + m.n_traces * m.n_samples * 4;
    if (body < expect)
        throw TraceFileError(Kind::TruncatedPayload, "trace file payload is truncated: expected " +
                                                         std::to_string(expect) + " bytes, found " +
                                                         std::to_string(body));
    if (body > expect)
        throw TraceFileError(Kind::DimensionMismatch, "trace file has " + std::to_string(body - expect) +
                                                          " trailing bytes beyond the declared dimensions");

    const unsigned char *q = p + kHeaderBytes + meta_len;
    ts.plaintexts.resize(m.n_traces);
    for (State64 &pt : ts.plaintexts) {
        pt = 0;
        for (int i = 0; i < 8; ++i)
            pt = (pt << 8) | *q++;
    }
    ts.samples.resize(m.n_traces * m.n_samples);
    for (float &v : ts.samples) {
        v = std::bit_cast<float>(std::uint32_t(get_le(q, 4)));
        q += 4;
        if (!std::isfinite(v))
            throw TraceFileError(Kind::BadSample, "trace file contains a non-finite sample");
    }
    return ts;
}

void export_csv(const TraceSet &ts, const std::filesystem::path &path) {
    if (ts.meta.n_traces == 0)
        throw InvalidArgument("export_csv: trace set is empty");
    ts.validate();

    std::string out = "# " + meta_to_json(ts).dump() + "\n";
    out += "plaintext";
    for (std::size_t s = 0; s < ts.meta.n_samples; ++s)
        out += ",s" + std::to_string(s);
    out += '\n';
    char buf[32];
    for (std::size_t i = 0; i < ts.meta.n_traces; ++i) {
        out += present::to_hex(ts.plaintexts[i]);
        for (float v : ts.row(i)) {
            std::snprintf(buf, sizeof buf, ",%.9g", double(v));
            out += buf;
        }
        out += '\n';
    }
    write_atomically(path, out);
}

} // namespace amtj::trace
