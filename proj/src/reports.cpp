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

#include "amtj/reports.hpp"
#include "amtj/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#ifndef AMTJ_VERSION
#define AMTJ_VERSION "0.0.0"
#endif

namespace amtj::reports {

namespace {

std::string fmt(const char *pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string xml_escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Tableau-like palette, cycled for charts with many series.
const char *const kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
                                "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

// Round-number tick positions covering [lo, hi].
std::vector<double> ticks(double lo, double hi, int target = 6) {
    const double span = hi - lo;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
        t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
}

} // namespace

std::string tool_version() { return AMTJ_VERSION; }

const std::array<ReferencePoint, 5> &reference_energy_table() {
    static const std::array<ReferencePoint, 5> table = {{
        {5.0, 0.80, 0.50},
        {10.0, 0.79, 0.37},
        {12.5, 0.79, 0.30},
        {25.0, 0.78, 0.28},
        {50.0, 0.78, 0.25},
    }};
    return table;
}

Calibration default_calibration() {
    std::vector<std::pair<double, double>> cmos, adiabatic;
    for (const ReferencePoint &p : reference_energy_table()) {
        cmos.emplace_back(p.freq_mhz, p.cmos_pj);
        adiabatic.emplace_back(p.freq_mhz, p.adiabatic_pj);
    }
    Calibration cal;
    cal.cmos = device::calibrate_energy_model(cmos, device::FitTerms{false, true, true});
    cal.adiabatic = device::calibrate_energy_model(adiabatic);
    return cal;
}

std::vector<SweepRow> energy_sweep(const std::vector<double> &freqs_mhz, const Calibration &cal) {
    if (freqs_mhz.empty())
        throw InvalidArgument("energy sweep needs at least one frequency");
    std::vector<SweepRow> rows;
    for (double f : freqs_mhz) {
        SweepRow r;
        r.freq_mhz = f;
        r.cmos_pj = device::energy_per_cycle(cal.cmos, f);
        r.adiabatic_pj = device::energy_per_cycle(cal.adiabatic, f);
        r.reduction_pct = r.cmos_pj > 0.0 ? 100.0 * (r.cmos_pj - r.adiabatic_pj) / r.cmos_pj : 0.0;
        rows.push_back(r);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow> &rows) {
    std::string out = "freq_mhz,cmos_pj,adiabatic_pj,reduction_pct\n";
    for (const SweepRow &r : rows)
        out += fmt("%.9g", r.freq_mhz) + "," + fmt("%.9g", r.cmos_pj) + "," + fmt("%.9g", r.adiabatic_pj) + "," +
               fmt("%.9g", r.reduction_pct) + "\n";
    return out;
}

std::string line_chart_svg(const std::string &title, const std::string &x_label, const std::string &y_label,
                           const std::vector<Series> &series) {
    constexpr double W = 720, H = 440, L = 70, R = 170, T = 40, B = 55;
    const double pw = W - L - R, ph = H - T - B;

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const Series &s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!std::isfinite(x0)) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    if (x1 == x0)
        x1 = x0 + 1;
    if (y1 == y0) {
        y0 -= 0.5;
        y1 += 0.5;
    } else {
        const double pad = 0.05 * (y1 - y0);
        y0 -= pad;
        y1 += pad;
    }
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return T + ph - (y - y0) / (y1 - y0) * ph; };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<!-- amtj " + tool_version() + " -->\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"440\" viewBox=\"0 0 720 440\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"720\" height=\"440\" fill=\"white\"/>\n";
    s += "<text x=\"" + fmt("%.1f", L + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         xml_escape(title) + "</text>\n";

    for (double t : ticks(x0, x1)) {
        const std::string x = fmt("%.2f", px(t));
        s += "<line x1=\"" + x + "\" y1=\"" + fmt("%.2f", T) + "\" x2=\"" + x + "\" y2=\"" + fmt("%.2f", T + ph) +
             "\" stroke=\"#e6e6e6\"/>\n";
        s += "<text x=\"" + x + "\" y=\"" + fmt("%.2f", T + ph + 16) + "\" text-anchor=\"middle\">" +
             fmt("%g", t) + "</text>\n";
    }
    for (double t : ticks(y0, y1)) {
        const std::string y = fmt("%.2f", py(t));
        s += "<line x1=\"" + fmt("%.2f", L) + "\" y1=\"" + y + "\" x2=\"" + fmt("%.2f", L + pw) + "\" y2=\"" + y +
             "\" stroke=\"#e6e6e6\"/>\n";
        s += "<text x=\"" + fmt("%.2f", L - 6) + "\" y=\"" + y + "\" text-anchor=\"end\" dominant-baseline=\"middle\">" +
             fmt("%g", t) + "</text>\n";
    }
    s += "<rect x=\"" + fmt("%.2f", L) + "\" y=\"" + fmt("%.2f", T) + "\" width=\"" + fmt("%.2f", pw) +
         "\" height=\"" + fmt("%.2f", ph) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    s += "<text x=\"" + fmt("%.1f", L + pw / 2) + "\" y=\"" + fmt("%.1f", H - 14) + "\" text-anchor=\"middle\">" +
         xml_escape(x_label) + "</text>\n";
    s += "<text transform=\"translate(18 " + fmt("%.1f", T + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         xml_escape(y_label) + "</text>\n";

    const std::size_t legend_rows = std::min<std::size_t>(series.size(), 20);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series &se = series[k];
        const std::string color = se.color.empty() ? kPalette[k % std::size(kPalette)] : se.color;
        std::string pts;
        for (std::size_t i = 0; i < se.x.size() && i < se.y.size(); ++i) {
            if (i)
                pts += ' ';
            pts += fmt("%.2f", px(se.x[i])) + "," + fmt("%.2f", py(se.y[i]));
        }
        s += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + fmt("%g", se.width) +
             "\" points=\"" + pts + "\"/>\n";
        if (k < legend_rows) {
            const double ly = T + 8 + 16.0 * double(k);
            s += "<line x1=\"" + fmt("%.1f", L + pw + 12) + "\" y1=\"" + fmt("%.1f", ly) + "\" x2=\"" +
                 fmt("%.1f", L + pw + 32) + "\" y2=\"" + fmt("%.1f", ly) + "\" stroke=\"" + color +
                 "\" stroke-width=\"2\"/>\n";
            s += "<text x=\"" + fmt("%.1f", L + pw + 38) + "\" y=\"" + fmt("%.1f", ly) +
                 "\" dominant-baseline=\"middle\">" + xml_escape(se.label) + "</text>\n";
        }
    }
    s += "</svg>\n";
    return s;
}

void emit_energy_sweep(const std::vector<SweepRow> &rows, const std::filesystem::path &csv_path,
                       const std::optional<std::filesystem::path> &svg_path) {
    if (rows.empty())
        throw InvalidArgument("energy sweep has no rows");
    const std::string csv = sweep_csv(rows);
    std::string svg;
    if (svg_path) {
        Series cmos{"CMOS", {}, {}, "#e15759", 2.0};
        Series adi{"Adiabatic-MTJ", {}, {}, "#4e79a7", 2.0};
        for (const SweepRow &r : rows) {
            cmos.x.push_back(r.freq_mhz);
            cmos.y.push_back(r.cmos_pj);
            adi.x.push_back(r.freq_mhz);
            adi.y.push_back(r.adiabatic_pj);
        }
        svg = line_chart_svg("Energy per cycle, one PRESENT round", "Frequency (MHz)", "Energy (pJ/cycle)",
                             {cmos, adi});
    }
    write_file_atomic(csv_path, csv);
    if (svg_path)
        write_file_atomic(*svg_path, svg);
}

std::vector<std::filesystem::path> emit_cpa_plots(const cpa::NibbleResult &result,
                                                  const cpa::Progression &progression,
                                                  const std::filesystem::path &prefix,
                                                  std::optional<std::uint8_t> true_guess) {
    if (result.corr.n_samples == 0 || progression.sizes.empty())
        throw InvalidArgument("CPA plots need a nonempty result");
    auto with_suffix = [&](const char *suffix) {
        std::filesystem::path p = prefix;
        p += suffix;
        return p;
    };
    auto style = [&](Series &s, int g) {
        if (true_guess) {
            const bool hit = g == *true_guess;
            s.color = hit ? "#d62728" : "#b8b8b8";
            s.width = hit ? 2.2 : 1.0;
            if (hit)
                s.label += " (key)";
        }
    };
    auto order = [&] {
        // Draw the highlighted guess last so it stays visible.
        std::vector<int> o;
        for (int g = 0; g < 16; ++g)
            if (!true_guess || g != *true_guess)
                o.push_back(g);
        if (true_guess)
            o.push_back(*true_guess);
        return o;
    }();

    const std::string corr_csv = cpa::corr_csv(result.corr);
    std::vector<Series> corr_series;
    for (int g : order) {
        Series s{"guess " + std::to_string(g), {}, {}, "", 1.2};
        for (std::size_t k = 0; k < result.corr.n_samples; ++k) {
            s.x.push_back(double(k));
            s.y.push_back(std::abs(result.corr.at(g, k)));
        }
        style(s, g);
        corr_series.push_back(std::move(s));
    }
    const std::string corr_svg = line_chart_svg("CPA |r| per guess", "Sample index", "|r|", corr_series);

    std::string prog_csv = "n_traces";
    for (int g = 0; g < 16; ++g)
        prog_csv += ",g" + std::to_string(g);
    prog_csv += "\n";
    for (std::size_t i = 0; i < progression.sizes.size(); ++i) {
        prog_csv += std::to_string(progression.sizes[i]);
        for (double v : progression.peak_per_guess[i])
            prog_csv += "," + fmt("%.9g", v);
        prog_csv += "\n";
    }
    std::vector<Series> prog_series;
    for (int g : order) {
        Series s{"guess " + std::to_string(g), {}, {}, "", 1.2};
        for (std::size_t i = 0; i < progression.sizes.size(); ++i) {
            s.x.push_back(double(progression.sizes[i]));
            s.y.push_back(progression.peak_per_guess[i][std::size_t(g)]);
        }
        style(s, g);
        prog_series.push_back(std::move(s));
    }
    const std::string prog_svg =
        line_chart_svg("Peak |r| vs number of traces", "Traces", "max |r|", prog_series);

    const std::vector<std::filesystem::path> paths = {with_suffix("_corr.csv"), with_suffix("_corr.svg"),
                                                      with_suffix("_progression.csv"),
                                                      with_suffix("_progression.svg")};
    write_file_atomic(paths[0], corr_csv);
    write_file_atomic(paths[1], corr_svg);
    write_file_atomic(paths[2], prog_csv);
    write_file_atomic(paths[3], prog_svg);
    return paths;
}

std::string config_hash(const nlohmann::ordered_json &config) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::ordered_json make_report(const std::string &command, const nlohmann::ordered_json &config,
                                   const nlohmann::ordered_json &results) {
    nlohmann::ordered_json r;
    r["command"] = command;
    r["tool_version"] = tool_version();
    r["config_hash"] = config_hash(config);
    r["config"] = config;
    r["results"] = results;
    return r;
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw Error("cannot open '" + tmp.string() + "' for writing");
        os.write(content.data(), std::streamsize(content.size()));
        os.flush();
        if (!os) {
            os.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot move output into place at '" + path.string() + "'");
    }
}

} // namespace amtj::reports
