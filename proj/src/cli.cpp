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

#include "amtj/cli.hpp"
#include "amtj/cpa.hpp"
#include "amtj/metrics.hpp"
#include "amtj/reports.hpp"
#include "amtj/rng.hpp"
#include "amtj/traces.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <random>

namespace amtj::cli {

namespace {

using nlohmann::ordered_json;

// Raised while turning flag values into configuration; reported as a usage
// error naming the offending flag.
struct UsageError : Error {
    using Error::Error;
};

std::string fmt(const char *pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

present::Key80 key_from_flag(const std::string &hex, const char *flag) {
    try {
        return present::parse_key_hex(hex);
    } catch (const InvalidArgument &e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

present::State64 state_from_flag(const std::string &hex, const char *flag) {
    try {
        return present::parse_state_hex(hex);
    } catch (const InvalidArgument &e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

// Key used when --key is omitted: a fixed function of the seed.
present::Key80 key_from_seed(std::uint64_t seed) {
    std::mt19937_64 rng(derive_seed(seed, {0x4B4559ull}));
    const std::uint64_t hi = rng();
    return {hi, std::uint16_t(rng() & 0xFFFF)};
}

std::vector<trace::Family> families_of(const std::string &name) {
    if (name == "both")
        return {trace::Family::Cmos, trace::Family::AdiabaticMtj};
    return {trace::parse_family(name)};
}

void write_json(const std::string &path, const ordered_json &doc) {
    reports::write_file_atomic(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------- present

struct PresentOpts {
    bool encrypt = false;
    std::string key;
    std::string pt;
    int rounds = present::kFullRounds;
    bool round1 = false;
};

int cmd_present(const PresentOpts &o, std::ostream &out) {
    const present::Key80 key = key_from_flag(o.key, "--key");
    const present::State64 pt = state_from_flag(o.pt, "--pt");
    if (o.rounds < 1 || o.rounds > present::kFullRounds)
        throw UsageError("--rounds: must lie in [1, 31]");
    if (o.round1) {
        for (const auto &t : present::round1_targets(pt, key))
            out << std::hex << std::uppercase << int(t.sbox_in) << "->" << int(t.sbox_out) << ' ';
        out << std::dec << '\n';
    }
    out << present::to_hex(present::present_encrypt(pt, key, o.rounds)) << '\n';
    return kExitOk;
}

// ------------------------------------------------------------- sim-energy

struct SimEnergyOpts {
    std::string family = "both";
    std::vector<double> freqs = {5, 10, 12.5, 25, 50};
    std::string csv, svg, json;
};

int cmd_sim_energy(const SimEnergyOpts &o, std::ostream &out) {
    const auto families = families_of(o.family);
    if (!o.svg.empty() && o.csv.empty())
        throw UsageError("--svg: requires --csv");
    const reports::Calibration cal = reports::default_calibration();
    const auto rows = reports::energy_sweep(o.freqs, cal);

    const bool show_cmos = std::count(families.begin(), families.end(), trace::Family::Cmos) > 0;
    const bool show_adi = std::count(families.begin(), families.end(), trace::Family::AdiabaticMtj) > 0;
    out << "freq_mhz";
    if (show_cmos)
        out << "  cmos_pj";
    if (show_adi)
        out << "  adiabatic_pj";
    if (show_cmos && show_adi)
        out << "  reduction_pct";
    out << '\n';
    for (const auto &r : rows) {
        out << fmt("%8g", r.freq_mhz);
        if (show_cmos)
            out << fmt("  %7.4f", r.cmos_pj);
        if (show_adi)
            out << fmt("  %12.4f", r.adiabatic_pj);
        if (show_cmos && show_adi)
            out << fmt("  %13.2f", r.reduction_pct);
        out << '\n';
    }

    if (!o.csv.empty())
        reports::emit_energy_sweep(rows, o.csv, o.svg.empty() ? std::nullopt : std::optional<std::filesystem::path>(o.svg));
    if (!o.json.empty()) {
        ordered_json config;
        config["family"] = o.family;
        config["freq_mhz"] = o.freqs;
        auto coeffs = [](const device::EnergyModelCoeffs &c) {
            return ordered_json{{"adiabatic_coeff_pj_per_mhz", c.adiabatic_coeff},
                                {"leakage_coeff_pj_mhz", c.leakage_coeff},
                                {"constant_pj", c.constant}};
        };
        ordered_json results;
        results["coefficients"] = {{"cmos", coeffs(cal.cmos)}, {"adiabatic", coeffs(cal.adiabatic)}};
        ordered_json table = ordered_json::array();
        for (const auto &r : rows) {
            ordered_json row;
            row["freq_mhz"] = r.freq_mhz;
            if (show_cmos)
                row["cmos_pj"] = r.cmos_pj;
            if (show_adi)
                row["adiabatic_pj"] = r.adiabatic_pj;
            if (show_cmos && show_adi)
                row["reduction_pct"] = r.reduction_pct;
            table.push_back(row);
        }
        results["rows"] = table;
        write_json(o.json, reports::make_report("sim-energy", config, results));
    }
    return kExitOk;
}

// ------------------------------------------------------------- gen-traces

struct FamilyFlags {
    double freq_mhz = 12.5;
    int samples_per_period = 80;
    double vdd = 1.0;
    double load_ff = 10.0;
    std::optional<double> epsilon;
    int flipflops = 64;
    double noise = 0.0;
};

trace::FamilyCfg family_cfg(trace::Family family, const FamilyFlags &f) {
    trace::FamilyCfg cfg = trace::FamilyCfg::defaults(family);
    cfg.clock.frequency = f.freq_mhz * 1e6;
    cfg.clock.vdd = f.vdd;
    cfg.gate.load_capacitance = f.load_ff * 1e-15;
    cfg.samples_per_period = f.samples_per_period;
    cfg.flipflop_count = f.flipflops;
    cfg.noise_sigma = f.noise;
    if (f.epsilon)
        cfg.gate.residual_imbalance_epsilon = *f.epsilon;
    try {
        cfg.validate();
    } catch (const InvalidArgument &e) {
        throw UsageError(std::string("invalid configuration: ") + e.what());
    }
    return cfg;
}

struct GenOpts {
    std::string family;
    std::size_t traces = 5120;
    std::uint64_t seed = 0;
    std::string key;
    bool withhold_key = false;
    std::string out, csv;
    FamilyFlags f;
};

int cmd_gen_traces(const GenOpts &o, std::ostream &out) {
    const trace::FamilyCfg cfg = family_cfg(trace::parse_family(o.family), o.f);
    const present::Key80 key = o.key.empty() ? key_from_seed(o.seed) : key_from_flag(o.key, "--key");
    if (o.traces == 0)
        throw UsageError("--traces: must be at least 1");

    trace::TraceSet ts = trace::gen_trace_set(o.traces, key, cfg, o.seed);
    if (o.withhold_key) {
        ts.key.reset();
        ts.meta.key_present = false;
    }
    trace::write_trace_file(ts, o.out);
    if (!o.csv.empty())
        trace::export_csv(ts, o.csv);
    out << "wrote " << ts.meta.n_traces << " traces x " << ts.meta.n_samples << " samples ("
        << trace::family_name(cfg.family) << ", " << fmt("%g", o.f.freq_mhz) << " MHz) to " << o.out << '\n';
    if (!o.withhold_key)
        out << "key " << present::to_hex(key) << '\n';
    return kExitOk;
}

// -------------------------------------------------------------------- cpa

struct CpaOpts {
    std::string traces;
    std::string model = "hw";
    std::optional<int> reference;
    std::string json, corr_csv, plot_prefix;
    int plot_nibble = 0;
    std::size_t mtd_step = 128;
    bool no_mtd = false;
};

int cmd_cpa(const CpaOpts &o, std::ostream &out) {
    cpa::HypothesisModel model;
    if (o.model == "hd") {
        if (!o.reference)
            throw UsageError("--reference: required with --model hd");
        model = cpa::HypothesisModel::hamming_distance(std::uint8_t(*o.reference));
    } else if (o.reference) {
        throw UsageError("--reference: only valid with --model hd");
    }

    const trace::TraceSet ts = trace::read_trace_file(o.traces);
    const cpa::CpaResult result = cpa::cpa_full(ts, model);

    std::optional<std::size_t> mtd;
    const bool run_mtd = result.true_roundkey && !o.no_mtd;
    if (run_mtd)
        mtd = cpa::mtd(ts, *result.true_roundkey, o.mtd_step, model);

    out << "traces         " << result.n_traces << '\n';
    out << "recovered key  " << present::to_hex(result.recovered_roundkey) << '\n';
    if (result.true_roundkey) {
        out << "true key       " << present::to_hex(*result.true_roundkey) << '\n';
        out << "nibbles        " << result.nibbles_correct() << "/16 correct\n";
        out << "success        " << (*result.success ? "true" : "false") << '\n';
        if (run_mtd)
            out << "mtd            " << (mtd ? std::to_string(*mtd) : std::string("not found")) << '\n';
    } else {
        out << "success        unknown (key withheld)\n";
    }
    double best = 0.0;
    for (const auto &n : result.per_nibble)
        best = std::max(best, n.peak_abs_corr);
    out << "max |r|        " << fmt("%.6f", best) << '\n';

    const cpa::NibbleResult &plotted = result.per_nibble[std::size_t(o.plot_nibble)];
    if (!o.corr_csv.empty())
        reports::write_file_atomic(o.corr_csv, cpa::corr_csv(plotted.corr));
    if (!o.plot_prefix.empty()) {
        const cpa::Progression prog = cpa::cpa_progression(ts, o.plot_nibble, o.mtd_step, model);
        std::optional<std::uint8_t> truth;
        if (result.true_roundkey)
            truth = present::nibble(*result.true_roundkey, o.plot_nibble);
        reports::emit_cpa_plots(plotted, prog, o.plot_prefix, truth);
    }
    if (!o.json.empty()) {
        ordered_json config;
        config["traces"] = o.traces;
        config["model"] = o.model;
        if (o.reference)
            config["reference"] = *o.reference;
        config["mtd_step"] = o.mtd_step;
        ordered_json results = ordered_json::parse(cpa::result_to_json(result));
        if (run_mtd)
            results["mtd"] = mtd ? ordered_json(*mtd) : ordered_json(nullptr);
        write_json(o.json, reports::make_report("cpa", config, results));
    }
    return kExitOk;
}

// ---------------------------------------------------------------- metrics

struct MetricsOpts {
    std::string family = "both";
    std::vector<double> energies_fj;
    std::string json;
    FamilyFlags f;
};

ordered_json report_json(const metrics::EnergyReport &r) {
    return ordered_json{{"count", r.energies.size()},   {"e_min_fj", r.e_min * 1e15}, {"e_max_fj", r.e_max * 1e15},
                        {"e_avg_fj", r.e_avg * 1e15},   {"sigma_fj", r.sigma * 1e15}, {"ned_pct", 100.0 * r.ned},
                        {"nsd_pct", 100.0 * r.nsd}};
}

int cmd_metrics(const MetricsOpts &o, std::ostream &out) {
    ordered_json results;
    ordered_json config;
    if (!o.energies_fj.empty()) {
        std::vector<double> e;
        for (double v : o.energies_fj)
            e.push_back(v * 1e-15);
        metrics::EnergyReport r;
        try {
            r = metrics::summarize(e);
        } catch (const InvalidArgument &ex) {
            throw UsageError(std::string("--energies-fj: ") + ex.what());
        }
        out << "custom   n=" << e.size() << "  NED " << fmt("%.2f", 100 * r.ned) << "%  NSD "
            << fmt("%.2f", 100 * r.nsd) << "%\n";
        config["energies_fj"] = o.energies_fj;
        results["custom"] = report_json(r);
    } else {
        const auto families = families_of(o.family);
        std::vector<trace::FamilyCfg> cfgs;
        for (auto fam : families)
            cfgs.push_back(family_cfg(fam, o.f));
        config["family"] = o.family;
        config["freq_mhz"] = o.f.freq_mhz;
        config["vdd"] = o.f.vdd;
        config["load_ff"] = o.f.load_ff;
        if (o.f.epsilon)
            config["epsilon"] = *o.f.epsilon;
        out << "family          inputs   E_min(fJ)   E_max(fJ)   E_avg(fJ)   NED(%)   NSD(%)\n";
        for (const auto &cfg : cfgs) {
            const metrics::EnergyReport r = metrics::energy_report(cfg);
            char line[160];
            std::snprintf(line, sizeof line, "%-14s  %6zu  %10.4f  %10.4f  %10.4f  %7.3f  %7.3f\n",
                          std::string(trace::family_name(cfg.family)).c_str(), r.energies.size(), r.e_min * 1e15,
                          r.e_max * 1e15, r.e_avg * 1e15, 100 * r.ned, 100 * r.nsd);
            out << line;
            results[std::string(trace::family_name(cfg.family))] = report_json(r);
        }
    }
    if (!o.json.empty())
        write_json(o.json, reports::make_report("metrics", config, results));
    return kExitOk;
}

void add_family_flags(CLI::App *cmd, FamilyFlags &f, bool single_freq) {
    if (single_freq)
        cmd->add_option("--freq-mhz", f.freq_mhz, "Power-clock frequency in MHz")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    cmd->add_option("--samples-per-period", f.samples_per_period, "Samples per clock period")
        ->check(CLI::Range(8, 1 << 20))
        ->capture_default_str();
    cmd->add_option("--vdd", f.vdd, "Supply amplitude in volts")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd->add_option("--load-ff", f.load_ff, "Gate load capacitance in fF")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--epsilon", f.epsilon, "Residual data-dependent imbalance of adiabatic gates")
        ->check(CLI::Range(0.0, 1.0));
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Hybrid adiabatic-MTJ vs CMOS PRESENT: energy, traces and CPA", "amtj"};
    app.set_version_flag("--version", reports::tool_version());
    app.require_subcommand(1);

    PresentOpts po;
    auto *present_cmd = app.add_subcommand("present", "Encrypt one block with PRESENT-80");
    present_cmd->add_flag("--encrypt", po.encrypt, "Encrypt (the only supported direction)")->required();
    present_cmd->add_option("--key", po.key, "80-bit key, 20 hex digits")->required();
    present_cmd->add_option("--pt", po.pt, "64-bit plaintext, 16 hex digits")->required();
    present_cmd->add_option("--rounds", po.rounds, "Number of rounds")->capture_default_str();
    present_cmd->add_flag("--round1", po.round1, "Also print the round-1 S-box inputs and outputs");

    SimEnergyOpts so;
    auto *sim_cmd = app.add_subcommand("sim-energy", "Energy-per-cycle sweep of one PRESENT round");
    sim_cmd->add_option("--family", so.family, "cmos, adiabatic-mtj or both")
        ->check(CLI::IsMember({"cmos", "adiabatic-mtj", "both"}))
        ->capture_default_str();
    sim_cmd->add_option("--freq-mhz", so.freqs, "Comma-separated frequencies in MHz")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    sim_cmd->add_option("--csv", so.csv, "Write the sweep as CSV");
    sim_cmd->add_option("--svg", so.svg, "Write a line chart (needs --csv)");
    sim_cmd->add_option("--json", so.json, "Write a JSON report");

    GenOpts go;
    auto *gen_cmd = app.add_subcommand("gen-traces", "Synthesize a power-trace set for round 1");
    gen_cmd->add_option("--family", go.family, "cmos or adiabatic-mtj")
        ->required()
        ->check(CLI::IsMember({"cmos", "adiabatic-mtj"}));
    gen_cmd->add_option("--traces", go.traces, "Number of traces")->capture_default_str();
    gen_cmd->add_option("--seed", go.seed, "Random seed")->capture_default_str();
    gen_cmd->add_option("--key", go.key, "80-bit key, 20 hex digits (default: derived from the seed)");
    gen_cmd->add_flag("--withhold-key", go.withhold_key, "Do not store the key in the trace file");
    gen_cmd->add_option("--noise", go.f.noise, "Gaussian noise sigma per sample, in amperes")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    gen_cmd->add_option("--flipflops", go.f.flipflops, "CMOS output register width")
        ->check(CLI::Range(0, 64))
        ->capture_default_str();
    gen_cmd->add_option("--out", go.out, "Output trace file")->required();
    gen_cmd->add_option("--csv", go.csv, "Also export the traces as CSV");
    add_family_flags(gen_cmd, go.f, true);

    CpaOpts co;
    auto *cpa_cmd = app.add_subcommand("cpa", "Correlation power analysis of a trace file");
    cpa_cmd->add_option("--traces", co.traces, "Trace file written by gen-traces")
        ->required()
        ->check(CLI::ExistingFile);
    cpa_cmd->add_option("--model", co.model, "Leakage model: hw or hd")
        ->check(CLI::IsMember({"hw", "hd"}))
        ->capture_default_str();
    cpa_cmd->add_option("--reference", co.reference, "Reference nibble of the hd model")->check(CLI::Range(0, 15));
    cpa_cmd->add_option("--json", co.json, "Write a JSON report");
    cpa_cmd->add_option("--corr-csv", co.corr_csv, "Write the correlation matrix of --plot-nibble as CSV");
    cpa_cmd->add_option("--plot-prefix", co.plot_prefix, "Write CSV/SVG plots with this path prefix");
    cpa_cmd->add_option("--plot-nibble", co.plot_nibble, "Nibble shown in the plots")
        ->check(CLI::Range(0, 15))
        ->capture_default_str();
    cpa_cmd->add_option("--mtd-step", co.mtd_step, "Prefix step for measurements to disclosure")
        ->check(CLI::Range(std::size_t(1), std::size_t(1) << 40))
        ->capture_default_str();
    cpa_cmd->add_flag("--no-mtd", co.no_mtd, "Skip the measurements-to-disclosure scan");

    MetricsOpts mo;
    auto *met_cmd = app.add_subcommand("metrics", "NED/NSD of the S-box energy per input");
    met_cmd->add_option("--family", mo.family, "cmos, adiabatic-mtj or both")
        ->check(CLI::IsMember({"cmos", "adiabatic-mtj", "both"}))
        ->capture_default_str();
    met_cmd->add_option("--energies-fj", mo.energies_fj, "Summarize this comma-separated list of energies instead")
        ->delimiter(',');
    met_cmd->add_option("--json", mo.json, "Write a JSON report");
    add_family_flags(met_cmd, mo.f, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion &) {
        out << reports::tool_version() << '\n';
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*present_cmd)
            return cmd_present(po, out);
        if (*sim_cmd)
            return cmd_sim_energy(so, out);
        if (*gen_cmd)
            return cmd_gen_traces(go, out);
        if (*cpa_cmd)
            return cmd_cpa(co, out);
        if (*met_cmd)
            return cmd_metrics(mo, out);
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

} // namespace amtj::cli
