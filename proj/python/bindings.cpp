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

#include "amtj/cpa.hpp"
#include "amtj/device.hpp"
#include "amtj/metrics.hpp"
#include "amtj/present.hpp"
#include "amtj/reports.hpp"
#include "amtj/traces.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

namespace py = pybind11;
using namespace amtj;

namespace {

present::Key80 key_arg(const std::string &hex) { return present::parse_key_hex(hex); }

trace::FamilyCfg family_cfg(const std::string &family, std::optional<double> freq_mhz,
                            std::optional<double> noise, std::optional<double> epsilon) {
    auto cfg = trace::FamilyCfg::defaults(trace::parse_family(family));
    if (freq_mhz)
        cfg.clock.frequency = *freq_mhz * 1e6;
    if (noise)
        cfg.noise_sigma = *noise;
    if (epsilon)
        cfg.gate.residual_imbalance_epsilon = *epsilon;
    cfg.validate();
    return cfg;
}

// Samples as an (n_traces, n_samples) float32 array owning a copy.
py::array_t<float> samples_array(const trace::TraceSet &ts) {
    py::array_t<float> a({ts.meta.n_traces, ts.meta.n_samples});
    if (!ts.samples.empty())
        std::memcpy(a.mutable_data(), ts.samples.data(), ts.samples.size() * sizeof(float));
    return a;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Adiabatic MTJ PRESENT toolkit: cipher, device energies, trace synthesis and CPA";
    m.attr("__version__") = reports::tool_version();

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<trace::TraceFileError>(m, "TraceFileError", PyExc_IOError);

    m.def(
        "present_encrypt",
        [](const std::string &pt, const std::string &key, int rounds) {
            return present::to_hex(present::present_encrypt(present::parse_state_hex(pt), key_arg(key), rounds));
        },
        py::arg("pt"), py::arg("key"), py::arg("rounds") = present::kFullRounds,
        "Encrypt a 16-hex-digit block under a 20-hex-digit key; returns hex.");

    m.def("adiabatic_transition_energy", &device::adiabatic_transition_energy, py::arg("r"), py::arg("c"),
          py::arg("t_period"), py::arg("vdd"));
    m.def("conventional_switching_energy", &device::conventional_switching_energy, py::arg("c"), py::arg("vdd"));

    m.def(
        "energy_sweep",
        [](const std::vector<double> &freqs) {
            py::list out;
            for (const auto &r : reports::energy_sweep(freqs, reports::default_calibration()))
                out.append(py::dict(py::arg("freq_mhz") = r.freq_mhz, py::arg("cmos_pj") = r.cmos_pj,
                                    py::arg("adiabatic_pj") = r.adiabatic_pj,
                                    py::arg("reduction_pct") = r.reduction_pct));
            return out;
        },
        py::arg("freqs_mhz") = std::vector<double>{5, 10, 12.5, 25, 50});

    m.def("ned", [](const std::vector<double> &e) { return metrics::ned(e); }, py::arg("energies"));
    m.def("nsd", [](const std::vector<double> &e) { return metrics::nsd(e); }, py::arg("energies"));
    m.def(
        "sbox_energy_report",
        [](const std::string &family) {
            const auto r = metrics::energy_report(trace::FamilyCfg::defaults(trace::parse_family(family)));
            return py::dict(py::arg("energies") = r.energies, py::arg("e_min") = r.e_min, py::arg("e_max") = r.e_max,
                            py::arg("e_avg") = r.e_avg, py::arg("ned") = r.ned, py::arg("nsd") = r.nsd);
        },
        py::arg("family"));

    py::class_<trace::TraceSet>(m, "TraceSet")
        .def_property_readonly("family", [](const trace::TraceSet &t) { return std::string(family_name(t.meta.family)); })
        .def_property_readonly("n_traces", [](const trace::TraceSet &t) { return t.meta.n_traces; })
        .def_property_readonly("n_samples", [](const trace::TraceSet &t) { return t.meta.n_samples; })
        .def_property_readonly("plaintexts", [](const trace::TraceSet &t) { return t.plaintexts; })
        .def_property_readonly("samples", &samples_array)
        .def_property_readonly("key",
                               [](const trace::TraceSet &t) -> std::optional<std::string> {
                                   if (!t.key)
                                       return std::nullopt;
                                   return present::to_hex(*t.key);
                               })
        .def("save", [](const trace::TraceSet &t, const std::filesystem::path &p) { trace::write_trace_file(t, p); })
        .def("export_csv", [](const trace::TraceSet &t, const std::filesystem::path &p) { trace::export_csv(t, p); })
        .def("__len__", [](const trace::TraceSet &t) { return t.meta.n_traces; });

    m.def(
        "gen_traces",
        [](const std::string &family, std::size_t n, const std::string &key, std::uint64_t seed,
           std::optional<double> freq_mhz, std::optional<double> noise, std::optional<double> epsilon) {
            const auto cfg = family_cfg(family, freq_mhz, noise, epsilon);
            py::gil_scoped_release release;
            return trace::gen_trace_set(n, key_arg(key), cfg, seed);
        },
        py::arg("family"), py::arg("n"), py::arg("key"), py::arg("seed") = 0, py::arg("freq_mhz") = py::none(),
        py::arg("noise") = py::none(), py::arg("epsilon") = py::none());

    m.def("load_traces", [](const std::filesystem::path &p) { return trace::read_trace_file(p); }, py::arg("path"));

    m.def(
        "cpa",
        [](const trace::TraceSet &ts, const std::string &model, std::optional<int> reference) {
            cpa::HypothesisModel hm;
            if (model == "hd") {
                if (!reference)
                    throw InvalidArgument("the hd model needs a reference nibble");
                hm = cpa::HypothesisModel::hamming_distance(std::uint8_t(*reference));
            } else if (model != "hw") {
                throw InvalidArgument("model must be 'hw' or 'hd'");
            }
            std::string json;
            {
                py::gil_scoped_release release;
                json = cpa::result_to_json(cpa::cpa_full(ts, hm), -1);
            }
            return py::module_::import("json").attr("loads")(json);
        },
        py::arg("traces"), py::arg("model") = "hw", py::arg("reference") = py::none(),
        "Full 16-nibble CPA; returns the result document as a dict.");

    m.def(
        "pearson",
        [](const std::vector<double> &a, const std::vector<double> &b) { return cpa::pearson(a, b); }, py::arg("a"),
        py::arg("b"));
}
