# Copyright 2026 The amtj Authors
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the amtj toolkit."""

from amtj._core import (
    InvalidArgument,
    TraceFileError,
    TraceSet,
    __version__,
    adiabatic_transition_energy,
    conventional_switching_energy,
    cpa,
    energy_sweep,
    gen_traces,
    load_traces,
    ned,
    nsd,
    pearson,
    present_encrypt,
    sbox_energy_report,
)

__all__ = [
    "InvalidArgument",
    "TraceFileError",
    "TraceSet",
    "__version__",
    "adiabatic_transition_energy",
    "conventional_switching_energy",
    "cpa",
    "energy_sweep",
    "gen_traces",
    "load_traces",
    "ned",
    "nsd",
    "pearson",
    "present_encrypt",
    "sbox_energy_report",
]
