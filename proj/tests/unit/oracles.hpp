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

// Straightforward reference formulas used as test oracles.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

// Textbook two-pass sample correlation; 0 when either side is constant.
inline double pearson_two_pass(const std::vector<double> &x, const std::vector<double> &y) {
    const double n = double(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0)
        return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

inline double ned(const std::vector<double> &e) {
    const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
    return (*hi - *lo) / *hi;
}

inline double nsd(const std::vector<double> &e) {
    double m = 0;
    for (double v : e)
        m += v;
    m /= double(e.size());
    double ss = 0;
    for (double v : e)
        ss += (v - m) * (v - m);
    return std::sqrt(ss / double(e.size())) / m;
}

// (R C / T) C V^2
inline double adiabatic_energy(double r, double c, double t, double v) { return r * c / t * c * v * v; }

} // namespace oracle
