/**
 * Copyright 2026 swpsim authors
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

#ifndef SWP_ANALYSIS_HPP
#define SWP_ANALYSIS_HPP

#include <array>
#include <string>
#include <vector>

#include "swp/optics.hpp"

namespace swp {

/// Coincidence counts of a two-party polarization correlation measurement,
/// in the order (++, --, +-, -+). Counts are integer-valued under Monte
/// Carlo sampling and expected weights under the exact engine.
struct CorrelationCounts {
  double pp = 0.0;
  double mm = 0.0;
  double pm = 0.0;
  double mp = 0.0;
  double total() const { return pp + mm + pm + mp; }
};

struct CorrelationEstimate {
  double value = 0.0;   // in [-1, 1]
  double stderr_ = 0.0;
  CorrelationCounts counts;
  AnalyzerSetting setting_a, setting_b;
};

/// E = (C++ + C-- - C+- - C-+) / total, with multinomial standard error
/// sqrt((1 - E^2)/total). Zero total is a domain error.
CorrelationEstimate correlation_E(const CorrelationCounts& counts);

/// Generic joint +-1 expectation from per-sign-pattern counts
/// (value, stderr, total), used for the three-photon settings.
struct JointEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double total = 0.0;
};

/// counts[k] belongs to the sign pattern whose bits give -1 outcomes;
/// bit i set means party i measured -1.
JointEstimate joint_expectation(const std::vector<double>& counts);

struct BellResult {
  double s = 0.0;
  double stderr_ = 0.0;
  double sigma_violation = 0.0;  // (S - 2) / stderr; NaN when stderr == 0
  std::array<CorrelationEstimate, 4> terms;
};

/// CHSH parameter S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')| from four
/// estimates in canonical order [E(a,b), E(a,b'), E(a',b), E(a',b')].
/// The settings must follow that pattern (a != a', b != b').
BellResult chsh(const std::array<CorrelationEstimate, 4>& e);

struct WitnessResult {
  double w = 0.0;
  double stderr_ = 0.0;
  double sigma_violation = 0.0;  // (0 - W) / stderr: distance below zero
  double xxx = 0.0, zz23 = 0.0, zz34 = 0.0, zz24 = 0.0;
};

/// Two-setting GHZ witness W = 3/2 - <XXX> - (<Z2Z3> + <Z3Z4> + <Z2Z4>)/2;
/// a negative value certifies GHZ entanglement. Inputs are (value, stderr)
/// pairs; values must lie in [-1, 1].
WitnessResult ghz_witness(std::pair<double, double> xxx,
                          std::pair<double, double> zz23,
                          std::pair<double, double> zz34,
                          std::pair<double, double> zz24);

struct MerminResult {
  double s_me = 0.0;
  double stderr_ = 0.0;
  double sigma_violation = 0.0;      // (S - 2) / stderr
  bool exceeds_classical = false;    // S > 2
  bool exceeds_tsirelson = false;    // S > 2*sqrt(2)
  double yyx = 0.0, yxy = 0.0, xyy = 0.0, xxx = 0.0;
};

/// Three-party Mermin parameter S = |<YYX> + <YXY> + <XYY> - <XXX>|;
/// classical bound 2, genuine-tripartite device-independent bound 2*sqrt(2).
MerminResult mermin(std::pair<double, double> yyx,
                    std::pair<double, double> yxy,
                    std::pair<double, double> xyy,
                    std::pair<double, double> xxx);

}  // namespace swp

#endif  // SWP_ANALYSIS_HPP
