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

#include "swp/analysis.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swp {

namespace {

double multinomial_stderr(double e, double total) {
  const double var = (1.0 - e * e) / total;
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

void check_range(double v, const char* name) {
  if (v < -1.0 || v > 1.0)
    throw std::domain_error(std::string(name) + " expectation outside [-1, 1]");
}

}  // namespace

CorrelationEstimate correlation_E(const CorrelationCounts& counts) {
  const double total = counts.total();
  if (total <= 0.0) throw std::domain_error("correlation_E: zero total counts");
  CorrelationEstimate e;
  e.counts = counts;
  e.value = (counts.pp + counts.mm - counts.pm - counts.mp) / total;
  e.stderr_ = multinomial_stderr(e.value, total);
  return e;
}

JointEstimate joint_expectation(const std::vector<double>& counts) {
  JointEstimate e;
  double signed_sum = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const int minus_count = std::popcount(k);
    signed_sum += (minus_count % 2 ? -1.0 : 1.0) * counts[k];
    e.total += counts[k];
  }
  if (e.total <= 0.0)
    throw std::domain_error("joint_expectation: zero total counts");
  e.value = signed_sum / e.total;
  e.stderr_ = multinomial_stderr(e.value, e.total);
  return e;
}

BellResult chsh(const std::array<CorrelationEstimate, 4>& e) {
  // canonical pattern: (a,b), (a,b'), (a',b), (a',b')
  auto same = [](const AnalyzerSetting& x, const AnalyzerSetting& y) {
    return x.kind == y.kind && x.theta_deg == y.theta_deg;
  };
  const bool pattern_ok =
      same(e[0].setting_a, e[1].setting_a) && same(e[2].setting_a, e[3].setting_a) &&
      same(e[0].setting_b, e[2].setting_b) && same(e[1].setting_b, e[3].setting_b) &&
      !same(e[0].setting_a, e[2].setting_a) && !same(e[0].setting_b, e[1].setting_b);
  if (!pattern_ok)
    throw std::domain_error("chsh: estimates do not follow the canonical setting pattern");

  BellResult r;
  r.terms = e;
  r.s = std::abs(e[0].value - e[1].value + e[2].value + e[3].value);
  double var = 0.0;
  for (const auto& t : e) var += t.stderr_ * t.stderr_;
  r.stderr_ = std::sqrt(var);
  r.sigma_violation = r.stderr_ > 0.0
                          ? (r.s - 2.0) / r.stderr_
                          : std::numeric_limits<double>::quiet_NaN();
  return r;
}

WitnessResult ghz_witness(std::pair<double, double> xxx,
                          std::pair<double, double> zz23,
                          std::pair<double, double> zz34,
                          std::pair<double, double> zz24) {
  check_range(xxx.first, "xxx");
  check_range(zz23.first, "zz23");
  check_range(zz34.first, "zz34");
  check_range(zz24.first, "zz24");

  WitnessResult r;
  r.xxx = xxx.first;
  r.zz23 = zz23.first;
  r.zz34 = zz34.first;
  r.zz24 = zz24.first;
  r.w = 1.5 - xxx.first - 0.5 * (zz23.first + zz34.first + zz24.first);
  r.stderr_ = std::sqrt(xxx.second * xxx.second +
                        0.25 * (zz23.second * zz23.second +
                                zz34.second * zz34.second +
                                zz24.second * zz24.second));
  r.sigma_violation = r.stderr_ > 0.0
                          ? -r.w / r.stderr_
                          : std::numeric_limits<double>::quiet_NaN();
  return r;
}

MerminResult mermin(std::pair<double, double> yyx,
                    std::pair<double, double> yxy,
                    std::pair<double, double> xyy,
                    std::pair<double, double> xxx) {
  check_range(yyx.first, "yyx");
  check_range(yxy.first, "yxy");
  check_range(xyy.first, "xyy");
  check_range(xxx.first, "xxx");

  MerminResult r;
  r.yyx = yyx.first;
  r.yxy = yxy.first;
  r.xyy = xyy.first;
  r.xxx = xxx.first;
  r.s_me = std::abs(yyx.first + yxy.first + xyy.first - xxx.first);
  r.stderr_ = std::sqrt(yyx.second * yyx.second + yxy.second * yxy.second +
                        xyy.second * xyy.second + xxx.second * xxx.second);
  r.sigma_violation = r.stderr_ > 0.0
                          ? (r.s_me - 2.0) / r.stderr_
                          : std::numeric_limits<double>::quiet_NaN();
  r.exceeds_classical = r.s_me > 2.0;
  r.exceeds_tsirelson = r.s_me > 2.0 * std::sqrt(2.0);
  return r;
}

}  // namespace swp
