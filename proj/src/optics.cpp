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

#include "swp/optics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace swp {

std::string to_string(BasisKind k) {
  switch (k) {
    case BasisKind::Linear: return "linear";
    case BasisKind::Circular: return "circular";
    case BasisKind::PauliX: return "pauli-x";
    case BasisKind::PauliY: return "pauli-y";
    case BasisKind::PauliZ: return "pauli-z";
  }
  return "?";
}

void AnalyzerSetting::validate() const {
  if (mode.empty()) throw std::domain_error("analyzer setting needs a mode");
  if (theta_deg < 0.0 || theta_deg >= 180.0)
    throw std::domain_error("analyzer theta must lie in [0, 180)");
}

LinearMap quarter_wave(const std::string& mode, WaveplateConvention conv) {
  LinearMap m;
  m.in_slots = {{mode, Pol::R}, {mode, Pol::L}};
  m.out_slots = {{mode, Pol::H}, {mode, Pol::V}};
  m.coeff = Eigen::MatrixXcd::Zero(2, 2);
  if (conv == WaveplateConvention::Stokes) {
    m.coeff(0, 0) = 1.0;  // R -> H
    m.coeff(1, 1) = 1.0;  // L -> V
  } else {
    m.coeff(1, 0) = 1.0;  // R -> V
    m.coeff(0, 1) = 1.0;  // L -> H
  }
  return m;
}

LinearMap half_wave_45(const std::string& mode) {
  LinearMap m;
  m.in_slots = {{mode, Pol::H}, {mode, Pol::V}};
  m.out_slots = m.in_slots;
  const double s = std::numbers::sqrt2 / 2.0;
  m.coeff = Eigen::MatrixXcd(2, 2);
  m.coeff << s, s, s, -s;
  return m;
}

LinearMap pbs(const std::string& in1, const std::string& in2,
              const std::string& out1, const std::string& out2,
              Complex reflection_phase) {
  if (in1 == in2 || out1 == out2 || in1 == out2 || in2 == out1 ||
      in1 == out1 || in2 == out2)
    throw std::domain_error("pbs requires four distinct modes");
  LinearMap m;
  m.in_slots = {{in1, Pol::H}, {in1, Pol::V}, {in2, Pol::H}, {in2, Pol::V}};
  m.out_slots = {{out1, Pol::H}, {out1, Pol::V}, {out2, Pol::H}, {out2, Pol::V}};
  m.coeff = Eigen::MatrixXcd::Zero(4, 4);
  m.coeff(0, 0) = 1.0;               // H@in1 -> H@out1
  m.coeff(3, 1) = reflection_phase;  // V@in1 -> V@out2
  m.coeff(2, 2) = 1.0;               // H@in2 -> H@out2
  m.coeff(1, 3) = reflection_phase;  // V@in2 -> V@out1
  return m;
}

ProjectorPair analyzer_projectors(const AnalyzerSetting& setting) {
  setting.validate();
  const double s2 = std::numbers::sqrt2 / 2.0;
  switch (setting.kind) {
    case BasisKind::Linear: {
      const double t = setting.theta_deg * std::numbers::pi / 180.0;
      return {{std::cos(t), std::sin(t)}, {-std::sin(t), std::cos(t)}};
    }
    case BasisKind::PauliZ:
      return {{1.0, 0.0}, {0.0, 1.0}};
    case BasisKind::PauliX:
      return {{s2, s2}, {-s2, s2}};
    case BasisKind::Circular:
    case BasisKind::PauliY:
      // R = (H + iV)/sqrt2, L = (H - iV)/sqrt2
      return {{s2, Complex(0.0, s2)}, {s2, Complex(0.0, -s2)}};
  }
  throw std::domain_error("unknown analyzer basis");
}

}  // namespace swp
