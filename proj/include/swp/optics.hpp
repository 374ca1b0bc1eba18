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

#ifndef SWP_OPTICS_HPP
#define SWP_OPTICS_HPP

#include <string>

#include "swp/hilbert.hpp"

namespace swp {

enum class BasisKind { Linear, Circular, PauliX, PauliY, PauliZ };

std::string to_string(BasisKind k);

/// Polarization analyzer setting on one mode. Angles are measured from H
/// in the lab frame, in degrees, theta in [0, 180).
struct AnalyzerSetting {
  std::string mode;
  BasisKind kind = BasisKind::Linear;
  double theta_deg = 0.0;

  void validate() const;
};

enum class WaveplateConvention { Stokes, AntiStokes };

/// Quarter-wave relabeling of circular to linear polarization.
/// Stokes convention: R -> H, L -> V. AntiStokes convention: R -> V, L -> H.
LinearMap quarter_wave(const std::string& mode, WaveplateConvention conv);

/// Half-wave plate at 22.5 degrees: H -> (H+V)/sqrt2, V -> (H-V)/sqrt2.
/// Self-inverse.
LinearMap half_wave_45(const std::string& mode);

/// Polarizing beam splitter, transmitting H and reflecting V:
/// H@in1 -> H@out1, V@in1 -> V@out2, H@in2 -> H@out2, V@in2 -> V@out1.
/// Two-photon action follows by independent routing. The reflection phase
/// defaults to +1; any fixed choice cancels in coincidence statistics.
LinearMap pbs(const std::string& in1, const std::string& in2,
              const std::string& out1, const std::string& out2,
              Complex reflection_phase = Complex(1.0, 0.0));

/// Jones vector in the H/V basis of one mode.
struct JonesVector {
  Complex h{0.0, 0.0};
  Complex v{0.0, 0.0};
};

struct ProjectorPair {
  JonesVector plus;   // +1 outcome
  JonesVector minus;  // -1 outcome
};

/// Orthogonal projector pair for a setting:
///   linear(theta) -> {cos H + sin V, -sin H + cos V}
///   pauli-x -> {H', V'}; pauli-y / circular -> {R, L}; pauli-z -> {H, V}.
ProjectorPair analyzer_projectors(const AnalyzerSetting& setting);

}  // namespace swp

#endif  // SWP_OPTICS_HPP
