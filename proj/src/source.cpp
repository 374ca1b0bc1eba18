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

#include "swp/source.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace swp {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

constexpr double kMuB = 9.2740100783e-24;   // J/T
constexpr double kHbar = 1.054571817e-34;   // J*s
constexpr double kLandeGf = 0.5;

}  // namespace

// Racah's closed form. Arguments are doubled so half-integer momenta stay
// integral; all factorial arguments are small here.
double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2,
                      int two_j, int two_m) {
  if (two_m1 + two_m2 != two_m) return 0.0;
  if (std::abs(two_m1) > two_j1 || std::abs(two_m2) > two_j2 ||
      std::abs(two_m) > two_j)
    return 0.0;
  if (two_j < std::abs(two_j1 - two_j2) || two_j > two_j1 + two_j2) return 0.0;
  if ((two_j1 + two_m1) % 2 != 0 || (two_j2 + two_m2) % 2 != 0 ||
      (two_j + two_m) % 2 != 0)
    return 0.0;
  if ((two_j1 + two_j2 + two_j) % 2 != 0) return 0.0;

  auto half = [](int doubled) { return doubled / 2; };
  const int a = half(two_j1 + two_j2 - two_j);
  const int b = half(two_j1 - two_j2 + two_j);
  const int c = half(-two_j1 + two_j2 + two_j);
  const int d = half(two_j1 + two_j2 + two_j) + 1;

  double prefactor = std::sqrt((two_j + 1.0) * factorial(a) * factorial(b) *
                               factorial(c) / factorial(d));
  prefactor *= std::sqrt(
      factorial(half(two_j1 + two_m1)) * factorial(half(two_j1 - two_m1)) *
      factorial(half(two_j2 + two_m2)) * factorial(half(two_j2 - two_m2)) *
      factorial(half(two_j + two_m)) * factorial(half(two_j - two_m)));

  const int k_min = std::max({0, half(two_j2 - two_j - two_m1),
                              half(two_j1 + two_m2 - two_j)});
  const int k_max = std::min({a, half(two_j1 - two_m1), half(two_j2 + two_m2)});

  double sum = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    double denom = factorial(k) * factorial(a - k) *
                   factorial(half(two_j1 - two_m1) - k) *
                   factorial(half(two_j2 + two_m2) - k) *
                   factorial(half(two_j - two_j2 + two_m1) + k) *
                   factorial(half(two_j - two_j1 - two_m2) + k);
    sum += ((k % 2) ? -1.0 : 1.0) / denom;
  }
  return prefactor * sum;
}

double LevelScheme::cg_product(int m, int alpha) const {
  const double c1 = clebsch_gordan(2 * f_a, 2 * m, 2, 0, 2 * f_e2, 2 * m);
  const double c2 =
      clebsch_gordan(2 * f_e2, 2 * m, 2, 2 * alpha, 2 * f_b, 2 * (m + alpha));
  return c1 * c2;
}

SpinWaveQubit SpinWaveQubit::from_scheme(const LevelScheme& scheme,
                                         std::string arm) {
  const SpinWaveWeights w = spin_wave_weights(scheme);
  SpinWaveQubit q;
  q.arm = std::move(arm);
  // retained coherences; larmor sign follows the total projection m_a + m_b
  q.plus_components = {{-1, 0, w.w_plus[0], -1}, {0, 1, w.w_plus[1], +1}};
  q.minus_components = {{0, -1, w.w_minus[0], -1}, {1, 0, w.w_minus[1], +1}};
  return q;
}

SpinWaveWeights spin_wave_weights(const LevelScheme& scheme) {
  if (scheme.f_a != 1)
    throw std::domain_error("spin_wave_weights: scheme requires f_a = 1");

  // retained components: alpha=+1 keeps m = -1, 0; alpha=-1 keeps m = 0, 1
  const double xp[2] = {scheme.cg_product(-1, +1), scheme.cg_product(0, +1)};
  const double xm[2] = {scheme.cg_product(0, -1), scheme.cg_product(1, -1)};

  const double np = std::hypot(xp[0], xp[1]);
  const double nm = std::hypot(xm[0], xm[1]);
  if (np < 1e-14 && nm < 1e-14)
    throw std::domain_error("spin_wave_weights: all retained weights vanish");

  SpinWaveWeights out;
  auto normed = [](const double x[2], double n) {
    std::vector<double> w{x[0] / n, x[1] / n};
    if (w[0] < 0.0 || (w[0] == 0.0 && w[1] < 0.0)) {  // fix global sign
      w[0] = -w[0];
      w[1] = -w[1];
    }
    return w;
  };
  out.w_plus = normed(xp, np);
  out.w_minus = normed(xm, nm);
  const double n = std::hypot(np, nm);
  out.cos_eta = nm / n;
  out.sin_eta = np / n;
  return out;
}

double default_beta(double b_gauss) {
  return kLandeGf * kMuB * (b_gauss * 1e-4) / kHbar;
}

double SourceParams::beta() const {
  return beta_rad_per_s >= 0.0 ? beta_rad_per_s : default_beta(b_gauss);
}

double SourceParams::eta() const {
  if (eta_rad > 0.0) return eta_rad;
  const SpinWaveWeights w = spin_wave_weights(scheme);
  return std::atan2(w.sin_eta, w.cos_eta);
}

double SourceParams::retrieval_eff_for(const std::string& arm) const {
  auto it = retrieval_eff.find(arm);
  return it == retrieval_eff.end() ? 0.2 : it->second;
}

double SourceParams::visibility_for(const std::string& arm) const {
  auto it = visibility.find(arm);
  return it == visibility.end() ? 1.0 : it->second;
}

void SourceParams::validate() const {
  if (chi <= 0.0 || chi > 0.2)
    throw std::domain_error("source.chi must lie in (0, 0.2]");
  if (beta() < 0.0) throw std::domain_error("source.beta must be >= 0");
  if (tau_s < 0.0) throw std::domain_error("source.tau must be >= 0");
  for (const auto& [arm, r] : retrieval_eff)
    if (r < 0.0 || r > 1.0)
      throw std::domain_error("source.retrieval_eff." + arm +
                              " must lie in [0,1]");
  for (const auto& [arm, v] : visibility)
    if (v < 0.0 || v > 1.0)
      throw std::domain_error("source.visibility." + arm +
                              " must lie in [0,1]");
}

std::string stokes_mode(const std::string& arm) {
  return "S" + arm.substr(1);
}

std::string anti_stokes_mode(const std::string& arm) {
  return "S" + arm.substr(1) + "p";
}

JointKet build_atom_photon_state(const SourceParams& params,
                                 const std::string& arm) {
  // chi = 0 is allowed here as the degenerate vacuum limit even though
  // configs require chi > 0
  if (params.chi < 0.0 || params.chi > 0.2)
    throw std::domain_error("source.chi must lie in [0, 0.2]");
  const std::string s = stokes_mode(arm);
  const double chi = params.chi;
  const double ce = std::cos(params.eta());
  const double se = std::sin(params.eta());

  JointKet k;
  k.declare_mode(s);
  k.declare_arm(arm);

  k.add(BasisLabel{}, 1.0);
  if (chi > 0.0) {
    k.add(BasisLabel{}.add_photon(s, Pol::L).set_arm(arm, ArmLevel::Plus),
          chi * ce);
    k.add(BasisLabel{}.add_photon(s, Pol::R).set_arm(arm, ArmLevel::Minus),
          chi * se);
    k.add(BasisLabel{}
              .add_photon(s, Pol::L)
              .add_photon(s, Pol::R)
              .set_arm(arm, ArmLevel::Double),
          chi * chi / 2.0);
  }
  return k.normalized();
}

JointKet heralded_single(const JointKet& state, const std::string& arm) {
  const std::string s = stokes_mode(arm);
  auto res = project(state, [&](const BasisLabel& l) {
    return l.occupation(s) == 1;
  });
  if (res.empty)
    throw std::domain_error("heralded_single: no single-photon branch");
  return res.post;
}

JointKet evolve_larmor(const JointKet& state, const SourceParams& params) {
  const double angle = params.beta() * params.tau_s;
  JointKet out = state;
  if (params.larmor_model == LarmorModel::Component) {
    for (const auto& arm : state.arms()) out.add_arm_phase(arm, angle);
    return out;
  }
  // effective model: single relative phase on each minus branch
  const double phi = phi_of_tau(params.tau_s, params.beta());
  JointKet eff;
  for (const auto& m : state.modes()) eff.declare_mode(m);
  for (const auto& a : state.arms()) eff.declare_arm(a);
  eff.set_norm_deficit(state.norm_deficit());
  for (const auto& [l, amp] : state.amplitudes()) {
    int minus_count = 0;
    for (const auto& arm : state.arms()) {
      const ArmLevel level = l.arm(arm);
      if (level == ArmLevel::Minus || level == ArmLevel::Double) ++minus_count;
    }
    eff.add(l, amp * std::exp(Complex(0.0, -phi * minus_count)));
  }
  return eff;
}

namespace {

double phi_from_ratio(double tau_s, double beta, double ratio) {
  const double bt = beta * tau_s;
  if (bt < 0.0 || bt >= std::numbers::pi / 2.0)
    throw std::domain_error("phi_of_tau: beta*tau outside [0, pi/2)");
  return 2.0 * std::atan(ratio * std::tan(bt));
}

}  // namespace

double phi_ratio_constant() {
  const double w1 = std::sqrt(3.0 / 7.0), w2 = std::sqrt(4.0 / 7.0);
  return (w2 - w1) / (w2 + w1);
}

double phi_of_tau(double tau_s, double beta_rad_per_s) {
  return phi_from_ratio(tau_s, beta_rad_per_s, phi_ratio_constant());
}

double phi_of_tau_cg_weighted(double tau_s, double beta_rad_per_s) {
  return phi_from_ratio(tau_s, beta_rad_per_s, 1.0 / 7.0);
}

Complex retrieval_factor(const SpinWaveQubit& qubit, int sign, double phase,
                         RetrievalWeighting weighting) {
  const auto& comps =
      sign > 0 ? qubit.plus_components : qubit.minus_components;
  Complex sum(0.0, 0.0);
  double norm = 0.0;
  for (const auto& c : comps) {
    const double r =
        weighting == RetrievalWeighting::Uniform ? 1.0 : c.weight;
    sum += r * c.weight * std::exp(Complex(0.0, c.larmor_sign * phase));
    norm += r * c.weight;
  }
  return sum / norm;
}

JointKet retrieve(const JointKet& state, const std::string& arm,
                  const SourceParams& params) {
  if (!state.arms().count(arm))
    throw std::domain_error("retrieve: unknown arm " + arm);

  const std::string as_mode = anti_stokes_mode(arm);
  const double eff = params.retrieval_eff_for(arm);
  const double amp_scale = std::sqrt(eff);

  Complex f_plus(1.0, 0.0), f_minus(1.0, 0.0);
  if (params.larmor_model == LarmorModel::Component) {
    const SpinWaveQubit qubit = SpinWaveQubit::from_scheme(params.scheme, arm);
    const double phase = state.arm_phase(arm);
    f_plus = retrieval_factor(qubit, +1, phase, params.weighting);
    f_minus = retrieval_factor(qubit, -1, phase, params.weighting);
  }

  JointKet out;
  for (const auto& m : state.modes()) out.declare_mode(m);
  out.declare_mode(as_mode);
  for (const auto& a : state.arms()) out.declare_arm(a);
  for (const auto& a : state.arms())
    if (a != arm && state.arm_phase(a) != 0.0)
      out.add_arm_phase(a, state.arm_phase(a));

  const double w_in = state.weight();
  for (const auto& [l, amp] : state.amplitudes()) {
    BasisLabel nl = l;
    nl.set_arm(arm, ArmLevel::Vac);
    switch (l.arm(arm)) {
      case ArmLevel::Vac:
        out.add(nl, amp);
        break;
      case ArmLevel::Plus:
        nl.add_photon(as_mode, Pol::R);
        out.add(nl, amp * f_plus * amp_scale);
        break;
      case ArmLevel::Minus:
        nl.add_photon(as_mode, Pol::L);
        out.add(nl, amp * f_minus * amp_scale);
        break;
      case ArmLevel::Double:
        nl.add_photon(as_mode, Pol::R).add_photon(as_mode, Pol::L);
        out.add(nl, amp * f_plus * f_minus * eff);
        break;
    }
  }
  out.prune();
  out.set_norm_deficit(state.norm_deficit() +
                       std::max(0.0, w_in - out.weight()));
  return out;
}

}  // namespace swp
