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

#ifndef SWP_SOURCE_HPP
#define SWP_SOURCE_HPP

#include <map>
#include <string>
#include <vector>

#include "swp/hilbert.hpp"

namespace swp {

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | j m> with doubled integer
/// arguments (two_j = 2j) so half-integer momenta are exact.
double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2,
                      int two_j, int two_m);

/// Hyperfine level assignment of the write process. The ground level has
/// F_a = 1; the storage level F_b and the write excited level F_e2 select
/// which Zeeman transition amplitudes feed the spin-wave qubit.
struct LevelScheme {
  int f_a = 1;
  int f_b = 2;
  int f_e2 = 2;

  /// X_alpha(m) = C(f_a,1,f_e2; m,0,m) * C(f_e2,1,f_b; m,alpha,m+alpha):
  /// pi-polarized excitation followed by emission that changes the atomic
  /// projection by alpha.
  double cg_product(int m, int alpha) const;

  static LevelScheme rb87_default() { return LevelScheme{}; }
};

/// One Zeeman coherence retained in a spin-wave mode. larmor_sign gives
/// the sign of the precession phase exp(i * sign * beta * tau).
struct SpinWaveComponent {
  int m_a = 0;
  int m_b = 0;
  double weight = 0.0;
  int larmor_sign = +1;
};

/// The two retained-coherence decompositions of one arm's memory qubit.
/// Components whose storage coherence cannot be read out
/// ((m_a,m_b) = (1,2) and (-1,-2)) are dropped.
struct SpinWaveQubit {
  std::string arm;
  std::vector<SpinWaveComponent> plus_components;
  std::vector<SpinWaveComponent> minus_components;

  static SpinWaveQubit from_scheme(const LevelScheme& scheme, std::string arm);
};

struct SpinWaveWeights {
  std::vector<double> w_plus;   // weights of the plus spin wave
  std::vector<double> w_minus;  // weights of the minus spin wave
  double cos_eta = 0.0;
  double sin_eta = 0.0;
};

/// Normalized component weights of the retained spin waves plus the
/// write-branch mixing angle. With the default scheme the weights are
/// (sqrt(3/7), sqrt(4/7)) and (sqrt(4/7), sqrt(3/7)), and
/// cos eta = sin eta = sqrt(2)/2. Throws if every retained weight is zero.
SpinWaveWeights spin_wave_weights(const LevelScheme& scheme);

/// How the readout sums the stored Zeeman components into the anti-Stokes
/// photon amplitude. Uniform readout reproduces the canonical closed-form
/// storage phase phi_of_tau; ClebschGordan weights the components by their
/// own write amplitudes and yields the alternative phase
/// phi_of_tau_cg_weighted. Both are normalized to unit amplitude at
/// tau = 0 so the configured retrieval efficiency is exact there.
enum class RetrievalWeighting { Uniform, ClebschGordan };

/// Component: precession phases tracked per Zeeman component and folded in
/// at retrieval. Effective: a single relative phase exp(-i phi(tau)) on the
/// minus branch at evolve time.
enum class LarmorModel { Component, Effective };

struct SourceParams {
  double chi = 0.014;            // excitation probability scale
  double eta_rad = 0.0;          // write mixing angle; 0 = take from scheme
  double b_gauss = 0.2;          // bias field (0.2 G = 200 mG)
  double beta_rad_per_s = -1.0;  // precession rate; <0 = derive from b_gauss
  double tau_s = 30e-9;          // storage time
  std::map<std::string, double> retrieval_eff;  // per arm, default 0.2
  std::map<std::string, double> visibility;     // per arm, default 1.0
  RetrievalWeighting weighting = RetrievalWeighting::Uniform;
  LarmorModel larmor_model = LarmorModel::Component;
  LevelScheme scheme;

  double beta() const;
  double eta() const;
  double retrieval_eff_for(const std::string& arm) const;
  double visibility_for(const std::string& arm) const;
  void validate() const;
};

/// beta = g_F * mu_B * B / hbar with g_F = 1/2.
double default_beta(double b_gauss);

/// Mode naming convention: arm "A1" emits Stokes photons into "S1" and
/// anti-Stokes photons into "S1p".
std::string stokes_mode(const std::string& arm);
std::string anti_stokes_mode(const std::string& arm);

/// Write-process joint state of one arm to second order in chi:
///   |0> + chi (cos eta |L>|psi+> + sin eta |R>|psi->) + (chi^2/2) |L R>|psi+ psi->
/// over the Stokes mode and the arm level, normalized including the
/// vacuum term.
JointKet build_atom_photon_state(const SourceParams& params, const std::string& arm);

/// Conditions on exactly one Stokes photon in the arm's Stokes mode and
/// renormalizes; the result is the maximally entangled single-excitation
/// state independent of chi.
JointKet heralded_single(const JointKet& state, const std::string& arm);

/// Advances every arm of the state by the storage time. In the component
/// model this accrues beta*tau on the per-arm phase accumulator (the
/// component phases exp(+-i beta tau) are applied at retrieval); in the
/// effective model it multiplies minus-branch amplitudes by
/// exp(-i phi(tau)).
JointKet evolve_larmor(const JointKet& state, const SourceParams& params);

/// Closed-form storage phase
///   phi(tau) = 2 atan[(sqrt(4/7)-sqrt(3/7)) sin(beta tau) /
///                     ((sqrt(4/7)+sqrt(3/7)) cos(beta tau))].
/// Domain beta*tau in [0, pi/2); throws outside it.
double phi_of_tau(double tau_s, double beta_rad_per_s);

/// Alternative phase from Clebsch-Gordan-weighted readout:
/// 2 atan[(1/7) tan(beta tau)]. Kept for comparison; the uniform-readout
/// form above is the one used for reporting.
double phi_of_tau_cg_weighted(double tau_s, double beta_rad_per_s);

/// Ratio constant (sqrt(4/7)-sqrt(3/7))/(sqrt(4/7)+sqrt(3/7)).
double phi_ratio_constant();

/// Complex factor the stored plus (sign=+1) or minus (sign=-1) spin wave
/// picks up when read out after accumulating Larmor angle `phase`:
/// the weighted sum of its component phases, normalized to 1 at phase 0.
Complex retrieval_factor(const SpinWaveQubit& qubit, int sign, double phase,
                         RetrievalWeighting weighting);

/// Reads out one arm: Plus -> sigma+ photon (R) in the anti-Stokes mode,
/// Minus -> sigma- (L), Double -> both; amplitudes scale by
/// sqrt(retrieval_eff) per excitation and by the retrieval_factor of the
/// accumulated Larmor phase. Failed-retrieval weight accrues to
/// norm_deficit and the arm level resets to Vac.
JointKet retrieve(const JointKet& state, const std::string& arm,
                  const SourceParams& params);

}  // namespace swp

#endif  // SWP_SOURCE_HPP
