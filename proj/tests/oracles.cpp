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

#include "oracles.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace swp::oracles {

namespace {

double ladder_up(double j, double m) {  // <j,m+1| J+ |j,m>
  return std::sqrt(j * (j + 1.0) - m * (m + 1.0));
}
double ladder_down(double j, double m) {  // <j,m-1| J- |j,m>
  return std::sqrt(j * (j + 1.0) - m * (m - 1.0));
}

}  // namespace

double cg_recursion(int two_j1, int two_m1, int two_j2, int two_m2,
                    int two_j, int two_m) {
  if (two_m1 + two_m2 != two_m) return 0.0;
  if (two_j < std::abs(two_j1 - two_j2) || two_j > two_j1 + two_j2) return 0.0;
  if (std::abs(two_m1) > two_j1 || std::abs(two_m2) > two_j2 ||
      std::abs(two_m) > two_j)
    return 0.0;
  if ((two_j1 + two_j2 + two_j) % 2 != 0) return 0.0;

  const double j1 = two_j1 / 2.0, j2 = two_j2 / 2.0, j = two_j / 2.0;

  // coefficients of |J,J> over |m1, J-m1>, from J+ |J,J> = 0
  // key: doubled m1 of the component
  std::map<int, double> coeff;
  const int m1_min = std::max(-two_j1, two_j - two_j2);
  const int m1_max = std::min(two_j1, two_j + two_j2);
  coeff[m1_max] = 1.0;
  for (int tm1 = m1_max; tm1 - 2 >= m1_min; tm1 -= 2) {
    // c(m1-1) * a+(j1, m1-1) + c(m1) * a+(j2, J-m1) = 0
    const double a1 = ladder_up(j1, (tm1 - 2) / 2.0);
    const double a2 = ladder_up(j2, (two_j - tm1) / 2.0);
    coeff[tm1 - 2] = -coeff[tm1] * a2 / a1;
  }
  double norm = 0.0;
  for (auto& [tm1, c] : coeff) norm += c * c;
  norm = std::sqrt(norm);
  // Condon-Shortley: the coefficient at maximal m1 is positive
  const double sign = coeff[m1_max] > 0 ? 1.0 : -1.0;
  for (auto& [tm1, c] : coeff) c *= sign / norm;

  // lower |J,M> down to the requested M
  int tm = two_j;
  while (tm > two_m) {
    std::map<int, double> next;
    for (const auto& [tm1, c] : coeff) {
      const double m1 = tm1 / 2.0;
      const double m2 = (tm - tm1) / 2.0;
      if (tm1 - 2 >= -two_j1) next[tm1 - 2] += c * ladder_down(j1, m1);
      next[tm1] += c * ladder_down(j2, m2);
    }
    const double scale = ladder_down(j, tm / 2.0);
    for (auto& [tm1, c] : next) c /= scale;
    coeff = std::move(next);
    tm -= 2;
  }
  auto it = coeff.find(two_m1);
  return it == coeff.end() ? 0.0 : it->second;
}

BeamsplitLoss beamsplit_loss(const JointKet& state, const std::string& mode,
                             double transmission) {
  const std::string env = "__env_" + mode;
  const double c = std::sqrt(transmission);
  const double s = std::sqrt(1.0 - transmission);

  // beamsplitter unitary on (mode, env) for every polarization
  LinearMap bs;
  for (Pol p : {Pol::H, Pol::V, Pol::R, Pol::L}) {
    bs.in_slots.push_back({mode, p});
    bs.in_slots.push_back({env, p});
  }
  bs.out_slots = bs.in_slots;
  bs.coeff = Eigen::MatrixXcd::Zero(8, 8);
  for (int k = 0; k < 4; ++k) {
    bs.coeff(2 * k, 2 * k) = c;
    bs.coeff(2 * k + 1, 2 * k) = s;
    bs.coeff(2 * k, 2 * k + 1) = -s;
    bs.coeff(2 * k + 1, 2 * k + 1) = c;
  }

  JointKet extended = state;
  extended.declare_mode(env);
  const JointKet mixed = apply_map(extended, bs);

  BeamsplitLoss out;
  for (const auto& m : state.modes()) out.survivors.declare_mode(m);
  for (const auto& a : state.arms()) out.survivors.declare_arm(a);
  out.traced_weight = 0.0;
  for (const auto& [l, amp] : mixed.amplitudes()) {
    if (l.occupation(env) == 0)
      out.survivors.add(l, amp);
    else
      out.traced_weight += std::norm(amp);
  }
  return out;
}

double direct_pair_expectation(const DensityOp& rho, const std::string& mode_a,
                               const std::string& mode_b, double theta_a_deg,
                               double theta_b_deg) {
  auto observable = [](double theta_deg) {
    const double t = theta_deg * std::numbers::pi / 180.0;
    const double ch = std::cos(t), sh = std::sin(t);
    Eigen::Vector2cd plus(ch, sh), minus(-sh, ch);
    Eigen::Matrix2cd p = plus * plus.adjoint() - minus * minus.adjoint();
    return p;
  };
  const Eigen::Matrix2cd a = observable(theta_a_deg);
  const Eigen::Matrix2cd b = observable(theta_b_deg);

  auto qubit_index = [&](const BasisLabel& l, const std::string& mode) {
    if (l.occupation(mode, Pol::H) == 1 && l.occupation(mode) == 1) return 0;
    if (l.occupation(mode, Pol::V) == 1 && l.occupation(mode) == 1) return 1;
    throw std::domain_error("direct_pair_expectation: not a one-photon label");
  };

  Complex e(0.0, 0.0);
  const auto& basis = rho.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int ia = qubit_index(basis[i], mode_a);
    const int ib = qubit_index(basis[i], mode_b);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const int ka = qubit_index(basis[k], mode_a);
      const int kb = qubit_index(basis[k], mode_b);
      // Tr(rho O) = sum_{i,k} rho(k,i) O(i,k) with O = A (x) B
      e += rho.matrix()(k, i) * a(ia, ka) * b(ib, kb);
    }
  }
  return e.real();
}

double pair_E_closed_form(double theta_a_deg, double theta_b_deg, double delta) {
  const double a = theta_a_deg * std::numbers::pi / 180.0;
  const double b = theta_b_deg * std::numbers::pi / 180.0;
  // (|VV> + e^{-i delta} |HH>)/sqrt2 measured at linear analyzers
  return std::cos(2 * a) * std::cos(2 * b) +
         std::sin(2 * a) * std::sin(2 * b) * std::cos(delta);
}

double TestRng::uniform() {
  s_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double TestRng::uniform(double a, double b) { return a + (b - a) * uniform(); }

Complex TestRng::phase() {
  const double u = uniform(0.0, 2.0 * std::numbers::pi);
  return {std::cos(u), std::sin(u)};
}

Eigen::Matrix2cd random_unitary2(TestRng& rng) {
  const double t = rng.uniform(0.0, std::numbers::pi / 2.0);
  const Complex a = rng.phase(), b = rng.phase(), g = rng.phase();
  Eigen::Matrix2cd u;
  u << a * std::cos(t), b * std::sin(t), -std::conj(b) * std::sin(t) * g,
      std::conj(a) * std::cos(t) * g;
  return u;
}

}  // namespace swp::oracles
