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

#include "swp/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace swp {

std::string to_string(Pol p) {
  switch (p) {
    case Pol::H: return "H";
    case Pol::V: return "V";
    case Pol::R: return "R";
    case Pol::L: return "L";
  }
  return "?";
}

std::string to_string(ArmLevel l) {
  switch (l) {
    case ArmLevel::Vac: return "vac";
    case ArmLevel::Plus: return "+";
    case ArmLevel::Minus: return "-";
    case ArmLevel::Double: return "+-";
  }
  return "?";
}

int BasisLabel::occupation(const std::string& mode, Pol pol) const {
  for (const auto& [slot, occ] : photons)
    if (slot.mode == mode && slot.pol == pol) return occ;
  return 0;
}

int BasisLabel::occupation(const std::string& mode) const {
  int n = 0;
  for (const auto& [slot, occ] : photons)
    if (slot.mode == mode) n += occ;
  return n;
}

int BasisLabel::total_photons() const {
  int n = 0;
  for (const auto& [slot, occ] : photons) n += occ;
  return n;
}

ArmLevel BasisLabel::arm(const std::string& arm_id) const {
  for (const auto& [id, level] : arms)
    if (id == arm_id) return level;
  return ArmLevel::Vac;
}

BasisLabel& BasisLabel::set_photon(const std::string& mode, Pol pol, int occ) {
  if (occ < 0 || occ > 2)
    throw std::domain_error("photon occupation must be 0, 1 or 2");
  PhotonSlot slot{mode, pol};
  auto it = std::find_if(photons.begin(), photons.end(),
                         [&](const auto& e) { return e.first == slot; });
  if (it != photons.end()) {
    if (occ == 0)
      photons.erase(it);
    else
      it->second = occ;
  } else if (occ > 0) {
    photons.emplace_back(slot, occ);
    std::sort(photons.begin(), photons.end());
  }
  return *this;
}

BasisLabel& BasisLabel::add_photon(const std::string& mode, Pol pol, int count) {
  return set_photon(mode, pol, occupation(mode, pol) + count);
}

BasisLabel& BasisLabel::set_arm(const std::string& arm_id, ArmLevel level) {
  auto it = std::find_if(arms.begin(), arms.end(),
                         [&](const auto& e) { return e.first == arm_id; });
  if (it != arms.end()) {
    if (level == ArmLevel::Vac)
      arms.erase(it);
    else
      it->second = level;
  } else if (level != ArmLevel::Vac) {
    arms.emplace_back(arm_id, level);
    std::sort(arms.begin(), arms.end());
  }
  return *this;
}

std::string BasisLabel::str() const {
  if (is_vacuum()) return "-";
  std::string out;
  for (const auto& [slot, occ] : photons) {
    if (!out.empty()) out += ' ';
    out += slot.mode + ":" + to_string(slot.pol);
    if (occ > 1) out += "*" + std::to_string(occ);
  }
  for (const auto& [id, level] : arms) {
    if (!out.empty()) out += ' ';
    out += id + "=" + to_string(level);
  }
  return out;
}

JointKet JointKet::vacuum(std::set<std::string> modes, std::set<std::string> arms) {
  JointKet k;
  k.modes_ = std::move(modes);
  k.arms_ = std::move(arms);
  k.amps_[BasisLabel{}] = Complex(1.0, 0.0);
  return k;
}

Complex JointKet::amplitude(const BasisLabel& l) const {
  auto it = amps_.find(l);
  return it == amps_.end() ? Complex(0.0, 0.0) : it->second;
}

void JointKet::set(const BasisLabel& l, Complex a) {
  if (std::abs(a) < kPruneEps)
    amps_.erase(l);
  else
    amps_[l] = a;
}

void JointKet::add(const BasisLabel& l, Complex a) {
  auto it = amps_.find(l);
  if (it == amps_.end()) {
    if (std::abs(a) >= kPruneEps) amps_[l] = a;
  } else {
    it->second += a;
    if (std::abs(it->second) < kPruneEps) amps_.erase(it);
  }
}

double JointKet::arm_phase(const std::string& arm_id) const {
  auto it = arm_phase_.find(arm_id);
  return it == arm_phase_.end() ? 0.0 : it->second;
}

void JointKet::add_arm_phase(const std::string& arm_id, double radians) {
  arm_phase_[arm_id] += radians;
}

void JointKet::reset_arm_phase(const std::string& arm_id) {
  arm_phase_.erase(arm_id);
}

double JointKet::weight() const {
  double w = 0.0;
  for (const auto& [l, a] : amps_) w += std::norm(a);
  return w;
}

void JointKet::prune(double eps) {
  for (auto it = amps_.begin(); it != amps_.end();) {
    if (std::abs(it->second) < eps)
      it = amps_.erase(it);
    else
      ++it;
  }
}

JointKet JointKet::normalized() const {
  double w = weight();
  if (w <= 0.0) throw std::domain_error("cannot normalize a zero ket");
  JointKet out = *this;
  double s = 1.0 / std::sqrt(w);
  for (auto& [l, a] : out.amps_) a *= s;
  out.norm_deficit_ = 0.0;
  return out;
}

std::string JointKet::debug_text() const {
  std::string out;
  char buf[128];
  for (const auto& [l, a] : amps_) {
    std::snprintf(buf, sizeof(buf), "\t%.17g\t%.17g\n", a.real(), a.imag());
    out += l.str() + buf;
  }
  return out;
}

double JointKet::distance(const JointKet& a, const JointKet& b) {
  double d2 = 0.0;
  for (const auto& [l, amp] : a.amps_) d2 += std::norm(amp - b.amplitude(l));
  for (const auto& [l, amp] : b.amps_)
    if (a.amps_.find(l) == a.amps_.end()) d2 += std::norm(amp);
  return std::sqrt(d2);
}

JointKet tensor(const JointKet& a, const JointKet& b) {
  for (const auto& m : b.modes())
    if (a.modes().count(m))
      throw std::domain_error("tensor: overlapping mode set: " + m);
  for (const auto& arm : b.arms())
    if (a.arms().count(arm))
      throw std::domain_error("tensor: overlapping arm set: " + arm);

  JointKet out;
  for (const auto& m : a.modes()) out.declare_mode(m);
  for (const auto& m : b.modes()) out.declare_mode(m);
  for (const auto& r : a.arms()) out.declare_arm(r);
  for (const auto& r : b.arms()) out.declare_arm(r);
  for (const auto& r : a.arms()) {
    if (a.arm_phase(r) != 0.0) out.add_arm_phase(r, a.arm_phase(r));
  }
  for (const auto& r : b.arms()) {
    if (b.arm_phase(r) != 0.0) out.add_arm_phase(r, b.arm_phase(r));
  }

  for (const auto& [la, aa] : a.amplitudes()) {
    for (const auto& [lb, ab] : b.amplitudes()) {
      BasisLabel l = la;
      for (const auto& [slot, occ] : lb.photons)
        l.set_photon(slot.mode, slot.pol, occ);
      for (const auto& [id, level] : lb.arms) l.set_arm(id, level);
      out.add(l, aa * ab);
    }
  }
  // deficits combine as independent survival probabilities
  double da = a.norm_deficit(), db = b.norm_deficit();
  out.set_norm_deficit(1.0 - (1.0 - da) * (1.0 - db));
  return out;
}

LinearMap LinearMap::identity(const std::vector<PhotonSlot>& slots) {
  LinearMap m;
  m.in_slots = slots;
  m.out_slots = slots;
  m.coeff = Eigen::MatrixXcd::Identity(slots.size(), slots.size());
  m.kind = Kind::Unitary;
  return m;
}

LinearMap LinearMap::loss(const std::string& mode, double transmission) {
  if (transmission < 0.0 || transmission > 1.0)
    throw std::domain_error("loss transmission must lie in [0,1]");
  LinearMap m;
  for (Pol p : {Pol::H, Pol::V, Pol::R, Pol::L}) m.in_slots.push_back({mode, p});
  m.out_slots = m.in_slots;
  m.coeff = std::sqrt(transmission) *
            Eigen::MatrixXcd::Identity(m.in_slots.size(), m.in_slots.size());
  m.kind = Kind::IsometryWithLoss;
  return m;
}

std::set<std::string> LinearMap::domain_modes() const {
  std::set<std::string> out;
  for (const auto& s : in_slots) out.insert(s.mode);
  return out;
}

bool LinearMap::columns_orthonormal(double tol) const {
  Eigen::MatrixXcd g = coeff.adjoint() * coeff;
  return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= tol;
}

double LinearMap::max_singular_value() const {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(coeff);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

void LinearMap::validate() const {
  if (static_cast<std::size_t>(coeff.rows()) != out_slots.size() ||
      static_cast<std::size_t>(coeff.cols()) != in_slots.size())
    throw std::domain_error("LinearMap: matrix shape does not match slots");
  if (kind == Kind::Unitary) {
    if (!columns_orthonormal())
      throw std::domain_error("LinearMap: unitary map has non-orthonormal columns");
  } else {
    if (max_singular_value() > 1.0 + 1e-12)
      throw std::domain_error("LinearMap: lossy map amplifies (singular value > 1)");
  }
}

namespace {

// Distributes one transformed photon over the accumulated multiset terms.
// Multisets are kept as sorted vectors of out-slot indices.
using TermMap = std::map<std::vector<int>, Complex>;

TermMap extend_terms(const TermMap& terms, const Eigen::MatrixXcd& coeff, int in_slot) {
  TermMap out;
  for (const auto& [ms, c] : terms) {
    for (int j = 0; j < coeff.rows(); ++j) {
      Complex cj = coeff(j, in_slot);
      if (std::abs(cj) < kPruneEps) continue;
      std::vector<int> next = ms;
      next.insert(std::upper_bound(next.begin(), next.end(), j), j);
      out[next] += c * cj;
    }
  }
  return out;
}

double factorial_small(int n) {
  static const double table[] = {1, 1, 2, 6, 24, 120};
  return table[n];
}

}  // namespace

JointKet apply_map(const JointKet& state, const LinearMap& map) {
  map.validate();
  const auto domain = map.domain_modes();
  for (const auto& m : domain)
    if (!state.modes().count(m))
      throw std::domain_error("apply_map: mode not in state universe: " + m);

  std::map<PhotonSlot, int> slot_index;
  for (std::size_t i = 0; i < map.in_slots.size(); ++i)
    slot_index[map.in_slots[i]] = static_cast<int>(i);

  JointKet out;
  for (const auto& m : state.modes()) out.declare_mode(m);
  for (const auto& s : map.out_slots) out.declare_mode(s.mode);
  for (const auto& r : state.arms()) out.declare_arm(r);
  for (const auto& r : state.arms())
    if (state.arm_phase(r) != 0.0) out.add_arm_phase(r, state.arm_phase(r));

  const double w_in = state.weight();
  for (const auto& [label, amp] : state.amplitudes()) {
    // split photons into the map's domain and pass-through content
    std::vector<int> in_photons;  // in-slot index per photon
    BasisLabel rest;
    rest.arms = label.arms;
    double in_norm = 1.0;
    for (const auto& [slot, occ] : label.photons) {
      if (domain.count(slot.mode)) {
        auto it = slot_index.find(slot);
        if (it == slot_index.end())
          throw std::domain_error("apply_map: slot " + slot.mode + ":" +
                                  to_string(slot.pol) +
                                  " not covered by map inputs");
        for (int k = 0; k < occ; ++k) in_photons.push_back(it->second);
        in_norm *= factorial_small(occ);
      } else {
        rest.photons.emplace_back(slot, occ);
      }
    }

    if (in_photons.empty()) {
      out.add(label, amp);
      continue;
    }

    TermMap terms;
    terms[{}] = Complex(1.0, 0.0);
    for (int idx : in_photons) terms = extend_terms(terms, map.coeff, idx);

    for (const auto& [ms, c] : terms) {
      BasisLabel l = rest;
      double out_norm = 1.0;
      for (std::size_t i = 0; i < ms.size();) {
        std::size_t j = i;
        while (j < ms.size() && ms[j] == ms[i]) ++j;
        int count = static_cast<int>(j - i);
        const PhotonSlot& slot = map.out_slots[ms[i]];
        l.add_photon(slot.mode, slot.pol, count);
        out_norm *= factorial_small(count);
        i = j;
      }
      out.add(l, amp * c * std::sqrt(out_norm / in_norm));
    }
  }

  out.prune();
  const double w_out = out.weight();
  if (map.kind == LinearMap::Kind::Unitary) {
    if (std::abs(w_out - w_in) > 1e-9)
      throw std::logic_error("apply_map: unitary map changed the norm");
    out.set_norm_deficit(state.norm_deficit());
  } else {
    out.set_norm_deficit(state.norm_deficit() + std::max(0.0, w_in - w_out));
  }
  return out;
}

Projection project(const JointKet& state,
                   const std::function<bool(const BasisLabel&)>& keep) {
  Projection res;
  JointKet post;
  for (const auto& m : state.modes()) post.declare_mode(m);
  for (const auto& r : state.arms()) post.declare_arm(r);
  for (const auto& r : state.arms())
    if (state.arm_phase(r) != 0.0) post.add_arm_phase(r, state.arm_phase(r));

  double kept = 0.0;
  for (const auto& [l, a] : state.amplitudes()) {
    if (keep(l)) {
      post.add(l, a);
      kept += std::norm(a);
    }
  }
  res.probability = kept;
  if (kept <= 0.0) {
    res.empty = true;
    res.post = post;  // zero ket
    return res;
  }
  res.post = post.normalized();
  return res;
}

JointKet remove_mode(const JointKet& state, const std::string& mode) {
  if (!state.modes().count(mode))
    throw std::domain_error("remove_mode: unknown mode " + mode);

  bool first = true;
  std::vector<std::pair<PhotonSlot, int>> content;
  JointKet out;
  for (const auto& m : state.modes())
    if (m != mode) out.declare_mode(m);
  for (const auto& r : state.arms()) out.declare_arm(r);
  for (const auto& r : state.arms())
    if (state.arm_phase(r) != 0.0) out.add_arm_phase(r, state.arm_phase(r));
  out.set_norm_deficit(state.norm_deficit());

  for (const auto& [l, a] : state.amplitudes()) {
    std::vector<std::pair<PhotonSlot, int>> here;
    BasisLabel stripped;
    stripped.arms = l.arms;
    for (const auto& [slot, occ] : l.photons) {
      if (slot.mode == mode)
        here.emplace_back(slot, occ);
      else
        stripped.photons.emplace_back(slot, occ);
    }
    if (first) {
      content = here;
      first = false;
    } else if (here != content) {
      throw std::domain_error("remove_mode: mode " + mode +
                              " content differs across labels");
    }
    out.add(stripped, a);
  }
  return out;
}

DensityOp::DensityOp(std::vector<BasisLabel> basis, Eigen::MatrixXcd mat,
                     double loss_weight)
    : basis_(std::move(basis)), mat_(std::move(mat)), loss_weight_(loss_weight) {
  if (static_cast<std::size_t>(mat_.rows()) != basis_.size() ||
      static_cast<std::size_t>(mat_.cols()) != basis_.size())
    throw std::domain_error("DensityOp: matrix shape does not match basis");
}

double DensityOp::trace() const { return mat_.trace().real() + loss_weight_; }

bool DensityOp::hermitian_within(double tol) const {
  return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double DensityOp::min_eigenvalue() const {
  if (mat_.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat_);
  return es.eigenvalues().minCoeff();
}

DensityOp DensityOp::maximally_mixed(std::vector<BasisLabel> basis) {
  const std::size_t d = basis.size();
  if (d == 0) throw std::domain_error("maximally_mixed: empty basis");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d);
  return DensityOp(std::move(basis), std::move(m));
}

DensityOp to_density(const JointKet& state) {
  std::vector<BasisLabel> basis;
  basis.reserve(state.size());
  for (const auto& [l, a] : state.amplitudes()) basis.push_back(l);
  Eigen::VectorXcd v(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) v(i) = state.amplitude(basis[i]);
  return DensityOp(std::move(basis), v * v.adjoint(), state.norm_deficit());
}

DensityOp mix(const std::vector<std::pair<double, DensityOp>>& parts) {
  if (parts.empty()) throw std::domain_error("mix: no components");
  double wsum = 0.0;
  for (const auto& [w, op] : parts) {
    if (w < 0.0) throw std::domain_error("mix: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::domain_error("mix: weights must sum to 1");

  std::map<BasisLabel, std::size_t> index;
  for (const auto& [w, op] : parts)
    for (const auto& l : op.basis())
      if (!index.count(l)) {
        std::size_t next = index.size();
        index[l] = next;
      }
  std::vector<BasisLabel> basis(index.size());
  for (const auto& [l, i] : index) basis[i] = l;

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
  double loss = 0.0;
  for (const auto& [w, op] : parts) {
    const auto& b = op.basis();
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        m(index.at(b[i]), index.at(b[j])) += w * op.matrix()(i, j);
    loss += w * op.loss_weight();
  }
  return DensityOp(std::move(basis), std::move(m), loss);
}

StateMixture StateMixture::pure(JointKet k) {
  StateMixture m;
  m.parts.emplace_back(1.0, std::move(k));
  return m;
}

double StateMixture::total_weight() const {
  double w = 0.0;
  for (const auto& [p, k] : parts) w += p * k.weight();
  return w;
}

DensityOp to_density(const StateMixture& m) {
  std::vector<std::pair<double, DensityOp>> parts;
  double wsum = 0.0;
  for (const auto& [w, k] : m.parts) wsum += w;
  for (const auto& [w, k] : m.parts) parts.emplace_back(w / wsum, to_density(k));
  return mix(parts);
}

StateMixture to_mixture(const DensityOp& rho) {
  StateMixture out;
  if (rho.matrix().rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
  std::set<std::string> modes, arms;
  for (const auto& l : rho.basis()) {
    for (const auto& [slot, occ] : l.photons) modes.insert(slot.mode);
    for (const auto& [id, level] : l.arms) arms.insert(id);
  }
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double w = es.eigenvalues()(i);
    if (w < 1e-14) continue;
    JointKet k;
    for (const auto& m : modes) k.declare_mode(m);
    for (const auto& a : arms) k.declare_arm(a);
    for (std::size_t j = 0; j < rho.basis().size(); ++j)
      k.add(rho.basis()[j], es.eigenvectors()(j, i));
    out.parts.emplace_back(w, std::move(k));
  }
  return out;
}

}  // namespace swp
