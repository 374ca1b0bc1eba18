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

#ifndef SWP_HILBERT_HPP
#define SWP_HILBERT_HPP

#include <complex>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace swp {

using Complex = std::complex<double>;

/// Amplitudes below this magnitude are dropped from sparse kets.
inline constexpr double kPruneEps = 1e-15;

/// Photon polarization tag. R and L are the circular components
/// (sigma+ maps to R, sigma- maps to L; config parsing accepts the
/// sigma spellings as aliases).
enum class Pol : std::uint8_t { H, V, R, L };

/// Logical spin-wave occupation of one source arm. Double means both
/// the plus and the minus collective mode hold one excitation.
enum class ArmLevel : std::uint8_t { Vac, Plus, Minus, Double };

std::string to_string(Pol p);
std::string to_string(ArmLevel l);

/// A single-photon slot: one polarization component of one spatial mode.
struct PhotonSlot {
  std::string mode;
  Pol pol = Pol::H;
  auto operator<=>(const PhotonSlot&) const = default;
};

/// One element of the composite basis: photon occupations (0 entries
/// absent, occupations 1 or 2) together with the spin-wave level of each
/// arm (Vac entries absent). Kept sorted so equality and map ordering are
/// canonical.
struct BasisLabel {
  std::vector<std::pair<PhotonSlot, int>> photons;
  std::vector<std::pair<std::string, ArmLevel>> arms;

  int occupation(const std::string& mode, Pol pol) const;
  int occupation(const std::string& mode) const;
  int total_photons() const;
  ArmLevel arm(const std::string& arm_id) const;

  BasisLabel& set_photon(const std::string& mode, Pol pol, int occ);
  BasisLabel& add_photon(const std::string& mode, Pol pol, int count = 1);
  BasisLabel& set_arm(const std::string& arm_id, ArmLevel level);

  bool is_vacuum() const { return photons.empty() && arms.empty(); }

  /// Canonical text form, e.g. "S1:H S1p:V*2 A1=+" ("-" for vacuum).
  std::string str() const;

  auto operator<=>(const BasisLabel&) const = default;
};

/// Sparse complex-amplitude map over BasisLabels, plus a scalar
/// norm_deficit that accounts for branches lost to traced-out
/// environments (loss channels, failed retrievals).
///
/// Invariant: sum |amplitude|^2 + norm_deficit == 1 for any state that
/// started normalized, after any pipeline of maps and projections and
/// before renormalization.
///
/// All operations are pure: they return new values and never mutate
/// shared state, so kets may be shared freely across threads.
class JointKet {
 public:
  JointKet() = default;

  static JointKet vacuum(std::set<std::string> modes, std::set<std::string> arms);

  const std::set<std::string>& modes() const { return modes_; }
  const std::set<std::string>& arms() const { return arms_; }
  void declare_mode(const std::string& m) { modes_.insert(m); }
  void declare_arm(const std::string& a) { arms_.insert(a); }
  void drop_mode(const std::string& m) { modes_.erase(m); }

  const std::map<BasisLabel, Complex>& amplitudes() const { return amps_; }
  Complex amplitude(const BasisLabel& l) const;
  void set(const BasisLabel& l, Complex a);
  void add(const BasisLabel& l, Complex a);

  double norm_deficit() const { return norm_deficit_; }
  void set_norm_deficit(double d) { norm_deficit_ = d; }
  void add_norm_deficit(double d) { norm_deficit_ += d; }

  /// Accumulated Larmor precession angle (beta*tau, radians) per arm.
  /// Bookkeeping for the spin-wave sector: the component-level phases it
  /// implies are folded in at retrieval time.
  double arm_phase(const std::string& arm_id) const;
  void add_arm_phase(const std::string& arm_id, double radians);
  void reset_arm_phase(const std::string& arm_id);

  double weight() const;  // sum of |amplitude|^2
  std::size_t size() const { return amps_.size(); }
  bool empty() const { return amps_.empty(); }

  void prune(double eps = kPruneEps);
  JointKet normalized() const;

  /// Debug serialization: one line per basis label, "label TAB re TAB im",
  /// labels in canonical order.
  std::string debug_text() const;

  /// L2 distance between amplitude maps (labels aligned).
  static double distance(const JointKet& a, const JointKet& b);

 private:
  std::set<std::string> modes_;
  std::set<std::string> arms_;
  std::map<BasisLabel, Complex> amps_;
  std::map<std::string, double> arm_phase_;
  double norm_deficit_ = 0.0;
};

/// Product state of two kets on disjoint mode/arm sets.
JointKet tensor(const JointKet& a, const JointKet& b);

/// Linear map over a declared single-photon subspace. Multi-photon action
/// follows by independent transformation of each photon with bosonic
/// normalization. Unitary maps must have orthonormal columns; lossy maps
/// must be contractions (all singular values <= 1).
struct LinearMap {
  enum class Kind { Unitary, IsometryWithLoss };

  std::vector<PhotonSlot> in_slots;
  std::vector<PhotonSlot> out_slots;
  Eigen::MatrixXcd coeff;  // rows: out_slots, cols: in_slots
  Kind kind = Kind::Unitary;

  static LinearMap identity(const std::vector<PhotonSlot>& slots);
  /// Beamsplit to an implicit environment that is traced out immediately:
  /// every polarization of `mode` is scaled by sqrt(transmission).
  static LinearMap loss(const std::string& mode, double transmission);

  std::set<std::string> domain_modes() const;
  bool columns_orthonormal(double tol = 1e-12) const;
  double max_singular_value() const;
  void validate() const;
};

/// Applies a LinearMap. Unitary maps preserve the norm exactly; for
/// isometry-with-loss maps the lost weight accrues to norm_deficit.
JointKet apply_map(const JointKet& state, const LinearMap& map);

struct Projection {
  double probability = 0.0;
  JointKet post;        // renormalized; empty flag set when probability == 0
  bool empty = false;
};

/// Projects onto the labels satisfying the predicate. probability is the
/// total squared amplitude kept; the post state is renormalized. A
/// zero-probability branch is a value, not an error.
Projection project(const JointKet& state,
                   const std::function<bool(const BasisLabel&)>& keep);

/// Discards a mode whose content is identical across all labels (a
/// detected or otherwise disposed photon). Throws if the content differs.
JointKet remove_mode(const JointKet& state, const std::string& mode);

/// Dense Hermitian density operator over an explicit label basis.
/// loss_weight carries traced-out branch weight so the total trace stays 1.
class DensityOp {
 public:
  DensityOp() = default;
  DensityOp(std::vector<BasisLabel> basis, Eigen::MatrixXcd mat,
            double loss_weight = 0.0);

  const std::vector<BasisLabel>& basis() const { return basis_; }
  const Eigen::MatrixXcd& matrix() const { return mat_; }
  double loss_weight() const { return loss_weight_; }

  double trace() const;
  bool hermitian_within(double tol = 1e-12) const;
  double min_eigenvalue() const;

  static DensityOp maximally_mixed(std::vector<BasisLabel> basis);

 private:
  std::vector<BasisLabel> basis_;
  Eigen::MatrixXcd mat_;
  double loss_weight_ = 0.0;
};

DensityOp to_density(const JointKet& state);

/// Convex combination of density operators; weights must be nonnegative
/// and sum to 1.
DensityOp mix(const std::vector<std::pair<double, DensityOp>>& parts);

/// Operational mixed state: a convex combination of pure kets. This is
/// the form the engines consume (every pipeline noise model used here is
/// a small mixture of explicit kets).
struct StateMixture {
  std::vector<std::pair<double, JointKet>> parts;

  static StateMixture pure(JointKet k);
  double total_weight() const;
};

DensityOp to_density(const StateMixture& m);

/// Eigendecomposition of a DensityOp into a StateMixture (components with
/// negligible weight are dropped). Modes/arms of the produced kets are
/// inferred from the basis labels.
StateMixture to_mixture(const DensityOp& rho);

}  // namespace swp

#endif  // SWP_HILBERT_HPP
