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

#include "swp/engines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

namespace swp {

double OutcomeDistribution::probability(const ClickSet& clicks) const {
  for (const auto& [c, p] : entries)
    if (c == clicks) return p;
  return 0.0;
}

double OutcomeDistribution::containing(const ClickSet& pattern) const {
  double p = 0.0;
  for (const auto& [c, prob] : entries)
    if (std::includes(c.begin(), c.end(), pattern.begin(), pattern.end()))
      p += prob;
  return p;
}

double OutcomeDistribution::total() const {
  double t = 0.0;
  for (const auto& [c, p] : entries) t += p;
  return t;
}

namespace {

struct ModeGroup {
  std::string mode;
  // detector index (into the caller's list) per analyzer port
  int det_plus = -1;
  int det_minus = -1;
  JonesVector plus, minus;
};

bool orthonormal_pair(const JonesVector& a, const JonesVector& b, double tol) {
  const double na = std::norm(a.h) + std::norm(a.v);
  const double nb = std::norm(b.h) + std::norm(b.v);
  const Complex dot = std::conj(a.h) * b.h + std::conj(a.v) * b.v;
  return std::abs(na - 1.0) <= tol && std::abs(nb - 1.0) <= tol &&
         std::abs(dot) <= tol;
}

// Rotates every watched mode into its analyzer eigenbasis: the plus port
// becomes H, the minus port becomes V. Labels then directly give photon
// counts per detector.
LinearMap analyzer_rotation(const std::vector<ModeGroup>& groups) {
  LinearMap m;
  const std::size_t n = 2 * groups.size();
  m.coeff = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& mg = groups[g];
    m.in_slots.push_back({mg.mode, Pol::H});
    m.in_slots.push_back({mg.mode, Pol::V});
    m.out_slots.push_back({mg.mode, Pol::H});  // plus port
    m.out_slots.push_back({mg.mode, Pol::V});  // minus port
    // row = <port|, columns H,V of the incoming photon
    m.coeff(2 * g, 2 * g) = std::conj(mg.plus.h);
    m.coeff(2 * g, 2 * g + 1) = std::conj(mg.plus.v);
    m.coeff(2 * g + 1, 2 * g) = std::conj(mg.minus.h);
    m.coeff(2 * g + 1, 2 * g + 1) = std::conj(mg.minus.v);
  }
  return m;
}

}  // namespace

OutcomeDistribution outcome_distribution(const JointKet& state,
                                         const std::vector<DetectorSpec>& detectors) {
  if (detectors.empty())
    throw std::domain_error("outcome_distribution: no detectors");

  std::map<std::string, ModeGroup> by_mode;
  for (std::size_t i = 0; i < detectors.size(); ++i) {
    const auto& d = detectors[i];
    if (d.efficiency < 0.0 || d.efficiency > 1.0)
      throw std::domain_error("detector " + d.id + ": efficiency outside [0,1]");
    auto& g = by_mode[d.mode];
    g.mode = d.mode;
    if (g.det_plus < 0) {
      g.det_plus = static_cast<int>(i);
      g.plus = d.projector;
    } else if (g.det_minus < 0) {
      g.det_minus = static_cast<int>(i);
      g.minus = d.projector;
    } else {
      throw std::domain_error("outcome_distribution: more than two detectors on mode " +
                              d.mode);
    }
  }
  std::vector<ModeGroup> groups;
  for (auto& [mode, g] : by_mode) {
    if (!state.modes().count(mode))
      throw std::domain_error("outcome_distribution: mode not in state: " + mode);
    if (g.det_minus < 0)
      throw std::domain_error(
          "outcome_distribution: detectors on mode " + mode +
          " do not form a complete pair");
    if (!orthonormal_pair(g.plus, g.minus, 1e-9))
      throw std::domain_error(
          "outcome_distribution: overlapping detector projectors on mode " + mode);
    groups.push_back(g);
  }

  const JointKet rotated = apply_map(state, analyzer_rotation(groups));

  // photon-count pattern per detector -> probability
  std::map<std::vector<int>, double> patterns;
  for (const auto& [label, amp] : rotated.amplitudes()) {
    std::vector<int> counts(detectors.size(), 0);
    for (const auto& g : groups) {
      counts[g.det_plus] = label.occupation(g.mode, Pol::H);
      counts[g.det_minus] = label.occupation(g.mode, Pol::V);
    }
    patterns[counts] += std::norm(amp);
  }
  if (rotated.norm_deficit() > 0.0)
    patterns[std::vector<int>(detectors.size(), 0)] += rotated.norm_deficit();

  // Bernoulli thinning folded analytically per detector
  std::map<ClickSet, double> acc;
  for (const auto& [counts, prob] : patterns) {
    std::vector<std::pair<std::string, double>> click_probs;
    for (std::size_t i = 0; i < detectors.size(); ++i) {
      const auto& d = detectors[i];
      double q = 1.0 - std::pow(1.0 - d.efficiency, counts[i]);
      if (d.dark_click_prob > 0.0)
        q = 1.0 - (1.0 - q) * (1.0 - d.dark_click_prob);
      if (q > 0.0) click_probs.emplace_back(d.id, q);
    }
    // expand the product over clicking / non-clicking detectors
    std::vector<std::pair<ClickSet, double>> branches{{ClickSet{}, prob}};
    for (const auto& [id, q] : click_probs) {
      std::vector<std::pair<ClickSet, double>> next;
      next.reserve(branches.size() * 2);
      for (const auto& [set, p] : branches) {
        if (p * q > 0.0) {
          ClickSet with = set;
          with.insert(std::upper_bound(with.begin(), with.end(), id), id);
          next.emplace_back(std::move(with), p * q);
        }
        if (p * (1.0 - q) > 0.0) next.emplace_back(set, p * (1.0 - q));
      }
      branches = std::move(next);
    }
    for (const auto& [set, p] : branches) acc[set] += p;
  }

  OutcomeDistribution out;
  out.entries.assign(acc.begin(), acc.end());
  return out;
}

OutcomeDistribution outcome_distribution(const StateMixture& state,
                                         const std::vector<DetectorSpec>& detectors) {
  std::map<ClickSet, double> acc;
  for (const auto& [w, ket] : state.parts) {
    if (w <= 0.0) continue;
    const OutcomeDistribution d = outcome_distribution(ket, detectors);
    for (const auto& [set, p] : d.entries) acc[set] += w * p;
  }
  OutcomeDistribution out;
  out.entries.assign(acc.begin(), acc.end());
  return out;
}

OutcomeDistribution outcome_distribution(const DensityOp& state,
                                         const std::vector<DetectorSpec>& detectors) {
  StateMixture m = to_mixture(state);
  OutcomeDistribution d = outcome_distribution(m, detectors);
  if (state.loss_weight() > 0.0) {
    // traced-out weight contributes to the no-click entry
    bool found = false;
    for (auto& [set, p] : d.entries)
      if (set.empty()) {
        p += state.loss_weight();
        found = true;
      }
    if (!found) d.entries.insert(d.entries.begin(), {ClickSet{}, state.loss_weight()});
  }
  return d;
}

namespace {

// splitmix64 finalizer; full 64-bit avalanche
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t trial_index)
    : state_(mix64(mix64(seed) ^ mix64(trial_index * 0xda942042e4dd58b5ULL + 1))) {}

std::uint64_t TrialRng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double TrialRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::vector<TrialOutcome> sample_trials(const OutcomeDistribution& dist,
                                        std::int64_t n, std::uint64_t seed,
                                        int workers, const TimestampFn& timestamp) {
  if (n < 1) throw std::domain_error("sample_trials: n must be >= 1");
  if (workers < 1) workers = 1;

  // cumulative table in canonical entry order
  std::vector<double> cdf;
  cdf.reserve(dist.entries.size());
  double acc = 0.0;
  for (const auto& [set, p] : dist.entries) {
    acc += p;
    cdf.push_back(acc);
  }
  if (cdf.empty()) throw std::domain_error("sample_trials: empty distribution");

  std::vector<TrialOutcome> out(static_cast<std::size_t>(n));
  auto fill = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t k = begin; k < end; ++k) {
      TrialRng rng(seed, static_cast<std::uint64_t>(k));
      const double u = rng.uniform() * acc;
      std::size_t idx =
          std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
      if (idx >= dist.entries.size()) idx = dist.entries.size() - 1;
      auto& t = out[static_cast<std::size_t>(k)];
      t.trial_index = k;
      t.clicks = dist.entries[idx].first;
      t.timestamp_ns = timestamp ? timestamp(k) : k;
    }
  };

  if (workers == 1) {
    fill(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t b = w * chunk;
      const std::int64_t e = std::min(n, b + chunk);
      if (b >= e) break;
      pool.emplace_back(fill, b, e);
    }
    for (auto& t : pool) t.join();
  }
  return out;
}

std::int64_t coincidences(const std::vector<TrialOutcome>& outcomes,
                          const ClickSet& pattern) {
  if (pattern.empty()) throw std::domain_error("coincidences: empty pattern");
  ClickSet sorted = pattern;
  std::sort(sorted.begin(), sorted.end());
  std::int64_t count = 0;
  for (const auto& t : outcomes)
    if (std::includes(t.clicks.begin(), t.clicks.end(), sorted.begin(),
                      sorted.end()))
      ++count;
  return count;
}

double total_variation_distance(const OutcomeDistribution& a,
                                const OutcomeDistribution& b) {
  std::map<ClickSet, double> diff;
  for (const auto& [set, p] : a.entries) diff[set] += p;
  for (const auto& [set, p] : b.entries) diff[set] -= p;
  double tvd = 0.0;
  for (const auto& [set, d] : diff) tvd += std::abs(d);
  return tvd / 2.0;
}

OutcomeDistribution empirical_distribution(const std::vector<TrialOutcome>& outcomes) {
  std::map<ClickSet, double> acc;
  for (const auto& t : outcomes) acc[t.clicks] += 1.0;
  OutcomeDistribution out;
  const double n = static_cast<double>(outcomes.size());
  for (const auto& [set, c] : acc) out.entries.emplace_back(set, c / n);
  return out;
}

}  // namespace swp
