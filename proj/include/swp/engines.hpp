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

#ifndef SWP_ENGINES_HPP
#define SWP_ENGINES_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swp/hilbert.hpp"
#include "swp/optics.hpp"

namespace swp {

/// A click detector behind one output of a polarization analyzer.
/// Non-number-resolving by default: any number of surviving photons gives
/// one click. The number_resolving flag is reserved for diagnostics; it
/// does not change click-set statistics.
struct DetectorSpec {
  std::string id;
  std::string mode;
  JonesVector projector;       // polarization state it watches
  double efficiency = 1.0;
  double dark_click_prob = 0.0;
  bool number_resolving = false;
};

using ClickSet = std::vector<std::string>;  // sorted detector ids

/// Probability over click sets. Entries include the empty set, so the
/// probabilities total 1 (the empty entry is the no-relevant-click mass).
struct OutcomeDistribution {
  std::vector<std::pair<ClickSet, double>> entries;  // sorted by click set

  double probability(const ClickSet& clicks) const;
  /// Probability that the click set contains the given pattern.
  double containing(const ClickSet& pattern) const;
  double total() const;
};

/// Exact click-set distribution: the state is rotated into the analyzer
/// bases, photon-count patterns are enumerated, and detector efficiency
/// thinning is folded in analytically, so there is no sampling error.
/// Each watched mode's detectors must form a complete orthogonal pair;
/// overlapping projectors are a domain error.
OutcomeDistribution outcome_distribution(const JointKet& state,
                                         const std::vector<DetectorSpec>& detectors);
OutcomeDistribution outcome_distribution(const StateMixture& state,
                                         const std::vector<DetectorSpec>& detectors);
OutcomeDistribution outcome_distribution(const DensityOp& state,
                                         const std::vector<DetectorSpec>& detectors);

/// One simulated trial: which detectors clicked, and the model time of the
/// trial's read window.
struct TrialOutcome {
  std::int64_t trial_index = 0;
  ClickSet clicks;
  std::int64_t timestamp_ns = 0;
};

/// Counter-based per-trial random stream: the state for trial k is derived
/// from (seed, k) alone, so sampling is independent of execution order and
/// worker count.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t trial_index);
  std::uint64_t next_u64();
  double uniform();  // [0, 1)

 private:
  std::uint64_t state_;
};

using TimestampFn = std::function<std::int64_t(std::int64_t trial_index)>;

/// Draws n i.i.d. trials from the distribution. Results are byte-identical
/// for a given (dist, n, seed) regardless of worker count.
std::vector<TrialOutcome> sample_trials(const OutcomeDistribution& dist,
                                        std::int64_t n, std::uint64_t seed,
                                        int workers = 1,
                                        const TimestampFn& timestamp = {});

/// Number of trials whose click set contains every detector in the pattern.
std::int64_t coincidences(const std::vector<TrialOutcome>& outcomes,
                          const ClickSet& pattern);

/// Total variation distance between two click-set distributions.
double total_variation_distance(const OutcomeDistribution& a,
                                const OutcomeDistribution& b);

/// Empirical click-set distribution of sampled trials.
OutcomeDistribution empirical_distribution(const std::vector<TrialOutcome>& outcomes);

}  // namespace swp

#endif  // SWP_ENGINES_HPP
