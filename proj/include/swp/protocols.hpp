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

#ifndef SWP_PROTOCOLS_HPP
#define SWP_PROTOCOLS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "swp/analysis.hpp"
#include "swp/engines.hpp"
#include "swp/source.hpp"

namespace swp {

/// Trial clock of one experimental cycle: a preparation stage followed by
/// a run window that is packed with write/store/read/clean trials.
struct TimingSequence {
  double prep_ms = 23.0;
  double run_ms = 10.0;
  double write_ns = 70.0;
  double read_ns = 100.0;
  double clean_ns = 200.0;
  int cycle_hz = 30;

  double trial_len_ns(double tau_ns) const {
    return write_ns + tau_ns + read_ns + clean_ns;
  }
  void validate() const;
};

/// Trials packed into one run window: floor(run / trial length), capped at
/// the scheduled counts used at the reference storage times (10000 at
/// 30 ns; 8333 at 230 and 430 ns). Zero fitting trials is a domain error.
std::int64_t trials_per_run(const TimingSequence& timing, double tau_ns);

/// N = trials_per_run * cycle_hz.
std::int64_t trials_per_second(const TimingSequence& timing, double tau_ns);

/// Closed-form entangled-pair rate eta_S * eta_AS * chi * R * N.
double pair_rate_per_s(double eta_s, double eta_as, double chi,
                       double retrieval_eff, double trials_per_s);

/// Closed-form conditional success probability 0.5 * etaD3 * etaD4 * R3 * R4.
double swap_success_probability(double eta_d3, double eta_d4, double r3,
                                double r4);

enum class Protocol { Pair, Ghz3, Swap };
enum class Engine { Exact, Mc };

std::string to_string(Protocol p);
std::string to_string(Engine e);

/// Receives each measurement's sampled trials together with the exact
/// distribution they were drawn from, for logging and for convergence checks.
class TrialLogger {
 public:
  virtual ~TrialLogger() = default;
  virtual void log(const std::string& tag, const OutcomeDistribution& dist,
                   const std::vector<TrialOutcome>& trials) = 0;
};

struct ExperimentConfig {
  Protocol protocol = Protocol::Pair;
  SourceParams source;
  TimingSequence timing;
  double default_detector_eff = 0.30;
  std::map<std::string, double> detector_eff;   // per-detector override
  std::map<std::string, double> detector_dark;  // dark-click prob per trial
  std::vector<AnalyzerSetting> settings;        // empty = canonical settings
  std::vector<double> taus_ns = {30.0};
  std::int64_t trials_per_run_override = 0;  // 0 = derive from timing
  Engine engine = Engine::Exact;
  std::int64_t mc_trials = 100000;
  std::uint64_t seed = 12345;
  int workers = 1;
  int double_excitations = -1;  // -1 auto (swap on, others off), 0 off, 1 on

  TrialLogger* trial_logger = nullptr;  // not part of the manifest

  double detector_eff_for(const std::string& id) const;
  double detector_dark_for(const std::string& id) const;
  bool double_excitations_enabled() const;
  void validate() const;
};

struct PairRun {
  double tau_ns = 0.0;
  std::string arm;
  std::array<CorrelationEstimate, 4> e_table;
  BellResult bell;
  double predicted_rate_per_s = 0.0;
  std::int64_t trials_per_s = 0;
};

struct PairReport {
  std::vector<PairRun> runs;
};

struct GhzBranch {
  double herald_probability = 0.0;
  bool empty = false;
  std::map<std::string, JointEstimate> terms;  // xxx, zz23, zz34, zz24, yyx, yxy, xyy
  WitnessResult witness;
  MerminResult mermin;
};

struct GhzRun {
  double tau_ns = 0.0;
  GhzBranch heralded;  // conditioned on the H' detector of photon 1
  GhzBranch vprime;    // the V' branch, computed for symmetry checking
};

struct GhzReport {
  std::vector<GhzRun> runs;
};

struct SwapRun {
  double tau_ns = 0.0;
  double herald_probability = 0.0;          // H'H' coincidence of photons 1,2
  double phi_plus_fraction = 0.0;           // |<Phi+|heralded state>|^2
  double double_excitation_fraction = 0.0;  // weight of one-arm double terms
  double success_probability = 0.0;         // closed form
  std::array<CorrelationEstimate, 4> e_table;
  BellResult bell;
};

struct SwapReport {
  std::vector<SwapRun> runs;
};

/// Entangled-pair experiment: per arm and storage time, builds the
/// single-excitation atom-photon state, stores, retrieves, and evaluates
/// the four canonical correlation functions and the CHSH parameter, plus
/// the closed-form pair rate.
PairReport run_pair(const ExperimentConfig& config);

/// Three-photon GHZ experiment: interferes the two Stokes photons on the
/// PBS, post-selects one photon per port, heralds on the H' measurement of
/// photon 1, retrieves both arms, and evaluates the witness and Mermin
/// observables on photons 2, 3, 4.
GhzReport run_ghz(const ExperimentConfig& config);

/// Entanglement swap: keeps the second-order double-excitation terms,
/// heralds on the H'H' coincidence of photons 1 and 2, reports the
/// conditional spin-wave decomposition, the post-retrieval photon-pair
/// CHSH, and the closed-form success probability.
SwapReport run_swap(const ExperimentConfig& config);

}  // namespace swp

#endif  // SWP_PROTOCOLS_HPP
