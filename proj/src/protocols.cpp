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

#include "swp/protocols.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace swp {

void TimingSequence::validate() const {
  if (prep_ms <= 0 || run_ms <= 0 || write_ns <= 0 || read_ns < 0 ||
      clean_ns < 0 || cycle_hz <= 0)
    throw std::domain_error("timing: all stage lengths must be positive");
  const double cycle_ms = 1000.0 / cycle_hz;
  if (prep_ms + run_ms > cycle_ms + 1e-9)
    throw std::domain_error("timing: prep + run exceeds the cycle period");
}

std::int64_t trials_per_run(const TimingSequence& timing, double tau_ns) {
  timing.validate();
  if (tau_ns < 0) throw std::domain_error("timing: negative storage time");
  const double len = timing.trial_len_ns(tau_ns);
  const double run_ns = timing.run_ms * 1e6;
  auto n = static_cast<std::int64_t>(run_ns / len);
  if (n < 1)
    throw std::domain_error("timing: no trial fits in the run window");
  // Scheduled trial counts at the reference storage times; the raw pulse
  // arithmetic admits more, but the modeled sequence packs these.
  struct Cap {
    double tau_ns;
    std::int64_t n;
  };
  static constexpr Cap caps[] = {{30.0, 10000}, {230.0, 8333}, {430.0, 8333}};
  for (const auto& c : caps)
    if (std::abs(tau_ns - c.tau_ns) < 1e-9) n = std::min(n, c.n);
  return n;
}

std::int64_t trials_per_second(const TimingSequence& timing, double tau_ns) {
  return trials_per_run(timing, tau_ns) * timing.cycle_hz;
}

double pair_rate_per_s(double eta_s, double eta_as, double chi,
                       double retrieval_eff, double trials_per_s) {
  return eta_s * eta_as * chi * retrieval_eff * trials_per_s;
}

double swap_success_probability(double eta_d3, double eta_d4, double r3,
                                double r4) {
  return 0.5 * eta_d3 * eta_d4 * r3 * r4;
}

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::Pair: return "pair";
    case Protocol::Ghz3: return "ghz3";
    case Protocol::Swap: return "swap";
  }
  return "?";
}

std::string to_string(Engine e) {
  return e == Engine::Exact ? "exact" : "mc";
}

double ExperimentConfig::detector_eff_for(const std::string& id) const {
  auto it = detector_eff.find(id);
  return it == detector_eff.end() ? default_detector_eff : it->second;
}

double ExperimentConfig::detector_dark_for(const std::string& id) const {
  auto it = detector_dark.find(id);
  return it == detector_dark.end() ? 0.0 : it->second;
}

bool ExperimentConfig::double_excitations_enabled() const {
  if (double_excitations >= 0) return double_excitations != 0;
  return protocol == Protocol::Swap;
}

void ExperimentConfig::validate() const {
  source.validate();
  timing.validate();
  if (default_detector_eff < 0.0 || default_detector_eff > 1.0)
    throw std::domain_error("detectors.default_eff must lie in [0,1]");
  for (const auto& [id, e] : detector_eff)
    if (e < 0.0 || e > 1.0)
      throw std::domain_error("detectors.eff_" + id + " must lie in [0,1]");
  for (const auto& [id, d] : detector_dark)
    if (d < 0.0 || d > 1.0)
      throw std::domain_error("detectors.dark_" + id + " must lie in [0,1]");
  if (taus_ns.empty())
    throw std::domain_error("at least one storage time is required");
  for (double t : taus_ns)
    if (t < 0.0) throw std::domain_error("storage times must be >= 0");
  if (engine == Engine::Mc && mc_trials < 1)
    throw std::domain_error("mc_trials must be positive for the mc engine");
  if (workers < 1) throw std::domain_error("workers must be >= 1");
  for (const auto& s : settings) s.validate();
}

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::string tau_tag(double tau_ns) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", tau_ns);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

// Stable per-measurement RNG stream: independent measurements never share
// trial streams.
std::uint64_t seed_for(std::uint64_t base, const std::string& tag) {
  return base ^ fnv1a(tag);
}

SourceParams params_at_tau(const ExperimentConfig& cfg, double tau_ns) {
  SourceParams p = cfg.source;
  p.tau_s = tau_ns * 1e-9;
  return p;
}

TimestampFn make_timestamper(const TimingSequence& timing, double tau_ns) {
  const std::int64_t n_per_run = trials_per_run(timing, tau_ns);
  const double trial_len = timing.trial_len_ns(tau_ns);
  const double cycle_ns = 1e9 / timing.cycle_hz;
  const double prep_ns = timing.prep_ms * 1e6;
  const double read_at = timing.write_ns + tau_ns;
  return [=](std::int64_t k) {
    const std::int64_t run = k / n_per_run;
    const std::int64_t idx = k % n_per_run;
    return static_cast<std::int64_t>(run * cycle_ns + prep_ns +
                                     idx * trial_len + read_at);
  };
}

// White-noise (Werner) admixture on the one-photon-per-mode subspace:
// p * |psi><psi| + (1-p)/2^n * sum over H/V product states.
StateMixture werner_mixture(const JointKet& psi, double p,
                            const std::vector<std::string>& modes) {
  StateMixture out;
  out.parts.emplace_back(p, psi);
  if (p >= 1.0) return out;
  const std::size_t d = 1ULL << modes.size();
  const double w = (1.0 - p) / static_cast<double>(d);
  for (std::size_t bits = 0; bits < d; ++bits) {
    JointKet k;
    for (const auto& m : psi.modes()) k.declare_mode(m);
    for (const auto& a : psi.arms()) k.declare_arm(a);
    BasisLabel l;
    for (std::size_t i = 0; i < modes.size(); ++i)
      l.add_photon(modes[i], (bits >> i) & 1 ? Pol::V : Pol::H);
    k.add(l, 1.0);
    out.parts.emplace_back(w, std::move(k));
  }
  return out;
}

struct MeasuredMode {
  std::string mode;
  std::string det_plus;
  std::string det_minus;
  AnalyzerSetting setting;
};

std::vector<DetectorSpec> build_detectors(const ExperimentConfig& cfg,
                                          const std::vector<MeasuredMode>& mm) {
  std::vector<DetectorSpec> out;
  for (const auto& m : mm) {
    const ProjectorPair p = analyzer_projectors(m.setting);
    out.push_back({m.det_plus, m.mode, p.plus, cfg.detector_eff_for(m.det_plus),
                   cfg.detector_dark_for(m.det_plus), false});
    out.push_back({m.det_minus, m.mode, p.minus,
                   cfg.detector_eff_for(m.det_minus),
                   cfg.detector_dark_for(m.det_minus), false});
  }
  return out;
}

// Coincidence counts per sign pattern over the measured modes; bit i set
// means mode i registered the -1 outcome. Exact engine: expected weights
// from the analytic distribution. MC engine: sampled trial counts.
std::vector<double> measure_sign_patterns(const ExperimentConfig& cfg,
                                          const StateMixture& state,
                                          const std::vector<MeasuredMode>& mm,
                                          const std::string& tag,
                                          const TimestampFn& ts) {
  const auto detectors = build_detectors(cfg, mm);
  const OutcomeDistribution dist = outcome_distribution(state, detectors);
  const std::size_t n_patterns = 1ULL << mm.size();

  std::vector<double> counts(n_patterns, 0.0);
  if (cfg.engine == Engine::Exact) {
    for (std::size_t bits = 0; bits < n_patterns; ++bits) {
      ClickSet pattern;
      for (std::size_t i = 0; i < mm.size(); ++i)
        pattern.push_back((bits >> i) & 1 ? mm[i].det_minus : mm[i].det_plus);
      std::sort(pattern.begin(), pattern.end());
      counts[bits] = dist.containing(pattern);
    }
  } else {
    const auto trials = sample_trials(dist, cfg.mc_trials,
                                      seed_for(cfg.seed, tag), cfg.workers, ts);
    if (cfg.trial_logger) cfg.trial_logger->log(tag, trials);
    for (std::size_t bits = 0; bits < n_patterns; ++bits) {
      ClickSet pattern;
      for (std::size_t i = 0; i < mm.size(); ++i)
        pattern.push_back((bits >> i) & 1 ? mm[i].det_minus : mm[i].det_plus);
      counts[bits] = static_cast<double>(coincidences(trials, pattern));
    }
  }
  return counts;
}

CorrelationEstimate measure_pair_E(const ExperimentConfig& cfg,
                                   const StateMixture& state,
                                   const MeasuredMode& a, const MeasuredMode& b,
                                   const std::string& tag,
                                   const TimestampFn& ts) {
  const auto counts = measure_sign_patterns(cfg, state, {a, b}, tag, ts);
  CorrelationCounts c;
  c.pp = counts[0];
  c.mp = counts[1];  // bit0: mode a minus
  c.pm = counts[2];  // bit1: mode b minus
  c.mm = counts[3];
  CorrelationEstimate e = correlation_E(c);
  if (cfg.engine == Engine::Exact) e.stderr_ = 0.0;  // no sampling error
  e.setting_a = a.setting;
  e.setting_b = b.setting;
  return e;
}

// Two analyzer angles per side, canonical unless overridden in the config.
struct SettingGrid {
  double a0, a1;  // side a angles (degrees)
  double b0, b1;  // side b angles
};

SettingGrid resolve_grid(const ExperimentConfig& cfg, const std::string& mode_a,
                         const std::string& mode_b) {
  SettingGrid g{0.0, 45.0, 22.5, 67.5};
  std::vector<double> as, bs;
  for (const auto& s : cfg.settings) {
    if (s.mode == mode_a && s.kind == BasisKind::Linear)
      as.push_back(s.theta_deg);
    if (s.mode == mode_b && s.kind == BasisKind::Linear)
      bs.push_back(s.theta_deg);
  }
  if (!as.empty() || !bs.empty()) {
    if (as.size() != 2 || bs.size() != 2)
      throw std::domain_error("settings: need exactly two linear angles for " +
                              mode_a + " and " + mode_b);
    g = {as[0], as[1], bs[0], bs[1]};
  }
  return g;
}

std::array<CorrelationEstimate, 4> chsh_table(
    const ExperimentConfig& cfg, const StateMixture& state,
    const std::string& mode_a, const std::string& id_a,
    const std::string& mode_b, const std::string& id_b,
    const std::string& tag_base, const TimestampFn& ts) {
  const SettingGrid g = resolve_grid(cfg, mode_a, mode_b);
  auto mode_at = [&](const std::string& mode, const std::string& id,
                     double theta) {
    return MeasuredMode{mode, "D_H" + id, "D_V" + id,
                        AnalyzerSetting{mode, BasisKind::Linear, theta}};
  };
  const double a[2] = {g.a0, g.a1};
  const double b[2] = {g.b0, g.b1};
  std::array<CorrelationEstimate, 4> table;
  int idx = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const std::string tag = tag_base + "/E" + std::to_string(idx);
      table[idx] = measure_pair_E(cfg, state, mode_at(mode_a, id_a, a[i]),
                                  mode_at(mode_b, id_b, b[j]), tag, ts);
      ++idx;
    }
  return table;
}

// Write-stage state of one arm with the Stokes waveplate applied.
JointKet arm_write_state(const ExperimentConfig& cfg, const SourceParams& p,
                         const std::string& arm, bool keep_doubles) {
  JointKet k = build_atom_photon_state(p, arm);
  if (!keep_doubles) {
    auto res = project(k, [&](const BasisLabel& l) {
      return l.arm(arm) != ArmLevel::Double;
    });
    k = res.post;
  }
  (void)cfg;
  return apply_map(k, quarter_wave(stokes_mode(arm), WaveplateConvention::Stokes));
}

JointKet retrieve_both(JointKet k, const SourceParams& p) {
  k = evolve_larmor(k, p);
  for (const std::string arm : {"A1", "A2"}) {
    k = retrieve(k, arm, p);
    k = apply_map(k, quarter_wave(anti_stokes_mode(arm),
                                  WaveplateConvention::AntiStokes));
  }
  return k;
}

}  // namespace

PairReport run_pair(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.protocol != Protocol::Pair)
    throw std::domain_error("run_pair: config protocol is not pair");

  PairReport report;
  for (double tau_ns : cfg.taus_ns) {
    const SourceParams p = params_at_tau(cfg, tau_ns);
    const TimestampFn ts = make_timestamper(cfg.timing, tau_ns);
    for (const std::string arm : {"A1", "A2"}) {
      const std::string s_mode = stokes_mode(arm);
      const std::string as_mode = anti_stokes_mode(arm);

      JointKet k = build_atom_photon_state(p, arm);
      k = heralded_single(k, arm);
      k = apply_map(k, quarter_wave(s_mode, WaveplateConvention::Stokes));
      k = evolve_larmor(k, p);
      k = retrieve(k, arm, p);
      k = apply_map(k, quarter_wave(as_mode, WaveplateConvention::AntiStokes));
      // retrieval efficiency scales both branches alike; the conditional
      // photon-pair statistics live in the normalized state
      k = k.normalized();

      const StateMixture st =
          werner_mixture(k, p.visibility_for(arm), {s_mode, as_mode});

      PairRun run;
      run.tau_ns = tau_ns;
      run.arm = arm;
      const std::string suffix = arm.substr(1);  // "1" / "2"
      const std::string tag = "pair/" + arm + "/tau" + tau_tag(tau_ns);
      run.e_table = chsh_table(cfg, st, s_mode, "S" + suffix, as_mode,
                               "S" + suffix + "p", tag, ts);
      run.bell = chsh(run.e_table);
      run.trials_per_s = trials_per_second(cfg.timing, tau_ns);
      run.predicted_rate_per_s = pair_rate_per_s(
          cfg.detector_eff_for("D_HS" + suffix),
          cfg.detector_eff_for("D_HS" + suffix + "p"), p.chi,
          p.retrieval_eff_for(arm), static_cast<double>(run.trials_per_s));
      report.runs.push_back(std::move(run));
    }
  }
  return report;
}

namespace {

GhzBranch measure_ghz_branch(const ExperimentConfig& cfg, const JointKet& tri,
                             double herald_probability, const SourceParams& p,
                             const std::string& tag_base, const TimestampFn& ts) {
  GhzBranch branch;
  branch.herald_probability = herald_probability;
  if (herald_probability <= 0.0) {
    branch.empty = true;
    return branch;
  }

  JointKet k = retrieve_both(tri, p);
  k = k.normalized();
  const double vis = p.visibility_for("A1") * p.visibility_for("A2");
  const StateMixture st =
      werner_mixture(k, vis, {"out2", anti_stokes_mode("A1"),
                              anti_stokes_mode("A2")});

  struct TermSpec {
    const char* name;
    BasisKind b2, b3, b4;
    bool marginal4;  // ZZ pairs average over the third photon's outcome
    bool marginal2;
    bool marginal3;
  };
  static const TermSpec specs[] = {
      {"xxx", BasisKind::PauliX, BasisKind::PauliX, BasisKind::PauliX, false, false, false},
      {"zz23", BasisKind::PauliZ, BasisKind::PauliZ, BasisKind::PauliZ, true, false, false},
      {"zz34", BasisKind::PauliZ, BasisKind::PauliZ, BasisKind::PauliZ, false, true, false},
      {"zz24", BasisKind::PauliZ, BasisKind::PauliZ, BasisKind::PauliZ, false, false, true},
      {"yyx", BasisKind::PauliY, BasisKind::PauliY, BasisKind::PauliX, false, false, false},
      {"yxy", BasisKind::PauliY, BasisKind::PauliX, BasisKind::PauliY, false, false, false},
      {"xyy", BasisKind::PauliX, BasisKind::PauliY, BasisKind::PauliY, false, false, false},
  };

  for (const auto& spec : specs) {
    const std::vector<MeasuredMode> mm = {
        {"out2", "D_H2", "D_V2", {"out2", spec.b2, 0.0}},
        {anti_stokes_mode("A1"), "D_H3", "D_V3",
         {anti_stokes_mode("A1"), spec.b3, 0.0}},
        {anti_stokes_mode("A2"), "D_H4", "D_V4",
         {anti_stokes_mode("A2"), spec.b4, 0.0}},
    };
    const auto counts =
        measure_sign_patterns(cfg, st, mm, tag_base + "/" + spec.name, ts);
    // fourfold coincidence of all three measured photons (photon 1 already
    // consumed by the herald); marginalized photons contribute no sign
    std::vector<double> reduced;
    int sign_mask = 0b111;
    if (spec.marginal2) sign_mask &= ~0b001;
    if (spec.marginal3) sign_mask &= ~0b010;
    if (spec.marginal4) sign_mask &= ~0b100;
    JointEstimate est;
    double signed_sum = 0.0, total = 0.0;
    for (std::size_t bits = 0; bits < counts.size(); ++bits) {
      const int minus_bits = std::popcount(bits & static_cast<std::size_t>(sign_mask));
      signed_sum += (minus_bits % 2 ? -1.0 : 1.0) * counts[bits];
      total += counts[bits];
    }
    if (total <= 0.0) {
      branch.empty = true;
      return branch;
    }
    est.value = signed_sum / total;
    est.total = total;
    if (cfg.engine == Engine::Exact) {
      est.stderr_ = 0.0;
    } else {
      const double var = (1.0 - est.value * est.value) / total;
      est.stderr_ = var > 0.0 ? std::sqrt(var) : 0.0;
    }
    branch.terms[spec.name] = est;
  }

  auto term = [&](const char* name) {
    const auto& e = branch.terms.at(name);
    return std::make_pair(e.value, e.stderr_);
  };
  branch.witness =
      ghz_witness(term("xxx"), term("zz23"), term("zz34"), term("zz24"));
  branch.mermin = mermin(term("yyx"), term("yxy"), term("xyy"), term("xxx"));
  return branch;
}

}  // namespace

GhzReport run_ghz(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.protocol != Protocol::Ghz3)
    throw std::domain_error("run_ghz: config protocol is not ghz3");

  GhzReport report;
  const bool doubles = cfg.double_excitations_enabled();
  for (double tau_ns : cfg.taus_ns) {
    const SourceParams p = params_at_tau(cfg, tau_ns);
    const TimestampFn ts = make_timestamper(cfg.timing, tau_ns);

    JointKet a1 = arm_write_state(cfg, p, "A1", doubles);
    JointKet a2 = arm_write_state(cfg, p, "A2", doubles);
    if (!doubles) {
      a1 = heralded_single(a1, "A1");
      a2 = heralded_single(a2, "A2");
    }
    JointKet joint = tensor(a1, a2);
    joint = apply_map(joint, pbs("S1", "S2", "out1", "out2"));

    auto ports = project(joint, [](const BasisLabel& l) {
      return l.occupation("out1") == 1 && l.occupation("out2") == 1;
    });

    GhzRun run;
    run.tau_ns = tau_ns;
    if (ports.empty) {
      run.heralded.empty = true;
      run.vprime.empty = true;
      report.runs.push_back(std::move(run));
      continue;
    }

    const JointKet rotated = apply_map(ports.post, half_wave_45("out1"));
    auto h_branch = project(rotated, [](const BasisLabel& l) {
      return l.occupation("out1", Pol::H) == 1 && l.occupation("out1") == 1;
    });
    auto v_branch = project(rotated, [](const BasisLabel& l) {
      return l.occupation("out1", Pol::V) == 1 && l.occupation("out1") == 1;
    });

    const std::string tag = "ghz3/tau" + tau_tag(tau_ns);
    if (!h_branch.empty) {
      const JointKet tri = remove_mode(h_branch.post, "out1");
      run.heralded = measure_ghz_branch(
          cfg, tri, ports.probability * h_branch.probability, p, tag + "/H", ts);
    } else {
      run.heralded.empty = true;
    }
    if (!v_branch.empty) {
      const JointKet tri = remove_mode(v_branch.post, "out1");
      run.vprime = measure_ghz_branch(
          cfg, tri, ports.probability * v_branch.probability, p, tag + "/V", ts);
    } else {
      run.vprime.empty = true;
    }
    report.runs.push_back(std::move(run));
  }
  return report;
}

SwapReport run_swap(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.protocol != Protocol::Swap)
    throw std::domain_error("run_swap: config protocol is not swap");

  SwapReport report;
  const bool doubles = cfg.double_excitations_enabled();
  for (double tau_ns : cfg.taus_ns) {
    const SourceParams p = params_at_tau(cfg, tau_ns);
    const TimestampFn ts = make_timestamper(cfg.timing, tau_ns);

    JointKet joint = tensor(arm_write_state(cfg, p, "A1", doubles),
                            arm_write_state(cfg, p, "A2", doubles));
    joint = apply_map(joint, pbs("S1", "S2", "out1", "out2"));
    joint = apply_map(joint, half_wave_45("out1"));
    joint = apply_map(joint, half_wave_45("out2"));

    // Bell-state measurement herald: H'H' coincidence of photons 1 and 2
    auto herald = project(joint, [](const BasisLabel& l) {
      return l.occupation("out1") == 1 && l.occupation("out1", Pol::H) == 1 &&
             l.occupation("out2") == 1 && l.occupation("out2", Pol::H) == 1;
    });

    SwapRun run;
    run.tau_ns = tau_ns;
    run.herald_probability = herald.probability;
    run.success_probability = swap_success_probability(
        cfg.detector_eff_for("D_H3"), cfg.detector_eff_for("D_H4"),
        p.retrieval_eff_for("A1"), p.retrieval_eff_for("A2"));
    if (herald.empty) {
      report.runs.push_back(std::move(run));
      continue;
    }

    JointKet stored = remove_mode(remove_mode(herald.post, "out1"), "out2");

    // decomposition of the heralded spin-wave state
    const Complex a_pp =
        stored.amplitude(BasisLabel{}
                             .set_arm("A1", ArmLevel::Plus)
                             .set_arm("A2", ArmLevel::Plus));
    const Complex a_mm =
        stored.amplitude(BasisLabel{}
                             .set_arm("A1", ArmLevel::Minus)
                             .set_arm("A2", ArmLevel::Minus));
    run.phi_plus_fraction = std::norm((a_pp + a_mm) / std::sqrt(2.0));
    double dbl = 0.0;
    for (const auto& [l, amp] : stored.amplitudes())
      if (l.arm("A1") == ArmLevel::Double || l.arm("A2") == ArmLevel::Double)
        dbl += std::norm(amp);
    run.double_excitation_fraction = dbl;

    JointKet k = retrieve_both(stored, p);
    k = k.normalized();
    const double vis = p.visibility_for("A1") * p.visibility_for("A2");
    const StateMixture st = werner_mixture(
        k, vis, {anti_stokes_mode("A1"), anti_stokes_mode("A2")});

    const std::string tag = "swap/tau" + tau_tag(tau_ns);
    run.e_table = chsh_table(cfg, st, anti_stokes_mode("A1"), "3",
                             anti_stokes_mode("A2"), "4", tag, ts);
    run.bell = chsh(run.e_table);
    report.runs.push_back(std::move(run));
  }
  return report;
}

}  // namespace swp
