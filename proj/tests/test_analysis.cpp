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

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "swp/analysis.hpp"
#include "swp/engines.hpp"

using namespace swp;

namespace {

std::array<CorrelationEstimate, 4> canonical_estimates(
    const std::array<double, 4>& values,
    const std::array<double, 4>& stderrs = {0, 0, 0, 0}) {
  // settings in canonical order (a,b), (a,b'), (a',b), (a',b')
  const double a[4] = {0.0, 0.0, 45.0, 45.0};
  const double b[4] = {22.5, 67.5, 22.5, 67.5};
  std::array<CorrelationEstimate, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i].value = values[i];
    out[i].stderr_ = stderrs[i];
    out[i].setting_a = {"a", BasisKind::Linear, a[i]};
    out[i].setting_b = {"b", BasisKind::Linear, b[i]};
  }
  return out;
}

}  // namespace

TEST_CASE("correlation estimator on count tables") {
  CHECK(correlation_E({100, 100, 0, 0}).value == doctest::Approx(1.0));
  CHECK(correlation_E({75, 75, 25, 25}).value == doctest::Approx(0.5));
  CHECK(correlation_E({50, 50, 50, 50}).value == doctest::Approx(0.0));
  CHECK_THROWS_AS(correlation_E({0, 0, 0, 0}), std::domain_error);

  const CorrelationEstimate e = correlation_E({75, 75, 25, 25});
  CHECK(e.stderr_ ==
        doctest::Approx(std::sqrt((1.0 - 0.25) / 200.0)).epsilon(1e-12));
  CHECK(std::abs(e.value) <= 1.0);
}

TEST_CASE("estimator consistency against the exact engine") {
  // expected counts taken straight from an exact outcome distribution must
  // reproduce the exact expectation value
  JointKet bell;
  bell.declare_mode("a");
  bell.declare_mode("b");
  const double s = std::sqrt(0.5);
  bell.add(BasisLabel{}.add_photon("a", Pol::H).add_photon("b", Pol::H), s);
  bell.add(BasisLabel{}.add_photon("a", Pol::V).add_photon("b", Pol::V), s);

  const double ta = 0.0, tb = 22.5;
  const ProjectorPair pa = analyzer_projectors({"a", BasisKind::Linear, ta});
  const ProjectorPair pb = analyzer_projectors({"b", BasisKind::Linear, tb});
  std::vector<DetectorSpec> dets = {{"Ap", "a", pa.plus, 0.3, 0, false},
                                    {"Am", "a", pa.minus, 0.3, 0, false},
                                    {"Bp", "b", pb.plus, 0.3, 0, false},
                                    {"Bm", "b", pb.minus, 0.3, 0, false}};
  const OutcomeDistribution d = outcome_distribution(bell, dets);
  CorrelationCounts c;
  c.pp = d.containing({"Ap", "Bp"});
  c.mm = d.containing({"Am", "Bm"});
  c.pm = d.containing({"Ap", "Bm"});
  c.mp = d.containing({"Am", "Bp"});
  CHECK(correlation_E(c).value ==
        doctest::Approx(oracles::pair_E_closed_form(ta, tb, 0.0)).epsilon(1e-12));
}

TEST_CASE("Monte Carlo estimates stay within four standard errors") {
  JointKet bell;
  bell.declare_mode("a");
  bell.declare_mode("b");
  const double s = std::sqrt(0.5);
  bell.add(BasisLabel{}.add_photon("a", Pol::H).add_photon("b", Pol::H), s);
  bell.add(BasisLabel{}.add_photon("a", Pol::V).add_photon("b", Pol::V), s);
  const ProjectorPair pa = analyzer_projectors({"a", BasisKind::Linear, 0.0});
  const ProjectorPair pb = analyzer_projectors({"b", BasisKind::Linear, 22.5});
  std::vector<DetectorSpec> dets = {{"Ap", "a", pa.plus, 0.3, 0, false},
                                    {"Am", "a", pa.minus, 0.3, 0, false},
                                    {"Bp", "b", pb.plus, 0.3, 0, false},
                                    {"Bm", "b", pb.minus, 0.3, 0, false}};
  const OutcomeDistribution d = outcome_distribution(bell, dets);
  const double e_exact = oracles::pair_E_closed_form(0.0, 22.5, 0.0);

  int within = 0;
  const int n_seeds = 100;
  for (int seed = 0; seed < n_seeds; ++seed) {
    const auto trials = sample_trials(d, 10000, 1000 + seed, 2);
    CorrelationCounts c;
    c.pp = static_cast<double>(coincidences(trials, {"Ap", "Bp"}));
    c.mm = static_cast<double>(coincidences(trials, {"Am", "Bm"}));
    c.pm = static_cast<double>(coincidences(trials, {"Ap", "Bm"}));
    c.mp = static_cast<double>(coincidences(trials, {"Am", "Bp"}));
    const CorrelationEstimate est = correlation_E(c);
    if (std::abs(est.value - e_exact) <= 4.0 * est.stderr_) ++within;
  }
  CHECK(within >= 99);
}

TEST_CASE("CHSH recombination of the measured swap tables") {
  SUBCASE("tau = 30 ns") {
    const BellResult r = chsh(canonical_estimates({0.55, -0.66, 0.57, 0.63}));
    CHECK(r.s == doctest::Approx(2.41).epsilon(1e-12));
    CHECK(std::abs(r.s - 2.40) <= 0.015);  // printed aggregate from rounded inputs
  }
  SUBCASE("tau = 230 ns") {
    const BellResult r = chsh(canonical_estimates({0.55, -0.67, 0.44, 0.61}));
    CHECK(r.s == doctest::Approx(2.27).epsilon(1e-12));
  }
  SUBCASE("tau = 430 ns") {
    const BellResult r = chsh(canonical_estimates({0.63, -0.59, 0.26, 0.57}));
    CHECK(r.s == doctest::Approx(2.05).epsilon(1e-12));
  }
  SUBCASE("ideal values reach the quantum bound") {
    const double e = std::sqrt(0.5);
    const BellResult r = chsh(canonical_estimates({e, -e, e, e}));
    CHECK(r.s == doctest::Approx(2.8284).epsilon(1e-4));
  }
}

TEST_CASE("CHSH propagates errors and flags violations") {
  const BellResult r = chsh(canonical_estimates({0.55, -0.66, 0.57, 0.63},
                                                {0.04, 0.05, 0.04, 0.04}));
  const double expected =
      std::sqrt(0.04 * 0.04 + 0.05 * 0.05 + 0.04 * 0.04 + 0.04 * 0.04);
  CHECK(r.stderr_ == doctest::Approx(expected).epsilon(1e-12));
  // about 5.7 standard deviations above the local bound
  CHECK(r.sigma_violation == doctest::Approx((2.41 - 2.0) / expected).epsilon(1e-9));
  CHECK(r.sigma_violation == doctest::Approx(4.8).epsilon(0.2));
}

TEST_CASE("CHSH rejects a non-canonical setting pattern") {
  auto bad = canonical_estimates({0.5, 0.5, 0.5, 0.5});
  bad[1].setting_a.theta_deg = 10.0;  // breaks the (a,b') slot
  CHECK_THROWS_AS(chsh(bad), std::domain_error);
}

TEST_CASE("GHZ witness evaluation") {
  SUBCASE("ideal GHZ expectations certify entanglement at W = -1") {
    const WitnessResult r = ghz_witness({1, 0}, {1, 0}, {1, 0}, {1, 0});
    CHECK(r.w == doctest::Approx(-1.0).epsilon(1e-12));
  }
  SUBCASE("measured expectations give W = -0.675") {
    const WitnessResult r =
        ghz_witness({0.80, 0.06}, {0.92, 0.02}, {0.89, 0.03}, {0.94, 0.02});
    CHECK(r.w == doctest::Approx(-0.675).epsilon(1e-12));
    CHECK(std::abs(r.w - (-0.68)) <= 0.005 + 1e-12);
    CHECK(r.stderr_ ==
          doctest::Approx(std::sqrt(0.06 * 0.06 +
                                    0.25 * (0.02 * 0.02 + 0.03 * 0.03 +
                                            0.02 * 0.02)))
              .epsilon(1e-12));
  }
  SUBCASE("all-zero expectations sit at the separable value") {
    const WitnessResult r = ghz_witness({0, 0}, {0, 0}, {0, 0}, {0, 0});
    CHECK(r.w == doctest::Approx(1.5));
  }
  SUBCASE("out-of-range expectations are rejected") {
    CHECK_THROWS_AS(ghz_witness({1.2, 0}, {1, 0}, {1, 0}, {1, 0}),
                    std::domain_error);
  }
}

TEST_CASE("Mermin parameter evaluation") {
  SUBCASE("ideal GHZ expectations saturate the algebraic maximum") {
    const MerminResult r = mermin({-1, 0}, {-1, 0}, {-1, 0}, {1, 0});
    CHECK(r.s_me == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("measured expectations give 3.14") {
    const MerminResult r =
        mermin({-0.77, 0.06}, {-0.77, 0.06}, {-0.80, 0.06}, {0.80, 0.06});
    CHECK(r.s_me == doctest::Approx(3.14).epsilon(1e-12));
    CHECK(r.exceeds_classical);
    CHECK(r.exceeds_tsirelson);  // above 2 sqrt 2: genuine tripartite
    CHECK(r.stderr_ == doctest::Approx(0.12).epsilon(1e-2));
    // violates local realism by ~9 standard deviations
    CHECK(r.sigma_violation == doctest::Approx(9.5).epsilon(0.05));
  }
  SUBCASE("all-zero expectations give zero") {
    const MerminResult r = mermin({0, 0}, {0, 0}, {0, 0}, {0, 0});
    CHECK(r.s_me == 0.0);
    CHECK(!r.exceeds_classical);
  }
  SUBCASE("out-of-range expectations are rejected") {
    CHECK_THROWS_AS(mermin({-2, 0}, {0, 0}, {0, 0}, {0, 0}), std::domain_error);
  }
}

TEST_CASE("joint expectation over sign patterns") {
  // two parties: counts for ++, -+, +-, -- (bit0 = first party minus)
  const JointEstimate e = joint_expectation({75, 25, 25, 75});
  CHECK(e.value == doctest::Approx(0.5));
  CHECK(e.total == doctest::Approx(200));
  CHECK_THROWS_AS(joint_expectation({0, 0, 0, 0}), std::domain_error);
}
