// Copyright 2026 The beg-stein Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "beg/stein.hpp"
#include "oracle/brute_force.hpp"

namespace {

using beg::ModelParams;

const double kBc = std::log(4.0);

std::vector<ModelParams> test_points() {
  return {{1.0, 0.6}, {1.0, beg::critical_K(1.0)}, {kBc, beg::critical_K(kBc)}, {0.5, 0.3}, {1.0, 1.5}, {2.0, 1.2}};
}

beg::RegressionSpec region_a_spec(const ModelParams& p, long n) {
  beg::RegressionSpec spec;
  spec.lambda = 1.0 / static_cast<double>(n);
  spec.q1 = beg::G_derivs_at_zero(p).g2 / (2.0 * p.beta * p.K);
  return spec;
}

TEST(ConditionalSteps, MatchExhaustiveEnumeration) {
  for (const auto& p : test_points()) {
    for (double gamma : {0.5, 0.25}) {
      for (int n = 1; n <= 6; ++n) {
        const auto law = beg::build_joint_law(p, n);
        const auto bf = oracle::enumerate(p.beta, p.K, n, gamma);
        for (const auto& cs : beg::conditional_step_moments(law, gamma)) {
          const auto it = bf.classes.find({static_cast<int>(cs.s), static_cast<int>(cs.M)});
          ASSERT_NE(it, bf.classes.end());
          EXPECT_NEAR(cs.step1, it->second.step1, 1e-12) << n << " " << cs.s << " " << cs.M;
          EXPECT_NEAR(cs.step2, it->second.step2, 1e-12);
          EXPECT_NEAR(cs.step2, std::pow(beg::w_scale(n, gamma), 2) * (cs.jump1 + 4 * cs.jump2), 1e-15);
        }
        EXPECT_NEAR(beg::variance_term(law, gamma), oracle::variance_term(bf), 1e-12);
        EXPECT_GE(beg::variance_term(law, gamma), 0.0);
        EXPECT_GE(beg::variance_term_F(law, gamma) + 1e-15, beg::variance_term(law, gamma));
      }
    }
  }
}

TEST(ConditionalSteps, AllZeroClassHasNoDrift) {
  const auto law = beg::build_joint_law({1.0, 0.6}, 5);
  for (const auto& cs : beg::conditional_step_moments(law, 0.5)) {
    if (cs.s == 0 && cs.M == 0) {
      EXPECT_EQ(cs.step1, 0.0);
      EXPECT_GT(cs.step2, 0.0);
    }
  }
}

TEST(ConditionalSteps, SandwichAroundSingleSpinKernel) {
  for (const auto& p : test_points()) {
    for (long n = 16; n <= 256; n *= 2) {
      const auto chk = beg::sandwich_check(beg::build_joint_law(p, n));
      EXPECT_TRUE(chk.holds) << p.beta << " " << p.K << " n=" << n;
      EXPECT_LE(chk.max_abs_log_ratio, chk.allowed);
      EXPECT_GT(chk.checked, 0);
    }
  }
}

TEST(Regression, IdentityIsExactForSmallN) {
  for (const auto& p : test_points()) {
    for (int n = 1; n <= 6; ++n) {
      const auto law = beg::build_joint_law(p, n);
      const auto dec = beg::regression_decompose(law, 0.5, region_a_spec(p, n));
      EXPECT_LT(dec.identity_residual, 1e-14);
      // Jensen: the W-conditional remainder is the smaller one in L2.
      EXPECT_LE(dec.remainder_l2, dec.remainder_l2_F + 1e-15);
    }
  }
}

TEST(Regression, RegionARemainderAndVarianceRates) {
  const ModelParams p{1.0, 0.6};
  std::vector<double> rem, var, env;
  for (long n = 64; n <= 4096; n *= 2) {
    const auto law = beg::build_joint_law(p, n);
    const auto spec = region_a_spec(p, n);
    const auto dec = beg::regression_decompose(law, 0.5, spec);
    rem.push_back(dec.remainder_l2 / spec.lambda * std::sqrt(static_cast<double>(n)));
    var.push_back(beg::variance_term(law, 0.5) * std::pow(static_cast<double>(n), 3));
    env.push_back(dec.envelope_ratio);
  }
  for (std::size_t i = 0; i < rem.size(); ++i) {
    EXPECT_LT(rem[i], 3.0 * rem.front()) << i;
    EXPECT_LT(var[i], 3.0 * var.front()) << i;
    EXPECT_LT(env[i], 3.0 * env.front()) << i;
  }
}

TEST(Bound, RegionADominatesAndDecays) {
  const ModelParams p{1.0, 0.6};
  std::vector<double> scaled;
  for (long n : {64L, 1024L}) {
    const auto law = beg::build_joint_law(p, n);
    const auto spec = region_a_spec(p, n);
    const auto density = beg::normalize_density(0.5 / beg::moment(law, 0.5, 2), 0.0, 0.0);
    const auto consts = beg::estimate_stein_constants(density, -10.0, 10.0, 0.02);
    const double sc = beg::w_scale(n, 0.5);

    // The increment can be 2 n^{gamma-1}, so A = n^{gamma-1} leaves a tail.
    const auto at_scale = beg::evaluate_bound(law, 0.5, spec, density, consts, sc);
    EXPECT_GT(at_scale.terms.tail_term, 0.0);
    EXPECT_GE(at_scale.total, at_scale.exact_dK);

    const auto r = beg::evaluate_bound(law, 0.5, spec, density, consts, 2.0 * sc * (1.0 + 1e-9));
    EXPECT_EQ(r.terms.tail_term, 0.0);
    EXPECT_NEAR(r.total, r.terms.sum(), 1e-15);
    EXPECT_GE(r.total, r.exact_dK);
    ASSERT_TRUE(r.has_normal);
    EXPECT_GE(r.normal_total, r.exact_dK);
    scaled.push_back(r.total * std::sqrt(static_cast<double>(n)));
  }
  EXPECT_LT(scaled[1], 100.0 * scaled[0]);
}

TEST(Bound, RejectsNonPositiveA) {
  const auto law = beg::build_joint_law({1.0, 0.6}, 16);
  const auto density = beg::normalize_density(0.5, 0.0, 0.0);
  beg::SteinConstants c;
  EXPECT_THROW(beg::evaluate_bound(law, 0.5, region_a_spec({1.0, 0.6}, 16), density, c, 0.0), beg::ValidationError);
}

}  // namespace
