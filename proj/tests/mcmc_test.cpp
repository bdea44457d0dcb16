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
#include <set>

#include <gtest/gtest.h>

#include "beg/mcmc.hpp"

namespace {

using beg::ModelParams;

TEST(Mcmc, SecondMomentAgreesWithExactLaw) {
  const ModelParams p{1.0, 0.6};
  beg::ChainOptions opt;
  opt.sweeps = 100000;
  opt.seed = 7;
  const auto r = beg::run_chain(p, 50, opt);
  const auto law = beg::build_joint_law(p, 50);
  for (int k : {2, 4}) {
    const double exact = beg::moment(law, 0.5, k);
    EXPECT_LT(std::abs(r.moment[k] - exact), 4.0 * r.moment_se[k]) << k;
    EXPECT_GT(r.moment_se[k], 0.0);
  }
  double em = 0.0;
  law.for_each_atom([&](long, long M, double q) { em += q * M / 50.0; });
  EXPECT_LT(std::abs(r.m_density - em), 4.0 * r.m_density_se);
  EXPECT_EQ(r.burn_in, 10000);
  EXPECT_GT(r.consistency_checks, 0);
}

TEST(Mcmc, SameSeedSameOutput) {
  beg::ChainOptions opt;
  opt.sweeps = 3000;
  opt.seed = 42;
  opt.trace_every = 10;
  opt.record_pmf = true;
  const auto a = beg::run_chain({1.0, 0.6}, 30, opt);
  const auto b = beg::run_chain({1.0, 0.6}, 30, opt);
  EXPECT_EQ(a.moment, b.moment);
  EXPECT_EQ(a.moment_se, b.moment_se);
  EXPECT_EQ(a.pmf, b.pmf);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].s, b.trace[i].s);
    EXPECT_EQ(a.trace[i].M, b.trace[i].M);
  }
  opt.seed = 43;
  EXPECT_NE(beg::run_chain({1.0, 0.6}, 30, opt).moment, a.moment);
}

TEST(Mcmc, PmfMatchesExactLaw) {
  const ModelParams p{1.0, 0.6};
  beg::ChainOptions opt;
  opt.sweeps = 50000;
  opt.record_pmf = true;
  const auto r = beg::run_chain(p, 20, opt);
  const auto law = beg::build_joint_law(p, 20);
  double total = 0.0, tv = 0.0;
  for (long s = -20; s <= 20; ++s) {
    total += r.pmf[static_cast<std::size_t>(s + 20)];
    tv += std::abs(r.pmf[static_cast<std::size_t>(s + 20)] - law.s_prob(s));
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_LT(0.5 * tv, 0.03);
}

TEST(Mcmc, SpinsFreezeAtZeroForLargeBeta) {
  beg::ChainOptions opt;
  opt.sweeps = 2000;
  double prev = 1.0;
  for (double beta : {1.0, 3.0, 6.0, 10.0}) {
    const double d = beg::run_chain({beta, 0.1}, 40, opt).m_density;
    EXPECT_LT(d, prev) << beta;
    prev = d;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Mcmc, Validation) {
  beg::ChainOptions opt;
  opt.sweeps = 100;
  opt.burn_in = 100;
  EXPECT_THROW(beg::run_chain({1.0, 0.6}, 10, opt), beg::ValidationError);
  opt.burn_in = 90;  // fewer measured sweeps than batches
  EXPECT_THROW(beg::run_chain({1.0, 0.6}, 10, opt), beg::ValidationError);
}

TEST(Mcmc, SeedSplitting) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) EXPECT_TRUE(seen.insert(beg::derive_seed(99, i)).second);
  EXPECT_EQ(beg::derive_seed(99, 3), beg::derive_seed(99, 3));

  beg::ChainOptions opt;
  opt.sweeps = 500;
  opt.seed = 5;
  const auto runs = beg::run_chains({1.0, 0.6}, 20, opt, 3, 2);
  ASSERT_EQ(runs.size(), 3u);
  EXPECT_EQ(runs[1].seed, beg::derive_seed(5, 1));
  opt.seed = beg::derive_seed(5, 1);
  EXPECT_EQ(beg::run_chain({1.0, 0.6}, 20, opt).moment, runs[1].moment);
}

}  // namespace
