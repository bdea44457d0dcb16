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

#include "beg/exact_law.hpp"
#include "oracle/brute_force.hpp"

namespace {

using beg::ModelParams;

const double kBc = std::log(4.0);

std::vector<ModelParams> test_points() {
  return {{1.0, 0.6}, {1.0, beg::critical_K(1.0)}, {kBc, beg::critical_K(kBc)}, {0.5, 0.3}, {1.0, 1.5}, {2.0, 1.2}};
}

TEST(JointLaw, SingleSite) {
  const ModelParams p{1.0, 0.6};
  const auto law = beg::build_joint_law(p, 1);
  const double e = std::exp(-p.beta * (1.0 - p.K));
  EXPECT_NEAR(law.prob(0, 0), 1.0 / (1.0 + 2.0 * e), 1e-15);
  EXPECT_NEAR(law.prob(1, 1), e / (1.0 + 2.0 * e), 1e-15);
  EXPECT_NEAR(law.prob(-1, 1), e / (1.0 + 2.0 * e), 1e-15);
  EXPECT_NEAR(law.log_partition(), std::log((1.0 + 2.0 * e) / 3.0), 1e-14);
}

TEST(JointLaw, MatchesExhaustiveEnumeration) {
  for (const auto& p : test_points()) {
    for (int n = 1; n <= 8; ++n) {
      const auto law = beg::build_joint_law(p, n);
      const auto bf = oracle::enumerate(p.beta, p.K, n);
      double tv = 0.0;
      for (const auto& [key, cs] : bf.classes) tv += std::abs(cs.prob - law.prob(key.first, key.second));
      law.for_each_atom([&](long s, long M, double q) {
        if (!bf.classes.count({static_cast<int>(s), static_cast<int>(M)})) tv += q;
      });
      EXPECT_LT(0.5 * tv, 1e-12) << p.beta << " " << p.K << " n=" << n;
      EXPECT_NEAR(law.log_partition(), bf.log_partition, 1e-12);
    }
  }
}

TEST(JointLaw, NormalizedAndSymmetric) {
  for (long n : {10L, 257L, 2048L}) {
    const auto law = beg::build_joint_law({1.0, 0.9}, n);
    beg::numerics::CompensatedSum total;
    law.for_each_atom([&](long s, long M, double q) {
      total += q;
      EXPECT_EQ(q, law.prob(-s, M));
    });
    EXPECT_NEAR(total.value(), 1.0, 1e-12);
  }
}

TEST(JointLaw, CapExceeded) {
  beg::LawOptions opt;
  opt.cap = 100;
  EXPECT_THROW(beg::build_joint_law({1.0, 0.6}, 101, opt), beg::CapExceededError);
  EXPECT_THROW(beg::build_joint_law({1.0, 0.6}, 0), beg::ValidationError);
}

TEST(JointLaw, ThreadCountDoesNotChangeResult) {
  beg::LawOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = beg::build_joint_law({kBc, 1.0}, 300, one);
  const auto b = beg::build_joint_law({kBc, 1.0}, 300, four);
  ASSERT_EQ(a.atom_count(), b.atom_count());
  a.for_each_atom([&](long s, long M, double q) { EXPECT_EQ(q, b.prob(s, M)); });
}

TEST(Moments, Basics) {
  const auto law = beg::build_joint_law({1.0, 0.6}, 64);
  EXPECT_EQ(beg::moment(law, 0.5, 0), 1.0);
  for (int k : {1, 3, 5, 7}) EXPECT_LT(std::abs(beg::moment(law, 0.5, k)), 1e-14);
  EXPECT_THROW(beg::moment(law, 0.6, 2), beg::ValidationError);
  EXPECT_THROW(beg::moment(law, 0.5, 13), beg::ValidationError);
}

TEST(Moments, MatchExhaustiveOracle) {
  const ModelParams p{1.0, 0.6};
  const auto law = beg::build_joint_law(p, 4);
  const auto bf = oracle::enumerate(p.beta, p.K, 4);
  double m2 = 0.0, m4 = 0.0;
  for (const auto& [key, cs] : bf.classes) {
    const double w = key.first / std::sqrt(4.0);
    m2 += cs.prob * w * w;
    m4 += cs.prob * std::pow(w, 4);
  }
  EXPECT_NEAR(beg::moment(law, 0.5, 2), m2, 1e-12);
  EXPECT_NEAR(beg::moment(law, 0.5, 4), m4, 1e-12);
}

TEST(Moments, BoundedAlongLadderForRegionScalings) {
  struct Case {
    ModelParams p;
    double gamma;
  };
  for (const Case& c : {Case{{1.0, 0.6}, 0.5}, Case{{1.0, beg::critical_K(1.0)}, 0.25},
                        Case{{kBc, beg::critical_K(kBc)}, 1.0 / 6.0}}) {
    std::vector<double> m8;
    for (long n = 64; n <= 8192; n *= 2) m8.push_back(beg::moment(beg::build_joint_law(c.p, n), c.gamma, 8));
    const double first = m8.front();
    for (double v : m8) EXPECT_LT(v, 3.0 * first + 1.0);
  }
}

TEST(Kolmogorov, AgainstOwnCdfIsZero) {
  const auto law = beg::build_joint_law({1.0, 0.6}, 40);
  const double sc = beg::w_scale(40, 0.5);
  auto own = [&](double t) {
    double c = 0.0;
    for (long s = -law.s_max(); s <= law.s_max(); ++s) {
      if (static_cast<double>(s) * sc <= t) c += law.s_prob(s);
    }
    return c;
  };
  EXPECT_LT(beg::kolmogorov_distance(law, 0.5, own), 1e-13);
  EXPECT_NEAR(beg::kolmogorov_distance(law, 0.5, [](double) { return 1.0; }), 1.0, 1e-15);
}

TEST(Kolmogorov, MatchesDenseGridScan) {
  const auto law = beg::build_joint_law({1.0, 0.6}, 6);
  auto F = [](double t) { return beg::numerics::normal_cdf(t); };
  const double exact = beg::kolmogorov_distance(law, 0.5, F);
  // sup over a grid plus the left limits at every atom
  double scan = 0.0;
  const double sc = beg::w_scale(6, 0.5);
  const int pts = 1000000;
  for (int i = 0; i <= pts; ++i) {
    const double t = -6.0 + 12.0 * i / pts;
    double c = 0.0;
    for (long s = -6; s <= 6; ++s) {
      if (s * sc <= t) c += law.s_prob(s);
    }
    scan = std::max(scan, std::abs(c - F(t)));
  }
  EXPECT_NEAR(exact, scan, 1e-5);
  EXPECT_GE(exact + 1e-15, scan);
}

TEST(Kolmogorov, BetweenTwoLaws) {
  const auto a = beg::build_joint_law({1.0, 0.6}, 12);
  EXPECT_EQ(beg::kolmogorov_distance(a, 0.5, a, 0.5), 0.0);

  const auto b = beg::build_joint_law({0.5, 0.3}, 9);
  auto cdf = [](const beg::JointLaw& law, double t) {
    double c = 0.0;
    const double sc = beg::w_scale(law.n(), 0.5);
    for (long s = -law.n(); s <= law.n(); ++s) {
      if (s * sc <= t) c += law.s_prob(s);
    }
    return c;
  };
  // Both step functions are constant between the pooled jump points.
  std::vector<double> ts;
  for (const auto* law : {&a, &b}) {
    const double sc = beg::w_scale(law->n(), 0.5);
    for (long s = -law->n(); s <= law->n(); ++s) ts.push_back(s * sc);
  }
  double d = 0.0;
  for (double t : ts) {
    for (double u : {t, std::nextafter(t, -1e300)}) d = std::max(d, std::abs(cdf(a, u) - cdf(b, u)));
  }
  EXPECT_NEAR(beg::kolmogorov_distance(a, 0.5, b, 0.5), d, 1e-14);
  EXPECT_NEAR(beg::kolmogorov_distance(b, 0.5, a, 0.5), d, 1e-14);
}

TEST(PairCovariance, MatchesExhaustiveOracle) {
  for (const auto& p : test_points()) {
    for (int n = 2; n <= 8; ++n) {
      const auto bf = oracle::enumerate(p.beta, p.K, n);
      // E[w_1^2 w_2^2] = E[M(M-1)] / (n(n-1)), E[w_1^2] = E[M] / n
      double em = 0.0, emm = 0.0;
      for (const auto& [key, cs] : bf.classes) {
        em += cs.prob * key.second;
        emm += cs.prob * key.second * (key.second - 1);
      }
      const double cov = emm / (n * (n - 1.0)) - (em / n) * (em / n);
      EXPECT_NEAR(beg::pair_covariance(p, n), cov, 1e-12);
    }
  }
}

TEST(HsCheck, SmallErrorAndSymmetry) {
  const auto res = beg::hs_check(ModelParams{1.0, 0.6}, 1024, 0.5);
  EXPECT_LT(res.sup_error, 1e-3);
  const std::size_t m = res.t.size();
  for (std::size_t i = 0; i < m; ++i) {
    EXPECT_NEAR(res.smoothed_cdf[i] + res.smoothed_cdf[m - 1 - i], 1.0, 1e-10);
    EXPECT_NEAR(res.g_cdf[i] + res.g_cdf[m - 1 - i], 1.0, 1e-10);
  }
}

}  // namespace
