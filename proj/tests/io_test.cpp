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

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "beg/io.hpp"

namespace {

long commas(const std::string& s) { return std::count(s.begin(), s.end(), ','); }

TEST(LawCsv, RoundTripIsExactPerAtom) {
  const auto law = beg::build_joint_law({1.0, 0.6}, 37);
  std::stringstream ss;
  beg::io::write_law_csv(ss, law, {{"source", "test"}});
  const auto back = beg::io::read_law_csv(ss);
  EXPECT_EQ(back.n(), law.n());
  EXPECT_EQ(back.params().beta, law.params().beta);
  EXPECT_EQ(back.params().K, law.params().K);
  EXPECT_EQ(back.log_partition(), law.log_partition());
  EXPECT_EQ(back.atom_count(), law.atom_count());
  law.for_each_atom([&](long s, long M, double p) { EXPECT_LE(std::abs(back.prob(s, M) - p), 1e-15 * p); });
  EXPECT_EQ(beg::moment(back, 0.5, 4), beg::moment(law, 0.5, 4));
}

TEST(LawCsv, RejectsMalformedInput) {
  std::stringstream missing("s,M,probability\n0,0,1\n");
  EXPECT_THROW(beg::io::read_law_csv(missing), beg::ValidationError);

  const auto law = beg::build_joint_law({1.0, 0.6}, 4);
  std::stringstream ss;
  beg::io::write_law_csv(ss, law);
  std::string text = ss.str() + "1,1,0.5\n";  // M repeats within slice 1
  std::stringstream bad(text);
  EXPECT_THROW(beg::io::read_law_csv(bad), beg::ValidationError);

  std::string v2 = ss.str();
  v2.replace(v2.find("/1"), 2, "/2");
  std::stringstream wrong_version(v2);
  EXPECT_THROW(beg::io::read_law_csv(wrong_version), beg::ValidationError);
}

TEST(Csv, NumbersUseSeventeenDigits) {
  EXPECT_EQ(beg::io::num(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(beg::io::num(M_PI)), M_PI);
  EXPECT_EQ(beg::io::csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(beg::io::csv_field("say \"x\", y"), "\"say \"\"x\"\", y\"");
}

TEST(DensityJson, RoundTrip) {
  const auto d = beg::normalize_density(-1.0, 0.0, 1.0);
  const auto j = beg::io::to_json(d);
  const auto back = beg::io::density_from_json(beg::io::json::parse(j.dump()));
  EXPECT_EQ(back.b1(), d.b1());
  EXPECT_EQ(back.b3(), d.b3());
  EXPECT_NEAR(back.log_norm(), d.log_norm(), 1e-14);
  EXPECT_THROW(beg::io::density_from_json(beg::io::json{{"b1", 1.0}}), beg::ValidationError);
}

TEST(BoundJson, CarriesEveryNamedTerm) {
  const auto law = beg::build_joint_law({1.0, 0.6}, 64);
  beg::RegressionSpec spec;
  spec.lambda = 1.0 / 64.0;
  spec.q1 = beg::G_derivs_at_zero({1.0, 0.6}).g2 / 1.2;
  const auto d = beg::normalize_density(0.5 / beg::moment(law, 0.5, 2), 0.0, 0.0);
  const auto k = beg::estimate_stein_constants(d, -8.0, 8.0, 0.05);
  const auto r = beg::evaluate_bound(law, 0.5, spec, d, k, beg::w_scale(64, 0.5));
  const auto j = beg::io::to_json(r);
  for (const char* key : {"variance_term", "remainder_term", "cube_term", "psi_term", "tail_term"}) {
    EXPECT_TRUE(j["terms"].contains(key)) << key;
  }
  for (const char* key : {"d1", "d2", "d3", "d4"}) EXPECT_TRUE(j["stein_constants"].contains(key)) << key;
  EXPECT_EQ(j["total"].get<double>(), r.total);
  EXPECT_TRUE(j["dominates"].get<bool>());
  EXPECT_TRUE(j.contains("normal"));
  EXPECT_EQ(commas(beg::io::bound_csv_row(r)), commas(beg::io::bound_csv_header()));
}

TEST(RateReportIo, RowsAndSummary) {
  const auto cat = beg::case_catalog();
  beg::ScanOptions opt;
  opt.law.cap = 300;
  const auto r = beg::run_case(beg::find_case(cat, "fixed-A"), {32, 64, 128, 256, 512}, opt);
  std::ostringstream os;
  beg::io::write_rate_rows(os, r);
  std::istringstream is(os.str());
  std::string line;
  int rows = 0;
  const long want = commas(beg::io::rate_csv_header());
  while (std::getline(is, line)) {
    ++rows;
    if (line.find('"') == std::string::npos) EXPECT_EQ(commas(line), want) << line;
  }
  EXPECT_EQ(rows, 5);
  const auto j = beg::io::to_json(r);
  EXPECT_EQ(j["ladder"].size(), 5u);
  EXPECT_FALSE(j["ladder"][4]["ok"].get<bool>());
  EXPECT_EQ(j["case"]["id"], "fixed-A");
  EXPECT_EQ(commas(beg::io::summary_csv_row(r)), commas(beg::io::summary_csv_header()));
}

TEST(CatalogIo, OneRowPerCase) {
  const long want = commas(beg::io::catalog_csv_header());
  int n = 0;
  for (const auto& c : beg::case_catalog()) {
    const auto row = beg::io::catalog_csv_row(c);
    if (row.find('"') == std::string::npos) EXPECT_EQ(commas(row), want) << row;
    EXPECT_EQ(beg::io::to_json(c)["id"], c.id);
    ++n;
  }
  EXPECT_EQ(n, 42);
}

TEST(ChainIo, TraceRows) {
  beg::ChainOptions opt;
  opt.sweeps = 200;
  opt.trace_every = 50;
  const auto r = beg::run_chain({1.0, 0.6}, 10, opt);
  std::ostringstream os;
  beg::io::write_chain_rows(os, 0, r);
  const std::string text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  const auto j = beg::io::to_json(r);
  EXPECT_EQ(j["moments"].size(), 9u);
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 1u);
}

}  // namespace
