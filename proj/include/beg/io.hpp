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

#pragma once

// CSV and JSON writers. Every CSV starts with "# schema=<name>/<version>"
// followed by optional "# key=value" lines, then one header row. Numbers are
// printed with 17 significant digits.

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "beg/cases.hpp"
#include "beg/density.hpp"
#include "beg/errors.hpp"
#include "beg/exact_law.hpp"
#include "beg/mcmc.hpp"
#include "beg/rate_scan.hpp"
#include "beg/stein.hpp"

namespace beg::io {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

using Meta = std::vector<std::pair<std::string, std::string>>;

inline void write_csv_preamble(std::ostream& os, const std::string& schema, const Meta& meta = {}) {
  os << "# schema=" << schema << "/" << kSchemaVersion << "\n";
  for (const auto& [k, v] : meta) os << "# " << k << "=" << v << "\n";
}

// ---------------------------------------------------------------------------
// Joint law

inline json law_header(const JointLaw& law) {
  return {{"n", law.n()},
          {"beta", law.params().beta},
          {"K", law.params().K},
          {"log_partition", law.log_partition()},
          {"atoms", law.atom_count()}};
}

// Only s >= 0 is written; the reader restores the mirror image.
inline void write_law_csv(std::ostream& os, const JointLaw& law, const Meta& meta = {}) {
  write_csv_preamble(os, "beg.law", meta);
  os << "# header=" << law_header(law).dump() << "\n";
  os << "s,M,probability\n";
  for (long s = 0; s <= law.s_max(); ++s) {
    const auto& sl = law.slice(s);
    for (std::size_t j = 0; j < sl.prob.size(); ++j) {
      os << s << "," << sl.m_lo + 2 * static_cast<long>(j) << "," << num(sl.prob[j]) << "\n";
    }
  }
}

inline JointLaw read_law_csv(std::istream& is) {
  std::string line;
  json header;
  bool have_schema = false, have_columns = false;
  std::vector<JointLaw::Slice> slices;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# schema=beg.law/", 0) == 0) {
        if (std::stoi(line.substr(17)) != kSchemaVersion) throw ValidationError("unsupported law schema version");
        have_schema = true;
      } else if (line.rfind("# header=", 0) == 0) {
        try {
          header = json::parse(line.substr(9));
        } catch (const json::exception& e) {
          throw ValidationError(std::string("bad law header: ") + e.what());
        }
      }
      continue;
    }
    if (!have_columns) {
      if (line != "s,M,probability") throw ValidationError("law CSV: unexpected column header");
      have_columns = true;
      continue;
    }
    long s = 0, M = 0;
    double p = 0.0;
    if (std::sscanf(line.c_str(), "%ld,%ld,%lf", &s, &M, &p) != 3 || s < 0) {
      throw ValidationError("law CSV: bad row at line " + std::to_string(line_no));
    }
    if (static_cast<std::size_t>(s) >= slices.size()) slices.resize(static_cast<std::size_t>(s) + 1);
    auto& sl = slices[static_cast<std::size_t>(s)];
    if (sl.empty()) {
      sl.m_lo = M;
    } else if (M != sl.m_hi() + 2) {
      throw ValidationError("law CSV: atoms out of order at line " + std::to_string(line_no));
    }
    sl.prob.push_back(p);
  }
  if (!have_schema || header.is_null() || !have_columns) throw ValidationError("law CSV: missing schema or header");
  ModelParams params{header.at("beta").get<double>(), header.at("K").get<double>()};
  params.validate();
  return JointLaw(params, header.at("n").get<long>(), header.at("log_partition").get<double>(), std::move(slices));
}

// ---------------------------------------------------------------------------
// Densities, moments, bounds

inline json to_json(const PolyDensity& d) {
  return {{"b1", d.b1()},
          {"b2", d.b2()},
          {"b3", d.b3()},
          {"log_norm", d.log_norm()},
          {"quadrature_tol", d.quadrature_tol()}};
}

inline PolyDensity density_from_json(const json& j) {
  try {
    return normalize_density(j.at("b1").get<double>(), j.at("b2").get<double>(), j.at("b3").get<double>(),
                             j.value("quadrature_tol", 1e-12));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad density record: ") + e.what());
  }
}

inline json to_json(const MomentSet& m) {
  json j = {{"n", m.n}, {"gamma", m.gamma}};
  json arr = json::array();
  for (int k = 0; k <= 8; ++k) arr.push_back(m[k]);
  j["moments"] = arr;
  return j;
}

inline json to_json(const SteinConstants& c) {
  return {{"d1", c.d1}, {"d2", c.d2}, {"d3", c.d3}, {"d4", c.d4}, {"grid", c.grid_spec()}};
}

inline json to_json(const BoundTerms& t) {
  return {{"variance_term", t.variance_term},
          {"remainder_term", t.remainder_term},
          {"cube_term", t.cube_term},
          {"psi_term", t.psi_term},
          {"tail_term", t.tail_term}};
}

inline json to_json(const BoundReport& r) {
  json j = {{"n", r.n},
            {"gamma", r.gamma},
            {"A", r.A_halfwidth},
            {"total", r.total},
            {"exact_dK", r.exact_dK},
            {"dominates", r.total >= r.exact_dK},
            {"terms", to_json(r.terms)},
            {"lambda", r.lambda},
            {"kappa", r.kappa},
            {"lambda_tilde", r.lambda_tilde},
            {"variance", r.variance},
            {"remainder_l2", r.remainder_l2},
            {"remainder_max", r.remainder_max},
            {"ew2", r.ew2},
            {"e_abs_psi", r.e_abs_psi},
            {"tail_moment", r.tail_moment},
            {"stein_constants", to_json(r.consts)}};
  if (r.has_normal) {
    j["normal"] = {{"sigma2", r.sigma2}, {"A", r.normal_A}, {"terms", to_json(r.normal_terms)},
                   {"total", r.normal_total}};
  }
  return j;
}

inline std::string bound_csv_header() {
  return "n,gamma,A,exact_dK,total,variance_term,remainder_term,cube_term,psi_term,tail_term,normal_total";
}

inline std::string bound_csv_row(const BoundReport& r) {
  std::ostringstream os;
  os << r.n << "," << num(r.gamma) << "," << num(r.A_halfwidth) << "," << num(r.exact_dK) << "," << num(r.total)
     << "," << num(r.terms.variance_term) << "," << num(r.terms.remainder_term) << "," << num(r.terms.cube_term)
     << "," << num(r.terms.psi_term) << "," << num(r.terms.tail_term) << ","
     << (r.has_normal ? num(r.normal_total) : std::string());
  return os.str();
}

// ---------------------------------------------------------------------------
// Cases and rate scans

inline std::string pattern_string(const std::array<bool, 3>& p) {
  std::string s;
  if (p[0]) s += "x2";
  if (p[1]) s += s.empty() ? "x4" : "+x4";
  if (p[2]) s += s.empty() ? "x6" : "+x6";
  return s;
}

inline json to_json(const CaseSpec& c) {
  json j = {{"id", c.id},
            {"theorem", std::string(to_string(c.theorem))},
            {"subcase", c.subcase},
            {"gamma", c.gamma},
            {"pattern", pattern_string(c.pattern)},
            {"validity", c.validity},
            {"predicted_exponent", c.predicted_exponent},
            {"ladder", c.ladder}};
  if (c.fixed()) {
    j["params"] = {{"beta", c.params.beta}, {"K", c.params.K}};
  } else {
    const Schedule& s = c.schedule;
    j["schedule"] = {{"mode", std::string(to_string(s.mode))},
                     {"beta", s.beta_fixed},
                     {"K", s.K_target},
                     {"b", s.b},
                     {"k", s.k},
                     {"delta1", s.delta1},
                     {"delta2", s.delta2}};
  }
  return j;
}

inline std::string catalog_csv_header() {
  return "id,theorem,subcase,gamma,pattern,predicted_exponent,mode,beta,K,b,k,delta1,delta2,validity";
}

inline std::string catalog_csv_row(const CaseSpec& c) {
  std::ostringstream os;
  os << csv_field(c.id) << "," << to_string(c.theorem) << "," << csv_field(c.subcase) << "," << num(c.gamma) << ","
     << pattern_string(c.pattern) << "," << num(c.predicted_exponent) << ",";
  if (c.fixed()) {
    os << "fixed," << num(c.params.beta) << "," << num(c.params.K) << ",,,,";
  } else {
    const Schedule& s = c.schedule;
    os << to_string(s.mode) << "," << num(s.beta_fixed) << "," << num(s.K_target) << "," << num(s.b) << ","
       << num(s.k) << "," << num(s.delta1) << "," << num(s.delta2);
  }
  os << "," << csv_field(c.validity);
  return os.str();
}

inline json to_json(const LadderPoint& p) {
  json j = {{"n", p.n}, {"beta", p.params.beta}, {"K", p.params.K}, {"ok", p.ok}};
  if (!p.ok) {
    j["error"] = p.error;
    return j;
  }
  j["dK"] = p.dK;
  j["moments"] = to_json(p.moments)["moments"];
  j["density"] = {{"b1", p.density.b1}, {"b2", p.density.b2}, {"b3", p.density.b3}, {"kappa", p.density.kappa}};
  if (p.bound) j["bound"] = to_json(*p.bound);
  if (p.bound_tail_free) j["bound_tail_free"] = to_json(*p.bound_tail_free);
  return j;
}

inline json to_json(const RateReport& r) {
  json j = {{"case", to_json(r.spec)}, {"predicted", r.predicted}, {"fitted", r.fitted}};
  if (r.fitted) {
    j["fit"] = {{"slope", r.fit.slope}, {"intercept", r.fit.intercept}, {"r_squared", r.fit.r_squared}};
    j["scaled_first"] = r.scaled_first;
    j["scaled_max"] = r.scaled_max;
  } else {
    j["fit_error"] = r.fit_error;
  }
  j["slope_ok"] = r.slope_ok;
  j["bounded_ok"] = r.bounded_ok;
  j["dominance_ok"] = r.dominance_ok;
  j["passed"] = r.passed();
  json pts = json::array();
  for (const auto& p : r.ladder) pts.push_back(to_json(p));
  j["ladder"] = pts;
  return j;
}

inline std::string rate_csv_header() {
  return "case,n,beta,K,ok,dK,m2,m4,m6,b1,b2,b3,bound_total,bound_tail_free_total,error";
}

inline void write_rate_rows(std::ostream& os, const RateReport& r) {
  for (const auto& p : r.ladder) {
    os << csv_field(r.spec.id) << "," << p.n << "," << num(p.params.beta) << "," << num(p.params.K) << ","
       << (p.ok ? 1 : 0) << ",";
    if (p.ok) {
      os << num(p.dK) << "," << num(p.moments[2]) << "," << num(p.moments[4]) << "," << num(p.moments[6]) << ","
         << num(p.density.b1) << "," << num(p.density.b2) << "," << num(p.density.b3) << ","
         << (p.bound ? num(p.bound->total) : std::string()) << ","
         << (p.bound_tail_free ? num(p.bound_tail_free->total) : std::string()) << ",";
    } else {
      os << ",,,,,,,,,";
    }
    os << csv_field(p.error) << "\n";
  }
}

inline std::string summary_csv_header() {
  return "case,theorem,gamma,predicted,slope,intercept,r_squared,scaled_first,scaled_max,slope_ok,bounded_ok,"
         "dominance_ok,passed";
}

inline std::string summary_csv_row(const RateReport& r) {
  std::ostringstream os;
  os << csv_field(r.spec.id) << "," << to_string(r.spec.theorem) << "," << num(r.spec.gamma) << ","
     << num(r.predicted) << ",";
  if (r.fitted) {
    os << num(r.fit.slope) << "," << num(r.fit.intercept) << "," << num(r.fit.r_squared) << ","
       << num(r.scaled_first) << "," << num(r.scaled_max);
  } else {
    os << ",,,,";
  }
  os << "," << r.slope_ok << "," << r.bounded_ok << "," << r.dominance_ok << "," << r.passed();
  return os.str();
}

// ---------------------------------------------------------------------------
// MCMC

inline std::string chain_csv_header() { return "chain,sweep,s,M,w,w2,w3,w4"; }

inline void write_chain_rows(std::ostream& os, int chain, const ChainResult& r) {
  for (const TraceRow& t : r.trace) {
    const double w2 = t.w * t.w;
    os << chain << "," << t.sweep << "," << t.s << "," << t.M << "," << num(t.w) << "," << num(w2) << ","
       << num(w2 * t.w) << "," << num(w2 * w2) << "\n";
  }
}

inline json to_json(const ChainResult& r) {
  json mom = json::array(), se = json::array();
  for (int k = 0; k <= 8; ++k) {
    mom.push_back(r.moment[static_cast<std::size_t>(k)]);
    se.push_back(r.moment_se[static_cast<std::size_t>(k)]);
  }
  json j = {{"n", r.n},
            {"beta", r.params.beta},
            {"K", r.params.K},
            {"gamma", r.gamma},
            {"seed", r.seed},
            {"sweeps", r.sweeps},
            {"burn_in", r.burn_in},
            {"moments", mom},
            {"moment_se", se},
            {"m_density", r.m_density},
            {"m_density_se", r.m_density_se},
            {"consistency_checks", r.consistency_checks}};
  if (!r.pmf.empty()) j["pmf"] = r.pmf;
  return j;
}

}  // namespace beg::io
