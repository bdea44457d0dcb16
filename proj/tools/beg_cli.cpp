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

// beg_cli: one subcommand per module. Output goes to --output (default
// stdout) as CSV or JSON; errors are a single JSON line on stderr with exit
// code 2 (bad input) or 3 (computation failed).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beg/beg.hpp"

namespace {

using beg::io::json;
using beg::io::Meta;
using beg::io::num;

// ---------------------------------------------------------------------------
// Option plumbing: every bound option is also recorded so the resolved
// configuration can be echoed into the output header.

struct Echo {
  std::vector<std::pair<std::string, std::function<std::string()>>> items;

  Meta resolve() const {
    Meta m;
    for (const auto& [k, f] : items) m.emplace_back(k, f());
    return m;
  }
};

std::string show(double v) { return num(v); }
std::string show(long v) { return std::to_string(v); }
std::string show(int v) { return std::to_string(v); }
std::string show(unsigned v) { return std::to_string(v); }
std::string show(std::uint64_t v) { return std::to_string(v); }
std::string show(bool v) { return v ? "true" : "false"; }
std::string show(const std::string& v) { return v; }
std::string show(const std::vector<long>& v) {
  std::string s;
  for (long x : v) s += (s.empty() ? "" : ";") + std::to_string(x);
  return s;
}

struct Binder {
  CLI::App* app;
  Echo* echo;

  template <class T>
  CLI::Option* opt(const std::string& name, T& v, const std::string& desc) {
    echo->items.emplace_back(name, [&v] { return show(v); });
    return app->add_option("--" + name, v, desc);
  }
  CLI::Option* flag(const std::string& name, bool& v, const std::string& desc) {
    echo->items.emplace_back(name, [&v] { return show(v); });
    return app->add_flag("--" + name, v, desc);
  }
};

struct Common {
  std::string output;
  std::string format = "csv";
  unsigned threads = 0;
  std::uint64_t seed = 1;
  std::string config;
};

void add_common(Binder& b, Common& c) {
  b.opt("format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  b.opt("output", c.output, "output path (default stdout)");
  b.opt("threads", c.threads, "worker cap, 0 = hardware concurrency");
  b.opt("seed", c.seed, "64-bit master seed");
  b.app->add_option("--config", c.config, "key=value file; flags override it");
}

// Result of one command: CSV text or JSON document plus metadata.
struct Artifact {
  std::string schema;
  Meta meta;                 // computed header values
  std::string csv_columns;   // header row
  std::ostringstream rows;   // CSV body
  json doc = json::object(); // JSON payload
};

std::string render(const std::string& command, const Common& c, const Meta& config, Artifact& a) {
  std::ostringstream os;
  if (c.format == "json") {
    json out = {{"schema", a.schema}, {"version", beg::io::kSchemaVersion}, {"command", command}};
    json cfg = json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    out["config"] = cfg;
    for (auto it = a.doc.begin(); it != a.doc.end(); ++it) out[it.key()] = it.value();
    os << out.dump(2) << "\n";
  } else {
    Meta meta{{"command", command}};
    for (const auto& kv : config) meta.emplace_back("config." + kv.first, kv.second);
    meta.insert(meta.end(), a.meta.begin(), a.meta.end());
    beg::io::write_csv_preamble(os, a.schema, meta);
    os << a.csv_columns << "\n" << a.rows.str();
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Subcommands

struct ParamOpts {
  long n = 64;
  double beta = 1.0;
  double K = 0.6;
  double gamma = 0.5;
  long cap = 20000;
};

void add_law_opts(Binder& b, ParamOpts& p) {
  b.opt("n", p.n, "number of spins");
  b.opt("beta", p.beta, "inverse temperature");
  b.opt("K", p.K, "interaction strength");
  b.opt("gamma", p.gamma, "W = S / n^(1-gamma)");
  b.opt("cap", p.cap, "largest n for exact enumeration");
}

beg::LawOptions law_options(const ParamOpts& p, unsigned threads) {
  beg::LawOptions o;
  o.cap = p.cap;
  o.threads = threads;
  return o;
}

json moments_json(const beg::MomentSet& m) { return beg::io::to_json(m)["moments"]; }

void moments_meta(Meta& meta, const beg::MomentSet& m) {
  for (int k = 2; k <= 8; k += 2) meta.emplace_back("E[W^" + std::to_string(k) + "]", num(m[k]));
}

// --- phase-diagram

struct PhaseOpts {
  double beta_min = 0.2;
  double beta_max = 3.0;
  long points = 57;
};

void run_phase(const PhaseOpts& o, Artifact& a) {
  if (!(o.beta_min > 0.0) || !(o.beta_max > o.beta_min) || o.points < 2) {
    throw beg::ValidationError("phase-diagram needs 0 < beta-min < beta-max and points >= 2");
  }
  a.schema = "beg.phase-diagram";
  const double bc = beg::kBetaCritical;
  a.meta = {{"beta_c", num(bc)}, {"K_c(beta_c)", num(beg::critical_K(bc))}};
  a.csv_columns = "beta,K_c,K_boundary,transition";
  json rows = json::array();
  for (long i = 0; i < o.points; ++i) {
    const double beta = o.beta_min + (o.beta_max - o.beta_min) * static_cast<double>(i) / (o.points - 1);
    const double kc = beg::critical_K(beta);
    std::string kind = "second-order";
    double kb = kc;
    if (std::abs(beta - bc) <= 1e-12) {
      kind = "tricritical";
    } else if (beta > bc) {
      kind = "first-order";
      kb = beg::first_order_K(beta);
    }
    a.rows << num(beta) << "," << num(kc) << "," << num(kb) << "," << kind << "\n";
    rows.push_back({{"beta", beta}, {"K_c", kc}, {"K_boundary", kb}, {"transition", kind}});
  }
  a.doc["beta_c"] = bc;
  a.doc["K_c_beta_c"] = beg::critical_K(bc);
  a.doc["curve"] = rows;
}

// --- exact-law

// Exhaustive 3^n enumeration collapsed onto (s, M); independent of the
// library's counting construction.
std::map<std::pair<long, long>, double> brute_force_law(double beta, double K, long n) {
  if (n > 14) throw beg::ValidationError("--check-bruteforce needs n <= 14");
  std::vector<int> w(static_cast<std::size_t>(n), -1);
  std::vector<double> all;
  std::vector<std::pair<long, long>> keys;
  while (true) {
    long s = 0, m = 0;
    for (int x : w) {
      s += x;
      m += x * x;
    }
    const double h = static_cast<double>(m) - K * static_cast<double>(s * s) / static_cast<double>(n);
    all.push_back(-beta * h);
    keys.emplace_back(s, m);
    std::size_t i = 0;
    while (i < w.size() && w[i] == 1) w[i++] = -1;
    if (i == w.size()) break;
    ++w[i];
  }
  const double mx = *std::max_element(all.begin(), all.end());
  double z = 0.0;
  for (double v : all) z += std::exp(v - mx);
  std::map<std::pair<long, long>, double> out;
  for (std::size_t i = 0; i < all.size(); ++i) out[keys[i]] += std::exp(all[i] - mx) / z;
  return out;
}

struct ExactOpts {
  ParamOpts p;
  bool check = false;
  bool no_atoms = false;
};

void run_exact(const ExactOpts& o, unsigned threads, Artifact& a) {
  const auto law = beg::build_joint_law({o.p.beta, o.p.K}, o.p.n, law_options(o.p, threads));
  const auto m = beg::moments(law, o.p.gamma);
  a.schema = "beg.law";
  a.meta = {{"n", show(law.n())}, {"log_partition", num(law.log_partition())}, {"atoms", show(static_cast<long>(law.atom_count()))}};
  moments_meta(a.meta, m);
  a.doc["n"] = law.n();
  a.doc["log_partition"] = law.log_partition();
  a.doc["moments"] = moments_json(m);
  if (o.check) {
    const auto bf = brute_force_law(o.p.beta, o.p.K, o.p.n);
    double tv = 0.0;
    for (const auto& [key, q] : bf) tv += std::abs(law.prob(key.first, key.second) - q);
    law.for_each_atom([&](long s, long M, double p) {
      if (!bf.count({s, M})) tv += p;
    });
    tv *= 0.5;
    a.meta.emplace_back("bruteforce_tv", num(tv));
    a.doc["bruteforce_tv"] = tv;
    if (!(tv < 1e-12)) throw beg::ComputationError("enumeration disagrees with brute force, TV = " + num(tv));
  }
  a.csv_columns = "s,M,probability";
  json atoms = json::array();
  if (!o.no_atoms) {
    law.for_each_atom([&](long s, long M, double p) {
      a.rows << s << "," << M << "," << num(p) << "\n";
      atoms.push_back({s, M, p});
    });
    a.doc["atoms"] = atoms;
  }
}

// --- densities from flags or a catalog case

struct DensityOpts {
  double b1 = 0.5, b2 = 0.0, b3 = 0.0;
  std::string case_id;
  long n = 1024;
};

void add_density_opts(Binder& b, DensityOpts& d) {
  b.opt("b1", d.b1, "x^2 coefficient");
  b.opt("b2", d.b2, "x^4 coefficient");
  b.opt("b3", d.b3, "x^6 coefficient");
  b.opt("case", d.case_id, "catalog case; its comparison density at --n replaces b1..b3");
}

struct CaseContext {
  std::optional<beg::JointLaw> law;
  beg::CaseSpec spec;
  beg::ModelParams params;
  beg::RegressionSpec regression;
  beg::MomentSet moments;
};

CaseContext case_context(const std::string& id, long n, long cap, unsigned threads) {
  const auto cat = beg::case_catalog();
  CaseContext c;
  c.spec = beg::find_case(cat, id);
  c.params = c.spec.params_at(n);
  beg::LawOptions lo;
  lo.cap = cap;
  lo.threads = threads;
  c.law = beg::build_joint_law(c.params, n, lo);
  c.moments = beg::moments(*c.law, c.spec.gamma);
  c.regression = beg::regression_spec(c.spec, c.params, n);
  return c;
}

beg::PolyDensity density_from(const DensityOpts& d, long cap, unsigned threads, Meta& meta) {
  if (d.case_id.empty()) return beg::normalize_density(d.b1, d.b2, d.b3);
  const auto c = case_context(d.case_id, d.n, cap, threads);
  meta.emplace_back("case.beta_n", num(c.params.beta));
  meta.emplace_back("case.K_n", num(c.params.K));
  return beg::build_comparison_density(c.spec, c.regression, c.moments);
}

// --- limit-density

struct LimitOpts {
  DensityOpts d;
  long cap = 20000;
  double x_min = -4.0, x_max = 4.0;
  long points = 81;
  bool stein = false;
  double stein_lo = -10.0, stein_hi = 10.0, stein_step = 0.01;
};

void run_limit(const LimitOpts& o, unsigned threads, Artifact& a) {
  if (!(o.x_max > o.x_min) || o.points < 2) throw beg::ValidationError("grid needs x-min < x-max and points >= 2");
  a.schema = "beg.density";
  const auto d = density_from(o.d, o.cap, threads, a.meta);
  const json rec = beg::io::to_json(d);
  for (auto it = rec.begin(); it != rec.end(); ++it) a.meta.emplace_back(it.key(), num(it.value().get<double>()));
  json mom = json::array();
  for (int k = 2; k <= 8; k += 2) {
    a.meta.emplace_back("E[X^" + std::to_string(k) + "]", num(d.moment(k)));
    mom.push_back(d.moment(k));
  }
  a.doc["density"] = rec;
  a.doc["moments_2_4_6_8"] = mom;
  if (o.stein) {
    const auto k = beg::estimate_stein_constants(d, o.stein_lo, o.stein_hi, o.stein_step, threads);
    for (const auto& [name, v] : {std::pair{"d1", k.d1}, {"d2", k.d2}, {"d3", k.d3}, {"d4", k.d4}}) {
      a.meta.emplace_back(name, num(v));
    }
    a.doc["stein_constants"] = beg::io::to_json(k);
  }
  a.csv_columns = "x,pdf,cdf,psi";
  json grid = json::array();
  for (long i = 0; i < o.points; ++i) {
    const double x = o.x_min + (o.x_max - o.x_min) * static_cast<double>(i) / (o.points - 1);
    a.rows << num(x) << "," << num(d.pdf(x)) << "," << num(d.cdf(x)) << "," << num(d.psi(x)) << "\n";
    grid.push_back({x, d.pdf(x), d.cdf(x), d.psi(x)});
  }
  a.doc["grid"] = grid;
}

// --- kolmogorov

struct KolmOpts {
  ParamOpts p;
  std::string against = "self";
  long n2 = 0;
  double beta2 = 0.0, K2 = 0.0, gamma2 = 0.0;
  DensityOpts d;
};

void run_kolm(const KolmOpts& o, unsigned threads, Artifact& a) {
  a.schema = "beg.kolmogorov";
  const auto lo = law_options(o.p, threads);
  double dk = 0.0;
  beg::ModelParams used{o.p.beta, o.p.K};
  double gamma = o.p.gamma;
  if (o.against == "case") {
    if (o.d.case_id.empty()) throw beg::ValidationError("--against case needs --case");
    const auto c = case_context(o.d.case_id, o.p.n, o.p.cap, threads);
    const auto dens = beg::build_comparison_density(c.spec, c.regression, c.moments);
    used = c.params;
    gamma = c.spec.gamma;
    dk = beg::kolmogorov_distance(*c.law, gamma, [&](double t) { return dens.cdf(t); });
  } else {
    const auto law = beg::build_joint_law(used, o.p.n, lo);
    if (o.against == "self") {
      dk = beg::kolmogorov_distance(law, gamma, law, gamma);
    } else if (o.against == "law") {
      const beg::ModelParams q{o.beta2 > 0.0 ? o.beta2 : o.p.beta, o.K2 > 0.0 ? o.K2 : o.p.K};
      const auto other = beg::build_joint_law(q, o.n2 > 0 ? o.n2 : o.p.n, lo);
      dk = beg::kolmogorov_distance(law, gamma, other, o.gamma2 > 0.0 ? o.gamma2 : gamma);
    } else {
      const auto dens = beg::normalize_density(o.d.b1, o.d.b2, o.d.b3);
      dk = beg::kolmogorov_distance(law, gamma, [&](double t) { return dens.cdf(t); });
    }
  }
  a.csv_columns = "against,n,beta,K,gamma,dK";
  a.rows << o.against << "," << o.p.n << "," << num(used.beta) << "," << num(used.K) << "," << num(gamma) << ","
         << num(dk) << "\n";
  a.doc["against"] = o.against;
  a.doc["beta"] = used.beta;
  a.doc["K"] = used.K;
  a.doc["gamma"] = gamma;
  a.doc["dK"] = dk;
}

// --- stein-bound

struct BoundOpts {
  std::string case_id = "fixed-A";
  long n = 256;
  long cap = 20000;
  double A = 0.0;
  bool tail_free = false;
  double stein_lo = -10.0, stein_hi = 10.0, stein_step = 0.005;
};

void run_bound(const BoundOpts& o, unsigned threads, Artifact& a) {
  a.schema = "beg.stein-bound";
  const auto c = case_context(o.case_id, o.n, o.cap, threads);
  const auto dens = beg::build_comparison_density(c.spec, c.regression, c.moments);
  const auto k = beg::estimate_stein_constants(dens, o.stein_lo, o.stein_hi, o.stein_step, threads);
  double A = o.A;
  if (A == 0.0) A = o.tail_free ? beg::tail_free_A(o.n, c.spec.gamma) : beg::w_scale(o.n, c.spec.gamma);
  const auto r = beg::evaluate_bound(*c.law, c.spec.gamma, c.regression, dens, k, A, threads);
  a.meta = {{"case", c.spec.id}, {"beta_n", num(c.params.beta)}, {"K_n", num(c.params.K)},
            {"d1", num(k.d1)},   {"d2", num(k.d2)},             {"d3", num(k.d3)},
            {"d4", num(k.d4)},   {"dominates", show(r.total >= r.exact_dK)}};
  a.csv_columns = beg::io::bound_csv_header();
  a.rows << beg::io::bound_csv_row(r) << "\n";
  a.doc["case"] = c.spec.id;
  a.doc["beta_n"] = c.params.beta;
  a.doc["K_n"] = c.params.K;
  a.doc["bound"] = beg::io::to_json(r);
}

// --- rate-scan

struct ScanOpts {
  std::string case_id;
  bool all = false;
  bool with_bounds = false;
  std::vector<long> ladder;
  long cap = 20000;
  double stein_step = 0.005;
  std::string detail;
};

void run_scan(const ScanOpts& o, unsigned threads, Artifact& a) {
  if (o.all == !o.case_id.empty()) throw beg::ValidationError("rate-scan needs exactly one of --case or --all");
  auto cat = beg::case_catalog();
  std::vector<beg::CaseSpec> cases;
  if (o.all) {
    cases = cat;
  } else {
    cases.push_back(beg::find_case(cat, o.case_id));
  }
  std::sort(cases.begin(), cases.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  beg::ScanOptions so;
  so.law.cap = o.cap;
  so.with_bounds = o.with_bounds;
  so.stein_step = o.stein_step;
  std::vector<beg::RateReport> reports(cases.size());
  const unsigned outer = cases.size() > 1 ? threads : 1;
  so.threads = cases.size() > 1 ? 1 : threads;
  beg::numerics::parallel_for(cases.size(), outer, [&](std::size_t i) {
    reports[i] = o.ladder.empty() ? beg::run_case(cases[i], so) : beg::run_case(cases[i], o.ladder, so);
  });

  a.schema = "beg.rate-scan";
  int passed = 0, dominated = 0;
  for (const auto& r : reports) {
    passed += r.passed();
    dominated += r.dominance_ok;
  }
  a.meta = {{"cases", show(static_cast<long>(reports.size()))}, {"cases_passed", show(passed)}};
  if (o.with_bounds) a.meta.emplace_back("cases_dominated", show(dominated));
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(beg::io::to_json(r));
  a.doc["reports"] = arr;
  a.doc["summary"] = {{"cases", reports.size()}, {"passed", passed}, {"dominance_ok", dominated}};

  std::ostringstream detail;
  for (const auto& r : reports) beg::io::write_rate_rows(detail, r);
  if (o.all) {
    a.csv_columns = beg::io::summary_csv_header();
    for (const auto& r : reports) a.rows << beg::io::summary_csv_row(r) << "\n";
  } else {
    const auto& r = reports.front();
    if (!r.fitted) throw beg::ComputationError("case " + r.spec.id + " not fitted (" + r.fit_error + ")");
    {
      a.meta.emplace_back("slope", num(r.fit.slope));
      a.meta.emplace_back("r_squared", num(r.fit.r_squared));
    }
    a.meta.emplace_back("predicted", num(r.predicted));
    a.meta.emplace_back("passed", show(r.passed()));
    a.csv_columns = beg::io::rate_csv_header();
    a.rows << detail.str();
  }
  if (!o.detail.empty()) {
    std::ofstream f(o.detail);
    if (!f) throw beg::ValidationError("cannot open " + o.detail);
    beg::io::write_csv_preamble(f, "beg.rate-scan.rows");
    f << beg::io::rate_csv_header() << "\n" << detail.str();
  }
}

// --- mcmc

struct McmcOpts {
  ParamOpts p;
  long sweeps = 100000;
  long burn_in = -1;
  int chains = 1;
  long trace_every = 100;
  bool pmf = false;
  bool compare_exact = false;
};

void run_mcmc(const McmcOpts& o, const Common& c, unsigned threads, Artifact& a) {
  beg::ChainOptions co;
  co.sweeps = o.sweeps;
  co.burn_in = o.burn_in;
  co.seed = c.seed;
  co.gamma = o.p.gamma;
  co.record_pmf = o.pmf;
  co.trace_every = o.trace_every;
  const auto runs = beg::run_chains({o.p.beta, o.p.K}, o.p.n, co, o.chains, threads);
  a.schema = "beg.mcmc";
  a.csv_columns = beg::io::chain_csv_header();
  std::array<double, 9> exact{};
  if (o.compare_exact) {
    const auto m = beg::moments(beg::build_joint_law({o.p.beta, o.p.K}, o.p.n, law_options(o.p, threads)), o.p.gamma);
    for (int k = 0; k <= 8; ++k) exact[static_cast<std::size_t>(k)] = m[k];
  }
  json chains = json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    const std::string pre = "chain" + std::to_string(i) + ".";
    a.meta.emplace_back(pre + "seed", show(r.seed));
    json j = beg::io::to_json(r);
    for (int k : {2, 4}) {
      const auto ku = static_cast<std::size_t>(k);
      a.meta.emplace_back(pre + "E[W^" + std::to_string(k) + "]", num(r.moment[ku]));
      a.meta.emplace_back(pre + "se[W^" + std::to_string(k) + "]", num(r.moment_se[ku]));
      if (o.compare_exact) {
        const double z = (r.moment[ku] - exact[ku]) / r.moment_se[ku];
        a.meta.emplace_back(pre + "z[W^" + std::to_string(k) + "]", num(z));
        j["exact_m" + std::to_string(k)] = exact[ku];
        j["z_m" + std::to_string(k)] = z;
      }
    }
    a.meta.emplace_back(pre + "E[M/n]", num(r.m_density));
    beg::io::write_chain_rows(a.rows, static_cast<int>(i), r);
    chains.push_back(j);
  }
  a.doc["chains"] = chains;
}

// --- case-catalog

void run_catalog(Artifact& a) {
  a.schema = "beg.case-catalog";
  a.csv_columns = beg::io::catalog_csv_header();
  json arr = json::array();
  for (const auto& c : beg::case_catalog()) {
    a.rows << beg::io::catalog_csv_row(c) << "\n";
    arr.push_back(beg::io::to_json(c));
  }
  a.meta = {{"cases", show(static_cast<long>(arr.size()))}};
  a.doc["cases"] = arr;
}

// ---------------------------------------------------------------------------

void error_record(const std::string& kind, int code, const std::string& msg) {
  std::cerr << json{{"error", {{"kind", kind}, {"exit_code", code}, {"message", msg}}}}.dump() << std::endl;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw beg::ValidationError("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int no = 0;
  while (std::getline(f, line)) {
    ++no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw beg::ValidationError(path + ":" + std::to_string(no) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

struct Cli {
  CLI::App app{"Mean-field Blume-Emery-Griffiths model: exact laws, limit densities, Stein bounds"};
  Common common;
  std::map<std::string, Echo> echo;
  PhaseOpts phase;
  ExactOpts exact;
  LimitOpts limit;
  KolmOpts kolm;
  BoundOpts bound;
  ScanOpts scan;
  McmcOpts mcmc;

  Cli() {
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    auto sub = [&](const std::string& name, const std::string& desc) {
      Binder b{app.add_subcommand(name, desc), &echo[name]};
      add_common(b, common);
      return b;
    };

    auto b = sub("phase-diagram", "sample K_c(beta) and the first-order curve on a beta grid");
    b.opt("beta-min", phase.beta_min, "first beta");
    b.opt("beta-max", phase.beta_max, "last beta");
    b.opt("points", phase.points, "grid size");

    b = sub("exact-law", "exact joint law of (S_n, M_n)");
    add_law_opts(b, exact.p);
    b.flag("check-bruteforce", exact.check, "compare with 3^n enumeration (n <= 14)");
    b.flag("no-atoms", exact.no_atoms, "omit the atom table");

    b = sub("limit-density", "normalized density exp(-(b1 x^2 + b2 x^4 + b3 x^6))");
    add_density_opts(b, limit.d);
    b.opt("n", limit.d.n, "n for --case");
    b.opt("cap", limit.cap, "largest n for exact enumeration");
    b.opt("x-min", limit.x_min, "grid start");
    b.opt("x-max", limit.x_max, "grid end");
    b.opt("points", limit.points, "grid size");
    b.flag("stein", limit.stein, "estimate Stein constants d1..d4");
    b.opt("stein-lo", limit.stein_lo, "Stein grid start");
    b.opt("stein-hi", limit.stein_hi, "Stein grid end");
    b.opt("stein-step", limit.stein_step, "Stein grid step");

    b = sub("kolmogorov", "exact Kolmogorov distance of W_gamma to another law or density");
    add_law_opts(b, kolm.p);
    b.opt("against", kolm.against, "self, law, density or case")
        ->check(CLI::IsMember({"self", "law", "density", "case"}));
    b.opt("n2", kolm.n2, "second law n (default --n)");
    b.opt("beta2", kolm.beta2, "second law beta (default --beta)");
    b.opt("K2", kolm.K2, "second law K (default --K)");
    b.opt("gamma2", kolm.gamma2, "second law gamma (default --gamma)");
    add_density_opts(b, kolm.d);

    b = sub("stein-bound", "Stein bound terms against the exact distance for one case and n");
    b.opt("case", bound.case_id, "catalog case id");
    b.opt("n", bound.n, "number of spins");
    b.opt("cap", bound.cap, "largest n for exact enumeration");
    b.opt("A", bound.A, "truncation half-width, 0 = n^(gamma-1)");
    b.flag("tail-free", bound.tail_free, "with A = 0, use A just above 2 n^(gamma-1)");
    b.opt("stein-lo", bound.stein_lo, "Stein grid start");
    b.opt("stein-hi", bound.stein_hi, "Stein grid end");
    b.opt("stein-step", bound.stein_step, "Stein grid step");

    b = sub("rate-scan", "n-ladder rate experiments");
    b.opt("case", scan.case_id, "catalog case id");
    b.flag("all", scan.all, "all 42 cases; CSV output is the summary table");
    b.flag("with-bounds", scan.with_bounds, "also evaluate the Stein bound at every n");
    b.opt("ladder", scan.ladder, "comma-separated n values (default: the case ladder)")->delimiter(',');
    b.opt("cap", scan.cap, "largest n for exact enumeration");
    b.opt("stein-step", scan.stein_step, "Stein grid step for bounds");
    b.opt("detail", scan.detail, "also write per-n rows as CSV to this path");

    b = sub("mcmc", "random-site heat-bath sampler");
    add_law_opts(b, mcmc.p);
    b.opt("sweeps", mcmc.sweeps, "sweeps per chain");
    b.opt("burn-in", mcmc.burn_in, "burn-in sweeps, negative = 10%");
    b.opt("chains", mcmc.chains, "independent chains");
    b.opt("trace-every", mcmc.trace_every, "CSV row every this many sweeps, 0 = none");
    b.flag("pmf", mcmc.pmf, "record the empirical pmf of s (JSON)");
    b.flag("compare-exact", mcmc.compare_exact, "z-scores against the exact law");

    sub("case-catalog", "the 42 rate cases with representative parameters");
  }

  std::string dispatch(CLI::App* s) {
    const std::string name = s->get_name();
    const unsigned threads = common.threads;
    Artifact a;
    if (name == "phase-diagram") run_phase(phase, a);
    if (name == "exact-law") run_exact(exact, threads, a);
    if (name == "limit-density") run_limit(limit, threads, a);
    if (name == "kolmogorov") run_kolm(kolm, threads, a);
    if (name == "stein-bound") run_bound(bound, threads, a);
    if (name == "rate-scan") run_scan(scan, threads, a);
    if (name == "mcmc") run_mcmc(mcmc, common, threads, a);
    if (name == "case-catalog") run_catalog(a);
    return render(name, common, echo[name].resolve(), a);
  }
};

// Config-file values are spliced in as "--key=value" right after the
// subcommand name, so later command-line flags win.
std::vector<std::string> splice_config(const std::vector<std::string>& args, const std::string& sub_name,
                                       const std::string& path, CLI::App* sub) {
  std::vector<std::string> out;
  std::vector<std::string> injected;
  for (const auto& [k, v] : read_config_file(path)) {
    if (k == "config" || sub->get_option_no_throw("--" + k) == nullptr) {
      throw beg::ValidationError("unknown config key '" + k + "' for " + sub_name);
    }
    injected.push_back("--" + k + "=" + v);
  }
  bool placed = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      ++i;
      continue;
    }
    if (args[i].rfind("--config=", 0) == 0) continue;
    out.push_back(args[i]);
    if (!placed && args[i] == sub_name) {
      out.insert(out.end(), injected.begin(), injected.end());
      placed = true;
    }
  }
  return out;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto parse = [](Cli& cli, std::vector<std::string> a) {
    std::reverse(a.begin(), a.end());  // CLI11 consumes the vector from the back
    cli.app.parse(a);
  };
  Cli first;
  try {
    parse(first, args);
  } catch (const CLI::CallForHelp& e) {
    return first.app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return first.app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record("usage", 2, e.what());
    return 2;
  }
  CLI::App* sub = first.app.get_subcommands().front();
  Cli second;
  Cli* cli = &first;
  if (!first.common.config.empty()) {
    const auto spliced = splice_config(args, sub->get_name(), first.common.config, sub);
    try {
      parse(second, spliced);
    } catch (const CLI::ParseError& e) {
      error_record("usage", 2, e.what());
      return 2;
    }
    cli = &second;
    sub = second.app.get_subcommands().front();
  }
  const std::string text = cli->dispatch(sub);
  if (cli->common.output.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    std::ofstream f(cli->common.output, std::ios::binary);
    if (!f) throw beg::ValidationError("cannot open output " + cli->common.output);
    f << text;
    if (!f) throw beg::ComputationError("write failed for " + cli->common.output);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const beg::Error& e) {
    error_record(e.kind(), e.exit_code(), e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    error_record("internal", 3, e.what());
    return 3;
  }
}
