#include "bht_cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "bht/kernels.hpp"
#include "bht/normlab.hpp"
#include "bht/oscsym.hpp"
#include "bht/parallel.hpp"
#include "bht/polynomial.hpp"
#include "bht/pvquad.hpp"
#include "bht/testfuncs.hpp"
#include "bht_cli/table.hpp"

#ifndef BHT_VERSION
#define BHT_VERSION "0.0.0"
#endif

namespace bht::cli {

using json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
}

int parse_integer(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected an integer, got '" + text + "'");
  }
}

}  // namespace

std::vector<int> parse_int_range(const std::string& field, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) return {parse_integer(field, parts[0])};
  if (parts.size() != 2) throw ConfigError(field, "expected a range a:b, got '" + text + "'");
  const int a = parse_integer(field, parts[0]), b = parse_integer(field, parts[1]);
  if (b < a) throw ConfigError(field, "empty range '" + text + "'");
  std::vector<int> v;
  for (int k = a; k <= b; ++k) v.push_back(k);
  return v;
}

std::vector<double> parse_grid(const std::string& field, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) return {parse_number(field, parts[0])};
  if (parts.size() != 3) throw ConfigError(field, "expected lo:hi:n, got '" + text + "'");
  const double lo = parse_number(field, parts[0]), hi = parse_number(field, parts[1]);
  const int n = parse_integer(field, parts[2]);
  if (n < 1) throw ConfigError(field, "grid needs at least one point");
  if (n > 1 && !(hi > lo)) throw ConfigError(field, "grid needs lo < hi");
  return linspace(lo, hi, static_cast<std::size_t>(n));
}

namespace {

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Polynomial parse_poly_field(const std::string& field, const std::string& text) {
  if (text.empty()) throw ConfigError(field, "polynomial is required");
  try {
    return parse_polynomial(text);
  } catch (const ParseError& e) {
    throw ConfigError(field, e.what());
  }
}

Catalog load_catalog(const std::string& path) {
  Catalog cat = Catalog::builtin();
  if (path.empty()) return cat;
  std::ifstream in(path);
  if (!in) throw ConfigError("catalog", "cannot open '" + path + "'");
  try {
    const Catalog extra = Catalog::from_json(in);
    for (const auto& name : extra.names()) cat.add(name, extra.get(name));
  } catch (const Error& e) {
    throw ConfigError("catalog", e.what());
  }
  return cat;
}

const TestFunction& catalog_entry(const Catalog& cat, const std::string& field,
                                  const std::string& ref) {
  try {
    return cat.get(ref);
  } catch (const PreconditionError& e) {
    throw ConfigError(field, e.what());
  }
}

void require_positive(const std::string& field, double v) {
  if (!(v > 0.0)) throw ConfigError(field, "must be positive");
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json poly_json(const Polynomial& p) {
  const auto prof = degree_profile(p);
  return json{{"text", p.to_string()}, {"leading_degree", prof.leading}, {"trailing_degree", prof.trailing}};
}

json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) row[t.columns[i]] = number(r[i]);
    rows.push_back(row);
  }
  return rows;
}

struct Outputs {
  std::string out;
  std::string plot;
  std::string report;
};

void write_table(const std::string& path, const Table& t) {
  if (path.empty()) return;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    std::ofstream f(path);
    if (!f) throw ConfigError("out", "cannot open '" + path + "'");
    json doc{{"columns", t.columns}, {"rows", table_json(t)}};
    f << doc.dump(2) << '\n';
    return;
  }
  try {
    write_csv(path, t);
  } catch (const Error& e) {
    throw ConfigError("out", e.what());
  }
}

std::vector<TestFunction> sample_probes(const Catalog& cat, std::uint64_t seed, std::size_t k) {
  std::vector<TestFunction> all = cat.all();
  if (k == 0 || k >= all.size()) return all;
  std::mt19937_64 rng(seed);
  // Fisher-Yates on the catalog order; mt19937_64 output is fixed by the
  // standard, so the subset depends only on the seed.
  for (std::size_t i = all.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  return all;
}

PlotOptions plot_options(std::string title, std::string x, std::string y, bool log2_x = false,
                         bool log2_y = false, std::string annotation = {},
                         std::vector<std::size_t> series = {}) {
  PlotOptions o;
  o.title = std::move(title);
  o.x_label = std::move(x);
  o.y_label = std::move(y);
  o.log2_x = log2_x;
  o.log2_y = log2_y;
  o.annotation = std::move(annotation);
  o.series = std::move(series);
  return o;
}

CheckResult check(const std::string& name, bool ok, const std::string& detail) {
  return {name, ok, detail};
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

std::vector<CheckResult> suite_kernels() {
  const auto ts = log_samples(std::ldexp(1.0, -20), std::ldexp(1.0, 20), 10000);
  const auto a = verify_partition(make_rho(), ts);
  const auto b = verify_partition(make_unit_bump(), ts);
  const auto c = verify_partition(make_freq_cutoff(), ts);
  const double worst = std::max({a.max_residual, b.max_residual, c.max_residual});
  return {check("kernels.partition", worst <= 1e-12, "max residual " + fmt(worst))};
}

std::vector<CheckResult> suite_algebra() {
  std::vector<CheckResult> out;
  const auto adm = admissibility(parse_polynomial("t^6"), parse_polynomial("3t^4-3t^2"));
  out.push_back(check("algebra.paper_pair",
                      adm.correlation_degree == 2 && adm.r_threshold == Rational(2, 3) && adm.admissible,
                      "d=" + std::to_string(adm.correlation_degree) + " threshold " + to_string(adm.r_threshold)));
  struct Case {
    const char* p;
    const char* q;
    int d;
  };
  const Case cases[] = {{"t", "t^2", 1}, {"t^3", "t^2", 1}, {"t^4", "4t^3-6t^2+4t", 3}, {"t^2", "t^4", 1}};
  for (const auto& c : cases) {
    const int d = correlation_degree(parse_polynomial(c.p), parse_polynomial(c.q));
    out.push_back(check(std::string("algebra.degree[") + c.p + ", " + c.q + "]", d == c.d,
                        "d=" + std::to_string(d) + " expected " + std::to_string(c.d)));
  }
  return out;
}

std::vector<CheckResult> suite_counterexamples(const std::vector<TestFunction>& probes) {
  const auto rep = counterexample_suite(linspace(-4.0, 4.0, 257), probes);
  std::vector<CheckResult> out;
  for (const auto& c : rep.cases) {
    out.push_back(check("counterexamples." + c.label, c.passed,
                        (c.expect_zero ? "max normalized |B| " + fmt(c.max_normalized)
                                       : "max |B| " + fmt(c.max_abs)) +
                            " over " + std::to_string(c.evaluations) + " evaluations"));
  }
  out.push_back(check("counterexamples.degree", rep.degree_ok,
                      "d=" + std::to_string(rep.correlation_degree) + " threshold " + to_string(rep.threshold)));
  return out;
}

std::vector<CheckResult> suite_linear(const Catalog& cat) {
  const Polynomial p = parse_polynomial("t"), q = parse_polynomial("2t");
  const auto& f = cat.get("g1");
  const auto& g = cat.get("g10");
  double worst = 0.0;
  for (double x : {-1.0, 0.0, 0.5}) {
    const auto a = bht_truncated(p, q, f, g, x, 1e-9, 1e3);
    const auto b = linear_multiplier_oracle(1.0, 2.0, f, g, x);
    worst = std::max(worst, std::abs(a.value - b));
  }
  return {check("linear.oracle", worst <= 1e-6, "max difference " + fmt(worst))};
}

std::vector<CheckResult> suite_decomposition(const Catalog& cat) {
  const Polynomial p = parse_polynomial("t"), q = parse_polynomial("t^2");
  const auto& f = cat.get("g1");
  const auto& g = cat.get("g10");
  const std::vector<double> xs{-0.5, 0.4};
  std::vector<std::complex<double>> sum(xs.size());
  for (int j = -5; j <= 20; ++j) {
    const auto piece = tj(p, q, f, g, j, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) sum[i] += piece.values[i];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto pv = bht_truncated(p, q, f, g, xs[i], std::ldexp(1.0, -21), 64.0);
    worst = std::max(worst, std::abs(pv.value - sum[i]));
  }
  return {check("decomposition.sum_tj", worst <= 1e-5, "max difference " + fmt(worst))};
}

std::vector<CheckResult> suite_stationary() {
  const PhaseModel model(parse_polynomial("t"), parse_polynomial("t^2"), 0);
  const auto rows = stationary_phase_check(model, 2.0, -1.0, {6, 7, 8, 9, 10});
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.normalized_magnitude);
    hi = std::max(hi, r.normalized_magnitude);
  }
  const auto mags = symbol_magnitudes(model, 1.0, 1.0, {6, 7, 8, 9, 10, 11, 12});
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : mags) pts.push_back({static_cast<double>(r.m), r.magnitude});
  const auto fit = fit_decay_exponent(pts);
  return {check("stationary.magnitude_band", hi / lo <= 2.0, "max/min " + fmt(hi / lo)),
          check("stationary.nonstationary_decay", fit.fitted_exponent > 2.0,
                "fitted slope " + fmt(fit.fitted_exponent) + " bits per m")};
}

std::vector<CheckResult> suite_jacobian() {
  const auto scan = jacobian_scan(parse_polynomial("t^6"), parse_polynomial("3t^4-3t^2"), Rational(1),
                                  {4, 5, 6, 7, 8, 9, 10, 11, 12});
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : scan.rows) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  // Lower bound c 2^{-dj} with c independent of j: the ratio must stay in a
  // fixed window away from zero.
  return {check("jacobian.bounded_ratio", scan.multiplicity == 2 && lo > 0.0 && hi / lo <= 16.0,
                "d=" + std::to_string(scan.multiplicity) + " ratio in [" + fmt(lo) + ", " + fmt(hi) + "]")};
}

std::vector<CheckResult> suite_mixed() {
  const PhaseModel model(parse_polynomial("t"), parse_polynomial("t^2"), 6);
  const auto grid = band_samples(8);
  const auto rep = mixed_derivative_check(model, 0.05, grid, grid);
  return {check("mixed.derivative", !rep.degenerate && rep.evaluated > 0 && rep.min_normalized >= 0.05,
                "min " + fmt(rep.min_normalized) + " over " + std::to_string(rep.evaluated) + " points")};
}

std::vector<CheckResult> suite_maximal(const std::vector<TestFunction>& probes) {
  std::vector<CheckResult> out;
  const Polynomial p = parse_polynomial("t"), q = parse_polynomial("t^2");
  bool nonneg = true;
  for (const auto& f : probes) {
    const auto rep = maximal(p, q, f, f, 0.25, default_eps_grid());
    for (std::size_t i = 0; i < rep.eps.size(); ++i) {
      if (!(rep.averages[i] >= 0.0) || rep.signed_averages[i] > rep.averages[i]) nonneg = false;
    }
  }
  out.push_back(check("maximal.nonnegative", nonneg, std::to_string(probes.size()) + " probes"));
  const auto wide = TestFunction::gaussian(100.0);
  const auto rep = maximal(p, q, wide, wide, 0.0, default_eps_grid());
  out.push_back(check("maximal.wide_gaussian", std::abs(rep.value - 1.0) <= 1e-3, "value " + fmt(rep.value)));
  return out;
}

std::vector<CheckResult> suite_decay() {
  const auto fit = m_decay_scan(parse_polynomial("t"), parse_polynomial("t^2"), {9, 10}, {2, 3, 4, 5},
                                default_band_probes(), planted_decay_operator(0.5));
  return {check("decay.planted", std::abs(fit.fitted_exponent - 0.5) <= 0.02,
                "recovered " + fmt(fit.fitted_exponent))};
}

}  // namespace

std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed, std::size_t probe_sample) {
  static const char* kSuites[] = {"kernels", "algebra", "counterexamples", "linear", "decomposition",
                                  "stationary", "jacobian", "mixed", "maximal", "decay"};
  const bool all = suite == "all";
  if (!all && std::find_if(std::begin(kSuites), std::end(kSuites),
                           [&](const char* s) { return suite == s; }) == std::end(kSuites)) {
    throw ConfigError("verify.suite", "unknown suite '" + suite + "'");
  }
  const Catalog cat = Catalog::builtin();
  const auto probes = sample_probes(cat, seed, probe_sample);
  std::vector<CheckResult> out;
  auto add = [&](const std::string& name, auto&& fn) {
    if (!all && suite != name) return;
    try {
      auto r = fn();
      out.insert(out.end(), r.begin(), r.end());
    } catch (const Error& e) {
      out.push_back({name, false, std::string("error: ") + e.what()});
    }
  };
  add("kernels", [] { return suite_kernels(); });
  add("algebra", [] { return suite_algebra(); });
  add("counterexamples", [&] { return suite_counterexamples(probes); });
  add("linear", [&] { return suite_linear(cat); });
  add("decomposition", [&] { return suite_decomposition(cat); });
  add("stationary", [] { return suite_stationary(); });
  add("jacobian", [] { return suite_jacobian(); });
  add("mixed", [] { return suite_mixed(); });
  add("maximal", [&] { return suite_maximal(probes); });
  add("decay", [] { return suite_decay(); });
  return out;
}

namespace {

struct Common {
  std::string P, Q;
  std::string catalog;
  Outputs io;
};

void add_common(CLI::App* sub, Common& c, bool pq = true) {
  if (pq) {
    sub->add_option("--P", c.P, "First polynomial, e.g. \"t^6\"");
    sub->add_option("--Q", c.Q, "Second polynomial");
  }
  sub->add_option("--catalog", c.catalog, "JSON catalog merged into the built-in entries");
  sub->add_option("--out", c.io.out, "Result table (.csv or .json)");
  sub->add_option("--plot", c.io.plot, "SVG plot of the result table");
  sub->add_option("--report", c.io.report, "Also write the JSON report here");
}

struct Report {
  std::string subcommand;
  json config = json::object();
  json results = json::object();
  bool passed = true;
};

void finish(const Report& r, const Outputs& io, double seconds, std::ostream& out) {
  json doc;
  doc["tool"] = "bht";
  doc["version"] = BHT_VERSION;
  doc["subcommand"] = r.subcommand;
  doc["config"] = r.config;
  doc["results"] = r.results;
  doc["verdict"] = r.passed ? "pass" : "fail";
  doc["wall_clock_seconds"] = seconds;
  const std::string text = doc.dump(2);
  out << text << '\n';
  if (!io.report.empty()) {
    std::ofstream f(io.report);
    if (!f) throw ConfigError("report", "cannot open '" + io.report + "'");
    f << text << '\n';
  }
}

Report cmd_analyze(const Common& c) {
  Report r;
  r.subcommand = "analyze";
  const Polynomial p = parse_poly_field("analyze.P", c.P);
  const Polynomial q = parse_poly_field("analyze.Q", c.Q);
  r.config = {{"P", c.P}, {"Q", c.Q}};
  const auto adm = admissibility(p, q);
  r.results["P"] = poly_json(p);
  r.results["Q"] = poly_json(q);
  r.results["correlation_degree"] = adm.correlation_degree;
  r.results["degree_by_convention"] = adm.degree_by_convention;
  r.results["threshold"] = to_string(adm.r_threshold);
  r.results["admissible"] = adm.admissible;
  r.results["failure_reason"] = adm.failure_reason ? json(*adm.failure_reason) : json(nullptr);
  return r;
}

struct EvalArgs {
  std::string f = "g1", g = "g1", x_grid = "-4:4:257";
  double eps = 1e-6, R = 64.0, panel_tol = 1e-10, total_tol = 1e-8;
};

Report cmd_evaluate(const Common& c, const EvalArgs& a) {
  Report r;
  r.subcommand = "evaluate";
  const Polynomial p = parse_poly_field("evaluate.P", c.P);
  const Polynomial q = parse_poly_field("evaluate.Q", c.Q);
  const Catalog cat = load_catalog(c.catalog);
  const auto& f = catalog_entry(cat, "evaluate.f", a.f);
  const auto& g = catalog_entry(cat, "evaluate.g", a.g);
  const auto xs = parse_grid("evaluate.x-grid", a.x_grid);
  require_positive("evaluate.eps", a.eps);
  if (!(a.R > a.eps)) throw ConfigError("evaluate.R", "must exceed eps");
  require_positive("evaluate.panel-tol", a.panel_tol);
  require_positive("evaluate.total-tol", a.total_tol);
  r.config = {{"P", c.P}, {"Q", c.Q}, {"f", a.f}, {"g", a.g}, {"x_grid", a.x_grid},
              {"eps", a.eps}, {"R", a.R}, {"panel_tol", a.panel_tol}, {"total_tol", a.total_tol}};
  PVOptions opt;
  opt.panel_tol = a.panel_tol;
  opt.total_tol = a.total_tol;
  const auto vals = bht_on_grid(p, q, f, g, xs, a.eps, a.R, opt);
  Table t{{"x", "re", "im", "err"}, {}};
  double max_abs = 0.0, max_conv = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    t.rows.push_back({xs[i], vals[i].value.real(), vals[i].value.imag(), vals[i].quadrature_error});
    max_abs = std::max(max_abs, std::abs(vals[i].value));
    max_conv = std::max(max_conv, vals[i].convergence_estimate);
  }
  r.results["rows"] = table_json(t);
  r.results["max_abs"] = max_abs;
  r.results["max_convergence_estimate"] = max_conv;
  write_table(c.io.out, t);
  if (!c.io.plot.empty()) {
    Table mag{{"x", "abs"}, {}};
    for (const auto& row : t.rows) mag.rows.push_back({row[0], std::hypot(row[1], row[2])});
    emit_plot(mag, PlotKind::line, c.io.plot,
              plot_options("|B(f,g)(x)| for P=" + p.to_string() + ", Q=" + q.to_string(), "x", "|B|"));
  }
  return r;
}

struct SymbolArgs {
  int j = 0;
  std::string m_range = "0:8", n_range = "0:8";
  int samples = 16;
  std::optional<double> xi, eta;
};

Report cmd_symbol(const Common& c, const SymbolArgs& a) {
  Report r;
  r.subcommand = "symbol";
  const Polynomial p = parse_poly_field("symbol.P", c.P);
  const Polynomial q = parse_poly_field("symbol.Q", c.Q);
  const auto ms = parse_int_range("symbol.m-range", a.m_range);
  r.config = {{"P", c.P}, {"Q", c.Q}, {"j", a.j}, {"m_range", a.m_range}};
  if (a.xi.has_value() != a.eta.has_value()) {
    throw ConfigError(a.xi ? "symbol.eta" : "symbol.xi", "xi and eta must be given together");
  }
  if (a.xi) {
    for (const auto& [name, val] : {std::pair{"symbol.xi", *a.xi}, std::pair{"symbol.eta", *a.eta}}) {
      if (!(std::abs(val) >= 0.5 && std::abs(val) <= 2.0)) throw ConfigError(name, "must satisfy 1/2 <= |value| <= 2");
    }
    r.config["xi"] = *a.xi;
    r.config["eta"] = *a.eta;
    PhaseModel model = [&] {
      try {
        return PhaseModel(p, q, a.j);
      } catch (const PreconditionError& e) {
        throw ConfigError("symbol.P", e.what());
      }
    }();
    Table t{{"m", "abs", "normalized", "arg", "abs_error"}, {}};
    for (int m : ms) {
      const auto s = rescaled_symbol(model, m, *a.xi, *a.eta);
      t.rows.push_back({static_cast<double>(m), std::abs(s.value), std::abs(s.value) * std::exp2(0.5 * m),
                        std::arg(s.value), s.abs_error});
    }
    r.results["rows"] = table_json(t);
    const auto cp = critical_point(model, *a.xi, *a.eta);
    r.results["stationary"] = !cp.non_stationary();
    write_table(c.io.out, t);
    if (!c.io.plot.empty()) {
      emit_plot(t, PlotKind::line, c.io.plot,
                plot_options("|I_m| at (" + fmt(*a.xi) + ", " + fmt(*a.eta) + ")", "m", "|I|", false, true, "", {1}));
    }
    return r;
  }
  const auto ns = parse_int_range("symbol.n-range", a.n_range);
  if (a.samples < 2 || a.samples % 2) throw ConfigError("symbol.samples", "must be an even number >= 2");
  r.config["n_range"] = a.n_range;
  r.config["samples"] = a.samples;
  const auto rows = symbol_decay_scan(p, q, a.j, ms, ns, a.samples);
  Table t{{"m", "n", "sup_abs", "xi", "eta", "abs_error"}, {}};
  for (const auto& s : rows) {
    t.rows.push_back({static_cast<double>(s.m), static_cast<double>(s.n), s.sup_abs, s.arg_xi, s.arg_eta,
                      s.abs_error});
  }
  r.results["rows"] = table_json(t);
  write_table(c.io.out, t);
  if (!c.io.plot.empty()) {
    emit_plot(t, PlotKind::heatmap, c.io.plot,
              plot_options("sup |M_{j,m,n}|, j=" + std::to_string(a.j), "m", "n", false, true, "", {0, 1, 2}));
  }
  return r;
}

struct DecayArgs {
  int N = 8;
  std::string j_window = "9:14", m_range = "2:9";
  std::size_t x_points = 257;
  std::optional<double> planted;
};

Report cmd_decay(const Common& c, const DecayArgs& a) {
  Report r;
  r.subcommand = "decay";
  const Polynomial p = parse_poly_field("decay.P", c.P);
  const Polynomial q = parse_poly_field("decay.Q", c.Q);
  const auto js = parse_int_range("decay.j-window", a.j_window);
  const auto ms = parse_int_range("decay.m-range", a.m_range);
  if (js.front() <= a.N) throw ConfigError("decay.j-window", "must lie above N = " + std::to_string(a.N));
  if (ms.size() < 4) throw ConfigError("decay.m-range", "needs at least 4 values");
  if (a.x_points < 16) throw ConfigError("decay.x-points", "needs at least 16 points");
  r.config = {{"P", c.P}, {"Q", c.Q}, {"N", a.N}, {"j_window", a.j_window}, {"m_range", a.m_range},
              {"x_points", a.x_points}};
  const auto probes = default_band_probes();
  DecayFit fit;
  try {
    if (a.planted) {
      r.config["planted"] = *a.planted;
      fit = m_decay_scan(p, q, js, ms, probes, planted_decay_operator(*a.planted), a.x_points);
    } else {
      fit = m_decay_scan(p, q, js, ms, probes, a.x_points);
    }
  } catch (const ScanAborted& e) {
    r.results["error"] = e.what();
    r.results["partial"] = json{{"abscissa", e.partial().abscissa}, {"ordinate", e.partial().ordinate}};
    r.passed = false;
    return r;
  }
  Table t{{"m", "sup_ratio"}, {}};
  for (std::size_t i = 0; i < fit.abscissa.size(); ++i) {
    t.rows.push_back({static_cast<double>(fit.abscissa[i]), fit.ordinate[i]});
  }
  json table = json::array();
  for (const auto& pt : fit.table) {
    table.push_back({{"m", pt.m}, {"j", pt.j}, {"probe", pt.probe}, {"ratio", pt.ratio}});
  }
  r.results["abscissa"] = fit.abscissa;
  r.results["ordinate"] = fit.ordinate;
  r.results["fitted_exponent"] = fit.fitted_exponent;
  r.results["intercept"] = fit.intercept;
  r.results["residual"] = fit.residual;
  r.results["table"] = table;
  r.results["note"] = "lower-bound probes over a finite band-adapted catalog";
  r.passed = fit.fitted_exponent > 0.0;
  write_table(c.io.out, t);
  if (!c.io.plot.empty()) {
    emit_plot(t, PlotKind::line, c.io.plot,
              plot_options("sup ratio vs m", "m", "ratio", false, true, "fitted slope " + fmt(fit.fitted_exponent) + ", residual " + fmt(fit.residual)));
  }
  return r;
}

struct MaximalArgs {
  std::string f = "g1", g = "g1", x_grid = "0";
  std::string eps_grid;
};

Report cmd_maximal(const Common& c, const MaximalArgs& a) {
  Report r;
  r.subcommand = "maximal";
  const Polynomial p = parse_poly_field("maximal.P", c.P);
  const Polynomial q = parse_poly_field("maximal.Q", c.Q);
  const Catalog cat = load_catalog(c.catalog);
  const auto& f = catalog_entry(cat, "maximal.f", a.f);
  const auto& g = catalog_entry(cat, "maximal.g", a.g);
  const auto xs = parse_grid("maximal.x-grid", a.x_grid);
  std::vector<double> eps = default_eps_grid();
  if (!a.eps_grid.empty()) {
    const auto parts = split(a.eps_grid, ':');
    if (parts.size() != 3) throw ConfigError("maximal.eps-grid", "expected lo:hi:ratio");
    const double lo = parse_number("maximal.eps-grid", parts[0]);
    const double hi = parse_number("maximal.eps-grid", parts[1]);
    const double ratio = parse_number("maximal.eps-grid", parts[2]);
    if (!(lo > 0.0) || !(hi > lo) || !(ratio > 1.0) || ratio > 2.0) {
      throw ConfigError("maximal.eps-grid", "need 0 < lo < hi and 1 < ratio <= 2");
    }
    eps.clear();
    for (double e = lo; e < hi * (1 + 1e-12); e *= ratio) eps.push_back(e);
  }
  r.config = {{"P", c.P}, {"Q", c.Q}, {"f", a.f}, {"g", a.g}, {"x_grid", a.x_grid},
              {"eps_grid", a.eps_grid.empty() ? "default" : a.eps_grid}};
  Table t;
  bool ok = true;
  if (xs.size() == 1) {
    const auto rep = maximal(p, q, f, g, xs[0], eps);
    t.columns = {"eps", "average", "signed_average"};
    for (std::size_t i = 0; i < rep.eps.size(); ++i) {
      t.rows.push_back({rep.eps[i], rep.averages[i], rep.signed_averages[i]});
      ok = ok && rep.averages[i] >= 0.0 && rep.signed_averages[i] <= rep.averages[i];
    }
    r.results["value"] = rep.value;
    r.results["argmax_eps"] = rep.argmax_eps;
    r.results["upper_bound"] = rep.upper_bound;
    r.results["quadrature_error"] = rep.quadrature_error;
  } else {
    t.columns = {"x", "value", "argmax_eps", "upper_bound"};
    std::vector<MaximalReport> reps(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { reps[i] = maximal(p, q, f, g, xs[i], eps); });
    for (std::size_t i = 0; i < xs.size(); ++i) {
      t.rows.push_back({xs[i], reps[i].value, reps[i].argmax_eps, reps[i].upper_bound});
      ok = ok && reps[i].value >= 0.0;
    }
  }
  r.results["rows"] = table_json(t);
  r.passed = ok;
  write_table(c.io.out, t);
  if (!c.io.plot.empty()) {
    emit_plot(t, PlotKind::line, c.io.plot,
              plot_options("bilinear maximal function", t.columns[0], "average", xs.size() == 1, false, "", {1}));
  }
  return r;
}

struct KernelArgs {
  std::string kind = "rho";
  std::string range = "0.25:4:1000";
};

Report cmd_kernels(const Common& c, const KernelArgs& a) {
  Report r;
  r.subcommand = "kernels";
  const auto parts = split(a.range, ':');
  if (parts.size() != 3) throw ConfigError("kernels.range", "expected lo:hi:n");
  const double lo = parse_number("kernels.range", parts[0]);
  const double hi = parse_number("kernels.range", parts[1]);
  const int n = parse_integer("kernels.range", parts[2]);
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("kernels.range", "need 0 < lo < hi and n >= 2");
  const auto ts = log_samples(lo, hi, static_cast<std::size_t>(n));
  r.config = {{"kind", a.kind}, {"range", a.range}};
  std::ostringstream csv;
  if (a.kind == "rho") write_kernel_csv(csv, make_rho(), ts);
  else if (a.kind == "rho0") write_kernel_csv(csv, make_unit_bump(), ts);
  else if (a.kind == "phi_hat") write_kernel_csv(csv, make_freq_cutoff(), ts);
  else throw ConfigError("kernels.kind", "expected rho, rho0 or phi_hat");
  std::istringstream in(csv.str());
  const Table t = read_csv(in);
  r.results["rows"] = table_json(t);
  write_table(c.io.out, t);
  if (!c.io.plot.empty()) emit_plot(t, PlotKind::line, c.io.plot, plot_options(a.kind, t.columns[0], a.kind, true));
  return r;
}

struct VerifyArgs {
  std::string suite = "all";
  std::uint64_t seed = 0;
  std::size_t probe_sample = 0;
};

Report cmd_verify(const Common&, const VerifyArgs& a) {
  Report r;
  r.subcommand = "verify";
  r.config = {{"suite", a.suite}, {"seed", a.seed}, {"probe_sample", a.probe_sample}};
  const auto checks = run_suite(a.suite, a.seed, a.probe_sample);
  json arr = json::array();
  for (const auto& ch : checks) {
    arr.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
    r.passed = r.passed && ch.passed;
  }
  r.results["checks"] = arr;
  return r;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"bht: numerical lab for bilinear Hilbert transforms along polynomial curves"};
  app.set_config("--config", "", "TOML config; options go under a [subcommand] section");
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(BHT_VERSION));

  Common c_an, c_ev, c_sy, c_de, c_ma, c_ke, c_ve;
  EvalArgs ev;
  SymbolArgs sy;
  DecayArgs de;
  MaximalArgs ma;
  KernelArgs ke;
  VerifyArgs ve;

  auto* an = app.add_subcommand("analyze", "Correlation degree and admissibility of (P, Q)");
  add_common(an, c_an);

  auto* e = app.add_subcommand("evaluate", "Truncated principal value B_{P,Q}(f,g)(x) on an x grid");
  add_common(e, c_ev);
  e->add_option("--f", ev.f, "Catalog entry for f");
  e->add_option("--g", ev.g, "Catalog entry for g");
  e->add_option("--x-grid", ev.x_grid, "lo:hi:n or a single x");
  e->add_option("--eps", ev.eps, "Inner truncation");
  e->add_option("--R", ev.R, "Outer truncation");
  e->add_option("--panel-tol", ev.panel_tol, "Per-panel error target");
  e->add_option("--total-tol", ev.total_tol, "Total error target");

  auto* s = app.add_subcommand("symbol", "Symbol decay surface sup|M_{j,m,n}| or pointwise I_{rho,m}");
  add_common(s, c_sy);
  s->add_option("--j", sy.j, "Scale");
  s->add_option("--m-range", sy.m_range, "a:b");
  s->add_option("--n-range", sy.n_range, "a:b");
  s->add_option("--samples", sy.samples, "Band samples per axis (even)");
  s->add_option("--xi", sy.xi, "Pointwise mode: rescaled xi in [1/2, 2]");
  s->add_option("--eta", sy.eta, "Pointwise mode: rescaled eta in [1/2, 2]");

  auto* d = app.add_subcommand("decay", "Empirical 2^{-eps m} decay scan");
  add_common(d, c_de);
  d->add_option("--N", de.N, "Lower scale cutoff: the window must lie in j > N");
  d->add_option("--j-window", de.j_window, "a:b");
  d->add_option("--m-range", de.m_range, "a:b");
  d->add_option("--x-points", de.x_points, "Output samples per probe");
  d->add_option("--planted", de.planted, "Replace the operator by the planted-slope synthetic one");

  auto* m = app.add_subcommand("maximal", "Bilinear maximal function on a geometric eps grid");
  add_common(m, c_ma);
  m->add_option("--f", ma.f, "Catalog entry for f");
  m->add_option("--g", ma.g, "Catalog entry for g");
  m->add_option("--x-grid", ma.x_grid, "lo:hi:n or a single x");
  m->add_option("--eps-grid", ma.eps_grid, "lo:hi:ratio (ratio <= 2)");

  auto* k = app.add_subcommand("kernels", "Dump rho, rho0 or phi_hat as CSV");
  add_common(k, c_ke, false);
  k->add_option("--kind", ke.kind, "rho | rho0 | phi_hat");
  k->add_option("--range", ke.range, "lo:hi:n, log spaced");

  auto* v = app.add_subcommand("verify", "Built-in verification suites; exit 0 iff all pass");
  add_common(v, c_ve, false);
  v->add_option("--suite", ve.suite, "counterexamples | kernels | algebra | linear | decomposition | "
                                     "stationary | jacobian | mixed | maximal | decay | all");
  v->add_option("--seed", ve.seed, "Seed for probe subsampling");
  v->add_option("--probe-sample", ve.probe_sample, "Number of catalog probes to draw (0 = all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::CallForVersion& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex, out, err);
    return kExitConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    Report r;
    Outputs io;
    if (an->parsed()) r = cmd_analyze(c_an), io = c_an.io;
    else if (e->parsed()) r = cmd_evaluate(c_ev, ev), io = c_ev.io;
    else if (s->parsed()) r = cmd_symbol(c_sy, sy), io = c_sy.io;
    else if (d->parsed()) r = cmd_decay(c_de, de), io = c_de.io;
    else if (m->parsed()) r = cmd_maximal(c_ma, ma), io = c_ma.io;
    else if (k->parsed()) r = cmd_kernels(c_ke, ke), io = c_ke.io;
    else r = cmd_verify(c_ve, ve), io = c_ve.io;
    finish(r, io, elapsed(t0), out);
    return r.passed ? kExitPass : kExitFail;
  } catch (const ConfigError& ex) {
    err << "config error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitFail;
  }
}

}  // namespace bht::cli
