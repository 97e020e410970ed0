#include "hodomap/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace hodomap {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error("config", what); }

std::vector<double> numbers(const std::string& key, const std::string& text) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    double x = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !std::isfinite(x))
      bad(key + ": '" + tok + "' is not a finite number");
    out.push_back(x);
  }
  return out;
}

std::vector<Point> points(const std::string& key, const std::string& text) {
  auto v = numbers(key, text);
  if (v.size() % 2) bad(key + ": expected x y pairs");
  std::vector<Point> out;
  for (std::size_t i = 0; i < v.size(); i += 2) out.push_back({v[i], v[i + 1]});
  return out;
}

double number(const std::string& key, const std::string& text, double lo, double hi) {
  auto v = numbers(key, text);
  if (v.size() != 1) bad(key + ": expected one number");
  if (!(v[0] >= lo && v[0] <= hi)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, ": %g outside [%g, %g]", v[0], lo, hi);
    bad(key + buf);
  }
  return v[0];
}

std::size_t count(const std::string& key, const std::string& text, double lo, double hi) {
  double x = number(key, text, lo, hi);
  if (x != std::floor(x)) bad(key + ": expected an integer");
  return static_cast<std::size_t>(x);
}

DataSpec data_spec(const std::string& section, const boost::property_tree::ptree& t) {
  DataSpec d;
  for (const auto& [key, node] : t) {
    std::string k = section + "." + key, val = node.get_value<std::string>();
    if (key == "closed_form") {
      d.closed_form = val;
      try {
        HarmonicFunction::named(val);
      } catch (const Error& e) {
        bad(k + ": " + e.what());
      }
    } else if (key == "bumps") {
      // start:peak:end:height, comma separated, fractions of the free part
      std::string s = val;
      std::replace(s.begin(), s.end(), ',', ' ');
      std::istringstream in(s);
      std::string tok;
      while (in >> tok) {
        std::replace(tok.begin(), tok.end(), ':', ' ');
        auto v = numbers(k, tok);
        if (v.size() != 4) bad(k + ": each bump is start:peak:end:height");
        if (!(0 < v[0] && v[0] < v[1] && v[1] < v[2] && v[2] < 1))
          bad(k + ": need 0 < start < peak < end < 1");
        if (v[3] == 0) bad(k + ": zero height");
        d.bumps.push_back({v[0], v[1], v[2], v[3]});
      }
    } else {
      bad("unknown key " + k);
    }
  }
  if (d.closed() == !d.bumps.empty()) bad("[" + section + "] needs exactly one of closed_form, bumps");
  return d;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    bad(e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  static const std::set<std::string> sections{"scenario", "domain", "solver", "v",
                                              "u",        "region", "critical", "checks"};
  for (const auto& [name, sub] : tree) {
    if (!sections.count(name)) bad("unknown section [" + name + "]");
    if (sub.empty() && !sub.data().empty()) bad("key '" + name + "' outside a section");
  }
  ScenarioConfig c;
  auto each = [&](const std::string& section, auto&& fn) {
    if (auto sub = tree.get_child_optional(section))
      for (const auto& [key, node] : *sub) fn(key, section + "." + key, node.template get_value<std::string>());
  };

  each("scenario", [&](const std::string& key, const std::string& k, const std::string& v) {
    if (key == "name") c.name = v;
    else if (key == "seed") c.seed = count(k, v, 0, 1e15);
    else if (key == "output") c.output = v;
    else bad("unknown key " + k);
  });
  if (c.name.empty()) bad("scenario.name is required");

  each("domain", [&](const std::string& key, const std::string& k, const std::string& v) {
    auto& d = c.domain;
    if (key == "kind") d.kind = v;
    else if (key == "phi") d.phi = v;
    else if (key == "half_width") d.half_width = number(k, v, 1e-3, 0.999);
    else if (key == "vertices") d.vertices = points(k, v);
    else if (key == "nodal_edges") d.nodal_edges = count(k, v, 1, 1e6);
    else if (key == "anchor") {
      auto p = points(k, v);
      if (p.size() != 1) bad(k + ": expected one point");
      d.anchor = p[0];
    } else if (key == "nodes") d.nodes = points(k, v);
    else bad("unknown key " + k);
  });
  {
    const auto& d = c.domain;
    if (d.kind != "halfdisk" && d.kind != "polygon" && d.kind != "graph")
      bad("domain.kind must be halfdisk, polygon or graph");
    if (d.kind == "graph" && d.phi != "zero" && d.phi != "dmo" && d.phi != "corner" &&
        d.phi != "custom-polyline")
      bad("domain.phi must be zero, dmo, corner or custom-polyline");
    if (d.kind == "polygon" && (d.vertices.size() < 3 || d.nodal_edges >= d.vertices.size()))
      bad("domain.vertices needs >= 3 points and nodal_edges < vertex count");
    if (d.kind == "graph" && d.phi == "custom-polyline" && d.nodes.size() < 2)
      bad("domain.nodes needs >= 2 points for custom-polyline");
  }

  each("solver", [&](const std::string& key, const std::string& k, const std::string& v) {
    auto& s = c.solver;
    if (key == "charges") s.charges = count(k, v, 4, 4096);
    else if (key == "collocation") s.collocation = count(k, v, 0, 65536);
    else if (key == "offset") s.offset = number(k, v, 1e-3, 2.0);
    else if (key == "target") s.target = number(k, v, 1e-15, 1.0);
    else if (key == "truncation") s.truncation = number(k, v, 1e-16, 1e-3);
    else if (key == "grading") s.grading = number(k, v, 0.0, 1.0);
    else bad("unknown key " + k);
  });
  if (c.solver.collocation != 0 && c.solver.collocation < 2 * c.solver.charges)
    bad("solver.collocation must be 0 (auto) or >= 2 * charges");

  auto v = tree.get_child_optional("v");
  auto u = tree.get_child_optional("u");
  if (!v || !u) bad("sections [v] and [u] are required");
  c.v = data_spec("v", *v);
  c.u = data_spec("u", *u);

  each("region", [&](const std::string& key, const std::string& k, const std::string& val) {
    if (key != "rect") bad("unknown key " + k);
    if (val == "auto") {
      c.rect.reset();
      return;
    }
    auto ab = numbers(k, val);
    if (ab.size() != 2 || !(ab[0] > 0 && ab[0] <= 1 && ab[1] > 0 && ab[1] <= 1))
      bad(k + ": expected 'auto' or 'a b' with 0 < a, b <= 1");
    c.rect = std::array<double, 2>{ab[0], ab[1]};
  });

  each("critical", [&](const std::string& key, const std::string& k, const std::string& val) {
    if (key == "epsilons") {
      c.epsilons = numbers(k, val);
      if (c.epsilons.empty()) bad(k + ": empty schedule");
      for (double e : c.epsilons)
        if (!(e > 0 && e <= 10)) bad(k + ": epsilons must lie in (0, 10]");
    } else if (key == "samples") c.gradient_samples = count(k, val, 64, 1e6);
    else if (key == "expect_interior") {
      if (val != "zero" && val != "positive" && val != "any") bad(k + ": zero, positive or any");
      c.expect_interior = val;
    } else bad("unknown key " + k);
  });

  each("checks", [&](const std::string& key, const std::string& k, const std::string& val) {
    if (key == "levels") c.levels = count(k, val, 1, 100);
    else if (key == "probes") c.probes = count(k, val, 0, 1e6);
    else if (key == "law_samples") c.law_samples = count(k, val, 1, 1e5);
    else bad("unknown key " + k);
  });
  return c;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Domain build_domain(const DomainSpec& s) {
  if (s.kind == "halfdisk") return make_halfdisk();
  if (s.kind == "polygon") return make_polygon_domain(s.vertices, s.nodal_edges, s.anchor);
  GraphParametrization g = s.phi == "dmo"      ? dmo_graph()
                           : s.phi == "corner" ? corner_graph()
                           : s.phi == "zero"   ? flat_graph()
                                               : polyline_graph(s.nodes);
  return make_graph_domain(g, s.half_width);
}

BoundaryData build_data(const Domain& domain, const DataSpec& spec) {
  double Ln = domain.boundary().nodal_length(), F = domain.boundary().length() - Ln;
  std::vector<Bump> bumps;
  for (const auto& b : spec.bumps) bumps.push_back({Ln + b[0] * F, Ln + b[1] * F, Ln + b[2] * F, b[3]});
  return bump_data(domain, bumps);
}

// ---------------------------------------------------------------------------
// Report helpers

namespace {

json xy(Point p) { return json::array({p.real(), p.imag()}); }

json solver_json(const Solution& s, const SolverConfig& cfg, bool closed) {
  const auto& r = s.report;
  return {{"method", closed ? "mfs-closed-form-trace" : "mfs"},
          {"charges", r.charges},
          {"collocation", r.collocation},
          {"validation", r.validation},
          {"rank", r.rank},
          {"offset", r.offset},
          {"min_offset", s.function.min_offset()},
          {"residual", r.residual},
          {"collocation_residual", r.collocation_residual},
          {"condition", r.condition},
          {"target", cfg.target},
          {"warning", r.warning}};
}

json ledger_json(const LedgerCount& c) {
  json pts = json::array();
  for (const auto& p : c.points)
    pts.push_back({{"x", p.location.real()}, {"y", p.location.imag()}, {"multiplicity", p.multiplicity}});
  return {{"distinct", c.distinct}, {"with_multiplicity", c.with_multiplicity},
          {"conclusive", c.conclusive}, {"note", c.note}, {"points", pts}};
}

void round_all(json& j) {
  if (j.is_number_float()) {
    j = round15(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& x : j) round_all(x);
  }
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", round15(x));
  return buf;
}

class Stopwatch {
 public:
  explicit Stopwatch(bool on) : on_(on), t0_(std::chrono::steady_clock::now()) {}
  void mark(const char* what) {
    if (!on_) return;
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    std::fprintf(stderr, "[%7.2fs] %s\n", s, what);
  }

 private:
  bool on_;
  std::chrono::steady_clock::time_point t0_;
};

struct Check {
  std::string name;
  bool pass;
  bool conclusive_kind;  ///< failure means "inconclusive" rather than "failed"
};

int exit_code_for(const std::vector<Check>& checks) {
  bool failed = false, inconclusive = false;
  for (const auto& c : checks)
    if (!c.pass) (c.conclusive_kind ? inconclusive : failed) = true;
  return failed ? 1 : inconclusive ? 2 : 0;
}

json checks_json(const std::vector<Check>& checks) {
  json out = json::array();
  for (const auto& c : checks) out.push_back({{"name", c.name}, {"pass", c.pass}});
  return out;
}

/// Shared front half of run and verify: domain, both solves, completions.
struct Front {
  std::optional<Domain> domain;
  std::optional<Solution> v, u;
  std::optional<AnalyticCompletion> cv, cu;
  HarmonicFunction vbar, ubar;
  double reflection_tol = 0;
};

void build_front(const ScenarioConfig& c, Front& f, json& report, Stopwatch& sw) {
  f.domain.emplace(build_domain(c.domain));
  const Domain& d = *f.domain;
  auto problems = validate_domain(d);
  if (!problems.empty()) throw Error("geometry", "invalid domain: " + problems.front());
  report["scenario"]["domain"] = {{"kind", d.kind()},
                                  {"smoothness", to_string(d.smoothness())},
                                  {"boundary_length", d.boundary().length()},
                                  {"nodal_length", d.boundary().nodal_length()},
                                  {"anchor", xy(d.anchor())}};
  sw.mark("domain");

  if (c.v.closed()) f.v.emplace(solve_dirichlet(d, HarmonicFunction::named(c.v.closed_form), c.solver));
  else f.v.emplace(solve_dirichlet(d, build_data(d, c.v), c.solver));
  report["solver"]["v"] = solver_json(*f.v, c.solver, c.v.closed());
  if (c.u.closed()) {
    auto h = HarmonicFunction::named(c.u.closed_form);
    f.u.emplace(Solution{h, SolveReport{}});
    report["solver"]["u"] = {{"method", "closed-form"}, {"name", c.u.closed_form}};
  } else {
    f.u.emplace(solve_dirichlet(d, build_data(d, c.u), c.solver));
    report["solver"]["u"] = solver_json(*f.u, c.solver, false);
  }
  sw.mark("solve");

  auto analytic = [&](const HarmonicFunction& h, HarmonicFunction& conj,
                      std::optional<AnalyticCompletion>& out) {
    ConjugateReport cr;
    conj = conjugate(h, d, &cr);
    CompletionReport rep;
    out.emplace(completion(h, conj, d, &rep));
    auto pts = d.interior_samples(100, 1e-3, c.seed + 7);
    return json{{"conjugate_method", to_string(cr.method)},
                {"cr_residual", rep.cr_residual},
                {"cr_defect_fd", rep.cr_defect_fd},
                {"modulus_defect", rep.modulus_defect},
                {"anchor_value", rep.anchor_value},
                {"gradient_fd_error",
                 std::max(gradient_fd_error(h, pts), gradient_fd_error(conj, pts))}};
  };
  report["analytic"]["v"] = analytic(f.v->function, f.vbar, f.cv);
  report["analytic"]["u"] = analytic(f.u->function, f.ubar, f.cu);
  f.reflection_tol = 10 * std::max({f.v->report.residual, f.u->report.residual, 1e-12});
  sw.mark("analytic");
}

std::vector<double> level_values(const HarmonicFunction& v, const Domain& d, std::size_t n) {
  double vmax = 0;
  for (const auto& s : boundary_sample(d, 2048)) vmax = std::max(vmax, v.value(s.point));
  std::vector<double> out;
  for (std::size_t k = 1; k <= n; ++k)
    out.push_back(vmax * static_cast<double>(k) / static_cast<double>(n + 1));
  return out;
}

json fail_status(const Error& e) {
  return {{"exit_code", 1}, {"stage", e.stage()}, {"message", e.what()}, {"checks", json::array()}};
}

}  // namespace

std::string dump_report(const json& report) {
  json copy = report;
  round_all(copy);
  return copy.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Run

ScenarioResult run_scenario(const ScenarioConfig& c, bool verbose) {
  ScenarioResult res;
  json& report = res.report;
  report["scenario"] = {{"name", c.name}, {"seed", c.seed}};
  Stopwatch sw(verbose);
  FigureData fig;
  std::ostringstream points_csv, curves_csv;
  points_csv << "x,y,multiplicity,set\n";
  curves_csv << "x,y,segment-id\n";
  try {
    Front f;
    build_front(c, f, report, sw);
    const Domain& d = *f.domain;
    const auto& v = f.v->function;
    fig.boundary = d.boundary().polyline(1024);

    double a0 = c.rect ? (*c.rect)[0] : 0.5, b0 = c.rect ? (*c.rect)[1] : 0.5;
    HodographMap map = build_map(*f.cv, d, a0, b0, f.v->report.residual);
    const auto& md = map.diagnostics();
    report["hodograph"] = {{"anchor_offset", md.anchor_offset},
                           {"det_defect", md.det_defect},
                           {"boundary_image", md.boundary_image},
                           {"boundary_tolerance", md.boundary_tolerance},
                           {"usable", map.usable()},
                           {"failures", md.failures}};
    sw.mark("map");

    Region E = localize_E_r(map, c.rect, c.seed);
    report["hodograph"]["region"] = {{"a", E.a},
                                     {"b", E.b},
                                     {"automatic", E.automatic},
                                     {"outer_inclusion", E.outer_inclusion},
                                     {"inner_inclusion", E.inner_inclusion},
                                     {"inner_coverage", E.inner_coverage},
                                     {"shrink_steps", E.shrink_steps},
                                     {"closure_gap", E.closure_gap}};
    fig.region = E.polygon();
    fig.image = Rect{-E.a, E.a, 0, E.b};
    static const char* side_names[4] = {"E.bottom", "E.right", "E.top", "E.left"};
    for (int k = 0; k < 4; ++k)
      for (Point p : E.sides[k]) curves_csv << num(p.real()) << ',' << num(p.imag()) << ',' << side_names[k] << '\n';
    sw.mark("region");

    auto levels = level_values(v, d, c.levels);
    InjectivityReport inj = verify_injectivity(map, levels, c.probes, c.seed);
    json lv = json::array();
    for (const auto& l : inj.levels)
      lv.push_back({{"level", l.level}, {"nodes", l.nodes}, {"min_increment", l.min_increment},
                    {"monotone", l.monotone}, {"empty", l.empty}});
    report["hodograph"]["injectivity"] = {{"pass", inj.pass}, {"probes", inj.probes},
                                          {"collisions", inj.collisions}, {"levels", lv}};
    for (std::size_t k = 0; k < inj.curves.size(); ++k) {
      const auto& curve = inj.curves[k];
      if (curve.empty()) continue;
      fig.levels.push_back(curve.nodes);
      for (Point p : curve.nodes)
        curves_csv << num(p.real()) << ',' << num(p.imag()) << ",level." << k << '\n';
    }
    sw.mark("injectivity");

    std::vector<Point> law_pts;
    for (Point z : d.interior_samples(20 * c.law_samples, 1e-3, c.seed + 11)) {
      if (E.contains(z)) law_pts.push_back(z);
      if (law_pts.size() == c.law_samples) break;
    }
    double law = transformation_law_defect(map, f.u->function, law_pts);
    report["hodograph"]["transformation_law"] = {{"samples", law_pts.size()}, {"max_relative_defect", law}};
    sw.mark("transformation law");

    auto interior = verify_no_interior_critical_points(v, d);
    json located = json::array();
    for (const auto& p : interior.located) {
      located.push_back({{"x", p.location.real()}, {"y", p.location.imag()}, {"residual", p.residual}});
      points_csv << num(p.location.real()) << ',' << num(p.location.imag()) << ",1,interior\n";
    }
    report["critical"]["interior"] = {{"count", interior.count},
                                      {"conclusive", interior.conclusive},
                                      {"winding_distance", interior.winding_distance},
                                      {"expected", c.expect_interior},
                                      {"located", located}};
    sw.mark("interior count");

    auto table = boundary_small_gradient_measure(v, d, c.epsilons, c.gradient_samples);
    json fractions = json::array(), ratios = json::array();
    for (double m : table.measure) fractions.push_back(table.total_length > 0 ? m / table.total_length : 0.0);
    for (std::size_t i = 0; i + 1 < table.measure.size(); ++i)
      ratios.push_back(table.measure[i + 1] > 0 ? table.measure[i] / table.measure[i + 1] : 0.0);
    report["critical"]["boundary"] = {{"epsilons", table.epsilons},
                                      {"measure", table.measure},
                                      {"fraction", fractions},
                                      {"ratios", ratios},
                                      {"total_length", table.total_length},
                                      {"nonmonotone_fraction", table.nonmonotone_fraction},
                                      {"warning", table.warning}};
    sw.mark("boundary table");

    ReflectedField U = reflect_odd(map, f.u->function, E, f.reflection_tol);
    report["critical"]["reflection"] = {{"tolerance", U.tolerance()}, {"trace_defect", U.trace_defect()}};
    CriticalSetReport ledger = counting_ledger(*f.cu, map, U, E, table);
    report["critical"]["ledger"] = {{"u", ledger_json(ledger.u)},
                                    {"theta", ledger_json(ledger.theta)},
                                    {"U", ledger_json(ledger.U)},
                                    {"u_contour_check", ledger.u_contour_check},
                                    {"u_cross_check", ledger.u_cross_check},
                                    {"inequality", ledger.inequality},
                                    {"conclusive", ledger.conclusive},
                                    {"offending", ledger.offending}};
    for (const auto& [set, lc] : {std::pair{"u", &ledger.u}, {"theta", &ledger.theta}, {"U", &ledger.U}})
      for (const auto& p : lc->points) {
        points_csv << num(p.location.real()) << ',' << num(p.location.imag()) << ',' << p.multiplicity
                   << ',' << set << '\n';
        if (std::string(set) == "U") fig.image_critical.push_back(p.location);
        else fig.critical.push_back(p.location);
      }
    sw.mark("ledger");

    double fraction_1e3 = 0;
    bool have_1e3 = false;
    for (std::size_t i = 0; i < table.epsilons.size(); ++i)
      if (std::abs(table.epsilons[i] - 1e-3) < 1e-15) {
        fraction_1e3 = table.measure[i] / table.total_length;
        have_1e3 = true;
      }
    bool interior_ok = c.expect_interior == "any" ||
                       (c.expect_interior == "zero" ? interior.count == 0 : interior.count >= 1);
    std::vector<Check> checks{
        {"solver residual within target", !f.v->report.warning && !f.u->report.warning, false},
        {"map invariants", map.usable(), false},
        {"conformal factor identity", md.det_defect <= 1e-10, false},
        {"region inside domain and unit ball", E.outer_inclusion, false},
        {"injectivity", inj.pass, false},
        {"transformation law", !law_pts.empty() && law <= 1e-6, false},
        {"interior critical count", interior_ok, false},
        {"interior count conclusive", interior.conclusive, true},
        {"small-gradient extrapolation monotone", !table.warning, false},
        {"small-gradient measure(1e-3) below 1%", !have_1e3 || fraction_1e3 < 0.01, false},
        {"ledger inequality", ledger.inequality, false},
        {"ledger conclusive", ledger.conclusive, true}};
    res.exit_code = exit_code_for(checks);
    report["status"] = {{"exit_code", res.exit_code}, {"stage", ""}, {"message", ""}, {"checks", checks_json(checks)}};
  } catch (const Error& e) {
    res.exit_code = 1;
    report["status"] = fail_status(e);
    fig.warnings.push_back(std::string("stage ") + e.stage() + " failed: " + e.what());
  }
  if (!fig.region) fig.warnings.push_back("region E missing");
  res.points_csv = points_csv.str();
  res.curves_csv = curves_csv.str();
  res.svg = emit_figure(fig);
  auto problems = validate_against_schema(json::parse(dump_report(report)), report_schema());
  if (!problems.empty()) {
    res.exit_code = 1;
    report["status"]["exit_code"] = 1;
    report["status"]["stage"] = "report";
    report["status"]["message"] = "schema violation: " + problems.front();
  }
  return res;
}

ScenarioResult verify_scenario(const ScenarioConfig& c, bool verbose) {
  ScenarioResult res;
  json& report = res.report;
  report["scenario"] = {{"name", c.name}, {"seed", c.seed}};
  Stopwatch sw(verbose);
  try {
    Front f;
    build_front(c, f, report, sw);
    const Domain& d = *f.domain;
    double a0 = c.rect ? (*c.rect)[0] : 0.5, b0 = c.rect ? (*c.rect)[1] : 0.5;
    HodographMap map = build_map(*f.cv, d, a0, b0, f.v->report.residual);
    const auto& md = map.diagnostics();
    report["hodograph"] = {{"anchor_offset", md.anchor_offset},
                           {"det_defect", md.det_defect},
                           {"boundary_image", md.boundary_image},
                           {"boundary_tolerance", md.boundary_tolerance},
                           {"usable", map.usable()},
                           {"failures", md.failures}};
    sw.mark("map");

    // argument principle total against polished zeros of g' on the bounding box
    auto loc = locate_zeros(derivative_of(*f.cv), d.bounding_box().dilated(-1e-3));
    int m = 0;
    for (const auto& p : loc.points) m += p.multiplicity;
    auto table = boundary_small_gradient_measure(f.v->function, d, c.epsilons, c.gradient_samples);
    bool monotone = std::is_sorted(table.measure.begin(), table.measure.end());
    sw.mark("invariants");

    std::vector<Check> checks{
        {"solver residual within target", !f.v->report.warning && !f.u->report.warning, false},
        {"gradients match finite differences",
         report["analytic"]["v"]["gradient_fd_error"].get<double>() <= 1e-6 &&
             report["analytic"]["u"]["gradient_fd_error"].get<double>() <= 1e-6,
         false},
        {"map invariants", map.usable(), false},
        {"conformal factor identity", md.det_defect <= 1e-10, false},
        {"argument principle matches polished zeros", m == loc.total, false},
        {"zero subdivision conclusive", loc.conclusive, true},
        {"small-gradient table monotone", monotone, false}};
    res.exit_code = exit_code_for(checks);
    report["status"] = {{"exit_code", res.exit_code}, {"stage", ""}, {"message", ""}, {"checks", checks_json(checks)}};
  } catch (const Error& e) {
    res.exit_code = 1;
    report["status"] = fail_status(e);
  }
  return res;
}

void write_outputs(const ScenarioResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw Error("cli", "cannot write " + name + " in " + dir);
    out << text;
  };
  put("report.json", dump_report(r.report));
  put("points.csv", r.points_csv);
  put("curves.csv", r.curves_csv);
  put("figure.svg", r.svg);
}

}  // namespace hodomap
