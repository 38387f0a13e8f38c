#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "igh/cli/analyses.hpp"
#include "igh/cone.hpp"
#include "igh/errors.hpp"
#include "igh/foliation.hpp"
#include "igh/topo.hpp"

namespace igh::cli {

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"fisher", 1e-6},          {"fisher-metric", 1e-5},    {"psd", 1e-12},
      {"cubic", 1e-5},           {"cubic-metric", 1e-5},     {"cubic-symmetry", 1e-10},
      {"duality", 1e-6},         {"alpha", 1e-6},            {"alpha-cubic", 1e-8},
      {"hessian", 1e-8},         {"koszul-routes", 1e-8},    {"koszul-parallel", 1e-5},
      {"koszul-norm", 1e-6},     {"cone-chi0", 1e-3},        {"validation", 1e-6},
      {"closure", 1e-5},         {"leaf-curvature", 1e-5},   {"leaf-symmetry", 1e-6},
      {"dichotomy", 1e-8},
  };
  return t;
}

namespace {

using tensor::Point;

struct Context {
  const ManifoldSpec& spec;
  unsigned seed;
  std::map<std::string, double> tol;
  std::vector<CsvTable>* csv;

  double tolerance(const std::string& key) const { return tol.at(key); }
  const tensor::ChartSpec& chart(const std::string& who) const {
    if (!spec.chart) throw SpecError(who + " needs a chart section");
    return *spec.chart;
  }
  const tensor::MetricField& metric(const std::string& who) const {
    if (!spec.metric) throw SpecError(who + " needs a metric section");
    return *spec.metric;
  }
  const tensor::ConnectionField& connection(const std::string& who) const {
    if (!spec.connection) throw SpecError(who + " needs a connection section");
    return *spec.connection;
  }
  std::vector<Point> probes(const std::string& who) const {
    return tensor::sample_points(chart(who), spec.settings.probe_points, seed);
  }
};

std::string point_str(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + fmt(p[i]);
  return s + ")";
}

std::string matrix_str(const Eigen::MatrixXd& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s += i ? ", [" : "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += (j ? ", " : "") + fmt(m(i, j));
    s += "]";
  }
  return s + "]";
}

double max_gap(const tensor::Tensor3& a, const tensor::Tensor3& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

// Model used for expectation routes: the explicit model section, else the family itself.
std::optional<expfam::StatisticalModel> model_of(const ManifoldSpec& spec) {
  if (spec.model) return expfam::StatisticalModel(*spec.model);
  if (spec.expfam) return expfam::StatisticalModel(expfam::ExponentialFamily(*spec.expfam).as_model());
  return std::nullopt;
}

void fisher(Context& ctx, const AnalysisRequest&, Block& b) {
  const auto pts = ctx.probes("fisher");
  if (!ctx.spec.expfam && !ctx.spec.model) throw SpecError("fisher needs an expfam or model section");
  std::optional<expfam::ExponentialFamily> fam;
  if (ctx.spec.expfam) fam.emplace(*ctx.spec.expfam);
  const auto model = model_of(ctx.spec);
  b.input("probe_points", std::to_string(pts.size()));
  b.input("routes", fam ? "psi-hessian, expectation" : "expectation");

  double routes = 0.0, metric = 0.0, psd = 0.0;
  for (const auto& p : pts) {
    const Eigen::MatrixXd fe = model->fisher(p);
    const double scale = std::max(1.0, fe.cwiseAbs().maxCoeff());
    Eigen::MatrixXd ref = fe;
    if (fam) {
      ref = fam->fisher_from_psi(p);
      routes = std::max(routes, (ref - fe).cwiseAbs().maxCoeff() / scale);
    }
    if (ctx.spec.metric) metric = std::max(metric, (ctx.spec.metric->value(p) - ref).cwiseAbs().maxCoeff() / scale);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fe);
    psd = std::max(psd, std::max(0.0, -es.eigenvalues()[0]) / scale);
  }
  if (fam) b.add("psi route vs expectation route", "fisher", routes, ctx.tolerance("fisher"));
  if (ctx.spec.metric) b.add("metric section vs computed Fisher", "fisher-metric", metric, ctx.tolerance("fisher-metric"));
  b.add("positive semidefinite", "psd", psd, ctx.tolerance("psd"));
  b.value("fisher at " + point_str(pts[0]), matrix_str(fam ? fam->fisher_from_psi(pts[0]) : model->fisher(pts[0])));
}

void cubic(Context& ctx, const AnalysisRequest&, Block& b) {
  const auto pts = ctx.probes("cubic");
  if (!ctx.spec.expfam && !ctx.spec.model) throw SpecError("cubic needs an expfam or model section");
  std::optional<expfam::ExponentialFamily> fam;
  if (ctx.spec.expfam) fam.emplace(*ctx.spec.expfam);
  const auto model = model_of(ctx.spec);
  std::optional<tensor::CubicField> third;
  if (ctx.spec.potential) third = tensor::CubicField::third_derivative_of(*ctx.spec.chart, *ctx.spec.potential);
  b.input("probe_points", std::to_string(pts.size()));

  double routes = 0.0, metric = 0.0, sym = 0.0;
  for (const auto& p : pts) {
    const auto te = model->cubic(p);
    const double scale = std::max(1.0, te.max_abs());
    sym = std::max(sym, tensor::symmetry_residual(te) / scale);
    auto ref = te;
    if (fam) {
      ref = fam->cubic_from_psi(p);
      routes = std::max(routes, max_gap(ref, te) / scale);
    }
    if (third) metric = std::max(metric, max_gap(third->eval(p, 0).t, ref) / scale);
  }
  if (fam) b.add("psi route vs expectation route", "cubic", routes, ctx.tolerance("cubic"));
  if (third) b.add("potential third derivative vs computed", "cubic-metric", metric, ctx.tolerance("cubic-metric"));
  b.add("total symmetry", "cubic-symmetry", sym, ctx.tolerance("cubic-symmetry"));
  const auto t0 = fam ? fam->cubic_from_psi(pts[0]) : model->cubic(pts[0]);
  b.value("max |T| at " + point_str(pts[0]), fmt(t0.max_abs()));
}

void duality(Context& ctx, const AnalysisRequest&, Block& b) {
  const auto& g = ctx.metric("duality");
  const auto& c = ctx.connection("duality");
  const auto pts = ctx.probes("duality");
  const auto dual = tensor::dual_connection(g, c);
  const double tol = ctx.tolerance("duality");
  b.input("connection", ctx.spec.connection_kind);
  b.add("duality formula", "duality", tensor::duality_residual(g, c, dual, pts), tol);
  b.add("dual of dual is the connection", "duality",
        tensor::max_difference(tensor::dual_connection(g, dual), c, pts), tol);
  const double torsion = tensor::max_torsion(dual, pts);
  b.value("dual torsion", fmt(torsion));
  if (torsion <= tol) {
    const auto lc = tensor::levi_civita(g);
    double mean = 0.0;
    for (const auto& p : pts) {
      const auto a = c.eval(p, 0).gamma, d = dual.eval(p, 0).gamma, l = lc.eval(p, 0).gamma;
      for (std::size_t i = 0; i < a.data().size(); ++i)
        mean = std::max(mean, std::abs(0.5 * (a.data()[i] + d.data()[i]) - l.data()[i]));
    }
    b.add("mean of the pair is Levi-Civita", "duality", mean, tol);
  }
}

void alpha_family(Context& ctx, const AnalysisRequest& req, Block& b) {
  const auto& g = ctx.metric("alpha-family");
  const auto& chart = *ctx.spec.chart;
  const auto pts = ctx.probes("alpha-family");
  std::optional<tensor::CubicField> t;
  if (ctx.spec.potential) {
    t = tensor::CubicField::third_derivative_of(chart, *ctx.spec.potential);
    b.input("cubic form", "third derivative of the metric potential");
  } else if (ctx.spec.connection) {
    t = tensor::cubic_form(g, *ctx.spec.connection);
    b.input("cubic form", "nabla g of the " + ctx.spec.connection_kind + " connection");
  } else {
    throw SpecError("alpha-family needs a Hessian potential or a connection for its cubic form");
  }
  auto alphas = req.options.list("alphas");
  if (alphas.empty()) alphas = {-1.0, -0.5, 0.5, 1.0};
  std::string list;
  for (double a : alphas) list += (list.empty() ? "" : ", ") + fmt(a);
  b.input("alphas", list);

  const auto lc = tensor::levi_civita(g);
  const auto model = model_of(ctx.spec);
  auto member = [&](double a) { return tensor::alpha_connection(lc, *t, 0.0, a, g); };

  b.add("alpha 0 is Levi-Civita", "alpha", tensor::max_difference(member(0.0), lc, pts), ctx.tolerance("alpha"));
  for (double a : alphas) {
    const auto ca = member(a);
    const auto cubic = tensor::cubic_form(g, ca);
    double gap = 0.0;
    for (const auto& p : pts) {
      const auto want = t->eval(p, 0).t;
      const auto got = cubic.eval(p, 0).t;
      double m = 0.0;
      for (std::size_t i = 0; i < want.data().size(); ++i) m = std::max(m, std::abs(got.data()[i] - a * want.data()[i]));
      gap = std::max(gap, m / std::max(1.0, want.max_abs()));
    }
    b.add("nabla^(" + fmt(a) + ") g = " + fmt(a) + " T", "alpha-cubic", gap, ctx.tolerance("alpha-cubic"));
    b.add("alpha " + fmt(a) + " and " + fmt(-a) + " are dual", "duality",
          tensor::duality_residual(g, ca, member(-a), pts), ctx.tolerance("duality"));
  }
  if (model) {
    std::vector<double> all{0.0};
    all.insert(all.end(), alphas.begin(), alphas.end());
    for (double a : all) {
      const auto ca = member(a);
      double gap = 0.0;
      for (const auto& p : pts) {
        const auto want = model->alpha_christoffel(p, a);
        const auto got = tensor::lower(g.eval(p, 1), ca.eval(p, 0)).low;
        gap = std::max(gap, max_gap(want, got) / std::max(1.0, want.max_abs()));
      }
      b.add("expectation route, alpha " + fmt(a), "alpha", gap, ctx.tolerance("alpha"));
    }
  }
}

void hessian_criteria(Context& ctx, const AnalysisRequest&, Block& b) {
  const auto& g = ctx.metric("hessian-criteria");
  const auto& c = ctx.connection("hessian-criteria");
  const auto pts = tensor::default_samples(ctx.chart("hessian-criteria"), ctx.seed);
  const auto r = tensor::hessian_criteria(g, c, pts, ctx.tolerance("hessian"));
  b.input("samples", std::to_string(pts.size()));
  b.input("connection", ctx.spec.connection_kind);
  b.add_table(r.table(), "hessian");
  b.value("flat", r.flat ? "yes" : "no");
  b.value("affine chart", r.affine_chart ? "yes" : "no");
  b.value("hessian structure", r.hessian ? "yes" : "no");
  b.value("criteria agree", r.agree ? "yes" : "no");
}

void koszul(Context& ctx, const AnalysisRequest& req, Block& b) {
  const auto& g = ctx.metric("koszul");
  const auto& c = ctx.connection("koszul");
  const auto pts = ctx.probes("koszul");
  double routes = 0.0, parallel = 0.0, lo = INFINITY, hi = 0.0;
  for (const auto& p : pts) {
    const auto k = tensor::koszul_form(g, c, p);
    routes = std::max(routes, (k.log_det_route - k.trace_route).cwiseAbs().maxCoeff());
    parallel = std::max(parallel, k.parallel.cwiseAbs().maxCoeff());
    lo = std::min(lo, k.norm);
    hi = std::max(hi, k.norm);
  }
  b.input("probe_points", std::to_string(pts.size()));
  b.add("log-det route vs trace route", "koszul-routes", routes, ctx.tolerance("koszul-routes"));
  if (req.options.flag("parallel")) b.add("D-parallel", "koszul-parallel", parallel, ctx.tolerance("koszul-parallel"));
  if (req.options.flag("constant_norm"))
    b.add("norm constancy", "koszul-norm", hi - lo, ctx.tolerance("koszul-norm"));
  const auto k0 = tensor::koszul_form(g, c, pts[0]);
  b.value("beta at " + point_str(pts[0]), matrix_str(k0.log_det_route.transpose()));
  b.value("norm range", "[" + fmt(lo) + ", " + fmt(hi) + "]");
}

void cone_verify(Context& ctx, const AnalysisRequest&, Block& b) {
  const auto r = cone::verify();
  const double two_pi = 2.0 * std::numbers::pi;
  b.add("chi(0,0,1) = 2 pi, relative", "cone-chi0", std::abs(r.chi0.value - two_pi) / two_pi, ctx.tolerance("cone-chi0"));
  b.add_table(r.table());
  b.value("chi0", fmt(r.chi0.value));
  b.value("2 pi", fmt(two_pi));
  b.value("koszul norm", fmt(r.koszul_norm));
  b.value("isometry grid points", std::to_string(r.isometry.points));
  if (ctx.csv) {
    CsvTable t{"isometry-grid.csv", {"t", "r", "alpha", "residual"}, {}};
    for (const auto& row : r.isometry.grid) t.rows.push_back({row[0], row[1], row[2], row[3]});
    ctx.csv->push_back(std::move(t));
  }
}

std::string solution_str(const foliation::SolutionBasis& s, int j) {
  std::vector<std::pair<double, int>> terms;
  for (int i = 0; i < s.basis.size(); ++i)
    if (std::abs(s.coeffs(i, j)) > 1e-8) terms.push_back({s.coeffs(i, j), i});
  std::string out;
  const std::size_t shown = std::min<std::size_t>(terms.size(), 6);
  for (std::size_t t = 0; t < shown; ++t) out += (t ? " + " : "") + fmt(terms[t].first) + " " + s.basis.label(terms[t].second);
  if (terms.size() > shown) out += " + ...";
  return out.empty() ? "0" : out;
}

void foliate(Context& ctx, const AnalysisRequest& req, Block& b) {
  const auto& c = ctx.connection("foliate");
  const auto& chart = ctx.chart("foliate");
  const auto& o = req.options;
  foliation::SolveOptions so;
  so.degree = static_cast<int>(o.number("degree", 4));
  so.points = static_cast<int>(o.number("points", 0));
  so.seed = ctx.seed;
  so.validation_tolerance = ctx.tolerance("validation");
  so.periodic_constraints = o.flag("periodic_constraints");
  const int max_degree = static_cast<int>(o.number("max_degree", so.degree));
  const int steps = static_cast<int>(o.number("steps", 6));
  const double step = o.number("step", 0.05);

  std::vector<Point> seeds;
  const auto flat = o.list("seed_points");
  const auto n = static_cast<std::size_t>(chart.dim());
  if (flat.size() % n != 0) throw SpecError("seed_points must list whole points of dimension " + std::to_string(n));
  for (std::size_t i = 0; i < flat.size(); i += n) seeds.emplace_back(flat.begin() + i, flat.begin() + i + n);
  if (seeds.empty()) {
    Point mid;
    for (const auto& iv : chart.box) mid.push_back(0.5 * (iv[0] + iv[1]));
    seeds.push_back(mid);
  }

  b.input("degree", std::to_string(so.degree));
  b.input("connection", ctx.spec.connection_kind);
  b.input("periodic constraints", so.periodic_constraints ? "yes" : "no");

  const auto s = foliation::solve_solution_space(c, so);
  b.input("collocation points", std::to_string(s.collocation_points));
  double worst = 0.0;
  for (double r : s.residuals) worst = std::max(worst, r);
  b.add("validation residual", "validation", worst, ctx.tolerance("validation"));

  const auto scan = foliation::degree_scan(c, max_degree, so);
  b.add("dimension stable at top degree", "", scan.degree_too_low ? 1.0 : 0.0, 0.0);
  if (o.has("expect_k"))
    b.add("dimension matches expected " + fmt(o.number("expect_k", 0)), "",
          std::abs(s.k() - o.number("expect_k", 0)), 0.0);
  const auto closure = foliation::product_closure_check(c, s, ctx.seed + 17);
  b.add_table(closure.table(ctx.tolerance("closure")), "closure");

  b.value("k", std::to_string(s.k()));
  b.value("null candidates", std::to_string(s.candidates));
  b.value("condition", fmt(s.condition));
  b.value("ill-conditioned", s.ill_conditioned ? "yes" : "no");
  std::string dims;
  for (std::size_t i = 0; i < scan.degrees.size(); ++i)
    dims += (i ? " " : "") + std::to_string(scan.degrees[i]) + ":" + std::to_string(scan.dims[i]);
  b.value("k by degree", dims);
  b.value("stable from degree", std::to_string(scan.stable_from));
  for (int j = 0; j < s.k(); ++j) b.value("solution " + std::to_string(j), solution_str(s, j));

  CsvTable trace{"leaf-trace.csv", chart.names, {}};
  trace.header.push_back("leaf_id");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto tag = " @" + point_str(seeds[i]);
    const int rank = foliation::leaf_rank(s, seeds[i]);
    b.value("leaf rank" + tag, std::to_string(rank));
    if (rank == 0) continue;
    const auto leaf = foliation::trace_leaf(s, seeds[i], steps, step);
    int jitter = 0;
    for (int r : leaf.ranks) jitter = std::max(jitter, std::abs(r - leaf.rank_at_seed));
    b.add("rank constant along leaf" + tag, "", jitter, 0.0);
    b.value("traced points" + tag, std::to_string(leaf.points.size()) + (leaf.exited ? " (clipped at chart edge)" : ""));
    for (const auto& p : leaf.points) {
      std::vector<double> row(p.begin(), p.end());
      row.push_back(static_cast<double>(i));
      trace.rows.push_back(std::move(row));
    }
    if (ctx.spec.metric) {
      const auto h = foliation::leaf_hessian_check(*ctx.spec.metric, c, s, seeds[i]);
      b.add("leaf curvature" + tag, "leaf-curvature", h.curvature, ctx.tolerance("leaf-curvature"));
      b.add("leaf nabla g symmetry" + tag, "leaf-symmetry", h.symmetry, ctx.tolerance("leaf-symmetry"));
    }
  }
  if (ctx.csv) ctx.csv->push_back(std::move(trace));
}

void topo_betti(Context& ctx, const AnalysisRequest& req, Block& b) {
  const auto flat = req.options.list("matrices");
  if (flat.size() % 4 != 0) throw SpecError("matrices must be listed as groups of four integers a,b,c,d");
  const int range = static_cast<int>(req.options.number("batch_range", 0));
  if (flat.empty() && range <= 0) throw SpecError("topo-betti needs 'matrices' or 'batch_range'");

  CsvTable table{"betti.csv", {"a", "b", "c", "d", "order", "b0", "b1", "b2", "b3"}, {}};
  auto row = [&](const topo::MonodromyMatrix& a, int order, const topo::Betti& bt) {
    table.rows.push_back({double(a(0, 0)), double(a(0, 1)), double(a(1, 0)), double(a(1, 1)), double(order),
                          double(bt[0]), double(bt[1]), double(bt[2]), double(bt[3])});
  };
  auto betti_str = [](const topo::Betti& bt) {
    return "(" + std::to_string(bt[0]) + "," + std::to_string(bt[1]) + "," + std::to_string(bt[2]) + "," +
           std::to_string(bt[3]) + ")";
  };

  int even = 0;
  for (std::size_t i = 0; i < flat.size(); i += 4) {
    for (std::size_t k = i; k < i + 4; ++k)
      if (flat[k] != std::floor(flat[k])) throw SpecError("monodromy entries must be integers");
    const topo::MonodromyMatrix a(long(flat[i]), long(flat[i + 1]), long(flat[i + 2]), long(flat[i + 3]));
    const auto order = topo::is_periodic(a);
    if (!order) {
      b.value(a.to_string(), "rejected: not periodic (trace " + std::to_string(a.trace()) + ")");
      continue;
    }
    const auto bt = topo::mapping_torus_betti(a);
    even += !topo::parity_check(bt);
    row(a, *order, bt);
    b.value(a.to_string(), "order " + std::to_string(*order) + ", betti " + betti_str(bt) +
                               (topo::parity_check(bt) ? ", all odd" : ", EVEN ENTRY"));
  }
  if (!flat.empty()) b.add("listed matrices with an even Betti number", "", even, 0.0);

  if (range > 0) {
    b.input("batch range", "[" + std::to_string(-range) + ", " + std::to_string(range) + "]");
    int periodic = 0, rejected = 0, bad_order = 0, batch_even = 0, accepted_shears = 0;
    for (const auto& a : topo::enumerate_sl2(range)) {
      const auto order = topo::is_periodic(a);
      if (!order) {
        ++rejected;
        try {
          topo::mapping_torus_betti(a);
          ++accepted_shears;
        } catch (const DomainError&) {
        }
        continue;
      }
      ++periodic;
      topo::MonodromyMatrix p = a;
      for (int i = 1; i < *order; ++i) p = p * a;
      bad_order += !p.is_identity();
      const auto bt = topo::mapping_torus_betti(a);
      batch_even += !topo::parity_check(bt);
      row(a, *order, bt);
    }
    b.add("periodic matrices with an even Betti number", "", batch_even, 0.0);
    b.add("periodic matrices whose order power is not I", "", bad_order, 0.0);
    b.add("non-periodic matrices accepted", "", accepted_shears, 0.0);
    b.value("determinant-one matrices", std::to_string(periodic + rejected));
    b.value("periodic", std::to_string(periodic));
    b.value("rejected", std::to_string(rejected));
  }
  if (ctx.csv) ctx.csv->push_back(std::move(table));
}

void dichotomy(Context& ctx, const AnalysisRequest& req, Block& b) {
  const auto& g = ctx.metric("dichotomy");
  const auto& c = ctx.connection("dichotomy");
  const auto pts = ctx.probes("dichotomy");
  double beta = 0.0;
  for (const auto& p : pts) beta = std::max(beta, tensor::koszul_form(g, c, p).norm);
  const double curv = tensor::max_curvature(tensor::levi_civita(g), pts);
  const double tol = ctx.tolerance("dichotomy");
  b.input("tolerance", "dichotomy=" + fmt(tol));
  b.value("koszul norm", fmt(beta));
  b.value("metric curvature norm", fmt(curv));
  std::optional<topo::MonodromyMatrix> mono;
  const auto m = req.options.list("monodromy");
  if (!m.empty()) {
    if (m.size() != 4) throw SpecError("monodromy must be four integers a,b,c,d");
    mono.emplace(long(m[0]), long(m[1]), long(m[2]), long(m[3]));
  }
  const auto r = topo::leaf_topology(beta, curv, tol, mono);
  b.value("branch", std::string(topo::dichotomy_name(r.dichotomy)));
  if (r.betti) {
    const auto& bt = *r.betti;
    b.value("betti", "(" + std::to_string(bt[0]) + "," + std::to_string(bt[1]) + "," + std::to_string(bt[2]) + "," +
                         std::to_string(bt[3]) + ")");
    b.add("odd Betti numbers", "", r.all_odd ? 0.0 : 1.0, 0.0);
  }
  const auto expect = req.options.str("expect");
  if (!expect.empty()) {
    if (expect != "flat" && expect != "mapping-torus") throw SpecError("expect must be 'flat' or 'mapping-torus'");
    b.add("branch is " + expect, "", expect == topo::dichotomy_name(r.dichotomy) ? 0.0 : 1.0, 0.0);
  }
}

using Runner = std::function<void(Context&, const AnalysisRequest&, Block&)>;

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> r{
      {"fisher", fisher},       {"cubic", cubic},     {"duality", duality},         {"alpha-family", alpha_family},
      {"hessian-criteria", hessian_criteria},         {"koszul", koszul},           {"cone-verify", cone_verify},
      {"foliate", foliate},     {"topo-betti", topo_betti}, {"dichotomy", dichotomy},
  };
  return r;
}

std::map<std::string, double> merged_tolerances(const ManifoldSpec& spec, const RunOptions& opt) {
  auto tol = default_tolerances();
  auto apply = [&](const std::map<std::string, double>& src, const std::string& where) {
    for (const auto& [k, v] : src) {
      if (!tol.count(k)) throw SpecError("unknown tolerance name '" + k + "' in " + where);
      tol[k] = v;
    }
  };
  apply(spec.settings.tolerances, "settings.tolerances");
  apply(opt.tolerance_overrides, "--tol-override");
  return tol;
}

}  // namespace

Block run_analysis(const ManifoldSpec& spec, const AnalysisRequest& req, const RunOptions& opt,
                   std::vector<CsvTable>* csv) {
  const auto it = registry().find(req.name);
  if (it == registry().end()) throw SpecError("unknown analysis '" + req.name + "'");
  Context ctx{spec, opt.seed.value_or(spec.settings.seed), merged_tolerances(spec, opt), csv};
  AnalysisRequest merged = req;
  if (auto o = opt.option_overrides.find(req.name); o != opt.option_overrides.end()) {
    for (const auto& [k, v] : o->second.numbers) merged.options.numbers[k] = v;
    for (const auto& [k, v] : o->second.text) merged.options.text[k] = v;
  }
  Block b;
  b.name = req.name;
  const auto start = std::chrono::steady_clock::now();
  try {
    it->second(ctx, merged, b);
  } catch (const Error& e) {
    b.error = e.what();
  } catch (const std::exception& e) {
    b.error = std::string("internal: ") + e.what();
  }
  b.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return b;
}

Report run_analyses(const ManifoldSpec& spec, const RunOptions& opt) {
  merged_tolerances(spec, opt);  // reject unknown names before running anything
  for (const auto& name : opt.only)
    if (!registry().count(name)) throw SpecError("unknown analysis '" + name + "'");

  Report r;
  r.spec_name = spec.name;
  r.digest = digest(spec.text);
  r.seed = opt.seed.value_or(spec.settings.seed);
  auto wanted = [&](const std::string& n) {
    return opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), n) != opt.only.end();
  };
  for (const auto& req : spec.analyses)
    if (wanted(req.name)) r.blocks.push_back(run_analysis(spec, req, opt, &r.csv));
  // requested on the command line but absent from the spec: default options
  for (const auto& name : opt.only) {
    bool listed = false;
    for (const auto& req : spec.analyses) listed = listed || req.name == name;
    if (!listed) r.blocks.push_back(run_analysis(spec, {name, {}, -1}, opt, &r.csv));
  }
  return r;
}

}  // namespace igh::cli
