#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "igh/cli/spec.hpp"
#include "igh/errors.hpp"

namespace igh::cli {

double Options::number(const std::string& key, double fallback) const {
  auto it = numbers.find(key);
  if (it == numbers.end()) return fallback;
  if (it->second.size() != 1) throw SpecError("option '" + key + "' must be a single number");
  return it->second.front();
}

std::vector<double> Options::list(const std::string& key) const {
  auto it = numbers.find(key);
  return it == numbers.end() ? std::vector<double>{} : it->second;
}

std::string Options::str(const std::string& key, const std::string& fallback) const {
  auto it = text.find(key);
  return it == text.end() ? fallback : it->second;
}

const std::vector<std::string>& analysis_names() {
  static const std::vector<std::string> names{"fisher",   "cubic",       "duality", "alpha-family",
                                              "hessian-criteria", "koszul", "cone-verify", "foliate",
                                              "topo-betti", "dichotomy"};
  return names;
}

std::string digest(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : -1; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& what) { throw SpecError(what, line_of(n)); }

const std::map<std::string, std::set<std::string>>& allowed_options() {
  static const std::map<std::string, std::set<std::string>> m{
      {"fisher", {}},
      {"cubic", {}},
      {"duality", {}},
      {"alpha-family", {"alphas"}},
      {"hessian-criteria", {}},
      {"koszul", {"parallel", "constant_norm"}},
      {"cone-verify", {}},
      {"foliate",
       {"degree", "points", "max_degree", "expect_k", "seed_points", "periodic_constraints", "steps", "step"}},
      {"topo-betti", {"matrices", "batch_range"}},
      {"dichotomy", {"expect", "monodromy"}},
  };
  return m;
}

void require_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& section) {
  if (!map.IsMap()) fail(map, "section '" + section + "' must be a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in section '" + section + "'");
  }
}

double as_double(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + " must be a number");
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    fail(n, what + " must be a number, got '" + n.Scalar() + "'");
  }
}

std::string as_string(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + " must be a scalar");
  return n.Scalar();
}

expr::Expression as_expr(const YAML::Node& n, const std::string& what) {
  const auto s = as_string(n, what);
  try {
    return expr::parse_expr(s);
  } catch (const ParseError& e) {
    fail(n, "cannot parse " + what + " '" + s + "': " + e.what());
  }
}

std::vector<std::string> string_list(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence()) fail(n, what + " must be a list");
  std::vector<std::string> out;
  for (const auto& x : n) out.push_back(as_string(x, what));
  return out;
}

std::vector<expr::Expression> expr_list(const YAML::Node& n, std::size_t want, const std::string& what) {
  if (!n.IsSequence()) fail(n, what + " must be a list");
  if (want && n.size() != want)
    fail(n, what + " has " + std::to_string(n.size()) + " entries, expected " + std::to_string(want));
  std::vector<expr::Expression> out;
  for (const auto& x : n) out.push_back(as_expr(x, what));
  return out;
}

tensor::ChartSpec load_chart(const YAML::Node& n) {
  require_keys(n, {"names", "box", "periodic"}, "chart");
  if (!n["names"] || !n["box"]) fail(n, "chart needs 'names' and 'box'");
  tensor::ChartSpec c;
  c.names = string_list(n["names"], "chart names");
  const auto& box = n["box"];
  if (!box.IsSequence() || box.size() != c.names.size())
    fail(box, "chart box needs one [lo, hi] pair per coordinate (" + std::to_string(c.names.size()) + ")");
  for (const auto& iv : box) {
    if (!iv.IsSequence() || iv.size() != 2) fail(iv, "chart box entries must be [lo, hi]");
    c.box.push_back({as_double(iv[0], "box bound"), as_double(iv[1], "box bound")});
  }
  if (n["periodic"]) {
    const auto& p = n["periodic"];
    if (!p.IsSequence() || p.size() != c.names.size()) fail(p, "periodic needs one flag per coordinate");
    for (const auto& f : p) c.periodic.push_back(f.as<bool>());
  }
  try {
    c.validate();
  } catch (const SpecError& e) {
    fail(n, e.what());
  }
  return c;
}

expfam::SampleSpace load_sample(const YAML::Node& n) {
  require_keys(n, {"kind", "name", "values", "lo", "hi", "panels", "nodes"}, "sample");
  const auto kind = n["kind"] ? as_string(n["kind"], "sample kind") : "";
  const auto name = n["name"] ? as_string(n["name"], "sample name") : "x";
  expfam::SampleSpace s;
  try {
    if (kind == "discrete") {
      if (!n["values"] || !n["values"].IsSequence()) fail(n, "discrete sample needs a 'values' list");
      std::vector<double> v;
      for (const auto& x : n["values"]) v.push_back(as_double(x, "sample value"));
      s = expfam::SampleSpace::discrete(name, v);
    } else if (kind == "gauss-legendre") {
      for (const char* k : {"lo", "hi", "panels", "nodes"})
        if (!n[k]) fail(n, std::string("gauss-legendre sample needs '") + k + "'");
      s = expfam::SampleSpace::gauss_legendre(name, as_double(n["lo"], "lo"), as_double(n["hi"], "hi"),
                                              static_cast<int>(as_double(n["panels"], "panels")),
                                              static_cast<int>(as_double(n["nodes"], "nodes")));
    } else {
      fail(n, "sample kind must be 'discrete' or 'gauss-legendre'");
    }
    s.validate();
  } catch (const SpecError& e) {
    if (e.line() >= 0) throw;
    fail(n, e.what());
  }
  return s;
}

Options load_options(const YAML::Node& n, const std::string& analysis) {
  Options o;
  const auto& allowed = allowed_options().at(analysis);
  require_keys(n, allowed, analysis);
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    const auto& v = kv.second;
    std::vector<double> flat;
    bool numeric = true;
    auto push = [&](const YAML::Node& x, auto& self) -> void {
      if (x.IsSequence()) {
        for (const auto& y : x) self(y, self);
      } else if (x.IsScalar()) {
        if (x.Scalar() == "true" || x.Scalar() == "false") {
          flat.push_back(x.Scalar() == "true" ? 1.0 : 0.0);
          return;
        }
        try {
          flat.push_back(x.as<double>());
        } catch (const YAML::Exception&) {
          numeric = false;
        }
      } else {
        fail(x, "option '" + key + "' has an unsupported shape");
      }
    };
    push(v, push);
    if (numeric) {
      o.numbers[key] = flat;
    } else {
      o.text[key] = as_string(v, "option '" + key + "'");
    }
  }
  return o;
}

void load_analyses(const YAML::Node& n, ManifoldSpec& spec) {
  if (!n.IsSequence()) fail(n, "analyses must be a list");
  const auto& names = analysis_names();
  for (const auto& item : n) {
    AnalysisRequest req;
    req.line = line_of(item);
    YAML::Node opts;
    if (item.IsScalar()) {
      req.name = item.Scalar();
    } else if (item.IsMap() && item.size() == 1) {
      req.name = item.begin()->first.as<std::string>();
      opts = item.begin()->second;
    } else {
      fail(item, "analysis entries are names or single-key mappings name: {options}");
    }
    if (std::find(names.begin(), names.end(), req.name) == names.end()) fail(item, "unknown analysis '" + req.name + "'");
    if (opts && !opts.IsNull()) req.options = load_options(opts, req.name);
    spec.analyses.push_back(std::move(req));
  }
}

void load_metric(const YAML::Node& n, ManifoldSpec& spec) {
  require_keys(n, {"matrix", "hessian"}, "metric");
  if (!spec.chart) fail(n, "metric needs a chart section");
  if (bool(n["matrix"]) == bool(n["hessian"])) fail(n, "metric needs exactly one of 'matrix' or 'hessian'");
  const auto dim = static_cast<std::size_t>(spec.chart->dim());
  try {
    if (n["hessian"]) {
      spec.potential = as_expr(n["hessian"], "metric potential");
      spec.metric = tensor::MetricField::hessian_of(*spec.chart, *spec.potential);
    } else {
      const auto& m = n["matrix"];
      if (!m.IsSequence() || m.size() != dim)
        fail(m, "metric matrix must have " + std::to_string(dim) + " rows, one per coordinate");
      std::vector<std::vector<expr::Expression>> rows;
      for (const auto& r : m) {
        if (!r.IsSequence() || r.size() != dim)
          fail(r, "metric row has " + std::to_string(r.IsSequence() ? r.size() : 0) + " entries, expected " +
                      std::to_string(dim));
        rows.push_back(expr_list(r, dim, "metric entry"));
      }
      spec.metric = tensor::MetricField(*spec.chart, rows);
    }
  } catch (const SpecError& e) {
    if (e.line() >= 0) throw;
    fail(n, e.what());
  } catch (const Error& e) {
    fail(n, std::string("metric: ") + e.what());
  }
}

void load_connection(const YAML::Node& n, ManifoldSpec& spec) {
  require_keys(n, {"kind", "components", "xi", "epsilon", "alpha"}, "connection");
  if (!spec.chart) fail(n, "connection needs a chart section");
  if (!n["kind"]) fail(n, "connection needs a 'kind'");
  const auto kind = as_string(n["kind"], "connection kind");
  const auto& chart = *spec.chart;
  const auto dim = static_cast<std::size_t>(chart.dim());
  auto need_metric = [&] {
    if (!spec.metric) fail(n, "connection kind '" + kind + "' needs a metric section");
  };
  auto only = [&](std::set<std::string> keys) {
    keys.insert("kind");
    for (const auto& kv : n)
      if (!keys.count(kv.first.as<std::string>()))
        fail(kv.first, "key '" + kv.first.as<std::string>() + "' does not apply to connection kind '" + kind + "'");
  };
  spec.connection_kind = kind;
  try {
    if (kind == "flat") {
      only({});
      spec.connection = tensor::ConnectionField::flat(chart);
    } else if (kind == "levi-civita") {
      only({});
      need_metric();
      spec.connection = tensor::levi_civita(*spec.metric);
    } else if (kind == "christoffel") {
      only({"components"});
      const auto& c = n["components"];
      if (!c || !c.IsSequence() || c.size() != dim) fail(n, "christoffel components need shape dim x dim x dim");
      std::vector<std::vector<std::vector<expr::Expression>>> comps;
      for (const auto& k : c) {
        if (!k.IsSequence() || k.size() != dim) fail(k, "christoffel components need shape dim x dim x dim");
        comps.emplace_back();
        for (const auto& i : k) comps.back().push_back(expr_list(i, dim, "christoffel entry"));
      }
      spec.connection = tensor::ConnectionField::from_expressions(chart, comps);
    } else if (kind == "xi-construction") {
      only({"xi", "epsilon"});
      need_metric();
      if (!n["xi"] || !n["epsilon"]) fail(n, "xi-construction needs 'xi' and 'epsilon'");
      spec.connection = tensor::xi_statistical(*spec.metric, expr_list(n["xi"], dim, "xi component"),
                                               as_double(n["epsilon"], "epsilon")).first;
    } else if (kind == "alpha") {
      only({"alpha"});
      need_metric();
      if (!spec.potential) fail(n, "alpha connection needs a metric given as 'hessian' of a potential");
      if (!n["alpha"]) fail(n, "alpha connection needs 'alpha'");
      const double a = as_double(n["alpha"], "alpha");
      spec.connection = tensor::alpha_connection(tensor::levi_civita(*spec.metric),
                                                 tensor::CubicField::third_derivative_of(chart, *spec.potential),
                                                 0.0, a, *spec.metric);
    } else {
      fail(n["kind"], "connection kind must be flat, levi-civita, christoffel, xi-construction or alpha");
    }
  } catch (const SpecError& e) {
    if (e.line() >= 0) throw;
    fail(n, e.what());
  } catch (const Error& e) {
    fail(n, std::string("connection: ") + e.what());
  }
}

void load_expfam(const YAML::Node& n, ManifoldSpec& spec) {
  require_keys(n, {"sample", "carrier", "statistics"}, "expfam");
  if (!spec.chart) fail(n, "expfam needs a chart section for its natural parameters");
  if (!n["sample"] || !n["statistics"]) fail(n, "expfam needs 'sample' and 'statistics'");
  expfam::ExpFamilySpec f;
  f.sample = load_sample(n["sample"]);
  f.carrier = n["carrier"] ? as_expr(n["carrier"], "carrier") : expr::number(0.0);
  f.statistics = expr_list(n["statistics"], spec.chart->dim(), "statistic");
  f.params = *spec.chart;
  try {
    f.validate();
  } catch (const SpecError& e) {
    fail(n, e.what());
  }
  spec.expfam = std::move(f);
}

void load_model(const YAML::Node& n, ManifoldSpec& spec) {
  require_keys(n, {"sample", "log_density", "auto_normalize"}, "model");
  if (!spec.chart) fail(n, "model needs a chart section for its parameters");
  if (!n["sample"] || !n["log_density"]) fail(n, "model needs 'sample' and 'log_density'");
  expfam::GeneralModelSpec m;
  m.sample = load_sample(n["sample"]);
  m.params = *spec.chart;
  m.log_density = as_expr(n["log_density"], "log density");
  m.auto_normalize = n["auto_normalize"] && n["auto_normalize"].as<bool>();
  spec.model = std::move(m);
}

void load_settings(const YAML::Node& n, ManifoldSpec& spec) {
  require_keys(n, {"seed", "probe_points", "tolerances"}, "settings");
  if (n["seed"]) spec.settings.seed = static_cast<unsigned>(as_double(n["seed"], "seed"));
  if (n["probe_points"]) {
    spec.settings.probe_points = static_cast<int>(as_double(n["probe_points"], "probe_points"));
    if (spec.settings.probe_points < 1) fail(n["probe_points"], "probe_points must be positive");
  }
  if (n["tolerances"]) {
    if (!n["tolerances"].IsMap()) fail(n["tolerances"], "tolerances must be a mapping name: value");
    for (const auto& kv : n["tolerances"]) {
      const double v = as_double(kv.second, "tolerance");
      if (!(v >= 0.0)) fail(kv.second, "tolerances must be non-negative");
      spec.settings.tolerances[kv.first.as<std::string>()] = v;
    }
  }
}

}  // namespace

ManifoldSpec load_spec_text(const std::string& text, const std::string& name) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw SpecError("YAML syntax: " + e.msg, e.mark.line >= 0 ? e.mark.line + 1 : -1);
  }
  if (!root.IsMap()) throw SpecError("spec must be a YAML mapping", 1);
  require_keys(root, {"schema", "name", "chart", "metric", "connection", "expfam", "model", "analyses", "settings"},
               "top level");
  if (!root["schema"] || root["schema"].Scalar() != kSchema)
    throw SpecError(std::string("missing or unsupported schema; expected 'schema: ") + kSchema + "'",
                    root["schema"] ? line_of(root["schema"]) : 1);

  ManifoldSpec spec;
  spec.text = text;
  spec.name = root["name"] ? as_string(root["name"], "name") : name;
  // order matters: later sections refer to earlier ones
  if (root["chart"]) spec.chart = load_chart(root["chart"]);
  if (root["metric"]) load_metric(root["metric"], spec);
  if (root["connection"]) load_connection(root["connection"], spec);
  if (root["expfam"]) load_expfam(root["expfam"], spec);
  if (root["model"]) load_model(root["model"], spec);
  if (root["settings"]) load_settings(root["settings"], spec);
  if (root["analyses"] && !root["analyses"].IsNull()) load_analyses(root["analyses"], spec);
  return spec;
}

ManifoldSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  auto stem = path.substr(path.find_last_of('/') + 1);
  stem = stem.substr(0, stem.find('.'));
  return load_spec_text(ss.str(), stem);
}

}  // namespace igh::cli
