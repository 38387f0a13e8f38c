#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "igh/cli/analyses.hpp"
#include "igh/errors.hpp"

namespace fs = std::filesystem;
using namespace igh::cli;

namespace {

struct Output {
  std::string json_path;
  std::string csv_dir;
  bool timing = false;
};

void add_output(CLI::App* cmd, Output& out) {
  cmd->add_option("--json", out.json_path, "Also write the report as JSON to this path");
  cmd->add_option("--export-csv", out.csv_dir, "Directory for plot-data CSV files");
  cmd->add_flag("--timing", out.timing, "Include wall time per analysis (output no longer reproducible)");
}

int emit(const Report& r, const Output& out) {
  std::cout << render_text(r, out.timing);
  if (!out.json_path.empty()) {
    std::ofstream js(out.json_path, std::ios::binary);
    if (!js) throw igh::Error("cannot write JSON report '" + out.json_path + "'");
    js << render_json(r, out.timing).dump(2) << "\n";
  }
  if (!out.csv_dir.empty()) {
    fs::create_directories(out.csv_dir);
    for (const auto& t : r.csv) write_csv(t, (fs::path(out.csv_dir) / t.file).string());
  }
  return r.pass() ? 0 : 1;
}

std::vector<double> parse_numbers(const std::string& s, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw igh::SpecError(what + ": '" + item + "' is not a number");
    }
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical and Hessian geometry verification toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("igh ") + kToolVersion);

  std::string spec_path;
  std::vector<std::string> analyses;
  std::optional<unsigned> seed;
  std::vector<std::string> tol_overrides;
  Output out;

  auto* check = app.add_subcommand("check", "Run the analyses listed in a spec file");
  check->add_option("spec", spec_path, "Spec file (YAML, schema igh-spec/1)")->required();
  check->add_option("--analysis", analyses, "Comma-separated subset of analyses")->delimiter(',');
  check->add_option("--seed", seed, "Sampling seed (overrides settings.seed)");
  check->add_option("--tol-override", tol_overrides, "Tolerance override name=value (repeatable)");
  add_output(check, out);

  auto* cone = app.add_subcommand("cone", "Lorentz cone checks");
  auto* cone_verify = cone->add_subcommand("verify", "Run every cone verification");
  add_output(cone_verify, out);
  cone->require_subcommand(1);

  int degree = 4, points = 0, max_degree = 0;
  std::string seed_point;
  std::string csv_path;
  bool periodic = false;
  auto* foliate = app.add_subcommand("foliate", "Solve for the solution algebra and trace leaves");
  foliate->add_option("spec", spec_path, "Spec file with chart, metric and connection")->required();
  foliate->add_option("--degree", degree, "Polynomial degree of the search space")->check(CLI::Range(1, 12));
  foliate->add_option("--points", points, "Collocation points (0 chooses automatically)")->check(CLI::NonNegativeNumber);
  foliate->add_option("--max-degree", max_degree, "Degree scan upper bound (default: --degree)");
  foliate->add_option("--seed-point", seed_point, "Leaf seed as comma-separated coordinates");
  foliate->add_option("--seed", seed, "Sampling seed");
  foliate->add_option("--csv", csv_path, "Write the leaf trace CSV to this path");
  foliate->add_flag("--periodic-constraints", periodic, "Also match fields across periodic faces");
  add_output(foliate, out);

  std::string matrix;
  int batch_range = 0;
  auto* topo = app.add_subcommand("topo", "Mapping-torus arithmetic");
  auto* betti = topo->add_subcommand("betti", "Betti numbers of torus bundles");
  auto* matrix_opt = betti->add_option("--matrix", matrix, "Monodromy a,b,c,d (row-major)");
  auto* batch_opt = betti->add_option("--batch-range", batch_range, "Check every matrix with entries in [-N, N]")
                        ->check(CLI::Range(1, 10));
  matrix_opt->excludes(batch_opt);
  add_output(betti, out);
  topo->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) {
      const auto spec = load_spec(spec_path);
      RunOptions opt;
      opt.seed = seed;
      opt.only = analyses;
      for (const auto& kv : tol_overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw igh::SpecError("--tol-override expects name=value, got '" + kv + "'");
        const auto v = parse_numbers(kv.substr(eq + 1), "--tol-override");
        if (v.size() != 1) throw igh::SpecError("--tol-override expects one value for '" + kv.substr(0, eq) + "'");
        opt.tolerance_overrides[kv.substr(0, eq)] = v[0];
      }
      return emit(run_analyses(spec, opt), out);
    }
    if (cone_verify->parsed()) {
      ManifoldSpec spec;
      spec.name = "cone verify";
      Report r;
      r.spec_name = spec.name;
      r.digest = digest("");
      r.blocks.push_back(run_analysis(spec, {"cone-verify", {}, -1}, {}, &r.csv));
      return emit(r, out);
    }
    if (foliate->parsed()) {
      const auto spec = load_spec(spec_path);
      AnalysisRequest req{"foliate", {}, -1};
      for (const auto& a : spec.analyses)
        if (a.name == "foliate") req = a;
      req.options.numbers["degree"] = {double(degree)};
      req.options.numbers["points"] = {double(points)};
      req.options.numbers["max_degree"] = {double(max_degree > 0 ? max_degree : degree)};
      if (periodic) req.options.numbers["periodic_constraints"] = {1.0};
      if (!seed_point.empty()) req.options.numbers["seed_points"] = parse_numbers(seed_point, "--seed-point");
      RunOptions opt;
      opt.seed = seed;
      Report r;
      r.spec_name = spec.name;
      r.digest = digest(spec.text);
      r.seed = seed.value_or(spec.settings.seed);
      r.blocks.push_back(run_analysis(spec, req, opt, &r.csv));
      if (!csv_path.empty())
        for (const auto& t : r.csv)
          if (t.file == "leaf-trace.csv") write_csv(t, csv_path);
      return emit(r, out);
    }
    if (betti->parsed()) {
      if (matrix.empty() && batch_range == 0) throw igh::SpecError("topo betti needs --matrix or --batch-range");
      AnalysisRequest req{"topo-betti", {}, -1};
      if (!matrix.empty()) req.options.numbers["matrices"] = parse_numbers(matrix, "--matrix");
      if (batch_range > 0) req.options.numbers["batch_range"] = {double(batch_range)};
      ManifoldSpec spec;
      spec.name = "topo betti";
      Report r;
      r.spec_name = spec.name;
      r.digest = digest("");
      r.blocks.push_back(run_analysis(spec, req, {}, &r.csv));
      return emit(r, out);
    }
  } catch (const igh::Error& e) {
    std::cerr << "igh: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "igh: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
