#pragma once
// Analysis registry: runs the analyses a spec requests and collects a report.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "igh/cli/report.hpp"
#include "igh/cli/spec.hpp"

namespace igh::cli {

struct RunOptions {
  std::optional<unsigned> seed;                  // overrides settings.seed
  std::vector<std::string> only;                 // restrict to these analyses, empty runs all
  std::map<std::string, double> tolerance_overrides;
  std::map<std::string, Options> option_overrides;  // merged into the per-analysis options
};

/// Default tolerance for every overridable key.
const std::map<std::string, double>& default_tolerances();

/// Runs analyses in the order the spec lists them. Throws SpecError on
/// unknown tolerance names or analysis names; analysis failures are recorded
/// in their blocks.
Report run_analyses(const ManifoldSpec& spec, const RunOptions& opt = {});

/// Single analysis with explicit options, for the dedicated subcommands.
Block run_analysis(const ManifoldSpec& spec, const AnalysisRequest& req, const RunOptions& opt,
                   std::vector<CsvTable>* csv = nullptr);

}  // namespace igh::cli
