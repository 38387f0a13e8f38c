#pragma once
// Manifold spec files: a YAML document with schema "igh-spec/1".

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "igh/expfam.hpp"
#include "igh/tensor.hpp"

namespace igh::cli {

inline constexpr const char* kSchema = "igh-spec/1";

/// Per-analysis options: numbers (scalars or flattened lists), booleans as
/// 0/1, and strings.
struct Options {
  std::map<std::string, std::vector<double>> numbers;
  std::map<std::string, std::string> text;

  bool has(const std::string& key) const { return numbers.count(key) || text.count(key); }
  double number(const std::string& key, double fallback) const;
  bool flag(const std::string& key, bool fallback = false) const { return number(key, fallback ? 1 : 0) != 0; }
  std::vector<double> list(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback = "") const;
};

struct AnalysisRequest {
  std::string name;
  Options options;
  int line = -1;
};

struct Settings {
  unsigned seed = 0;
  int probe_points = 8;
  std::map<std::string, double> tolerances;
};

struct ManifoldSpec {
  std::string name;
  std::string text;  // file contents, for the digest
  std::optional<tensor::ChartSpec> chart;
  std::optional<tensor::MetricField> metric;
  std::optional<expr::Expression> potential;  // when the metric is a Hessian
  std::optional<tensor::ConnectionField> connection;
  std::string connection_kind;
  std::optional<expfam::ExpFamilySpec> expfam;
  std::optional<expfam::GeneralModelSpec> model;
  std::vector<AnalysisRequest> analyses;
  Settings settings;
};

/// Names accepted in the analyses list, in canonical order.
const std::vector<std::string>& analysis_names();

/// Throws SpecError (with a 1-based line when known) on malformed input.
ManifoldSpec load_spec(const std::string& path);
ManifoldSpec load_spec_text(const std::string& text, const std::string& name = "inline");

/// FNV-1a, 64 bit, as 16 hex digits.
std::string digest(const std::string& bytes);

}  // namespace igh::cli
