#pragma once
// Analysis reports: ordered blocks of residual rows, rendered as text and JSON.

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "igh/check.hpp"

namespace igh::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct Row {
  std::string name;
  std::string tolerance_name;  // key accepted by --tol-override; empty when fixed
  double residual = 0.0;
  double tolerance = 0.0;

  bool pass() const { return residual <= tolerance; }
};

struct Block {
  std::string name;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<Row> rows;
  std::vector<std::pair<std::string, std::string>> values;
  std::string error;  // set when the analysis threw
  double seconds = 0.0;

  bool pass() const;
  void add(std::string row, std::string tol_name, double residual, double tolerance) {
    rows.push_back({std::move(row), std::move(tol_name), residual, tolerance});
  }
  void add_table(const CheckTable& t, const std::string& tol_name = "");
  void value(std::string key, std::string v) { values.emplace_back(std::move(key), std::move(v)); }
  void input(std::string key, std::string v) { inputs.emplace_back(std::move(key), std::move(v)); }
};

/// CSV table destined for --export-csv.
struct CsvTable {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct Report {
  std::string spec_name;
  std::string digest;
  unsigned seed = 0;
  std::vector<Block> blocks;
  std::vector<CsvTable> csv;

  bool pass() const;
};

/// Fixed-format number used in reports: 10 significant digits.
std::string fmt(double v);

/// Wall time appears only when `timing` is set, so default output is reproducible.
std::string render_text(const Report& r, bool timing = false);
nlohmann::ordered_json render_json(const Report& r, bool timing = false);

/// Writes header plus rows; throws Error on an unwritable path.
void write_csv(const CsvTable& t, const std::string& path);

}  // namespace igh::cli
