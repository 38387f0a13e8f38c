#include <cstdio>
#include <fstream>
#include <sstream>

#include "igh/cli/report.hpp"
#include "igh/errors.hpp"

namespace igh::cli {

bool Block::pass() const {
  if (!error.empty()) return false;
  for (const auto& r : rows)
    if (!r.pass()) return false;
  return true;
}

void Block::add_table(const CheckTable& t, const std::string& tol_name) {
  for (const auto& c : t) add(c.name, tol_name, c.residual, c.tolerance);
}

bool Report::pass() const {
  for (const auto& b : blocks)
    if (!b.pass()) return false;
  return true;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace {

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

std::string tol_label(const Row& r) { return r.tolerance_name.empty() ? sci(r.tolerance) : r.tolerance_name + "=" + sci(r.tolerance); }

}  // namespace

std::string render_text(const Report& r, bool timing) {
  std::ostringstream os;
  os << "igh " << kToolVersion << " report\n";
  os << "spec: " << r.spec_name << "\n";
  os << "digest: " << r.digest << "\n";
  os << "seed: " << r.seed << "\n";
  if (r.blocks.empty()) os << "\n(no analyses requested)\n";
  for (const auto& b : r.blocks) {
    os << "\n[" << b.name << "] " << (b.pass() ? "PASS" : "FAIL");
    if (timing) os << "  (" << fmt(b.seconds) << " s)";
    os << "\n";
    for (const auto& [k, v] : b.inputs) os << "  input " << k << " = " << v << "\n";
    std::size_t w = 8;
    for (const auto& row : b.rows) w = std::max(w, row.name.size());
    for (const auto& row : b.rows)
      os << "  " << pad(row.name, w) << "  " << sci(row.residual) << "  <= " << pad(tol_label(row), 28) << "  "
         << (row.pass() ? "ok" : "FAIL") << "\n";
    for (const auto& [k, v] : b.values) os << "  " << k << ": " << v << "\n";
    if (!b.error.empty()) os << "  error: " << b.error << "\n";
    for (const auto& row : b.rows)
      if (!row.pass())
        os << "  violated: " << row.name << " residual " << sci(row.residual) << " exceeds tolerance "
           << tol_label(row) << "\n";
  }
  os << "\nresult: " << (r.pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

nlohmann::ordered_json render_json(const Report& r, bool timing) {
  nlohmann::ordered_json j;
  j["tool"] = std::string("igh ") + kToolVersion;
  j["spec"] = r.spec_name;
  j["digest"] = r.digest;
  j["seed"] = r.seed;
  j["pass"] = r.pass();
  j["blocks"] = nlohmann::ordered_json::array();
  for (const auto& b : r.blocks) {
    nlohmann::ordered_json jb;
    jb["name"] = b.name;
    jb["pass"] = b.pass();
    jb["inputs"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : b.inputs) jb["inputs"][k] = v;
    jb["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : b.rows)
      jb["rows"].push_back({{"name", row.name},
                            {"tolerance_name", row.tolerance_name},
                            {"residual", row.residual},
                            {"tolerance", row.tolerance},
                            {"pass", row.pass()}});
    jb["values"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : b.values) jb["values"][k] = v;
    if (!b.error.empty()) jb["error"] = b.error;
    if (timing) jb["seconds"] = b.seconds;
    j["blocks"].push_back(std::move(jb));
  }
  return j;
}

void write_csv(const CsvTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write CSV file '" + path + "'");
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << "\n";
  char buf[64];
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw Error("failed while writing CSV file '" + path + "'");
}

}  // namespace igh::cli
