#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <gsl/gsl_fit.h>

#include "vortexlab/harness.hpp"

namespace vortexlab::harness {

namespace fs = std::filesystem;
using nlohmann::json;

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ReportError("CSV column \"" + name + "\" not found");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ReportError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ReportError(path.string() + ": empty CSV");
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream rs(line);
    for (std::string cell; std::getline(rs, cell, ',');) {
      char* end = nullptr;
      row.push_back(std::strtod(cell.c_str(), &end));
      if (end == cell.c_str() || *end != '\0')
        throw ReportError(path.string() + ":" + std::to_string(lineno) + ": bad number \"" + cell + "\"");
    }
    if (row.size() != t.header.size())
      throw ReportError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(t.header.size()) + " fields");
    t.rows.push_back(std::move(row));
  }
  return t;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("fit_power_law: need at least two points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw std::domain_error("fit_power_law: values must be positive and finite");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  PowerLawFit f;
  double c00, c01, c11, sumsq;
  gsl_fit_linear(lx.data(), 1, ly.data(), 1, lx.size(), &f.intercept, &f.slope, &c00, &c01, &c11,
                 &sumsq);
  f.points = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double model = std::exp(f.intercept + f.slope * lx[i]);
    f.max_rel_residual = std::max(f.max_rel_residual, std::abs(y[i] / model - 1.0));
  }
  return f;
}

namespace {

struct RunInput {
  fs::path dir;
  json manifest;
  CsvTable table;
  double epsilon = 0.0;
};

json fit_json(const std::vector<double>& eps, const std::vector<double>& values) {
  json j = {{"values", values}};
  try {
    auto f = fit_power_law(eps, values);
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["max_rel_residual"] = f.max_rel_residual;
  } catch (const std::exception& e) {
    j["slope"] = nullptr;
    j["error"] = e.what();
  }
  return j;
}

}  // namespace

json sweep_report(const std::vector<fs::path>& run_dirs) {
  std::vector<RunInput> runs;
  for (const auto& d : run_dirs) {
    RunInput r;
    r.dir = d;
    std::ifstream in(d / "manifest.json");
    if (!in) throw ReportError(d.string() + ": no manifest.json (not a run directory?)");
    try {
      r.manifest = json::parse(in);
      r.epsilon = r.manifest.at("epsilon").get<double>();
    } catch (const json::exception& e) {
      throw ReportError(d.string() + "/manifest.json: " + e.what());
    }
    r.table = read_csv(d / "diagnostics.csv");
    if (r.table.rows.empty()) throw ReportError(d.string() + ": diagnostics.csv has no records");
    runs.push_back(std::move(r));
  }
  std::sort(runs.begin(), runs.end(), [](const RunInput& a, const RunInput& b) {
    if (a.epsilon != b.epsilon) return a.epsilon < b.epsilon;
    return a.dir.lexically_normal().string() < b.dir.lexically_normal().string();
  });
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].epsilon == runs[i - 1].epsilon)
      throw ReportError("duplicate epsilon " + diag::format_number(runs[i].epsilon) + " in " +
                        runs[i - 1].dir.string() + " and " + runs[i].dir.string());
  if (runs.size() < 3)
    throw ReportError("insufficient sweep size: " + std::to_string(runs.size()) +
                      " epsilon value(s), at least 3 are required");

  const auto& header = runs.front().table.header;
  for (const auto& r : runs)
    if (r.table.header != header)
      throw ReportError(r.dir.string() + ": diagnostics columns differ from the other runs");

  std::vector<double> eps;
  for (const auto& r : runs) eps.push_back(r.epsilon);

  static const std::regex fitted(R"(^(outer_mass_p.*|v[0-9]+_R[0-9.e+-]+)$)");
  static const std::regex ratio(R"(^v[0-9]+_(I_ratio|gap_ratio)$)");
  json fits = json::object();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!std::regex_match(header[c], fitted)) continue;
    std::vector<double> values;
    for (const auto& r : runs) values.push_back(r.table.rows.back()[c]);
    fits[header[c]] = fit_json(eps, values);
  }

  json per_run = json::array();
  for (const auto& r : runs) {
    json ratios = json::object();
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (!std::regex_match(header[c], ratio)) continue;
      double mx = -INFINITY;
      for (const auto& row : r.table.rows)
        if (std::isfinite(row[c])) mx = std::max(mx, row[c]);
      ratios[header[c]] = std::isfinite(mx) ? json(mx) : json(nullptr);
    }
    json final_row = json::object();
    for (std::size_t c = 0; c < header.size(); ++c) {
      const double v = r.table.rows.back()[c];
      final_row[header[c]] = std::isfinite(v) ? json(v) : json(nullptr);
    }
    per_run.push_back({{"dir", r.dir.filename().string()},
                       {"epsilon", r.epsilon},
                       {"scenario", r.manifest.value("scenario", "")},
                       {"status", r.manifest.value("status", "")},
                       {"records", r.table.rows.size()},
                       {"t_final", r.table.rows.back()[r.table.column("t")]},
                       {"A_eps", r.manifest.value("A_eps", json(nullptr))},
                       {"max_ratios", ratios},
                       {"confinement", r.manifest.value("confinement", json::object())},
                       {"final", final_row}});
  }

  std::set<std::string> scenarios;
  for (const auto& r : runs) scenarios.insert(r.manifest.value("scenario", ""));
  return {{"epsilons", eps},
          {"scenarios", scenarios},
          {"fit", "least squares of log(value) on log(epsilon) at the final record"},
          {"fits", fits},
          {"runs", per_run}};
}

}  // namespace vortexlab::harness
