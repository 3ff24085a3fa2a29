#pragma once
// Merging suite artifacts into report.json and drawing the scaling plots.

#include "nhtrap/experiments.hpp"
#include "nhtrap/svg.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nhtrap {

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"symbols", "operators", "bsymbols", "norms",
                                                 "scaling"};
  return names;
}

struct Report {
  json document;
  std::map<std::string, std::string> plots;  // file name -> SVG
  std::vector<std::string> warnings;
};

/// `artifacts` maps suite name to its JSON artifact (missing suites omitted).
inline Report build_report(const std::string& hash, const std::map<std::string, json>& artifacts) {
  Report rep;
  json& doc = rep.document;
  doc["config_hash"] = hash;
  doc["records"] = json::array();
  json checks = json::array();
  for (const auto& name : suite_names()) {
    const auto it = artifacts.find(name);
    if (it == artifacts.end()) continue;
    for (const auto& c : it->second.value("checks", json::array())) {
      json entry = c;
      entry["suite"] = name;
      checks.push_back(entry);
    }
    if (name != "scaling") doc[name] = it->second.value("data", json::object());
  }
  doc["checks"] = checks;

  std::vector<ScalingRecord> records;
  if (const auto it = artifacts.find("scaling"); it != artifacts.end()) {
    const json& data = it->second.at("data");
    doc["records"] = data.at("records");
    doc["samples"] = data.value("samples", json::array());
    for (const auto& r : data.at("records")) {
      ScalingRecord rec;
      rec.h = r.at("h").get<double>();
      rec.n_x = r.at("n_x").get<Eigen::Index>();
      rec.norm_l2 = r.at("norm_l2").get<double>();
      rec.norm_iso = r.at("norm_iso").get<double>();
      rec.norm_sandwich = r.at("norm_sandwich").get<double>();
      records.push_back(rec);
    }
  } else {
    rep.warnings.push_back("report: no scaling artifact; records are empty");
  }

  const std::vector<std::pair<std::string, NormSelector>> norms = {
      {"norm_l2", NormSelector::kL2}, {"norm_iso", NormSelector::kIso},
      {"norm_sandwich", NormSelector::kSandwich}};
  if (records.size() >= 4) {
    json fits = json::object();
    for (const auto& [key, sel] : norms) fits[key] = to_json(fit_scaling(records, sel));
    doc["fits"] = fits;
  } else {
    doc["fits"] = {{"error", "fit_scaling: need at least 4 records, have " +
                                 std::to_string(records.size())}};
    rep.warnings.push_back("report: fewer than 4 records; fits refused");
  }

  if (!records.empty()) {
    for (const auto& [key, sel] : norms) {
      svg::Series data{"measured", "#1f4e9c", {}, {}, true};
      for (const auto& r : records) {
        data.x.push_back(r.h);
        data.y.push_back(sel == NormSelector::kL2 ? r.norm_l2
                         : sel == NormSelector::kIso ? r.norm_iso
                                                     : r.norm_sandwich);
      }
      std::vector<svg::Series> series = {data};
      if (records.size() >= 4) {
        const FitResult fit = fit_scaling(records, sel);
        svg::Series pw{"C h^-alpha", "#c0392b", {}, {}, false};
        svg::Series lg{"h^-1 (c1 + c2 log 1/h)", "#27ae60", {}, {}, false};
        const double h_lo = records.back().h, h_hi = records.front().h;
        for (int i = 0; i <= 60; ++i) {
          const double h = h_lo * std::pow(h_hi / h_lo, i / 60.0);
          pw.x.push_back(h);
          pw.y.push_back(std::exp(fit.power.log_C) * std::pow(h, -fit.power.alpha));
          lg.x.push_back(h);
          lg.y.push_back((fit.log.c1 + fit.log.c2 * std::log(1.0 / h)) / h);
        }
        series.push_back(pw);
        series.push_back(lg);
      }
      rep.plots[key + ".svg"] = svg::loglog_plot(key + " versus h", "h", key, series);
    }
  }
  return rep;
}

}  // namespace nhtrap
