#include "mixsym/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace mixsym {

namespace {

using nlohmann::json;

json optional_double(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

}  // namespace

std::string fit_result_to_json(const FitResult& result, const std::string& method,
                               double p, std::size_t n, const std::string& label) {
  json j;
  j["method"] = method;
  j["k"] = result.params.components();
  j["p"] = std::isinf(p) ? json("inf") : json(p);
  j["n"] = n;
  if (!label.empty()) j["input"] = label;
  j["lambda"] = result.params.weights;
  j["mu"] = result.params.locations;
  j["objective"] = result.objective;
  j["sigma2"] = optional_double(result.sigma2);
  json starts = json::array();
  for (const auto& d : result.per_start) {
    json s;
    s["start"] = d.start;
    s["converged"] = d.converged;
    s["iterations"] = d.iterations;
    s["objective"] = d.objective;
    starts.push_back(s);
  }
  j["per_start"] = starts;
  j["warnings"] = result.warnings;
  return j.dump(2);
}

MixtureParams fit_params_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    return MixtureParams(j.at("lambda").get<std::vector<double>>(),
                         j.at("mu").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("fit JSON: ") + e.what());
  }
}

std::string verdict_to_json(const MixtureParams& params,
                            const IdentifiabilityVerdict& verdict) {
  json j;
  j["k"] = params.components();
  j["lambda"] = params.weights;
  j["mu"] = params.locations;
  j["member"] = verdict.member;
  j["reason"] = to_string(verdict.reason);
  if (verdict.witness) {
    j["witness"] = {{"c", verdict.witness->c},
                    {"d", verdict.witness->d},
                    {"r", verdict.witness->r}};
  }
  if (verdict.symmetry_center) j["symmetry_center"] = *verdict.symmetry_center;
  j["warnings"] = verdict.warnings;
  return j.dump(2);
}

std::string bootstrap_report_to_json(const BootstrapReport& report,
                                     const std::string& method,
                                     std::uint64_t seed) {
  json j;
  j["method"] = method;
  j["B"] = report.B;
  j["seed"] = seed;
  j["failures"] = report.failures;
  json point = json::object();
  json se = json::object();
  for (std::size_t i = 0; i < report.param_names.size(); ++i) {
    point[report.param_names[i]] = report.point[i];
    se[report.param_names[i]] = report.se[i];
  }
  j["point"] = point;
  j["se"] = se;
  return j.dump(2);
}

std::string format_estimate_table(const std::string& method,
                                  const std::vector<double>& point,
                                  const std::vector<double>* se) {
  static const char* kHeaders[] = {"mu1", "mu2", "lambda1", "sigma2"};
  std::ostringstream out;
  char cell[64];
  out << "        ";
  for (std::size_t i = 0; i < point.size(); ++i) {
    const char* name = i < 4 ? kHeaders[i] : "param";
    std::snprintf(cell, sizeof(cell), "%-16s", name);
    out << cell;
  }
  out << "\n";
  std::snprintf(cell, sizeof(cell), "%-8s", method.c_str());
  out << cell;
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (se) {
      std::snprintf(cell, sizeof(cell), "%.4g (%.3g)", point[i], (*se)[i]);
    } else {
      std::snprintf(cell, sizeof(cell), "%.4g", point[i]);
    }
    std::string text(cell);
    text.resize(16, ' ');
    out << text;
  }
  out << "\n";
  return out.str();
}

}  // namespace mixsym
