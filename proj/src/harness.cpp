#include "mixsym/harness.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mixsym/comparator.hpp"
#include "mixsym/optimize.hpp"

namespace mixsym {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* shape_name(ComponentShape shape) {
  switch (shape) {
    case ComponentShape::normal: return "normal";
    case ComponentShape::laplace: return "laplace";
    case ComponentShape::uniform: return "uniform";
    case ComponentShape::student_t2: return "t2";
    case ComponentShape::chisq_case: return "chisq_case";
  }
  return "unknown";
}

ComponentShape shape_from_name(const std::string& name) {
  if (name == "normal") return ComponentShape::normal;
  if (name == "laplace") return ComponentShape::laplace;
  if (name == "uniform") return ComponentShape::uniform;
  if (name == "t2" || name == "t") return ComponentShape::student_t2;
  if (name == "chisq_case") return ComponentShape::chisq_case;
  throw std::invalid_argument("unknown component shape: " + name);
}

// The winning start's convergence flag.
bool fit_converged(const FitResult& fit) {
  for (const auto& diag : fit.per_start)
    if (std::abs(diag.objective - fit.objective) <= 1e-12) return diag.converged;
  return false;
}

struct Accumulator {
  double sum = 0.0, sumsq = 0.0, sum_err2 = 0.0;
  int count = 0;
  void add(double value, double truth) {
    sum += value;
    sumsq += value * value;
    if (std::isfinite(truth)) sum_err2 += (value - truth) * (value - truth);
    ++count;
  }
  ParamSummary summary(double truth) const {
    ParamSummary s;
    if (count == 0) return s;
    const double n = static_cast<double>(count);
    s.mean = sum / n;
    s.sd = count > 1 ? std::sqrt(std::max(0.0, (sumsq - n * s.mean * s.mean) / (n - 1.0)))
                     : 0.0;
    s.mse = std::isfinite(truth) ? sum_err2 / n : kNaN;
    return s;
  }
};

json param_summary_json(const ParamSummary& s) {
  json out;
  out["mean"] = s.mean;
  out["sd"] = s.sd;
  if (std::isfinite(s.mse))
    out["mse"] = s.mse;
  else
    out["mse"] = nullptr;
  return out;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (n < 2) throw std::invalid_argument("scenario n must be >= 2");
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  if (case_tag != 0) {
    if (case_tag < 1 || case_tag > 3) throw std::invalid_argument("case must be 1, 2 or 3");
    if (component != ComponentShape::chisq_case)
      throw std::invalid_argument("case tags require component \"chisq_case\"");
    if (df1 < 1 || df2 <= df1)
      throw std::invalid_argument("case tags need positive df1 < df2");
    if (truth.components() != 2)
      throw std::invalid_argument("misspecification cases are two-component designs");
  } else if (component == ComponentShape::chisq_case) {
    throw std::invalid_argument("component \"chisq_case\" requires a case tag");
  }
}

ScenarioSpec ScenarioSpec::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario JSON parse error: ") + e.what());
  }
  ScenarioSpec spec;
  try {
    spec.component = shape_from_name(j.at("component").get<std::string>());
    const auto& truth = j.at("truth");
    spec.truth = MixtureParams(truth.at("lambda").get<std::vector<double>>(),
                               truth.at("mu").get<std::vector<double>>());
    spec.scale = j.value("scale", 1.0);
    spec.n = j.at("n").get<int>();
    spec.replications = j.value("replications", 50);
    spec.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("estimators")) {
      spec.run_sp = false;
      spec.run_nmle = false;
      for (const auto& e : j.at("estimators")) {
        const std::string name = e.get<std::string>();
        if (name == "sp")
          spec.run_sp = true;
        else if (name == "nmle")
          spec.run_nmle = true;
        else
          throw std::invalid_argument("unknown estimator: " + name);
      }
    }
    spec.case_tag = j.value("case", 0);
    spec.df1 = j.value("df1", 0);
    spec.df2 = j.value("df2", 0);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario JSON: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string ScenarioSpec::to_json() const {
  json j;
  j["component"] = shape_name(component);
  j["truth"] = {{"lambda", truth.weights}, {"mu", truth.locations}};
  j["scale"] = scale;
  j["n"] = n;
  j["replications"] = replications;
  j["seed"] = seed;
  json estimators = json::array();
  if (run_sp) estimators.push_back("sp");
  if (run_nmle) estimators.push_back("nmle");
  j["estimators"] = estimators;
  if (case_tag != 0) {
    j["case"] = case_tag;
    j["df1"] = df1;
    j["df2"] = df2;
  }
  return j.dump(2);
}

double sample_chisq(int df, CounterRng& rng) {
  if (df < 1) throw std::invalid_argument("chisq needs df >= 1");
  double sum = 0.0;
  for (int i = 0; i < df; ++i) {
    const double z = rng.normal();
    sum += z * z;
  }
  return sum;
}

double component_quantile(ComponentShape shape, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("u must lie in (0, 1)");
  const double w = 2.0 * u - 1.0;
  switch (shape) {
    case ComponentShape::laplace: {
      // Inverse CDF; scale 1/sqrt(2) makes the variance 1.
      const double sign = w < 0.0 ? -1.0 : 1.0;
      return -(1.0 / std::sqrt(2.0)) * sign * std::log1p(-std::abs(w));
    }
    case ComponentShape::uniform:
      // [-sqrt(3), sqrt(3)]: the unique centered uniform with variance 1.
      return std::sqrt(3.0) * w;
    case ComponentShape::student_t2:
      // t on 2 degrees of freedom: CDF (1 + x/sqrt(2+x^2))/2 inverts to
      // x = w sqrt(2/(1-w^2)).
      return w * std::sqrt(2.0 / (1.0 - w * w));
    case ComponentShape::normal:
    case ComponentShape::chisq_case:
      throw std::invalid_argument("no closed-form quantile for this shape");
  }
  throw std::invalid_argument("unknown component shape");
}

double sample_component(ComponentShape shape, double scale, CounterRng& rng) {
  switch (shape) {
    case ComponentShape::normal:
      return scale * rng.normal();
    case ComponentShape::laplace:
    case ComponentShape::uniform:
    case ComponentShape::student_t2:
      return scale * component_quantile(shape, rng.uniform01());
    case ComponentShape::chisq_case:
      throw std::invalid_argument("chisq_case draws need the case recipes in generate()");
  }
  throw std::invalid_argument("unknown component shape");
}

Sample generate(const ScenarioSpec& spec, int replication) {
  spec.validate();
  CounterRng rng(substream_seed(spec.seed, static_cast<std::uint64_t>(replication)));
  const auto& lambda = spec.truth.weights;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    const double u = rng.uniform01();
    std::size_t comp = 0;
    double cum = 0.0;
    for (std::size_t j = 0; j < lambda.size(); ++j) {
      cum += lambda[j];
      if (u <= cum) {
        comp = j;
        break;
      }
      comp = j;
    }
    double x = 0.0;
    if (spec.case_tag == 0) {
      x = spec.truth.locations[comp] + sample_component(spec.component, spec.scale, rng);
    } else if (spec.case_tag == 1) {
      x = sample_chisq(comp == 0 ? spec.df1 : spec.df2, rng);
    } else if (spec.case_tag == 2) {
      x = comp == 0 ? sample_chisq(spec.df1, rng)
                    : static_cast<double>(spec.df2 - spec.df1) + sample_chisq(spec.df1, rng);
    } else {
      const int df = comp == 0 ? spec.df1 : spec.df2;
      x = static_cast<double>(df) + std::sqrt(2.0 * df) * rng.normal();
    }
    values.push_back(x);
  }
  std::ostringstream label;
  label << shape_name(spec.component) << "[rep " << replication << "]";
  return Sample(std::move(values), label.str());
}

std::string ExperimentResult::rows_csv() const {
  std::ostringstream out;
  out << "replication,estimator,lambda1,mu1,mu2,sigma2,objective,converged\n";
  char buf[192];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                  r.replication, r.estimator.c_str(), r.lambda1, r.mu1, r.mu2,
                  r.sigma2, r.objective, r.converged ? 1 : 0);
    out << buf;
  }
  return out.str();
}

std::string ExperimentResult::summary_json(const ScenarioSpec& spec) const {
  json j;
  j["scenario"] = json::parse(spec.to_json());
  json list = json::array();
  for (const auto& s : summaries) {
    json e;
    e["estimator"] = s.estimator;
    e["failures"] = s.failures;
    e["lambda1"] = param_summary_json(s.lambda1);
    e["mu1"] = param_summary_json(s.mu1);
    e["mu2"] = param_summary_json(s.mu2);
    e["sigma2"] = param_summary_json(s.sigma2);
    list.push_back(e);
  }
  j["summaries"] = list;
  return j.dump(2);
}

ExperimentResult run_experiment(const ScenarioSpec& spec) {
  spec.validate();
  if (spec.truth.components() != 2)
    throw std::invalid_argument("run_experiment fits two-component estimators");

  ExperimentResult result;
  Accumulator acc_lambda[2], acc_mu1[2], acc_mu2[2], acc_s2[2];
  int failures[2] = {0, 0};
  const double truth_lambda = spec.truth.weights[0];
  const double truth_mu1 = spec.truth.locations[0];
  const double truth_mu2 = spec.truth.locations[1];
  const double truth_s2 = spec.case_tag == 0 ? spec.scale * spec.scale : kNaN;

  for (int rep = 0; rep < spec.replications; ++rep) {
    const Sample sample = generate(spec, rep);
    for (int which = 0; which < 2; ++which) {
      const bool is_sp = which == 0;
      if (is_sp && !spec.run_sp) continue;
      if (!is_sp && !spec.run_nmle) continue;
      ExperimentRow row;
      row.replication = rep;
      row.estimator = is_sp ? "sp" : "nmle";
      try {
        if (is_sp) {
          const FitResult fit = fit_k2(sample);
          row.lambda1 = fit.params.weights[0];
          row.mu1 = fit.params.locations[0];
          row.mu2 = fit.params.locations[1];
          row.sigma2 = fit.sigma2.value_or(kNaN);
          row.objective = fit.objective;
          row.converged = fit_converged(fit);
        } else {
          const NormalMixFit fit = em_fit_normal2(sample);
          row.lambda1 = fit.lambda1;
          row.mu1 = fit.mu[0];
          row.mu2 = fit.mu[1];
          row.sigma2 = fit.sigma2;
          row.objective = fit.loglik;
          row.converged = fit.converged;
        }
        acc_lambda[which].add(row.lambda1, truth_lambda);
        acc_mu1[which].add(row.mu1, truth_mu1);
        acc_mu2[which].add(row.mu2, truth_mu2);
        acc_s2[which].add(row.sigma2, truth_s2);
      } catch (const std::exception&) {
        row.lambda1 = row.mu1 = row.mu2 = row.sigma2 = row.objective = kNaN;
        row.converged = false;
        ++failures[which];
      }
      result.rows.push_back(std::move(row));
    }
  }

  for (int which = 0; which < 2; ++which) {
    const bool is_sp = which == 0;
    if (is_sp && !spec.run_sp) continue;
    if (!is_sp && !spec.run_nmle) continue;
    EstimatorSummary s;
    s.estimator = is_sp ? "sp" : "nmle";
    s.failures = failures[which];
    s.lambda1 = acc_lambda[which].summary(truth_lambda);
    s.mu1 = acc_mu1[which].summary(truth_mu1);
    s.mu2 = acc_mu2[which].summary(truth_mu2);
    s.sigma2 = acc_s2[which].summary(truth_s2);
    result.summaries.push_back(std::move(s));
  }
  return result;
}

}  // namespace mixsym
