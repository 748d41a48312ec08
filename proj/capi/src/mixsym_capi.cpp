#include "mixsym.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "mixsym/comparator.hpp"
#include "mixsym/deconvolve.hpp"
#include "mixsym/harness.hpp"
#include "mixsym/identifiability.hpp"
#include "mixsym/objective.hpp"
#include "mixsym/optimize.hpp"
#include "mixsym/sample.hpp"
#include "mixsym/serialize.hpp"
#include "mixsym/stepfun.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

mixsym_status classify_exception() {
  try {
    throw;
  } catch (const mixsym::SingularMixingError& e) {
    set_error(e.what());
    return MIXSYM_ERROR_SINGULAR;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return MIXSYM_ERROR_INVALID;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return MIXSYM_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return MIXSYM_ERROR_FIT;
  } catch (...) {
    set_error("unknown error");
    return MIXSYM_ERROR_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(::operator new(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mixsym::FitOptions to_core_options(const mixsym_fit_options* opts, int k) {
  mixsym::FitOptions core;
  if (opts == nullptr) return core;
  core.max_iterations = opts->max_iterations;
  core.tolerance = opts->tolerance;
  core.p = opts->p;
  core.seed = opts->seed;
  if (opts->starts != nullptr && opts->n_starts > 0) {
    core.starts.reserve(opts->n_starts);
    for (size_t i = 0; i < opts->n_starts; ++i) {
      core.starts.emplace_back(opts->starts + i * static_cast<size_t>(k),
                               opts->starts + (i + 1) * static_cast<size_t>(k));
    }
  }
  return core;
}

}  // namespace

struct mixsym_sample_s {
  mixsym::Sample sample;
};

struct mixsym_fit_result_s {
  mixsym::FitResult result;
  std::string method;
  double p = 2.0;
  size_t n = 0;
  std::string label;
};

struct mixsym_curve_s {
  mixsym::StepFunction curve;
  double monotone_violation = 0.0;
};

extern "C" {

const char* mixsym_version(void) { return "0.1.0"; }

const char* mixsym_last_error(void) { return g_last_error.c_str(); }

void mixsym_string_free(char* s) { ::operator delete(s); }

mixsym_status mixsym_sample_create(const double* values, size_t n,
                                   mixsym_sample** out) {
  if (values == nullptr || out == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  try {
    *out = new mixsym_sample_s{mixsym::Sample(std::vector<double>(values, values + n))};
    return MIXSYM_OK;
  } catch (...) {
    return classify_exception();
  }
}

mixsym_status mixsym_sample_read_csv(const char* path, mixsym_sample** out) {
  if (path == nullptr || out == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  try {
    *out = new mixsym_sample_s{mixsym::Sample::from_csv(path)};
    return MIXSYM_OK;
  } catch (const std::runtime_error& e) {
    set_error(e.what());
    return MIXSYM_ERROR_IO;
  } catch (...) {
    return classify_exception();
  }
}

size_t mixsym_sample_size(const mixsym_sample* sample) {
  return sample ? sample->sample.size() : 0;
}

mixsym_status mixsym_sample_values(const mixsym_sample* sample, double* out,
                                   size_t cap) {
  if (sample == nullptr || out == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  if (cap < sample->sample.size()) {
    set_error("output buffer too small");
    return MIXSYM_ERROR_INVALID;
  }
  const auto& values = sample->sample.values();
  std::memcpy(out, values.data(), values.size() * sizeof(double));
  return MIXSYM_OK;
}

void mixsym_sample_free(mixsym_sample* sample) { delete sample; }

void mixsym_fit_options_init(mixsym_fit_options* opts) {
  if (opts == nullptr) return;
  opts->max_iterations = 500;
  opts->tolerance = 1e-8;
  opts->p = 2.0;
  opts->seed = 0;
  opts->starts = nullptr;
  opts->n_starts = 0;
}

mixsym_status mixsym_fit_sp(const mixsym_sample* sample, int k,
                            const mixsym_fit_options* opts,
                            mixsym_fit_result** out) {
  if (sample == nullptr || out == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  if (k < 1 || k > 3) {
    set_error("k must be 1, 2 or 3");
    return MIXSYM_ERROR_UNSUPPORTED;
  }
  try {
    const mixsym::FitOptions core = to_core_options(opts, k);
    mixsym::FitResult fit = mixsym::fit_general(sample->sample, k, core);
    *out = new mixsym_fit_result_s{std::move(fit), "sp", core.p,
                                   sample->sample.size(), sample->sample.label()};
    return MIXSYM_OK;
  } catch (...) {
    return classify_exception();
  }
}

mixsym_status mixsym_fit_nmle(const mixsym_sample* sample,
                              const mixsym_fit_options* opts,
                              mixsym_fit_result** out) {
  if (sample == nullptr || out == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  try {
    const mixsym::FitOptions core = to_core_options(opts, 2);
    const mixsym::NormalMixFit em = mixsym::em_fit_normal2(sample->sample, core);
    mixsym::FitResult fit{
        mixsym::MixtureParams({em.lambda1, 1.0 - em.lambda1}, {em.mu[0], em.mu[1]}),
        em.loglik,
        {},
        em.sigma2,
        std::nullopt,
        {}};
    fit.per_start.push_back({{em.mu[0], em.mu[1]}, em.converged, em.iterations,
                             em.loglik});
    *out = new mixsym_fit_result_s{std::move(fit), "nmle", 2.0,
                                   sample->sample.size(), sample->sample.label()};
    return MIXSYM_OK;
  } catch (...) {
    return classify_exception();
  }
}

int mixsym_fit_components(const mixsym_fit_result* fit) {
  return fit ? static_cast<int>(fit->result.params.components()) : 0;
}

mixsym_status mixsym_fit_params(const mixsym_fit_result* fit, double* lambda,
                                double* mu) {
  if (fit == nullptr || lambda == nullptr || mu == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  const auto& params = fit->result.params;
  for (std::size_t i = 0; i < params.components(); ++i) {
    lambda[i] = params.weights[i];
    mu[i] = params.locations[i];
  }
  return MIXSYM_OK;
}

double mixsym_fit_objective(const mixsym_fit_result* fit) {
  return fit ? fit->result.objective : std::nan("");
}

double mixsym_fit_sigma2(const mixsym_fit_result* fit) {
  if (fit == nullptr || !fit->result.sigma2) return std::nan("");
  return *fit->result.sigma2;
}

mixsym_status mixsym_fit_to_json(const mixsym_fit_result* fit, char** json) {
  if (fit == nullptr || json == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  try {
    *json = copy_string(mixsym::fit_result_to_json(fit->result, fit->method,
                                                   fit->p, fit->n, fit->label));
    return MIXSYM_OK;
  } catch (...) {
    return classify_exception();
  }
}

mixsym_status mixsym_fit_from_json(const char* json, mixsym_fit_result** out) {
  if (json == nullptr || out == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  try {
    mixsym::MixtureParams params = mixsym::fit_params_from_json(json);
    mixsym::FitResult fit{std::move(params), 0.0, {}, std::nullopt, std::nullopt, {}};
    *out = new mixsym_fit_result_s{std::move(fit), "loaded", 2.0, 0, ""};
    return MIXSYM_OK;
  } catch (...) {
    return classify_exception();
  }
}

void mixsym_fit_result_free(mixsym_fit_result* fit) { delete fit; }

mixsym_status mixsym_dn(const mixsym_sample* sample, int k, const double* lambda,
                        const double* mu, double p, double* out) {
  if (sample == nullptr || lambda == nullptr || mu == nullptr || out == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  if (k < 1) {
    set_error("k must be positive");
    return MIXSYM_ERROR_INVALID;
  }
  try {
    const mixsym::MixtureParams params(std::vector<double>(lambda, lambda + k),
                                       std::vector<double>(mu, mu + k));
    *out = mixsym::dn(sample->sample, params, p);
    return MIXSYM_OK;
  } catch (...) {
    return classify_exception();
  }
}

mixsym_status mixsym_estimate_g0(const mixsym_sample* sample,
                                 const double lambda[2], const double mu[2],
                                 int isotonic, mixsym_curve** out) {
  if (sample == nullptr || lambda == nullptr || mu == nullptr || out == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  try {
    const mixsym::MixtureParams params({lambda[0], lambda[1]}, {mu[0], mu[1]});
    mixsym::DeconvolutionResult dec = mixsym::estimate_g0(sample->sample, params);
    mixsym::StepFunction curve =
        isotonic ? mixsym::isotonize(dec.g0) : std::move(dec.g0);
    *out = new mixsym_curve_s{std::move(curve), dec.monotone_violation};
    return MIXSYM_OK;
  } catch (...) {
    return classify_exception();
  }
}

size_t mixsym_curve_size(const mixsym_curve* curve) {
  return curve ? curve->curve.breakpoints().size() : 0;
}

mixsym_status mixsym_curve_point(const mixsym_curve* curve, size_t i, double* t,
                                 double* value) {
  if (curve == nullptr || t == nullptr || value == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  if (i >= curve->curve.breakpoints().size()) {
    set_error("curve index out of range");
    return MIXSYM_ERROR_INVALID;
  }
  *t = curve->curve.breakpoints()[i];
  *value = curve->curve.levels()[i + 1];
  return MIXSYM_OK;
}

double mixsym_curve_monotone_violation(const mixsym_curve* curve) {
  return curve ? curve->monotone_violation : std::nan("");
}

mixsym_status mixsym_curve_to_csv(const mixsym_curve* curve, char** csv) {
  if (curve == nullptr || csv == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  try {
    *csv = copy_string(mixsym::to_csv(curve->curve));
    return MIXSYM_OK;
  } catch (...) {
    return classify_exception();
  }
}

void mixsym_curve_free(mixsym_curve* curve) { delete curve; }

mixsym_status mixsym_identifiability_json(int k, const double* lambda,
                                          const double* mu, char** json) {
  if (lambda == nullptr || mu == nullptr || json == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  if (k < 1) {
    set_error("k must be positive");
    return MIXSYM_ERROR_INVALID;
  }
  try {
    const mixsym::MixtureParams params(std::vector<double>(lambda, lambda + k),
                                       std::vector<double>(mu, mu + k));
    const mixsym::IdentifiabilityVerdict verdict = mixsym::check_identifiability(params);
    *json = copy_string(mixsym::verdict_to_json(params, verdict));
    return MIXSYM_OK;
  } catch (...) {
    return classify_exception();
  }
}

mixsym_status mixsym_bootstrap_json(const mixsym_sample* sample, const char* method,
                                    int B, uint64_t seed,
                                    const mixsym_fit_options* opts, char** json,
                                    char** table) {
  if (sample == nullptr || method == nullptr || json == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  try {
    const mixsym::FitOptions core = to_core_options(opts, 2);
    mixsym::BootstrapFitter fitter;
    const std::string name(method);
    if (name == "sp") {
      fitter = mixsym::make_sp_fitter(core);
    } else if (name == "nmle") {
      fitter = mixsym::make_nmle_fitter(core);
    } else {
      set_error("method must be \"sp\" or \"nmle\"");
      return MIXSYM_ERROR_INVALID;
    }
    const mixsym::BootstrapReport report = mixsym::bootstrap_se(
        sample->sample, fitter, {"mu1", "mu2", "lambda1", "sigma2"}, B, seed);
    *json = copy_string(mixsym::bootstrap_report_to_json(report, name, seed));
    if (table != nullptr)
      *table = copy_string(
          mixsym::format_estimate_table(name, report.point, &report.se));
    return MIXSYM_OK;
  } catch (...) {
    return classify_exception();
  }
}

mixsym_status mixsym_scenario_info(const char* scenario_json, uint64_t* seed,
                                   int* replications) {
  if (scenario_json == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  try {
    const mixsym::ScenarioSpec spec = mixsym::ScenarioSpec::from_json(scenario_json);
    if (seed != nullptr) *seed = spec.seed;
    if (replications != nullptr) *replications = spec.replications;
    return MIXSYM_OK;
  } catch (...) {
    return classify_exception();
  }
}

mixsym_status mixsym_run_scenario(const char* scenario_json,
                                  int replications_override, char** rows_csv,
                                  char** summary_json) {
  if (scenario_json == nullptr || rows_csv == nullptr || summary_json == nullptr) {
    set_error("null argument");
    return MIXSYM_ERROR_INVALID;
  }
  try {
    mixsym::ScenarioSpec spec = mixsym::ScenarioSpec::from_json(scenario_json);
    if (replications_override > 0) spec.replications = replications_override;
    const mixsym::ExperimentResult result = mixsym::run_experiment(spec);
    *rows_csv = copy_string(result.rows_csv());
    *summary_json = copy_string(result.summary_json(spec));
    return MIXSYM_OK;
  } catch (...) {
    return classify_exception();
  }
}

}  // extern "C"
