#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixsym/objective.hpp"
#include "mixsym/rng.hpp"
#include "mixsym/sample.hpp"

namespace mixsym {

enum class ComponentShape {
  normal,
  laplace,
  uniform,
  student_t2,
  chisq_case,  // the misspecification recipes below
};

// One simulation design: a component shape, true parameters, a size and a
// replication budget, all reproducible from the seed.
struct ScenarioSpec {
  ComponentShape component = ComponentShape::normal;
  MixtureParams truth{{1.0}, {0.0}};
  double scale = 1.0;  // component standard deviation where defined
  int n = 200;
  int replications = 50;
  std::uint64_t seed = 1;
  bool run_sp = true;
  bool run_nmle = true;
  // Misspecification recipes (two components, weight truth.weights[0]):
  //   case 1: chisq(df1) vs chisq(df2)
  //   case 2: chisq(df1) vs (df2 - df1) + chisq(df1)
  //   case 3: N(df1, 2 df1) vs N(df2, 2 df2)
  int case_tag = 0;  // 0 = plain location mixture
  int df1 = 0;
  int df2 = 0;

  static ScenarioSpec from_json(const std::string& text);
  std::string to_json() const;
  void validate() const;  // throws std::invalid_argument
};

// Quantile function of the centered unit shape at level u in (0, 1); the
// closed-form inverses used for sampling.  The uniform covers
// [-sqrt(3), sqrt(3)] and the Laplace uses scale 1/sqrt(2) so both have unit
// variance; the t2 is standard (no variance).  The normal has no closed form
// and is sampled via Box-Muller pairs instead.
double component_quantile(ComponentShape shape, double u);

// One centered draw of the shape, scaled.
double sample_component(ComponentShape shape, double scale, CounterRng& rng);
double sample_chisq(int df, CounterRng& rng);

// The replication'th dataset of the scenario, from an isolated substream;
// unchanged by whether other replications are generated.
Sample generate(const ScenarioSpec& spec, int replication);

struct ExperimentRow {
  int replication = 0;
  std::string estimator;  // "sp" | "nmle"
  double lambda1 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma2 = 0.0;
  double objective = 0.0;  // d_n or log-likelihood
  bool converged = false;
};

struct ParamSummary {
  double mean = 0.0;
  double sd = 0.0;
  double mse = 0.0;  // against the scenario truth
};

struct EstimatorSummary {
  std::string estimator;
  int failures = 0;
  ParamSummary lambda1, mu1, mu2, sigma2;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;  // ordered by (replication, estimator)
  std::vector<EstimatorSummary> summaries;

  std::string rows_csv() const;
  std::string summary_json(const ScenarioSpec& spec) const;
};

// Fits every requested estimator on every replication with the multi-start
// protocol; deterministic given the spec.
ExperimentResult run_experiment(const ScenarioSpec& spec);

}  // namespace mixsym
