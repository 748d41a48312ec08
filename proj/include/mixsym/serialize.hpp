#pragma once

#include <string>

#include "mixsym/comparator.hpp"
#include "mixsym/identifiability.hpp"
#include "mixsym/optimize.hpp"

namespace mixsym {

// JSON codecs for the structured outputs.  Numbers round-trip losslessly
// (shortest representation that parses back to the identical double).

std::string fit_result_to_json(const FitResult& result, const std::string& method,
                               double p, std::size_t n, const std::string& label);

// Extracts (weights, locations) from a fit JSON document; throws
// std::invalid_argument on missing or malformed fields.
MixtureParams fit_params_from_json(const std::string& text);

std::string verdict_to_json(const MixtureParams& params,
                            const IdentifiabilityVerdict& verdict);

std::string bootstrap_report_to_json(const BootstrapReport& report,
                                     const std::string& method,
                                     std::uint64_t seed);

// One aligned "estimate (SE)" table over (mu1, mu2, lambda1, sigma2).
std::string format_estimate_table(const std::string& method,
                                  const std::vector<double>& point,
                                  const std::vector<double>* se);

}  // namespace mixsym
