#include "mixsym/sample.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mixsym {

Sample::Sample(std::vector<double> values, std::string label)
    : values_(std::move(values)), label_(std::move(label)) {
  if (values_.empty()) throw std::invalid_argument("empty sample");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite sample value");
  }
  std::sort(values_.begin(), values_.end());
}

Sample Sample::from_csv_stream(std::istream& in, std::string label) {
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(line.substr(start), &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": not a number: " + line);
    }
    values.push_back(v);
  }
  return Sample(std::move(values), std::move(label));
}

Sample Sample::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sample file: " + path);
  return from_csv_stream(in, path);
}

double Sample::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) /
         static_cast<double>(values_.size());
}

double Sample::variance() const {
  const std::size_t n = values_.size();
  if (n < 2) throw std::invalid_argument("variance needs n >= 2");
  const double m = mean();
  double ss = 0.0;
  for (double v : values_) ss += (v - m) * (v - m);
  return ss / static_cast<double>(n - 1);
}

double Sample::quantile(double q) const {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile level outside [0, 1]");
  const std::size_t n = values_.size();
  const double h = static_cast<double>(n - 1) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return values_[lo] + frac * (values_[hi] - values_[lo]);
}

}  // namespace mixsym
