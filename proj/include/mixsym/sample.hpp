#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mixsym {

// An immutable sorted batch of real observations.
class Sample {
 public:
  // Sorts the values; throws std::invalid_argument on an empty vector or
  // non-finite entries.
  explicit Sample(std::vector<double> values, std::string label = {});

  // Reads one numeric value per line; lines starting with '#' are skipped.
  // Throws std::runtime_error on I/O failure, std::invalid_argument on
  // malformed content.
  static Sample from_csv(const std::string& path);
  static Sample from_csv_stream(std::istream& in, std::string label = {});

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const std::string& label() const { return label_; }

  double min() const { return values_.front(); }
  double max() const { return values_.back(); }
  double mean() const;
  // Sample variance with divisor n-1; requires n >= 2.
  double variance() const;
  // Type-7 quantile (linear interpolation of order statistics), q in [0,1].
  double quantile(double q) const;

 private:
  std::vector<double> values_;
  std::string label_;
};

}  // namespace mixsym
