#include "mixsym/stepfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mixsym {

namespace {

// Breakpoints closer than this are indistinguishable for the exact sweeps.
double merge_tol(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

bool vanishing_tails(const StepFunction& f) {
  return f.levels().front() == 0.0 && f.levels().back() == 0.0;
}

}  // namespace

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> levels) {
  if (levels.size() != breakpoints.size() + 1)
    throw std::invalid_argument("levels must have one more entry than breakpoints");
  for (double t : breakpoints)
    if (!std::isfinite(t)) throw std::invalid_argument("non-finite breakpoint");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (breakpoints[i] < breakpoints[i - 1])
      throw std::invalid_argument("breakpoints not sorted");

  // Merge near-duplicate abscissae; the rightmost level of a cluster wins.
  breakpoints_.reserve(breakpoints.size());
  levels_.reserve(levels.size());
  levels_.push_back(levels.front());
  double prev_original = 0.0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double t = breakpoints[i];
    if (!breakpoints_.empty() && t - prev_original <= merge_tol(prev_original)) {
      levels_.back() = levels[i + 1];
    } else {
      breakpoints_.push_back(t);
      levels_.push_back(levels[i + 1]);
    }
    prev_original = t;
  }

  // Drop breakpoints across which the level does not change.
  std::size_t out = 0;
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (levels_[i + 1] == levels_[out]) continue;
    breakpoints_[out] = breakpoints_[i];
    levels_[out + 1] = levels_[i + 1];
    ++out;
  }
  breakpoints_.resize(out);
  levels_.resize(out + 1);
}

double StepFunction::operator()(double t) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return levels_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

double StepFunction::left_limit(double t) const {
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return levels_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

StepFunction ecdf(const Sample& sample) {
  const auto& x = sample.values();
  const double n = static_cast<double>(x.size());
  std::vector<double> breakpoints;
  std::vector<double> levels{0.0};
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++count;
    if (i + 1 < x.size() && x[i + 1] == x[i]) continue;
    breakpoints.push_back(x[i]);
    levels.push_back(static_cast<double>(count) / n);
  }
  return StepFunction(std::move(breakpoints), std::move(levels));
}

StepFunction reflect(const StepFunction& f, ReflectRole role) {
  const auto& bp = f.breakpoints();
  const auto& lv = f.levels();
  const std::size_t m = bp.size();
  std::vector<double> rbp(m);
  std::vector<double> rlv(m + 1);
  for (std::size_t i = 0; i < m; ++i) rbp[i] = -bp[m - 1 - i];
  for (std::size_t i = 0; i <= m; ++i)
    rlv[i] = role == ReflectRole::cdf ? 1.0 - lv[m - i] : lv[m - i];
  return StepFunction(std::move(rbp), std::move(rlv));
}

StepFunction shift(const StepFunction& f, double c) {
  std::vector<double> bp = f.breakpoints();
  for (double& t : bp) t += c;
  return StepFunction(std::move(bp), f.levels());
}

StepFunction linear_combination(std::span<const double> coeffs,
                                std::span<const StepFunction> fs) {
  if (coeffs.size() != fs.size())
    throw std::invalid_argument("coefficient/function length mismatch");
  if (fs.empty()) throw std::invalid_argument("empty linear combination");

  struct Event {
    double t;
    std::uint32_t fn;
    std::uint32_t level_index;
  };
  std::vector<Event> events;
  std::size_t total = 0;
  for (const auto& f : fs) total += f.breakpoints().size();
  events.reserve(total);
  for (std::uint32_t i = 0; i < fs.size(); ++i) {
    const auto& bp = fs[i].breakpoints();
    for (std::uint32_t j = 0; j < bp.size(); ++j)
      events.push_back({bp[j], i, j + 1});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.fn != b.fn) return a.fn < b.fn;
    return a.level_index < b.level_index;
  });

  std::vector<std::size_t> current(fs.size(), 0);
  auto combined = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i)
      s += coeffs[i] * fs[i].levels()[current[i]];
    return s;
  };

  std::vector<double> bps;
  std::vector<double> lvls;
  lvls.push_back(combined());
  std::size_t e = 0;
  while (e < events.size()) {
    const double rep = events[e].t;
    double last = rep;
    while (e < events.size() && events[e].t - last <= merge_tol(last)) {
      current[events[e].fn] = events[e].level_index;
      last = events[e].t;
      ++e;
    }
    bps.push_back(rep);
    lvls.push_back(combined());
  }
  return StepFunction(std::move(bps), std::move(lvls));
}

double lp_integral(const StepFunction& f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("invalid p");
  if (!vanishing_tails(f)) throw std::invalid_argument("non-integrable step function");
  const auto& bp = f.breakpoints();
  const auto& lv = f.levels();
  double acc = 0.0;
  for (std::size_t i = 1; i < bp.size(); ++i) {
    const double level = lv[i];
    if (level == 0.0) continue;
    const double width = bp[i] - bp[i - 1];
    if (p == 1.0)
      acc += std::abs(level) * width;
    else if (p == 2.0)
      acc += level * level * width;
    else
      acc += std::pow(std::abs(level), p) * width;
  }
  return acc;
}

double sup_norm(const StepFunction& f) {
  double best = 0.0;
  for (double level : f.levels()) best = std::max(best, std::abs(level));
  return best;
}

double inner_product(const StepFunction& f, const StepFunction& g) {
  if (!vanishing_tails(f) || !vanishing_tails(g))
    throw std::invalid_argument("non-integrable step function");
  const auto& fb = f.breakpoints();
  const auto& gb = g.breakpoints();
  std::size_t i = 0, j = 0;
  double acc = 0.0;
  double prev_t = 0.0;
  bool started = false;
  while (i < fb.size() || j < gb.size()) {
    double t;
    bool take_f = false, take_g = false;
    if (i < fb.size() && j < gb.size()) {
      if (std::abs(fb[i] - gb[j]) <= merge_tol(fb[i])) {
        t = fb[i];
        take_f = take_g = true;
      } else if (fb[i] < gb[j]) {
        t = fb[i];
        take_f = true;
      } else {
        t = gb[j];
        take_g = true;
      }
    } else if (i < fb.size()) {
      t = fb[i];
      take_f = true;
    } else {
      t = gb[j];
      take_g = true;
    }
    if (started) {
      const double lf = f.levels()[i];
      const double lg = g.levels()[j];
      if (lf != 0.0 && lg != 0.0) acc += lf * lg * (t - prev_t);
    }
    if (take_f) ++i;
    if (take_g) ++j;
    prev_t = t;
    started = true;
  }
  return acc;
}

void write_csv(const StepFunction& f, std::ostream& out) {
  out << "t,value\n";
  char buf[64];
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", f.breakpoints()[i],
                  f.levels()[i + 1]);
    out << buf;
  }
}

std::string to_csv(const StepFunction& f) {
  std::ostringstream out;
  write_csv(f, out);
  return out.str();
}

}  // namespace mixsym
