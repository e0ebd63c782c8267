#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "isingtune/rng.hpp"

namespace isingtune {

using ParamValue = std::int64_t;
using ParamVector = std::vector<ParamValue>;

/// One integer hyperparameter: hard machine limits plus the active search
/// range, which range narrowing may shrink.
struct ParamSpec {
  std::string name;
  ParamValue allowed_min = 0;
  ParamValue allowed_max = 0;
  ParamValue current_min = 0;
  ParamValue current_max = 0;

  ParamSpec() = default;
  ParamSpec(std::string name_, ParamValue lo, ParamValue hi)
      : name(std::move(name_)),
        allowed_min(lo),
        allowed_max(hi),
        current_min(lo),
        current_max(hi) {}
};

struct ParamSpace {
  std::vector<ParamSpec> specs;

  void validate() const {
    for (std::size_t a = 0; a < specs.size(); ++a) {
      const ParamSpec& s = specs[a];
      if (!(s.allowed_min <= s.current_min && s.current_min <= s.current_max &&
            s.current_max <= s.allowed_max)) {
        throw std::invalid_argument("parameter '" + s.name +
                                    "' has inconsistent bounds");
      }
      for (std::size_t b = a + 1; b < specs.size(); ++b) {
        if (specs[b].name == s.name) {
          throw std::invalid_argument("duplicate parameter name '" + s.name +
                                      "'");
        }
      }
    }
  }
};

/// Each parameter drawn independently and uniformly over its current range,
/// bounds inclusive.
inline ParamVector suggest_random(const ParamSpace& space, Rng& rng) {
  ParamVector out;
  out.reserve(space.specs.size());
  for (const ParamSpec& s : space.specs) {
    out.push_back(rng.uniform_int(s.current_min, s.current_max));
  }
  return out;
}

/// Observation history and knobs for the Parzen-estimator sampler. The
/// defaults are fixed so runs are reproducible; they are close to the
/// values common TPE implementations use.
struct TpeState {
  std::vector<std::pair<ParamVector, double>> observations;
  std::size_t n_startup = 10;
  std::size_t n_candidates = 24;
  double good_fraction = 0.25;
  std::size_t max_good = 25;
};

namespace tpe_detail {

// Mixture of one Gaussian kernel per observed value plus a uniform prior
// over the current integer range. The prior keeps the density strictly
// positive everywhere in range, so the l/g ratio is always defined.
class ParzenMixture {
 public:
  ParzenMixture(std::vector<double> centers, ParamValue lo, ParamValue hi)
      : centers_(std::move(centers)), lo_(lo), hi_(hi) {
    const double range = static_cast<double>(hi_ - lo_);
    const std::size_t capped = std::min<std::size_t>(
        std::max<std::size_t>(centers_.size(), 1), 25);
    bandwidth_ = std::max(range / static_cast<double>(capped), 1.0);
    prior_density_ = 1.0 / static_cast<double>(hi_ - lo_ + 1);
  }

  double density(double x) const {
    double acc = prior_density_;
    const double inv = 1.0 / bandwidth_;
    for (double c : centers_) {
      const double z = (x - c) * inv;
      acc += 0.3989422804014327 * std::exp(-0.5 * z * z) * inv;
    }
    return acc / static_cast<double>(centers_.size() + 1);
  }

  ParamValue sample(Rng& rng) const {
    const std::size_t pick =
        static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(
                                                        centers_.size())));
    double x;
    if (pick == centers_.size()) {
      return rng.uniform_int(lo_, hi_);  // prior component
    }
    x = centers_[pick] + bandwidth_ * rng.normal();
    const ParamValue v = static_cast<ParamValue>(std::llround(x));
    return std::clamp(v, lo_, hi_);
  }

 private:
  std::vector<double> centers_;
  ParamValue lo_;
  ParamValue hi_;
  double bandwidth_;
  double prior_density_;
};

// Indices of all observations ordered by objective, ties broken by trial
// recency (earlier trials sort first and therefore land in "good").
inline std::vector<std::size_t> rank_by_objective(const TpeState& state) {
  std::vector<std::size_t> order(state.observations.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return state.observations[a].second <
                            state.observations[b].second;
                   });
  return order;
}

}  // namespace tpe_detail

/// Tree-structured Parzen Estimator suggestion. Falls back to uniform
/// sampling during the startup phase. Afterwards, per parameter
/// independently: the observations with the lowest objectives form the
/// "good" density l(x), the rest form g(x); candidates are drawn from l and
/// the one maximizing l/g wins. Observation values outside the current
/// range contribute no kernel, so a narrowed range sheds stale history
/// while the uniform prior keeps both densities positive.
inline ParamVector suggest_tpe(const ParamSpace& space, const TpeState& state,
                               Rng& rng) {
  if (state.observations.size() < state.n_startup) {
    return suggest_random(space, rng);
  }

  const std::size_t n_obs = state.observations.size();
  const std::size_t n_good = std::min<std::size_t>(
      static_cast<std::size_t>(
          std::ceil(state.good_fraction * static_cast<double>(n_obs))),
      state.max_good);
  const std::vector<std::size_t> order = tpe_detail::rank_by_objective(state);

  ParamVector out;
  out.reserve(space.specs.size());
  for (std::size_t k = 0; k < space.specs.size(); ++k) {
    const ParamSpec& spec = space.specs[k];
    if (spec.current_min == spec.current_max) {
      out.push_back(spec.current_min);
      continue;
    }

    std::vector<double> good_values;
    std::vector<double> rest_values;
    for (std::size_t r = 0; r < order.size(); ++r) {
      const ParamValue v = state.observations[order[r]].first[k];
      if (v < spec.current_min || v > spec.current_max) continue;
      (r < n_good ? good_values : rest_values)
          .push_back(static_cast<double>(v));
    }

    const tpe_detail::ParzenMixture good(std::move(good_values),
                                         spec.current_min, spec.current_max);
    const tpe_detail::ParzenMixture rest(std::move(rest_values),
                                         spec.current_min, spec.current_max);

    ParamValue best_value = spec.current_min;
    double best_score = -1.0;
    for (std::size_t c = 0; c < state.n_candidates; ++c) {
      const ParamValue candidate = good.sample(rng);
      const double x = static_cast<double>(candidate);
      const double score = good.density(x) / rest.density(x);
      if (score > best_score) {
        best_score = score;
        best_value = candidate;
      }
    }
    out.push_back(best_value);
  }
  return out;
}

}  // namespace isingtune
