#include "ctpe/core.hpp"

#include <cmath>
#include <sstream>

#include "ctpe/metric.hpp"

namespace ctpe {

Dimension Dimension::continuous(double low, double high) {
  if (!std::isfinite(low) || !std::isfinite(high) || !(low < high)) {
    throw std::invalid_argument("continuous dimension requires finite low < high");
  }
  return Dimension(Continuous{low, high});
}

Dimension Dimension::categorical(std::size_t count) {
  if (count < 2) {
    throw std::invalid_argument("categorical dimension requires at least 2 categories");
  }
  return Dimension(Categorical{count});
}

Dimension Dimension::metric_categorical(MetricHandle metric, std::optional<double> b) {
  if (!metric) {
    throw std::invalid_argument("metric-categorical dimension requires a metric");
  }
  if (metric->count() < 2) {
    throw std::invalid_argument("metric-categorical dimension requires at least 2 categories");
  }
  if (b && !(*b > 1.0)) {
    throw std::invalid_argument("exploration base b must be > 1");
  }
  const std::size_t count = metric->count();
  return Dimension(MetricCategorical{count, std::move(metric), b});
}

std::size_t Dimension::category_count() const {
  if (const auto* c = std::get_if<Categorical>(&kind_)) {
    return c->count;
  }
  if (const auto* m = std::get_if<MetricCategorical>(&kind_)) {
    return m->count;
  }
  return 0;
}

SearchSpace::SearchSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) {
    throw std::invalid_argument("search space requires at least one dimension");
  }
}

std::size_t SearchSpace::continuous_count() const {
  std::size_t n = 0;
  for (const auto& dim : dims_) {
    n += dim.is_continuous() ? 1 : 0;
  }
  return n;
}

void validate(const SearchSpace& space, std::span<const double> params) {
  if (params.size() != space.size()) {
    std::ostringstream msg;
    msg << "parameter vector has " << params.size() << " values, search space has " << space.size()
        << " dimensions";
    throw ValidationError(ValidationError::Kind::LengthMismatch, msg.str());
  }
  for (std::size_t d = 0; d < space.size(); ++d) {
    const double v = params[d];
    if (const auto* c = std::get_if<Continuous>(&space[d].kind())) {
      if (!(v >= c->low && v <= c->high)) {
        std::ostringstream msg;
        msg << "dimension " << d << ": value " << v << " outside [" << c->low << ", " << c->high << "]";
        throw ValidationError(ValidationError::Kind::ContinuousOutOfRange, msg.str());
      }
    } else {
      const auto count = static_cast<double>(space[d].category_count());
      if (!(v >= 0.0 && v < count) || v != std::floor(v)) {
        std::ostringstream msg;
        msg << "dimension " << d << ": category index " << v << " outside [0, " << count << ")";
        throw ValidationError(ValidationError::Kind::CategoryOutOfRange, msg.str());
      }
    }
  }
}

std::size_t best_index(std::span<const Observation> history) {
  if (history.empty()) {
    throw std::invalid_argument("best_observation: empty history");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (history[i].value < history[best].value) {
      best = i;
    }
  }
  return best;
}

const Observation& best_observation(std::span<const Observation> history) {
  return history[best_index(history)];
}

}  // namespace ctpe
