#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ctpe {

class Metric;
using MetricHandle = std::shared_ptr<const Metric>;

struct Continuous {
  double low;
  double high;
};

struct Categorical {
  std::size_t count;
};

/// Categorical dimension whose categories carry a distance metric.
/// `b` overrides the study-wide exploration base for this dimension only.
struct MetricCategorical {
  std::size_t count;
  MetricHandle metric;
  std::optional<double> b{};
};

/// One coordinate of the search space.
class Dimension {
 public:
  using Kind = std::variant<Continuous, Categorical, MetricCategorical>;

  static Dimension continuous(double low, double high);
  static Dimension categorical(std::size_t count);
  static Dimension metric_categorical(MetricHandle metric, std::optional<double> b = std::nullopt);

  const Kind& kind() const { return kind_; }
  bool is_continuous() const { return std::holds_alternative<Continuous>(kind_); }
  /// Number of categories; zero for continuous dimensions.
  std::size_t category_count() const;

 private:
  explicit Dimension(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

class SearchSpace {
 public:
  explicit SearchSpace(std::vector<Dimension> dims);

  std::size_t size() const { return dims_.size(); }
  const Dimension& operator[](std::size_t d) const { return dims_[d]; }
  const std::vector<Dimension>& dims() const { return dims_; }
  std::size_t continuous_count() const;

 private:
  std::vector<Dimension> dims_;
};

/// One value per dimension. Categorical values are stored as 0-based
/// category indices held exactly in a double.
using ParamVector = std::vector<double>;

struct Observation {
  ParamVector params;
  double value;
};

class ValidationError : public std::invalid_argument {
 public:
  enum class Kind { LengthMismatch, ContinuousOutOfRange, CategoryOutOfRange };

  ValidationError(Kind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Throws ValidationError unless `params` is a point of `space`.
void validate(const SearchSpace& space, std::span<const double> params);

/// Category index of a validated categorical value.
inline std::size_t category_of(double value) { return static_cast<std::size_t>(value); }

/// Index of the minimal-value observation; the earliest one wins ties.
std::size_t best_index(std::span<const Observation> history);
const Observation& best_observation(std::span<const Observation> history);

}  // namespace ctpe
