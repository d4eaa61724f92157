#pragma once

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aggmarket/errors.hpp"

namespace aggmarket {

// A model's response on one task: a finite nonnegative value, or nothing at
// all. Abstaining is distinct from answering with value 0 -- an abstaining
// model is never picked, a value-0 answer still competes for selection.
using Cell = std::optional<double>;

inline constexpr std::nullopt_t kAbstain = std::nullopt;

/// Values of every model's response on a single task, aligned by model index.
struct TaskValues {
  std::vector<Cell> values;

  TaskValues() = default;
  TaskValues(std::initializer_list<double> vs) {
    values.reserve(vs.size());
    for (double v : vs) values.emplace_back(v);
  }
  explicit TaskValues(std::vector<Cell> vs) : values(std::move(vs)) {}

  std::size_t size() const { return values.size(); }

  std::size_t responder_count() const {
    std::size_t n = 0;
    for (const auto& v : values) n += v.has_value();
    return n;
  }

  bool all_abstain() const { return responder_count() == 0; }

  /// The task with `v` appended as a new last entry.
  TaskValues with_appended(double v) const {
    TaskValues out = *this;
    out.values.emplace_back(v);
    return out;
  }

  // Throws on negative, NaN or infinite response values.
  void validate() const;
};

// Which rule turns a list of response values into pick probabilities.
//   Random           -- uniform over responders.
//   Optimal          -- argmax, uniform over exact ties.
//   Btl              -- softmax in value with temperature beta; beta = 0 is
//                       accepted as an alias for Optimal and beta = +inf for
//                       Random.
//   PairwiseMonotone -- the pairwise comparison rule with smoothing c > 0;
//                       monotone in value, unlike Btl.
enum class ChoiceKind { Random, Optimal, Btl, PairwiseMonotone };

struct ChoiceSpec {
  ChoiceKind kind = ChoiceKind::Btl;
  double beta = 1.0;  // Btl only
  double c = 1.0;     // PairwiseMonotone only

  static ChoiceSpec random() { return {ChoiceKind::Random, 0.0, 0.0}; }
  static ChoiceSpec optimal() { return {ChoiceKind::Optimal, 0.0, 0.0}; }
  static ChoiceSpec btl(double beta) { return {ChoiceKind::Btl, beta, 0.0}; }
  static ChoiceSpec pairwise_monotone(double c) {
    return {ChoiceKind::PairwiseMonotone, 0.0, c};
  }

  void validate() const;
};

// Producer objectives.
enum class Objective { Winrate, WeightedWinrate, ConsumerWelfare };

std::string to_string(Objective obj);

/// The market state: a rectangular model x task grid of response values.
struct ValueMatrix {
  std::vector<std::string> models;         // row ids, unique
  std::vector<std::string> tasks;          // column ids, unique
  std::vector<std::vector<Cell>> cells;    // cells[model][task]

  static ValueMatrix from_rows(
      const std::vector<std::pair<std::string, std::vector<Cell>>>& rows,
      std::vector<std::string> task_names = {});

  std::size_t model_count() const { return models.size(); }
  std::size_t task_count() const { return tasks.size(); }

  /// Column projection: all models' values on task `t`.
  TaskValues task_values(std::size_t t) const;

  /// A model's total value: its sum of values over tasks it answers.
  double total_value(std::size_t model) const;

  /// Mean value over answered tasks; NaN if the model abstains everywhere.
  double mean_value(std::size_t model) const;

  ValueMatrix subset(std::span<const std::size_t> model_indices) const;

  /// The market with one extra model appended as the last row.
  ValueMatrix with_row(std::string id, std::vector<Cell> row) const;

  std::optional<std::size_t> model_index(const std::string& id) const;

  void validate() const;
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace aggmarket
