#pragma once

#include <optional>
#include <vector>

#include "aggmarket/choice.hpp"
#include "aggmarket/types.hpp"

namespace aggmarket {

/// A new model's value assignment across tasks. Abstain leaves a task
/// untouched; a 0 entry answers with a zero-value response, which still
/// competes for selection.
struct Allocation {
  std::vector<Cell> per_task;
  double budget = 0.0;
  std::optional<std::vector<double>> caps;

  double spent() const {
    double s = 0.0;
    for (const auto& v : per_task) {
      if (v) s += *v;
    }
    return s;
  }

  // Checks dimensions, the budget bound (sum <= budget + 1e-9) and per-task
  // caps. Throws DimensionMismatch / CapViolation.
  void validate(std::size_t n_tasks) const;
};

enum class Regime { Abstained, Specialized, EqualizedWinrate, GreedyCapped };

std::string to_string(Regime regime);

struct CreationResult {
  Allocation allocation;
  double objective_value = 0.0;
  Objective objective = Objective::Winrate;
  Regime regime = Regime::Abstained;
};

/// Scores an allocation for the entering producer:
///   Winrate          -- mean over tasks of the new model's pick probability,
///   WeightedWinrate  -- sum of value times pick probability,
///   ConsumerWelfare  -- total welfare of the market with the row appended.
double objective_of_allocation(const ValueMatrix& market,
                               const Allocation& alloc, Objective objective,
                               double beta);

/// Best response for consumer welfare: abstain everywhere when the budget
/// cannot beat the cheapest task, otherwise all budget on the task with the
/// largest entry gain. With caps, tasks are filled to their maxima greedily
/// and the remainder abstains when it cannot beat a task's current welfare.
CreationResult best_creation_welfare(
    const ValueMatrix& market, double budget, double beta,
    const std::optional<std::vector<double>>& caps = {});

/// Best response for mean winrate. Above the equalization threshold the
/// allocation equalizes the new model's winrate across tasks (monotone
/// root-finding on the common winrate); below it, falls back to grid search
/// plus local refinement. Never abstains: a zero-value answer still collects
/// winrate. If caps cannot absorb the budget, every task sits at its cap.
CreationResult best_creation_winrate(
    const ValueMatrix& market, double budget, double beta,
    const std::optional<std::vector<double>>& caps = {});

/// Best response for weighted winrate: all budget on the task with the
/// smallest exp-sum E_t (the most winnable task), zero-value answers
/// elsewhere. With caps, the best cap-saturated allocation.
CreationResult best_creation_weighted_winrate(
    const ValueMatrix& market, double budget, double beta,
    const std::optional<std::vector<double>>& caps = {});

struct EqualizeThresholds {
  double upper = 0.0;  // budget >= upper forces winrate equalization
  double lower = 0.0;  // constant markets only; NaN otherwise
  bool lower_applicable = false;
  bool must_equalize = false;
  bool cannot_equalize = false;
};

/// The equalization bounds for the winrate best response:
/// upper = 2 T beta max_t log E_t; lower = T beta log E, reported only when
/// every task has the same existing values.
EqualizeThresholds equalize_thresholds(const ValueMatrix& market,
                                       double budget, double beta);

struct MechanismComparison {
  double welfare_under_winrate_br = 0.0;
  double welfare_under_weighted_br = 0.0;
  double welfare_under_welfare_br = 0.0;
  // Suboptimality bound for the weighted-winrate task choice: task welfare
  // at the most winnable task minus at the lowest-welfare task.
  double gap_bound = 0.0;
};

/// Consumer welfare of the market after appending each objective's best
/// response, plus the task-choice gap bound.
MechanismComparison mechanism_comparison(
    const ValueMatrix& market, double budget, double beta,
    const std::optional<std::vector<double>>& caps = {});

namespace detail {

// Per-task quantities the creation solvers work with.
struct TaskProfile {
  double alpha = 0.0;    // beta * log E_t, the effective incumbent strength
  double welfare = 0.0;  // existing task welfare under Btl(beta)
};

std::vector<TaskProfile> task_profiles(const ValueMatrix& market, double beta);

// New model's pick probability when answering value x on a profiled task.
double entry_prob(const TaskProfile& t, double x, double beta);

// Welfare gain of answering value x on a profiled task.
double entry_gain(const TaskProfile& t, double x, double beta);

}  // namespace detail

}  // namespace aggmarket
