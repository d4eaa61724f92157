#pragma once

#include <array>
#include <span>
#include <vector>

#include "aggmarket/types.hpp"

namespace aggmarket {

// One task in the two-producer replacement setting.
struct DuopolyTask {
  double v_a = 0.0;
  double v_b = 0.0;
  double beta = 1.0;

  void validate() const;
};

enum class Producer { A, B };

/// Instantaneous change of the producer's objective in its own value on one
/// task, in closed form:
///   winrate            p (1 - p) / beta
///   weighted winrate   p + v_i p (1 - p) / beta
///   consumer welfare   p + (v_i - v_j) p (1 - p) / beta
double objective_derivative(const DuopolyTask& task, Producer producer,
                            Objective objective);

struct TaskOrderings {
  std::vector<std::size_t> order_a;  // task indices, best first
  std::vector<std::size_t> order_b;
};

/// Each producer's preference order over tasks (descending derivative of the
/// given objective, lowest index first on ties). Under Winrate the two
/// orders coincide; under ConsumerWelfare they are exact reverses.
TaskOrderings task_orderings(std::span<const DuopolyTask> tasks,
                             Objective objective);

/// Sum of the consumer-welfare derivatives at the two picked tasks. Equal
/// picks give exactly 1: the producers' probability shifts cancel.
double instantaneous_welfare(std::span<const DuopolyTask> tasks,
                             std::size_t pick_a, std::size_t pick_b);

struct SpecializationCondition {
  double a12 = 0.0;  // threshold above which A prefers the first task
  double b12 = 0.0;  // threshold below which B prefers the first task
  bool split = false;
};

/// Do the producers improve different tasks under weighted winrate? They
/// split exactly when the winrate gap p_a(i) - p_a(j) clears a12 for one
/// producer but not b12 for the other; a gap exceeding both thresholds in
/// magnitude is the sufficient form of the condition.
SpecializationCondition specialization_condition(const DuopolyTask& task_i,
                                                 const DuopolyTask& task_j);

struct BothnegDiagnosis {
  bool ww_worse_than_winrate = false;
  bool some_producer_negative_on_both = false;
};

/// Does weighted winrate steer this task pair to lower instantaneous
/// consumer welfare than winrate would? Whenever it does, one producer must
/// be in the non-monotone regime on both tasks (the converse may fail).
BothnegDiagnosis bothneg_diagnosis(const DuopolyTask& task_i,
                                   const DuopolyTask& task_j);

// Derivatives of every objective for both producers on every task, plus
// each producer's chosen task per objective (row argmax, lowest index on
// ties). Objective index order: Winrate, WeightedWinrate, ConsumerWelfare.
struct IncentiveTable {
  std::vector<std::array<std::array<double, 3>, 2>> derivatives;  // [task][producer][objective]
  std::array<std::array<std::size_t, 3>, 2> picks{};              // [producer][objective]
};

IncentiveTable incentive_table(std::span<const DuopolyTask> tasks);

}  // namespace aggmarket
