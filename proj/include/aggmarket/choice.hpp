#pragma once

#include <vector>

#include "aggmarket/types.hpp"

namespace aggmarket {

// Probabilities aligned with a TaskValues entry list. Entries sum to 1,
// abstaining models get probability exactly 0.
using ProbVector = std::vector<double>;

/// Pick probabilities for every model on one task under the given choice
/// rule. Throws AllAbstain if nobody answers, InvalidSpec on bad parameters.
ProbVector pick_probs(const TaskValues& task, const ChoiceSpec& spec);

/// Expected picked value on one task: sum of value * pick probability.
/// Always lies between the smallest and largest answered value.
double task_welfare(const TaskValues& task, const ChoiceSpec& spec);

/// Consumer welfare of the whole market: task_welfare summed over tasks.
/// Throws AllAbstain naming the first task with no responders.
double total_welfare(const ValueMatrix& market, const ChoiceSpec& spec);

struct BtlLimits {
  bool near_optimal = false;  // Btl at beta_small ~ Optimal (L-inf < 1e-3)
  bool near_random = false;   // Btl at beta_large ~ Random  (L-inf < 1e-3)
};

/// Checks the Btl limit behaviour on a concrete task: low temperature
/// approaches Optimal, high temperature approaches Random.
BtlLimits btl_limits_check(const TaskValues& task, double beta_small,
                           double beta_large);

namespace detail {

// log(sum_i exp(x_i)) with the usual max shift; empty input -> -inf.
double log_sum_exp(std::span<const double> xs);

// Numerically stable logistic function.
double sigmoid(double z);

// log E_t = log sum_i exp(v_i / beta) over responders of one task.
double log_exp_sum(const TaskValues& task, double beta);

}  // namespace detail

}  // namespace aggmarket
