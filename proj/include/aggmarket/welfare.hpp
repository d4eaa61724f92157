#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "aggmarket/choice.hpp"
#include "aggmarket/types.hpp"

namespace aggmarket {

/// sigmoid(delta / beta) * delta: the per-task change in consumer welfare
/// when a model at gap `delta` joins a single incumbent under Btl.
double swish(double delta, double beta);

/// Welfare change from appending a model of value `new_value` to a task:
/// p_new * (new_value - current task welfare). Exact for Btl (including the
/// beta = 0 / +inf limits); throws InvalidSpec for other choice kinds.
double add_model_delta(const TaskValues& task, double new_value,
                       const ChoiceSpec& spec);

struct PairwiseBenefitReport {
  double delta = 0.0;       // welfare({A,B}) - welfare({A}), in closed form
  bool beneficial = false;  // delta >= 0
};

/// Does adding model B (row of per-task values) to sole incumbent A raise
/// consumer welfare under Btl? Closed form: sum of swish(v_b - v_a) terms.
PairwiseBenefitReport pairwise_benefit(std::span<const double> row_a,
                                       std::span<const double> row_b,
                                       double beta);

/// d(task welfare)/d(value of `agent`) under Btl:
/// p_i * (1 + sum_{j != i} (v_i - v_j) p_j / beta).
double welfare_derivative(const TaskValues& task, std::size_t agent,
                          double beta);

struct MonotoneReport {
  std::size_t agent = 0;
  double derivative = 0.0;
  bool in_monotone_region = false;  // derivative >= -1e-12
  double beta_star = 0.0;           // max_{j != i} v_j - v_i
};

/// Monotonicity diagnosis for one agent: the welfare derivative, whether it
/// is nonnegative, and the sufficient noise bound beta* above which the
/// derivative is guaranteed nonnegative (the bound is not tight).
MonotoneReport monotone_report(const TaskValues& task, std::size_t agent,
                               double beta);

struct NonmonotoneWitness {
  TaskValues values;
  std::size_t agent = 0;
  double beta = 0.0;  // sampled temperature; meaningful for Btl only
};

/// Randomized search for a monotonicity violation: an instance where raising
/// one agent's value lowers task welfare (verified by central differences).
/// Values are sampled uniformly from [0, 10], beta log-uniformly from
/// [1e-2, 1e2]. Returns empty when no witness is found within the budget;
/// deterministic given the seed. Under PairwiseMonotone and Optimal the
/// search must come up empty.
std::optional<NonmonotoneWitness> find_nonmonotone_witness(
    const ChoiceSpec& spec, std::size_t n_agents, std::size_t search_budget,
    std::uint64_t seed);

struct ExclusivityProbe {
  std::size_t monotone_violations = 0;    // a value increase lowered welfare
  std::size_t entry_harm_violations = 0;  // a new low entry lowered welfare
};

/// Probes the monotone-versus-free-entry tension on random instances: counts
/// trials where raising a value hurt welfare and trials where appending a
/// value below the current minimum hurt welfare. Any substitutable anonymous
/// choice rule trips at least one of the counters given enough trials.
ExclusivityProbe mutual_exclusivity_probe(const ChoiceSpec& spec,
                                          std::size_t trials,
                                          std::uint64_t seed);

namespace detail {

// Central difference of task welfare in one agent's value under any spec.
double fd_task_welfare_derivative(const TaskValues& task, std::size_t agent,
                                  const ChoiceSpec& spec, double step);

}  // namespace detail

}  // namespace aggmarket
