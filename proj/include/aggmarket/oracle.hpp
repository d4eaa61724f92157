#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "aggmarket/creation.hpp"
#include "aggmarket/types.hpp"

namespace aggmarket {

struct GridSpec {
  double resolution = 0.1;
  std::size_t max_dims = 3;  // full grid enumeration cap

  // 0.01 for two tasks, 0.1 for three: fast at desk scale yet fine enough
  // to separate the regimes.
  static GridSpec defaults_for(std::size_t n_tasks) {
    return {n_tasks <= 2 ? 0.01 : 0.1, 3};
  }
};

/// Exhaustive reference maximizer over the budget simplex at grid
/// resolution. Enumerates every grid allocation (plus the per-task Abstain
/// corner for the ConsumerWelfare objective) and returns the best found
/// with its objective value. Deterministic, lowest-lexicographic tie-break.
/// Throws TooManyTasks above grid.max_dims tasks.
std::pair<Allocation, double> grid_alloc_oracle(
    const ValueMatrix& market, double budget, double beta, Objective objective,
    const GridSpec& grid, const std::optional<std::vector<double>>& caps = {});

struct ScoredSubset {
  std::vector<std::size_t> members;  // model indices, ascending
  double welfare = 0.0;
};

/// Scores every non-empty model subset of size <= max_team by total welfare,
/// sorted descending (lexicographic tie-break). Subsets leaving some task
/// with no responder are unservable and excluded. Throws TooManyModels above
/// 20 models.
std::vector<ScoredSubset> subset_oracle(const ValueMatrix& market,
                                        const ChoiceSpec& spec,
                                        std::size_t max_team);

/// Central difference (f(x+h) - f(x-h)) / 2h.
double fd_check(const std::function<double(double)>& f, double x, double step);

}  // namespace aggmarket
