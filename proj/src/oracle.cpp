#include "aggmarket/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

namespace aggmarket {

namespace {

// Objective of a concrete allocation, computed the direct way (materialize
// the task vector and sum over the softmax) so the oracle stays independent
// of the closed forms the solvers use.
double direct_objective(const ValueMatrix& market, const std::vector<Cell>& row,
                        Objective objective, double beta) {
  ChoiceSpec spec = ChoiceSpec::btl(beta);
  double acc = 0.0;
  for (std::size_t t = 0; t < market.task_count(); ++t) {
    TaskValues tv = market.task_values(t);
    switch (objective) {
      case Objective::Winrate:
        if (row[t]) acc += pick_probs(tv.with_appended(*row[t]), spec).back();
        break;
      case Objective::WeightedWinrate:
        if (row[t]) {
          acc += *row[t] * pick_probs(tv.with_appended(*row[t]), spec).back();
        }
        break;
      case Objective::ConsumerWelfare:
        acc += task_welfare(row[t] ? tv.with_appended(*row[t]) : tv, spec);
        break;
    }
  }
  if (objective == Objective::Winrate) {
    acc /= static_cast<double>(market.task_count());
  }
  return acc;
}

}  // namespace

std::pair<Allocation, double> grid_alloc_oracle(
    const ValueMatrix& market, double budget, double beta, Objective objective,
    const GridSpec& grid, const std::optional<std::vector<double>>& caps) {
  market.validate();
  if (!(grid.resolution > 0.0)) fail(Errc::InvalidSpec, "grid resolution > 0");
  if (!(beta > 0.0)) fail(Errc::InvalidSpec, "beta must be > 0");
  std::size_t n = market.task_count();
  if (n > grid.max_dims) {
    fail(Errc::TooManyTasks, "grid oracle limited to " +
                                 std::to_string(grid.max_dims) + " tasks");
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (market.task_values(t).all_abstain()) {
      fail(Errc::AllAbstain, "task " + market.tasks[t] + " has no responders");
    }
  }

  auto cap_of = [&](std::size_t t) {
    return caps ? (*caps)[t] : std::numeric_limits<double>::infinity();
  };
  const bool abstain_corner = objective == Objective::ConsumerWelfare;

  std::vector<Cell> row(n, kAbstain);
  std::vector<Cell> best_row(n, kAbstain);
  double best_value = -std::numeric_limits<double>::infinity();

  // Grid scan over tasks 0..n-2; the last coordinate takes everything that
  // is still affordable (per task the objective gain is maximized either by
  // the largest feasible value or by abstaining, so no resolution is lost).
  auto consider = [&]() {
    double v = direct_objective(market, row, objective, beta);
    if (v > best_value + 1e-15) {
      best_value = v;
      best_row = row;
    }
  };

  std::function<void(std::size_t, double)> scan = [&](std::size_t t,
                                                      double remaining) {
    if (t + 1 == n) {
      double x = std::min(remaining, cap_of(t));
      if (abstain_corner) {
        row[t] = kAbstain;
        consider();
      }
      row[t] = x;
      consider();
      row[t] = kAbstain;
      return;
    }
    if (abstain_corner) {
      row[t] = kAbstain;
      scan(t + 1, remaining);
    }
    double hi = std::min(remaining, cap_of(t));
    long steps = static_cast<long>(std::floor(hi / grid.resolution + 1e-9));
    for (long k = 0; k <= steps; ++k) {
      double x = std::min(static_cast<double>(k) * grid.resolution, hi);
      row[t] = x;
      scan(t + 1, remaining - x);
    }
    // The cap / budget boundary itself, when it falls between grid points.
    if (hi > static_cast<double>(steps) * grid.resolution + 1e-12) {
      row[t] = hi;
      scan(t + 1, remaining - hi);
    }
    row[t] = kAbstain;
  };
  scan(0, budget);

  Allocation alloc;
  alloc.per_task = best_row;
  alloc.budget = budget;
  alloc.caps = caps;
  return {alloc, best_value};
}

std::vector<ScoredSubset> subset_oracle(const ValueMatrix& market,
                                        const ChoiceSpec& spec,
                                        std::size_t max_team) {
  market.validate();
  spec.validate();
  std::size_t n = market.model_count();
  if (n > 20) fail(Errc::TooManyModels, "subset oracle limited to 20 models");
  if (max_team < 1) fail(Errc::InvalidSpec, "max_team must be >= 1");

  std::vector<ScoredSubset> out;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > max_team) continue;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) members.push_back(i);
    }
    ValueMatrix sub = market.subset(members);
    bool servable = true;
    for (std::size_t t = 0; t < sub.task_count() && servable; ++t) {
      servable = !sub.task_values(t).all_abstain();
    }
    if (!servable) continue;
    out.push_back({std::move(members), total_welfare(sub, spec)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoredSubset& a, const ScoredSubset& b) {
                     if (a.welfare != b.welfare) return a.welfare > b.welfare;
                     return a.members < b.members;
                   });
  return out;
}

double fd_check(const std::function<double(double)>& f, double x, double step) {
  if (!(step > 0.0)) fail(Errc::InvalidSpec, "step must be > 0");
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

}  // namespace aggmarket
