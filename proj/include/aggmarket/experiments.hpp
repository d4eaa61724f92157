#pragma once

#include <span>

#include "aggmarket/report.hpp"
#include "aggmarket/scores.hpp"
#include "aggmarket/types.hpp"

namespace aggmarket {

/// 24 log-spaced temperatures in [1e-3, 1e3], bracketing both the optimal
/// and the random limit.
std::vector<double> default_beta_grid(double lo = 1e-3, double hi = 1e3,
                                      std::size_t n = 24);

/// Best model team per temperature: for each beta the welfare-maximal model
/// subset of size <= max_team, plus a welfare curve per subset that wins
/// somewhere on the grid.
ExperimentReport experiment_team_scan(const BenchmarkTable& table,
                                      std::span<const double> beta_grid,
                                      std::size_t max_team);

/// Fraction of (model, task) pairs whose welfare derivative is negative,
/// per temperature. Vanishes at both extremes of a wide grid.
ExperimentReport experiment_nonmonotone_scan(const BenchmarkTable& table,
                                             std::span<const double> beta_grid);

/// Entrant best responses under all three objectives: per-task allocations,
/// the existing task welfare, and the welfare after each entry.
ExperimentReport experiment_creation_table(
    const BenchmarkTable& table, double budget, double beta,
    const std::optional<std::vector<double>>& caps);

/// One point per unordered model pair, treated as a two-producer market:
/// x = instantaneous welfare under welfare-optimal picks minus under winrate
/// picks, y = the same minus under weighted-winrate picks. Pairs with y > x
/// (weighted winrate doing worse than winrate) are flagged along with the
/// negative-derivative diagnosis.
ExperimentReport experiment_replacement_scatter(const BenchmarkTable& table,
                                                double beta);

/// Per-model preference order over tasks under one objective, against the
/// full market: rows of (model, task, derivative, rank).
ExperimentReport experiment_task_orderings(const BenchmarkTable& table,
                                           double beta, Objective objective);

/// Selection probability of one model as its value sweeps [0, 10] against a
/// fixed opponent: the Btl curve next to the ratio-contest curve
/// v / (v + v_other).
ExperimentReport experiment_selection_curves(double v_other, double beta);

}  // namespace aggmarket
