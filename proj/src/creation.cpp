#include "aggmarket/creation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "aggmarket/oracle.hpp"

namespace aggmarket {

void Allocation::validate(std::size_t n_tasks) const {
  if (per_task.size() != n_tasks) {
    fail(Errc::DimensionMismatch, "allocation not dimensioned to the market");
  }
  if (caps && caps->size() != n_tasks) {
    fail(Errc::DimensionMismatch, "caps not dimensioned to the market");
  }
  double s = 0.0;
  for (std::size_t t = 0; t < per_task.size(); ++t) {
    if (!per_task[t]) continue;
    double v = *per_task[t];
    if (!std::isfinite(v) || v < 0.0) {
      fail(Errc::InvalidSpec, "allocation values must be finite and >= 0");
    }
    if (caps && v > (*caps)[t] + 1e-9) {
      fail(Errc::CapViolation, "allocation exceeds cap on task " + std::to_string(t));
    }
    s += v;
  }
  if (s > budget + 1e-9) {
    fail(Errc::CapViolation, "allocation exceeds total budget");
  }
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::Abstained: return "abstained";
    case Regime::Specialized: return "specialized";
    case Regime::EqualizedWinrate: return "equalized_winrate";
    case Regime::GreedyCapped: return "greedy_capped";
  }
  return "?";
}

namespace detail {

std::vector<TaskProfile> task_profiles(const ValueMatrix& market, double beta) {
  market.validate();
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    fail(Errc::InvalidSpec, "beta must be positive and finite");
  }
  ChoiceSpec spec = ChoiceSpec::btl(beta);
  std::vector<TaskProfile> out;
  out.reserve(market.task_count());
  for (std::size_t t = 0; t < market.task_count(); ++t) {
    TaskValues tv = market.task_values(t);
    if (tv.all_abstain()) {
      fail(Errc::AllAbstain, "task " + market.tasks[t] + " has no responders");
    }
    out.push_back({beta * log_exp_sum(tv, beta), task_welfare(tv, spec)});
  }
  return out;
}

double entry_prob(const TaskProfile& t, double x, double beta) {
  return sigmoid((x - t.alpha) / beta);
}

double entry_gain(const TaskProfile& t, double x, double beta) {
  return entry_prob(t, x, beta) * (x - t.welfare);
}

}  // namespace detail

double objective_of_allocation(const ValueMatrix& market,
                               const Allocation& alloc, Objective objective,
                               double beta) {
  auto prof = detail::task_profiles(market, beta);
  alloc.validate(market.task_count());
  switch (objective) {
    case Objective::Winrate: {
      double s = 0.0;
      for (std::size_t t = 0; t < prof.size(); ++t) {
        if (alloc.per_task[t]) {
          s += detail::entry_prob(prof[t], *alloc.per_task[t], beta);
        }
      }
      return s / static_cast<double>(prof.size());
    }
    case Objective::WeightedWinrate: {
      double s = 0.0;
      for (std::size_t t = 0; t < prof.size(); ++t) {
        if (alloc.per_task[t]) {
          s += *alloc.per_task[t] *
               detail::entry_prob(prof[t], *alloc.per_task[t], beta);
        }
      }
      return s;
    }
    case Objective::ConsumerWelfare: {
      std::string id = "entrant";
      while (market.model_index(id)) id += "+";
      return total_welfare(market.with_row(id, alloc.per_task),
                           ChoiceSpec::btl(beta));
    }
  }
  fail(Errc::InvalidSpec, "unknown objective");
}

namespace {

using detail::TaskProfile;

// Per-task score used while optimizing; mass 0 means "abstain" for the
// welfare objective and "answer with value 0" for the other two.
double mass_score(const TaskProfile& t, double x, double beta,
                  Objective objective) {
  switch (objective) {
    case Objective::Winrate:
      return detail::entry_prob(t, x, beta);
    case Objective::WeightedWinrate:
      return x * detail::entry_prob(t, x, beta);
    case Objective::ConsumerWelfare:
      return x > 0.0 ? detail::entry_gain(t, x, beta) : 0.0;
  }
  return 0.0;
}

double mass_total(const std::vector<TaskProfile>& prof,
                  const std::vector<double>& x, double beta,
                  Objective objective) {
  double s = 0.0;
  for (std::size_t t = 0; t < prof.size(); ++t) {
    s += mass_score(prof[t], x[t], beta, objective);
  }
  return s;
}

// Local improvement: pairwise mass transfers between tasks (dense scan plus
// a short golden-section polish), topping up unspent budget, and for the
// welfare objective dropping mass that scores negative. Deterministic.
std::vector<double> refine_pairwise(std::vector<double> x,
                                    const std::vector<TaskProfile>& prof,
                                    double beta, Objective objective,
                                    double budget,
                                    const std::vector<double>& caps) {
  const std::size_t n = x.size();
  auto score = [&](std::size_t t, double v) {
    return mass_score(prof[t], v, beta, objective);
  };
  const bool may_drop = objective == Objective::ConsumerWelfare;

  for (int pass = 0; pass < 60; ++pass) {
    bool improved = false;

    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t t = 0; t < n; ++t) {
        if (s == t) continue;
        double dmax = std::min(x[s], caps[t] - x[t]);
        if (dmax <= 1e-12) continue;
        double base = score(s, x[s]) + score(t, x[t]);
        auto g = [&](double d) {
          return score(s, x[s] - d) + score(t, x[t] + d);
        };
        double best_d = 0.0, best_g = base;
        const int kScan = 32;
        for (int k = 1; k <= kScan; ++k) {
          double d = dmax * static_cast<double>(k) / kScan;
          double v = g(d);
          if (v > best_g + 1e-13) {
            best_g = v;
            best_d = d;
          }
        }
        double lo = std::max(0.0, best_d - dmax / kScan);
        double hi = std::min(dmax, best_d + dmax / kScan);
        for (int it = 0; it < 50; ++it) {
          double m1 = lo + (hi - lo) / 3.0;
          double m2 = hi - (hi - lo) / 3.0;
          if (g(m1) < g(m2)) lo = m1; else hi = m2;
        }
        double d = 0.5 * (lo + hi);
        if (g(d) > best_g) { best_g = g(d); best_d = d; }
        if (best_g > base + 1e-12) {
          x[s] -= best_d;
          x[t] += best_d;
          if (x[s] < 1e-12) x[s] = 0.0;
          improved = true;
        }
      }
    }

    if (may_drop) {
      for (std::size_t s = 0; s < n; ++s) {
        if (x[s] > 0.0 && score(s, x[s]) < -1e-15) {
          x[s] = 0.0;  // abstaining beats a harmful entry
          improved = true;
        }
      }
    }

    double unspent = budget - std::accumulate(x.begin(), x.end(), 0.0);
    if (unspent > 1e-12) {
      std::size_t best_t = n;
      double best_gain = 1e-12;
      for (std::size_t t = 0; t < n; ++t) {
        double room = std::min(caps[t] - x[t], unspent);
        if (room <= 1e-12) continue;
        double gain = score(t, x[t] + room) - score(t, x[t]);
        if (gain > best_gain) {
          best_gain = gain;
          best_t = t;
        }
      }
      if (best_t < n) {
        x[best_t] += std::min(caps[best_t] - x[best_t], unspent);
        improved = true;
      }
    }

    if (!improved) break;
  }

  // Guard against drift above the budget from repeated transfers.
  double total = std::accumulate(x.begin(), x.end(), 0.0);
  if (total > budget) {
    std::size_t imax = std::distance(x.begin(), std::max_element(x.begin(), x.end()));
    x[imax] = std::max(0.0, x[imax] - (total - budget));
  }
  return x;
}

// Winrate / welfare equalizer: v_t(y) = clamp(alpha_t + beta * y, 0, cap_t)
// with y the logit of the common winrate; sum v_t(y) is nondecreasing in y,
// solved for the budget by bisection. Caller guarantees sum(caps) > budget.
std::vector<double> equalize_winrate_values(const std::vector<TaskProfile>& prof,
                                            double beta, double budget,
                                            const std::vector<double>& caps) {
  auto sum_at = [&](double y) {
    double s = 0.0;
    for (std::size_t t = 0; t < prof.size(); ++t) {
      s += std::clamp(prof[t].alpha + beta * y, 0.0, caps[t]);
    }
    return s;
  };
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i < 200 && sum_at(lo) > budget; ++i) lo = lo * 2.0 - 1.0;
  for (int i = 0; i < 200 && sum_at(hi) < budget; ++i) hi = hi * 2.0 + 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (sum_at(mid) <= budget) lo = mid; else hi = mid;
  }
  std::vector<double> out(prof.size());
  for (std::size_t t = 0; t < prof.size(); ++t) {
    out[t] = std::clamp(prof[t].alpha + beta * lo, 0.0, caps[t]);
  }
  return out;
}

std::vector<double> resolved_caps(const std::optional<std::vector<double>>& caps,
                                  std::size_t n) {
  if (!caps) return std::vector<double>(n, std::numeric_limits<double>::infinity());
  if (caps->size() != n) {
    fail(Errc::DimensionMismatch, "caps not dimensioned to the market");
  }
  for (double c : *caps) {
    if (!(c >= 0.0)) fail(Errc::InvalidSpec, "caps must be >= 0");
  }
  return *caps;
}

// Candidate allocations with the {subset at cap, one partial, rest empty}
// vertex structure, which is where the capped optima live. For every choice
// of partial task j the other tasks are filled in descending score order.
std::vector<std::vector<double>> vertex_candidates(
    const std::vector<TaskProfile>& prof, double beta, Objective objective,
    double budget, const std::vector<double>& caps) {
  const std::size_t n = prof.size();
  std::vector<std::vector<double>> cands;

  auto chunk_score = [&](std::size_t t, double x) {
    return mass_score(prof[t], x, beta, objective) -
           mass_score(prof[t], 0.0, beta, objective);
  };
  const bool positive_only = objective == Objective::ConsumerWelfare;

  // Sequential greedy: repeatedly fill the task whose next affordable chunk
  // scores best; for welfare, stop once no chunk beats abstaining.
  {
    std::vector<double> x(n, 0.0);
    std::vector<bool> filled(n, false);
    double rem = budget;
    while (rem > 1e-12) {
      std::size_t best_t = n;
      double best_s = positive_only ? 1e-15 : -std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < n; ++t) {
        if (filled[t] || caps[t] <= 0.0) continue;
        double chunk = std::min(caps[t], rem);
        double sc = chunk_score(t, chunk);
        if (sc > best_s) {
          best_s = sc;
          best_t = t;
        }
      }
      if (best_t == n) break;
      double chunk = std::min(caps[best_t], rem);
      x[best_t] = chunk;
      filled[best_t] = true;
      rem -= chunk;
    }
    cands.push_back(std::move(x));
  }

  // One designated partial/empty task j, the rest filled to cap greedily.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return chunk_score(a, std::min(caps[a], budget)) >
           chunk_score(b, std::min(caps[b], budget));
  });
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> x(n, 0.0);
    double rem = budget;
    for (std::size_t t : order) {
      if (t == j || rem < caps[t]) continue;
      if (positive_only && chunk_score(t, caps[t]) <= 0.0) continue;
      if (!std::isfinite(caps[t])) continue;  // uncapped tasks cannot "fill"
      x[t] = caps[t];
      rem -= caps[t];
    }
    double last = std::min(caps[j], rem);
    if (!positive_only || chunk_score(j, last) > 0.0) x[j] = last;
    cands.push_back(std::move(x));
  }

  // Pure one-hot per task.
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> x(n, 0.0);
    x[t] = std::min(caps[t], budget);
    cands.push_back(std::move(x));
  }
  return cands;
}

// Grid enumeration over the spend-fully simplex (solver-side fallback for
// the regimes the theory does not characterize). Last coordinate absorbs
// what remains.
std::vector<double> grid_best(const std::vector<TaskProfile>& prof, double beta,
                              Objective objective, double budget,
                              const std::vector<double>& caps, double step) {
  const std::size_t n = prof.size();
  std::vector<double> x(n, 0.0), best(n, 0.0);
  double best_v = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, double)> scan = [&](std::size_t t, double rem) {
    if (t + 1 == n) {
      x[t] = std::min(rem, caps[t]);
      double v = mass_total(prof, x, beta, objective);
      if (v > best_v + 1e-15) {
        best_v = v;
        best = x;
      }
      return;
    }
    double hi = std::min(rem, caps[t]);
    long steps = static_cast<long>(std::floor(hi / step + 1e-9));
    for (long k = 0; k <= steps; ++k) {
      x[t] = std::min(static_cast<double>(k) * step, hi);
      scan(t + 1, rem - x[t]);
    }
    if (hi > static_cast<double>(steps) * step + 1e-12) {
      x[t] = hi;
      scan(t + 1, rem - hi);
    }
    x[t] = 0.0;
  };
  scan(0, budget);
  return best;
}

std::vector<double> best_of(std::vector<std::vector<double>> candidates,
                            const std::vector<TaskProfile>& prof, double beta,
                            Objective objective, double budget,
                            const std::vector<double>& caps) {
  // Refine the strongest few candidates, then keep the overall best.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const auto& a, const auto& b) {
                     return mass_total(prof, a, beta, objective) >
                            mass_total(prof, b, beta, objective);
                   });
  std::vector<double> best = candidates.front();
  double best_v = mass_total(prof, best, beta, objective);
  std::size_t refine = std::min<std::size_t>(candidates.size(), 4);
  for (std::size_t i = 0; i < refine; ++i) {
    auto r = refine_pairwise(candidates[i], prof, beta, objective, budget, caps);
    double v = mass_total(prof, r, beta, objective);
    if (v > best_v + 1e-15) {
      best_v = v;
      best = std::move(r);
    }
  }
  return best;
}

Allocation make_allocation(const std::vector<double>& x, double budget,
                           const std::optional<std::vector<double>>& caps,
                           bool abstain_for_zero) {
  Allocation a;
  a.budget = budget;
  a.caps = caps;
  a.per_task.reserve(x.size());
  for (double v : x) {
    if (abstain_for_zero && v <= 0.0) {
      a.per_task.push_back(kAbstain);
    } else {
      a.per_task.push_back(v);
    }
  }
  return a;
}

bool any_cap_binding(const std::vector<double>& x, const std::vector<double>& caps) {
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (std::isfinite(caps[t]) && x[t] >= caps[t] - 1e-9) return true;
  }
  return false;
}

CreationResult finish(const ValueMatrix& market, Allocation alloc,
                      Objective objective, double beta, Regime regime) {
  CreationResult r;
  r.objective_value = objective_of_allocation(market, alloc, objective, beta);
  r.allocation = std::move(alloc);
  r.objective = objective;
  r.regime = regime;
  return r;
}

}  // namespace

CreationResult best_creation_welfare(
    const ValueMatrix& market, double budget, double beta,
    const std::optional<std::vector<double>>& caps) {
  auto prof = detail::task_profiles(market, beta);
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    fail(Errc::InvalidSpec, "budget must be finite and >= 0");
  }
  const std::size_t n = prof.size();

  if (!caps) {
    double min_w = prof[0].welfare;
    for (const auto& p : prof) min_w = std::min(min_w, p.welfare);
    Allocation a = make_allocation(std::vector<double>(n, 0.0), budget, caps, true);
    if (budget < min_w) {
      return finish(market, std::move(a), Objective::ConsumerWelfare, beta,
                    Regime::Abstained);
    }
    std::size_t best_t = 0;
    double best_g = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      double g = detail::entry_gain(prof[t], budget, beta);
      if (g > best_g + 1e-15) {
        best_g = g;
        best_t = t;
      }
    }
    a.per_task[best_t] = budget;
    return finish(market, std::move(a), Objective::ConsumerWelfare, beta,
                  Regime::Specialized);
  }

  auto cs = resolved_caps(caps, n);
  auto candidates = vertex_candidates(prof, beta, Objective::ConsumerWelfare,
                                      budget, cs);
  candidates.push_back(std::vector<double>(n, 0.0));  // full abstention
  if (n <= 3) {
    candidates.push_back(grid_best(prof, beta, Objective::ConsumerWelfare,
                                   budget, cs, GridSpec::defaults_for(n).resolution));
  }
  auto x = best_of(std::move(candidates), prof, beta,
                   Objective::ConsumerWelfare, budget, cs);
  Allocation a = make_allocation(x, budget, caps, true);
  bool entered = false;
  for (const auto& v : a.per_task) entered = entered || v.has_value();
  Regime regime = !entered ? Regime::Abstained
                  : any_cap_binding(x, cs) ? Regime::GreedyCapped
                                           : Regime::Specialized;
  return finish(market, std::move(a), Objective::ConsumerWelfare, beta, regime);
}

CreationResult best_creation_weighted_winrate(
    const ValueMatrix& market, double budget, double beta,
    const std::optional<std::vector<double>>& caps) {
  auto prof = detail::task_profiles(market, beta);
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    fail(Errc::InvalidSpec, "budget must be finite and >= 0");
  }
  const std::size_t n = prof.size();

  if (!caps) {
    // All value on the most winnable task (smallest exp-sum), zeros
    // elsewhere: producers tie-break pessimistically with value-0 answers.
    std::size_t best_t = 0;
    for (std::size_t t = 1; t < n; ++t) {
      if (prof[t].alpha < prof[best_t].alpha - 1e-15) best_t = t;
    }
    std::vector<double> x(n, 0.0);
    x[best_t] = budget;
    return finish(market, make_allocation(x, budget, caps, false),
                  Objective::WeightedWinrate, beta, Regime::Specialized);
  }

  auto cs = resolved_caps(caps, n);
  double cap_sum = std::accumulate(cs.begin(), cs.end(), 0.0);
  if (cap_sum < budget - 1e-9) {
    // Caps cannot absorb the budget; every task simply sits at its cap.
    return finish(market, make_allocation(cs, budget, caps, false),
                  Objective::WeightedWinrate, beta, Regime::GreedyCapped);
  }
  auto candidates =
      vertex_candidates(prof, beta, Objective::WeightedWinrate, budget, cs);
  if (n <= 3) {
    candidates.push_back(grid_best(prof, beta, Objective::WeightedWinrate,
                                   budget, cs, GridSpec::defaults_for(n).resolution));
  }
  auto x = best_of(std::move(candidates), prof, beta,
                   Objective::WeightedWinrate, budget, cs);
  Regime regime =
      any_cap_binding(x, cs) ? Regime::GreedyCapped : Regime::Specialized;
  return finish(market, make_allocation(x, budget, caps, false),
                Objective::WeightedWinrate, beta, regime);
}

CreationResult best_creation_winrate(
    const ValueMatrix& market, double budget, double beta,
    const std::optional<std::vector<double>>& caps) {
  auto prof = detail::task_profiles(market, beta);
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    fail(Errc::InvalidSpec, "budget must be finite and >= 0");
  }
  const std::size_t n = prof.size();
  auto cs = resolved_caps(caps, n);

  if (caps) {
    double cap_sum = std::accumulate(cs.begin(), cs.end(), 0.0);
    if (cap_sum < budget - 1e-9) {
      return finish(market, make_allocation(cs, budget, caps, false),
                    Objective::Winrate, beta, Regime::GreedyCapped);
    }
  }

  double max_alpha = 0.0;
  for (const auto& p : prof) max_alpha = std::max(max_alpha, p.alpha);
  const double upper = 2.0 * static_cast<double>(n) * max_alpha;

  // The two-task band is fully characterized: equalize at or above
  // beta * log(E_1 E_2), specialize on the smaller exp-sum below it.
  bool equalize = n == 1 || budget >= upper;
  if (!equalize && n == 2) {
    equalize = budget >= prof[0].alpha + prof[1].alpha;
  }

  if (equalize) {
    auto x = equalize_winrate_values(prof, beta, budget, cs);
    Regime regime = Regime::EqualizedWinrate;
    return finish(market, make_allocation(x, budget, caps, false),
                  Objective::Winrate, beta, regime);
  }

  if (n == 2 && !caps) {
    // Below the pairwise threshold the endpoint on the smaller exp-sum task
    // is optimal.
    std::size_t t = prof[0].alpha <= prof[1].alpha + 1e-15 ? 0 : 1;
    std::vector<double> x(n, 0.0);
    x[t] = budget;
    return finish(market, make_allocation(x, budget, caps, false),
                  Objective::Winrate, beta, Regime::Specialized);
  }

  // Intermediate band: the theory is silent, so search. Seeds cover the
  // regimes the endpoints realize, plus the equalizer.
  std::vector<std::vector<double>> candidates =
      vertex_candidates(prof, beta, Objective::Winrate, budget, cs);
  candidates.push_back(equalize_winrate_values(prof, beta, budget, cs));
  {
    std::vector<double> uniform(n, 0.0);
    double share = budget / static_cast<double>(n);
    for (std::size_t t = 0; t < n; ++t) uniform[t] = std::min(share, cs[t]);
    candidates.push_back(std::move(uniform));
  }
  if (n <= 3) {
    candidates.push_back(grid_best(prof, beta, Objective::Winrate, budget, cs,
                                   GridSpec::defaults_for(n).resolution));
  }
  auto x = best_of(std::move(candidates), prof, beta, Objective::Winrate,
                   budget, cs);
  std::size_t nonzero = 0;
  for (double v : x) nonzero += v > 1e-9;
  Regime regime = nonzero <= 1 ? Regime::Specialized : Regime::EqualizedWinrate;
  return finish(market, make_allocation(x, budget, caps, false),
                Objective::Winrate, beta, regime);
}

EqualizeThresholds equalize_thresholds(const ValueMatrix& market, double budget,
                                       double beta) {
  auto prof = detail::task_profiles(market, beta);
  EqualizeThresholds out;
  double max_alpha = 0.0;
  for (const auto& p : prof) max_alpha = std::max(max_alpha, p.alpha);
  out.upper = 2.0 * static_cast<double>(prof.size()) * max_alpha;
  out.must_equalize = budget >= out.upper - 1e-12;

  bool constant = true;
  for (std::size_t t = 1; t < market.task_count() && constant; ++t) {
    for (std::size_t m = 0; m < market.model_count() && constant; ++m) {
      const Cell& a = market.cells[m][0];
      const Cell& b = market.cells[m][t];
      constant = a.has_value() == b.has_value() && (!a || *a == *b);
    }
  }
  out.lower_applicable = constant;
  if (constant) {
    out.lower = static_cast<double>(prof.size()) * prof[0].alpha;
    out.cannot_equalize = budget <= out.lower + 1e-12;
  } else {
    out.lower = kNaN;
    out.cannot_equalize = false;
  }
  return out;
}

MechanismComparison mechanism_comparison(
    const ValueMatrix& market, double budget, double beta,
    const std::optional<std::vector<double>>& caps) {
  auto prof = detail::task_profiles(market, beta);
  MechanismComparison out;
  auto wr = best_creation_winrate(market, budget, beta, caps);
  auto ww = best_creation_weighted_winrate(market, budget, beta, caps);
  auto cw = best_creation_welfare(market, budget, beta, caps);
  out.welfare_under_winrate_br = objective_of_allocation(
      market, wr.allocation, Objective::ConsumerWelfare, beta);
  out.welfare_under_weighted_br = objective_of_allocation(
      market, ww.allocation, Objective::ConsumerWelfare, beta);
  out.welfare_under_welfare_br = objective_of_allocation(
      market, cw.allocation, Objective::ConsumerWelfare, beta);

  // i*: the task the weighted-winrate producer targets (max entry
  // probability); j*: the task with the lowest current welfare.
  std::size_t i_star = 0, j_star = 0;
  for (std::size_t t = 1; t < prof.size(); ++t) {
    if (prof[t].alpha < prof[i_star].alpha - 1e-15) i_star = t;
    if (prof[t].welfare < prof[j_star].welfare - 1e-15) j_star = t;
  }
  out.gap_bound = prof[i_star].welfare - prof[j_star].welfare;
  return out;
}

}  // namespace aggmarket
