#include "aggmarket/welfare.hpp"

#include <algorithm>
#include <cmath>

#include "aggmarket/rng.hpp"

namespace aggmarket {

double swish(double delta, double beta) {
  if (!(beta > 0.0)) fail(Errc::InvalidSpec, "swish requires beta > 0");
  return detail::sigmoid(delta / beta) * delta;
}

double add_model_delta(const TaskValues& task, double new_value,
                       const ChoiceSpec& spec) {
  if (spec.kind != ChoiceKind::Btl) {
    fail(Errc::InvalidSpec, "add_model_delta is defined for Btl");
  }
  if (!(new_value >= 0.0) || !std::isfinite(new_value)) {
    fail(Errc::InvalidSpec, "new value must be finite and >= 0");
  }
  double before = task_welfare(task, spec);
  TaskValues joined = task.with_appended(new_value);
  ProbVector p = pick_probs(joined, spec);
  return p.back() * (new_value - before);
}

PairwiseBenefitReport pairwise_benefit(std::span<const double> row_a,
                                       std::span<const double> row_b,
                                       double beta) {
  if (row_a.size() != row_b.size()) {
    fail(Errc::LengthMismatch, "rows must have the same task count");
  }
  if (!(beta > 0.0)) fail(Errc::InvalidSpec, "beta must be > 0");
  PairwiseBenefitReport out;
  for (std::size_t t = 0; t < row_a.size(); ++t) {
    out.delta += swish(row_b[t] - row_a[t], beta);
  }
  out.beneficial = out.delta >= 0.0;
  return out;
}

double welfare_derivative(const TaskValues& task, std::size_t agent,
                          double beta) {
  if (agent >= task.size()) fail(Errc::IndexOutOfRange, "agent out of range");
  if (!task.values[agent]) fail(Errc::AbstainAgent, "agent abstains");
  if (!(beta > 0.0)) fail(Errc::InvalidSpec, "beta must be > 0");
  ProbVector p = pick_probs(task, ChoiceSpec::btl(beta));
  double vi = *task.values[agent];
  double cross = 0.0;
  for (std::size_t j = 0; j < task.size(); ++j) {
    if (j == agent || !task.values[j]) continue;
    cross += (vi - *task.values[j]) * p[j];
  }
  return p[agent] * (1.0 + cross / beta);
}

MonotoneReport monotone_report(const TaskValues& task, std::size_t agent,
                               double beta) {
  MonotoneReport r;
  r.agent = agent;
  r.derivative = welfare_derivative(task, agent, beta);
  r.in_monotone_region = r.derivative >= -1e-12;
  double vi = *task.values[agent];
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < task.size(); ++j) {
    if (j != agent && task.values[j]) {
      best_other = std::max(best_other, *task.values[j]);
    }
  }
  r.beta_star = std::isfinite(best_other) ? best_other - vi
                                          : -std::numeric_limits<double>::infinity();
  return r;
}

namespace detail {

double fd_task_welfare_derivative(const TaskValues& task, std::size_t agent,
                                  const ChoiceSpec& spec, double step) {
  TaskValues up = task;
  TaskValues down = task;
  double v = *task.values[agent];
  *up.values[agent] = v + step;
  // Values are nonnegative; fall back to a forward-ish stencil at 0.
  double lo = std::max(v - step, 0.0);
  *down.values[agent] = lo;
  return (task_welfare(up, spec) - task_welfare(down, spec)) / (v + step - lo);
}

}  // namespace detail

std::optional<NonmonotoneWitness> find_nonmonotone_witness(
    const ChoiceSpec& spec, std::size_t n_agents, std::size_t search_budget,
    std::uint64_t seed) {
  spec.validate();
  if (n_agents < 2) fail(Errc::InvalidSpec, "need at least 2 agents");
  if (search_budget < 1) fail(Errc::InvalidSpec, "budget must be >= 1");
  for (std::size_t trial = 0; trial < search_budget; ++trial) {
    Rng rng = Rng::for_trial(seed, trial);
    TaskValues task;
    for (std::size_t i = 0; i < n_agents; ++i) {
      task.values.emplace_back(rng.uniform(0.0, 10.0));
    }
    double beta = std::pow(10.0, rng.uniform(-2.0, 2.0));
    ChoiceSpec trial_spec = spec;
    if (spec.kind == ChoiceKind::Btl) trial_spec.beta = beta;
    for (std::size_t agent = 0; agent < n_agents; ++agent) {
      double fd =
          detail::fd_task_welfare_derivative(task, agent, trial_spec, 1e-5);
      if (fd < -1e-9) {
        return NonmonotoneWitness{task, agent, beta};
      }
    }
  }
  return std::nullopt;
}

ExclusivityProbe mutual_exclusivity_probe(const ChoiceSpec& spec,
                                          std::size_t trials,
                                          std::uint64_t seed) {
  spec.validate();
  if (trials < 1) fail(Errc::InvalidSpec, "trials must be >= 1");
  ExclusivityProbe out;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::for_trial(seed ^ 0xABCDEF, trial);
    std::size_t n = 2 + rng.integer(4);
    TaskValues task;
    double min_v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double v = rng.uniform(0.0, 10.0);
      min_v = std::min(min_v, v);
      task.values.emplace_back(v);
    }
    ChoiceSpec trial_spec = spec;
    if (spec.kind == ChoiceKind::Btl) {
      trial_spec.beta = std::pow(10.0, rng.uniform(-2.0, 2.0));
    }
    // (a) does raising some value lower welfare?
    std::size_t agent = rng.integer(n);
    double fd =
        detail::fd_task_welfare_derivative(task, agent, trial_spec, 1e-5);
    if (fd < -1e-9) ++out.monotone_violations;
    // (b) does a new entry below the current minimum lower welfare?
    double entrant = rng.uniform(0.0, min_v);
    double before = task_welfare(task, trial_spec);
    double after = task_welfare(task.with_appended(entrant), trial_spec);
    if (after < before - 1e-12) ++out.entry_harm_violations;
  }
  return out;
}

}  // namespace aggmarket
