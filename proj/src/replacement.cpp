#include "aggmarket/replacement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aggmarket/choice.hpp"

namespace aggmarket {

void DuopolyTask::validate() const {
  if (!std::isfinite(v_a) || !std::isfinite(v_b) || v_a < 0.0 || v_b < 0.0) {
    fail(Errc::InvalidSpec, "task values must be finite and >= 0");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    fail(Errc::InvalidSpec, "beta must be positive and finite");
  }
}

namespace {

double pick_prob(const DuopolyTask& t, Producer producer) {
  double gap = producer == Producer::A ? t.v_a - t.v_b : t.v_b - t.v_a;
  return detail::sigmoid(gap / t.beta);
}

// p (1 - p) as the product of the two tail-accurate sigmoids; identical for
// both producers by construction and free of cancellation when p saturates.
double shared_q(const DuopolyTask& t) {
  double z = (t.v_a - t.v_b) / t.beta;
  return detail::sigmoid(z) * detail::sigmoid(-z);
}

double own_value(const DuopolyTask& t, Producer producer) {
  return producer == Producer::A ? t.v_a : t.v_b;
}

double other_value(const DuopolyTask& t, Producer producer) {
  return producer == Producer::A ? t.v_b : t.v_a;
}

void require_same_beta(const DuopolyTask& a, const DuopolyTask& b) {
  if (a.beta != b.beta) {
    fail(Errc::InvalidSpec, "task pair must share one temperature");
  }
}

}  // namespace

double objective_derivative(const DuopolyTask& task, Producer producer,
                            Objective objective) {
  task.validate();
  double p = pick_prob(task, producer);
  double q = shared_q(task) / task.beta;
  switch (objective) {
    case Objective::Winrate:
      return q;
    case Objective::WeightedWinrate:
      return p + own_value(task, producer) * q;
    case Objective::ConsumerWelfare:
      return p + (own_value(task, producer) - other_value(task, producer)) * q;
  }
  fail(Errc::InvalidSpec, "unknown objective");
}

TaskOrderings task_orderings(std::span<const DuopolyTask> tasks,
                             Objective objective) {
  if (tasks.size() < 2) fail(Errc::InvalidSpec, "need at least 2 tasks");
  auto order_for = [&](Producer producer) {
    std::vector<double> d(tasks.size());
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      d[t] = objective_derivative(tasks[t], producer, objective);
    }
    std::vector<std::size_t> idx(tasks.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
    return idx;
  };
  return {order_for(Producer::A), order_for(Producer::B)};
}

double instantaneous_welfare(std::span<const DuopolyTask> tasks,
                             std::size_t pick_a, std::size_t pick_b) {
  if (pick_a >= tasks.size() || pick_b >= tasks.size()) {
    fail(Errc::IndexOutOfRange, "picked task out of range");
  }
  return objective_derivative(tasks[pick_a], Producer::A,
                              Objective::ConsumerWelfare) +
         objective_derivative(tasks[pick_b], Producer::B,
                              Objective::ConsumerWelfare);
}

SpecializationCondition specialization_condition(const DuopolyTask& task_i,
                                                 const DuopolyTask& task_j) {
  task_i.validate();
  task_j.validate();
  require_same_beta(task_i, task_j);
  double beta = task_i.beta;
  double p1 = pick_prob(task_i, Producer::A);
  double p2 = pick_prob(task_j, Producer::A);
  double q1 = shared_q(task_i);
  double q2 = shared_q(task_j);
  SpecializationCondition out;
  out.a12 = (task_j.v_a * q2 - task_i.v_a * q1) / beta;
  out.b12 = (task_i.v_b * q1 - task_j.v_b * q2) / beta;
  // A prefers the first task iff the winrate gap clears a12; B iff it stays
  // below b12. They split exactly when the two disagree.
  double gap = p1 - p2;
  out.split = (gap >= out.a12) != (gap <= out.b12);
  return out;
}

BothnegDiagnosis bothneg_diagnosis(const DuopolyTask& task_i,
                                   const DuopolyTask& task_j) {
  task_i.validate();
  task_j.validate();
  require_same_beta(task_i, task_j);
  const DuopolyTask tasks[2] = {task_i, task_j};

  auto weighted_pick = [&](Producer producer) -> std::size_t {
    double d0 = objective_derivative(tasks[0], producer, Objective::WeightedWinrate);
    double d1 = objective_derivative(tasks[1], producer, Objective::WeightedWinrate);
    return d1 > d0 ? 1 : 0;
  };
  std::size_t pa = weighted_pick(Producer::A);
  std::size_t pb = weighted_pick(Producer::B);

  // Both producers share the winrate derivative, so winrate picks coincide
  // and their instantaneous welfare is the constant 1.
  double dw0 = objective_derivative(tasks[0], Producer::A, Objective::Winrate);
  double dw1 = objective_derivative(tasks[1], Producer::A, Objective::Winrate);
  std::size_t pw = dw1 > dw0 ? 1 : 0;

  BothnegDiagnosis out;
  double iw_ww = instantaneous_welfare(tasks, pa, pb);
  double iw_wr = instantaneous_welfare(tasks, pw, pw);
  out.ww_worse_than_winrate = iw_ww < iw_wr - 1e-12;
  for (Producer producer : {Producer::A, Producer::B}) {
    bool neg_both =
        objective_derivative(tasks[0], producer, Objective::ConsumerWelfare) < 0.0 &&
        objective_derivative(tasks[1], producer, Objective::ConsumerWelfare) < 0.0;
    out.some_producer_negative_on_both =
        out.some_producer_negative_on_both || neg_both;
  }
  return out;
}

IncentiveTable incentive_table(std::span<const DuopolyTask> tasks) {
  if (tasks.empty()) fail(Errc::InvalidSpec, "need at least 1 task");
  IncentiveTable table;
  table.derivatives.resize(tasks.size());
  constexpr Objective kObjectives[3] = {
      Objective::Winrate, Objective::WeightedWinrate, Objective::ConsumerWelfare};
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::size_t o = 0; o < 3; ++o) {
        table.derivatives[t][p][o] = objective_derivative(
            tasks[t], p == 0 ? Producer::A : Producer::B, kObjectives[o]);
      }
    }
  }
  for (std::size_t p = 0; p < 2; ++p) {
    for (std::size_t o = 0; o < 3; ++o) {
      std::size_t best = 0;
      for (std::size_t t = 1; t < tasks.size(); ++t) {
        if (table.derivatives[t][p][o] > table.derivatives[best][p][o]) best = t;
      }
      table.picks[p][o] = best;
    }
  }
  return table;
}

}  // namespace aggmarket
