#include "aggmarket/choice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aggmarket {

namespace detail {

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - m);
  return m + std::log(sum);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double log_exp_sum(const TaskValues& task, double beta) {
  std::vector<double> scaled;
  scaled.reserve(task.size());
  for (const auto& v : task.values) {
    if (v) scaled.push_back(*v / beta);
  }
  return log_sum_exp(scaled);
}

}  // namespace detail

void TaskValues::validate() const {
  for (const auto& v : values) {
    if (v && (!std::isfinite(*v) || *v < 0.0)) {
      fail(Errc::InvalidSpec, "response values must be finite and >= 0");
    }
  }
}

void ChoiceSpec::validate() const {
  switch (kind) {
    case ChoiceKind::Btl:
      // beta = 0 and beta = +inf are the Optimal / Random limits.
      if (std::isnan(beta) || beta < 0.0) {
        fail(Errc::InvalidSpec, "Btl requires beta >= 0");
      }
      break;
    case ChoiceKind::PairwiseMonotone:
      if (!(c > 0.0) || !std::isfinite(c)) {
        fail(Errc::InvalidSpec, "PairwiseMonotone requires c > 0");
      }
      break;
    default:
      break;
  }
}

std::string to_string(Objective obj) {
  switch (obj) {
    case Objective::Winrate: return "winrate";
    case Objective::WeightedWinrate: return "weighted_winrate";
    case Objective::ConsumerWelfare: return "consumer_welfare";
  }
  return "?";
}

ValueMatrix ValueMatrix::from_rows(
    const std::vector<std::pair<std::string, std::vector<Cell>>>& rows,
    std::vector<std::string> task_names) {
  ValueMatrix m;
  std::size_t n_tasks = rows.empty() ? task_names.size() : rows[0].second.size();
  if (task_names.empty()) {
    for (std::size_t t = 0; t < n_tasks; ++t) {
      task_names.push_back("t" + std::to_string(t));
    }
  }
  m.tasks = std::move(task_names);
  for (const auto& [id, row] : rows) {
    m.models.push_back(id);
    m.cells.push_back(row);
  }
  m.validate();
  return m;
}

TaskValues ValueMatrix::task_values(std::size_t t) const {
  if (t >= task_count()) fail(Errc::IndexOutOfRange, "task index out of range");
  TaskValues tv;
  tv.values.reserve(model_count());
  for (const auto& row : cells) tv.values.push_back(row[t]);
  return tv;
}

double ValueMatrix::total_value(std::size_t model) const {
  if (model >= model_count()) {
    fail(Errc::IndexOutOfRange, "model index out of range");
  }
  double sum = 0.0;
  for (const auto& v : cells[model]) {
    if (v) sum += *v;
  }
  return sum;
}

double ValueMatrix::mean_value(std::size_t model) const {
  if (model >= model_count()) {
    fail(Errc::IndexOutOfRange, "model index out of range");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : cells[model]) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  return n == 0 ? kNaN : sum / static_cast<double>(n);
}

ValueMatrix ValueMatrix::subset(std::span<const std::size_t> model_indices) const {
  ValueMatrix m;
  m.tasks = tasks;
  for (std::size_t i : model_indices) {
    if (i >= model_count()) fail(Errc::IndexOutOfRange, "model index out of range");
    m.models.push_back(models[i]);
    m.cells.push_back(cells[i]);
  }
  return m;
}

ValueMatrix ValueMatrix::with_row(std::string id, std::vector<Cell> row) const {
  if (row.size() != task_count()) {
    fail(Errc::DimensionMismatch, "appended row has wrong task count");
  }
  ValueMatrix m = *this;
  m.models.push_back(std::move(id));
  m.cells.push_back(std::move(row));
  return m;
}

std::optional<std::size_t> ValueMatrix::model_index(const std::string& id) const {
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i] == id) return i;
  }
  return std::nullopt;
}

void ValueMatrix::validate() const {
  if (models.size() != cells.size()) {
    fail(Errc::DimensionMismatch, "model ids and rows disagree");
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (cells[i].size() != tasks.size()) {
      fail(Errc::DimensionMismatch, "matrix is not rectangular");
    }
    for (std::size_t j = i + 1; j < models.size(); ++j) {
      if (models[i] == models[j]) {
        fail(Errc::DuplicateModel, "duplicate model id: " + models[i]);
      }
    }
    for (const auto& v : cells[i]) {
      if (v && (!std::isfinite(*v) || *v < 0.0)) {
        fail(Errc::InvalidSpec, "cell values must be finite and >= 0");
      }
    }
  }
}

namespace {

ProbVector probs_random(const TaskValues& task) {
  ProbVector p(task.size(), 0.0);
  double n = static_cast<double>(task.responder_count());
  for (std::size_t i = 0; i < task.size(); ++i) {
    if (task.values[i]) p[i] = 1.0 / n;
  }
  return p;
}

ProbVector probs_optimal(const TaskValues& task) {
  ProbVector p(task.size(), 0.0);
  double best = -1.0;
  for (const auto& v : task.values) {
    if (v && *v > best) best = *v;
  }
  // Exact-equality ties split uniformly; callers wanting tolerance-based
  // ties must pre-round.
  std::size_t ties = 0;
  for (const auto& v : task.values) ties += (v && *v == best);
  for (std::size_t i = 0; i < task.size(); ++i) {
    if (task.values[i] && *task.values[i] == best) {
      p[i] = 1.0 / static_cast<double>(ties);
    }
  }
  return p;
}

ProbVector probs_btl(const TaskValues& task, double beta) {
  if (beta == 0.0) return probs_optimal(task);
  if (std::isinf(beta)) return probs_random(task);
  // Max-shifted exponents so large values and small beta do not overflow.
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& v : task.values) {
    if (v) m = std::max(m, *v / beta);
  }
  ProbVector p(task.size(), 0.0);
  double denom = 0.0;
  for (std::size_t i = 0; i < task.size(); ++i) {
    if (task.values[i]) {
      p[i] = std::exp(*task.values[i] / beta - m);
      denom += p[i];
    }
  }
  for (double& x : p) x /= denom;
  return p;
}

ProbVector probs_pairwise_monotone(const TaskValues& task, double c) {
  ProbVector p(task.size(), 0.0);
  std::vector<std::size_t> resp;
  for (std::size_t i = 0; i < task.size(); ++i) {
    if (task.values[i]) resp.push_back(i);
  }
  // The pair sum is empty with a single responder; it is picked outright.
  if (resp.size() == 1) {
    p[resp[0]] = 1.0;
    return p;
  }
  double pairs = static_cast<double>(resp.size() * (resp.size() - 1)) / 2.0;
  for (std::size_t a : resp) {
    double w = 0.0;
    for (std::size_t b : resp) {
      if (a == b) continue;
      double gap = *task.values[a] - *task.values[b];
      w += (std::max(gap, 0.0) + c) / (std::abs(gap) + 2.0 * c);
    }
    p[a] = w / pairs;
  }
  return p;
}

}  // namespace

ProbVector pick_probs(const TaskValues& task, const ChoiceSpec& spec) {
  task.validate();
  spec.validate();
  if (task.all_abstain()) {
    fail(Errc::AllAbstain, "every model abstains on this task");
  }
  switch (spec.kind) {
    case ChoiceKind::Random: return probs_random(task);
    case ChoiceKind::Optimal: return probs_optimal(task);
    case ChoiceKind::Btl: return probs_btl(task, spec.beta);
    case ChoiceKind::PairwiseMonotone:
      return probs_pairwise_monotone(task, spec.c);
  }
  fail(Errc::InvalidSpec, "unknown choice kind");
}

double task_welfare(const TaskValues& task, const ChoiceSpec& spec) {
  ProbVector p = pick_probs(task, spec);
  double w = 0.0;
  for (std::size_t i = 0; i < task.size(); ++i) {
    if (task.values[i]) w += *task.values[i] * p[i];
  }
  return w;
}

double total_welfare(const ValueMatrix& market, const ChoiceSpec& spec) {
  market.validate();
  double sum = 0.0;
  for (std::size_t t = 0; t < market.task_count(); ++t) {
    TaskValues tv = market.task_values(t);
    if (tv.all_abstain()) {
      fail(Errc::AllAbstain, "every model abstains on task " + market.tasks[t]);
    }
    sum += task_welfare(tv, spec);
  }
  return sum;
}

BtlLimits btl_limits_check(const TaskValues& task, double beta_small,
                           double beta_large) {
  if (!(beta_small > 0.0) || !(beta_large > beta_small)) {
    fail(Errc::InvalidSpec, "need 0 < beta_small < beta_large");
  }
  auto linf = [](const ProbVector& a, const ProbVector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
  };
  ProbVector low = pick_probs(task, ChoiceSpec::btl(beta_small));
  ProbVector high = pick_probs(task, ChoiceSpec::btl(beta_large));
  BtlLimits out;
  out.near_optimal = linf(low, pick_probs(task, ChoiceSpec::optimal())) < 1e-3;
  out.near_random = linf(high, pick_probs(task, ChoiceSpec::random())) < 1e-3;
  return out;
}

}  // namespace aggmarket
