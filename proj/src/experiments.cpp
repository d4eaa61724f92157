#include "aggmarket/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "aggmarket/creation.hpp"
#include "aggmarket/oracle.hpp"
#include "aggmarket/replacement.hpp"
#include "aggmarket/welfare.hpp"

namespace aggmarket {

std::vector<double> default_beta_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) {
    fail(Errc::InvalidSpec, "need 0 < lo < hi and n >= 2");
  }
  std::vector<double> grid(n);
  double llo = std::log10(lo), lhi = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = std::pow(10.0, llo + (lhi - llo) * static_cast<double>(i) /
                                 static_cast<double>(n - 1));
  }
  return grid;
}

namespace {

std::string subset_label(const ValueMatrix& m,
                         const std::vector<std::size_t>& members) {
  std::string s;
  for (std::size_t i : members) {
    if (!s.empty()) s += "+";
    s += m.models[i];
  }
  return s;
}

}  // namespace

ExperimentReport experiment_team_scan(const BenchmarkTable& table,
                                      std::span<const double> beta_grid,
                                      std::size_t max_team) {
  const ValueMatrix& m = table.matrix;
  std::vector<std::vector<std::size_t>> winners;
  NumberColumn betas, welfares, sizes;
  TextColumn labels;
  for (double beta : beta_grid) {
    auto ranked = subset_oracle(m, ChoiceSpec::btl(beta), max_team);
    const auto& best = ranked.front();
    betas.push_back(beta);
    welfares.push_back(best.welfare);
    sizes.push_back(static_cast<double>(best.members.size()));
    labels.push_back(subset_label(m, best.members));
    if (std::find(winners.begin(), winners.end(), best.members) == winners.end()) {
      winners.push_back(best.members);
    }
  }

  ExperimentReport report;
  report.name = "team_scan";
  report.metadata["source"] = table.source;
  report.metadata["filter"] = table.note;
  report.metadata["max_team"] = std::to_string(max_team);
  report.metadata["chart"] = "line";
  report.metadata["x"] = "beta";
  report.metadata["x_scale"] = "log";
  report.metadata["ylabel"] = "consumer welfare";
  report.add_numbers("beta", betas);
  report.add_text("best_team", labels);
  report.add_numbers("best_welfare", welfares);
  report.add_numbers("team_size", sizes);
  // A welfare curve per winning subset, so the frontier can be plotted.
  std::string series_names = "best_welfare";
  for (const auto& members : winners) {
    ValueMatrix sub = m.subset(members);
    NumberColumn curve;
    for (double beta : beta_grid) {
      curve.push_back(total_welfare(sub, ChoiceSpec::btl(beta)));
    }
    std::string label = subset_label(m, members);
    report.add_numbers(label, std::move(curve));
    series_names += "," + label;
  }
  report.metadata["svg_series"] = series_names;
  return report;
}

ExperimentReport experiment_nonmonotone_scan(const BenchmarkTable& table,
                                             std::span<const double> beta_grid) {
  const ValueMatrix& m = table.matrix;
  NumberColumn betas, fractions;
  for (double beta : beta_grid) {
    std::size_t negative = 0, total = 0;
    for (std::size_t t = 0; t < m.task_count(); ++t) {
      TaskValues tv = m.task_values(t);
      for (std::size_t a = 0; a < m.model_count(); ++a) {
        if (!tv.values[a]) continue;
        ++total;
        if (welfare_derivative(tv, a, beta) < -1e-12) ++negative;
      }
    }
    betas.push_back(beta);
    fractions.push_back(total ? static_cast<double>(negative) /
                                    static_cast<double>(total)
                              : 0.0);
  }
  ExperimentReport report;
  report.name = "nonmonotone_scan";
  report.metadata["source"] = table.source;
  report.metadata["filter"] = table.note;
  report.metadata["chart"] = "line";
  report.metadata["x"] = "beta";
  report.metadata["x_scale"] = "log";
  report.metadata["ylabel"] = "fraction of negative welfare derivatives";
  report.add_numbers("beta", betas);
  report.add_numbers("negative_fraction", fractions);
  return report;
}

ExperimentReport experiment_creation_table(
    const BenchmarkTable& table, double budget, double beta,
    const std::optional<std::vector<double>>& caps) {
  const ValueMatrix& m = table.matrix;
  auto winrate_br = best_creation_winrate(m, budget, beta, caps);
  auto weighted_br = best_creation_weighted_winrate(m, budget, beta, caps);
  auto welfare_br = best_creation_welfare(m, budget, beta, caps);

  ChoiceSpec spec = ChoiceSpec::btl(beta);
  NumberColumn existing;
  for (std::size_t t = 0; t < m.task_count(); ++t) {
    existing.push_back(task_welfare(m.task_values(t), spec));
  }
  auto after = [&](const CreationResult& r) {
    NumberColumn out;
    for (std::size_t t = 0; t < m.task_count(); ++t) {
      TaskValues tv = m.task_values(t);
      const Cell& x = r.allocation.per_task[t];
      out.push_back(task_welfare(x ? tv.with_appended(*x) : tv, spec));
    }
    return out;
  };
  auto winrate_of = [&](const CreationResult& r) {
    NumberColumn out;
    auto prof = detail::task_profiles(m, beta);
    for (std::size_t t = 0; t < m.task_count(); ++t) {
      const Cell& x = r.allocation.per_task[t];
      out.push_back(x ? detail::entry_prob(prof[t], *x, beta) : 0.0);
    }
    return out;
  };

  ExperimentReport report;
  report.name = "creation_table";
  report.metadata["source"] = table.source;
  report.metadata["filter"] = table.note;
  report.metadata["budget"] = format_double(budget);
  report.metadata["beta"] = format_double(beta);
  if (caps) {
    std::string c;
    for (double v : *caps) c += (c.empty() ? "" : ",") + format_double(v);
    report.metadata["caps"] = c;
  }
  report.metadata["chart"] = "bar";
  report.metadata["ylabel"] = "task welfare";
  report.metadata["svg_series"] =
      "existing_welfare,winrate_after,weighted_after,welfare_after";
  double before = total_welfare(m, spec);
  report.metadata["welfare_before"] = format_double(before);
  auto describe = [&](const char* key, const CreationResult& r) {
    report.metadata[std::string(key) + "_objective_value"] =
        format_double(r.objective_value);
    report.metadata[std::string(key) + "_regime"] = to_string(r.regime);
    report.metadata[std::string(key) + "_welfare_delta"] = format_double(
        objective_of_allocation(m, r.allocation, Objective::ConsumerWelfare,
                                beta) -
        before);
  };
  describe("winrate", winrate_br);
  describe("weighted", weighted_br);
  describe("welfare", welfare_br);

  report.add_text("task", m.tasks);
  report.add_numbers("existing_welfare", existing);
  report.add_cells("winrate_alloc", winrate_br.allocation.per_task);
  report.add_cells("weighted_alloc", weighted_br.allocation.per_task);
  report.add_cells("welfare_alloc", welfare_br.allocation.per_task);
  report.add_numbers("winrate_after", after(winrate_br));
  report.add_numbers("weighted_after", after(weighted_br));
  report.add_numbers("welfare_after", after(welfare_br));
  report.add_numbers("winrate_pick_prob", winrate_of(winrate_br));
  return report;
}

ExperimentReport experiment_replacement_scatter(const BenchmarkTable& table,
                                                double beta) {
  const ValueMatrix& m = table.matrix;
  if (m.model_count() < 2) fail(Errc::InvalidSpec, "need at least 2 models");

  TextColumn model_a, model_b;
  NumberColumn xcol, ycol, flagged, ww_worse, neg_both;
  for (std::size_t i = 0; i < m.model_count(); ++i) {
    for (std::size_t j = i + 1; j < m.model_count(); ++j) {
      std::vector<DuopolyTask> tasks;
      for (std::size_t t = 0; t < m.task_count(); ++t) {
        const Cell& a = m.cells[i][t];
        const Cell& b = m.cells[j][t];
        if (a && b) tasks.push_back({*a, *b, beta});
      }
      if (tasks.size() < 2) continue;
      IncentiveTable inc = incentive_table(tasks);
      auto pick = [&](std::size_t producer, Objective o) {
        return inc.picks[producer][static_cast<std::size_t>(o)];
      };
      double iw_welfare = instantaneous_welfare(
          tasks, pick(0, Objective::ConsumerWelfare),
          pick(1, Objective::ConsumerWelfare));
      double iw_winrate = instantaneous_welfare(tasks, pick(0, Objective::Winrate),
                                                pick(1, Objective::Winrate));
      std::size_t pa = pick(0, Objective::WeightedWinrate);
      std::size_t pb = pick(1, Objective::WeightedWinrate);
      double iw_weighted = instantaneous_welfare(tasks, pa, pb);

      double x = iw_welfare - iw_winrate;
      double y = iw_welfare - iw_weighted;
      bool flag = y > x + 1e-9;  // weighted winrate did worse than winrate
      BothnegDiagnosis diag;
      if (pa != pb) diag = bothneg_diagnosis(tasks[pa], tasks[pb]);
      model_a.push_back(m.models[i]);
      model_b.push_back(m.models[j]);
      xcol.push_back(x);
      ycol.push_back(y);
      flagged.push_back(flag ? 1.0 : 0.0);
      ww_worse.push_back(diag.ww_worse_than_winrate ? 1.0 : 0.0);
      neg_both.push_back(diag.some_producer_negative_on_both ? 1.0 : 0.0);
    }
  }
  ExperimentReport report;
  report.name = "replacement_scatter";
  report.metadata["source"] = table.source;
  report.metadata["filter"] = table.note;
  report.metadata["beta"] = format_double(beta);
  report.metadata["chart"] = "scatter";
  report.metadata["x"] = "winrate_gap";
  report.metadata["svg_series"] = "weighted_gap";
  report.metadata["ylabel"] = "weighted winrate gap";
  report.add_text("model_a", model_a);
  report.add_text("model_b", model_b);
  report.add_numbers("winrate_gap", xcol);
  report.add_numbers("weighted_gap", ycol);
  report.add_numbers("flagged", flagged);
  report.add_numbers("ww_worse", ww_worse);
  report.add_numbers("negative_on_both", neg_both);
  return report;
}

ExperimentReport experiment_task_orderings(const BenchmarkTable& table,
                                           double beta, Objective objective) {
  const ValueMatrix& m = table.matrix;
  TextColumn models, tasks;
  NumberColumn derivs, ranks;
  for (std::size_t a = 0; a < m.model_count(); ++a) {
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t t = 0; t < m.task_count(); ++t) {
      TaskValues tv = m.task_values(t);
      if (!tv.values[a]) continue;
      double d = 0.0;
      ProbVector p = pick_probs(tv, ChoiceSpec::btl(beta));
      double q = p[a] * (1.0 - p[a]) / beta;
      switch (objective) {
        case Objective::Winrate: d = q; break;
        case Objective::WeightedWinrate: d = p[a] + *tv.values[a] * q; break;
        case Objective::ConsumerWelfare: d = welfare_derivative(tv, a, beta); break;
      }
      scored.emplace_back(d, t);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    for (std::size_t r = 0; r < scored.size(); ++r) {
      models.push_back(m.models[a]);
      tasks.push_back(m.tasks[scored[r].second]);
      derivs.push_back(scored[r].first);
      ranks.push_back(static_cast<double>(r));
    }
  }
  ExperimentReport report;
  report.name = "task_orderings_" + to_string(objective);
  report.metadata["source"] = table.source;
  report.metadata["filter"] = table.note;
  report.metadata["beta"] = format_double(beta);
  report.metadata["objective"] = to_string(objective);
  report.add_text("model", models);
  report.add_text("task", tasks);
  report.add_numbers("derivative", derivs);
  report.add_numbers("rank", ranks);
  return report;
}

ExperimentReport experiment_selection_curves(double v_other, double beta) {
  NumberColumn vs, btl, ratio;
  for (int i = 0; i <= 400; ++i) {
    double v = 10.0 * static_cast<double>(i) / 400.0;
    vs.push_back(v);
    btl.push_back(detail::sigmoid((v - v_other) / beta));
    ratio.push_back(v + v_other > 0.0 ? v / (v + v_other) : 0.5);
  }
  ExperimentReport report;
  report.name = "selection_curves";
  report.metadata["v_other"] = format_double(v_other);
  report.metadata["beta"] = format_double(beta);
  report.metadata["chart"] = "line";
  report.metadata["x"] = "v";
  report.metadata["ylabel"] = "selection probability";
  report.add_numbers("v", vs);
  report.add_numbers("btl", btl);
  report.add_numbers("ratio_contest", ratio);
  return report;
}

}  // namespace aggmarket
