// aggmarket: analyze marketplaces where a consumer noisily picks one model
// per task. Computes consumer welfare, producer best-response allocations
// under three objectives, monotonicity diagnostics, and two-producer
// replacement incentives, from a long-format model,task,score CSV.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aggmarket/creation.hpp"
#include "aggmarket/experiments.hpp"
#include "aggmarket/oracle.hpp"
#include "aggmarket/replacement.hpp"
#include "aggmarket/report.hpp"
#include "aggmarket/scores.hpp"
#include "aggmarket/welfare.hpp"

namespace {

using namespace aggmarket;

struct GlobalOpts {
  std::string input;
  std::string out;
  std::string format = "csv";
  std::vector<std::string> exclude;
  std::optional<std::size_t> top_k;
  std::optional<std::size_t> bottom_k;
  std::uint64_t seed = 1;
  bool allow_out_of_range = false;
};

BenchmarkTable load_table(const GlobalOpts& g) {
  LoadOptions opts;
  opts.exclude = g.exclude;
  opts.top_k = g.top_k;
  opts.bottom_k = g.bottom_k;
  opts.allow_out_of_range = g.allow_out_of_range;
  return load_scores(g.input, opts);
}

void write_report(const ExperimentReport& report, const GlobalOpts& g) {
  EmitFormat format = format_from_string(g.format);
  if (g.out.empty()) {
    switch (format) {
      case EmitFormat::Csv: std::cout << to_csv(report); break;
      case EmitFormat::Json: std::cout << to_json_text(report); break;
      case EmitFormat::Svg: std::cout << to_svg(report); break;
    }
  } else {
    emit(report, format, g.out);
  }
}

std::vector<double> parse_beta_grid(const std::string& text) {
  // lo:hi:n, log-spaced
  double lo = 0.0, hi = 0.0;
  long n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 2 ||
      !(lo > 0.0) || !(hi > lo)) {
    fail(Errc::InvalidSpec, "expected --beta-grid lo:hi:n with 0 < lo < hi, n >= 2");
  }
  return default_beta_grid(lo, hi, static_cast<std::size_t>(n));
}

std::optional<std::vector<double>> caps_for(const std::optional<double>& cap,
                                            std::size_t n_tasks) {
  if (!cap) return std::nullopt;
  return std::vector<double>(n_tasks, *cap);
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  return out;
}

ValueMatrix restrict_to(const ValueMatrix& m, const std::vector<std::string>& names) {
  std::vector<std::size_t> idx;
  for (const auto& name : names) {
    auto i = m.model_index(name);
    if (!i) fail(Errc::InvalidSpec, "unknown model '" + name + "'");
    idx.push_back(*i);
  }
  return m.subset(idx);
}

ExperimentReport welfare_report(const BenchmarkTable& table, double beta) {
  const ValueMatrix& m = table.matrix;
  ChoiceSpec spec = ChoiceSpec::btl(beta);
  NumberColumn welfare, best, mean;
  for (std::size_t t = 0; t < m.task_count(); ++t) {
    TaskValues tv = m.task_values(t);
    welfare.push_back(task_welfare(tv, spec));
    best.push_back(task_welfare(tv, ChoiceSpec::optimal()));
    mean.push_back(task_welfare(tv, ChoiceSpec::random()));
  }
  ExperimentReport report;
  report.name = "welfare";
  report.metadata["source"] = table.source;
  report.metadata["filter"] = table.note;
  report.metadata["beta"] = format_double(beta);
  report.metadata["total_welfare"] = format_double(total_welfare(m, spec));
  report.metadata["models"] = std::to_string(m.model_count());
  report.metadata["chart"] = "bar";
  report.add_text("task", m.tasks);
  report.add_numbers("welfare", welfare);
  report.add_numbers("optimal_pick", best);
  report.add_numbers("random_pick", mean);
  return report;
}

ExperimentReport single_creation_report(const BenchmarkTable& table,
                                        const CreationResult& r, double beta) {
  const ValueMatrix& m = table.matrix;
  ChoiceSpec spec = ChoiceSpec::btl(beta);
  NumberColumn existing, after;
  for (std::size_t t = 0; t < m.task_count(); ++t) {
    TaskValues tv = m.task_values(t);
    existing.push_back(task_welfare(tv, spec));
    const Cell& x = r.allocation.per_task[t];
    after.push_back(task_welfare(x ? tv.with_appended(*x) : tv, spec));
  }
  ExperimentReport report;
  report.name = "creation_" + to_string(r.objective);
  report.metadata["source"] = table.source;
  report.metadata["beta"] = format_double(beta);
  report.metadata["budget"] = format_double(r.allocation.budget);
  report.metadata["objective"] = to_string(r.objective);
  report.metadata["objective_value"] = format_double(r.objective_value);
  report.metadata["regime"] = to_string(r.regime);
  report.metadata["chart"] = "bar";
  report.metadata["svg_series"] = "existing_welfare,welfare_after";
  report.add_text("task", m.tasks);
  report.add_numbers("existing_welfare", existing);
  report.add_cells("allocation", r.allocation.per_task);
  report.add_numbers("welfare_after", after);
  return report;
}

ExperimentReport replace_report(const BenchmarkTable& table,
                                const std::string& pair_text, double beta) {
  auto names = split_names(pair_text);
  if (names.size() != 2) fail(Errc::InvalidSpec, "--pair needs two names");
  ValueMatrix m = restrict_to(table.matrix, names);
  std::vector<DuopolyTask> tasks;
  std::vector<std::string> task_names;
  for (std::size_t t = 0; t < m.task_count(); ++t) {
    const Cell& a = m.cells[0][t];
    const Cell& b = m.cells[1][t];
    if (a && b) {
      tasks.push_back({*a, *b, beta});
      task_names.push_back(m.tasks[t]);
    }
  }
  if (tasks.size() < 2) {
    fail(Errc::AllAbstain, "the pair answers fewer than two common tasks");
  }
  IncentiveTable inc = incentive_table(tasks);

  NumberColumn va, vb, d_win, d_ww_a, d_ww_b, d_cw_a, d_cw_b;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    va.push_back(tasks[t].v_a);
    vb.push_back(tasks[t].v_b);
    d_win.push_back(inc.derivatives[t][0][0]);
    d_ww_a.push_back(inc.derivatives[t][0][1]);
    d_ww_b.push_back(inc.derivatives[t][1][1]);
    d_cw_a.push_back(inc.derivatives[t][0][2]);
    d_cw_b.push_back(inc.derivatives[t][1][2]);
  }
  ExperimentReport report;
  report.name = "replace_" + names[0] + "_vs_" + names[1];
  report.metadata["source"] = table.source;
  report.metadata["beta"] = format_double(beta);
  report.metadata["model_a"] = names[0];
  report.metadata["model_b"] = names[1];
  auto pick_name = [&](std::size_t producer, Objective o) {
    return task_names[inc.picks[producer][static_cast<std::size_t>(o)]];
  };
  for (Objective o : {Objective::Winrate, Objective::WeightedWinrate,
                      Objective::ConsumerWelfare}) {
    report.metadata["pick_a_" + to_string(o)] = pick_name(0, o);
    report.metadata["pick_b_" + to_string(o)] = pick_name(1, o);
    report.metadata["instant_welfare_" + to_string(o)] = format_double(
        instantaneous_welfare(tasks, inc.picks[0][static_cast<std::size_t>(o)],
                              inc.picks[1][static_cast<std::size_t>(o)]));
  }
  std::size_t pa = inc.picks[0][1], pb = inc.picks[1][1];
  if (pa != pb) {
    auto diag = bothneg_diagnosis(tasks[pa], tasks[pb]);
    report.metadata["ww_worse_than_winrate"] =
        diag.ww_worse_than_winrate ? "true" : "false";
    report.metadata["negative_on_both"] =
        diag.some_producer_negative_on_both ? "true" : "false";
  }
  report.add_text("task", task_names);
  report.add_numbers("value_a", va);
  report.add_numbers("value_b", vb);
  report.add_numbers("winrate_deriv", d_win);
  report.add_numbers("weighted_deriv_a", d_ww_a);
  report.add_numbers("weighted_deriv_b", d_ww_b);
  report.add_numbers("welfare_deriv_a", d_cw_a);
  report.add_numbers("welfare_deriv_b", d_cw_b);
  return report;
}

// Reads a flat JSON object of flag values and turns it into argv tokens that
// are parsed before the explicit ones (so command-line flags win).
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::Io, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json j = nlohmann::json::parse(buf.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(Errc::Parse, "config must be a JSON object of flag values");
  }
  std::vector<std::string> tokens;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.value().is_boolean()) {
      if (it.value().get<bool>()) tokens.push_back("--" + it.key());
      continue;
    }
    tokens.push_back("--" + it.key());
    if (it.value().is_string()) {
      tokens.push_back(it.value().get<std::string>());
    } else {
      tokens.push_back(it.value().dump());
    }
  }
  return tokens;
}

int run(int argc, char** argv) {
  CLI::App app{"market analysis for noisy choice-based model selection"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOpts g;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config mirroring the flags");
  app.add_option("--input", g.input, "long-format CSV: model,task,score");
  app.add_option("--out", g.out, "output path (experiment: directory)");
  app.add_option("--format", g.format, "csv|json|svg");
  app.add_option("--exclude", g.exclude, "model names to drop")->delimiter(',');
  app.add_option("--top-k", g.top_k, "keep only the k best models by mean");
  app.add_option("--bottom-k", g.bottom_k, "keep only the k weakest models");
  app.add_option("--seed", g.seed, "seed recorded in report metadata");
  app.add_flag("--allow-out-of-range", g.allow_out_of_range,
               "accept scores outside [0, 10]");

  double beta = 1.0;
  double budget = 0.0;
  std::optional<double> cap;
  std::string subset_text, pair_text, objective_text = "all";
  std::string kind, beta_grid_text = "0.001:1000:24", experiment_name;
  std::size_t max_team = 10;

  CLI::App* welfare_cmd = app.add_subcommand("welfare", "consumer welfare per task");
  welfare_cmd->add_option("--beta", beta, "Btl temperature");
  welfare_cmd->add_option("--subset", subset_text, "restrict to these models");

  CLI::App* create_cmd =
      app.add_subcommand("create", "entrant best-response allocations");
  create_cmd->add_option("--beta", beta, "Btl temperature");
  create_cmd->add_option("--budget", budget, "total value to allocate")->required();
  create_cmd->add_option("--cap", cap, "uniform per-task maximum");
  create_cmd->add_option("--objective", objective_text,
                         "winrate|weighted|welfare|all");

  CLI::App* replace_cmd =
      app.add_subcommand("replace", "two-producer replacement incentives");
  replace_cmd->add_option("--beta", beta, "Btl temperature");
  replace_cmd->add_option("--pair", pair_text, "two model names")->required();

  CLI::App* scan_cmd = app.add_subcommand("scan", "sweeps over a beta grid");
  scan_cmd->add_option("--kind", kind, "teams|nonmonotone")->required();
  scan_cmd->add_option("--beta-grid", beta_grid_text, "lo:hi:n (log-spaced)");
  scan_cmd->add_option("--max-team", max_team, "team size cap for --kind teams");

  CLI::App* exp_cmd =
      app.add_subcommand("experiment", "write a named experiment to --out");
  exp_cmd->add_option("--name", experiment_name, "fig4|fig5|table2|fig7|fig8")
      ->required();
  exp_cmd->add_option("--beta", beta, "Btl temperature");
  exp_cmd->add_option("--budget", budget, "entrant budget (table2)");
  exp_cmd->add_option("--cap", cap, "uniform per-task maximum (table2)");
  exp_cmd->add_option("--beta-grid", beta_grid_text, "lo:hi:n (fig4, fig5)");
  exp_cmd->add_option("--max-team", max_team, "team size cap (fig4)");

  // two-phase parse: pull --config first, then re-parse with its tokens
  // injected ahead of the explicit arguments
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") config_path = args[i + 1];
  }
  if (!config_path.empty()) {
    auto extra = config_tokens(config_path);
    std::size_t at = 0;
    while (at < args.size() && !app.get_subcommand_no_throw(args[at])) ++at;
    if (at == args.size()) {
      fail(Errc::InvalidSpec, "config requires a subcommand on the command line");
    }
    args.insert(args.begin() + static_cast<long>(at) + 1, extra.begin(),
                extra.end());
  }
  std::vector<char*> cargs;
  std::string prog = "aggmarket";
  cargs.push_back(prog.data());
  for (auto& a : args) cargs.push_back(a.data());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  auto require_input = [&]() {
    if (g.input.empty()) fail(Errc::InvalidSpec, "--input is required");
    return load_table(g);
  };

  if (*welfare_cmd) {
    BenchmarkTable table = require_input();
    if (!subset_text.empty()) {
      table.matrix = restrict_to(table.matrix, split_names(subset_text));
      table.note += " subset=" + subset_text + ";";
    }
    auto report = welfare_report(table, beta);
    report.metadata["seed"] = std::to_string(g.seed);
    write_report(report, g);
    return 0;
  }

  if (*create_cmd) {
    BenchmarkTable table = require_input();
    auto caps = caps_for(cap, table.matrix.task_count());
    ExperimentReport report;
    if (objective_text == "all") {
      report = experiment_creation_table(table, budget, beta, caps);
    } else if (objective_text == "winrate") {
      report = single_creation_report(
          table, best_creation_winrate(table.matrix, budget, beta, caps), beta);
    } else if (objective_text == "weighted") {
      report = single_creation_report(
          table, best_creation_weighted_winrate(table.matrix, budget, beta, caps),
          beta);
    } else if (objective_text == "welfare") {
      report = single_creation_report(
          table, best_creation_welfare(table.matrix, budget, beta, caps), beta);
    } else {
      fail(Errc::InvalidSpec, "--objective must be winrate|weighted|welfare|all");
    }
    report.metadata["seed"] = std::to_string(g.seed);
    write_report(report, g);
    return 0;
  }

  if (*replace_cmd) {
    BenchmarkTable table = require_input();
    auto report = replace_report(table, pair_text, beta);
    report.metadata["seed"] = std::to_string(g.seed);
    write_report(report, g);
    return 0;
  }

  if (*scan_cmd) {
    BenchmarkTable table = require_input();
    auto grid = parse_beta_grid(beta_grid_text);
    ExperimentReport report;
    if (kind == "teams") {
      report = experiment_team_scan(table, grid, max_team);
    } else if (kind == "nonmonotone") {
      report = experiment_nonmonotone_scan(table, grid);
    } else {
      fail(Errc::InvalidSpec, "--kind must be teams or nonmonotone");
    }
    report.metadata["seed"] = std::to_string(g.seed);
    write_report(report, g);
    return 0;
  }

  if (*exp_cmd) {
    if (g.out.empty()) fail(Errc::InvalidSpec, "--out directory is required");
    std::filesystem::create_directories(g.out);
    auto write_all = [&](const ExperimentReport& report, const std::string& stem) {
      std::filesystem::path dir(g.out);
      emit(report, EmitFormat::Csv, dir / (stem + ".csv"));
      emit(report, EmitFormat::Json, dir / (stem + ".json"));
      emit(report, EmitFormat::Svg, dir / (stem + ".svg"));
    };
    if (experiment_name == "fig8") {
      auto curves = experiment_selection_curves(5.0, beta);
      curves.metadata["seed"] = std::to_string(g.seed);
      write_all(curves, "fig8");
      return 0;
    }
    BenchmarkTable table = require_input();
    if (experiment_name == "fig4") {
      auto grid = parse_beta_grid(beta_grid_text);
      auto report = experiment_team_scan(table, grid, max_team);
      report.metadata["seed"] = std::to_string(g.seed);
      write_all(report, "fig4");
    } else if (experiment_name == "fig5") {
      auto grid = parse_beta_grid(beta_grid_text);
      auto report = experiment_nonmonotone_scan(table, grid);
      report.metadata["seed"] = std::to_string(g.seed);
      write_all(report, "fig5");
    } else if (experiment_name == "table2") {
      if (budget <= 0.0) budget = 120.0;
      if (!cap) cap = 10.0;
      auto caps = caps_for(cap, table.matrix.task_count());
      auto report = experiment_creation_table(table, budget, beta, caps);
      report.metadata["seed"] = std::to_string(g.seed);
      write_all(report, "table2");
      ExperimentReport fig6 = report;  // per-task before/after welfare view
      fig6.name = "creation_welfare_change";
      emit(fig6, EmitFormat::Svg, std::filesystem::path(g.out) / "fig6.svg");
    } else if (experiment_name == "fig7") {
      auto report = experiment_replacement_scatter(table, beta);
      report.metadata["seed"] = std::to_string(g.seed);
      write_all(report, "fig7");
      for (Objective o : {Objective::Winrate, Objective::WeightedWinrate,
                          Objective::ConsumerWelfare}) {
        auto ordering = experiment_task_orderings(table, beta, o);
        std::filesystem::path dir(g.out);
        emit(ordering, EmitFormat::Csv, dir / (ordering.name + ".csv"));
        emit(ordering, EmitFormat::Json, dir / (ordering.name + ".json"));
      }
    } else {
      fail(Errc::InvalidSpec, "--name must be fig4|fig5|table2|fig7|fig8");
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const aggmarket::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
