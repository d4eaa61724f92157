#include "aggmarket/scores.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace aggmarket {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

}  // namespace

BenchmarkTable parse_scores(const std::string& text, const std::string& source,
                            const LoadOptions& options) {
  if (options.top_k && options.bottom_k) {
    fail(Errc::InvalidSpec, "top_k and bottom_k are mutually exclusive");
  }
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) fail(Errc::Parse, "empty scores file");
  ++line_no;
  auto header = split_csv_line(line);
  if (header.size() != 3 || header[0] != "model" || header[1] != "task" ||
      header[2] != "score") {
    fail(Errc::Parse, "line 1: expected header model,task,score");
  }

  std::vector<std::string> model_order, task_order;
  std::map<std::pair<std::string, std::string>, double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      fail(Errc::Parse, "line " + std::to_string(line_no) + ": expected model,task,score");
    }
    char* end = nullptr;
    double score = std::strtod(fields[2].c_str(), &end);
    if (end == fields[2].c_str() || *end != '\0' || !std::isfinite(score)) {
      fail(Errc::Parse, "line " + std::to_string(line_no) + ": bad score '" + fields[2] + "'");
    }
    if (score < 0.0 || (!options.allow_out_of_range && score > 10.0)) {
      fail(Errc::ScoreOutOfRange,
           "line " + std::to_string(line_no) + ": score " + fields[2] + " outside [0, 10]");
    }
    auto key = std::make_pair(fields[0], fields[1]);
    if (values.count(key)) {
      fail(Errc::DuplicateModel, "line " + std::to_string(line_no) +
                                     ": duplicate entry for " + fields[0] +
                                     " on " + fields[1]);
    }
    if (std::find(model_order.begin(), model_order.end(), fields[0]) ==
        model_order.end()) {
      model_order.push_back(fields[0]);
    }
    if (std::find(task_order.begin(), task_order.end(), fields[1]) ==
        task_order.end()) {
      task_order.push_back(fields[1]);
    }
    values[key] = score;
  }
  if (model_order.empty()) fail(Errc::Parse, "no score rows");

  for (const auto& name : options.exclude) {
    std::erase(model_order, name);
  }
  if (model_order.empty()) fail(Errc::Parse, "every model was excluded");

  auto model_mean = [&](const std::string& m) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& t : task_order) {
      auto it = values.find({m, t});
      if (it != values.end()) {
        sum += it->second;
        ++n;
      }
    }
    return n ? sum / static_cast<double>(n) : 0.0;
  };
  auto task_mean = [&](const std::string& t) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& m : model_order) {
      auto it = values.find({m, t});
      if (it != values.end()) {
        sum += it->second;
        ++n;
      }
    }
    return n ? sum / static_cast<double>(n) : 0.0;
  };
  std::stable_sort(model_order.begin(), model_order.end(),
                   [&](const std::string& a, const std::string& b) {
                     double ma = model_mean(a), mb = model_mean(b);
                     if (ma != mb) return ma > mb;
                     return a < b;
                   });
  std::stable_sort(task_order.begin(), task_order.end(),
                   [&](const std::string& a, const std::string& b) {
                     double ma = task_mean(a), mb = task_mean(b);
                     if (ma != mb) return ma > mb;
                     return a < b;
                   });

  std::string filter_note;
  if (!options.exclude.empty()) {
    filter_note += "excluded:";
    for (const auto& e : options.exclude) filter_note += " " + e;
    filter_note += ";";
  }
  if (options.top_k) {
    if (*options.top_k < model_order.size()) {
      model_order.resize(*options.top_k);
    }
    filter_note += " top_k=" + std::to_string(*options.top_k) + ";";
  }
  if (options.bottom_k) {
    std::size_t k = std::min(*options.bottom_k, model_order.size());
    model_order.erase(model_order.begin(), model_order.end() - k);
    filter_note += " bottom_k=" + std::to_string(*options.bottom_k) + ";";
  }

  BenchmarkTable table;
  table.source = source;
  table.note = filter_note.empty() ? "unfiltered" : trim(filter_note);
  table.matrix.models = model_order;
  table.matrix.tasks = task_order;
  table.matrix.cells.resize(model_order.size());
  for (std::size_t m = 0; m < model_order.size(); ++m) {
    table.matrix.cells[m].resize(task_order.size(), kAbstain);
    for (std::size_t t = 0; t < task_order.size(); ++t) {
      auto it = values.find({model_order[m], task_order[t]});
      if (it != values.end()) table.matrix.cells[m][t] = it->second;
    }
  }
  table.matrix.validate();
  return table;
}

BenchmarkTable load_scores(const std::filesystem::path& path,
                           const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scores(buf.str(), path.string(), options);
}

}  // namespace aggmarket
