#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aggmarket/types.hpp"

namespace aggmarket {

/// A parsed benchmark: the value matrix plus where it came from and which
/// filters were applied.
struct BenchmarkTable {
  ValueMatrix matrix;
  std::string source;
  std::string note;
};

struct LoadOptions {
  std::vector<std::string> exclude;
  std::optional<std::size_t> top_k;
  std::optional<std::size_t> bottom_k;
  // MT-Bench-style scores live in [0, 10]; set to accept anything >= 0.
  bool allow_out_of_range = false;
};

/// Reads a long-format CSV with header `model,task,score`. Missing
/// (model, task) pairs become abstentions. Models and tasks are ordered by
/// mean score descending, then name. Throws Parse / DuplicateModel /
/// ScoreOutOfRange / Io.
BenchmarkTable load_scores(const std::filesystem::path& path,
                           const LoadOptions& options = {});

/// Same parser over an in-memory buffer (the file loader delegates here).
BenchmarkTable parse_scores(const std::string& text, const std::string& source,
                            const LoadOptions& options = {});

}  // namespace aggmarket
