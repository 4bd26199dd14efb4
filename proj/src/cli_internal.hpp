#pragma once

#include <string>
#include <vector>

#include "catsim/cli.hpp"

namespace catsim::cli::detail {

/// One grid point: the base parameters with the swept value applied.
struct Point {
  SystemParams params;
  int n_pulses;
  /// Value printed in the key column.
  double key;
};

std::string key_column(const RunConfig& config);
std::vector<Point> grid(const RunConfig& config);

}  // namespace catsim::cli::detail
