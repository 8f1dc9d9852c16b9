#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdmq/expr.hpp"
#include "pdmq/geometry.hpp"

namespace pdmq::cli {

struct RunConfig {
  std::string command;
  std::string model;
  std::string mass, potential, domain;
  std::vector<std::string> sets;
  int N = 2000;
  std::vector<int> N_list;
  int k = 5;
  double dt = 1e-3;
  double T = 50.0;
  double x0 = 0.5;
  double v0 = 0.0;
  std::optional<double> y_cut;
  std::vector<std::string> schemes;
  std::string route = "direct";
  std::string format = "json";
  std::string output;
  std::string eigenfunctions;
  std::string units;
  std::string param;
  std::vector<double> values;
  std::optional<double> from, to, step;
};

/// Builds the problem named by the config (model or inline expressions).
ProblemDef resolve_problem(const RunConfig& cfg, const Bindings& extra = {});

/// Runs the command line (without the program name); returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdmq::cli
