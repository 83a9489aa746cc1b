#pragma once

#include "kernels/kernels.hpp"

#include <string>
#include <vector>

namespace wml::checks {

struct Settings {
  TestFunctionParams params;  // used by the test-function suite
  TransformConfig tc;
  int jobs = 1;
};

struct Result {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Invariant suites on small fixed configurations; `module` is a suite name or "all".
std::vector<Result> run(const std::string& module, const Settings& s);

const std::vector<std::string>& modules();

}  // namespace wml::checks
