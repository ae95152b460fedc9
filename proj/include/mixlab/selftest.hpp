#pragma once

/// @file selftest.hpp
/// @brief Built-in oracle suite run by `mixlab selftest`.

#include <iosfwd>
#include <string>
#include <vector>

namespace mixlab {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fourier values, exact shear advection, the Bogovskii manufactured
/// solution, Young-measure properties and the metric oracles. Each check
/// prints one PASS/FAIL line to `log` when given.
std::vector<CheckResult> run_selftest(std::ostream* log = nullptr);

}  // namespace mixlab
