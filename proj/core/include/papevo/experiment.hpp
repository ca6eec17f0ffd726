#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "papevo/config.hpp"

namespace papevo {

/// One acceptance check: passes when `pass` is set; threshold is reported
/// next to the measured value.
struct Check {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ExperimentResult {
  std::string experiment;
  std::string csv;                                            ///< <experiment>.csv
  std::vector<std::pair<std::string, std::string>> extra;     ///< file name, contents
  std::vector<std::pair<std::string, double>> notes;          ///< reported values, not judged
  std::vector<Check> checks;

  bool passed() const;
  /// "name measured threshold PASS|FAIL" lines, measured as %.5g.
  std::string summary() const;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitHypothesis = 3;

/// Validates every key, then runs the experiment. Throws ConfigError on bad
/// configuration and HypothesisFailure when a theorem's precondition fails.
ExperimentResult run_experiment(const Config& cfg);

/// Loads a config, runs it and writes <outdir>/<experiment>.csv and
/// <outdir>/summary.txt. Returns one of the kExit* codes.
int run(const std::string& config_path, std::ostream& diag,
        const std::optional<std::string>& outdir_override = std::nullopt);

/// Faults the self test can inject to prove it detects them.
enum class SelftestFault { none, kernel_constant };

struct SelftestResult {
  std::vector<Check> checks;
  bool passed() const;
  std::string summary() const;
};

/// Fast invariant suite: norm oracle, semigroup law, linearity, AP defect identities.
SelftestResult selftest(SelftestFault fault = SelftestFault::none);

}  // namespace papevo
