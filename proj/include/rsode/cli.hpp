#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rsode::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kConfig = 3,
  kNumerical = 4,
  kIO = 5,
};

/// Runs one command. args excludes the program name, e.g.
/// {"solve-harmonic", "--config", "sphere.json", "--out", "run.csv"}.
/// The JSON summary goes to out unless --quiet; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Formats a double with 17 significant digits; non-finite values as "nan",
/// "inf" or "-inf".
std::string format_number(double x);

}  // namespace rsode::cli
