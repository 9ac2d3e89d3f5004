#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// Command-line front end. Subcommands: spectra, filter, snr, sweep, simulate, tolerances,
// correlation-map, validate. Exit codes: 0 success, 1 domain error (including a failed validate
// check), 2 convergence failure. Results go to --out or `out`; warnings and errors go to `err`.
namespace sngrav::cli {

inline constexpr const char* kVersion = "0.1.0";

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// One `--vary name=lo:hi:lin|log:n` axis. `theta` sets both homodyne angles.
struct SweepAxis {
    std::string key;
    std::vector<double> values;
};
SweepAxis parse_vary(const std::string& spec);

}  // namespace sngrav::cli
