#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace potluck::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;       // runtime, I/O or parse error
inline constexpr int kExitRejected = 2;    // validation rejection

struct RunOptions {
  std::filesystem::path scenario;
  std::filesystem::path out;
  bool force = false;
};

struct QStarOptions {
  std::filesystem::path scenario;
  double resolution = 1.0 / 200.0;
  int refine = 3;
};

struct CheckPotentialOptions {
  std::filesystem::path scenario;
  std::size_t nodes = 1001;
  double h = 1e-5;
  double threshold = 1e-4;
  std::size_t samples = 50;
};

struct KroneckerOptions {
  std::string preset = "alternating";  // alternating | harmonic | custom
  std::filesystem::path path;          // custom: CSV with columns a,b
  std::size_t length = 100000;
  double eps = 1e-4;
};

struct SweepOptions {
  std::filesystem::path scenario;
  std::string param;  // strategy.p | weights.theta | weights.r | horizon
  std::string grid;   // "lo:hi:count" or a single value
  std::filesystem::path out_dir;
  bool force = false;
};

// Each command writes its machine-readable result to `out`, diagnostics to
// `err`, and returns a process exit code.
int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);
int cmd_qstar(const QStarOptions& opt, std::ostream& out, std::ostream& err);
int cmd_check_potential(const CheckPotentialOptions& opt, std::ostream& out, std::ostream& err);
int cmd_kronecker(const KroneckerOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err);

// "lo:hi:count" -> count evenly spaced values from lo to hi inclusive; a bare
// number is a one-point grid.
std::vector<double> parse_grid(const std::string& spec);

// Worker count for sweeps: POTLUCK_THREADS if set to a positive integer,
// otherwise the hardware concurrency.
std::size_t sweep_threads();

}  // namespace potluck::cli
