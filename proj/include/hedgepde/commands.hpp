#pragma once

#include "hedgepde/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string_view>

namespace hedgepde {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 1;
inline constexpr int kExitConfigError = 2;

// Each command writes `config.effective` plus its own files into `out_dir`
// (created if missing). Every file starts with the config-hash header.
// Progress and timings go to `log` only, so files are reproducible.
//
//   solve      summary.txt, u1.csv, a0.csv, u2.csv, u3.csv, theta0.csv
//   sweep-rho  sweep_rho.csv
//   mc-verify  verification.txt, paths.csv (write_paths = true)
//   converge   converge.csv, converge_summary.txt

int command_solve(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log, int threads);
int command_sweep_rho(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log, int threads);
int command_mc_verify(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log, int threads);
int command_converge(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log, int threads);

/// Loads the config, dispatches by name and maps failures to exit codes.
int run_command(std::string_view name, const std::filesystem::path& config_path,
                const std::filesystem::path& out_dir, std::ostream& log, std::ostream& err, int threads);

}  // namespace hedgepde
