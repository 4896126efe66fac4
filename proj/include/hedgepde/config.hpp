#pragma once

#include "hedgepde/convergence.hpp"
#include "hedgepde/grid.hpp"
#include "hedgepde/mc_oracle.hpp"
#include "hedgepde/model.hpp"
#include "hedgepde/payoff.hpp"
#include "hedgepde/replication.hpp"
#include "hedgepde/solver_2d.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hedgepde {

/// Configuration problem tied to a line of the config text (0 when the
/// violated invariant involves only defaults).
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

struct RunConfig {
    ModelParams params;
    Payoff payoff = CallPayoff{1.0};
    std::string payoff_table;  ///< path of the tabulated payoff, as written in the config

    double x_max = 1.0;
    int n_x = 101;
    double z_half_width = 4.0;  ///< grid spans ln(reference spot) ± this
    int n_z = 101;
    int n_steps = 200;
    int retain_stride = 1;
    LinearSolverKind linear_solver = LinearSolverKind::BiCGSTAB;

    double sigma_obs = 0.0;  ///< defaults to sigma1
    double p_obs = 0.0;      ///< defaults to the reference spot

    std::vector<double> sweep_rhos = kDefaultSweepRhos;

    SimConfig sim;
    bool write_paths = false;

    ConvergenceSetup convergence;

    Grid1D grid1d() const { return Grid1D{x_max, n_x}; }
    Grid2D grid2d() const;
    MarchOptions march_options() const;

    /// Canonical `key = value` listing of every setting, one per line.
    std::string effective_text() const;

    /// FNV-1a 64 of effective_text(), 16 hex digits.
    std::string hash() const;
};

/// Parses `key = value` lines with `#` comments. Unknown keys, malformed
/// values and violated invariants raise ConfigError with the line number.
/// Relative table paths resolve against `base_dir`.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path);

std::string fnv1a_hex(std::string_view text);

}  // namespace hedgepde
