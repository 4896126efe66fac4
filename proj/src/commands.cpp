#include "hedgepde/commands.hpp"

#include "hedgepde/convergence.hpp"
#include "hedgepde/errors.hpp"
#include "hedgepde/field_io.hpp"
#include "hedgepde/mc_oracle.hpp"
#include "hedgepde/replication.hpp"
#include "hedgepde/solver_2d.hpp"

#include <chrono>
#include <fstream>
#include <ostream>

namespace hedgepde {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& dir, const char* name) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
    return os;
}

void prepare(const RunConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    auto os = open_output(out_dir, "config.effective");
    os << config_header(cfg.hash()) << '\n' << cfg.effective_text();
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

int command_solve(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log, int) {
    prepare(cfg, out_dir);
    const std::string hash = cfg.hash();
    const Stopwatch clock;
    const MarchResult march = march_system(cfg.params, cfg.grid2d(), cfg.payoff, cfg.n_steps, cfg.march_options());
    const double march_seconds = clock.seconds();
    const ReplicationResult rep = replication_summary(march.final_state(), cfg.params, cfg.sigma_obs, cfg.p_obs);
    const SystemState& final_state = march.final_state();

    int max_picard = 0;
    for (int p : march.picard_iterations) max_picard = std::max(max_picard, p);
    {
        auto os = open_output(out_dir, "summary.txt");
        os << config_header(hash) << '\n';
        os << "sigma_obs=" << format_number(rep.sigma_obs) << '\n';
        os << "p_obs=" << format_number(rep.p_obs) << '\n';
        os << "v0_star=" << format_number(rep.v0_star) << '\n';
        os << "c0=" << format_number(rep.c0) << '\n';
        os << "eps_star=" << format_number(rep.eps_star) << '\n';
        os << "a0_obs=" << format_number(interpolate(rep.a0_profile, rep.sigma_obs)) << '\n';
        os << "clamp_magnitude=" << format_number(rep.clamp_magnitude) << '\n';
        os << "clamp_flag=" << (rep.clamp_flagged ? "true" : "false") << '\n';
        os << "min_u3=" << format_number(march.min_u3) << '\n';
        os << "max_picard_iterations=" << max_picard << '\n';
        os << "n_steps=" << cfg.n_steps << '\n';
    }
    const std::pair<const char*, const Field1D*> fields1[] = {{"u1.csv", &final_state.u1}, {"a0.csv", &rep.a0_profile}};
    for (const auto& [name, f] : fields1) {
        auto os = open_output(out_dir, name);
        write_field_csv(os, *f, hash);
    }
    const std::pair<const char*, const Field2D*> fields2[] = {
        {"u2.csv", &final_state.u2}, {"u3.csv", &final_state.u3}, {"theta0.csv", &rep.theta0}};
    for (const auto& [name, f] : fields2) {
        auto os = open_output(out_dir, name);
        write_field_csv(os, *f, hash);
    }
    log << "v0_star=" << format_number(rep.v0_star) << " eps_star=" << format_number(rep.eps_star)
        << " clamp_flag=" << (rep.clamp_flagged ? "true" : "false") << '\n';
    log << "timing march_seconds=" << march_seconds << " total_seconds=" << clock.seconds() << '\n';
    return kExitOk;
}

int command_sweep_rho(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log, int threads) {
    prepare(cfg, out_dir);
    const Stopwatch clock;
    const RhoSweep sweep = rho_sweep(cfg.params, cfg.sweep_rhos, cfg.grid1d(), cfg.n_steps, threads);
    {
        auto os = open_output(out_dir, "sweep_rho.csv");
        write_sweep_csv(os, sweep, cfg.hash());
    }
    for (std::size_t i = 0; i < sweep.rhos.size(); ++i) {
        if (!sweep.errors[i].empty()) log << "rho=" << format_number(sweep.rhos[i]) << " failed: " << sweep.errors[i] << '\n';
    }
    log << "timing sweep_seconds=" << clock.seconds() << '\n';
    return sweep.all_succeeded() ? kExitOk : kExitSolverFailure;
}

int command_mc_verify(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log, int threads) {
    prepare(cfg, out_dir);
    const std::string hash = cfg.hash();
    const Stopwatch clock;
    std::vector<PathRecord> records;
    const VerificationReport report = verify(cfg.params, cfg.payoff, cfg.grid2d(), cfg.n_steps, cfg.sim,
                                             cfg.sigma_obs, cfg.p_obs, threads,
                                             cfg.write_paths ? &records : nullptr);
    {
        auto os = open_output(out_dir, "verification.txt");
        write_verification_report(os, report, hash);
    }
    if (cfg.write_paths) {
        auto os = open_output(out_dir, "paths.csv");
        write_path_csv(os, records, hash);
    }
    log << "j0_pde=" << format_number(report.c0) << " mc=" << format_number(report.strategy.mean_squared_error)
        << " se=" << format_number(report.strategy.std_error) << " result=" << (report.pass() ? "pass" : "fail")
        << '\n';
    log << "timing verify_seconds=" << clock.seconds() << '\n';
    return kExitOk;
}

int command_converge(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log, int) {
    prepare(cfg, out_dir);
    const std::string hash = cfg.hash();
    const Stopwatch clock;
    LinearSolverOptions linear;
    linear.kind = cfg.linear_solver;
    const ConvergenceReport report = run_convergence_study(cfg.params, cfg.x_max, cfg.convergence, linear);
    {
        auto os = open_output(out_dir, "converge.csv");
        os << config_header(hash) << '\n';
        os << "study,n_x,n_z,n_steps,h_x,dt,error_vs_exact,self_difference\n";
        auto rows = [&](const char* study, const std::vector<ConvergenceRun>& runs) {
            for (const auto& r : runs) {
                os << study << ',' << r.n_x << ',' << r.n_z << ',' << r.n_steps << ',' << format_number(r.h_x) << ','
                   << format_number(r.dt) << ',' << format_number(r.error_vs_exact) << ','
                   << format_number(r.self_difference) << '\n';
            }
        };
        rows("time", report.time_runs);
        rows("space", report.space_runs);
    }
    const bool time_ok = report.time_order >= 0.8 && report.time_order <= 1.2;
    const bool space_ok = report.space_order >= 1.7 && report.space_order <= 2.3;
    {
        auto os = open_output(out_dir, "converge_summary.txt");
        os << config_header(hash) << '\n';
        os << "time_order=" << format_number(report.time_order) << '\n';
        os << "space_order=" << format_number(report.space_order) << '\n';
        os << "time_order_in_band=" << (time_ok ? "true" : "false") << '\n';
        os << "space_order_in_band=" << (space_ok ? "true" : "false") << '\n';
    }
    log << "time_order=" << format_number(report.time_order) << " space_order=" << format_number(report.space_order)
        << '\n';
    log << "timing converge_seconds=" << clock.seconds() << '\n';
    return kExitOk;
}

int run_command(std::string_view name, const fs::path& config_path, const fs::path& out_dir, std::ostream& log,
                std::ostream& err, int threads) {
    using Command = int (*)(const RunConfig&, const fs::path&, std::ostream&, int);
    Command command = nullptr;
    if (name == "solve") command = command_solve;
    else if (name == "sweep-rho") command = command_sweep_rho;
    else if (name == "mc-verify") command = command_mc_verify;
    else if (name == "converge") command = command_converge;
    else {
        err << "unknown command '" << name << "'\n";
        return kExitConfigError;
    }
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        err << "config error: " << config_path.string() << ": " << e.what() << '\n';
        return kExitConfigError;
    }
    try {
        return command(cfg, out_dir, log, threads);
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
        return kExitSolverFailure;
    } catch (const ValidationError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitSolverFailure;
    }
}

}  // namespace hedgepde
