#include "hedgepde/replication.hpp"

#include "hedgepde/errors.hpp"
#include "hedgepde/field_io.hpp"
#include "hedgepde/parallel.hpp"
#include "hedgepde/solver_u1.hpp"

#include <cmath>
#include <ostream>

namespace hedgepde {

Field1D extract_a0(const Field1D& u1_final) {
    Field1D a = u1_final;
    for (double& v : a.values) v = std::exp(v);
    return a;
}

Field2D theta_numerator(const Field2D& u2, const ModelParams& params) {
    const Grid2D& g = u2.grid;
    Field2D out(g, u2.t);
    const double rk = params.rho * params.k;
    auto kind = [](int i, int n) {
        if (i == 0) return Difference::Forward;
        if (i == n - 1) return Difference::Backward;
        return Difference::Central;
    };
    for (int i = 0; i < g.n_x(); ++i) {
        for (int j = 0; j < g.n_z; ++j) {
            double v = d_dz(u2, i, j, kind(j, g.n_z));
            if (rk != 0.0) v += rk * d_dx(u2, i, j, kind(i, g.n_x()));
            out(i, j) = v;
        }
    }
    return out;
}

Field2D compute_theta0(const Field2D& u2_final, const ModelParams& params) {
    Field2D theta = theta_numerator(u2_final, params);
    for (int i = 0; i < theta.grid.n_x(); ++i)
        for (int j = 0; j < theta.grid.n_z; ++j) theta(i, j) /= theta.grid.y(j);
    return theta;
}

double ReplicationResult::value_function(double v0) const {
    const double a = interpolate(a0_profile, sigma_obs);
    return a * (v0 - v0_star) * (v0 - v0_star) + c0;
}

ReplicationResult replication_summary(const SystemState& final_state, const ModelParams& params, double sigma_obs,
                                      double p_obs) {
    if (!(p_obs > 0.0)) throw DomainError("evaluation price must be > 0");
    const double z_obs = std::log(p_obs);
    ReplicationResult r;
    r.u1_final = final_state.u1;
    r.a0_profile = extract_a0(final_state.u1);
    r.theta0 = compute_theta0(final_state.u2, params);
    r.sigma_obs = sigma_obs;
    r.p_obs = p_obs;
    r.v0_star = interpolate(final_state.u2, sigma_obs, z_obs);
    r.c0 = interpolate(final_state.u3, sigma_obs, z_obs);
    r.eps_star = std::sqrt(std::max(r.c0, 0.0));
    r.clamp_magnitude = r.c0 < 0.0 ? -r.c0 : 0.0;
    r.clamp_flagged = r.clamp_magnitude > kClampFlagThreshold;
    return r;
}

bool RhoSweep::all_succeeded() const {
    for (const auto& e : errors)
        if (!e.empty()) return false;
    return true;
}

RhoSweep rho_sweep(const ModelParams& params, const std::vector<double>& rhos, const Grid1D& grid, int n_steps,
                   int threads) {
    RhoSweep sweep{grid, rhos, std::vector<std::optional<Field1D>>(rhos.size()),
                   std::vector<std::optional<Field1D>>(rhos.size()), std::vector<std::string>(rhos.size())};
    parallel_for(static_cast<int>(rhos.size()), threads, [&](int k) {
        ModelParams p = params;
        p.rho = rhos[k];
        try {
            const auto traj = solve_u1(p, grid, n_steps);
            sweep.u1[k] = traj.fields.back();
            sweep.a0[k] = extract_a0(traj.fields.back());
        } catch (const std::exception& e) {
            sweep.errors[k] = e.what();
        }
    });
    return sweep;
}

void write_sweep_csv(std::ostream& os, const RhoSweep& sweep, std::string_view config_hash) {
    os << config_header(config_hash) << '\n';
    os << "sigma";
    for (double rho : sweep.rhos) os << ",a_rho=" << format_number(rho);
    os << '\n';
    for (int i = 0; i < sweep.grid.n_x; ++i) {
        os << format_number(sweep.grid.x(i));
        for (const auto& col : sweep.a0) os << ',' << (col ? format_number((*col)[i]) : std::string("nan"));
        os << '\n';
    }
}

}  // namespace hedgepde
