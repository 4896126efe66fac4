#include "hedgepde/mc_oracle.hpp"

#include "hedgepde/errors.hpp"
#include "hedgepde/field_io.hpp"
#include "hedgepde/parallel.hpp"
#include "hedgepde/replication.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <tuple>

namespace hedgepde {

namespace {

constexpr double kLogPriceGuard = 700.0;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream per path, fixed by (seed, path) alone.
std::mt19937_64 path_engine(std::uint64_t seed, int path) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(path))));
}

struct PathStepper {
    const ModelParams& params;
    double dt;
    double sqrt_dt;
    double rho_perp;
    bool zero_drift;

    PathStepper(const ModelParams& p, const SimConfig& sim)
        : params(p),
          dt(p.T / sim.n_steps),
          sqrt_dt(std::sqrt(dt)),
          rho_perp(std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho))),
          zero_drift(sim.zero_stock_drift) {}

    /// Advances (ln σ, ln P) by one step; returns false when ln P left the guard.
    template <class Engine>
    bool advance(double& log_sigma, double& log_price, Engine& engine, std::normal_distribution<double>& normal) const {
        const double z2 = normal(engine);
        const double zp = normal(engine);
        const double sigma = std::exp(log_sigma);
        const double dw2 = sqrt_dt * z2;
        const double dw1 = params.rho * dw2 + rho_perp * sqrt_dt * zp;
        const double drift_p = zero_drift ? 0.0 : eval_xf(params, sigma);
        log_sigma += (-params.delta * (sigma - params.sigma1) - 0.5 * params.k * params.k) * dt + params.k * dw2;
        log_price += (drift_p - 0.5 * sigma * sigma) * dt + sigma * dw1;
        if (std::abs(log_price) > kLogPriceGuard) {
            log_price = std::clamp(log_price, -kLogPriceGuard, kLogPriceGuard);
            return false;
        }
        return true;
    }
};

void check_start(double sigma_init, double p_init) {
    if (!(sigma_init > 0.0)) throw DomainError("initial volatility must be > 0");
    if (!(p_init > 0.0)) throw DomainError("initial price must be > 0");
}

/// Neumaier-compensated sum in index order.
double ordered_sum(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

std::pair<double, double> mean_and_std_error(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = ordered_sum(v) / n;
    std::vector<double> dev(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - mean) * (v[i] - mean);
    const double var = v.size() > 1 ? ordered_sum(dev) / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

double terminal_claim(const Payoff& payoff, double sigma, double price) {
    if (const auto* tab = std::get_if<TabulatedPayoff>(&payoff)) {
        sigma = std::clamp(sigma, tab->sigma.front(), tab->sigma.back());
        price = std::clamp(price, tab->price.front(), tab->price.back());
    }
    return eval_payoff(payoff, sigma, price);
}

/// Retained-state bracket and weight for each rebalancing date.
struct TimeBracket {
    std::size_t lo = 0;
    std::size_t hi = 0;
    double w = 0.0;  ///< weight of hi
};

std::vector<TimeBracket> brackets(const MarchResult& march, const ModelParams& params, int n_steps) {
    std::vector<TimeBracket> out(static_cast<std::size_t>(n_steps));
    const auto& states = march.states;
    const double dt = params.T / n_steps;
    for (int n = 0; n < n_steps; ++n) {
        const double t = params.T - n * dt;
        auto it = std::lower_bound(states.begin(), states.end(), t,
                                   [](const SystemState& s, double q) { return s.t() < q; });
        TimeBracket b;
        if (it == states.end()) {
            b.lo = b.hi = states.size() - 1;
        } else if (it == states.begin()) {
            b.lo = b.hi = 0;
        } else {
            b.hi = static_cast<std::size_t>(it - states.begin());
            b.lo = b.hi - 1;
            const double t0 = states[b.lo].t(), t1 = states[b.hi].t();
            b.w = t1 > t0 ? (t - t0) / (t1 - t0) : 1.0;
        }
        out[static_cast<std::size_t>(n)] = b;
    }
    return out;
}

}  // namespace

void SimConfig::validate() const {
    if (n_paths < 100) throw ValidationError("n_paths must be >= 100");
    if (n_steps < 10) throw ValidationError("mc n_steps must be >= 10");
    if (strategy == HedgeStrategy::Constant && !std::isfinite(constant_theta))
        throw ValidationError("constant theta must be finite");
}

std::string strategy_name(HedgeStrategy s) {
    switch (s) {
        case HedgeStrategy::Tracking: return "tracking";
        case HedgeStrategy::None: return "none";
        case HedgeStrategy::Constant: return "constant";
    }
    return "unknown";
}

PathEnsemble simulate_paths(const ModelParams& params, const SimConfig& sim, double sigma_init, double p_init,
                            int threads) {
    sim.validate();
    check_start(sigma_init, p_init);
    PathEnsemble ens;
    ens.n_paths = sim.n_paths;
    ens.n_steps = sim.n_steps;
    ens.dt = params.T / sim.n_steps;
    const std::size_t stride = static_cast<std::size_t>(sim.n_steps) + 1;
    ens.sigma.resize(stride * sim.n_paths);
    ens.price.resize(stride * sim.n_paths);
    std::vector<long> overflow(static_cast<std::size_t>(sim.n_paths), 0);
    const PathStepper stepper(params, sim);
    parallel_for(sim.n_paths, threads, [&](int p) {
        auto engine = path_engine(sim.seed, p);
        std::normal_distribution<double> normal;
        double ls = std::log(sigma_init), lp = std::log(p_init);
        const std::size_t base = static_cast<std::size_t>(p) * stride;
        ens.sigma[base] = sigma_init;
        ens.price[base] = p_init;
        for (int n = 1; n <= sim.n_steps; ++n) {
            if (!stepper.advance(ls, lp, engine, normal)) ++overflow[static_cast<std::size_t>(p)];
            ens.sigma[base + n] = std::exp(ls);
            ens.price[base + n] = std::exp(lp);
        }
    });
    for (long o : overflow) ens.overflow_count += o;
    return ens;
}

MCEstimate run_hedge(const MarchResult& march, const ModelParams& params, const Payoff& payoff,
                     const SimConfig& sim, double sigma_init, double p_init, double v0, int threads,
                     std::vector<PathRecord>* records) {
    sim.validate();
    check_start(sigma_init, p_init);
    const bool tracking = sim.strategy == HedgeStrategy::Tracking;
    if (tracking && march.states.empty()) throw ValidationError("tracking strategy needs retained states");

    std::vector<Field2D> numerators;
    std::vector<TimeBracket> when;
    Grid2D hull;
    if (tracking) {
        numerators.reserve(march.states.size());
        for (const auto& s : march.states) numerators.push_back(theta_numerator(s.u2, params));
        when = brackets(march, params, sim.n_steps);
        hull = march.states.front().u2.grid;
    }

    const std::size_t n_paths = static_cast<std::size_t>(sim.n_paths);
    std::vector<double> sq_error(n_paths), wealth(n_paths);
    std::vector<long> excursions(n_paths, 0), overflow(n_paths, 0);
    if (records != nullptr) records->assign(n_paths, PathRecord{});
    const PathStepper stepper(params, sim);

    parallel_for(sim.n_paths, threads, [&](int p) {
        auto engine = path_engine(sim.seed, p);
        std::normal_distribution<double> normal;
        double ls = std::log(sigma_init), lp = std::log(p_init);
        double v = v0;
        long clamped = 0;
        for (int n = 0; n < sim.n_steps; ++n) {
            double theta = 0.0;
            const double price = std::exp(lp);
            if (tracking) {
                double x = std::exp(ls), z = lp;
                const double xc = std::clamp(x, 0.0, hull.x_grid.x_max);
                const double zc = std::clamp(z, hull.z_min, hull.z_max);
                if (xc != x || zc != z) ++clamped;
                const TimeBracket& b = when[static_cast<std::size_t>(n)];
                double num = interpolate(numerators[b.lo], xc, zc);
                if (b.hi != b.lo) num += b.w * (interpolate(numerators[b.hi], xc, zc) - num);
                theta = num / price;
            } else if (sim.strategy == HedgeStrategy::Constant) {
                theta = sim.constant_theta;
            }
            if (!stepper.advance(ls, lp, engine, normal)) ++overflow[static_cast<std::size_t>(p)];
            v += theta * (std::exp(lp) - price);
        }
        const double sigma_t = std::exp(ls), price_t = std::exp(lp);
        const double err = v - terminal_claim(payoff, sigma_t, price_t);
        const auto idx = static_cast<std::size_t>(p);
        sq_error[idx] = err * err;
        wealth[idx] = v;
        excursions[idx] = clamped;
        if (records != nullptr) (*records)[idx] = PathRecord{p, price_t, sigma_t, v, err};
    });

    MCEstimate est;
    est.v0 = v0;
    est.n_paths = sim.n_paths;
    std::tie(est.mean_squared_error, est.std_error) = mean_and_std_error(sq_error);
    std::tie(est.mean_terminal_wealth, est.terminal_wealth_std_error) = mean_and_std_error(wealth);
    for (std::size_t i = 0; i < n_paths; ++i) {
        est.hull_excursions += excursions[i];
        est.paths_with_excursion += excursions[i] > 0 ? 1 : 0;
        est.overflow_count += overflow[i];
    }
    return est;
}

bool lower_bound_holds(const MCEstimate& mc, double j0) {
    return mc.mean_squared_error + kStdErrorMultiplier * mc.std_error >= (1.0 - kPdeErrorBudget) * j0;
}

VerificationReport verify(const ModelParams& params, const Payoff& payoff, const Grid2D& grid, int pde_steps,
                          const SimConfig& sim, double sigma_obs, double p_obs, int threads,
                          std::vector<PathRecord>* records) {
    params.validate();
    sim.validate();
    MarchOptions opts;
    opts.retain_stride = 1;
    const MarchResult march = march_system(params, grid, payoff, pde_steps, opts);
    const ReplicationResult rep = replication_summary(march.final_state(), params, sigma_obs, p_obs);

    VerificationReport report;
    report.params = params;
    report.sim = sim;
    report.sigma_obs = sigma_obs;
    report.p_obs = p_obs;
    report.b0 = rep.v0_star;
    report.c0 = rep.c0;
    report.strategy = run_hedge(march, params, payoff, sim, sigma_obs, p_obs, rep.v0_star, threads, records);
    SimConfig baseline = sim;
    baseline.strategy = HedgeStrategy::None;
    report.buy_and_hold = run_hedge(march, params, payoff, baseline, sigma_obs, p_obs, rep.v0_star, threads);
    // J₀ at V₀ = b(0) reduces to c(0).
    report.strategy.j0_pde = rep.c0;
    report.buy_and_hold.j0_pde = rep.c0;
    report.strategy_pass = lower_bound_holds(report.strategy, rep.c0);
    report.buy_and_hold_pass = lower_bound_holds(report.buy_and_hold, rep.c0);
    return report;
}

namespace {

void write_estimate(std::ostream& os, std::string_view prefix, const MCEstimate& e, bool pass) {
    auto kv = [&](std::string_view key, const std::string& value) { os << prefix << key << '=' << value << '\n'; };
    kv("mc_mean_squared_error", format_number(e.mean_squared_error));
    kv("mc_std_error", format_number(e.std_error));
    kv("mc_upper_3se", format_number(e.mean_squared_error + kStdErrorMultiplier * e.std_error));
    kv("mean_terminal_wealth", format_number(e.mean_terminal_wealth));
    kv("terminal_wealth_std_error", format_number(e.terminal_wealth_std_error));
    kv("gap", format_number(e.mean_squared_error - e.j0_pde));
    kv("relative_gap", format_number(e.j0_pde != 0.0 ? (e.mean_squared_error - e.j0_pde) / e.j0_pde : 0.0));
    kv("hull_excursions", std::to_string(e.hull_excursions));
    kv("paths_with_excursion", std::to_string(e.paths_with_excursion));
    kv("overflow_count", std::to_string(e.overflow_count));
    kv("lower_bound", pass ? "pass" : "fail");
}

}  // namespace

void write_verification_report(std::ostream& os, const VerificationReport& r, std::string_view config_hash) {
    os << config_header(config_hash) << '\n';
    os << "sigma_obs=" << format_number(r.sigma_obs) << '\n';
    os << "p_obs=" << format_number(r.p_obs) << '\n';
    os << "n_paths=" << r.sim.n_paths << '\n';
    os << "mc_steps=" << r.sim.n_steps << '\n';
    os << "seed=" << r.sim.seed << '\n';
    os << "strategy=" << strategy_name(r.sim.strategy) << '\n';
    os << "v0=" << format_number(r.b0) << '\n';
    os << "j0_pde=" << format_number(r.c0) << '\n';
    os << "tolerance_factor=" << format_number(1.0 - kPdeErrorBudget) << '\n';
    write_estimate(os, "strategy.", r.strategy, r.strategy_pass);
    write_estimate(os, "buy_and_hold.", r.buy_and_hold, r.buy_and_hold_pass);
    os << "result=" << (r.pass() ? "pass" : "fail") << '\n';
}

void write_path_csv(std::ostream& os, const std::vector<PathRecord>& records, std::string_view config_hash) {
    os << config_header(config_hash) << '\n';
    os << "path,terminal_price,terminal_sigma,terminal_wealth,error\n";
    for (const auto& r : records) {
        os << r.path << ',' << format_number(r.terminal_price) << ',' << format_number(r.terminal_sigma) << ','
           << format_number(r.terminal_wealth) << ',' << format_number(r.error) << '\n';
    }
}

}  // namespace hedgepde
