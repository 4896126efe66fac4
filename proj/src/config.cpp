#include "hedgepde/config.hpp"

#include "hedgepde/errors.hpp"
#include "hedgepde/field_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hedgepde {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double to_double(std::string_view v) {
    const double d = parse_number(v);
    if (!std::isfinite(d)) throw DomainError("value must be finite");
    return d;
}

template <class Int>
Int to_integer(std::string_view v) {
    v = trim(v);
    Int out{};
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw DomainError("not an integer: '" + std::string(v) + "'");
    return out;
}

bool to_bool(std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw DomainError("not a boolean: '" + std::string(v) + "'");
}

std::vector<double> to_list(std::string_view v) {
    std::vector<double> out;
    while (true) {
        const auto comma = v.find(',');
        out.push_back(to_double(v.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

/// Table layout: header "sigma,<p_1>,...,<p_m>", then "<σ_i>,<F_i1>,...,<F_im>".
TabulatedPayoff read_table(const std::filesystem::path& path, std::string& raw) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open payoff table '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    raw = buf.str();
    std::istringstream lines(raw);
    std::string line;
    TabulatedPayoff table;
    bool header = true;
    while (std::getline(lines, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::vector<std::string_view> cells;
        std::string_view rest = t;
        while (true) {
            const auto comma = rest.find(',');
            cells.push_back(trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (header) {
            for (std::size_t c = 1; c < cells.size(); ++c) table.price.push_back(to_double(cells[c]));
            header = false;
            continue;
        }
        if (cells.size() != table.price.size() + 1) throw ValidationError("payoff table row has wrong column count");
        table.sigma.push_back(to_double(cells[0]));
        for (std::size_t c = 1; c < cells.size(); ++c) table.values.push_back(to_double(cells[c]));
    }
    validate_payoff(table);
    return table;
}

struct Setting {
    std::function<void(RunConfig&, std::string_view)> apply;
};

using Settings = std::map<std::string, Setting, std::less<>>;

template <class Fn>
Setting number(Fn fn) {
    return {[fn](RunConfig& c, std::string_view v) { fn(c, to_double(v)); }};
}

template <class Fn>
Setting integer(Fn fn) {
    return {[fn](RunConfig& c, std::string_view v) { fn(c, to_integer<long long>(v)); }};
}

Setting model(double ModelParams::*field) {
    return number([field](RunConfig& c, double v) {
        c.params.*field = v;
        c.params.validate();
    });
}

int checked_int(long long v, long long min, const char* what) {
    if (v < min || v > 100000000) throw ValidationError(std::string(what) + " must be >= " + std::to_string(min));
    return static_cast<int>(v);
}

struct PayoffChoice {
    std::string kind = "call";
    double strike = 1.0;
    double value = 0.0;
};

}  // namespace

Grid2D RunConfig::grid2d() const {
    return Grid2D::centered(grid1d(), reference_spot(payoff), z_half_width, n_z);
}

MarchOptions RunConfig::march_options() const {
    MarchOptions o;
    o.retain_stride = retain_stride;
    o.linear.kind = linear_solver;
    return o;
}

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string RunConfig::effective_text() const {
    std::ostringstream os;
    auto kv = [&](const char* key, const std::string& value) { os << key << " = " << value << '\n'; };
    auto num = [](double v) { return format_number(v); };
    kv("k", num(params.k));
    kv("rho", num(params.rho));
    kv("delta", num(params.delta));
    kv("sigma1", num(params.sigma1));
    kv("mu", num(params.mu));
    kv("sigma0", num(params.sigma0));
    kv("T", num(params.T));
    const std::string kind = payoff_kind(payoff);
    kv("payoff", kind);
    if (kind == "call" || kind == "put") kv("strike", num(reference_spot(payoff)));
    if (const auto* c = std::get_if<ConstantPayoff>(&payoff)) kv("payoff_value", num(c->value));
    if (const auto* t = std::get_if<TabulatedPayoff>(&payoff)) {
        std::ostringstream table;
        for (double v : t->sigma) table << format_number(v) << ',';
        table << ';';
        for (double v : t->price) table << format_number(v) << ',';
        table << ';';
        for (double v : t->values) table << format_number(v) << ',';
        kv("payoff_table_digest", fnv1a_hex(table.str()));
    }
    kv("x_max", num(x_max));
    kv("n_x", std::to_string(n_x));
    kv("z_half_width", num(z_half_width));
    kv("n_z", std::to_string(n_z));
    kv("n_steps", std::to_string(n_steps));
    kv("retain_stride", std::to_string(retain_stride));
    kv("linear_solver", linear_solver == LinearSolverKind::SparseLU ? "sparselu" : "bicgstab");
    kv("sigma_obs", num(sigma_obs));
    kv("p_obs", num(p_obs));
    std::string rhos;
    for (std::size_t i = 0; i < sweep_rhos.size(); ++i) rhos += (i ? "," : "") + num(sweep_rhos[i]);
    kv("sweep_rhos", rhos);
    kv("n_paths", std::to_string(sim.n_paths));
    kv("mc_steps", std::to_string(sim.n_steps));
    kv("seed", std::to_string(sim.seed));
    kv("strategy", strategy_name(sim.strategy));
    kv("strategy_theta", num(sim.constant_theta));
    kv("write_paths", write_paths ? "true" : "false");
    kv("converge_time_nodes", std::to_string(convergence.time_grid_nodes));
    kv("converge_time_steps", std::to_string(convergence.time_base_steps));
    kv("converge_space_nodes", std::to_string(convergence.space_base_nodes));
    kv("converge_space_steps", std::to_string(convergence.space_steps));
    return os.str();
}

std::string RunConfig::hash() const { return fnv1a_hex(effective_text()); }

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    PayoffChoice choice;
    std::map<std::string, int, std::less<>> lines;  // key → line of its last assignment

    Settings settings{
        {"k", model(&ModelParams::k)},
        {"rho", model(&ModelParams::rho)},
        {"delta", model(&ModelParams::delta)},
        {"sigma1", model(&ModelParams::sigma1)},
        {"mu", model(&ModelParams::mu)},
        {"sigma0", model(&ModelParams::sigma0)},
        {"T", model(&ModelParams::T)},
        {"payoff", {[&](RunConfig&, std::string_view v) {
             require(v == "call" || v == "put" || v == "constant" || v == "tabulated",
                     "payoff must be call, put, constant or tabulated");
             choice.kind = std::string(v);
         }}},
        {"strike", number([&](RunConfig&, double v) {
             require(v > 0.0, "strike must be > 0");
             choice.strike = v;
         })},
        {"payoff_value", number([&](RunConfig&, double v) { choice.value = v; })},
        {"payoff_table", {[](RunConfig& c, std::string_view v) { c.payoff_table = std::string(v); }}},
        {"x_max", number([](RunConfig& c, double v) {
             require(v > 0.0, "x_max must be > 0");
             c.x_max = v;
         })},
        {"n_x", integer([](RunConfig& c, long long v) { c.n_x = checked_int(v, 3, "n_x"); })},
        {"z_half_width", number([](RunConfig& c, double v) {
             require(v > 0.0, "z_half_width must be > 0");
             c.z_half_width = v;
         })},
        {"n_z", integer([](RunConfig& c, long long v) { c.n_z = checked_int(v, 3, "n_z"); })},
        {"n_steps", integer([](RunConfig& c, long long v) { c.n_steps = checked_int(v, 1, "n_steps"); })},
        {"retain_stride",
         integer([](RunConfig& c, long long v) { c.retain_stride = checked_int(v, 1, "retain_stride"); })},
        {"linear_solver", {[](RunConfig& c, std::string_view v) {
             require(v == "bicgstab" || v == "sparselu", "linear_solver must be bicgstab or sparselu");
             c.linear_solver = v == "sparselu" ? LinearSolverKind::SparseLU : LinearSolverKind::BiCGSTAB;
         }}},
        {"sigma_obs", number([](RunConfig& c, double v) {
             require(v > 0.0, "sigma_obs must be > 0");
             c.sigma_obs = v;
         })},
        {"p_obs", number([](RunConfig& c, double v) {
             require(v > 0.0, "p_obs must be > 0");
             c.p_obs = v;
         })},
        {"sweep_rhos", {[](RunConfig& c, std::string_view v) {
             auto rhos = to_list(v);
             for (double r : rhos) require(r >= -1.0 && r <= 1.0, "sweep_rhos entries must lie in [-1, 1]");
             c.sweep_rhos = std::move(rhos);
         }}},
        {"n_paths", integer([](RunConfig& c, long long v) { c.sim.n_paths = checked_int(v, 100, "n_paths"); })},
        {"mc_steps", integer([](RunConfig& c, long long v) { c.sim.n_steps = checked_int(v, 10, "mc_steps"); })},
        {"seed", {[](RunConfig& c, std::string_view v) { c.sim.seed = to_integer<std::uint64_t>(v); }}},
        {"strategy", {[](RunConfig& c, std::string_view v) {
             if (v == "tracking") c.sim.strategy = HedgeStrategy::Tracking;
             else if (v == "none") c.sim.strategy = HedgeStrategy::None;
             else if (v == "constant") c.sim.strategy = HedgeStrategy::Constant;
             else throw ValidationError("strategy must be tracking, none or constant");
         }}},
        {"strategy_theta", number([](RunConfig& c, double v) { c.sim.constant_theta = v; })},
        {"write_paths", {[](RunConfig& c, std::string_view v) { c.write_paths = to_bool(v); }}},
        {"converge_time_nodes", integer([](RunConfig& c, long long v) {
             c.convergence.time_grid_nodes = checked_int(v, 5, "converge_time_nodes");
         })},
        {"converge_time_steps", integer([](RunConfig& c, long long v) {
             c.convergence.time_base_steps = checked_int(v, 1, "converge_time_steps");
         })},
        {"converge_space_nodes", integer([](RunConfig& c, long long v) {
             c.convergence.space_base_nodes = checked_int(v, 5, "converge_space_nodes");
         })},
        {"converge_space_steps", integer([](RunConfig& c, long long v) {
             c.convergence.space_steps = checked_int(v, 1, "converge_space_steps");
         })},
    };

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto it = settings.find(key);
        if (it == settings.end()) throw ConfigError(line_no, "unknown key '" + std::string(key) + "'");
        if (value.empty()) throw ConfigError(line_no, "missing value for '" + std::string(key) + "'");
        try {
            it->second.apply(cfg, value);
        } catch (const std::exception& e) {
            throw ConfigError(line_no, std::string(key) + ": " + e.what());
        }
        lines[std::string(key)] = line_no;
    }

    auto line_of = [&](std::initializer_list<const char*> keys) {
        int l = 0;
        for (const char* k : keys)
            if (auto it = lines.find(k); it != lines.end()) l = std::max(l, it->second);
        return l;
    };
    auto check = [&](bool ok, std::initializer_list<const char*> keys, const std::string& what) {
        if (!ok) throw ConfigError(line_of(keys), what);
    };

    if (choice.kind == "call") cfg.payoff = CallPayoff{choice.strike};
    else if (choice.kind == "put") cfg.payoff = PutPayoff{choice.strike};
    else if (choice.kind == "constant") cfg.payoff = ConstantPayoff{choice.value};
    else {
        check(!cfg.payoff_table.empty(), {"payoff"}, "payoff = tabulated needs payoff_table");
        std::filesystem::path p(cfg.payoff_table);
        if (p.is_relative()) p = base_dir / p;
        std::string raw;
        try {
            cfg.payoff = read_table(p, raw);
        } catch (const std::exception& e) {
            throw ConfigError(line_of({"payoff_table"}), std::string("payoff_table: ") + e.what());
        }
    }
    check(cfg.x_max > cfg.params.sigma1, {"x_max", "sigma1"}, "x_max must exceed sigma1");
    if (cfg.sigma_obs == 0.0) cfg.sigma_obs = cfg.params.sigma1;
    if (cfg.p_obs == 0.0) cfg.p_obs = reference_spot(cfg.payoff);
    check(cfg.sigma_obs <= cfg.x_max, {"sigma_obs", "x_max", "sigma1"}, "sigma_obs must lie in (0, x_max]");
    const Grid2D grid = cfg.grid2d();
    const double z_obs = std::log(cfg.p_obs);
    check(z_obs > grid.z_min && z_obs < grid.z_max, {"p_obs", "z_half_width", "strike"},
          "p_obs must lie strictly inside the log-price window");
    if (const auto* t = std::get_if<TabulatedPayoff>(&cfg.payoff)) {
        check(t->sigma.front() <= 0.0 && t->sigma.back() >= cfg.x_max && t->price.front() <= grid.y(0) &&
                  t->price.back() >= grid.y(grid.n_z - 1),
              {"payoff_table"}, "payoff table does not cover the grid");
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(0, "cannot read config '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

}  // namespace hedgepde
