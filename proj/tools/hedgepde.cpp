#include "hedgepde/commands.hpp"
#include "hedgepde/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Quadratic-hedging PDE solver under stochastic volatility"};
    app.require_subcommand(1);
    std::string config;
    std::string out;
    for (const char* name : {"solve", "sweep-rho", "mc-verify", "converge"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "key = value config file")->required();
        sub->add_option("--out", out, "output directory")->required();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hedgepde::kExitConfigError;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    return hedgepde::run_command(command, config, out, std::cout, std::cerr, hedgepde::thread_budget());
}
