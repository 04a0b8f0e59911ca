#include <CLI11.hpp>
#include <cstdio>
#include <exception>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"dsm: regularized continuous methods for ill-posed equations"};
    app.require_subcommand(1);
    dsmcli::CommonOptions opt;

    auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config, "INI config file");
        sub->add_option("--out", opt.out, "output directory (default dsm-out)");
        sub->add_option("--workers", opt.workers, "worker threads for sweeps")->check(CLI::PositiveNumber);
        sub->add_flag("--strict", opt.strict, "refuse inadmissible schedules");
        sub->add_option("--seed-bench", opt.seed_bench, "built-in benchmark to run");
        sub->add_option("--set", opt.overrides, "override a config key, section.key=value");
    };

    struct Cmd {
        const char* name;
        const char* help;
        int (*run)(const dsmcli::CommonOptions&);
    };
    const Cmd cmds[] = {
        {"solve", "integrate one flow on a benchmark", dsmcli::cmd_solve},
        {"feigenbaum", "alpha_z by dimension continuation", dsmcli::cmd_feigenbaum},
        {"inequality", "run an inequality-lab scenario", dsmcli::cmd_inequality},
        {"rates", "fit the convergence rate on a benchmark", dsmcli::cmd_rates},
        {"check-schedule", "admissibility diagnostics for a schedule", dsmcli::cmd_check_schedule},
    };
    int code = 0;
    for (const auto& c : cmds) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_common(sub);
        sub->callback([&code, &opt, run = c.run] { code = run(opt); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : dsmcli::kConfigError;
    } catch (const dsmcli::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return dsmcli::kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return code;
}
