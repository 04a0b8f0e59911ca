#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "config.hpp"
#include "dsm/benchmarks.hpp"
#include "dsm/experiments.hpp"
#include "dsm/feigenbaum.hpp"
#include "dsm/inequality_lab.hpp"

namespace dsmcli {

using dsm::Error;
using dsm::ErrorKind;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Shared setup

struct SolveSetup {
    dsm::Benchmark bench;
    dsm::FlowKind method = dsm::FlowKind::RegNewton;
    dsm::Schedule schedule = dsm::Schedule::power(1.0, 1.0, 1.0);
    dsm::IntegratorConfig integrator;
};

Config load_config(const CommonOptions& opt) {
    Config c = Config::load(opt.config, opt.overrides);
    if (opt.seed_bench) c.set("problem.benchmark", *opt.seed_bench);
    return c;
}

dsm::Schedule schedule_from(const Config& c, const dsm::Schedule& base) {
    const std::string kind_text = c.str("schedule.kind", std::string(dsm::to_string(base.kind())));
    const auto kind = dsm::parse_schedule_kind(kind_text);
    if (!kind) throw ConfigError("schedule.kind: unknown family '" + kind_text + "' (power, log, exp)");
    const bool same = *kind == base.kind();
    const double eps0 = c.num("schedule.eps0", base.eps0());
    const double t0 = c.num("schedule.t0", same ? base.t0() : (*kind == dsm::ScheduleKind::Log ? std::exp(1.0) : 5.0));
    const double nu = c.num("schedule.nu", same ? base.nu() : 1.0);
    try {
        switch (*kind) {
            case dsm::ScheduleKind::Power: return dsm::Schedule::power(eps0, t0, nu);
            case dsm::ScheduleKind::Log: return dsm::Schedule::log(eps0, t0);
            case dsm::ScheduleKind::Exp: return dsm::Schedule::exp(eps0, nu);
        }
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("schedule.kind: unsupported");
}

dsm::IntegratorConfig integrator_from(const Config& c, dsm::IntegratorConfig base) {
    base.rel_tol = c.num("integrator.rel_tol", base.rel_tol);
    base.abs_tol = c.num("integrator.abs_tol", base.abs_tol);
    base.h_init = c.num("integrator.h_init", base.h_init);
    base.h_min = c.num("integrator.h_min", base.h_min);
    base.h_max = c.num("integrator.h_max", base.h_max);
    base.t_max = c.num("integrator.t_max", base.t_max);
    base.residual_stop = c.num("integrator.residual_stop", base.residual_stop);
    base.max_steps = c.integer("integrator.max_steps", base.max_steps);
    try {
        base.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return base;
}

dsm::Benchmark benchmark_from(const Config& c) {
    if (!c.has("problem.benchmark")) throw ConfigError("no problem selected (problem.benchmark or --seed-bench)");
    const std::string name = c.str("problem.benchmark", "");
    const auto names = dsm::benchmark_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw ConfigError("problem.benchmark: unknown benchmark '" + name + "'");
    }
    if (c.has("problem.m") && name != "scalar-power-m") throw ConfigError("problem.m only applies to scalar-power-m");
    try {
        return dsm::make_benchmark(name, c.num("problem.m", 3.0));
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

SolveSetup solve_setup(const Config& c, dsm::IntegratorConfig integrator_base = {}) {
    SolveSetup s;
    s.bench = benchmark_from(c);
    const std::string flow = c.str("method.flow", std::string(dsm::to_string(s.bench.method)));
    const auto kind = dsm::parse_flow_kind(flow);
    if (!kind) throw ConfigError("method.flow: unknown flow '" + flow + "'");
    s.method = *kind;
    s.schedule = schedule_from(c, s.bench.schedule);
    s.integrator = integrator_from(c, integrator_base);
    return s;
}

std::filesystem::path out_dir(const Config& c, const CommonOptions& opt) {
    std::filesystem::path dir = opt.out ? *opt.out : c.str("output.dir", "dsm-out");
    std::filesystem::create_directories(dir);
    return dir;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << text;
}

void write_json(const std::filesystem::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

std::string fmt(double v, const char* f = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

json checks_json(const std::vector<dsm::TheoremCheck>& checks) {
    json a = json::array();
    for (const auto& c : checks) a.push_back({{"theorem", c.theorem}, {"passes", c.passes}, {"reason", c.reason}});
    return a;
}

void print_preflight(const dsm::Preflight& pf, const dsm::Schedule& s, dsm::FlowKind method) {
    std::printf("pre-flight admissibility for %s (C_eps = %s)\n", s.describe().c_str(), fmt(pf.C_eps).c_str());
    for (const auto& c : pf.checks) {
        const bool mine = c.theorem == dsm::to_string(method);
        std::printf("  %c %-14s %-4s %s\n", mine ? '*' : ' ', c.theorem.c_str(), c.passes ? "pass" : "FAIL",
                    c.reason.c_str());
    }
}

int config_error(const std::string& what) {
    std::fprintf(stderr, "config error: %s\n", what.c_str());
    return kConfigError;
}

}  // namespace

// ---------------------------------------------------------------------------
// solve

int cmd_solve(const CommonOptions& opt) {
    SolveSetup s;
    Config c;
    std::string aux;
    std::string env_mode;
    double env_scale = 1.0;
    try {
        c = load_config(opt);
        s = solve_setup(c);
        aux = c.str("monitor.auxiliary", "auto");
        env_mode = c.str("monitor.envelope", "auto");
        env_scale = c.num("monitor.envelope_scale", 1.0);
        if (aux != "auto" && aux != "none" && aux != "regularized" && aux != "solution") {
            throw ConfigError("monitor.auxiliary: expected auto, none, regularized or solution");
        }
        if (env_mode != "auto" && env_mode != "none") throw ConfigError("monitor.envelope: expected auto or none");
        if (!(env_scale > 0.0)) throw ConfigError("monitor.envelope_scale must be positive");
    } catch (const ConfigError& e) {
        return config_error(e.what());
    }

    const dsm::Problem& p = s.bench.problem;
    dsm::Preflight pf;
    if (dsm::is_regularized(s.method)) {
        pf = dsm::preflight(p, s.method, s.schedule, s.bench.constants, s.integrator.t_max);
        print_preflight(pf, s.schedule, s.method);
        if (opt.strict && !pf.method_admissible()) {
            return config_error("--strict: schedule is not admissible for " + std::string(dsm::to_string(s.method)) +
                                " (" + pf.method_check->reason + ")");
        }
    } else {
        std::printf("pre-flight: %s is unregularized; no admissibility theorem applies\n",
                    std::string(dsm::to_string(s.method)).c_str());
        pf.target = p.known_solution ? dsm::AuxiliaryTarget::KnownSolution : dsm::AuxiliaryTarget::None;
    }

    dsm::Monitors mon;
    mon.target = pf.target;
    if (aux == "none") mon.target = dsm::AuxiliaryTarget::None;
    if (aux == "regularized") mon.target = dsm::AuxiliaryTarget::RegularizedSolution;
    if (aux == "solution") mon.target = dsm::AuxiliaryTarget::KnownSolution;
    if (env_mode == "auto" && pf.envelope && mon.target != dsm::AuxiliaryTarget::None) {
        mon.envelope = env_scale == 1.0 ? *pf.envelope : pf.envelope->scaled(env_scale);
    }

    dsm::Trajectory traj;
    try {
        const auto sched = dsm::is_regularized(s.method) ? std::optional<dsm::Schedule>(s.schedule) : std::nullopt;
        traj = dsm::integrate(dsm::make_flow(s.method, p, sched), s.integrator, mon);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::MissingMonitor || e.kind() == ErrorKind::InvalidArgument) {
            return config_error(e.what());
        }
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFlowError;
    }

    std::optional<std::size_t> violations;
    if (mon.envelope && !traj.samples.empty()) violations = dsm::envelope_violations(traj).size();

    const auto dir = out_dir(c, opt);
    {
        std::ofstream os(dir / "trajectory.csv", std::ios::binary);
        dsm::write_trajectory_csv(os, traj);
    }
    json j = dsm::trajectory_json(traj);
    j["problem"] = s.bench.name;
    j["method"] = std::string(dsm::to_string(s.method));
    j["schedule"] = dsm::is_regularized(s.method) ? json(s.schedule.describe()) : json();
    j["preflight"] = checks_json(pf.checks);
    j["envelope"] = mon.envelope ? json(std::string(dsm::to_string(mon.envelope->form()))) : json();
    j["envelope_violations"] = violations ? json(*violations) : json();
    write_json(dir / "trajectory.json", j);

    const auto& last = traj.samples.back();
    std::printf("status: %s  t=%s  samples=%zu\n", std::string(dsm::to_string(traj.status)).c_str(),
                fmt(last.t).c_str(), traj.samples.size());
    std::printf("final residual: %s\n", fmt(last.residual, "%.6e").c_str());
    if (last.dist_to_solution) std::printf("distance to solution: %s\n", fmt(*last.dist_to_solution, "%.6e").c_str());
    if (violations) {
        std::printf("envelope violations: %zu\n", *violations);
    } else {
        std::printf("envelope violations: n/a (no envelope monitored)\n");
    }
    if (traj.status == dsm::TrajectoryStatus::FlowError) {
        std::fprintf(stderr, "flow error: %s\n", traj.message.c_str());
        return kFlowError;
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// feigenbaum

namespace {

struct FeigTask {
    double z = 2.0;
    dsm::FlowKind method = dsm::FlowKind::RegNewton;
};

struct FeigOutcome {
    std::optional<dsm::ContinuationResult> result;
    std::string error;
    double runtime_s = 0.0;
};

json steps_json(const std::vector<dsm::DimensionStep>& steps) {
    json a = json::array();
    for (const auto& s : steps) {
        a.push_back({{"n", s.n},
                     {"residual", s.residual},
                     {"discrepancy", s.discrepancy},
                     {"concave", s.concave},
                     {"accepted", s.accepted},
                     {"status", s.status},
                     {"t_final", s.t_final},
                     {"steps", s.steps},
                     {"q", std::vector<double>(s.q.data(), s.q.data() + s.q.size())}});
    }
    return a;
}

}  // namespace

int cmd_feigenbaum(const CommonOptions& opt) {
    Config c;
    std::vector<double> zs;
    std::vector<dsm::FlowKind> methods;
    dsm::ContinuationOptions copt;
    try {
        c = load_config(opt);
        zs = c.num_list("feigenbaum.z", {13, 14, 15, 16});
        for (double z : zs) {
            if (!(z >= 2.0)) throw ConfigError("feigenbaum.z: every z must be >= 2");
        }
        for (const auto& m : c.list("feigenbaum.methods", {"newton", "gn-sourcewise"})) {
            const auto k = dsm::parse_flow_kind(m);
            if (!k || (*k != dsm::FlowKind::RegNewton && *k != dsm::FlowKind::RegGNSourcewise)) {
                throw ConfigError("feigenbaum.methods: '" + m + "' (use newton and/or gn-sourcewise)");
            }
            methods.push_back(*k);
        }
        copt.n_max = static_cast<int>(c.integer("feigenbaum.n_max", copt.n_max));
        if (copt.n_max < 1 || copt.n_max > 40) throw ConfigError("feigenbaum.n_max must lie in [1, 40]");
        const std::string part = c.str("feigenbaum.partition", "auto");
        const auto pk = dsm::parse_partition(part);
        if (!pk) throw ConfigError("feigenbaum.partition: expected uniform, power or auto");
        copt.partition = *pk;
        copt.seed = c.num("feigenbaum.seed", copt.seed);
        try {
            copt.schedule = dsm::Schedule::exp(c.num("feigenbaum.eps0", copt.schedule.eps0()),
                                               c.num("feigenbaum.nu", copt.schedule.nu()));
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        copt.patience = static_cast<int>(c.integer("feigenbaum.patience", copt.patience));
        if (copt.patience < 0) throw ConfigError("feigenbaum.patience must be >= 0");
        copt.require_concave = opt.strict || c.flag("feigenbaum.require_concave", false);
        copt.integrator.t_max = c.num("feigenbaum.t_max", copt.integrator.t_max);
        try {
            copt.integrator.validate();
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
    } catch (const ConfigError& e) {
        return config_error(e.what());
    }

    std::vector<FeigTask> tasks;
    for (double z : zs) {
        for (auto m : methods) tasks.push_back({z, m});
    }
    std::vector<FeigOutcome> outcomes(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                outcomes[i].result = dsm::continuation_solve(tasks[i].z, tasks[i].method, copt);
            } catch (const Error& e) {
                outcomes[i].error = e.what();
            }
            outcomes[i].runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const int nw = std::max(1, std::min<int>(opt.workers, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    json results = json::array();
    json runtimes = json::array();
    std::string csv = "z,alpha,digits,n_final,runtime_s\n";
    std::size_t z_ok = 0;
    std::printf("%6s  %-14s %4s  %-16s %s\n", "z", "method", "n", "alpha", "status");
    for (std::size_t zi = 0; zi < zs.size(); ++zi) {
        json per_method = json::array();
        std::vector<double> alphas;
        int n_final = 0;
        double runtime = 0.0;
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            const auto& o = outcomes[zi * methods.size() + mi];
            const std::string mname(dsm::to_string(methods[mi]));
            runtime += o.runtime_s;
            runtimes.push_back({{"z", zs[zi]}, {"method", mname}, {"runtime_s", o.runtime_s}});
            if (!o.result) {
                per_method.push_back({{"method", mname}, {"ok", false}, {"error", o.error}});
                std::printf("%6g  %-14s %4s  %-16s %s\n", zs[zi], mname.c_str(), "-", "-", o.error.c_str());
                continue;
            }
            const auto& r = *o.result;
            const bool concave = std::any_of(r.steps.begin(), r.steps.end(),
                                             [](const dsm::DimensionStep& s) { return s.accepted && s.concave; });
            per_method.push_back({{"method", mname},
                                  {"ok", true},
                                  {"alpha", r.alpha},
                                  {"alpha_signed", r.alpha_signed},
                                  {"n_final", r.n_final},
                                  {"concave", concave},
                                  {"q", std::vector<double>(r.q.data(), r.q.data() + r.q.size())},
                                  {"chain_q1", r.chain_q1},
                                  {"steps", steps_json(r.steps)}});
            alphas.push_back(r.alpha_signed);
            n_final = n_final == 0 ? r.n_final : std::min(n_final, r.n_final);
            std::printf("%6g  %-14s %4d  %-16s %s\n", zs[zi], mname.c_str(), r.n_final,
                        fmt(r.alpha_signed, "%.10f").c_str(), concave ? "ok" : "ok (not concave)");
        }
        json accepted;
        std::string alpha_text;
        int digits = 0;
        if (alphas.size() >= 2) {
            auto agree = dsm::accepted_digits(alphas[0], alphas[1]);
            for (std::size_t k = 2; k < alphas.size(); ++k) {
                const auto d = dsm::accepted_digits(alphas[0], alphas[k]);
                if (d.digits < agree.digits) agree = d;
            }
            digits = agree.digits;
            alpha_text = agree.value;
            accepted = {{"digits", digits}, {"value", alpha_text}};
            std::printf("%6g  accepted digits: %d  alpha = %s\n", zs[zi], digits, alpha_text.c_str());
        } else if (alphas.size() == 1) {
            alpha_text = fmt(alphas[0], "%.12f");
        }
        if (!alphas.empty()) ++z_ok;
        results.push_back({{"z", zs[zi]}, {"methods", per_method}, {"accepted", accepted}});
        csv += fmt(zs[zi], "%g") + "," + alpha_text + "," + (alphas.size() >= 2 ? std::to_string(digits) : "") + "," +
               (alphas.empty() ? "" : std::to_string(n_final)) + "," + fmt(runtime, "%.3f") + "\n";
    }

    const auto dir = out_dir(c, opt);
    json j = {{"schema", "dsm-feig/1"},
              {"config",
               {{"z", zs},
                {"n_max", copt.n_max},
                {"partition", std::string(dsm::to_string(copt.partition))},
                {"seed", copt.seed},
                {"schedule", copt.schedule.describe()},
                {"patience", copt.patience},
                {"require_concave", copt.require_concave}}},
              {"results", results},
              {"metadata", {{"runtimes", runtimes}, {"workers", nw}}}};
    write_json(dir / "feigenbaum.json", j);
    write_text(dir / "feigenbaum.csv", csv);
    return z_ok == 0 ? kAllFailed : kOk;
}

// ---------------------------------------------------------------------------
// inequality

namespace {

struct IneqResult {
    bool passes = false;
    json details;
    std::vector<double> t;
    std::vector<double> u;
};

IneqResult riccati_scenario(const dsm::RiccatiSetup& s, double t_max, std::size_t points) {
    std::vector<double> grid(points);
    for (std::size_t k = 0; k < points; ++k) grid[k] = t_max * static_cast<double>(k) / static_cast<double>(points - 1);
    IneqResult r;
    const auto cond = dsm::check_riccati_conditions(s, grid);
    const auto closed = dsm::riccati_majorant_trace(s, grid);
    const auto ode = dsm::riccati_ode_trace(s, grid);
    const auto sat = dsm::saturating_riccati_trace(s, grid);
    double dev = 0.0;
    double dom = -dsm::kInf;  // max of v - majorant
    for (std::size_t k = 0; k < grid.size(); ++k) {
        dev = std::max(dev, std::abs(closed[k].v_scale - ode[k].v_scale));
        dom = std::max(dom, sat[k] - closed[k].v_scale);
        r.t.push_back(grid[k]);
        r.u.push_back(closed[k].v_scale);
    }
    const bool dominated = dom <= 1e-9;
    r.passes = cond.passes && dev <= 1e-6 && dominated;
    r.details = {{"conditions_pass", cond.passes},
                 {"conditions_reason", cond.reason},
                 {"min_sigma_slack", cond.min_sigma_slack},
                 {"min_beta_slack", cond.min_beta_slack},
                 {"majorant_vs_ode_max_deviation", dev},
                 {"saturating_minus_majorant_max", dom},
                 {"majorant_dominates", dominated}};
    return r;
}

}  // namespace

int cmd_inequality(const CommonOptions& opt) {
    Config c;
    std::string scenario;
    double t_max = 0.0;
    std::size_t points = 512;
    std::string pair;
    double cpar = 1.0;
    try {
        c = load_config(opt);
        scenario = c.str("inequality.scenario", "");
        const std::vector<std::string> known = {"riccati-example1", "riccati-example2", "riccati-example3",
                                                "comparison",       "appendix",         "appendix-counterexample"};
        if (std::find(known.begin(), known.end(), scenario) == known.end()) {
            throw ConfigError("inequality.scenario: expected one of riccati-example1..3, comparison, appendix, "
                              "appendix-counterexample");
        }
        const bool appendix = scenario.rfind("appendix", 0) == 0;
        t_max = c.num("inequality.t_max", appendix ? 1e3 : 10.0);
        if (!(t_max > 0.0)) throw ConfigError("inequality.t_max must be positive");
        const long pts = c.integer("inequality.points", 512);
        if (pts < 16) throw ConfigError("inequality.points must be at least 16");
        points = static_cast<std::size_t>(pts);
        pair = c.str("inequality.pair", "equality");
        if (pair != "equality" && pair != "strict") throw ConfigError("inequality.pair: expected equality or strict");
        cpar = c.num("inequality.c", 1.0);
    } catch (const ConfigError& e) {
        return config_error(e.what());
    }

    IneqResult r;
    try {
        if (scenario == "riccati-example1") {
            r = riccati_scenario(dsm::power_riccati_setup(dsm::PowerRiccatiParams{}), t_max, points);
        } else if (scenario == "riccati-example2") {
            r = riccati_scenario(dsm::exponential_riccati_setup(dsm::ExponentialRiccatiParams{}), t_max, points);
        } else if (scenario == "riccati-example3") {
            r = riccati_scenario(dsm::log_riccati_setup(dsm::LogRiccatiParams{}), t_max, points);
        } else if (scenario == "comparison") {
            dsm::Rhs2 g = [](double t, double u) { return -u + 1.0 / (1.0 + t); };
            dsm::Rhs2 f = pair == "equality" ? g : dsm::Rhs2([](double, double w) { return -w; });
            const auto rep = dsm::comparison_check(f, g, 0.5, 0.5, t_max, points);
            r.t = rep.t;
            r.u = rep.u;
            r.passes = rep.passes && (pair != "equality" || rep.max_gap <= 1e-12);
            r.details = {{"pair", pair},
                         {"comparison_holds", rep.passes},
                         {"max_violation", rep.max_violation},
                         {"max_gap", rep.max_gap}};
        } else {
            const bool counter = scenario == "appendix-counterexample";
            const auto setup = counter ? dsm::appendix_counterexample(cpar) : dsm::appendix_repaired(cpar);
            const auto rep = dsm::appendix_decay_check(setup, t_max, points);
            r.t = rep.t;
            r.u = rep.u;
            r.passes = counter ? !rep.decays : rep.decays;
            r.details = {{"decays", rep.decays},
                         {"u_final", rep.u_final},
                         {"condition4_sampled", setup.has_condition4},
                         {"expected_decay", !counter}};
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidArgument) return config_error(e.what());
        std::fprintf(stderr, "error: %s\n", e.what());
        r.passes = false;
        r.details = {{"error", e.what()}};
    }

    const auto dir = out_dir(c, opt);
    json j = {{"schema", "dsm-ineq/1"}, {"scenario", scenario}, {"passes", r.passes}, {"t_max", t_max},
              {"points", points},       {"report", r.details}};
    write_json(dir / "inequality.json", j);
    std::string csv = "t,u\n";
    for (std::size_t k = 0; k < r.t.size(); ++k) {
        csv += fmt(r.t[k], "%.17g") + "," + fmt(r.u[k], "%.17g") + "\n";
    }
    write_text(dir / "inequality.csv", csv);
    std::printf("scenario %s: %s\n", scenario.c_str(), r.passes ? "PASS" : "FAIL");
    std::printf("%s\n", r.details.dump().c_str());
    return r.passes ? kOk : kAssertionFailed;
}

// ---------------------------------------------------------------------------
// rates

int cmd_rates(const CommonOptions& opt) {
    Config c;
    SolveSetup s;
    double expected = 0.0;
    double tol = 0.05;
    try {
        c = load_config(opt);
        dsm::IntegratorConfig base;
        base.t_max = 1e5;
        s = solve_setup(c, base);
        if (!dsm::is_regularized(s.method)) throw ConfigError("rates needs a regularized flow");
        if (!s.bench.problem.known_solution) throw ConfigError("rates needs a benchmark with a known solution");
        const auto e = c.opt_num("rates.expected");
        if (!e && !s.bench.rate_exponent) {
            throw ConfigError("benchmark '" + s.bench.name + "' has no known rate; set rates.expected");
        }
        expected = e ? *e : *s.bench.rate_exponent;
        tol = c.num("rates.tolerance", tol);
        if (!(tol > 0.0)) throw ConfigError("rates.tolerance must be positive");
    } catch (const ConfigError& e) {
        return config_error(e.what());
    }

    const auto pf = dsm::preflight(s.bench.problem, s.method, s.schedule, s.bench.constants, s.integrator.t_max);
    print_preflight(pf, s.schedule, s.method);
    if (opt.strict && !pf.method_admissible()) return config_error("--strict: schedule is not admissible");

    dsm::Monitors mon;
    mon.target = dsm::AuxiliaryTarget::KnownSolution;
    dsm::Trajectory traj;
    try {
        traj = dsm::integrate(dsm::make_flow(s.method, s.bench.problem, s.schedule), s.integrator, mon);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFlowError;
    }
    const auto dir = out_dir(c, opt);
    {
        std::ofstream os(dir / "trajectory.csv", std::ios::binary);
        dsm::write_trajectory_csv(os, traj);
    }
    if (traj.status == dsm::TrajectoryStatus::FlowError) {
        std::fprintf(stderr, "flow error: %s\n", traj.message.c_str());
        return kFlowError;
    }
    const auto fit = dsm::fit_rate(traj);
    json j = {{"schema", "dsm-rates/1"},
              {"problem", s.bench.name},
              {"method", std::string(dsm::to_string(s.method))},
              {"schedule", s.schedule.describe()},
              {"status", std::string(dsm::to_string(traj.status))},
              {"tail_samples", fit.samples}};
    if (fit.samples < 20) {
        j["error"] = "fewer than 20 tail samples";
        write_json(dir / "rates.json", j);
        std::fprintf(stderr, "only %zu tail samples; need at least 20\n", fit.samples);
        return kTooFewSamples;
    }
    const bool within = std::abs(fit.exponent - expected) <= tol;
    j["fitted_exponent"] = fit.exponent;
    j["intercept"] = fit.intercept;
    j["expected_exponent"] = expected;
    j["tolerance"] = tol;
    j["within_tolerance"] = within;
    std::printf("fitted exponent %.6f over %zu tail samples; expected %.6f +- %g: %s\n", fit.exponent, fit.samples,
                expected, tol, within ? "PASS" : "FAIL");

    if (s.bench.source_v && s.bench.problem.N2 && s.method == dsm::FlowKind::RegNewton) {
        const double k = dsm::source_rate_constant(dsm::c_eps(s.schedule), *s.bench.problem.N2, s.bench.source_v->norm());
        double worst = 0.0;
        for (std::size_t i = traj.samples.size() / 2; i < traj.samples.size(); ++i) {
            const auto& smp = traj.samples[i];
            worst = std::max(worst, *smp.dist_to_solution / (k * smp.eps));
        }
        j["source_bound_constant"] = k;
        j["source_bound_max_ratio"] = worst;
        j["source_bound_holds"] = worst <= 1.0;
        std::printf("source-condition bound ||z-y|| <= %.6g eps(t): max ratio %.6g over the tail: %s\n", k, worst,
                    worst <= 1.0 ? "holds" : "VIOLATED");
    }
    write_json(dir / "rates.json", j);
    return kOk;
}

// ---------------------------------------------------------------------------
// check-schedule

int cmd_check_schedule(const CommonOptions& opt) {
    Config c;
    std::optional<SolveSetup> s;
    dsm::Schedule sched = dsm::Schedule::power(1.0, 5.0, 1.0);
    try {
        c = load_config(opt);
        if (c.has("problem.benchmark")) {
            s = solve_setup(c);
            sched = s->schedule;
        } else {
            sched = schedule_from(c, sched);
        }
    } catch (const ConfigError& e) {
        return config_error(e.what());
    }

    json j = {{"schema", "dsm-sched/1"}, {"schedule", sched.describe()}};
    const double ce = dsm::c_eps(sched);
    const bool c_ok = ce < 1.0;
    const auto t33 = dsm::check_theorem33(sched);
    std::printf("schedule %s\n", sched.describe().c_str());
    std::printf("  C_eps = %s  (C_eps < 1: %s)\n", fmt(ce).c_str(), c_ok ? "pass" : "FAIL");
    std::printf("  eps'/eps^2 -> 0: %s %s\n", t33.passes() ? "pass" : "FAIL", t33.first_failure().c_str());
    j["C_eps"] = std::isinf(ce) ? json("inf") : json(ce);
    j["C_eps_below_one"] = c_ok;
    j["max_log_rate"] = dsm::max_log_rate(sched);
    j["simple_condition"] = t33.passes();
    bool method_ok = c_ok;
    if (s) {
        const auto pf = dsm::preflight(s->bench.problem, s->method, sched, s->bench.constants, s->integrator.t_max);
        print_preflight(pf, sched, s->method);
        j["problem"] = s->bench.name;
        j["method"] = std::string(dsm::to_string(s->method));
        j["preflight"] = checks_json(pf.checks);
        method_ok = pf.method_admissible();
    }
    const auto dir = out_dir(c, opt);
    write_json(dir / "admissibility.json", j);
    if (opt.strict && !method_ok) return config_error("--strict: schedule is not admissible");
    return kOk;
}

}  // namespace dsmcli
