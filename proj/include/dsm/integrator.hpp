#pragma once

// Dormand-Prince 5(4) integration of z' = Phi(z, t) with PI step control,
// trajectory recording and envelope monitoring.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dsm/envelope.hpp"
#include "dsm/error.hpp"
#include "dsm/flows.hpp"
#include "dsm/linalg.hpp"

namespace dsm {

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double h_init = 1e-3;
    double h_min = 1e-12;
    double h_max = 1e3;
    double t_max = 1e4;
    double residual_stop = 1e-9;
    long max_steps = 500000;

    void validate() const {
        auto bad = [](const char* what) { fail(ErrorKind::InvalidArgument, std::string("integrator: ") + what); };
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) bad("tolerances must be positive");
        if (!(h_min > 0.0) || !(h_min <= h_init) || !(h_init <= h_max)) bad("need 0 < h_min <= h_init <= h_max");
        if (!(t_max > 0.0) || !std::isfinite(t_max)) bad("t_max must be positive and finite");
        if (!(residual_stop >= 0.0)) bad("residual_stop must be nonnegative");
        if (max_steps <= 0) bad("max_steps must be positive");
    }
};

enum class TrajectoryStatus { ReachedResidual, ReachedTmax, StepUnderflow, StepLimit, FlowError };

[[nodiscard]] constexpr std::string_view to_string(TrajectoryStatus s) noexcept {
    switch (s) {
        case TrajectoryStatus::ReachedResidual: return "ReachedResidual";
        case TrajectoryStatus::ReachedTmax: return "ReachedTmax";
        case TrajectoryStatus::StepUnderflow: return "StepUnderflow";
        case TrajectoryStatus::StepLimit: return "StepLimit";
        case TrajectoryStatus::FlowError: return "FlowError";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Generic stepper

struct StepperStats {
    long accepted = 0;
    long rejected = 0;
    long evaluations = 0;
    double last_h = 0.0;  // step size proposed after the final accepted step
};

enum class StepperOutcome { Finished, Stopped, StepUnderflow, StepLimit };

namespace detail {

// Dormand-Prince coefficients.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t_end. `accept(t, y)` is called after
/// every accepted step and returns false to stop early. rhs may throw
/// Error{NonFinite} on a trial stage; the step is then rejected and shrunk.
/// FSAL reuse keeps the cost at six evaluations per step.
template <typename Rhs, typename Accept>
StepperOutcome dopri5(const Rhs& rhs, Vector y, double t0, double t_end, const IntegratorConfig& cfg,
                      const Accept& accept, StepperStats* stats = nullptr) {
    using namespace detail;
    StepperStats local;
    StepperStats& st = stats ? *stats : local;

    constexpr double safety = 0.9;
    constexpr double alpha = 0.7 / 5.0;
    constexpr double beta = 0.4 / 5.0;
    constexpr double fac_min = 0.2;
    constexpr double fac_max = 5.0;

    double t = t0;
    double h = std::min(cfg.h_init, t_end - t0);
    double err_prev = 1e-4;
    bool last_rejected = false;

    Vector k1 = rhs(t, y);
    ++st.evaluations;
    Vector k2, k3, k4, k5, k6, k7, y_new, err;

    while (t < t_end) {
        st.last_h = h;
        if (st.accepted + st.rejected >= cfg.max_steps) return StepperOutcome::StepLimit;
        if (h < cfg.h_min) return StepperOutcome::StepUnderflow;
        bool last = false;
        const double h_proposed = h;
        if (t + h >= t_end) {
            h = t_end - t;
            last = true;
        }

        bool finite = true;
        try {
            k2 = rhs(t + c2 * h, y + h * (a21 * k1));
            k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
            k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            k7 = rhs(t + h, y_new);
            st.evaluations += 6;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NonFinite) throw;
            finite = false;
        }

        double err_norm = kInf;
        if (finite) {
            err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double acc = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y(i)), std::abs(y_new(i)));
                const double r = err(i) / sc;
                acc += r * r;
            }
            err_norm = std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(1, y.size())));
            if (!std::isfinite(err_norm)) err_norm = kInf;
        }

        if (err_norm <= 1.0) {
            t = last ? t_end : t + h;
            y = y_new;
            k1 = k7;
            ++st.accepted;
            double fac = err_norm == 0.0 ? fac_max
                                         : safety * std::pow(err_norm, -alpha) * std::pow(err_prev, beta);
            fac = std::clamp(fac, fac_min, fac_max);
            if (last_rejected) fac = std::min(fac, 1.0);
            err_prev = std::max(err_norm, 1e-4);
            h = std::min(h * fac, cfg.h_max);
            last_rejected = false;
            st.last_h = last ? std::max(h, std::min(h_proposed, cfg.h_max)) : h;
            if (!accept(t, y)) return StepperOutcome::Stopped;
        } else {
            ++st.rejected;
            const double fac = std::isfinite(err_norm) ? std::max(fac_min, safety * std::pow(err_norm, -alpha)) : 0.25;
            h *= std::min(fac, 0.9);
            last_rejected = true;
        }
    }
    return StepperOutcome::Finished;
}

/// States at every grid point, integrating segment by segment and carrying the
/// step size across segments.
template <typename Rhs>
[[nodiscard]] std::vector<Vector> integrate_to_grid(const Rhs& rhs, const Vector& y0, const std::vector<double>& grid,
                                                    IntegratorConfig cfg) {
    if (grid.empty()) return {};
    std::vector<Vector> out;
    out.reserve(grid.size());
    out.push_back(y0);
    Vector y = y0;
    double h = cfg.h_init;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        cfg.h_init = std::max(cfg.h_min, std::min(h, grid[k] - grid[k - 1]));
        StepperStats st;
        const auto outcome = dopri5(
            rhs, y, grid[k - 1], grid[k], cfg, [&y](double, const Vector& v) { y = v; return true; }, &st);
        if (outcome == StepperOutcome::StepUnderflow) {
            fail(ErrorKind::NoConvergence, "step size underflow at t=" + std::to_string(grid[k - 1]));
        }
        if (outcome == StepperOutcome::StepLimit) {
            fail(ErrorKind::NoConvergence, "step limit reached at t=" + std::to_string(grid[k - 1]));
        }
        h = st.last_h > 0.0 ? st.last_h : h;
        out.push_back(y);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Flow integration with monitors

struct Sample {
    double t = 0.0;
    Vector z;
    double residual = 0.0;
    double eps = 0.0;
    std::optional<double> envelope;     // 1/mu(t)
    std::optional<double> dist_to_aux;  // ||z - x(t)||
    std::optional<double> dist_to_solution;
};

struct Trajectory {
    std::vector<Sample> samples;
    TrajectoryStatus status = TrajectoryStatus::ReachedTmax;
    std::string message;
    std::optional<ErrorKind> error_kind;
    StepperStats stats;

    [[nodiscard]] const Sample& final_sample() const { return samples.back(); }
};

/// What x(t) means for the distance monitor: the solution of
/// F(x) + eps(t)(x - z0) = 0, or the known solution y (Gauss-Newton flows).
enum class AuxiliaryTarget { None, RegularizedSolution, KnownSolution };

struct Monitors {
    AuxiliaryTarget target = AuxiliaryTarget::None;
    std::optional<Envelope> envelope;
    AuxiliaryOptions aux_options;
};

[[nodiscard]] inline Trajectory integrate(const Flow& f, const IntegratorConfig& cfg, const Monitors& mon = {}) {
    cfg.validate();
    const Problem& p = *f.problem;
    Trajectory traj;

    std::optional<Vector> x_prev;
    if (mon.target == AuxiliaryTarget::RegularizedSolution && !f.schedule) {
        fail(ErrorKind::MissingMonitor, "auxiliary monitor needs a regularized flow");
    }
    if (mon.target == AuxiliaryTarget::KnownSolution && !p.known_solution) {
        fail(ErrorKind::MissingMonitor, "known-solution monitor needs a problem with a known solution");
    }

    auto record = [&](double t, const Vector& z) {
        Sample s;
        s.t = t;
        s.z = z;
        s.residual = p.F(z).norm();
        s.eps = f.eps(t);
        if (mon.envelope) s.envelope = mon.envelope->radius(t);
        if (mon.target == AuxiliaryTarget::RegularizedSolution) {
            const Vector x = auxiliary_solution(p, s.eps, x_prev ? *x_prev : f.z0, mon.aux_options);
            s.dist_to_aux = (z - x).norm();
            x_prev = x;
        } else if (mon.target == AuxiliaryTarget::KnownSolution) {
            s.dist_to_aux = (z - *p.known_solution).norm();
        }
        if (p.known_solution) s.dist_to_solution = (z - *p.known_solution).norm();
        traj.samples.push_back(std::move(s));
        return traj.samples.back().residual;
    };

    double failing_t = 0.0;
    try {
        if (record(0.0, f.z0) <= cfg.residual_stop) {
            traj.status = TrajectoryStatus::ReachedResidual;
            return traj;
        }
        auto rhs = [&](double t, const Vector& z) {
            failing_t = t;
            return eval_flow(f, z, t);
        };
        auto accept = [&](double t, const Vector& z) { return record(t, z) > cfg.residual_stop; };
        const auto outcome = dopri5(rhs, f.z0, 0.0, cfg.t_max, cfg, accept, &traj.stats);
        switch (outcome) {
            case StepperOutcome::Finished: traj.status = TrajectoryStatus::ReachedTmax; break;
            case StepperOutcome::Stopped: traj.status = TrajectoryStatus::ReachedResidual; break;
            case StepperOutcome::StepUnderflow:
                traj.status = TrajectoryStatus::StepUnderflow;
                traj.message = "step size fell below h_min at t=" + std::to_string(traj.samples.back().t);
                break;
            case StepperOutcome::StepLimit:
                traj.status = TrajectoryStatus::StepLimit;
                traj.message = "max_steps reached at t=" + std::to_string(traj.samples.back().t);
                break;
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SolveFailed && e.kind() != ErrorKind::NonFinite) throw;
        traj.status = TrajectoryStatus::FlowError;
        traj.error_kind = e.kind();
        traj.message = std::string(e.what()) + " (t=" + std::to_string(failing_t) + ")";
    }
    return traj;
}

struct EnvelopeViolation {
    double t = 0.0;
    double gap = 0.0;  // dist - envelope, >= 0
};

[[nodiscard]] inline std::vector<EnvelopeViolation> envelope_violations(const Trajectory& traj) {
    std::vector<EnvelopeViolation> out;
    for (const auto& s : traj.samples) {
        if (!s.envelope || !s.dist_to_aux) {
            fail(ErrorKind::MissingMonitor, "trajectory lacks envelope or auxiliary-distance samples");
        }
        if (*s.dist_to_aux >= *s.envelope) out.push_back({s.t, *s.dist_to_aux - *s.envelope});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

inline nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace detail

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const Eigen::Index n = traj.samples.empty() ? 0 : traj.samples.front().z.size();
    os << "t";
    for (Eigen::Index i = 0; i < n; ++i) os << ",z_" << i;
    os << ",residual,eps,envelope,dist_aux,dist_sol\n";
    for (const auto& s : traj.samples) {
        os << detail::num(s.t);
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << detail::num(s.z(i));
        os << ',' << detail::num(s.residual) << ',' << detail::num(s.eps) << ',' << detail::opt_num(s.envelope)
           << ',' << detail::opt_num(s.dist_to_aux) << ',' << detail::opt_num(s.dist_to_solution) << '\n';
    }
}

[[nodiscard]] inline nlohmann::json trajectory_json(const Trajectory& traj) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : traj.samples) {
        samples.push_back({{"t", s.t},
                           {"z", std::vector<double>(s.z.data(), s.z.data() + s.z.size())},
                           {"residual", s.residual},
                           {"eps", s.eps},
                           {"envelope", detail::opt_json(s.envelope)},
                           {"dist_aux", detail::opt_json(s.dist_to_aux)},
                           {"dist_sol", detail::opt_json(s.dist_to_solution)}});
    }
    nlohmann::json j = {{"schema", "dsm-traj/1"},
                        {"status", std::string(to_string(traj.status))},
                        {"message", traj.message},
                        {"accepted_steps", traj.stats.accepted},
                        {"rejected_steps", traj.stats.rejected},
                        {"evaluations", traj.stats.evaluations},
                        {"samples", std::move(samples)}};
    return j;
}

}  // namespace dsm
