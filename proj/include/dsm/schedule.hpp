#pragma once

// Regularization schedules eps(t): positive, nonincreasing families with
// analytic derivatives and antiderivatives.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsm/error.hpp"
#include "dsm/quadrature.hpp"

namespace dsm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ScheduleKind { Power, Log, Exp };

[[nodiscard]] constexpr std::string_view to_string(ScheduleKind k) noexcept {
    switch (k) {
        case ScheduleKind::Power: return "power";
        case ScheduleKind::Log: return "log";
        case ScheduleKind::Exp: return "exp";
    }
    return "unknown";
}

[[nodiscard]] inline std::optional<ScheduleKind> parse_schedule_kind(std::string_view s) {
    if (s == "power") return ScheduleKind::Power;
    if (s == "log") return ScheduleKind::Log;
    if (s == "exp") return ScheduleKind::Exp;
    return std::nullopt;
}

/// Power: eps0 (t0 + t)^-nu.  Log: eps0 / log(t0 + t).  Exp: eps0 e^{-nu t}.
/// Parameters a family does not use are ignored.
class Schedule {
public:
    [[nodiscard]] static Schedule power(double eps0, double t0, double nu) {
        return Schedule(ScheduleKind::Power, eps0, t0, nu);
    }
    [[nodiscard]] static Schedule log(double eps0, double t0) { return Schedule(ScheduleKind::Log, eps0, t0, 0.0); }
    [[nodiscard]] static Schedule exp(double eps0, double nu) { return Schedule(ScheduleKind::Exp, eps0, 0.0, nu); }

    [[nodiscard]] ScheduleKind kind() const noexcept { return kind_; }
    [[nodiscard]] double eps0() const noexcept { return eps0_; }
    [[nodiscard]] double t0() const noexcept { return t0_; }
    [[nodiscard]] double nu() const noexcept { return nu_; }

    [[nodiscard]] double operator()(double t) const { return eps(t); }

    [[nodiscard]] double eps(double t) const {
        switch (kind_) {
            case ScheduleKind::Power: return eps0_ * std::pow(t0_ + t, -nu_);
            case ScheduleKind::Log: return eps0_ / std::log(t0_ + t);
            case ScheduleKind::Exp: return eps0_ * std::exp(-nu_ * t);
        }
        return 0.0;
    }

    [[nodiscard]] double deriv(double t) const {
        switch (kind_) {
            case ScheduleKind::Power: return -nu_ * eps0_ * std::pow(t0_ + t, -nu_ - 1.0);
            case ScheduleKind::Log: {
                const double l = std::log(t0_ + t);
                return -eps0_ / ((t0_ + t) * l * l);
            }
            case ScheduleKind::Exp: return -nu_ * eps0_ * std::exp(-nu_ * t);
        }
        return 0.0;
    }

    /// int_a^b eps(s) ds; closed form except for the log family.
    [[nodiscard]] double integral(double a, double b) const {
        switch (kind_) {
            case ScheduleKind::Power:
                if (nu_ == 1.0) return eps0_ * std::log((t0_ + b) / (t0_ + a));
                return eps0_ * (std::pow(t0_ + b, 1.0 - nu_) - std::pow(t0_ + a, 1.0 - nu_)) / (1.0 - nu_);
            case ScheduleKind::Exp: return eps0_ / nu_ * (std::exp(-nu_ * a) - std::exp(-nu_ * b));
            case ScheduleKind::Log:
                return adaptive_simpson([this](double s) { return eps(s); }, a, b, QuadratureOptions{1e-12, 40});
        }
        return 0.0;
    }

    /// Same family with eps0 multiplied by c.
    [[nodiscard]] Schedule scaled(double c) const { return Schedule(kind_, eps0_ * c, t0_, nu_); }

    [[nodiscard]] std::string describe() const {
        std::string s(to_string(kind_));
        s += "(eps0=" + fmt(eps0_);
        if (kind_ != ScheduleKind::Exp) s += ", t0=" + fmt(t0_);
        if (kind_ != ScheduleKind::Log) s += ", nu=" + fmt(nu_);
        return s + ")";
    }

private:
    Schedule(ScheduleKind kind, double eps0, double t0, double nu) : kind_(kind), eps0_(eps0), t0_(t0), nu_(nu) {
        validate();
    }

    void validate() const {
        auto bad = [](const std::string& what) { fail(ErrorKind::InvalidArgument, "schedule: " + what); };
        if (!std::isfinite(eps0_) || !(eps0_ > 0.0)) bad("eps0 must be positive and finite");
        switch (kind_) {
            case ScheduleKind::Power:
                if (!std::isfinite(t0_) || !(t0_ > 0.0)) bad("power family needs t0 > 0");
                if (!std::isfinite(nu_) || !(nu_ > 0.0)) bad("power family needs nu > 0");
                break;
            case ScheduleKind::Log:
                if (!std::isfinite(t0_) || !(t0_ > 1.0)) bad("log family needs t0 > 1");
                break;
            case ScheduleKind::Exp:
                if (!std::isfinite(nu_) || !(nu_ > 0.0)) bad("exp family needs nu > 0");
                break;
        }
    }

    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return buf;
    }

    ScheduleKind kind_;
    double eps0_;
    double t0_;
    double nu_;
};

/// {0} followed by `points - 1` log-spaced values from t_min to t_max.
[[nodiscard]] inline std::vector<double> log_grid(double t_max, std::size_t points = 512, double t_min = 1e-3) {
    if (points < 2 || !(t_max > t_min) || !(t_min > 0.0)) fail(ErrorKind::InvalidArgument, "log_grid: bad arguments");
    std::vector<double> g;
    g.reserve(points);
    g.push_back(0.0);
    const double ratio = std::log(t_max / t_min);
    for (std::size_t k = 0; k + 1 < points; ++k) {
        g.push_back(t_min * std::exp(ratio * static_cast<double>(k) / static_cast<double>(points - 2)));
    }
    g.back() = t_max;
    return g;
}

inline void require_time_grid(const std::vector<double>& grid) {
    if (grid.empty() || grid.front() != 0.0) fail(ErrorKind::InvalidArgument, "time grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) fail(ErrorKind::InvalidArgument, "time grid must be strictly increasing");
    }
}

/// sup_{t>=0} eps(0)|eps'(t)| / eps(t)^2 in closed form. +inf flags the
/// exponential family (and power families with nu > 1), which never satisfy
/// the bound.
[[nodiscard]] inline double c_eps(const Schedule& s) {
    switch (s.kind()) {
        case ScheduleKind::Power: return s.nu() <= 1.0 ? s.nu() / s.t0() : kInf;
        case ScheduleKind::Log: return 1.0 / (s.t0() * std::log(s.t0()));
        case ScheduleKind::Exp: return kInf;
    }
    return kInf;
}

/// Grid version of c_eps for user-supplied families: scan a log grid over
/// [0, t_max] and fold in the value reported for t -> infinity.
template <typename Eps, typename DEps>
[[nodiscard]] double c_eps_scan(const Eps& eps, const DEps& deps, double tail_limit, double t_max = 1e6,
                                std::size_t points = 4096) {
    const double e0 = eps(0.0);
    double best = tail_limit * e0;
    for (double t : log_grid(t_max, points)) {
        const double e = eps(t);
        best = std::max(best, e0 * std::abs(deps(t)) / (e * e));
    }
    return best;
}

/// sup_{t>=0} |eps'(t)| / eps(t) (closed form).
[[nodiscard]] inline double max_log_rate(const Schedule& s) {
    switch (s.kind()) {
        case ScheduleKind::Power: return s.nu() / s.t0();
        case ScheduleKind::Log: return 1.0 / (s.t0() * std::log(s.t0()));
        case ScheduleKind::Exp: return s.nu();
    }
    return kInf;
}

/// lim_{t->inf} |eps'(t)| / eps(t).
[[nodiscard]] inline double tail_log_rate(const Schedule& s) {
    return s.kind() == ScheduleKind::Exp ? s.nu() : 0.0;
}

}  // namespace dsm
