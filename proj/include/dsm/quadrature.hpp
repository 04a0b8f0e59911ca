#pragma once

#include <cmath>
#include <string>

#include "dsm/error.hpp"

namespace dsm {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    int max_depth = 40;
};

namespace detail {

template <typename F>
double simpson_step(const F& f, double a, double fa, double b, double fb, double m, double fm, double whole, double tol,
                    int depth, const QuadratureOptions& opt) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm)) fail(ErrorKind::NonFinite, "quadrature integrand is not finite");
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= opt.max_depth) {
        fail(ErrorKind::QuadratureFailed,
             "adaptive Simpson exceeded depth " + std::to_string(opt.max_depth) + " near t=" + std::to_string(m));
    }
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1, opt) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1, opt);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] with Richardson correction.
template <typename F>
[[nodiscard]] double adaptive_simpson(const F& f, double a, double b, const QuadratureOptions& opt = {}) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm)) {
        fail(ErrorKind::NonFinite, "quadrature integrand is not finite");
    }
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, opt.abs_tol, 0, opt);
}

}  // namespace dsm
