#pragma once

#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace ldcanon {

struct quad_result {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = false;
    long evals = 0;
};

namespace quad_detail {

// One tanh-sinh abscissa at t >= 0: x in (1/2, 1), one_minus_x computed
// without cancellation, and the un-scaled weight d(xi)/dt.
struct ts_node {
    double x;
    double omx;
    double w;
};

// Level k holds the nodes new at step h = 2^-k (odd multiples of h; level 0
// holds the integer abscissae including t = 0).
const std::vector<std::vector<ts_node>>& ts_levels();

struct gk15_tables {
    static const double xgk[8];
    static const double wgk[8];
    static const double wg[4];
};

} // namespace quad_detail

// Double-exponential quadrature of f over (0, 1). The integrand is called as
// f(x, 1 - x) so that algebraic endpoint singularities can be evaluated from
// the stable endpoint distance. Converges when successive level estimates
// differ by less than abs_tol + rel_tol * |value|.
template <class F>
quad_result tanh_sinh_01(F&& f, double abs_tol, double rel_tol = 1e-12,
                         int max_level = 12) {
    const auto& levels = quad_detail::ts_levels();
    quad_result res;
    double total = 0.0; // sum of w * f over all nodes seen so far
    double prev = 0.0;
    double h = 1.0;
    const int top = std::min<int>(max_level, static_cast<int>(levels.size()) - 1);
    for (int level = 0; level <= top; ++level, h *= 0.5) {
        const double cutoff = (abs_tol > 0 ? abs_tol : 1e-300) * 1e-3 / h;
        int quiet = 0;
        for (const auto& node : levels[level]) {
            double term;
            if (node.omx == 0.5) { // center node, t = 0
                term = node.w * f(0.5, 0.5);
                res.evals += 1;
            } else {
                term = node.w * (f(node.x, node.omx) + f(node.omx, node.x));
                res.evals += 2;
            }
            if (std::isfinite(term)) total += term;
            // double-exponential tail: once contributions are negligible the
            // remaining nodes of this level cannot matter
            if (std::fabs(term) < cutoff) {
                if (++quiet >= 3 && node.x > 0.99) break;
            } else {
                quiet = 0;
            }
        }
        const double estimate = h * total;
        if (level >= 2) {
            const double diff = std::fabs(estimate - prev);
            if (diff <= abs_tol + rel_tol * std::fabs(estimate)) {
                res.value = estimate;
                res.abs_error = diff;
                res.converged = true;
                return res;
            }
            res.abs_error = diff;
        }
        prev = estimate;
    }
    res.value = prev;
    return res;
}

// Globally adaptive Gauss-Kronrod 15(7) for smooth integrands on [a, b].
template <class F>
quad_result gk15_adaptive(F&& f, double a, double b, double abs_tol,
                          double rel_tol = 1e-13, int max_intervals = 2000) {
    using quad_detail::gk15_tables;
    struct interval {
        double a, b, value, err;
        bool operator<(const interval& o) const { return err < o.err; }
    };

    quad_result res;
    auto eval = [&](double lo, double hi) -> interval {
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        const double fc = f(mid);
        double resg = gk15_tables::wg[3] * fc;
        double resk = gk15_tables::wgk[7] * fc;
        for (int i = 0; i < 7; ++i) {
            const double dx = half * gk15_tables::xgk[i];
            const double sum = f(mid - dx) + f(mid + dx);
            resk += gk15_tables::wgk[i] * sum;
            if (i % 2 == 1) resg += gk15_tables::wg[i / 2] * sum;
        }
        res.evals += 15;
        return {lo, hi, resk * half, std::fabs((resk - resg) * half)};
    };

    std::priority_queue<interval> heap;
    interval whole = eval(a, b);
    double total = whole.value;
    double err = whole.err;
    heap.push(whole);
    int used = 1;
    while (err > abs_tol + rel_tol * std::fabs(total) && used < max_intervals) {
        interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) { // interval exhausted by rounding
            heap.push({worst.a, worst.b, worst.value, 0.0});
            err -= worst.err;
            continue;
        }
        interval left = eval(worst.a, mid);
        interval right = eval(mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        ++used;
    }
    res.value = total;
    res.abs_error = err;
    res.converged = err <= abs_tol + rel_tol * std::fabs(total);
    return res;
}

} // namespace ldcanon
