#pragma once

// Adaptive Dormand-Prince RK5(4) for complex 2-vector systems. Used for the
// modulated Jost integrations, where the unknown is slowly varying outside
// the oscillatory coupling band, so adaptive steps pay off.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "giscat/core.hpp"

namespace giscat {

using Vec2c = Eigen::Vector2cd;

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0 -> auto
    double max_step = 0.0;      // 0 -> |x1 - x0|
};

namespace detail {

inline double error_norm(const Vec2c& err, const Vec2c& y0, const Vec2c& y1, double rtol,
                         double atol) {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) {
        double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        double e = std::abs(err[i]) / scale;
        acc += e * e;
    }
    return std::sqrt(0.5 * acc);
}

}  // namespace detail

// Integrate w' = f(x, w) from x0 to x1 (either direction). If `record_at`
// is non-empty it must be sorted in the direction of travel; the solution
// at those abscissas is appended to `recorded` (computed by shortening
// steps to land exactly on them).
template <class F>
Vec2c rk45_integrate(F&& f, double x0, double x1, Vec2c w, const OdeOptions& opts = {},
                     std::span<const double> record_at = {}, std::vector<Vec2c>* recorded = nullptr) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    double span_len = std::abs(x1 - x0);
    if (span_len == 0.0) return w;
    double dir = (x1 > x0) ? 1.0 : -1.0;
    double max_step = opts.max_step > 0 ? opts.max_step : span_len;
    double h = opts.initial_step > 0 ? opts.initial_step : std::min(span_len, 1e-2);
    h = std::min(h, max_step);
    double h_min = span_len * 1e-14;

    std::size_t next_record = 0;
    double x = x0;
    Vec2c k1 = f(x, w);
    bool have_k1 = true;

    while (dir * (x1 - x) > 0.0) {
        double target = x1;
        bool record_here = false;
        if (recorded && next_record < record_at.size()) {
            double rx = record_at[next_record];
            if (dir * (rx - x) <= 0.0) {
                // already at/over the record point (can happen at x0)
                recorded->push_back(w);
                ++next_record;
                continue;
            }
            if (dir * (rx - target) < 0.0) {
                target = rx;
                record_here = true;
            }
        }
        double remaining = dir * (target - x);
        double step = std::min(h, remaining);
        bool hits_target = (step >= remaining * (1.0 - 1e-12));
        if (hits_target) step = remaining;
        double hs = dir * step;

        if (!have_k1) {
            k1 = f(x, w);
            have_k1 = true;
        }
        Vec2c k2 = f(x + c2 * hs, w + hs * (a21 * k1));
        Vec2c k3 = f(x + c3 * hs, w + hs * (a31 * k1 + a32 * k2));
        Vec2c k4 = f(x + c4 * hs, w + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        Vec2c k5 = f(x + c5 * hs, w + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        Vec2c k6 = f(x + hs, w + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Vec2c y5 = w + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Vec2c k7 = f(x + hs, y5);
        Vec2c err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        if (!y5.allFinite())
            throw NumericalError("rk45: non-finite state near x = " + std::to_string(x));

        double en = detail::error_norm(err, w, y5, opts.rtol, opts.atol);
        if (en <= 1.0) {
            x += hs;
            w = y5;
            k1 = k7;  // FSAL
            if (record_here && hits_target) {
                recorded->push_back(w);
                ++next_record;
            }
            double grow = en > 1e-30 ? 0.9 * std::pow(en, -0.2) : 5.0;
            h = std::min(max_step, step * std::min(5.0, std::max(0.2, grow)));
        } else {
            have_k1 = true;  // k1 still valid at unchanged x
            h = step * std::max(0.1, 0.9 * std::pow(en, -0.2));
            if (h < h_min)
                throw NumericalError("rk45: step size underflow near x = " + std::to_string(x));
        }
    }
    // record points that coincide with the terminal abscissa
    while (recorded && next_record < record_at.size() &&
           dir * (record_at[next_record] - x1) <= span_len * 1e-12) {
        recorded->push_back(w);
        ++next_record;
    }
    return w;
}

}  // namespace giscat
