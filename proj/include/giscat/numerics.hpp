#pragma once

// Quadrature and differencing primitives shared by all solver modules.
// Everything assumes a uniform grid; composite Simpson is the workhorse
// (3/8 block absorbs an odd interval count), cumulative integrals use
// Simpson pairs with a trapezoid half-panel at odd nodes, and first
// derivatives use 4th-order stencils with one-sided closures at the ends.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "giscat/core.hpp"

namespace giscat {

// Composite Simpson weights for n nodes spaced h apart. For an odd
// interval count the last three intervals get the 3/8 rule, so the
// order stays 4 for any n >= 3. n == 2 degrades to trapezoid.
inline std::vector<double> simpson_weights(std::size_t n, double h) {
    std::vector<double> w(n, 0.0);
    if (n == 0) return w;
    if (n == 1) return w;
    if (n == 2) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    std::size_t intervals = n - 1;
    std::size_t simpson_nodes = n;
    if (intervals % 2 != 0) {
        // reserve the final 3 intervals for the 3/8 block
        simpson_nodes = n - 3;
        double c = 3.0 * h / 8.0;
        w[n - 4] += c;
        w[n - 3] += 3.0 * c;
        w[n - 2] += 3.0 * c;
        w[n - 1] += c;
        if (simpson_nodes == 1) return w;  // exactly 3 intervals total
    }
    double c = h / 3.0;
    w[0] += c;
    w[simpson_nodes - 1] += c;
    for (std::size_t i = 1; i + 1 < simpson_nodes; ++i) {
        w[i] += (i % 2 == 1) ? 4.0 * c : 2.0 * c;
    }
    return w;
}

template <class T>
T integrate(std::span<const T> values, double h) {
    auto w = simpson_weights(values.size(), h);
    T acc{};
    for (std::size_t i = 0; i < values.size(); ++i) acc += w[i] * values[i];
    return acc;
}

template <class T>
T integrate(const std::vector<T>& values, double h) {
    return integrate(std::span<const T>(values), h);
}

// Running integral F[k] = int_{x0}^{x_k} f. Even nodes accumulate exact
// Simpson pairs; odd nodes add a trapezoid half-panel on top of the last
// even node (locally O(h^3), which is the accepted tradeoff for a value
// at every node).
template <class T>
std::vector<T> cumulative_integral(std::span<const T> f, double h) {
    std::vector<T> F(f.size());
    if (f.empty()) return F;
    F[0] = T{};
    for (std::size_t k = 2; k < f.size(); k += 2) {
        F[k] = F[k - 2] + (h / 3.0) * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
    }
    for (std::size_t k = 1; k < f.size(); k += 2) {
        F[k] = F[k - 1] + (h / 2.0) * (f[k - 1] + f[k]);
    }
    return F;
}

template <class T>
std::vector<T> cumulative_integral(const std::vector<T>& f, double h) {
    return cumulative_integral(std::span<const T>(f), h);
}

// 4th-order first derivative on a uniform grid; 5-point one-sided
// stencils close the two nodes at each boundary.
template <class T>
std::vector<T> derivative_4th(std::span<const T> f, double h) {
    std::size_t n = f.size();
    std::vector<T> d(n);
    if (n < 5) throw ConfigError("derivative_4th: need at least 5 nodes");
    double s = 1.0 / (12.0 * h);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        d[i] = s * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    }
    d[0] = s * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = s * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    d[n - 1] = -s * (-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] +
                     16.0 * f[n - 4] - 3.0 * f[n - 5]);
    d[n - 2] = -s * (-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] -
                     6.0 * f[n - 4] + f[n - 5]);
    return d;
}

template <class T>
std::vector<T> derivative_4th(const std::vector<T>& f, double h) {
    return derivative_4th(std::span<const T>(f), h);
}

// 4th-order second derivative (5-point central, 6-point one-sided).
template <class T>
std::vector<T> second_derivative_4th(std::span<const T> f, double h) {
    std::size_t n = f.size();
    std::vector<T> d(n);
    if (n < 6) throw ConfigError("second_derivative_4th: need at least 6 nodes");
    double s = 1.0 / (12.0 * h * h);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        d[i] = s * (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]);
    }
    auto onesided = [&](std::size_t i0, std::ptrdiff_t step, std::size_t out) {
        static const double c0[6] = {45, -154, 214, -156, 61, -10};
        T acc{};
        std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i0);
        for (int k = 0; k < 6; ++k, idx += step) acc += c0[k] * f[static_cast<std::size_t>(idx)];
        d[out] = s * acc;
    };
    auto onesided1 = [&](std::size_t i0, std::ptrdiff_t step, std::size_t out) {
        static const double c1[6] = {10, -15, -4, 14, -6, 1};
        T acc{};
        std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i0);
        for (int k = 0; k < 6; ++k, idx += step) acc += c1[k] * f[static_cast<std::size_t>(idx)];
        d[out] = s * acc;
    };
    onesided(0, +1, 0);
    onesided1(0, +1, 1);
    onesided(n - 1, -1, n - 1);
    onesided1(n - 1, -1, n - 2);
    return d;
}

template <class T>
std::vector<T> second_derivative_4th(const std::vector<T>& f, double h) {
    return second_derivative_4th(std::span<const T>(f), h);
}

// Local 6-point Lagrange interpolation on a uniform grid (O(h^6)).
template <class T>
T lagrange6(std::span<const T> f, double x0, double h, double x) {
    std::size_t n = f.size();
    if (n == 0) throw ConfigError("lagrange6: empty samples");
    if (n < 6) {
        // tiny grids: fall back to nearest value / linear
        double u = (x - x0) / h;
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor(u));
        if (i < 0) i = 0;
        if (i + 1 >= static_cast<std::ptrdiff_t>(n)) return f[n - 1];
        double t = u - static_cast<double>(i);
        return (1.0 - t) * f[static_cast<std::size_t>(i)] + t * f[static_cast<std::size_t>(i) + 1];
    }
    double u = (x - x0) / h;
    std::ptrdiff_t base = static_cast<std::ptrdiff_t>(std::floor(u)) - 2;
    if (base < 0) base = 0;
    if (base + 6 > static_cast<std::ptrdiff_t>(n)) base = static_cast<std::ptrdiff_t>(n) - 6;
    double t = u - static_cast<double>(base);
    double weight[6];
    for (int j = 0; j < 6; ++j) {
        double w = 1.0;
        for (int k = 0; k < 6; ++k) {
            if (k == j) continue;
            w *= (t - static_cast<double>(k)) / static_cast<double>(j - k);
        }
        weight[j] = w;
    }
    T acc{};
    for (int j = 0; j < 6; ++j) acc += weight[j] * f[static_cast<std::size_t>(base) + j];
    return acc;
}

// log-log least squares slope of |v| against |t|; used by the asymptotic
// rate checks. Points with |v| below `floor` are skipped.
inline double loglog_slope(std::span<const double> t, std::span<const double> v,
                           double floor = 1e-300) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(v[i] > floor) || !(t[i] > 0)) continue;
        double X = std::log(t[i]), Y = std::log(v[i]);
        sx += X; sy += Y; sxx += X * X; sxy += X * Y;
        ++m;
    }
    if (m < 2) throw NumericalError("loglog_slope: fewer than 2 usable points");
    double denom = m * sxx - sx * sx;
    return (m * sxy - sx * sy) / denom;
}

}  // namespace giscat
