#pragma once

// Uniform 1-D grids and complex-valued sampled fields. A field may carry
// an analytic closure; evaluation between nodes prefers the closure and
// otherwise falls back to 6-point Lagrange interpolation of the samples.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "giscat/core.hpp"
#include "giscat/numerics.hpp"

namespace giscat {

struct Grid1D {
    double x_min = 0.0;
    double x_max = 0.0;
    int n = 0;

    Grid1D() = default;
    Grid1D(double xmin, double xmax, int count) : x_min(xmin), x_max(xmax), n(count) {
        if (!(x_min < x_max)) throw ConfigError("Grid1D: x_min must be < x_max");
        if (n < 3) throw ConfigError("Grid1D: need at least 3 nodes");
    }

    double spacing() const { return (x_max - x_min) / static_cast<double>(n - 1); }
    double node(int i) const { return x_min + spacing() * static_cast<double>(i); }
    bool same_as(const Grid1D& other) const {
        return x_min == other.x_min && x_max == other.x_max && n == other.n;
    }
};

using Closure = std::function<Complex(double)>;

struct SampledField {
    Grid1D grid;
    std::vector<Complex> values;
    Closure closure;  // optional analytic evaluator

    SampledField() = default;
    SampledField(Grid1D g, std::vector<Complex> v, Closure c = nullptr)
        : grid(g), values(std::move(v)), closure(std::move(c)) {
        if (static_cast<int>(values.size()) != grid.n)
            throw ConfigError("SampledField: values length != grid.n");
    }

    static SampledField from_closure(const Grid1D& g, Closure c) {
        std::vector<Complex> v(static_cast<std::size_t>(g.n));
        for (int i = 0; i < g.n; ++i) v[static_cast<std::size_t>(i)] = c(g.node(i));
        return SampledField(g, std::move(v), std::move(c));
    }

    static SampledField zero(const Grid1D& g) {
        return SampledField(g, std::vector<Complex>(static_cast<std::size_t>(g.n), Complex{}),
                            [](double) { return Complex{}; });
    }

    Complex operator()(double x) const {
        if (closure) return closure(x);
        return lagrange6<Complex>(values, grid.x_min, grid.spacing(), x);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

struct PotentialPair {
    SampledField q;
    SampledField r;

    PotentialPair() = default;
    PotentialPair(SampledField qq, SampledField rr) : q(std::move(qq)), r(std::move(rr)) {
        if (!q.grid.same_as(r.grid)) throw ConfigError("PotentialPair: q and r must share a grid");
    }

    const Grid1D& grid() const { return q.grid; }
};

// Largest end-of-grid amplitude relative to the peak amplitude; the
// Schwartz-decay surrogate. Returns 0 for the zero pair.
inline double decay_ratio(const PotentialPair& p) {
    double peak = std::max(p.q.max_abs(), p.r.max_abs());
    if (peak == 0.0) return 0.0;
    double ends = std::max(std::max(std::abs(p.q.values.front()), std::abs(p.q.values.back())),
                           std::max(std::abs(p.r.values.front()), std::abs(p.r.values.back())));
    return ends / peak;
}

inline void require_decay(const PotentialPair& p, double threshold = 1e-10) {
    double ratio = decay_ratio(p);
    if (ratio > threshold)
        throw ConfigError("potential tails exceed decay threshold: ratio " +
                          std::to_string(ratio) + " > " + std::to_string(threshold));
}

inline PotentialPair make_pair_from_closures(const Grid1D& g, Closure fq, Closure fr) {
    return PotentialPair(SampledField::from_closure(g, std::move(fq)),
                         SampledField::from_closure(g, std::move(fr)));
}

// Values-only copy: between-node evaluation switches to 6-point Lagrange.
// Hot loops prefer this over arbitrarily expensive closures; on the grids in
// use the interpolation error is O(h^6) and far below solver tolerances.
inline PotentialPair resampled(const PotentialPair& p) {
    return PotentialPair(SampledField(p.q.grid, p.q.values), SampledField(p.r.grid, p.r.values));
}

inline PotentialPair zero_pair(const Grid1D& g) {
    return PotentialPair(SampledField::zero(g), SampledField::zero(g));
}

inline PotentialPair gaussian_pair(const Grid1D& g, Complex amp_q, Complex amp_r,
                                   double width = 1.0) {
    double w2 = width * width;
    return make_pair_from_closures(
        g, [amp_q, w2](double x) { return amp_q * std::exp(-x * x / w2); },
        [amp_r, w2](double x) { return amp_r * std::exp(-x * x / w2); });
}

// The one-soliton pair of the worked closed-form example:
//   q(x) = 4 e^{2x} / (e^{4x} - i),  r(x) = q(x)^*.
inline PotentialPair one_soliton_pair(const Grid1D& g) {
    auto q = [](double x) {
        return 4.0 * std::exp(2.0 * x) / (Complex(std::exp(4.0 * x), 0.0) - kI);
    };
    auto r = [](double x) {
        return 4.0 * std::exp(2.0 * x) / (Complex(std::exp(4.0 * x), 0.0) + kI);
    };
    return make_pair_from_closures(g, q, r);
}

// Named analytic potentials for CLI/config selection.
inline PotentialPair named_potential(const std::string& name, const Grid1D& g,
                                     const std::vector<double>& params = {}) {
    auto param = [&](std::size_t i, double fallback) {
        return i < params.size() ? params[i] : fallback;
    };
    if (name == "zero") return zero_pair(g);
    if (name == "gaussian") {
        Complex aq(param(0, 1.0), param(1, 0.0));
        Complex ar(param(2, aq.real()), param(3, aq.imag()));
        return gaussian_pair(g, aq, ar, param(4, 1.0));
    }
    if (name == "one_soliton") return one_soliton_pair(g);
    throw ConfigError("unknown named potential: " + name);
}

}  // namespace giscat
