#pragma once

// Gauge machinery connecting the energy-dependent pair (q, r) to its three
// companion systems:
//   E(x)  = exp( (i/2) \int_{x_min}^x q r dy ),   mu = \int q r dy,
//   sigma = -(i/2) q r' - (1/4) q^2 r^2,
//   tilde pair : (E^2 q, E^{-2} r)
//   uv pair    : (q, -(i/2) r' - (1/4) q r^2)
//   ps pair    : ((i/2) q' - (1/4) q^2 r, r)

#include <cmath>
#include <utility>
#include <vector>

#include "giscat/grid.hpp"
#include "giscat/numerics.hpp"

namespace giscat {

struct GaugeData {
    SampledField E;
    Complex mu{};
    SampledField sigma;
};

struct GaugeOptions {
    // tolerance on the Richardson estimate of the cumulative quadrature error
    double quad_tol = 1e-8;
    bool check_resolution = true;
};

inline GaugeData compute_gauge(const PotentialPair& p, const GaugeOptions& opts = {}) {
    const Grid1D& g = p.grid();
    double h = g.spacing();
    std::size_t n = static_cast<std::size_t>(g.n);

    std::vector<Complex> qr(n);
    for (std::size_t i = 0; i < n; ++i) qr[i] = p.q.values[i] * p.r.values[i];

    Complex mu = integrate(qr, h);
    if (opts.check_resolution && n >= 5) {
        // Richardson: redo the full integral on every second node
        std::vector<Complex> coarse;
        coarse.reserve(n / 2 + 1);
        for (std::size_t i = 0; i < n; i += 2) coarse.push_back(qr[i]);
        Complex mu2 = integrate(coarse, 2.0 * h);
        double est = std::abs(mu - mu2) / 15.0;
        if (est > opts.quad_tol)
            throw NumericalError("compute_gauge: grid too coarse, estimated quadrature error " +
                                 std::to_string(est));
    }

    auto cum = cumulative_integral(qr, h);
    std::vector<Complex> Evals(n);
    for (std::size_t i = 0; i < n; ++i) Evals[i] = std::exp(0.5 * kI * cum[i]);

    auto rp = derivative_4th(p.r.values, h);
    std::vector<Complex> sig(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex q = p.q.values[i], r = p.r.values[i];
        sig[i] = -0.5 * kI * q * rp[i] - 0.25 * q * q * r * r;
    }

    GaugeData out;
    out.E = SampledField(g, std::move(Evals));
    out.mu = mu;
    out.sigma = SampledField(g, std::move(sig));
    return out;
}

inline PotentialPair to_tilde_pair(const PotentialPair& p, const GaugeData& gauge) {
    const Grid1D& g = p.grid();
    if (!gauge.E.grid.same_as(g)) throw ConfigError("to_tilde_pair: gauge grid mismatch");
    std::size_t n = static_cast<std::size_t>(g.n);
    std::vector<Complex> qt(n), rt(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex E2 = gauge.E.values[i] * gauge.E.values[i];
        qt[i] = E2 * p.q.values[i];
        rt[i] = p.r.values[i] / E2;
    }
    return PotentialPair(SampledField(g, std::move(qt)), SampledField(g, std::move(rt)));
}

inline PotentialPair to_uv_pair(const PotentialPair& p) {
    const Grid1D& g = p.grid();
    std::size_t n = static_cast<std::size_t>(g.n);
    auto rp = derivative_4th(p.r.values, g.spacing());
    std::vector<Complex> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex q = p.q.values[i], r = p.r.values[i];
        v[i] = -0.5 * kI * rp[i] - 0.25 * q * r * r;
    }
    SampledField u = p.q;  // u == q, closure included
    return PotentialPair(std::move(u), SampledField(g, std::move(v)));
}

inline PotentialPair to_ps_pair(const PotentialPair& p) {
    const Grid1D& g = p.grid();
    std::size_t n = static_cast<std::size_t>(g.n);
    auto qp = derivative_4th(p.q.values, g.spacing());
    std::vector<Complex> pv(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex q = p.q.values[i], r = p.r.values[i];
        pv[i] = 0.5 * kI * qp[i] - 0.25 * q * q * r;
    }
    SampledField s = p.r;  // s == r, closure included
    return PotentialPair(SampledField(g, std::move(pv)), std::move(s));
}

}  // namespace giscat
