#pragma once

//==============================================================================
// Direct scattering for the four 2x2 linear systems:
//   GerdjikovIvanov : [[-i z^2 - (i/2) q r ,  z q ], [ z r ,  i z^2 + (i/2) q r ]]
//   KaupNewell      : [[-i z^2             ,  z q ], [ z r ,  i z^2            ]]
//   AknsUV / AknsPS : [[-i lam             ,    q ], [   r ,  i lam            ]]
// with lam = z^2. Jost solutions are integrated in modulated variables
// w = diag(e^{+i lam x}, e^{-i lam x}) J, which freezes the free phase and
// leaves only the potential-driven dynamics:
//   w1' = V11 w1 + V12 e^{+2 i lam x} w2
//   w2' = V21 e^{-2 i lam x} w1 + V22 w2.
// Wronskians of two solutions equal the plain 2x2 determinant of their
// modulated components (the phases cancel), which gives the scattering
// coefficients without ever forming the oscillatory factors.
//==============================================================================

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "giscat/core.hpp"
#include "giscat/grid.hpp"
#include "giscat/numerics.hpp"
#include "giscat/ode.hpp"
#include "giscat/potentials.hpp"
#include "giscat/triplets.hpp"

namespace giscat {

enum class SystemKind { GerdjikovIvanov, KaupNewell, AknsUV, AknsPS };

enum class JostKind { Psi, PsiBar, Phi, PhiBar };

struct SpectralPoint {
    Complex lambda;
    Complex zeta;

    static SpectralPoint from_lambda(Complex lam) {
        return SpectralPoint{lam, std::sqrt(lam)};  // principal root
    }
    static SpectralPoint from_zeta(Complex z) { return SpectralPoint{z * z, z}; }
};

namespace detail {

struct ModulatedRhs {
    const PotentialPair* p;
    SystemKind kind;
    Complex lambda;
    Complex zeta;

    Vec2c operator()(double x, const Vec2c& w) const {
        Complex a = p->q(x);
        Complex b = p->r(x);
        Complex v11{}, v12, v21;
        switch (kind) {
            case SystemKind::GerdjikovIvanov:
                v11 = -0.5 * kI * a * b;
                v12 = zeta * a;
                v21 = zeta * b;
                break;
            case SystemKind::KaupNewell:
                v12 = zeta * a;
                v21 = zeta * b;
                break;
            default:
                v12 = a;
                v21 = b;
                break;
        }
        Complex ph = std::exp(2.0 * kI * lambda * x);
        return Vec2c(v11 * w[0] + v12 * ph * w[1], v21 * w[0] / ph - v11 * w[1]);
    }
};

inline Vec2c initial_modulated(JostKind which) {
    switch (which) {
        case JostKind::Psi: return Vec2c(0.0, 1.0);
        case JostKind::PsiBar: return Vec2c(1.0, 0.0);
        case JostKind::Phi: return Vec2c(1.0, 0.0);
        case JostKind::PhiBar: return Vec2c(0.0, 1.0);
    }
    return Vec2c(0.0, 0.0);
}

inline bool from_right(JostKind which) {
    return which == JostKind::Psi || which == JostKind::PsiBar;
}

}  // namespace detail

// Modulated Jost components at a single abscissa.
inline Vec2c jost_modulated_at(SystemKind kind, const PotentialPair& p, const SpectralPoint& sp,
                               JostKind which, double x_eval, const OdeOptions& opts = {}) {
    detail::ModulatedRhs rhs{&p, kind, sp.lambda, sp.zeta};
    double x0 = detail::from_right(which) ? p.grid().x_max : p.grid().x_min;
    return rk45_integrate(rhs, x0, x_eval, detail::initial_modulated(which), opts);
}

struct JostSolution {
    Grid1D grid;
    std::vector<Vec2c> values;     // true components, phases included
    std::vector<Vec2c> modulated;  // diag(e^{+i lam x}, e^{-i lam x}) * values
};

// One Jost solution sampled on the full grid of the potential pair.
inline JostSolution integrate_jost(SystemKind kind, const PotentialPair& p,
                                   const SpectralPoint& sp, JostKind which,
                                   const OdeOptions& opts = {}) {
    const Grid1D& g = p.grid();
    detail::ModulatedRhs rhs{&p, kind, sp.lambda, sp.zeta};

    bool rightward = !detail::from_right(which);
    std::vector<double> nodes(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) {
        int idx = rightward ? i : (g.n - 1 - i);
        nodes[static_cast<std::size_t>(i)] = g.node(idx);
    }
    std::vector<Vec2c> rec;
    rec.reserve(nodes.size());
    double x0 = rightward ? g.x_min : g.x_max;
    double x1 = rightward ? g.x_max : g.x_min;
    rk45_integrate(rhs, x0, x1, detail::initial_modulated(which), opts, nodes, &rec);
    if (rec.size() != nodes.size())
        throw NumericalError("integrate_jost: node recording incomplete");
    if (!rightward) std::reverse(rec.begin(), rec.end());

    JostSolution out;
    out.grid = g;
    out.modulated = std::move(rec);
    out.values.resize(out.modulated.size());
    for (int i = 0; i < g.n; ++i) {
        Complex ph = std::exp(kI * sp.lambda * g.node(i));
        out.values[static_cast<std::size_t>(i)] =
            Vec2c(out.modulated[static_cast<std::size_t>(i)][0] / ph,
                  out.modulated[static_cast<std::size_t>(i)][1] * ph);
    }
    return out;
}

struct JostTable {
    SpectralPoint point;
    JostSolution psi, psibar, phi, phibar;
};

inline JostTable compute_jost_table(SystemKind kind, const PotentialPair& p,
                                    const SpectralPoint& sp, const OdeOptions& opts = {}) {
    JostTable t;
    t.point = sp;
    t.psi = integrate_jost(kind, p, sp, JostKind::Psi, opts);
    t.psibar = integrate_jost(kind, p, sp, JostKind::PsiBar, opts);
    t.phi = integrate_jost(kind, p, sp, JostKind::Phi, opts);
    t.phibar = integrate_jost(kind, p, sp, JostKind::PhiBar, opts);
    return t;
}

inline Complex wronskian(const Vec2c& a, const Vec2c& b) { return a[0] * b[1] - a[1] * b[0]; }

struct ScatteringData {
    std::vector<double> lambda;
    std::vector<Complex> T, Tbar, R, Rbar, L, Lbar;
    std::vector<char> flagged;  // spectral-singularity suspects, per sample
    std::optional<TripletPair> triplets;
};

struct ScatteringOptions {
    OdeOptions ode;
    double x_eval_frac = 0.5;       // Wronskian evaluation point within the grid
    double wronskian_floor = 1e-12;
    int threads = 0;
};

// All six coefficients on a real lambda grid via the Wronskian formulas
//   T = 1/[phi;psi],  Tbar = 1/[psibar;phibar],
//   R = [phi;psibar]/[psi;phi],  Rbar = [phibar;psi]/[psibar;phibar],
//   L = [psi;phibar]/[phi;psi],  Lbar = [phi;psibar]/[psibar;phibar].
inline ScatteringData scattering_coefficients(SystemKind kind, const PotentialPair& p,
                                              const std::vector<double>& lambda_grid,
                                              const ScatteringOptions& opts = {}) {
    const Grid1D& g = p.grid();
    double x_eval = g.x_min + opts.x_eval_frac * (g.x_max - g.x_min);

    ScatteringData out;
    std::size_t n = lambda_grid.size();
    out.lambda = lambda_grid;
    out.T.resize(n);
    out.Tbar.resize(n);
    out.R.resize(n);
    out.Rbar.resize(n);
    out.L.resize(n);
    out.Lbar.resize(n);
    out.flagged.assign(n, 0);

    parallel_for(
        n,
        [&](std::size_t i) {
            SpectralPoint sp = SpectralPoint::from_lambda(Complex(lambda_grid[i], 0.0));
            Vec2c phi = jost_modulated_at(kind, p, sp, JostKind::Phi, x_eval, opts.ode);
            Vec2c phibar = jost_modulated_at(kind, p, sp, JostKind::PhiBar, x_eval, opts.ode);
            Vec2c psi = jost_modulated_at(kind, p, sp, JostKind::Psi, x_eval, opts.ode);
            Vec2c psibar = jost_modulated_at(kind, p, sp, JostKind::PsiBar, x_eval, opts.ode);

            Complex a = wronskian(phi, psi);        // = 1/T
            Complex abar = wronskian(psibar, phibar);  // = 1/Tbar
            if (std::abs(a) < opts.wronskian_floor || std::abs(abar) < opts.wronskian_floor)
                out.flagged[i] = 1;
            out.T[i] = 1.0 / a;
            out.Tbar[i] = 1.0 / abar;
            out.R[i] = -wronskian(phi, psibar) / a;
            out.Rbar[i] = wronskian(phibar, psi) / abar;
            out.L[i] = wronskian(psi, phibar) / a;
            out.Lbar[i] = wronskian(phi, psibar) / abar;
        },
        opts.threads);
    return out;
}

//------------------------------------------------------------------------------
// Validation reports
//------------------------------------------------------------------------------

struct CrossSystemReport {
    // max deviation over the lambda grid of each identity family
    double dev_T = 0, dev_Tbar = 0, dev_R = 0, dev_Rbar = 0, dev_L = 0, dev_Lbar = 0;
    double max_dev() const {
        return std::max({dev_T, dev_Tbar, dev_R, dev_Rbar, dev_L, dev_Lbar});
    }
};

// Scattering data for all four kinds from one (q, r), checked against the
// cross-system identities: T = e^{i mu/2} T~ = T_uv = T_ps, and the
// zeta-weighted reflection identities.
inline CrossSystemReport cross_system_check(const PotentialPair& p_in,
                                            const std::vector<double>& lambda_grid,
                                            const ScatteringOptions& opts = {}) {
    PotentialPair p = resampled(p_in);
    GaugeData gauge = compute_gauge(p);
    PotentialPair tilde = to_tilde_pair(p, gauge);
    PotentialPair uv = to_uv_pair(p);
    PotentialPair ps = to_ps_pair(p);

    ScatteringData gi = scattering_coefficients(SystemKind::GerdjikovIvanov, p, lambda_grid, opts);
    ScatteringData kn = scattering_coefficients(SystemKind::KaupNewell, tilde, lambda_grid, opts);
    ScatteringData sv = scattering_coefficients(SystemKind::AknsUV, uv, lambda_grid, opts);
    ScatteringData sp = scattering_coefficients(SystemKind::AknsPS, ps, lambda_grid, opts);

    Complex emu2 = std::exp(0.5 * kI * gauge.mu);
    Complex emu = emu2 * emu2;
    CrossSystemReport rep;
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        Complex lam(lambda_grid[i], 0.0);
        Complex z = std::sqrt(lam);
        auto acc = [](double& slot, Complex lhs, Complex rhs) {
            slot = std::max(slot, std::abs(lhs - rhs));
        };
        acc(rep.dev_T, gi.T[i], emu2 * kn.T[i]);
        acc(rep.dev_T, gi.T[i], sv.T[i]);
        acc(rep.dev_T, gi.T[i], sp.T[i]);
        acc(rep.dev_Tbar, gi.Tbar[i], kn.Tbar[i] / emu2);
        acc(rep.dev_Tbar, gi.Tbar[i], sv.Tbar[i]);
        acc(rep.dev_Tbar, gi.Tbar[i], sp.Tbar[i]);
        acc(rep.dev_R, z * gi.R[i], z * emu * kn.R[i]);
        acc(rep.dev_R, z * gi.R[i], sv.R[i]);
        acc(rep.dev_R, z * gi.R[i], lam * sp.R[i]);
        acc(rep.dev_Rbar, z * gi.Rbar[i], z * kn.Rbar[i] / emu);
        acc(rep.dev_Rbar, z * gi.Rbar[i], lam * sv.Rbar[i]);
        acc(rep.dev_Rbar, z * gi.Rbar[i], sp.Rbar[i]);
        acc(rep.dev_L, z * gi.L[i], z * kn.L[i]);
        acc(rep.dev_L, z * gi.L[i], lam * sv.L[i]);
        acc(rep.dev_L, z * gi.L[i], sp.L[i]);
        acc(rep.dev_Lbar, z * gi.Lbar[i], z * kn.Lbar[i]);
        acc(rep.dev_Lbar, z * gi.Lbar[i], sv.Lbar[i]);
        acc(rep.dev_Lbar, z * gi.Lbar[i], lam * sp.Lbar[i]);
    }
    return rep;
}

struct JostRelationReport {
    double tilde_residual = 0;  // diag(1/E, E) connection, with e^{-+ i mu/2} on psi / psibar
    double uv_residual = 0;     // lower-triangular connection to the (u, v) system
    double ps_residual = 0;     // upper-triangular connection to the (p, s) system
    double max_residual() const { return std::max({tilde_residual, uv_residual, ps_residual}); }
};

inline JostRelationReport jost_relation_check(const PotentialPair& p_in, const SpectralPoint& sp,
                                              const OdeOptions& opts = {}) {
    PotentialPair p = resampled(p_in);
    GaugeData gauge = compute_gauge(p);
    PotentialPair tilde = to_tilde_pair(p, gauge);
    PotentialPair uv = to_uv_pair(p);
    PotentialPair ps = to_ps_pair(p);
    const Grid1D& g = p.grid();

    JostTable gi = compute_jost_table(SystemKind::GerdjikovIvanov, p, sp, opts);
    JostTable kn = compute_jost_table(SystemKind::KaupNewell, tilde, sp, opts);
    JostTable uvt = compute_jost_table(SystemKind::AknsUV, uv, sp, opts);
    JostTable pst = compute_jost_table(SystemKind::AknsPS, ps, sp, opts);

    Complex emu2 = std::exp(0.5 * kI * gauge.mu);
    JostRelationReport rep;

    auto resid = [](double& slot, const Vec2c& lhs, const Vec2c& rhs) {
        double scale = std::max(1.0, std::max(lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff()));
        slot = std::max(slot, (lhs - rhs).cwiseAbs().maxCoeff() / scale);
    };

    for (int i = 0; i < g.n; ++i) {
        std::size_t k = static_cast<std::size_t>(i);
        Complex E = gauge.E.values[k];
        Complex q = p.q.values[k];
        Complex r = p.r.values[k];
        Complex z = sp.zeta;

        auto dEm = [&](const Vec2c& v, Complex pre) { return Vec2c(pre * v[0] / E, pre * v[1] * E); };
        resid(rep.tilde_residual, gi.psi.values[k], dEm(kn.psi.values[k], 1.0 / emu2));
        resid(rep.tilde_residual, gi.psibar.values[k], dEm(kn.psibar.values[k], emu2));
        resid(rep.tilde_residual, gi.phi.values[k], dEm(kn.phi.values[k], 1.0));
        resid(rep.tilde_residual, gi.phibar.values[k], dEm(kn.phibar.values[k], 1.0));

        auto lowerA = [&](const Vec2c& v) {  // [[z, 0], [-r/2i, 1]]
            return Vec2c(z * v[0], -r / (2.0 * kI) * v[0] + v[1]);
        };
        auto lowerB = [&](const Vec2c& v) {  // [[1, 0], [-r/(2 i z), 1/z]]
            return Vec2c(v[0], -r / (2.0 * kI * z) * v[0] + v[1] / z);
        };
        resid(rep.uv_residual, gi.psi.values[k], lowerA(uvt.psi.values[k]));
        resid(rep.uv_residual, gi.psibar.values[k], lowerB(uvt.psibar.values[k]));
        resid(rep.uv_residual, gi.phi.values[k], lowerB(uvt.phi.values[k]));
        resid(rep.uv_residual, gi.phibar.values[k], lowerA(uvt.phibar.values[k]));

        auto upperA = [&](const Vec2c& v) {  // [[1/z, q/(2 i z)], [0, 1]]
            return Vec2c(v[0] / z + q / (2.0 * kI * z) * v[1], v[1]);
        };
        auto upperB = [&](const Vec2c& v) {  // [[1, q/2i], [0, z]]
            return Vec2c(v[0] + q / (2.0 * kI) * v[1], z * v[1]);
        };
        resid(rep.ps_residual, gi.psi.values[k], upperA(pst.psi.values[k]));
        resid(rep.ps_residual, gi.psibar.values[k], upperB(pst.psibar.values[k]));
        resid(rep.ps_residual, gi.phi.values[k], upperB(pst.phi.values[k]));
        resid(rep.ps_residual, gi.phibar.values[k], upperA(pst.phibar.values[k]));
    }
    return rep;
}

// Wronskian drift of the (psi, psibar) pair across the grid, relative to the
// midpoint value; should vanish for a trace-free system.
inline double wronskian_constancy(SystemKind kind, const PotentialPair& p, const SpectralPoint& sp,
                                  const OdeOptions& opts = {}) {
    JostSolution psi = integrate_jost(kind, p, sp, JostKind::Psi, opts);
    JostSolution psibar = integrate_jost(kind, p, sp, JostKind::PsiBar, opts);
    std::size_t n = psi.values.size();
    Complex ref = wronskian(psibar.modulated[n / 2], psi.modulated[n / 2]);
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dev = std::max(dev, std::abs(wronskian(psibar.modulated[i], psi.modulated[i]) - ref));
    }
    return dev / std::max(1e-300, std::abs(ref));
}

// Parity in zeta (odd: psi1, psibar2, phibar1, phi2; even: the rest),
// measured by integrating at +zeta and -zeta.
inline double parity_check(const PotentialPair& p, const SpectralPoint& sp,
                           const OdeOptions& opts = {}) {
    SpectralPoint sm{sp.lambda, -sp.zeta};
    double dev = 0.0;
    auto cmp = [&](JostKind which, bool first_odd) {
        Vec2c a = jost_modulated_at(SystemKind::GerdjikovIvanov, p, sp, which,
                                    p.grid().x_min + 0.5 * (p.grid().x_max - p.grid().x_min), opts);
        Vec2c b = jost_modulated_at(SystemKind::GerdjikovIvanov, p, sm, which,
                                    p.grid().x_min + 0.5 * (p.grid().x_max - p.grid().x_min), opts);
        Complex s1 = first_odd ? -b[0] : b[0];
        Complex s2 = first_odd ? b[1] : -b[1];
        dev = std::max(dev, std::abs(a[0] - s1));
        dev = std::max(dev, std::abs(a[1] - s2));
    };
    cmp(JostKind::Psi, true);      // psi1 odd, psi2 even
    cmp(JostKind::PsiBar, false);  // psibar1 even, psibar2 odd
    cmp(JostKind::Phi, false);     // phi1 even, phi2 odd
    cmp(JostKind::PhiBar, true);   // phibar1 odd, phibar2 even
    return dev;
}

struct AsymptoticsReport {
    // small-lambda limits (probed at lambda_small and 2*lambda_small)
    double small_T = 0, small_Tbar = 0, small_R = 0, small_Rbar = 0, small_L = 0, small_Lbar = 0;
    double small_order = 0;  // observed convergence order of the T limit
    // large-lambda rates
    double slope_T = 0;           // d log|T-1| / d log lambda, expect -1
    double slope_reflection = 0;  // d log|R| / d log zeta, expect <= -3
    // large-lambda Jost leading terms, max relative deviation
    double jost_leading = 0;
};

struct AsymptoticsOptions {
    OdeOptions ode;
    double lambda_small = 1e-3;
    std::vector<double> lambda_large = {8, 12, 18, 27, 40, 60};
    std::vector<double> lambda_reflection = {1.0, 1.35, 1.8, 2.4, 3.2};
    double reflection_floor = 1e-13;
    double lambda_jost = 40.0;
};

inline AsymptoticsReport asymptotics_check(const PotentialPair& p,
                                           const AsymptoticsOptions& opts = {}) {
    GaugeData gauge = compute_gauge(p);
    const Grid1D& g = p.grid();
    double h = g.spacing();
    std::size_t n = static_cast<std::size_t>(g.n);

    Complex emu2 = std::exp(0.5 * kI * gauge.mu);
    Complex emu = emu2 * emu2;
    std::vector<Complex> rEm2(n), qE2(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex E2 = gauge.E.values[i] * gauge.E.values[i];
        rEm2[i] = p.r.values[i] / E2;
        qE2[i] = p.q.values[i] * E2;
    }
    Complex int_rEm2 = integrate(rEm2, h);
    Complex int_qE2 = integrate(qE2, h);

    ScatteringOptions sopts;
    sopts.ode = opts.ode;
    AsymptoticsReport rep;

    // --- small lambda
    std::vector<double> lam_small{opts.lambda_small, 2.0 * opts.lambda_small};
    ScatteringData ds = scattering_coefficients(SystemKind::GerdjikovIvanov, p, lam_small, sopts);
    auto dev_at = [&](std::size_t i) {
        Complex z = std::sqrt(Complex(lam_small[i], 0.0));
        std::array<double, 6> d;
        d[0] = std::abs(ds.T[i] - emu2);
        d[1] = std::abs(ds.Tbar[i] - 1.0 / emu2);
        d[2] = std::abs(ds.R[i] / z - emu * int_rEm2);
        d[3] = std::abs(ds.Rbar[i] / z - int_qE2 / emu);
        d[4] = std::abs(ds.L[i] / z + int_qE2);
        d[5] = std::abs(ds.Lbar[i] / z + int_rEm2);
        return d;
    };
    auto d1 = dev_at(0), d2 = dev_at(1);
    rep.small_T = d1[0];
    rep.small_Tbar = d1[1];
    rep.small_R = d1[2];
    rep.small_Rbar = d1[3];
    rep.small_L = d1[4];
    rep.small_Lbar = d1[5];
    rep.small_order = (d1[0] > 1e-14 && d2[0] > 1e-14) ? std::log2(d2[0] / d1[0]) : 1.0;

    // --- large lambda transmission rate; identically-zero data (free
    // potential) decays faster than any power, report -inf
    auto slope_or_inf = [](const std::vector<double>& t, const std::vector<double>& v,
                           double floor) {
        try {
            return loglog_slope(t, v, floor);
        } catch (const NumericalError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    ScatteringData dl =
        scattering_coefficients(SystemKind::GerdjikovIvanov, p, opts.lambda_large, sopts);
    std::vector<double> absT1(dl.T.size());
    for (std::size_t i = 0; i < dl.T.size(); ++i) absT1[i] = std::abs(dl.T[i] - 1.0);
    rep.slope_T = slope_or_inf(opts.lambda_large, absT1, 1e-300);

    // --- reflection decay rate against zeta
    ScatteringData dr =
        scattering_coefficients(SystemKind::GerdjikovIvanov, p, opts.lambda_reflection, sopts);
    std::vector<double> zs(dr.R.size()), av(dr.R.size());
    for (std::size_t i = 0; i < dr.R.size(); ++i) {
        zs[i] = std::sqrt(opts.lambda_reflection[i]);
        av[i] = std::max({std::abs(dr.R[i]), std::abs(dr.Rbar[i]), std::abs(dr.L[i]),
                          std::abs(dr.Lbar[i])});
    }
    rep.slope_reflection = slope_or_inf(zs, av, opts.reflection_floor);

    // --- large-lambda Jost leading terms (Theorem-3.5 shape)
    {
        SpectralPoint sp = SpectralPoint::from_lambda(Complex(opts.lambda_jost, 0.0));
        double x_eval = g.x_min + 0.5 * (g.x_max - g.x_min);
        Complex q = p.q(x_eval), r = p.r(x_eval);
        Vec2c psi = jost_modulated_at(SystemKind::GerdjikovIvanov, p, sp, JostKind::Psi, x_eval,
                                      opts.ode);
        Vec2c phi = jost_modulated_at(SystemKind::GerdjikovIvanov, p, sp, JostKind::Phi, x_eval,
                                      opts.ode);
        Complex lam = sp.lambda;
        // psi1/zeta ~ e^{i lam x} q/(2 i lam): modulated psi1 ~ ... (phases removed)
        double dev = std::abs(psi[0] / sp.zeta - q / (2.0 * kI * lam));
        dev = std::max(dev, std::abs(phi[1] / sp.zeta - (-kI * r / (2.0 * lam))));
        rep.jost_leading = dev * std::abs(lam);  // scaled: deviation is O(1/lam^2)
    }
    return rep;
}

//------------------------------------------------------------------------------
// Bound states: zeros of a(lambda) = [phi; psi] in C+ by argument principle
// plus contour-centroid refinement (exact for a single zero of any
// multiplicity inside the contour).
//------------------------------------------------------------------------------

struct BoundState {
    Complex lambda;
    int multiplicity = 1;
};

struct SearchBox {
    double re_min, re_max, im_min, im_max;
};

struct BoundStateOptions {
    OdeOptions ode;
    double tol = 1e-8;           // centroid refinement radius target
    int boundary_samples = 16;   // initial samples per box edge
    double min_box = 0.15;       // subdivide until boxes are this small
    int max_zeros = 32;
};

namespace detail {

class WronskianEvaluator {
  public:
    WronskianEvaluator(const PotentialPair& p, const OdeOptions& opts)
        : p_(resampled(p)), opts_(opts) {
        x_eval_ = p.grid().x_min + 0.5 * (p.grid().x_max - p.grid().x_min);
    }
    Complex operator()(Complex lam) const {
        SpectralPoint sp = SpectralPoint::from_lambda(lam);
        Vec2c phi =
            jost_modulated_at(SystemKind::GerdjikovIvanov, p_, sp, JostKind::Phi, x_eval_, opts_);
        Vec2c psi =
            jost_modulated_at(SystemKind::GerdjikovIvanov, p_, sp, JostKind::Psi, x_eval_, opts_);
        return wronskian(phi, psi);
    }

  private:
    PotentialPair p_;  // values-only copy, cheap to evaluate in the ODE loop
    OdeOptions opts_;
    double x_eval_;
};

// Winding number and zero centroid from a closed polyline. Corner values are
// evaluated once (in parallel); segments refine until each phase increment
// drops below pi/2. The centroid weight uses the segment midpoint against the
// exact endpoint log-ratio, which for a single zero of any multiplicity
// inside converges to the zero itself.
template <class F>
int winding_number(const F& f, const std::vector<Complex>& pts, Complex* centroid = nullptr) {
    std::vector<Complex> fvals(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { fvals[i] = f(pts[i]); });

    double winding = 0.0;
    Complex centroid_sum{};
    struct Node {
        Complex z, fz;
    };
    for (std::size_t s = 0; s < pts.size(); ++s) {
        Node a{pts[s], fvals[s]};
        Node b{pts[(s + 1) % pts.size()], fvals[(s + 1) % pts.size()]};
        std::vector<std::pair<Node, Node>> stack{{a, b}};
        while (!stack.empty()) {
            auto [u, v] = stack.back();
            stack.pop_back();
            if (std::abs(u.fz) == 0.0 || std::abs(v.fz) == 0.0)
                throw NumericalError("bound-state search: zero on the contour");
            Complex ratio = v.fz / u.fz;
            double dphi = std::arg(ratio);
            if (std::abs(dphi) > 0.5 * kPi && std::abs(u.z - v.z) > 1e-13) {
                Node m{0.5 * (u.z + v.z), f(0.5 * (u.z + v.z))};
                stack.push_back({m, v});
                stack.push_back({u, m});
                continue;
            }
            winding += dphi / (2.0 * kPi);
            centroid_sum +=
                0.5 * (u.z + v.z) * (std::log(std::abs(ratio)) + kI * dphi) / (2.0 * kPi * kI);
        }
    }
    int wi = static_cast<int>(std::lround(winding));
    if (std::abs(winding - wi) > 0.25)
        throw NumericalError("bound-state search: non-integer winding " +
                             std::to_string(winding));
    if (centroid && wi != 0) *centroid = centroid_sum / static_cast<double>(wi);
    return wi;
}

inline std::vector<Complex> box_polyline(const SearchBox& b, int per_edge) {
    std::vector<Complex> pts;
    pts.reserve(static_cast<std::size_t>(4 * per_edge));
    auto edge = [&](Complex from, Complex to) {
        for (int i = 0; i < per_edge; ++i) {
            double t = static_cast<double>(i) / per_edge;
            pts.push_back(from + t * (to - from));
        }
    };
    Complex c1(b.re_min, b.im_min), c2(b.re_max, b.im_min), c3(b.re_max, b.im_max),
        c4(b.re_min, b.im_max);
    edge(c1, c2);
    edge(c2, c3);
    edge(c3, c4);
    edge(c4, c1);
    return pts;
}

inline std::vector<Complex> circle_polyline(Complex center, double radius, int count) {
    std::vector<Complex> pts(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        double th = 2.0 * kPi * i / count;
        pts[static_cast<std::size_t>(i)] = center + radius * Complex(std::cos(th), std::sin(th));
    }
    return pts;
}

}  // namespace detail

inline std::vector<BoundState> locate_bound_states(const PotentialPair& p, const SearchBox& box,
                                                   const std::vector<Complex>& guesses = {},
                                                   const BoundStateOptions& opts = {}) {
    if (box.im_min <= 0.0)
        throw ConfigError("locate_bound_states: search box must lie in Im(lambda) > 0");
    detail::WronskianEvaluator a(p, opts.ode);

    int total = detail::winding_number(a, detail::box_polyline(box, opts.boundary_samples));
    std::vector<BoundState> found;
    if (total == 0) return found;
    if (total > opts.max_zeros)
        throw NumericalError("locate_bound_states: too many zeros in the box");

    // contour-centroid refinement inside a circle around `center`; exact for
    // one distinct zero of any multiplicity, then Newton-polished when simple
    auto refine = [&](Complex center, double radius) -> std::optional<BoundState> {
        Complex c = center;
        double r = radius;
        int mult = 0;
        double r_stop = std::max({1e-6, 0.3 * opts.tol / 1.5e-3});
        for (int iter = 0; iter < 48; ++iter) {
            Complex centroid;
            int w = detail::winding_number(a, detail::circle_polyline(c, r, 48), &centroid);
            if (w == 0) {
                if (mult == 0) return std::nullopt;
                break;  // shrank past the cluster; the last centroid stands
            }
            // a multiple zero splits at the noise scale into nearby simple
            // zeros; once the winding drops the enclosing centroid (their
            // mean, which matches the true zero to first order) is the answer
            if (mult > 0 && w < mult) break;
            mult = w;
            double drift = std::abs(centroid - c);
            c = centroid;
            if (r <= r_stop && drift < 0.1 * r) break;
            r = std::max(std::min(0.3 * r + 2.0 * drift, radius), 0.5 * r_stop);
        }
        if (mult == 1) {
            // quadratic cleanup; derivative by central difference
            for (int it = 0; it < 3; ++it) {
                double d = std::max(1e-7, 1e-3 * std::abs(c));
                Complex fc = a(c);
                Complex fp = (a(c + d) - a(c - d)) / (2.0 * d);
                if (std::abs(fp) == 0.0) break;
                c -= fc / fp;
            }
        }
        return BoundState{c, mult};
    };

    // subdivide, propagating the winding to the sibling (shared edges cancel)
    struct WorkItem {
        SearchBox box;
        int winding;
    };
    std::vector<WorkItem> work{{box, total}};
    std::vector<std::pair<Complex, double>> clusters;
    for (const auto& g : guesses) clusters.push_back({g, std::max(100.0 * opts.tol, 1e-3)});

    while (!work.empty()) {
        auto [b, w] = work.back();
        work.pop_back();
        if (w == 0) continue;
        double dr = b.re_max - b.re_min, di = b.im_max - b.im_min;
        if (std::max(dr, di) <= opts.min_box) {
            clusters.push_back({Complex(0.5 * (b.re_min + b.re_max), 0.5 * (b.im_min + b.im_max)),
                                0.75 * std::max(dr, di)});
            continue;
        }
        SearchBox left, right;
        if (dr >= di) {
            double mid = 0.5 * (b.re_min + b.re_max) + 1e-4 * dr;  // nudge off symmetric zeros
            left = {b.re_min, mid, b.im_min, b.im_max};
            right = {mid, b.re_max, b.im_min, b.im_max};
        } else {
            double mid = 0.5 * (b.im_min + b.im_max) + 1e-4 * di;
            left = {b.re_min, b.re_max, b.im_min, mid};
            right = {b.re_min, b.re_max, mid, b.im_max};
        }
        int wl = detail::winding_number(a, detail::box_polyline(left, opts.boundary_samples));
        work.push_back({left, wl});
        work.push_back({right, w - wl});
    }

    int resolved = 0;
    for (const auto& [center, radius] : clusters) {
        bool duplicate = false;
        for (const auto& f : found)
            if (std::abs(f.lambda - center) < 4.0 * radius + 10.0 * opts.tol) duplicate = true;
        if (duplicate) continue;
        auto bs = refine(center, std::max(radius, 8.0 * opts.tol));
        if (bs) {
            found.push_back(*bs);
            resolved += bs->multiplicity;
        }
    }
    if (resolved != total) {
        std::string msg = "locate_bound_states: box winding " + std::to_string(total) +
                          " but resolved multiplicity " + std::to_string(resolved) + ";";
        for (const auto& f : found)
            msg += " (" + std::to_string(f.lambda.real()) + "," + std::to_string(f.lambda.imag()) +
                   ") x" + std::to_string(f.multiplicity);
        throw NumericalError(msg);
    }
    return found;
}

}  // namespace giscat
