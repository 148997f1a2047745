#pragma once

// Time evolution of the scattering data:
//   T, Tbar frozen;  R -> R e^{4 i zeta^4 t},  Rbar -> Rbar e^{-4 i zeta^4 t},
//   L -> L e^{-4 i zeta^4 t}, Lbar -> Lbar e^{4 i zeta^4 t}  (zeta^4 = lambda^2),
//   C(t) = C e^{4 i A^2 t},  Cbar(t) = Cbar e^{-4 i Abar^2 t},  A, B frozen.
// Snapshots of the potentials then come from the reflectionless formulas, and
// the Gerdjikov-Ivanov system
//   i q_t + q_xx + i q^2 r_x + (1/2) q^3 r^2 = 0
//   i r_t - r_xx + i q_x r^2 - (1/2) q^2 r^3 = 0
// is verified on snapshot triples with central differences in t and 4th-order
// differences in x.

#include <cmath>
#include <utility>
#include <vector>

#include "giscat/core.hpp"
#include "giscat/direct.hpp"
#include "giscat/grid.hpp"
#include "giscat/numerics.hpp"
#include "giscat/reflectionless.hpp"
#include "giscat/triplets.hpp"

namespace giscat {

inline TripletPair evolve_triplets(const TripletPair& tp, double t) {
    TripletPair out = tp;
    if (tp.unbarred.dim() > 0) {
        Eigen::MatrixXcd A2 = tp.unbarred.A * tp.unbarred.A;
        out.unbarred.C = tp.unbarred.C * matrix_exponential(A2, 4.0 * kI * t);
    }
    if (tp.barred.dim() > 0) {
        Eigen::MatrixXcd A2 = tp.barred.A * tp.barred.A;
        out.barred.C = tp.barred.C * matrix_exponential(A2, -4.0 * kI * t);
    }
    return out;
}

struct EvolvedData {
    ScatteringData data;
    double t = 0.0;
};

inline EvolvedData evolve_data(const ScatteringData& base, double t) {
    if (!std::isfinite(t)) throw ConfigError("evolve_data: non-finite time");
    EvolvedData out{base, t};
    for (std::size_t i = 0; i < base.lambda.size(); ++i) {
        double lam = base.lambda[i];
        Complex ph = std::exp(4.0 * kI * Complex(lam * lam * t, 0.0));
        out.data.R[i] = base.R[i] * ph;
        out.data.Rbar[i] = base.Rbar[i] / ph;
        out.data.L[i] = base.L[i] / ph;
        out.data.Lbar[i] = base.Lbar[i] * ph;
    }
    if (base.triplets) out.data.triplets = evolve_triplets(*base.triplets, t);
    return out;
}

inline PotentialPair soliton_snapshot(const TripletPair& tp, double t, const Grid1D& grid) {
    return reflectionless_potentials(evolve_triplets(tp, t), grid);
}

struct GiResidualReport {
    double res_q = 0.0;  // max-norm of the first equation
    double res_r = 0.0;  // max-norm of the second equation
    double max_residual() const { return std::max(res_q, res_r); }
};

// Residual of the system on three snapshots at t - delta, t, t + delta
// sharing one grid.
inline GiResidualReport gi_residual(const PotentialPair& minus, const PotentialPair& center,
                                    const PotentialPair& plus, double delta) {
    const Grid1D& g = center.grid();
    if (!minus.grid().same_as(g) || !plus.grid().same_as(g))
        throw ConfigError("gi_residual: snapshots must share one grid");
    double h = g.spacing();
    std::size_t n = static_cast<std::size_t>(g.n);

    auto q_xx = second_derivative_4th(center.q.values, h);
    auto r_xx = second_derivative_4th(center.r.values, h);
    auto q_x = derivative_4th(center.q.values, h);
    auto r_x = derivative_4th(center.r.values, h);

    GiResidualReport rep;
    for (std::size_t i = 0; i < n; ++i) {
        Complex q = center.q.values[i], r = center.r.values[i];
        Complex q_t = (plus.q.values[i] - minus.q.values[i]) / (2.0 * delta);
        Complex r_t = (plus.r.values[i] - minus.r.values[i]) / (2.0 * delta);
        Complex e1 = kI * q_t + q_xx[i] + kI * q * q * r_x[i] + 0.5 * q * q * q * r * r;
        Complex e2 = kI * r_t - r_xx[i] + kI * q_x[i] * r * r - 0.5 * q * q * r * r * r;
        rep.res_q = std::max(rep.res_q, std::abs(e1));
        rep.res_r = std::max(rep.res_r, std::abs(e2));
    }
    return rep;
}

}  // namespace giscat
