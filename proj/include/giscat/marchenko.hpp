#pragma once

//==============================================================================
// The general inverse problem. Kernel functions
//   Omega(y)    = Rhat(y)    + C e^{iAy} B
//   Omegabar(y) = Rbarhat(y) + Cbar e^{-i Abar y} Bbar
// (with the exact triplet derivative and the lambda-weighted transform for
// the Fourier derivative) feed the coupled system
//   K1bar(x,y) = i  int_x^inf K1(x,z)    Omega'(z+y) dz
//   K1(x,y)  + Omegabar(x+y) + int_x^inf K1bar(x,z) Omegabar(z+y) dz = 0
//   K2bar(x,y) + Omega(x+y)  + int_x^inf K2(x,z)    Omega(z+y)    dz = 0
//   K2(x,y)    = -i int_x^inf K2bar(x,z) Omegabar'(z+y) dz
// which uncouples into two second-kind Fredholm equations for K1 and K2bar
// with iterated kernel G(z,y) = +-i int_x^inf Om'(z+s) Ombar(s+y) ds.
//
// Discretization: one uniform lattice holds anchors, y-nodes and the doubled
// grid of argument sums, so every integral is a composite Simpson sum over
// lattice values. The Nystrom matrix entry needs
//   F[k][j] = sum_m wtilde_m a[k+m] b[j+m]
// with the (1,4,2,...,4,1) Simpson pattern; since the pattern is 2-periodic
// in the interior, F satisfies the O(1) diagonal recurrence
//   F[k][j] = F[k-2][j-2] - a[k-2]b[j-2] - 4a[k-1]b[j-1] - a[k]b[j]
//             + a[k+M-2]b[j+M-2] + 4a[k+M-1]b[j+M-1] + a[k+M]b[j+M]
// so the whole matrix assembles in O(n^2) instead of O(n^3). The dense solve
// goes through LAPACK (zgetrf/zgecon/zgetrs).
//==============================================================================

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "giscat/core.hpp"
#include "giscat/direct.hpp"
#include "giscat/grid.hpp"
#include "giscat/numerics.hpp"
#include "giscat/potentials.hpp"
#include "giscat/triplets.hpp"

namespace giscat {

struct ReflectionSamples {
    std::vector<double> lambda;             // uniform, ascending, excluding 0
    std::vector<Complex> R_over_zeta;
    std::vector<Complex> Rbar_over_zeta;
};

inline ReflectionSamples reflection_samples(const ScatteringData& data) {
    ReflectionSamples s;
    s.lambda = data.lambda;
    s.R_over_zeta.resize(data.lambda.size());
    s.Rbar_over_zeta.resize(data.lambda.size());
    for (std::size_t i = 0; i < data.lambda.size(); ++i) {
        Complex z = std::sqrt(Complex(data.lambda[i], 0.0));
        s.R_over_zeta[i] = data.R[i] / z;
        s.Rbar_over_zeta[i] = data.Rbar[i] / z;
    }
    return s;
}

struct FourierOptions {
    double tail_tol = 1e-4;   // bound on the neglected |lambda| > Lambda tails
    bool check_tail = true;
};

namespace detail {

// C/lambda^2 envelope fitted at the grid edges; integrated tail of both ends.
inline double fourier_tail_estimate(const ReflectionSamples& s) {
    if (s.lambda.size() < 4) return 0.0;
    double edge = 0.0;
    for (std::size_t i : {std::size_t{0}, std::size_t{1}, s.lambda.size() - 2,
                          s.lambda.size() - 1}) {
        double lam = std::abs(s.lambda[i]);
        double v = std::max(std::abs(s.R_over_zeta[i]), std::abs(s.Rbar_over_zeta[i]));
        edge = std::max(edge, v * lam * lam);
    }
    double Lam = std::min(std::abs(s.lambda.front()), std::abs(s.lambda.back()));
    return edge / (kPi * std::max(Lam, 1e-12));
}

// (1/2pi) int w(lambda) v(lambda) e^{sign * i lambda y} dlambda by Simpson,
// with w = 1 or w = lambda (the derivative transform).
inline std::vector<Complex> oscillatory_transform(const std::vector<double>& lam,
                                                  const std::vector<Complex>& v,
                                                  const std::vector<double>& ys, double sign,
                                                  bool lambda_weight) {
    if (lam.size() != v.size() || lam.size() < 3)
        throw ConfigError("fourier_reflection: bad sample arrays");
    double h = lam[1] - lam[0];
    auto w = simpson_weights(lam.size(), h);
    std::vector<Complex> out(ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) {
        Complex acc{};
        double y = ys[j];
        for (std::size_t k = 0; k < lam.size(); ++k) {
            Complex f = v[k];
            if (lambda_weight) f *= lam[k];
            acc += w[k] * f * std::exp(kI * Complex(sign * lam[k] * y, 0.0));
        }
        out[j] = acc / (2.0 * kPi);
    }
    return out;
}

}  // namespace detail

struct FourierHats {
    std::vector<Complex> Rhat, Rbarhat;
};

// Rhat(y) = (1/2pi) int (R/zeta) e^{+i lambda y} dlambda and the barred
// analogue with e^{-i lambda y}.
inline FourierHats fourier_reflection(const ReflectionSamples& s, const std::vector<double>& ys,
                                      const FourierOptions& opts = {}) {
    if (opts.check_tail) {
        double tail = detail::fourier_tail_estimate(s);
        if (tail > opts.tail_tol)
            throw NumericalError("fourier_reflection: insufficient lambda decay, tail estimate " +
                                 std::to_string(tail));
    }
    FourierHats out;
    out.Rhat = detail::oscillatory_transform(s.lambda, s.R_over_zeta, ys, +1.0, false);
    out.Rbarhat = detail::oscillatory_transform(s.lambda, s.Rbar_over_zeta, ys, -1.0, false);
    return out;
}

struct MarchenkoKernel {
    double y0 = 0.0;  // first doubled-grid abscissa
    double h = 0.0;
    std::vector<Complex> Om, Ombar, OmP, OmbarP;  // sampled at y0 + j h
    bool has_fourier = false;
    bool has_triplets = false;

    std::size_t size() const { return Om.size(); }
    double node(std::size_t j) const { return y0 + h * static_cast<double>(j); }
    bool conjugate_symmetric = false;
};

// Samples Omega, Omegabar and their derivatives on the doubled lattice
// [y_min, y_max] with spacing h. `refl` may be null (reflectionless data).
inline MarchenkoKernel assemble_kernels(const ReflectionSamples* refl, const TripletPair& tp,
                                        double y_min, double y_max, double h,
                                        const FourierOptions& fopts = {}) {
    if (!(h > 0.0) || !(y_max > y_min)) throw ConfigError("assemble_kernels: bad lattice");
    std::size_t len = static_cast<std::size_t>(std::llround((y_max - y_min) / h)) + 1;
    MarchenkoKernel k;
    k.y0 = y_min;
    k.h = h;
    k.Om.assign(len, Complex{});
    k.Ombar.assign(len, Complex{});
    k.OmP.assign(len, Complex{});
    k.OmbarP.assign(len, Complex{});

    if (refl && !refl->lambda.empty()) {
        k.has_fourier = true;
        std::vector<double> ys(len);
        for (std::size_t j = 0; j < len; ++j) ys[j] = k.node(j);
        if (fopts.check_tail) {
            double tail = detail::fourier_tail_estimate(*refl);
            if (tail > fopts.tail_tol)
                throw NumericalError(
                    "assemble_kernels: insufficient lambda decay, tail estimate " +
                    std::to_string(tail));
        }
        auto rh = detail::oscillatory_transform(refl->lambda, refl->R_over_zeta, ys, +1.0, false);
        auto rbh = detail::oscillatory_transform(refl->lambda, refl->Rbar_over_zeta, ys, -1.0, false);
        // derivative transforms per the lambda-weighted form
        auto rhp = detail::oscillatory_transform(refl->lambda, refl->R_over_zeta, ys, +1.0, true);
        auto rbhp = detail::oscillatory_transform(refl->lambda, refl->Rbar_over_zeta, ys, -1.0, true);
        for (std::size_t j = 0; j < len; ++j) {
            k.Om[j] += rh[j];
            k.Ombar[j] += rbh[j];
            k.OmP[j] += kI * rhp[j];
            k.OmbarP[j] += -kI * rbhp[j];
        }
    }

    const auto& T = tp.unbarred;
    const auto& Tb = tp.barred;
    if (T.dim() > 0 || Tb.dim() > 0) k.has_triplets = true;
    for (std::size_t j = 0; j < len; ++j) {
        double y = k.node(j);
        if (T.dim() > 0) {
            Eigen::MatrixXcd E = matrix_exponential(T.A, kI * y);
            k.Om[j] += (T.C * E * T.B).value();
            k.OmP[j] += (kI * T.C * T.A * E * T.B).value();
        }
        if (Tb.dim() > 0) {
            Eigen::MatrixXcd E = matrix_exponential(Tb.A, -kI * y);
            k.Ombar[j] += (Tb.C * E * Tb.B).value();
            k.OmbarP[j] += (-kI * Tb.C * Tb.A * E * Tb.B).value();
        }
    }

    // detect Omegabar == conj(Omega): lets the solver reuse one factorization
    double scale = 0.0, dev = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
        scale = std::max(scale, std::abs(k.Om[j]));
        dev = std::max(dev, std::abs(k.Ombar[j] - std::conj(k.Om[j])));
        dev = std::max(dev, std::abs(k.OmbarP[j] - std::conj(k.OmP[j])));
    }
    k.conjugate_symmetric = (dev <= 1e-13 * std::max(scale, 1.0));
    return k;
}

struct MarchenkoSlice {
    double x = 0.0;
    double h = 0.0;
    std::vector<Complex> K1, K2, K1bar, K2bar;  // K(x, y_j), y_j = x + j h
    std::string warning;

    std::size_t size() const { return K1.size(); }
    double y(std::size_t j) const { return x + h * static_cast<double>(j); }
};

struct MarchenkoSolveOptions {
    double rcond_floor = 1e-13;
    double tail_warn_ratio = 1e-9;
};

namespace detail {

// F[k][j] = sum_m wtilde_m a[k+m] b[j+m] over the anchor window, with the
// Simpson pattern wtilde = (1,4,2,...,4,1); O(n^2) via the diagonal
// recurrence (column-major storage).
inline Eigen::MatrixXcd simpson_correlation(const std::vector<Complex>& a,
                                            const std::vector<Complex>& b, std::size_t base,
                                            std::size_t n) {
    const std::size_t M = n - 1;  // even
    if (base + 2 * M >= a.size() || base + 2 * M >= b.size())
        throw ConfigError("simpson_correlation: kernel arrays too short");
    Eigen::MatrixXcd F(n, n);
    auto direct = [&](std::size_t k, std::size_t j) {
        Complex acc = a[base + k] * b[base + j] + a[base + k + M] * b[base + j + M];
        for (std::size_t m = 1; m < M; ++m) {
            double wt = (m % 2 == 1) ? 4.0 : 2.0;
            acc += wt * a[base + k + m] * b[base + j + m];
        }
        return acc;
    };
    if (n <= 4) {
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) F(k, j) = direct(k, j);
        return F;
    }
    for (std::size_t j = 0; j < n; ++j) {
        F(0, j) = direct(0, j);
        F(1, j) = direct(1, j);
    }
    for (std::size_t k = 2; k < n; ++k) {
        F(k, 0) = direct(k, 0);
        F(k, 1) = direct(k, 1);
    }
    const Complex* A = a.data() + base;
    const Complex* B = b.data() + base;
    for (std::size_t j = 2; j < n; ++j) {
        for (std::size_t k = 2; k < n; ++k) {
            F(k, j) = F(k - 2, j - 2) - A[k - 2] * B[j - 2] - 4.0 * A[k - 1] * B[j - 1] -
                      A[k] * B[j] + A[k + M - 2] * B[j + M - 2] +
                      4.0 * A[k + M - 1] * B[j + M - 1] + A[k + M] * B[j + M];
        }
    }
    return F;
}

inline void lapack_solve_inplace(Eigen::MatrixXcd& A, Eigen::VectorXcd& rhs, double rcond_floor,
                                 const char* what) {
    lapack_int n = static_cast<lapack_int>(A.rows());
    std::vector<lapack_int> piv(static_cast<std::size_t>(n));
    double anorm = LAPACKE_zlange(LAPACK_COL_MAJOR, '1', n, n,
                                  reinterpret_cast<const lapack_complex_double*>(A.data()), n);
    lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n,
                                     reinterpret_cast<lapack_complex_double*>(A.data()), n,
                                     piv.data());
    if (info != 0) throw NumericalError(std::string(what) + ": singular Nystrom matrix");
    double rcond = 0.0;
    LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n,
                   reinterpret_cast<const lapack_complex_double*>(A.data()), n, anorm, &rcond);
    if (!(rcond > rcond_floor))
        throw NumericalError(std::string(what) + ": Nystrom matrix ill-conditioned, rcond " +
                             std::to_string(rcond));
    LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, 1,
                   reinterpret_cast<const lapack_complex_double*>(A.data()), n, piv.data(),
                   reinterpret_cast<lapack_complex_double*>(rhs.data()), n);
}

}  // namespace detail

// Solve the Marchenko system at anchor x with y running to y_max on the
// kernel lattice. The anchor and y_max must sit on that lattice.
inline MarchenkoSlice solve_marchenko(const MarchenkoKernel& kernel, double x, double y_max,
                                      const MarchenkoSolveOptions& opts = {}) {
    double h = kernel.h;
    double bpos = (2.0 * x - kernel.y0) / h;
    std::size_t base = static_cast<std::size_t>(std::llround(bpos));
    if (std::abs(bpos - static_cast<double>(base)) > 1e-6)
        throw ConfigError("solve_marchenko: anchor x off the kernel lattice");
    std::size_t n = static_cast<std::size_t>(std::llround((y_max - x) / h)) + 1;
    if (n < 5) throw ConfigError("solve_marchenko: y range too short");
    if ((n - 1) % 2 != 0) ++n;  // keep an even interval count for pure Simpson
    if (base + 2 * (n - 1) >= kernel.size())
        throw ConfigError("solve_marchenko: kernel lattice does not cover 2*y_max");

    const std::size_t M = n - 1;
    auto wt = [&](std::size_t m) -> double {
        if (m == 0 || m == M) return 1.0;
        return (m % 2 == 1) ? 4.0 : 2.0;
    };
    double h3 = h / 3.0;

    MarchenkoSlice out;
    out.x = x;
    out.h = h;

    // tail decay diagnostic over this anchor's window
    {
        double peak = 0.0;
        for (std::size_t j = 0; j <= 2 * M; ++j)
            peak = std::max(peak, std::max(std::abs(kernel.Om[base + j]),
                                           std::abs(kernel.Ombar[base + j])));
        double tail = std::max(std::abs(kernel.Om[base + 2 * M]),
                               std::abs(kernel.Ombar[base + 2 * M]));
        if (peak > 0.0 && tail > opts.tail_warn_ratio * peak)
            out.warning = "kernel tail ratio " + std::to_string(tail / peak) +
                          " at y_max; truncation may dominate";
    }

    // K1 equation: (I + i G) K1 = -Ombar(x+y), G[j][k] = w_k (h3^2) F1[k][j]
    Eigen::MatrixXcd F1 = detail::simpson_correlation(kernel.OmP, kernel.Ombar, base, n);
    Eigen::MatrixXcd A1(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            A1(j, k) = ((j == k) ? 1.0 : 0.0) + kI * h3 * h3 * wt(k) * F1(k, j);
    Eigen::VectorXcd rhs1(n);
    for (std::size_t j = 0; j < n; ++j) rhs1[j] = -kernel.Ombar[base + j];
    detail::lapack_solve_inplace(A1, rhs1, opts.rcond_floor, "solve_marchenko[K1]");
    out.K1.assign(rhs1.data(), rhs1.data() + n);

    if (kernel.conjugate_symmetric) {
        out.K2bar.resize(n);
        for (std::size_t j = 0; j < n; ++j) out.K2bar[j] = std::conj(out.K1[j]);
    } else {
        Eigen::MatrixXcd F2 = detail::simpson_correlation(kernel.OmbarP, kernel.Om, base, n);
        Eigen::MatrixXcd A2(n, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                A2(j, k) = ((j == k) ? 1.0 : 0.0) - kI * h3 * h3 * wt(k) * F2(k, j);
        Eigen::VectorXcd rhs2(n);
        for (std::size_t j = 0; j < n; ++j) rhs2[j] = -kernel.Om[base + j];
        detail::lapack_solve_inplace(A2, rhs2, opts.rcond_floor, "solve_marchenko[K2bar]");
        out.K2bar.assign(rhs2.data(), rhs2.data() + n);
    }

    // recover the coupled pair: K1bar = +i int K1 Om', K2 = -i int K2bar Ombar'
    out.K1bar.assign(n, Complex{});
    out.K2.assign(n, Complex{});
    for (std::size_t j = 0; j < n; ++j) {
        Complex acc1{}, acc2{};
        for (std::size_t k = 0; k < n; ++k) {
            double w = h3 * wt(k);
            acc1 += w * out.K1[k] * kernel.OmP[base + k + j];
            acc2 += w * out.K2bar[k] * kernel.OmbarP[base + k + j];
        }
        out.K1bar[j] = kI * acc1;
        out.K2[j] = -kI * acc2;
    }
    return out;
}

// Max residual of the coupled system (all four equations) over the slice;
// an a-posteriori check independent of the uncoupled solve path.
inline double marchenko_residual(const MarchenkoKernel& kernel, const MarchenkoSlice& s) {
    std::size_t n = s.size();
    std::size_t base = static_cast<std::size_t>(std::llround((2.0 * s.x - kernel.y0) / kernel.h));
    const std::size_t M = n - 1;
    auto wt = [&](std::size_t m) -> double {
        if (m == 0 || m == M) return 1.0;
        return (m % 2 == 1) ? 4.0 : 2.0;
    };
    double h3 = kernel.h / 3.0;
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        Complex i1{}, i2{}, i3{}, i4{};
        for (std::size_t k = 0; k < n; ++k) {
            double w = h3 * wt(k);
            i1 += w * s.K1[k] * kernel.OmP[base + k + j];
            i2 += w * s.K1bar[k] * kernel.Ombar[base + k + j];
            i3 += w * s.K2[k] * kernel.Om[base + k + j];
            i4 += w * s.K2bar[k] * kernel.OmbarP[base + k + j];
        }
        worst = std::max(worst, std::abs(s.K1bar[j] - kI * i1));
        worst = std::max(worst, std::abs(s.K1[j] + kernel.Ombar[base + j] + i2));
        worst = std::max(worst, std::abs(s.K2bar[j] + kernel.Om[base + j] + i3));
        worst = std::max(worst, std::abs(s.K2[j] + kI * i4));
    }
    return worst;
}

struct RecoveredPotentials {
    PotentialPair pair;
    GaugeData gauge;
    double max_diag_residual = 0.0;  // (5.36)-(5.37) difference identity
    std::vector<std::string> warnings;
};

struct RecoverOptions {
    MarchenkoSolveOptions solve;
    int threads = 0;
};

// Potentials, gauge data and diagnostics from per-anchor Marchenko solves
// over every node of `grid` (q = -2 K1(x,x), r = -2 K2bar(x,x)).
inline RecoveredPotentials recover_potentials(const MarchenkoKernel& kernel, const Grid1D& grid,
                                              double y_max, const RecoverOptions& opts = {}) {
    std::size_t n = static_cast<std::size_t>(grid.n);
    if (std::abs(grid.spacing() - kernel.h) > 1e-9 * kernel.h)
        throw ConfigError("recover_potentials: grid spacing must match the kernel lattice");

    std::vector<Complex> q(n), r(n), P(n), diag(n);
    std::vector<std::string> warnings(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            MarchenkoSlice s =
                solve_marchenko(kernel, grid.node(static_cast<int>(i)), y_max, opts.solve);
            q[i] = -2.0 * s.K1[0];
            r[i] = -2.0 * s.K2bar[0];
            P[i] = s.K1[0] * s.K2bar[0];
            diag[i] = s.K2[0] - s.K1bar[0] + 0.25 * kI * q[i] * r[i];
            warnings[i] = s.warning;
        },
        opts.threads);

    RecoveredPotentials out{PotentialPair(SampledField(grid, q), SampledField(grid, r)),
                            GaugeData{},
                            0.0,
                            {}};
    double hh = grid.spacing();
    out.gauge.mu = 4.0 * integrate(P, hh);
    auto cum = cumulative_integral(P, hh);
    std::vector<Complex> E(n);
    for (std::size_t i = 0; i < n; ++i) E[i] = std::exp(2.0 * kI * cum[i]);
    out.gauge.E = SampledField(grid, std::move(E));
    auto rp = derivative_4th(r, hh);
    std::vector<Complex> sig(n);
    for (std::size_t i = 0; i < n; ++i)
        sig[i] = -0.5 * kI * q[i] * rp[i] - 0.25 * q[i] * q[i] * r[i] * r[i];
    out.gauge.sigma = SampledField(grid, std::move(sig));

    for (std::size_t i = 0; i < n; ++i)
        out.max_diag_residual = std::max(out.max_diag_residual, std::abs(diag[i]));
    for (auto& w : warnings)
        if (!w.empty()) {
            out.warnings.push_back(w);
            break;  // one representative warning is enough
        }
    return out;
}

// Jost solutions at the slice anchor by quadrature of the kernels:
//   psi1 = zeta int K1 e^{i lam y} dy, psi2 = e^{i lam x} + int K2 e^{i lam y} dy, etc.
inline std::pair<Eigen::Vector2cd, Eigen::Vector2cd> reconstruct_jost(const MarchenkoSlice& s,
                                                                      Complex zeta,
                                                                      std::string* warning = nullptr) {
    Complex lam = zeta * zeta;
    if (warning && std::abs(lam) * s.h > 0.5)
        *warning = "reconstruct_jost: oscillation under-resolved on the y lattice";
    std::size_t n = s.size();
    auto w = simpson_weights(n, s.h);
    Complex I1{}, I2{}, I1b{}, I2b{};
    for (std::size_t j = 0; j < n; ++j) {
        Complex ep = std::exp(kI * lam * s.y(j));
        I1 += w[j] * s.K1[j] * ep;
        I2 += w[j] * s.K2[j] * ep;
        I1b += w[j] * s.K1bar[j] / ep;
        I2b += w[j] * s.K2bar[j] / ep;
    }
    Complex ph = std::exp(kI * lam * s.x);
    Eigen::Vector2cd psi(zeta * I1, ph + I2);
    Eigen::Vector2cd psibar(1.0 / ph + I1b, zeta * I2b);
    return {psi, psibar};
}

}  // namespace giscat
