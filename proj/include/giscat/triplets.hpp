#pragma once

// Matrix-triplet encoding of bound states. A triplet (A, B, C) packs pole
// locations and multiplicities into Jordan blocks:
//   A = blkdiag(A_j) with A_j the m_j x m_j Jordan block at lambda_j,
//   B = stacked (0,...,0,1)^T blocks,
//   C = concatenated rows of normalization constants (leading constant first).
// The pair (M, Mbar) solves
//   i M Abar - i A M = B Cbar,   i Abar Mbar - i Mbar A = Bbar C,
// equivalently M = int_0^inf e^{iAz} B Cbar e^{-i Abar z} dz when the spectra
// of A and Abar sit in the upper/lower half planes.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "giscat/core.hpp"

namespace giscat {

enum class HalfPlane { Upper, Lower };

struct BoundStateEntry {
    Complex lambda;
    int multiplicity = 1;
    std::vector<Complex> norm_constants;  // c_{j0} .. c_{j(m_j-1)}
};

struct BoundStateSpec {
    std::vector<BoundStateEntry> entries;
    HalfPlane half_plane = HalfPlane::Upper;
    bool require_nonzero_leading = false;
};

struct MatrixTriplet {
    Eigen::MatrixXcd A;
    Eigen::VectorXcd B;
    Eigen::RowVectorXcd C;
    HalfPlane half_plane = HalfPlane::Upper;
    bool canonical = true;  // false for user-supplied non-Jordan triplets

    int dim() const { return static_cast<int>(A.rows()); }
    bool empty() const { return dim() == 0; }

    static MatrixTriplet empty_triplet(HalfPlane hp) {
        MatrixTriplet t;
        t.A.resize(0, 0);
        t.B.resize(0);
        t.C.resize(0);
        t.half_plane = hp;
        return t;
    }
};

inline void validate_half_plane(const Eigen::MatrixXcd& A, HalfPlane hp, const char* what) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
    for (int i = 0; i < A.rows(); ++i) {
        double im = es.eigenvalues()[i].imag();
        if ((hp == HalfPlane::Upper && im <= 0.0) || (hp == HalfPlane::Lower && im >= 0.0))
            throw ConfigError(std::string(what) + ": eigenvalue off the declared half plane");
    }
}

inline MatrixTriplet build_triplet(const BoundStateSpec& spec) {
    int total = 0;
    for (std::size_t j = 0; j < spec.entries.size(); ++j) {
        const auto& e = spec.entries[j];
        if (e.multiplicity < 1) throw ConfigError("build_triplet: multiplicity must be >= 1");
        if (static_cast<int>(e.norm_constants.size()) != e.multiplicity)
            throw ConfigError("build_triplet: norm constants length != multiplicity");
        double im = e.lambda.imag();
        if (spec.half_plane == HalfPlane::Upper ? im <= 0.0 : im >= 0.0)
            throw ConfigError("build_triplet: lambda on the wrong half plane");
        if (spec.require_nonzero_leading &&
            std::abs(e.norm_constants[static_cast<std::size_t>(e.multiplicity - 1)]) == 0.0)
            throw ConfigError("build_triplet: leading normalization constant is zero");
        for (std::size_t k = 0; k < j; ++k) {
            if (spec.entries[k].lambda == e.lambda)
                throw ConfigError("build_triplet: repeated bound-state lambda");
        }
        total += e.multiplicity;
    }

    MatrixTriplet t = MatrixTriplet::empty_triplet(spec.half_plane);
    t.A = Eigen::MatrixXcd::Zero(total, total);
    t.B = Eigen::VectorXcd::Zero(total);
    t.C = Eigen::RowVectorXcd::Zero(total);
    int off = 0;
    for (const auto& e : spec.entries) {
        int m = e.multiplicity;
        for (int k = 0; k < m; ++k) {
            t.A(off + k, off + k) = e.lambda;
            if (k + 1 < m) t.A(off + k, off + k + 1) = 1.0;
            // C_j = [c_{j(m-1)}, ..., c_{j0}]
            t.C(off + k) = e.norm_constants[static_cast<std::size_t>(m - 1 - k)];
        }
        t.B(off + m - 1) = 1.0;
        off += m;
    }
    return t;
}

struct TripletPair {
    MatrixTriplet unbarred;  // spectrum in C+ (poles of T)
    MatrixTriplet barred;    // spectrum in C-

    TripletPair()
        : unbarred(MatrixTriplet::empty_triplet(HalfPlane::Upper)),
          barred(MatrixTriplet::empty_triplet(HalfPlane::Lower)) {}
    TripletPair(MatrixTriplet up, MatrixTriplet down)
        : unbarred(std::move(up)), barred(std::move(down)) {
        if (unbarred.half_plane != HalfPlane::Upper || barred.half_plane != HalfPlane::Lower)
            throw ConfigError("TripletPair: wrong half-plane tags");
    }
};

// e^{A t}; exact for finite input, delegated to the Pade scaling-and-squaring
// implementation behind Eigen's matrix functions.
inline Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& A, Complex t) {
    if (A.rows() == 0) return Eigen::MatrixXcd(0, 0);
    if (!A.allFinite()) throw ConfigError("matrix_exponential: non-finite entries");
    return (A * t).exp();
}

namespace detail {

// Bartels-Stewart for A X - X B = F with complex Schur reductions.
inline Eigen::MatrixXcd solve_sylvester(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                        const Eigen::MatrixXcd& F) {
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.rows());
    if (n == 0 || m == 0) return Eigen::MatrixXcd(n, m);

    Eigen::ComplexSchur<Eigen::MatrixXcd> sa(A), sb(B);
    const Eigen::MatrixXcd& Ta = sa.matrixT();
    const Eigen::MatrixXcd& Tb = sb.matrixT();
    const Eigen::MatrixXcd& Ua = sa.matrixU();
    const Eigen::MatrixXcd& Ub = sb.matrixU();

    Eigen::MatrixXcd G = Ua.adjoint() * F * Ub;
    Eigen::MatrixXcd Y(n, m);

    double scale = std::max(Ta.norm(), Tb.norm());
    // Ta Y - Y Tb = G, both triangular: sweep columns left to right
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXcd rhs = G.col(j);
        for (int k = 0; k < j; ++k) rhs += Tb(k, j) * Y.col(k);
        Eigen::MatrixXcd Tshift = Ta;
        for (int i = 0; i < n; ++i) {
            Tshift(i, i) -= Tb(j, j);
            if (std::abs(Tshift(i, i)) < 1e-14 * std::max(1.0, scale))
                throw NumericalError("solve_sylvester: spectra of A and B overlap");
        }
        Y.col(j) = Tshift.triangularView<Eigen::Upper>().solve(rhs);
    }
    return Ua * Y * Ub.adjoint();
}

}  // namespace detail

// M and Mbar for a triplet pair, with a residual check against the defining
// Sylvester identities.
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> compute_M_pair(const TripletPair& tp) {
    const auto& A = tp.unbarred.A;
    const auto& B = tp.unbarred.B;
    const auto& C = tp.unbarred.C;
    const auto& Ab = tp.barred.A;
    const auto& Bb = tp.barred.B;
    const auto& Cb = tp.barred.C;

    // i M Ab - i A M = B Cb  <=>  A M - M Ab = i B Cb
    Eigen::MatrixXcd M = detail::solve_sylvester(A, Ab, kI * (B * Cb));
    // i Ab Mb - i Mb A = Bb C  <=>  Ab Mb - Mb A = -i Bb C
    Eigen::MatrixXcd Mb = detail::solve_sylvester(Ab, A, -kI * (Bb * C));

    if (M.size() > 0) {
        double resid = (kI * M * Ab - kI * A * M - B * Cb).norm();
        double scale = std::max(1.0, A.norm() * M.norm() + (B * Cb).norm());
        if (resid > 1e-12 * scale)
            throw NumericalError("compute_M_pair: Sylvester residual " + std::to_string(resid));
    }
    if (Mb.size() > 0) {
        double resid = (kI * Ab * Mb - kI * Mb * A - Bb * C).norm();
        double scale = std::max(1.0, Ab.norm() * Mb.norm() + (Bb * C).norm());
        if (resid > 1e-12 * scale)
            throw NumericalError("compute_M_pair: Sylvester residual " + std::to_string(resid));
    }
    return {std::move(M), std::move(Mb)};
}

}  // namespace giscat
