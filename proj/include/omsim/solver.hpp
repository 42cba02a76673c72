// solver.hpp — stability analysis, steady-state Lyapunov solvers, and
// symplectic spectra of covariance matrices.
//
// The steady state of du = A u dt + noise with diffusion Q satisfies
//   A V + V A^T = -Q.
// solve_lyapunov() solves this directly via Kronecker vectorization;
// integrate_lyapunov() reaches the same fixed point by propagating
// dV/dt = A V + V A^T + Q from V(0) = 0, so the two act as mutual checks.

#pragma once

#include "omsim/model.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace omsim {

// Thrown when a steady state is requested for a drift matrix that is not
// Hurwitz stable. Carries the spectral abscissa for diagnostics.
struct UnstableError : std::runtime_error {
    double margin;
    explicit UnstableError(double m)
        : std::runtime_error("no steady state: drift matrix is not Hurwitz stable "
                             "(max Re eigenvalue = " + std::to_string(m) + ")"),
          margin(m) {}
};

struct StabilityReport {
    bool stable = false;
    double margin = 0.0;  // max_k Re lambda_k; stable iff margin < 0
    std::vector<std::complex<double>> spectrum;
};

// Steady-state covariance matrix in the library's quadrature ordering.
struct CovarianceMatrix {
    Eigen::MatrixXd mat;
    int dim() const { return static_cast<int>(mat.rows()); }
    int modes() const { return dim() / 2; }
};

inline StabilityReport assess_stability(const DriftMatrix& A) {
    detail::require(A.mat.rows() == A.mat.cols() && A.mat.rows() > 0,
                    "assess_stability requires a non-empty square matrix");
    Eigen::EigenSolver<Eigen::MatrixXd> es(A.mat, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("assess_stability: eigenvalue iteration failed");
    StabilityReport r;
    r.spectrum.resize(A.mat.rows());
    for (int k = 0; k < A.mat.rows(); ++k) r.spectrum[k] = es.eigenvalues()(k);
    std::sort(r.spectrum.begin(), r.spectrum.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
              });
    r.margin = r.spectrum.back().real();  // sorted by real part, so back() is max
    r.stable = r.margin < 0.0;
    return r;
}

// Solve A V + V A^T = -Q by LU on the n^2 x n^2 system
// (I (x) A + A (x) I) vec(V) = -vec(Q). Throws UnstableError for non-Hurwitz
// drift; throws std::runtime_error if the solved V fails its residual check.
inline CovarianceMatrix solve_lyapunov(const DriftMatrix& A, const DiffusionMatrix& Q) {
    const int n = A.dim();
    detail::require(A.mat.cols() == n, "solve_lyapunov requires a square drift matrix");
    detail::require(Q.dim() == n, "solve_lyapunov: diffusion dimension mismatch");

    const StabilityReport st = assess_stability(A);
    if (!st.stable) throw UnstableError(st.margin);

    const Eigen::MatrixXd& Am = A.mat;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
    for (int j = 0; j < n; ++j) K.block(j * n, j * n, n, n) = Am;  // I (x) A
    for (int i = 0; i < n; ++i)                                    // A (x) I
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) K(i * n + k, j * n + k) += Am(i, j);

    const Eigen::MatrixXd Qm = Q.mat();
    Eigen::VectorXd rhs(n * n);
    for (int j = 0; j < n; ++j) rhs.segment(j * n, n) = -Qm.col(j);

    Eigen::VectorXd v = Eigen::PartialPivLU<Eigen::MatrixXd>(K).solve(rhs);
    Eigen::MatrixXd V(n, n);
    for (int j = 0; j < n; ++j) V.col(j) = v.segment(j * n, n);
    V = 0.5 * (V + V.transpose()).eval();

    const double qn = Qm.norm();
    const double resid = (Am * V + V * Am.transpose() + Qm).norm();
    const double rel = qn > 0.0 ? resid / qn : resid;
    if (!(rel < 1e-10)) {
        std::ostringstream msg;
        msg << "solve_lyapunov: residual " << rel
            << " exceeds 1e-10; system is singular or badly conditioned "
               "(stability margin " << st.margin << ")";
        throw std::runtime_error(msg.str());
    }
    return CovarianceMatrix{std::move(V)};
}

// Propagate dV/dt = A V + V A^T + Q from V(0) = 0 until the time derivative
// has Frobenius norm <= tol * ||Q||. Uses the exact flow
//   V(2t) = V(t) + M(t) V(t) M(t)^T,   M(t) = exp(A t),
// seeded by Taylor series over one short step, then doubled; entirely
// independent of the Kronecker solve above. Throws UnstableError for
// non-Hurwitz drift and std::runtime_error if t_final is reached without
// meeting tol.
inline CovarianceMatrix integrate_lyapunov(const DriftMatrix& A, const DiffusionMatrix& Q,
                                           double t_final, double tol) {
    const int n = A.dim();
    detail::require(A.mat.cols() == n, "integrate_lyapunov requires a square drift matrix");
    detail::require(Q.dim() == n, "integrate_lyapunov: diffusion dimension mismatch");
    detail::require(t_final > 0.0, "integrate_lyapunov requires t_final > 0");
    detail::require(tol > 0.0, "integrate_lyapunov requires tol > 0");

    const StabilityReport st = assess_stability(A);
    if (!st.stable) throw UnstableError(st.margin);

    const Eigen::MatrixXd& Am = A.mat;
    const Eigen::MatrixXd Qm = Q.mat();
    const double qn = Qm.norm();
    if (qn == 0.0) return CovarianceMatrix{Eigen::MatrixXd::Zero(n, n)};

    double amax = 0.0;
    for (const auto& ev : st.spectrum) amax = std::max(amax, std::abs(ev));
    double h = std::min(1.0 / (1024.0 * amax), t_final / 2.0);

    // Taylor seeds: M = exp(A h), V = sum_{k>=1} h^k/k! S_k with S_1 = Q and
    // S_{k+1} = A S_k + S_k A^T (the Taylor coefficients of V(t) at 0).
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd Mterm = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd S = Qm;
    double coef = h;
    for (int k = 1; k <= 64; ++k) {
        Mterm = (Mterm * Am * (h / k)).eval();
        M += Mterm;
        V += coef * S;
        const bool settled = Mterm.norm() <= 1e-18 * M.norm() &&
                             coef * S.norm() <= 1e-18 * std::max(V.norm(), qn * h);
        if (k > 4 && settled) break;
        S = (Am * S + S * Am.transpose()).eval();
        coef *= h / (k + 1);
    }

    double t = h;
    for (int iter = 0; iter < 128; ++iter) {
        const double resid = (Am * V + V * Am.transpose() + Qm).norm();
        if (resid <= tol * qn) {
            V = 0.5 * (V + V.transpose()).eval();
            return CovarianceMatrix{std::move(V)};
        }
        if (t >= t_final) {
            std::ostringstream msg;
            msg << "integrate_lyapunov: no convergence within t_final = " << t_final
                << " (residual " << resid / qn << " vs tol " << tol << ")";
            throw std::runtime_error(msg.str());
        }
        V = (V + M * V * M.transpose()).eval();
        V = 0.5 * (V + V.transpose()).eval();
        M = (M * M).eval();
        t *= 2.0;
    }
    throw std::runtime_error("integrate_lyapunov: doubling iteration limit reached");
}

// Symplectic form Omega = diag{[[0,1],[-1,0]], ...} for n_modes modes.
inline Eigen::MatrixXd symplectic_form(int n_modes) {
    detail::require(n_modes > 0, "symplectic_form requires n_modes > 0");
    Eigen::MatrixXd O = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        O(2 * k, 2 * k + 1) = 1.0;
        O(2 * k + 1, 2 * k) = -1.0;
    }
    return O;
}

// Symplectic eigenvalues of a (symmetric, even-dimensional) covariance
// matrix: the moduli of the eigenvalues of Omega V, which come in equal
// pairs; returns the n distinct values sorted ascending. A physical state
// has all values >= 1/2 in this convention.
inline Eigen::VectorXd symplectic_eigenvalues(const CovarianceMatrix& V) {
    const int dim = V.dim();
    detail::require(dim > 0 && dim % 2 == 0 && V.mat.cols() == dim,
                    "symplectic_eigenvalues requires a square even-dimensional matrix");
    const double sym = (V.mat - V.mat.transpose()).norm();
    detail::require(sym <= 1e-11 * std::max(1.0, V.mat.norm()),
                    "symplectic_eigenvalues requires a symmetric matrix");

    const int n = dim / 2;
    Eigen::EigenSolver<Eigen::MatrixXd> es(symplectic_form(n) * V.mat,
                                           /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("symplectic_eigenvalues: eigenvalue iteration failed");

    std::vector<double> moduli(dim);
    for (int k = 0; k < dim; ++k) moduli[k] = std::abs(es.eigenvalues()(k));
    std::sort(moduli.begin(), moduli.end());

    Eigen::VectorXd nu(n);
    for (int k = 0; k < n; ++k) {
        const double a = moduli[2 * k], b = moduli[2 * k + 1];
        if (std::abs(b - a) > 1e-9 * std::max(1.0, b)) {
            std::ostringstream msg;
            msg << "symplectic_eigenvalues: moduli do not pair up (" << a << " vs " << b
                << "); input is not a valid covariance matrix";
            throw std::runtime_error(msg.str());
        }
        nu(k) = 0.5 * (a + b);
    }
    return nu;
}

}  // namespace omsim
