// test_support.hpp — shared fixtures: reference parameter sets, deterministic
// random draws, and independent oracles used to cross-check the library
// (a Hamiltonian-route drift construction and random Gaussian states built
// from explicit symplectic transformations).

#pragma once

#include "omsim/model.hpp"
#include "omsim/solver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

namespace omsim::test {

inline std::mt19937_64 make_rng(unsigned seed = 20260814u) { return std::mt19937_64(seed); }

// The workhorse parameter set used across the suite: two degenerate
// mechanical modes, symmetric coupling, quarter-flux hopping phase,
// red-sideband detuning.
inline TwoModeParams reference_two_mode() {
    TwoModeParams p;
    p.omega1 = p.omega2 = 1.0;
    p.G1 = p.G2 = 0.2;
    p.gamma1 = p.gamma2 = 1e-5;
    p.nbar1 = p.nbar2 = 100.0;
    p.chi = 0.1;
    p.Theta = std::numbers::pi / 2.0;
    p.Delta = 1.0;
    p.kappa = 0.2;
    return p;
}

// Uniform chain with the synthetic flux carried entirely by the first link
// (all later links real), the configuration whose dark modes are broken
// exactly when Theta1 is not an integer multiple of 2 pi.
inline NetworkParams reference_network(int N, double Theta1, double nbar = 10.0) {
    NetworkParams p;
    p.omega.assign(N, 1.0);
    p.G.assign(N, 0.2);
    p.gamma.assign(N, 1e-5);
    p.nbar.assign(N, nbar);
    p.chi.assign(N - 1, 0.1);
    p.Theta.assign(N - 1, 0.0);
    p.Theta[0] = Theta1;
    p.Delta = 1.0;
    p.kappa = 0.2;
    return p;
}

inline TwoModeParams random_two_mode(std::mt19937_64& rng) {
    auto uni = [&](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    };
    TwoModeParams p;
    p.omega1 = uni(0.6, 1.4);
    p.omega2 = uni(0.6, 1.4);
    p.G1 = uni(0.05, 0.3);
    p.G2 = uni(0.05, 0.3);
    p.chi = uni(0.0, 0.2);
    p.Theta = uni(0.0, 2.0 * std::numbers::pi);
    p.Delta = uni(0.3, 1.5);
    p.kappa = uni(0.1, 0.5);
    p.gamma1 = uni(1e-5, 1e-3);
    p.gamma2 = uni(1e-5, 1e-3);
    p.nbar1 = uni(0.0, 50.0);
    p.nbar2 = uni(0.0, 50.0);
    return p;
}

// Rejection-sample a parameter set whose drift is comfortably Hurwitz, so
// steady-state solves and time integration are well conditioned.
inline TwoModeParams random_stable_two_mode(std::mt19937_64& rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        TwoModeParams p = random_two_mode(rng);
        if (assess_stability(build_drift_two_mode(p)).margin < -5e-3) return p;
    }
    throw std::runtime_error("random_stable_two_mode: rejection sampling failed");
}

inline NetworkParams random_network(std::mt19937_64& rng, int N) {
    auto uni = [&](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    };
    NetworkParams p;
    for (int j = 0; j < N; ++j) {
        p.omega.push_back(uni(0.6, 1.4));
        p.G.push_back(uni(0.05, 0.3));
        p.gamma.push_back(uni(1e-5, 1e-3));
        p.nbar.push_back(uni(0.0, 50.0));
    }
    for (int j = 0; j + 1 < N; ++j) {
        p.chi.push_back(uni(0.0, 0.2));
        p.Theta.push_back(uni(0.0, 2.0 * std::numbers::pi));
    }
    p.Delta = uni(0.3, 1.5);
    p.kappa = uni(0.1, 0.5);
    return p;
}

// --- Hamiltonian-route drift oracle -------------------------------------------
//
// Independent construction of the drift matrix: write the quadratic
// Hamiltonian H = u^T M u / 2 of the linearized model, then apply Hamilton's
// equations with damping, A = Omega M - diag(damping). Shares no code with
// build_drift_network.

inline Eigen::MatrixXd drift_from_hamiltonian(const NetworkParams& p) {
    const int N = p.modes();
    const int dim = 2 * (N + 1);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);

    for (int j = 0; j < N; ++j) {
        M(2 * j, 2 * j) = p.omega[j];
        M(2 * j + 1, 2 * j + 1) = p.omega[j];
    }
    M(2 * N, 2 * N) = p.Delta;
    M(2 * N + 1, 2 * N + 1) = p.Delta;

    for (int j = 0; j + 1 < N; ++j) {
        const double c = p.chi[j] * std::cos(p.Theta[j]);
        const double s = p.chi[j] * std::sin(p.Theta[j]);
        const int xa = 2 * j, ya = 2 * j + 1, xb = 2 * j + 2, yb = 2 * j + 3;
        M(xa, xb) = M(xb, xa) = c;
        M(ya, yb) = M(yb, ya) = c;
        M(xa, yb) = M(yb, xa) = -s;
        M(ya, xb) = M(xb, ya) = s;
    }
    for (int j = 0; j < N; ++j) {
        M(2 * j, 2 * N) = 2.0 * p.G[j];
        M(2 * N, 2 * j) = 2.0 * p.G[j];
    }

    Eigen::MatrixXd damping = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j < N; ++j) {
        damping(2 * j, 2 * j) = p.gamma[j];
        damping(2 * j + 1, 2 * j + 1) = p.gamma[j];
    }
    damping(2 * N, 2 * N) = p.kappa;
    damping(2 * N + 1, 2 * N + 1) = p.kappa;

    return symplectic_form(N + 1) * M - damping;
}

// --- random Gaussian states ----------------------------------------------------

// Random symplectic matrix: layers of single-mode rotations and squeezers
// interleaved with two-mode mixers, every factor exactly symplectic.
inline Eigen::MatrixXd random_symplectic(int n_modes, std::mt19937_64& rng) {
    auto uni = [&](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    };
    const int dim = 2 * n_modes;
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(dim, dim);

    auto apply_single = [&](int m, double theta, double r) {
        Eigen::Matrix2d rot;
        rot << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
        Eigen::Matrix2d sq = Eigen::Vector2d(std::exp(r), std::exp(-r)).asDiagonal();
        Eigen::MatrixXd F = Eigen::MatrixXd::Identity(dim, dim);
        F.block<2, 2>(2 * m, 2 * m) = rot * sq;
        S = F * S;
    };
    auto apply_mixer = [&](int a, int b, double theta) {
        const double c = std::cos(theta), s = std::sin(theta);
        Eigen::MatrixXd F = Eigen::MatrixXd::Identity(dim, dim);
        F.block<2, 2>(2 * a, 2 * a) = c * Eigen::Matrix2d::Identity();
        F.block<2, 2>(2 * a, 2 * b) = s * Eigen::Matrix2d::Identity();
        F.block<2, 2>(2 * b, 2 * a) = -s * Eigen::Matrix2d::Identity();
        F.block<2, 2>(2 * b, 2 * b) = c * Eigen::Matrix2d::Identity();
        S = F * S;
    };

    for (int layer = 0; layer < 3; ++layer) {
        for (int m = 0; m < n_modes; ++m)
            apply_single(m, uni(0.0, 2.0 * std::numbers::pi), uni(-0.8, 0.8));
        for (int m = 0; m + 1 < n_modes; ++m)
            apply_mixer(m, m + 1, uni(0.0, 2.0 * std::numbers::pi));
    }
    return S;
}

// Random physical covariance: thermal core with symplectic eigenvalues in
// [1/2, 3], conjugated by a random symplectic.
inline CovarianceMatrix random_physical_covariance(int n_modes, std::mt19937_64& rng) {
    auto uni = [&](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    };
    Eigen::VectorXd d(2 * n_modes);
    for (int m = 0; m < n_modes; ++m) {
        const double nu = uni(0.5, 3.0);
        d(2 * m) = nu;
        d(2 * m + 1) = nu;
    }
    const Eigen::MatrixXd S = random_symplectic(n_modes, rng);
    Eigen::MatrixXd V = S * d.asDiagonal() * S.transpose();
    V = 0.5 * (V + V.transpose()).eval();
    return CovarianceMatrix{std::move(V)};
}

// Two-mode squeezed vacuum with squeezing parameter r: logarithmic
// negativity exactly 2r, symplectic eigenvalues both 1/2.
inline CovarianceMatrix tmsv_covariance(double r) {
    const double ch = 0.5 * std::cosh(2.0 * r), sh = 0.5 * std::sinh(2.0 * r);
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(4, 4);
    V(0, 0) = V(1, 1) = V(2, 2) = V(3, 3) = ch;
    V(0, 2) = V(2, 0) = sh;
    V(1, 3) = V(3, 1) = -sh;
    return CovarianceMatrix{std::move(V)};
}

}  // namespace omsim::test
