// modes.hpp — hybrid mechanical mode decompositions and dark-mode detection.
//
// A "dark" mechanical mode is a normal mode of the phonon network that
// decouples from the cavity; its thermal noise then never reaches the optical
// channel, which pins the steady-state optomechanical entanglement to zero.
// Phase-dependent hopping (synthetic gauge flux) breaks the dark mode except
// at integer multiples of pi.

#pragma once

#include "omsim/model.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace omsim {

// A set of hybrid mechanical modes. Row k of `coefficients` holds the
// amplitudes c_kj in D_k = sum_j c_kj d_j; rows are orthonormal.
// `effective_couplings` are the cavity couplings of the hybrid modes,
// G_k = sum_j conj(c_kj) G_j. `frequencies` may be empty when the
// construction does not resolve them (pure coupling-basis splittings).
// `degenerate_fallback` marks results produced by a fallback construction
// where the primary one is undefined (hopping strength zero).
struct ModeDecomposition {
    Eigen::MatrixXcd coefficients;
    Eigen::VectorXd frequencies;
    Eigen::VectorXcd effective_couplings;
    bool degenerate_fallback = false;
};

// Bright/dark pair of two degenerate mechanical modes: the bright mode
// carries the full coupling sqrt(G1^2 + G2^2), the dark mode none.
inline ModeDecomposition bright_dark_two_mode(double G1, double G2) {
    const double n = std::hypot(G1, G2);
    detail::require(n > 0.0, "bright_dark_two_mode requires a non-zero coupling vector");
    ModeDecomposition dec;
    dec.coefficients.resize(2, 2);
    dec.coefficients << G1 / n, G2 / n,
                        G2 / n, -G1 / n;
    dec.effective_couplings.resize(2);
    dec.effective_couplings << (G1 * G1 + G2 * G2) / n, (G2 * G1 - G1 * G2) / n;
    return dec;
}

// Hopping-hybridized modes of two mechanical modes joined by one link of
// strength chi and phase Theta. Row 0 is the upper branch (frequency
// omega_+), row 1 the lower. For chi = 0 the construction is undefined;
// degenerate frequencies fall back to the bright/dark pair and split
// frequencies fall back to the bare modes, both flagged.
inline ModeDecomposition tilde_modes(const TwoModeParams& params) {
    params.validate();
    const TwoModeParams p = params.canonical();
    const std::complex<double> i(0.0, 1.0);

    if (p.chi == 0.0) {
        ModeDecomposition dec;
        const double scale = std::max({std::abs(p.omega1), std::abs(p.omega2), 1.0});
        if (std::abs(p.omega1 - p.omega2) <= 1e-12 * scale) {
            if (p.G1 == 0.0 && p.G2 == 0.0) {
                dec.coefficients = Eigen::MatrixXcd::Identity(2, 2);
                dec.effective_couplings = Eigen::VectorXcd::Zero(2);
            } else {
                dec = bright_dark_two_mode(p.G1, p.G2);
            }
            dec.frequencies.resize(2);
            dec.frequencies << p.omega1, p.omega2;
        } else {
            // bare modes, upper branch first
            const bool first_up = p.omega1 >= p.omega2;
            dec.coefficients = Eigen::MatrixXcd::Zero(2, 2);
            dec.coefficients(0, first_up ? 0 : 1) = 1.0;
            dec.coefficients(1, first_up ? 1 : 0) = 1.0;
            dec.frequencies.resize(2);
            dec.effective_couplings.resize(2);
            if (first_up) {
                dec.frequencies << p.omega1, p.omega2;
                dec.effective_couplings << p.G1, p.G2;
            } else {
                dec.frequencies << p.omega2, p.omega1;
                dec.effective_couplings << p.G2, p.G1;
            }
        }
        dec.degenerate_fallback = true;
        return dec;
    }

    const double rt = std::sqrt((p.omega1 - p.omega2) * (p.omega1 - p.omega2) +
                                4.0 * p.chi * p.chi);
    const double w_up = 0.5 * (p.omega1 + p.omega2 + rt);
    const double w_dn = 0.5 * (p.omega1 + p.omega2 - rt);
    const double delta = w_dn - p.omega1;  // strictly negative for chi > 0
    const double F = std::abs(delta) / std::sqrt(delta * delta + p.chi * p.chi);
    const double K = p.chi * F / delta;
    const std::complex<double> phase = std::exp(i * p.Theta);

    ModeDecomposition dec;
    dec.coefficients.resize(2, 2);
    dec.coefficients << F, -K * phase,
                        K * std::conj(phase), F;
    dec.frequencies.resize(2);
    dec.frequencies << w_up, w_dn;
    dec.effective_couplings.resize(2);
    dec.effective_couplings << F * p.G1 - std::conj(phase) * (K * p.G2),
                               F * p.G2 + phase * (K * p.G1);
    return dec;
}

// Hybrid modes of a degenerate N-mode network with uniform couplings and no
// hopping: one bright mode (row 0, uniform weights) and N-1 dark modes built
// from discrete-Fourier phase patterns. `effective_couplings` give the
// overlap with a uniform unit coupling vector: sqrt(N) for the bright row,
// zero for every dark row.
inline ModeDecomposition network_hybrid_modes(int N) {
    detail::require(N >= 2, "network_hybrid_modes requires N >= 2");
    const std::complex<double> i(0.0, 1.0);
    ModeDecomposition dec;
    dec.coefficients.resize(N, N);
    const double rn = 1.0 / std::sqrt(static_cast<double>(N));
    for (int j = 0; j < N; ++j) dec.coefficients(0, j) = rn;
    for (int l = 1; l < N; ++l)
        for (int j = 0; j < N; ++j) {
            // 1-based site index j+1, centred offset (N+1)/2
            const double arg = kTwoPi * ((j + 1) - 0.5 * (N + 1)) * l / N;
            dec.coefficients(l, j) = std::exp(i * arg) * rn;
        }
    dec.effective_couplings =
        dec.coefficients.conjugate() * Eigen::VectorXcd::Ones(N);
    return dec;
}

// Normal modes of the full mechanical network including hopping: diagonalize
// the single-particle Hamiltonian h (h_jj = omega_j, h_{j,j+1} =
// chi_j e^{i Theta_j}). Rows are ordered by ascending frequency; effective
// couplings follow the same convention as above.
inline ModeDecomposition hybrid_modes(const NetworkParams& params) {
    params.validate();
    const NetworkParams p = params.canonical();
    const int N = p.modes();
    const std::complex<double> i(0.0, 1.0);

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(N, N);
    for (int j = 0; j < N; ++j) h(j, j) = p.omega[j];
    for (int j = 0; j + 1 < N; ++j) {
        h(j, j + 1) = p.chi[j] * std::exp(i * p.Theta[j]);
        h(j + 1, j) = std::conj(h(j, j + 1));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hybrid_modes: eigenvalue iteration failed");

    ModeDecomposition dec;
    dec.coefficients = es.eigenvectors().adjoint();
    dec.frequencies = es.eigenvalues();
    Eigen::VectorXcd Gv(N);
    for (int j = 0; j < N; ++j) Gv(j) = p.G[j];
    dec.effective_couplings = dec.coefficients.conjugate() * Gv;
    return dec;
}

inline ModeDecomposition hybrid_modes(const TwoModeParams& params) {
    return hybrid_modes(to_network(params));
}

// True when the mechanical network hosts at least one mode decoupled from the
// cavity. Two routes: (a) a hybrid mode whose effective coupling magnitude
// falls below `tol`, or (b) a degenerate frequency pair, whose eigenspace can
// always be rotated to produce a decoupled combination. tol <= 0 selects the
// default 1e-6 * max_j |G_j|; with all couplings zero every mode is trivially
// dark.
inline bool dark_mode_present(const NetworkParams& params, double tol = 0.0) {
    params.validate();
    double gmax = 0.0;
    for (double g : params.G) gmax = std::max(gmax, std::abs(g));
    if (gmax == 0.0) return true;
    if (tol <= 0.0) tol = 1e-6 * gmax;

    const ModeDecomposition dec = hybrid_modes(params);
    const int N = params.modes();
    const double wscale = std::max(1.0, std::abs(dec.frequencies(N - 1)));
    for (int k = 0; k + 1 < N; ++k)
        if (dec.frequencies(k + 1) - dec.frequencies(k) <= 1e-9 * wscale) return true;
    for (int k = 0; k < N; ++k)
        if (std::abs(dec.effective_couplings(k)) < tol) return true;
    return false;
}

inline bool dark_mode_present(const TwoModeParams& params, double tol = 0.0) {
    return dark_mode_present(to_network(params), tol);
}

}  // namespace omsim
