// model.hpp — system parameters plus drift/diffusion matrix assembly for a
// loop-coupled optomechanical system: one driven cavity mode and N mechanical
// modes in a chain with phase-dependent nearest-neighbour phonon hopping.
//
// All frequencies and rates are dimensionless ratios to a reference mechanical
// frequency. Quadrature ordering throughout the library is
//   [X_1, Y_1, ..., X_N, Y_N, X_c, Y_c]
// (mechanical modes first, cavity last). Vacuum quadrature variance is 1/2.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace omsim {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHBar = 1.054571817e-34;  // J s

// Reduce an angle to the canonical interval [0, 2*pi).
inline double reduce_phase(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;  // guard against round-up at the seam
    return r;
}

namespace detail {
inline void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}
}  // namespace detail

// Two mechanical modes coupled to one cavity, with a single hopping link
// closing the loop. The common special case; see NetworkParams for chains.
struct TwoModeParams {
    double omega1 = 1.0;  // mechanical frequencies
    double omega2 = 1.0;
    double G1 = 0.0;      // effective linearized optomechanical couplings
    double G2 = 0.0;
    double chi = 0.0;     // phonon-hopping strength, >= 0
    double Theta = 0.0;   // hopping phase
    double Delta = 0.0;   // effective cavity detuning
    double kappa = 0.0;   // cavity amplitude decay rate, > 0
    double gamma1 = 0.0;  // mechanical damping rates, > 0
    double gamma2 = 0.0;
    double nbar1 = 0.0;   // thermal phonon occupations, >= 0
    double nbar2 = 0.0;

    void validate() const {
        detail::require(kappa > 0.0, "TwoModeParams.kappa must be > 0");
        detail::require(gamma1 > 0.0, "TwoModeParams.gamma1 must be > 0");
        detail::require(gamma2 > 0.0, "TwoModeParams.gamma2 must be > 0");
        detail::require(nbar1 >= 0.0, "TwoModeParams.nbar1 must be >= 0");
        detail::require(nbar2 >= 0.0, "TwoModeParams.nbar2 must be >= 0");
        detail::require(chi >= 0.0, "TwoModeParams.chi must be >= 0");
        detail::require(std::isfinite(omega1) && std::isfinite(omega2),
                        "TwoModeParams.omega must be finite");
        detail::require(std::isfinite(G1) && std::isfinite(G2),
                        "TwoModeParams.G must be finite");
        detail::require(std::isfinite(Delta), "TwoModeParams.Delta must be finite");
        detail::require(std::isfinite(Theta), "TwoModeParams.Theta must be finite");
    }

    // Copy with the hopping phase reduced to [0, 2*pi).
    TwoModeParams canonical() const {
        TwoModeParams p = *this;
        p.Theta = reduce_phase(Theta);
        return p;
    }
};

// N >= 2 mechanical modes in an open chain (N-1 hopping links), one cavity.
struct NetworkParams {
    std::vector<double> omega;  // size N
    std::vector<double> G;      // size N
    std::vector<double> gamma;  // size N
    std::vector<double> nbar;   // size N
    std::vector<double> chi;    // size N-1, link j..j+1
    std::vector<double> Theta;  // size N-1
    double Delta = 0.0;
    double kappa = 0.0;

    int modes() const { return static_cast<int>(omega.size()); }

    void validate() const {
        const std::size_t n = omega.size();
        detail::require(n >= 2, "NetworkParams.omega needs at least 2 entries");
        detail::require(G.size() == n, "NetworkParams.G length must match omega");
        detail::require(gamma.size() == n, "NetworkParams.gamma length must match omega");
        detail::require(nbar.size() == n, "NetworkParams.nbar length must match omega");
        detail::require(chi.size() == n - 1, "NetworkParams.chi needs N-1 entries");
        detail::require(Theta.size() == n - 1, "NetworkParams.Theta needs N-1 entries");
        detail::require(kappa > 0.0, "NetworkParams.kappa must be > 0");
        for (std::size_t j = 0; j < n; ++j) {
            const std::string at = "[" + std::to_string(j) + "]";
            detail::require(gamma[j] > 0.0, "NetworkParams.gamma" + at + " must be > 0");
            detail::require(nbar[j] >= 0.0, "NetworkParams.nbar" + at + " must be >= 0");
            detail::require(std::isfinite(omega[j]), "NetworkParams.omega" + at + " must be finite");
            detail::require(std::isfinite(G[j]), "NetworkParams.G" + at + " must be finite");
        }
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const std::string at = "[" + std::to_string(j) + "]";
            detail::require(chi[j] >= 0.0, "NetworkParams.chi" + at + " must be >= 0");
            detail::require(std::isfinite(Theta[j]), "NetworkParams.Theta" + at + " must be finite");
        }
        detail::require(std::isfinite(Delta), "NetworkParams.Delta must be finite");
    }

    NetworkParams canonical() const {
        NetworkParams p = *this;
        for (double& th : p.Theta) th = reduce_phase(th);
        return p;
    }
};

inline NetworkParams to_network(const TwoModeParams& p) {
    NetworkParams n;
    n.omega = {p.omega1, p.omega2};
    n.G = {p.G1, p.G2};
    n.gamma = {p.gamma1, p.gamma2};
    n.nbar = {p.nbar1, p.nbar2};
    n.chi = {p.chi};
    n.Theta = {p.Theta};
    n.Delta = p.Delta;
    n.kappa = p.kappa;
    return n;
}

// Inverse of to_network; only defined for N == 2.
inline TwoModeParams two_mode_view(const NetworkParams& n) {
    detail::require(n.modes() == 2, "two_mode_view requires exactly 2 mechanical modes");
    TwoModeParams p;
    p.omega1 = n.omega[0];
    p.omega2 = n.omega[1];
    p.G1 = n.G[0];
    p.G2 = n.G[1];
    p.gamma1 = n.gamma[0];
    p.gamma2 = n.gamma[1];
    p.nbar1 = n.nbar[0];
    p.nbar2 = n.nbar[1];
    p.chi = n.chi[0];
    p.Theta = n.Theta[0];
    p.Delta = n.Delta;
    p.kappa = n.kappa;
    return p;
}

// Drift matrix of the linearized quantum Langevin equations, du = A u dt + noise.
// Square, even dimension 2(N+1).
struct DriftMatrix {
    Eigen::MatrixXd mat;
    int dim() const { return static_cast<int>(mat.rows()); }
    int vibrations() const { return dim() / 2 - 1; }
};

// Diagonal diffusion matrix of the input noise correlations.
struct DiffusionMatrix {
    Eigen::VectorXd diagonal;
    int dim() const { return static_cast<int>(diagonal.size()); }
    Eigen::MatrixXd mat() const { return Eigen::MatrixXd(diagonal.asDiagonal()); }
};

// Drift matrix for an N-mode chain. Mechanical mode j occupies rows/cols
// {2j, 2j+1}; the cavity occupies the last two. Each hopping link carries
// chi_j (sin Theta_j, cos Theta_j) mixing terms; each mechanical Y quadrature
// couples to X_c (and Y_c to every X_j) with strength -2 G_j.
inline DriftMatrix build_drift_network(const NetworkParams& params) {
    params.validate();
    const NetworkParams p = params.canonical();
    const int N = p.modes();
    const int dim = 2 * (N + 1);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);

    for (int j = 0; j < N; ++j) {
        const int x = 2 * j, y = 2 * j + 1;
        A(x, x) = -p.gamma[j];
        A(x, y) = p.omega[j];
        A(y, x) = -p.omega[j];
        A(y, y) = -p.gamma[j];
    }
    for (int j = 0; j + 1 < N; ++j) {
        const double cp = p.chi[j] * std::sin(p.Theta[j]);
        const double cm = p.chi[j] * std::cos(p.Theta[j]);
        const int xa = 2 * j, ya = 2 * j + 1;
        const int xb = 2 * (j + 1), yb = 2 * (j + 1) + 1;
        A(xa, xb) += cp;
        A(xa, yb) += cm;
        A(ya, xb) += -cm;
        A(ya, yb) += cp;
        A(xb, xa) += -cp;
        A(xb, ya) += cm;
        A(yb, xa) += -cm;
        A(yb, ya) += -cp;
    }
    const int xc = 2 * N, yc = 2 * N + 1;
    A(xc, xc) = -p.kappa;
    A(xc, yc) = p.Delta;
    A(yc, xc) = -p.Delta;
    A(yc, yc) = -p.kappa;
    for (int j = 0; j < N; ++j) {
        A(2 * j + 1, xc) += -2.0 * p.G[j];
        A(yc, 2 * j) += -2.0 * p.G[j];
    }
    return DriftMatrix{std::move(A)};
}

// Two-mode drift matrix written out explicitly (6x6).
inline DriftMatrix build_drift_two_mode(const TwoModeParams& params) {
    params.validate();
    const TwoModeParams p = params.canonical();
    const double cp = p.chi * std::sin(p.Theta);
    const double cm = p.chi * std::cos(p.Theta);
    Eigen::MatrixXd A(6, 6);
    // clang-format off
    A << -p.gamma1,  p.omega1,        cp,        cm,        0.0,      0.0,
         -p.omega1, -p.gamma1,       -cm,        cp,  -2.0*p.G1,      0.0,
               -cp,        cm, -p.gamma2,  p.omega2,        0.0,      0.0,
               -cm,       -cp, -p.omega2, -p.gamma2,  -2.0*p.G2,      0.0,
               0.0,       0.0,       0.0,       0.0,   -p.kappa,  p.Delta,
         -2.0*p.G1,       0.0, -2.0*p.G2,       0.0,   -p.Delta, -p.kappa;
    // clang-format on
    return DriftMatrix{std::move(A)};
}

// Diffusion matrix: diag{gamma_j (2 nbar_j + 1), ..., kappa, kappa}, each
// mechanical rate appearing once per quadrature.
inline DiffusionMatrix build_diffusion(const NetworkParams& params) {
    params.validate();
    const int N = params.modes();
    Eigen::VectorXd d(2 * (N + 1));
    for (int j = 0; j < N; ++j) {
        const double q = params.gamma[j] * (2.0 * params.nbar[j] + 1.0);
        d(2 * j) = q;
        d(2 * j + 1) = q;
    }
    d(2 * N) = params.kappa;
    d(2 * N + 1) = params.kappa;
    return DiffusionMatrix{std::move(d)};
}

inline DiffusionMatrix build_diffusion(const TwoModeParams& params) {
    return build_diffusion(to_network(params));
}

// --- laser drive helpers -----------------------------------------------------
//
// These operate in SI units (W, rad/s) and connect a physical drive to the
// dimensionless linearized couplings used above.

struct DriveParams {
    double P_L = 0.0;       // laser power [W]
    double omega_L = 0.0;   // laser frequency [rad/s]
    double omega_c = 0.0;   // cavity frequency [rad/s]
    double kappa = 0.0;     // cavity decay rate [rad/s]
    std::vector<double> g;  // single-photon couplings [rad/s]

    void validate() const {
        detail::require(P_L >= 0.0, "DriveParams.P_L must be >= 0");
        detail::require(omega_L > 0.0, "DriveParams.omega_L must be > 0");
        detail::require(omega_c > 0.0, "DriveParams.omega_c must be > 0");
        detail::require(kappa > 0.0, "DriveParams.kappa must be > 0");
        detail::require(!g.empty(), "DriveParams.g must be non-empty");
    }
};

// Drive amplitude |Omega| = sqrt(2 kappa P_L / (hbar omega_L)).
inline double drive_amplitude(const DriveParams& d) {
    d.validate();
    return std::sqrt(2.0 * d.kappa * d.P_L / (kHBar * d.omega_L));
}

// Steady-state intracavity amplitude <c> = -i Omega* / (kappa + i Delta).
inline std::complex<double> cavity_steady_amplitude(std::complex<double> Omega,
                                                    double kappa, double Delta) {
    detail::require(kappa > 0.0, "cavity_steady_amplitude requires kappa > 0");
    const std::complex<double> i(0.0, 1.0);
    return -i * std::conj(Omega) / std::complex<double>(kappa, Delta);
}

// Drive phase arg(Omega) that makes the steady-state amplitude real and
// non-negative, so the linearized couplings G_j can be taken real.
inline double drive_phase_for_real_amplitude(double kappa, double Delta) {
    detail::require(kappa > 0.0, "drive_phase_for_real_amplitude requires kappa > 0");
    return reduce_phase(-std::numbers::pi / 2.0 - std::atan2(Delta, kappa));
}

// Detuning and couplings of the linearized model, in units of omega_m.
struct LinearizedDrive {
    double Delta = 0.0;
    std::vector<double> G;
};

// Linearize a physical drive: Delta = (omega_c - omega_L)/omega_m and
// G_j = g_j |<c>| / omega_m with <c> evaluated at that detuning.
// omega_m is the reference mechanical frequency [rad/s].
inline LinearizedDrive linearize_drive(const DriveParams& d, double omega_m) {
    d.validate();
    detail::require(omega_m > 0.0, "linearize_drive requires omega_m > 0");
    const double Delta_c = d.omega_c - d.omega_L;
    const double amp = drive_amplitude(d);
    const double css = amp / std::hypot(d.kappa, Delta_c);
    LinearizedDrive out;
    out.Delta = Delta_c / omega_m;
    out.G.reserve(d.g.size());
    for (double gj : d.g) out.G.push_back(gj * css / omega_m);
    return out;
}

}  // namespace omsim
