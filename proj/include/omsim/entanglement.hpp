// entanglement.hpp — Gaussian entanglement measures on covariance matrices:
// two-mode logarithmic negativity (closed form and symplectic route),
// partial transposition, mode reduction, and the residual contangle that
// quantifies genuine tripartite entanglement.
//
// Conventions: vacuum variance 1/2, natural logarithm. E_N = max{0, -ln 2 nu}
// with nu the smallest symplectic eigenvalue of the partially transposed state,
// so separable states give exactly 0.

#pragma once

#include "omsim/model.hpp"
#include "omsim/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace omsim {

// Keep only the listed modes (0-based, strictly increasing after sorting;
// duplicates rejected). Rows/columns stay in their original order.
inline CovarianceMatrix reduce_covariance(const CovarianceMatrix& V,
                                          std::vector<int> modes) {
    detail::require(!modes.empty(), "reduce_covariance requires a non-empty mode set");
    std::sort(modes.begin(), modes.end());
    detail::require(std::adjacent_find(modes.begin(), modes.end()) == modes.end(),
                    "reduce_covariance: duplicate mode index");
    detail::require(modes.front() >= 0 && modes.back() < V.modes(),
                    "reduce_covariance: mode index out of range");
    const int m = static_cast<int>(modes.size());
    Eigen::MatrixXd R(2 * m, 2 * m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            R.block<2, 2>(2 * a, 2 * b) = V.mat.block<2, 2>(2 * modes[a], 2 * modes[b]);
    return CovarianceMatrix{std::move(R)};
}

// 4x4 two-mode covariance in block form [[A, C], [C^T, B]].
struct ReducedCovariance {
    Eigen::Matrix4d mat;
    Eigen::Matrix2d block_a() const { return mat.block<2, 2>(0, 0); }
    Eigen::Matrix2d block_b() const { return mat.block<2, 2>(2, 2); }
    Eigen::Matrix2d block_c() const { return mat.block<2, 2>(0, 2); }
};

inline ReducedCovariance reduce_two_mode(const CovarianceMatrix& V, int a, int b) {
    const CovarianceMatrix R = reduce_covariance(V, {a, b});
    return ReducedCovariance{R.mat};
}

// Closed-form two-mode logarithmic negativity. With Sigma = det A + det B
// - 2 det C, the smallest partial-transpose symplectic eigenvalue is
//   nu = sqrt( (Sigma - sqrt(Sigma^2 - 4 det V)) / 2 )
// and E_N = max{0, -ln 2 nu}. Unphysical inputs (negative discriminant or
// vanishing nu beyond round-off) raise std::domain_error.
inline double logneg_two_mode(const ReducedCovariance& R) {
    const double detA = R.block_a().determinant();
    const double detB = R.block_b().determinant();
    const double detC = R.block_c().determinant();
    const double detV = R.mat.determinant();
    const double Sigma = detA + detB - 2.0 * detC;

    double disc = Sigma * Sigma - 4.0 * detV;
    if (disc < -1e-12 * std::max(1.0, Sigma * Sigma))
        throw std::domain_error("logneg_two_mode: negative discriminant; "
                                "input is not a physical covariance matrix");
    disc = std::max(disc, 0.0);

    double inner = 0.5 * (Sigma - std::sqrt(disc));
    if (inner < -1e-12 * std::max(1.0, std::abs(Sigma)))
        throw std::domain_error("logneg_two_mode: partial-transpose eigenvalue "
                                "is imaginary; input is not a physical covariance matrix");
    inner = std::max(inner, 0.0);

    const double nu = std::sqrt(inner);
    if (nu <= 0.0)
        throw std::domain_error("logneg_two_mode: vanishing partial-transpose "
                                "symplectic eigenvalue");
    return std::max(0.0, -std::log(2.0 * nu));
}

// Partial transposition in phase space: flip the sign of Y for every mode in
// `party`. An involution that leaves the diagonal untouched.
inline CovarianceMatrix partial_transpose(const CovarianceMatrix& V,
                                          const std::vector<int>& party) {
    CovarianceMatrix out = V;
    for (int m : party) {
        detail::require(m >= 0 && m < V.modes(), "partial_transpose: mode index out of range");
        out.mat.row(2 * m + 1) *= -1.0;
        out.mat.col(2 * m + 1) *= -1.0;
    }
    return out;
}

// Logarithmic negativity across the bipartition (party | rest) for any mode
// count, via the smallest symplectic eigenvalue of the partial transpose.
inline double logneg_bipartition(const CovarianceMatrix& V, const std::vector<int>& party) {
    detail::require(!party.empty() && static_cast<int>(party.size()) < V.modes(),
                    "logneg_bipartition requires a non-empty proper subset of modes");
    const Eigen::VectorXd nu = symplectic_eigenvalues(partial_transpose(V, party));
    return std::max(0.0, -std::log(2.0 * nu(0)));
}

// Residual contangle of a three-mode Gaussian state. The contangle of a
// bipartition is the squared logarithmic negativity; the residual for pivot r
// is E^2_{r|(s t)} - E^2_{r|s} - E^2_{r|t}, and the reported value is the
// minimum over the three pivots. Monogamy holds when every residual is
// non-negative (to numerical tolerance).
struct ResidualContangle {
    double E_tau = 0.0;
    std::array<double, 3> per_pivot{};  // pivot = mode 0, 1, 2
    bool monogamy_ok = true;
};

inline ResidualContangle residual_contangle_min(const CovarianceMatrix& V) {
    detail::require(V.modes() == 3, "residual_contangle_min requires exactly 3 modes");
    ResidualContangle out;
    for (int r = 0; r < 3; ++r) {
        const int s = (r + 1) % 3, t = (r + 2) % 3;
        const double e_all = logneg_bipartition(V, {r});
        const double e_s = logneg_two_mode(reduce_two_mode(V, r, s));
        const double e_t = logneg_two_mode(reduce_two_mode(V, r, t));
        out.per_pivot[r] = e_all * e_all - e_s * e_s - e_t * e_t;
        if (out.per_pivot[r] < -1e-9) out.monogamy_ok = false;
    }
    out.E_tau = *std::min_element(out.per_pivot.begin(), out.per_pivot.end());
    return out;
}

// --- steady-state pipeline ---------------------------------------------------

struct EntanglementReport {
    std::vector<double> E_N;  // cavity-mode-j negativity, j = 1..N
    double stability_margin = 0.0;
    std::optional<ResidualContangle> contangle;  // N == 2 only
};

// Build the linearized model, require stability, solve for the steady-state
// covariance, and evaluate all cavity-vibration negativities (plus the
// residual contangle when the full state has exactly three modes).
inline EntanglementReport steady_state_entanglement(const NetworkParams& params) {
    const DriftMatrix A = build_drift_network(params);
    const StabilityReport st = assess_stability(A);
    if (!st.stable) throw UnstableError(st.margin);
    const CovarianceMatrix V = solve_lyapunov(A, build_diffusion(params));

    EntanglementReport rep;
    rep.stability_margin = st.margin;
    const int N = params.modes();
    rep.E_N.reserve(N);
    for (int j = 0; j < N; ++j)
        rep.E_N.push_back(logneg_two_mode(reduce_two_mode(V, j, N)));
    if (N == 2) rep.contangle = residual_contangle_min(V);
    return rep;
}

}  // namespace omsim
