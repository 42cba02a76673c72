// sweep.hpp — parameter sweeps over 1-D/2-D grids and threshold location.
//
// Grid points are independent; the engine owns no global mutable state, so
// points are distributed over worker threads and written back by index.
// Results are deterministic: identical grids give byte-identical tables
// regardless of thread count.

#pragma once

#include "omsim/entanglement.hpp"
#include "omsim/model.hpp"
#include "omsim/modes.hpp"
#include "omsim/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace omsim {

struct SweepAxis {
    std::string param;
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
    bool log_scale = false;
};

struct SweepSpec {
    NetworkParams base;
    std::vector<SweepAxis> axes;        // 1 or 2; first axis is the outer loop
    std::vector<std::string> outputs;   // E_N, E_N_<k>, E_tau, stability_margin,
                                        // Gt_plus, Gt_minus
};

// Row-major table; every cell is optional so failed or unstable points leave
// measure columns empty. The final column is the stability flag (1/0).
struct SweepResult {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;
};

// Assign a named parameter. Vector parameters accept either a collective name
// ("G", "nbar", "chi", ...) setting every entry, or a 1-based index suffix
// ("G2", "theta1"). Scalars are "Delta" and "kappa".
inline void set_param(NetworkParams& p, const std::string& name, double value) {
    if (name == "Delta") { p.Delta = value; return; }
    if (name == "kappa") { p.kappa = value; return; }

    static const std::vector<std::string> prefixes =
        {"omega", "gamma", "nbar", "theta", "chi", "G"};
    for (const std::string& prefix : prefixes) {
        if (name.rfind(prefix, 0) != 0) continue;
        std::vector<double>* vec = nullptr;
        if (prefix == "omega") vec = &p.omega;
        else if (prefix == "gamma") vec = &p.gamma;
        else if (prefix == "nbar") vec = &p.nbar;
        else if (prefix == "theta") vec = &p.Theta;
        else if (prefix == "chi") vec = &p.chi;
        else vec = &p.G;

        const std::string suffix = name.substr(prefix.size());
        if (suffix.empty()) {
            std::fill(vec->begin(), vec->end(), value);
            return;
        }
        std::size_t pos = 0;
        int idx = 0;
        try {
            idx = std::stoi(suffix, &pos);
        } catch (const std::exception&) {
            break;  // not an index suffix; fall through to the error below
        }
        if (pos != suffix.size()) break;
        if (idx < 1 || idx > static_cast<int>(vec->size()))
            throw std::invalid_argument("set_param: index out of range in '" + name + "'");
        (*vec)[idx - 1] = value;
        return;
    }
    throw std::invalid_argument("set_param: unknown parameter '" + name + "'");
}

// Grid points of one axis, endpoints exact.
inline std::vector<double> axis_values(const SweepAxis& ax) {
    detail::require(ax.count >= 2, "sweep axis '" + ax.param + "' needs count >= 2");
    detail::require(ax.start < ax.stop,
                    "sweep axis '" + ax.param + "' needs start < stop");
    if (ax.log_scale)
        detail::require(ax.start > 0.0,
                        "sweep axis '" + ax.param + "': log scale needs start > 0");
    std::vector<double> v(ax.count);
    const double a = ax.log_scale ? std::log(ax.start) : ax.start;
    const double b = ax.log_scale ? std::log(ax.stop) : ax.stop;
    for (int k = 0; k < ax.count; ++k) {
        const double t = static_cast<double>(k) / (ax.count - 1);
        v[k] = ax.log_scale ? std::exp(a + (b - a) * t) : a + (b - a) * t;
    }
    v.front() = ax.start;
    v.back() = ax.stop;
    return v;
}

// Thread count: explicit request wins, then OMSIM_THREADS, then hardware.
inline int resolve_threads(int requested) {
    detail::require(requested >= 0, "thread count must be >= 0");
    if (requested > 0) return requested;
    if (const char* env = std::getenv("OMSIM_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
            // fall through to hardware default
        }
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace detail {

// Expanded output column: what to compute and where it comes from.
struct OutputColumn {
    enum class Kind { e_n, e_tau, margin, gt_plus, gt_minus } kind;
    int mode = 0;  // 0-based vibration index for e_n
    std::string name;
};

inline std::vector<OutputColumn> expand_outputs(const std::vector<std::string>& outputs,
                                                int N) {
    require(!outputs.empty(), "sweep outputs must be non-empty");
    std::vector<OutputColumn> cols;
    for (const std::string& token : outputs) {
        if (token == "E_N" || token == "E_N_j") {
            for (int j = 0; j < N; ++j)
                cols.push_back({OutputColumn::Kind::e_n, j, "E_N_" + std::to_string(j + 1)});
        } else if (token.rfind("E_N_", 0) == 0) {
            int idx = 0;
            try {
                idx = std::stoi(token.substr(4));
            } catch (const std::exception&) {
                throw std::invalid_argument("unknown sweep output '" + token + "'");
            }
            require(idx >= 1 && idx <= N, "sweep output '" + token + "' is out of range");
            cols.push_back({OutputColumn::Kind::e_n, idx - 1, token});
        } else if (token == "E_tau") {
            require(N == 2, "sweep output 'E_tau' needs exactly 2 mechanical modes");
            cols.push_back({OutputColumn::Kind::e_tau, 0, token});
        } else if (token == "stability_margin") {
            cols.push_back({OutputColumn::Kind::margin, 0, token});
        } else if (token == "Gt_plus" || token == "Gt_minus") {
            require(N == 2, "sweep output '" + token + "' needs exactly 2 mechanical modes");
            const bool plus = token == "Gt_plus";
            cols.push_back({plus ? OutputColumn::Kind::gt_plus : OutputColumn::Kind::gt_minus,
                            0, token});
        } else {
            throw std::invalid_argument("unknown sweep output '" + token + "'");
        }
    }
    for (std::size_t a = 0; a < cols.size(); ++a)
        for (std::size_t b = a + 1; b < cols.size(); ++b)
            require(cols[a].name != cols[b].name,
                    "duplicate sweep output column '" + cols[a].name + "'");
    return cols;
}

// Evaluate every requested output at one grid point. All failures are
// recorded in-row: offending cells stay empty and the point is flagged
// unstable rather than aborting the sweep.
inline void evaluate_point(const NetworkParams& params,
                           const std::vector<OutputColumn>& cols,
                           std::vector<std::optional<double>>& row,
                           std::size_t first_output) {
    bool stable = false;
    try {
        params.validate();

        bool need_tilde = false, need_measures = false;
        for (const auto& c : cols) {
            if (c.kind == OutputColumn::Kind::gt_plus ||
                c.kind == OutputColumn::Kind::gt_minus)
                need_tilde = true;
            if (c.kind == OutputColumn::Kind::e_n || c.kind == OutputColumn::Kind::e_tau)
                need_measures = true;
        }

        ModeDecomposition tilde;
        if (need_tilde) tilde = tilde_modes(two_mode_view(params));

        const DriftMatrix A = build_drift_network(params);
        const StabilityReport st = assess_stability(A);
        stable = st.stable;

        EntanglementReport rep;
        bool have_measures = false;
        if (st.stable && need_measures) {
            rep = steady_state_entanglement(params);
            have_measures = true;
        }

        for (std::size_t k = 0; k < cols.size(); ++k) {
            const auto& c = cols[k];
            auto& cell = row[first_output + k];
            switch (c.kind) {
                case OutputColumn::Kind::e_n:
                    if (have_measures) cell = rep.E_N[c.mode];
                    break;
                case OutputColumn::Kind::e_tau:
                    if (have_measures && rep.contangle) cell = rep.contangle->E_tau;
                    break;
                case OutputColumn::Kind::margin:
                    cell = st.margin;
                    break;
                case OutputColumn::Kind::gt_plus:
                    cell = std::abs(tilde.effective_couplings(0));
                    break;
                case OutputColumn::Kind::gt_minus:
                    cell = std::abs(tilde.effective_couplings(1));
                    break;
            }
        }
    } catch (const std::exception&) {
        stable = false;  // leave the cells this point failed to produce empty
    }
    row.back() = stable ? 1.0 : 0.0;
}

}  // namespace detail

// Run a sweep. `threads` <= 0 resolves via OMSIM_THREADS / hardware count.
inline SweepResult run_sweep(const SweepSpec& spec, int threads = 0) {
    spec.base.validate();
    detail::require(spec.axes.size() == 1 || spec.axes.size() == 2,
                    "sweep needs 1 or 2 axes");
    const int N = spec.base.modes();
    const auto cols = detail::expand_outputs(spec.outputs, N);

    // reject unknown axis params before launching anything
    for (const auto& ax : spec.axes) {
        NetworkParams probe = spec.base;
        set_param(probe, ax.param, ax.start);
    }

    std::vector<std::vector<double>> grids;
    for (const auto& ax : spec.axes) grids.push_back(axis_values(ax));

    SweepResult result;
    for (const auto& ax : spec.axes) result.columns.push_back(ax.param);
    for (const auto& c : cols) result.columns.push_back(c.name);
    result.columns.push_back("stable");

    const std::size_t n_outer = grids[0].size();
    const std::size_t n_inner = grids.size() == 2 ? grids[1].size() : 1;
    const std::size_t total = n_outer * n_inner;
    result.rows.assign(total, std::vector<std::optional<double>>(result.columns.size()));

    const std::size_t first_output = spec.axes.size();
    auto work = [&](std::size_t idx) {
        const std::size_t io = idx / n_inner, ii = idx % n_inner;
        NetworkParams p = spec.base;
        auto& row = result.rows[idx];
        row[0] = grids[0][io];
        set_param(p, spec.axes[0].param, grids[0][io]);
        if (grids.size() == 2) {
            row[1] = grids[1][ii];
            set_param(p, spec.axes[1].param, grids[1][ii]);
        }
        detail::evaluate_point(p, cols, row, first_output);
    };

    const int n_threads = std::min<std::size_t>(resolve_threads(threads), total);
    if (n_threads <= 1) {
        for (std::size_t idx = 0; idx < total; ++idx) work(idx);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t idx = next.fetch_add(1); idx < total;
                     idx = next.fetch_add(1))
                    work(idx);
            });
        for (auto& th : pool) th.join();
    }
    return result;
}

// --- threshold location ------------------------------------------------------

struct ThresholdResult {
    double threshold = 0.0;
    std::vector<double> prescan_params;
    std::vector<double> prescan_values;
};

// Bisect the boundary between f > 0 and f == 0 on [lo, hi], assuming exactly
// one transition inside the bracket. Terminates when the bracket width is
// below rel_tol relative to its endpoints.
template <typename F>
double bisect_zero_boundary(F&& f, double lo, double hi, double rel_tol) {
    detail::require(lo < hi, "bisect_zero_boundary requires lo < hi");
    detail::require(rel_tol > 0.0, "bisect_zero_boundary requires rel_tol > 0");
    bool lo_pos = f(lo) > 0.0;
    const bool hi_pos = f(hi) > 0.0;
    detail::require(lo_pos != hi_pos,
                    "bisect_zero_boundary: no sign transition in bracket");
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) > 0.0) == lo_pos) lo = mid; else hi = mid;
        if (hi - lo <= rel_tol * std::max({std::abs(lo), std::abs(hi), 1e-300}))
            break;
    }
    return 0.5 * (lo + hi);
}

// Locate the parameter value where a monotone entanglement output first hits
// zero inside [lo, hi]. A 17-point prescan verifies monotonicity (within
// round-off slack) and brackets the transition; bisection then refines it to
// `rel_tol`. Targets: "E_N_<k>" or (N == 2) "E_tau". Errors carry the prescan
// table so a failed call shows what the output actually did.
inline ThresholdResult find_threshold(const NetworkParams& base, const std::string& param,
                                      double lo, double hi, const std::string& target,
                                      double rel_tol = 1e-3) {
    base.validate();
    detail::require(lo < hi, "find_threshold requires lo < hi");
    detail::require(rel_tol > 0.0, "find_threshold requires rel_tol > 0");

    int mode = -1;  // -1 = E_tau
    if (target == "E_tau") {
        detail::require(base.modes() == 2, "target 'E_tau' needs exactly 2 mechanical modes");
    } else if (target.rfind("E_N_", 0) == 0) {
        try {
            mode = std::stoi(target.substr(4)) - 1;
        } catch (const std::exception&) {
            throw std::invalid_argument("unknown threshold target '" + target + "'");
        }
        detail::require(mode >= 0 && mode < base.modes(),
                        "threshold target '" + target + "' is out of range");
    } else {
        throw std::invalid_argument("unknown threshold target '" + target + "'");
    }

    auto eval = [&](double x) {
        NetworkParams p = base;
        set_param(p, param, x);
        const EntanglementReport rep = steady_state_entanglement(p);
        return mode >= 0 ? rep.E_N[mode] : rep.contangle->E_tau;
    };

    ThresholdResult out;
    constexpr int kPrescan = 17;
    for (int k = 0; k < kPrescan; ++k) {
        const double x = lo + (hi - lo) * k / (kPrescan - 1);
        out.prescan_params.push_back(x);
        out.prescan_values.push_back(eval(x));
    }

    auto table = [&] {
        std::ostringstream s;
        s << "; prescan:";
        for (int k = 0; k < kPrescan; ++k)
            s << " (" << out.prescan_params[k] << ", " << out.prescan_values[k] << ")";
        return s.str();
    };

    double vmax = 0.0;
    for (double v : out.prescan_values) vmax = std::max(vmax, std::abs(v));
    const double slack = 1e-12 * std::max(1.0, vmax);
    bool non_increasing = true, non_decreasing = true;
    for (int k = 0; k + 1 < kPrescan; ++k) {
        if (out.prescan_values[k + 1] > out.prescan_values[k] + slack) non_increasing = false;
        if (out.prescan_values[k + 1] < out.prescan_values[k] - slack) non_decreasing = false;
    }
    if (!non_increasing && !non_decreasing)
        throw std::runtime_error("find_threshold: output is not monotone across the bracket" +
                                 table());

    const bool lo_pos = out.prescan_values.front() > 0.0;
    const bool hi_pos = out.prescan_values.back() > 0.0;
    if (lo_pos == hi_pos)
        throw std::runtime_error("find_threshold: output does not cross zero in the bracket" +
                                 table());

    // narrow to the prescan cell containing the transition, then bisect
    double a = lo, b = hi;
    for (int k = 0; k + 1 < kPrescan; ++k)
        if ((out.prescan_values[k] > 0.0) != (out.prescan_values[k + 1] > 0.0)) {
            a = out.prescan_params[k];
            b = out.prescan_params[k + 1];
            break;
        }
    out.threshold = bisect_zero_boundary(eval, a, b, rel_tol);
    return out;
}

}  // namespace omsim
