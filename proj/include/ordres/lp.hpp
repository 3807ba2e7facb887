#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ordres/errors.hpp"

namespace ordres {

// min objective . x  s.t.  eq_rows x = eq_rhs,  lower <= x <= upper.
// Infinite bounds are allowed (use +-infinity()).
struct LinearProgram {
    std::vector<double> objective;
    std::vector<std::vector<double>> eq_rows;
    std::vector<double> eq_rhs;
    std::vector<double> lower;
    std::vector<double> upper;

    static constexpr double inf = std::numeric_limits<double>::infinity();

    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(eq_rows.size()); }

    void validate() const {
        const std::size_t n = objective.size();
        if (lower.size() != n || upper.size() != n || eq_rhs.size() != eq_rows.size())
            throw std::invalid_argument("LinearProgram: dimension mismatch");
        for (const auto& row : eq_rows)
            if (row.size() != n) throw std::invalid_argument("LinearProgram: row length mismatch");
        for (double b : eq_rhs)
            if (!std::isfinite(b)) throw std::invalid_argument("LinearProgram: rhs must be finite");
    }
};

enum class LpStatus { optimal, infeasible, unbounded };

// On infeasibility, `certificate` is a Farkas vector y over the standard-form
// rows (original equality rows first, then one row per two-sided bounded
// variable, in variable order) with y.A >= 0 componentwise and y.b < 0.
struct LpResult {
    LpStatus status = LpStatus::optimal;
    std::vector<double> x;
    double value = 0.0;
    std::vector<double> certificate;
    int iterations = 0;
};

namespace lp_detail {

constexpr double kPivotTol = 1e-10;     // absolute pivot tolerance
constexpr double kRatioPivotTol = 1e-8; // eligibility in the ratio test
constexpr double kDrivePivotTol = 1e-7; // pivots that swap artificials out
constexpr double kReducedCostTol = 1e-9;
constexpr double kPhase1Tol = 1e-9;
constexpr int kMaxIterations = 200000;
constexpr int kRefactorInterval = 64;

// Dense tableau over the extended column set [A | I]; the artificial block
// doubles as B^-1 so the tableau can be rebuilt from the original data at
// any time, which keeps pivot-sequence drift in check.
struct Tableau {
    int m = 0;  // rows
    int n = 0;  // structural columns (artificials are n..n+m-1)
    std::vector<std::vector<double>> a0;  // original rows (after sign flips), m x n
    std::vector<double> b0;               // original rhs (after sign flips)
    std::vector<double> a;                // (m+1) x (n+m+1); last row = reduced costs
    std::vector<double> cost;             // current phase costs over n+m columns
    std::vector<int> basis;
    std::vector<char> is_basic;           // guards against duplicate basis columns
    int iterations = 0;
    int since_refactor = 0;

    int width() const { return n + m + 1; }
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * width() + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * width() + j]; }
    int rhs_col() const { return n + m; }

    // Rebuild B^-1 [A | I | b] for the current basis by fresh elimination,
    // then recompute the reduced-cost row. Returns false (tableau untouched)
    // when the basis is too ill-conditioned to refresh.
    bool refactor() {
        since_refactor = 0;
        std::vector<double> w(static_cast<std::size_t>(m) * (width()), 0.0);
        auto W = [&](int i, int j) -> double& { return w[static_cast<std::size_t>(i) * width() + j]; };
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) W(i, j) = a0[i][j];
            W(i, n + i) = 1.0;
            W(i, rhs_col()) = b0[i];
        }
        for (int k = 0; k < m; ++k) {
            const int col = basis[k];
            int piv = -1;
            double mag = 0.0;
            for (int r = k; r < m; ++r)
                if (std::abs(W(r, col)) > mag) {
                    mag = std::abs(W(r, col));
                    piv = r;
                }
            if (piv < 0 || mag < 1e-13) return false;
            if (piv != k)
                for (int j = 0; j <= rhs_col(); ++j) std::swap(W(piv, j), W(k, j));
            const double inv = 1.0 / W(k, col);
            for (int j = 0; j <= rhs_col(); ++j) W(k, j) *= inv;
            W(k, col) = 1.0;
            for (int r = 0; r < m; ++r) {
                if (r == k) continue;
                const double f = W(r, col);
                if (f == 0.0) continue;
                for (int j = 0; j <= rhs_col(); ++j) W(r, j) -= f * W(k, j);
                W(r, col) = 0.0;
            }
        }
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j <= rhs_col(); ++j) at(i, j) = W(i, j);
            // basic values drift-corrected; snap tiny negatives
            if (at(i, rhs_col()) < 0.0 && at(i, rhs_col()) > -1e-11) at(i, rhs_col()) = 0.0;
        }
        rebuild_cost_row();
        return true;
    }

    void rebuild_cost_row() {
        for (int j = 0; j <= rhs_col(); ++j) at(m, j) = j < n + m ? cost[j] : 0.0;
        for (int i = 0; i < m; ++i) {
            const double cb = cost[basis[i]];
            if (cb == 0.0) continue;
            for (int j = 0; j <= rhs_col(); ++j) at(m, j) -= cb * at(i, j);
        }
    }

    void pivot(int r, int c) {
        const double p = at(r, c);
        const double inv = 1.0 / p;
        for (int j = 0; j < width(); ++j) at(r, j) *= inv;
        at(r, c) = 1.0;
        for (int i = 0; i <= m; ++i) {
            if (i == r) continue;
            const double factor = at(i, c);
            if (factor == 0.0) continue;
            for (int j = 0; j < width(); ++j) at(i, j) -= factor * at(r, j);
            at(i, c) = 0.0;
        }
        is_basic[basis[r]] = 0;
        is_basic[c] = 1;
        basis[r] = c;
        ++iterations;
        if (++since_refactor >= kRefactorInterval) refactor();
    }

    // Entering rule: smallest index with an improving reduced cost (Bland).
    // Leaving rule: largest pivot among (near-)tied minimum ratios for
    // numerical stability, falling back to strict smallest-basis-index
    // Bland tie-breaking after a long degenerate stretch to rule out
    // cycling. With guard_artificials set (phase 2), basic artificials are
    // pinned at zero: any movement in their row forces a degenerate pivot
    // that drives them out. Returns false on unboundedness.
    bool run(const std::vector<char>& allowed, bool guard_artificials = false) {
        int degenerate_streak = 0;
        for (;;) {
            if (iterations > kMaxIterations) throw std::runtime_error("simplex: iteration cap exceeded");
            int enter = -1;
            for (int j = 0; j < n + m; ++j) {
                if (!allowed[j] || is_basic[j]) continue;
                if (at(m, j) < -kReducedCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) {
                // confirm optimality on a freshly rebuilt tableau
                refactor();
                for (int j = 0; j < n + m; ++j) {
                    if (!allowed[j] || is_basic[j]) continue;
                    if (at(m, j) < -kReducedCostTol) {
                        enter = j;
                        break;
                    }
                }
                if (enter < 0) return true;
            }
            int leave = -1;
            if (guard_artificials) {
                double mag = kDrivePivotTol;
                for (int i = 0; i < m; ++i)
                    if (basis[i] >= n && std::abs(at(i, enter)) > mag) {
                        mag = std::abs(at(i, enter));
                        leave = i;
                    }
            }
            const bool bland_mode = degenerate_streak > 300;
            if (leave < 0) {
                double best = std::numeric_limits<double>::infinity();
                for (int i = 0; i < m; ++i) {
                    const double aic = at(i, enter);
                    if (aic > kRatioPivotTol) best = std::min(best, std::max(at(i, rhs_col()), 0.0) / aic);
                }
                if (std::isfinite(best)) {
                    const double window = best + 1e-9 * (1.0 + std::abs(best));
                    double mag = 0.0;
                    for (int i = 0; i < m; ++i) {
                        const double aic = at(i, enter);
                        if (aic <= kRatioPivotTol) continue;
                        if (std::max(at(i, rhs_col()), 0.0) / aic > window) continue;
                        if (bland_mode) {
                            if (leave < 0 || basis[i] < basis[leave]) leave = i;
                        } else if (aic > mag) {
                            mag = aic;
                            leave = i;
                        }
                    }
                }
            }
            if (leave < 0) {
                // no eligible pivot: rule out stale data before declaring the
                // column an unbounded ray
                if (since_refactor > 0) {
                    refactor();
                    continue;
                }
                if (at(m, enter) < -kReducedCostTol) {
                    bool ray = true;
                    for (int i = 0; i < m; ++i) ray &= at(i, enter) <= kRatioPivotTol;
                    if (ray) return false;  // unbounded
                }
                continue;
            }
            const bool degenerate = at(leave, rhs_col()) <= 1e-12;
            degenerate_streak = degenerate ? degenerate_streak + 1 : 0;
            pivot(leave, enter);
        }
    }
};

// Original variable -> standard-form columns.
struct VarMap {
    enum Kind { shifted, flipped, split } kind = shifted;
    int col = -1;       // primary column
    int col_neg = -1;   // split only
    double offset = 0;  // shifted: lower bound; flipped: upper bound
};

}  // namespace lp_detail

inline LpResult solve_lp(const LinearProgram& lp) {
    using namespace lp_detail;
    lp.validate();
    const int n0 = lp.num_vars();
    const int m0 = lp.num_rows();

    // Standard-form assembly: min c.x, A x = b, x >= 0.
    std::vector<VarMap> vmap(n0);
    int ncols = 0;
    int nbound_rows = 0;
    for (int j = 0; j < n0; ++j) {
        const double lo = lp.lower[j], up = lp.upper[j];
        if (lo > up) throw std::invalid_argument("LinearProgram: lower > upper for variable " + std::to_string(j));
        if (std::isfinite(lo)) {
            vmap[j] = {VarMap::shifted, ncols++, -1, lo};
            if (std::isfinite(up)) ++nbound_rows;
        } else if (std::isfinite(up)) {
            vmap[j] = {VarMap::flipped, ncols++, -1, up};
        } else {
            vmap[j] = {VarMap::split, ncols, ncols + 1, 0.0};
            ncols += 2;
        }
    }
    const int nslack = nbound_rows;
    const int m = m0 + nbound_rows;
    const int n = ncols + nslack;

    std::vector<std::vector<double>> A(m, std::vector<double>(n, 0.0));
    std::vector<double> b(m, 0.0);
    std::vector<double> c(n, 0.0);

    for (int i = 0; i < m0; ++i) b[i] = lp.eq_rhs[i];
    for (int j = 0; j < n0; ++j) {
        const VarMap& vm = vmap[j];
        const double sign = (vm.kind == VarMap::flipped) ? -1.0 : 1.0;
        for (int i = 0; i < m0; ++i) {
            const double aij = lp.eq_rows[i][j];
            if (aij == 0.0) continue;
            A[i][vm.col] += sign * aij;
            if (vm.kind == VarMap::split) A[i][vm.col_neg] -= aij;
            if (vm.kind != VarMap::split) b[i] -= aij * vm.offset;
        }
        c[vm.col] = sign * lp.objective[j];
        if (vm.kind == VarMap::split) c[vm.col_neg] = -lp.objective[j];
    }
    {
        int r = m0, s = ncols;
        for (int j = 0; j < n0; ++j) {
            if (vmap[j].kind == VarMap::shifted && std::isfinite(lp.upper[j])) {
                A[r][vmap[j].col] = 1.0;
                A[r][s] = 1.0;
                b[r] = lp.upper[j] - lp.lower[j];
                ++r;
                ++s;
            }
        }
    }
    double c_offset = 0.0;
    for (int j = 0; j < n0; ++j)
        if (vmap[j].kind != VarMap::split) c_offset += lp.objective[j] * vmap[j].offset;

    // Phase 1 tableau with artificial basis; rows flipped so b >= 0.
    std::vector<double> row_sign(m, 1.0);
    Tableau t;
    t.m = m;
    t.n = n;
    t.a.assign(static_cast<std::size_t>(m + 1) * t.width(), 0.0);
    t.a0.assign(m, std::vector<double>(n, 0.0));
    t.b0.assign(m, 0.0);
    t.basis.resize(m);
    t.cost.assign(static_cast<std::size_t>(n + m), 0.0);
    t.is_basic.assign(static_cast<std::size_t>(n + m), 0);
    for (int i = 0; i < m; ++i) {
        row_sign[i] = (b[i] < 0.0) ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) t.a0[i][j] = row_sign[i] * A[i][j];
        t.b0[i] = row_sign[i] * b[i];
        t.basis[i] = n + i;
        t.is_basic[n + i] = 1;
        t.cost[n + i] = 1.0;
    }
    t.refactor();

    std::vector<char> allowed(static_cast<std::size_t>(n + m), 1);
    if (!t.run(allowed)) throw std::runtime_error("simplex: phase 1 unbounded (internal error)");

    const double w_star = -t.at(m, t.rhs_col());
    LpResult res;
    res.iterations = t.iterations;
    if (w_star > kPhase1Tol) {
        res.status = LpStatus::infeasible;
        // Duals from artificial reduced costs: pi_i = 1 - d_{art_i}; certificate
        // y = -S pi maps back through the row flips.
        res.certificate.resize(m);
        for (int i = 0; i < m; ++i) res.certificate[i] = -row_sign[i] * (1.0 - t.at(m, n + i));
        // Verify y.A >= 0 and y.b < 0 before surfacing.
        double yb = 0.0;
        for (int i = 0; i < m; ++i) yb += res.certificate[i] * b[i];
        if (!(yb < 0.0)) throw std::runtime_error("simplex: invalid Farkas certificate (y.b >= 0)");
        for (int j = 0; j < n; ++j) {
            double ya = 0.0, scale = 1.0;
            for (int i = 0; i < m; ++i) {
                ya += res.certificate[i] * A[i][j];
                scale = std::max(scale, std::abs(A[i][j]));
            }
            if (ya < -1e-7 * scale) throw std::runtime_error("simplex: invalid Farkas certificate (y.A < 0)");
        }
        return res;
    }

    // Drive leftover artificials out of the basis where a structural pivot
    // exists; rows without one are redundant and stay guarded during phase 2.
    for (int i = 0; i < m; ++i) {
        if (t.basis[i] < n) continue;
        int piv = -1;
        double mag = kDrivePivotTol;
        for (int j = 0; j < n; ++j)
            if (!t.is_basic[j] && std::abs(t.at(i, j)) > mag) {
                mag = std::abs(t.at(i, j));
                piv = j;
            }
        if (piv >= 0) t.pivot(i, piv);
    }

    // Phase 2: install true costs, forbid artificial columns from entering.
    for (int j = 0; j < n; ++j) t.cost[j] = c[j];
    for (int j = n; j < n + m; ++j) {
        t.cost[j] = 0.0;
        allowed[j] = 0;
    }
    t.rebuild_cost_row();
    if (!t.run(allowed, true)) {
        res.status = LpStatus::unbounded;
        res.iterations = t.iterations;
        return res;
    }
    res.iterations = t.iterations;

    // Fresh basic values straight from the original data.
    t.refactor();
    std::vector<double> xs(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (t.basis[i] < n) xs[t.basis[i]] = std::max(t.at(i, t.rhs_col()), 0.0);
    res.x.resize(n0);
    for (int j = 0; j < n0; ++j) {
        const VarMap& vm = vmap[j];
        switch (vm.kind) {
            case VarMap::shifted: res.x[j] = vm.offset + xs[vm.col]; break;
            case VarMap::flipped: res.x[j] = vm.offset - xs[vm.col]; break;
            case VarMap::split: res.x[j] = xs[vm.col] - xs[vm.col_neg]; break;
        }
    }
    double value = c_offset;
    for (int j = 0; j < n; ++j) value += c[j] * xs[j];
    res.value = value;
    res.status = LpStatus::optimal;
    return res;
}

}  // namespace ordres
