#pragma once

#include <cmath>
#include <string>

#include "ordres/errors.hpp"
#include "ordres/image.hpp"
#include "ordres/lp.hpp"
#include "ordres/operators.hpp"

namespace ordres {

// Shrinks (A^l, A^u) using the row equalities A v = g. Each entry bound is
// the exact optimum of the single-row polytope, so the closed form
//   new a^l_ij = max{ a^l_ij, (g_i - sum_{k != j} a^u_ik v_k) / v_j }
//   new a^u_ij = min{ a^u_ij, (g_i - sum_{k != j} a^l_ik v_k) / v_j }
// preserves every feasible operator. Entries with v_j = 0 are unconstrained
// by the equality and stay unchanged.
inline IntervalOperator tighten_bounds(const IntervalOperator& op, const ImageGrid& v, const ImageGrid& g) {
    if (static_cast<std::size_t>(op.cols()) != v.size() || static_cast<std::size_t>(op.rows()) != g.size())
        throw std::invalid_argument("tighten_bounds: shape mismatch");
    for (double vj : v.values())
        if (vj < 0.0) throw std::invalid_argument("tighten_bounds: v must be nonnegative");
    SparseMatrix lo = op.lower();
    SparseMatrix up = op.upper();
    for (int i = 0; i < op.rows(); ++i) {
        auto cols = lo.row_cols(i);
        auto lov = lo.row_values(i);
        auto upv = up.row_values(i);
        double s_lo = 0.0, s_up = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            s_lo += lov[k] * v[cols[k]];
            s_up += upv[k] * v[cols[k]];
        }
        const double gi = g[i];
        const double scale = std::max({1.0, std::abs(gi), s_up});
        if (s_lo > gi + 1e-12 * scale || s_up < gi - 1e-12 * scale)
            throw infeasible_row_error("tighten_bounds: row constraint set is empty", i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const double vj = v[cols[k]];
            if (vj == 0.0) continue;
            const double lb = (gi - (s_up - upv[k] * vj)) / vj;
            const double ub = (gi - (s_lo - lov[k] * vj)) / vj;
            const double new_lo = std::max(lov[k], lb);
            const double new_up = std::min(upv[k], ub);
            lov[k] = std::min(new_lo, new_up);  // guard fp crossing at tight rows
            upv[k] = new_up;
        }
    }
    return IntervalOperator(std::move(lo), std::move(up));
}

enum class TightenDirection { minimize, maximize };

// Reference LP for a single entry: optimize a_ij over the row polytope
// { a^l_i <= a <= a^u_i, a . v = g_i }. Validation-only companion of
// tighten_bounds.
inline double lp_tighten_oracle(const IntervalOperator& op, const ImageGrid& v, const ImageGrid& g, int i, int j,
                                TightenDirection direction) {
    if (i < 0 || i >= op.rows() || j < 0 || j >= op.cols())
        throw std::invalid_argument("lp_tighten_oracle: index out of range");
    auto cols = op.lower().row_cols(i);
    auto lov = op.lower().row_values(i);
    auto upv = op.upper().row_values(i);
    const int n = static_cast<int>(cols.size());
    int target = -1;
    LinearProgram lp;
    lp.objective.assign(n, 0.0);
    lp.lower.resize(n);
    lp.upper.resize(n);
    lp.eq_rows.assign(1, std::vector<double>(n, 0.0));
    lp.eq_rhs = {g[i]};
    for (int k = 0; k < n; ++k) {
        lp.lower[k] = lov[k];
        lp.upper[k] = upv[k];
        lp.eq_rows[0][k] = v[cols[k]];
        if (cols[k] == j) target = k;
    }
    if (target < 0) {
        // Off-pattern entries are fixed at zero.
        return 0.0;
    }
    lp.objective[target] = direction == TightenDirection::minimize ? 1.0 : -1.0;
    const auto sol = solve_lp(lp);
    if (sol.status == LpStatus::infeasible) throw infeasible_row_error("lp_tighten_oracle: infeasible row", i);
    if (sol.status != LpStatus::optimal) throw std::runtime_error("lp_tighten_oracle: unexpected LP status");
    return sol.x[target];
}

}  // namespace ordres
