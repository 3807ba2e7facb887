#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ordres/errors.hpp"
#include "ordres/image.hpp"
#include "ordres/lp.hpp"
#include "ordres/operators.hpp"
#include "ordres/rng.hpp"

namespace ordres {

// Linear side constraint A v = g on the operator.
struct SideConstraint {
    ImageGrid v;
    ImageGrid g;
};

struct FeasibilityProblem {
    IntervalOperator op;
    BoundedData data;
    std::optional<SideConstraint> side_constraint;

    FeasibilityProblem(IntervalOperator o, BoundedData d, std::optional<SideConstraint> side = std::nullopt)
        : op(std::move(o)), data(std::move(d)), side_constraint(std::move(side)) {
        if (static_cast<std::size_t>(op.rows()) != data.lower.size())
            throw std::invalid_argument("FeasibilityProblem: operator/data shape mismatch");
        if (side_constraint) {
            if (static_cast<std::size_t>(op.cols()) != side_constraint->v.size() ||
                static_cast<std::size_t>(op.rows()) != side_constraint->g.size())
                throw std::invalid_argument("FeasibilityProblem: side constraint shape mismatch");
        }
    }

    // A^l v <= g <= A^u v must hold rowwise for the side constraint to admit
    // any operator at all.
    void require_side_constraint_consistent(double tol = 1e-9) const {
        if (!side_constraint) throw std::invalid_argument("FeasibilityProblem: side constraint missing");
        const auto lo = op.lower().apply(side_constraint->v.values());
        const auto up = op.upper().apply(side_constraint->v.values());
        for (int i = 0; i < op.rows(); ++i) {
            const double g = side_constraint->g[i];
            const double scale = std::max(1.0, std::abs(g));
            if (lo[i] > g + tol * scale || up[i] < g - tol * scale)
                throw infeasible_row_error("side constraint incompatible with operator bounds", i);
        }
    }
};

// ---- membership in U = {u >= 0, A^l u <= f^u, A^u u >= f^l} ----

struct MembershipSlacks {
    std::vector<double> nonneg;  // u_i
    std::vector<double> upper;   // f^u - A^l u
    std::vector<double> lower;   // A^u u - f^l

    double min_slack() const {
        double m = std::numeric_limits<double>::infinity();
        for (double s : nonneg) m = std::min(m, s);
        for (double s : upper) m = std::min(m, s);
        for (double s : lower) m = std::min(m, s);
        return m;
    }
};

struct MembershipResult {
    bool member = false;
    MembershipSlacks slacks;
};

inline MembershipResult member_U(const ImageGrid& u, const FeasibilityProblem& p, double tol) {
    if (static_cast<std::size_t>(p.op.cols()) != u.size())
        throw std::invalid_argument("member_U: shape mismatch");
    MembershipResult res;
    res.slacks.nonneg = u.values();
    const auto alu = p.op.lower().apply(u.values());
    const auto auu = p.op.upper().apply(u.values());
    res.slacks.upper.resize(alu.size());
    res.slacks.lower.resize(auu.size());
    for (std::size_t i = 0; i < alu.size(); ++i) {
        res.slacks.upper[i] = p.data.upper[i] - alu[i];
        res.slacks.lower[i] = auu[i] - p.data.lower[i];
    }
    res.member = res.slacks.min_slack() >= -tol;
    return res;
}

// Norm-based test ||A_h u - f_d|| <= delta + h ||u|| in the sup-norm.
inline bool member_U_norm(const ImageGrid& u, const MidpointRepresentation& rep, double tol) {
    if (static_cast<std::size_t>(rep.operator_center.cols()) != u.size())
        throw std::invalid_argument("member_U_norm: shape mismatch");
    const auto r = rep.operator_center.apply(u.values());
    double residual = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) residual = std::max(residual, std::abs(r[i] - rep.data_center[i]));
    return residual <= rep.data_radius + rep.operator_radius * u.max_abs() + tol;
}

// ---- constructive witness: a pair (A, f) inside the intervals with Au = f ----

struct WitnessPair {
    std::vector<double> alpha;  // one convex weight per output row
    SparseMatrix realized_operator;
    ImageGrid realized_data;
};

// Rowwise mix A = (1-alpha) A^l + alpha A^u with the explicit weight choice
// alpha = max{ (f^l - A^l u) / ((A^u - A^l) u), 0 }, clamped to [0, 1].
inline WitnessPair construct_witness(const ImageGrid& u, const FeasibilityProblem& p, double pre_tol = 0.0) {
    const auto pre = member_U(u, p, pre_tol);
    if (!pre.member)
        throw not_in_feasible_set_error("construct_witness: u is not in the feasible set (min slack " +
                                        std::to_string(pre.slacks.min_slack()) + ")");
    const auto alu = p.op.lower().apply(u.values());
    const auto auu = p.op.upper().apply(u.values());
    const int m = p.op.rows();
    WitnessPair w{std::vector<double>(m, 0.0), p.op.lower(), ImageGrid(m, 1)};
    for (int i = 0; i < m; ++i) {
        const double denom = auu[i] - alu[i];
        double alpha = 0.0;
        if (denom > 0.0) alpha = std::clamp(std::max((p.data.lower[i] - alu[i]) / denom, 0.0), 0.0, 1.0);
        w.alpha[i] = alpha;
        auto vals = w.realized_operator.row_values(i);
        auto lov = p.op.lower().row_values(i);
        auto upv = p.op.upper().row_values(i);
        for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = (1.0 - alpha) * lov[k] + alpha * upv[k];
    }
    const auto f = w.realized_operator.apply(u.values());
    for (int i = 0; i < m; ++i) w.realized_data[i] = f[i];
    return w;
}

// ---- U** closed form (single data point f^l = f^u, side constraint Av = g) ----

// phi(z) = sum_j (z - u_j/v_j) v_j {a^u_j if u_j/v_j <= z else a^l_j} + f - g z
inline double phi_value(std::span<const double> u, std::span<const double> v, std::span<const double> a_l,
                        std::span<const double> a_u, double f, double g, double z) {
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double r = u[j] / v[j];
        s += (z - r) * v[j] * (r <= z ? a_u[j] : a_l[j]);
    }
    return s + f - g * z;
}

// psi(z) = sum_j (u_j/v_j - z) v_j {a^u_j if u_j/v_j >= z else a^l_j} + g z - f
inline double psi_value(std::span<const double> u, std::span<const double> v, std::span<const double> a_l,
                        std::span<const double> a_u, double f, double g, double z) {
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double r = u[j] / v[j];
        s += (r - z) * v[j] * (r >= z ? a_u[j] : a_l[j]);
    }
    return s + g * z - f;
}

struct RowMembershipReport {
    bool member = false;
    int k_star = 0;       // 1-based position in the ratio-sorted order
    double phi_min = 0.0;
    int k_star_star = 0;  // 1-based
    double psi_min = 0.0;
};

// Closed-form membership test for one output row. Indices are sorted by
// u_j/v_j ascending with stable original-index tie-break; k* and k** locate
// the subdifferential sign changes of phi and psi along the sorted prefix
// sums.
inline RowMembershipReport row_membership_ustarstar(std::span<const double> u, std::span<const double> v,
                                                    std::span<const double> a_l, std::span<const double> a_u,
                                                    double f, double g, double tol = 1e-9) {
    const std::size_t n = u.size();
    if (v.size() != n || a_l.size() != n || a_u.size() != n)
        throw std::invalid_argument("row_membership_ustarstar: shape mismatch");
    for (std::size_t j = 0; j < n; ++j)
        if (v[j] <= 0.0)
            throw std::invalid_argument("row_membership_ustarstar: v must be strictly positive");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return u[a] / v[a] < u[b] / v[b]; });

    // T(k) = sum of the first k sorted a^u v plus the rest as a^l v, minus g.
    double t = -g;
    for (std::size_t j = 0; j < n; ++j) t += a_l[j] * v[j];
    std::size_t k_star = n;
    double t_k = t;
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t j = order[k - 1];
        t_k += (a_u[j] - a_l[j]) * v[j];
        if (t_k >= 0.0) {
            k_star = k;
            break;
        }
    }
    // W(k) = sum of the first k sorted a^l v plus the rest as a^u v, minus g.
    double w = -g;
    for (std::size_t j = 0; j < n; ++j) w += a_u[j] * v[j];
    std::size_t k_star_star = n;
    double w_k = w;
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t j = order[k - 1];
        w_k -= (a_u[j] - a_l[j]) * v[j];
        if (w_k <= 0.0) {
            k_star_star = k;
            break;
        }
    }

    RowMembershipReport rep;
    rep.k_star = static_cast<int>(k_star);
    rep.k_star_star = static_cast<int>(k_star_star);
    const std::size_t js = order[k_star - 1];
    const std::size_t jss = order[k_star_star - 1];
    rep.phi_min = phi_value(u, v, a_l, a_u, f, g, u[js] / v[js]);
    rep.psi_min = psi_value(u, v, a_l, a_u, f, g, u[jss] / v[jss]);
    rep.member = rep.phi_min >= -tol && rep.psi_min >= -tol;
    return rep;
}

struct MembershipReport {
    bool member = false;
    // Scalars describe the binding row (smallest of the two minima).
    int row = 0;
    int k_star = 0;
    double phi_min = 0.0;
    int k_star_star = 0;
    double psi_min = 0.0;
    std::vector<int> failing_rows;
    std::vector<RowMembershipReport> rows;
};

inline MembershipReport member_Ustarstar(const ImageGrid& u, const FeasibilityProblem& p, double tol = 1e-9) {
    if (!p.side_constraint) throw std::invalid_argument("member_Ustarstar: side constraint required");
    if (!p.data.degenerate())
        throw std::invalid_argument("member_Ustarstar: requires a single data point (f^l = f^u)");
    for (double vj : p.side_constraint->v.values())
        if (vj <= 0.0) throw std::invalid_argument("member_Ustarstar: v must be strictly positive");
    p.require_side_constraint_consistent();
    const auto pre = member_U(u, p, tol);
    if (!pre.member)
        throw not_in_feasible_set_error("member_Ustarstar: u is not in the feasible set (min slack " +
                                        std::to_string(pre.slacks.min_slack()) + ")");

    const int m = p.op.rows();
    const int n = p.op.cols();
    MembershipReport rep;
    rep.member = true;
    rep.rows.reserve(m);
    std::vector<double> a_l(n), a_u(n);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        std::fill(a_l.begin(), a_l.end(), 0.0);
        std::fill(a_u.begin(), a_u.end(), 0.0);
        auto cols = p.op.lower().row_cols(i);
        auto lov = p.op.lower().row_values(i);
        auto upv = p.op.upper().row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            a_l[cols[k]] = lov[k];
            a_u[cols[k]] = upv[k];
        }
        auto row = row_membership_ustarstar(u.values(), p.side_constraint->v.values(), a_l, a_u, p.data.lower[i],
                                            p.side_constraint->g[i], tol);
        if (!row.member) {
            rep.member = false;
            rep.failing_rows.push_back(i);
        }
        const double row_min = std::min(row.phi_min, row.psi_min);
        if (row_min < worst) {
            worst = row_min;
            rep.row = i;
            rep.k_star = row.k_star;
            rep.phi_min = row.phi_min;
            rep.k_star_star = row.k_star_star;
            rep.psi_min = row.psi_min;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

// ---- Farkas LP oracle for one row ----

struct FarkasRowResult {
    bool feasible = false;
    // Present only on infeasibility: y over the rows (alpha-u, beta-u,
    // alpha-v, beta-v, then the n coupling rows alpha_j + beta_j = 1).
    std::vector<double> certificate;
};

// Decides feasibility of the two-equality system in alpha in [0,1]^n via the
// beta = 1 - alpha substitution and a phase-1 simplex on nonnegative
// variables.
inline FarkasRowResult farkas_row(std::span<const double> u, std::span<const double> v,
                                  std::span<const double> a_l, std::span<const double> a_u, double f, double g) {
    const int n = static_cast<int>(u.size());
    for (int j = 0; j < n; ++j)
        if (a_l[j] > a_u[j]) throw inconsistent_bounds_error("farkas_row: interval ordering violated");
    LinearProgram lp;
    const int nv = 2 * n;
    lp.objective.assign(nv, 0.0);
    lp.lower.assign(nv, 0.0);
    lp.upper.assign(nv, LinearProgram::inf);
    lp.eq_rows.assign(static_cast<std::size_t>(n) + 4, std::vector<double>(nv, 0.0));
    lp.eq_rhs.assign(static_cast<std::size_t>(n) + 4, 0.0);
    double alu = 0.0, auu = 0.0, alv = 0.0, auv = 0.0;
    for (int j = 0; j < n; ++j) {
        const double wu = (a_u[j] - a_l[j]) * u[j];
        const double wv = (a_u[j] - a_l[j]) * v[j];
        lp.eq_rows[0][j] = wu;
        lp.eq_rows[1][n + j] = wu;
        lp.eq_rows[2][j] = wv;
        lp.eq_rows[3][n + j] = wv;
        lp.eq_rows[static_cast<std::size_t>(4) + j][j] = 1.0;
        lp.eq_rows[static_cast<std::size_t>(4) + j][n + j] = 1.0;
        lp.eq_rhs[static_cast<std::size_t>(4) + j] = 1.0;
        alu += a_l[j] * u[j];
        auu += a_u[j] * u[j];
        alv += a_l[j] * v[j];
        auv += a_u[j] * v[j];
    }
    lp.eq_rhs[0] = f - alu;
    lp.eq_rhs[1] = auu - f;
    lp.eq_rhs[2] = g - alv;
    lp.eq_rhs[3] = auv - g;
    const auto sol = solve_lp(lp);
    FarkasRowResult res;
    res.feasible = sol.status == LpStatus::optimal;
    if (sol.status == LpStatus::infeasible) res.certificate = sol.certificate;
    return res;
}

inline bool farkas_oracle(std::span<const double> u, std::span<const double> v, std::span<const double> a_l,
                          std::span<const double> a_u, double f, double g) {
    return farkas_row(u, v, a_l, a_u, f, g).feasible;
}

// ---- 2D feasible-set sampler ----

struct Sampler2dConfig {
    std::vector<double> a_l;     // 1x2 row
    std::vector<double> a_u;     // 1x2 row
    double f = 0.0;
    std::vector<double> v;       // length 2, strictly positive
    double g = 0.0;
    int n_samples = 1000;
    double region[4] = {0.0, 25.0, 0.0, 25.0};  // u1 min/max, u2 min/max
    std::uint64_t seed = 0;
};

struct SamplePoint {
    double u1 = 0.0;
    double u2 = 0.0;
    bool in_U = false;
    bool in_Ustarstar = false;
};

inline FeasibilityProblem make_row_problem(const Sampler2dConfig& cfg) {
    SparseMatrix lo = SparseMatrix::from_triplets(1, 2, {{0, 0, cfg.a_l[0]}, {0, 1, cfg.a_l[1]}});
    SparseMatrix up = SparseMatrix::from_triplets(1, 2, {{0, 0, cfg.a_u[0]}, {0, 1, cfg.a_u[1]}});
    ImageGrid f(1, 1);
    f[0] = cfg.f;
    ImageGrid v(2, 1), g(1, 1);
    v[0] = cfg.v[0];
    v[1] = cfg.v[1];
    g[0] = cfg.g;
    return FeasibilityProblem(IntervalOperator(std::move(lo), std::move(up)), BoundedData(f, f, f),
                              SideConstraint{std::move(v), std::move(g)});
}

inline std::vector<SamplePoint> sample_feasible_set_2d(const Sampler2dConfig& cfg) {
    if (cfg.a_l.size() != 2 || cfg.a_u.size() != 2 || cfg.v.size() != 2)
        throw std::invalid_argument("sample_feasible_set_2d: expects a 2D problem");
    const FeasibilityProblem problem = make_row_problem(cfg);
    Rng rng(cfg.seed);
    std::vector<SamplePoint> out;
    out.reserve(cfg.n_samples);
    ImageGrid u(2, 1);
    for (int s = 0; s < cfg.n_samples; ++s) {
        SamplePoint pt;
        pt.u1 = rng.uniform(cfg.region[0], cfg.region[1]);
        pt.u2 = rng.uniform(cfg.region[2], cfg.region[3]);
        u[0] = pt.u1;
        u[1] = pt.u2;
        pt.in_U = member_U(u, problem, 0.0).member;
        pt.in_Ustarstar = pt.in_U && member_Ustarstar(u, problem).member;
        out.push_back(pt);
    }
    return out;
}

inline void write_samples_csv(const std::vector<SamplePoint>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_samples_csv: cannot open " + path);
    out.precision(17);
    out << "u1,u2,in_U,in_Ustarstar\n";
    for (const auto& s : samples)
        out << s.u1 << "," << s.u2 << "," << (s.in_U ? 1 : 0) << "," << (s.in_Ustarstar ? 1 : 0) << "\n";
}

}  // namespace ordres
