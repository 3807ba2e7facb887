#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ordres/errors.hpp"
#include "ordres/image.hpp"
#include "ordres/lattice_sets.hpp"
#include "ordres/operators.hpp"

namespace ordres {

enum class TvVariant { isotropic, anisotropic };

inline TvVariant tv_variant_from_string(const std::string& s) {
    if (s == "isotropic") return TvVariant::isotropic;
    if (s == "anisotropic") return TvVariant::anisotropic;
    throw std::invalid_argument("unknown TV variant: " + s);
}

// Forward-difference total variation. The two variants coincide for 1D
// signals.
inline double tv_value(const ImageGrid& u, TvVariant variant) {
    const int rows = u.rows(), cols = u.cols();
    double s = 0.0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double dx = (c + 1 < cols) ? u(r, c + 1) - u(r, c) : 0.0;
            const double dy = (r + 1 < rows) ? u(r + 1, c) - u(r, c) : 0.0;
            if (variant == TvVariant::isotropic) s += std::sqrt(dx * dx + dy * dy);
            else s += std::abs(dx) + std::abs(dy);
        }
    }
    return s;
}

struct GridShape {
    int rows = 0;
    int cols = 0;
};

struct SolverConfig {
    int max_iterations = 20000;
    double tolerance = 1e-6;          // normalized primal-dual residual
    double gamma = 1e-4;              // l2 correction weight
    TvVariant tv_variant = TvVariant::isotropic;
    double step_ratio = 1.0;          // tau/sigma balance
    double over_relaxation = 1.0;     // in [1, 2]
    int check_interval = 25;          // residual evaluation cadence
    double feasibility_tol = 1e-6;    // scaled constraint slack required at convergence
    int restart_interval = 4000;      // restart at the running average; 0 disables
    std::string trace_path;           // stream iteration CSV when set
    bool keep_trace = false;

    void validate() const {
        if (max_iterations <= 0) throw std::invalid_argument("SolverConfig: max_iterations must be positive");
        if (!(tolerance > 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be positive");
        if (gamma < 0.0) throw std::invalid_argument("SolverConfig: gamma must be >= 0");
        if (!(step_ratio > 0.0)) throw std::invalid_argument("SolverConfig: step_ratio must be positive");
        if (over_relaxation < 1.0 || over_relaxation > 2.0)
            throw std::invalid_argument("SolverConfig: over_relaxation must be in [1, 2]");
        if (check_interval <= 0) throw std::invalid_argument("SolverConfig: check_interval must be positive");
        if (restart_interval < 0) throw std::invalid_argument("SolverConfig: restart_interval must be >= 0");
    }
};

struct TraceRow {
    int iteration = 0;
    double objective = 0.0;
    double residual = 0.0;
    double max_violation = 0.0;
};

struct ConstraintSlacks {
    double u_min = 0.0;           // min over u
    double upper_violation = 0.0; // max over A^l u - f^u
    double lower_violation = 0.0; // max over f^l - A^u u
};

struct Solution {
    ImageGrid u;
    int iterations_used = 0;
    double primal_dual_residual = 0.0;
    ConstraintSlacks constraint_slacks;
    double objective_value = 0.0;
    bool converged = false;
    std::vector<TraceRow> trace;
};

// Matrix-free linear operator with explicit adjoint.
struct LinearOperator {
    int in_dim = 0;
    int out_dim = 0;
    std::function<void(std::span<const double>, std::span<double>)> forward;
    std::function<void(std::span<const double>, std::span<double>)> adjoint;
};

inline LinearOperator linear_operator_from(const SparseMatrix& a) {
    LinearOperator op;
    op.in_dim = a.cols();
    op.out_dim = a.rows();
    op.forward = [&a](std::span<const double> x, std::span<double> y) { a.apply(x, y); };
    op.adjoint = [&a](std::span<const double> x, std::span<double> y) {
        std::fill(y.begin(), y.end(), 0.0);
        a.apply_transpose_add(x, y);
    };
    return op;
}

namespace grad_detail {

// p = (dx block, dy block), each of size rows*cols.
inline void gradient(std::span<const double> u, int rows, int cols, std::span<double> p) {
    const int n = rows * cols;
    for (int r = 0; r < rows; ++r) {
        const int off = r * cols;
        for (int c = 0; c < cols; ++c) {
            p[off + c] = (c + 1 < cols) ? u[off + c + 1] - u[off + c] : 0.0;
            p[n + off + c] = (r + 1 < rows) ? u[off + cols + c] - u[off + c] : 0.0;
        }
    }
}

// out += D^T p (negative divergence).
inline void gradient_transpose_add(std::span<const double> p, int rows, int cols, std::span<double> out) {
    const int n = rows * cols;
    for (int r = 0; r < rows; ++r) {
        const int off = r * cols;
        for (int c = 0; c < cols; ++c) {
            const int i = off + c;
            if (c + 1 < cols) {
                out[i] -= p[i];
                out[i + 1] += p[i];
            }
            if (r + 1 < rows) {
                out[i] -= p[n + i];
                out[i + cols] += p[n + i];
            }
        }
    }
}

}  // namespace grad_detail

inline LinearOperator gradient_operator(int rows, int cols) {
    LinearOperator op;
    op.in_dim = rows * cols;
    op.out_dim = 2 * rows * cols;
    op.forward = [rows, cols](std::span<const double> x, std::span<double> y) {
        grad_detail::gradient(x, rows, cols, y);
    };
    op.adjoint = [rows, cols](std::span<const double> x, std::span<double> y) {
        std::fill(y.begin(), y.end(), 0.0);
        grad_detail::gradient_transpose_add(x, rows, cols, y);
    };
    return op;
}

// Vertical stack gradient (+) A^l (+) A^u used by the primal-dual scheme; the
// degenerate-interval path stacks the single matrix once.
inline LinearOperator make_constraint_stack(const FeasibilityProblem& problem, GridShape shape) {
    const int n = problem.op.cols();
    const int rows = shape.rows > 0 ? shape.rows : n;
    const int cols = shape.rows > 0 ? shape.cols : 1;
    if (rows * cols != n) throw std::invalid_argument("make_constraint_stack: shape does not match problem");
    const bool degenerate = problem.op.degenerate();
    const SparseMatrix& lo = problem.op.lower();
    const SparseMatrix& up = problem.op.upper();
    const int m = problem.op.rows();
    LinearOperator op;
    op.in_dim = n;
    op.out_dim = 2 * n + (degenerate ? m : 2 * m);
    op.forward = [&lo, &up, rows, cols, n, m, degenerate](std::span<const double> x, std::span<double> y) {
        grad_detail::gradient(x, rows, cols, y.subspan(0, 2 * static_cast<std::size_t>(n)));
        lo.apply(x, y.subspan(2 * static_cast<std::size_t>(n), m));
        if (!degenerate) up.apply(x, y.subspan(2 * static_cast<std::size_t>(n) + m, m));
    };
    op.adjoint = [&lo, &up, rows, cols, n, m, degenerate](std::span<const double> x, std::span<double> y) {
        std::fill(y.begin(), y.end(), 0.0);
        grad_detail::gradient_transpose_add(x.subspan(0, 2 * static_cast<std::size_t>(n)), rows, cols, y);
        lo.apply_transpose_add(x.subspan(2 * static_cast<std::size_t>(n), m), y);
        if (!degenerate) up.apply_transpose_add(x.subspan(2 * static_cast<std::size_t>(n) + m, m), y);
    };
    return op;
}

// Power iteration on K^T K. The alternating start vector has a large overlap
// with the top eigenvector of difference-type operators.
inline double estimate_operator_norm(const LinearOperator& op, int iterations = 50) {
    std::vector<double> x(op.in_dim), kx(op.out_dim);
    for (int i = 0; i < op.in_dim; ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;
    double norm_est = 0.0;
    for (int it = 0; it < iterations; ++it) {
        double nx = 0.0;
        for (double v : x) nx += v * v;
        nx = std::sqrt(nx);
        if (nx < 1e-300) return 0.0;
        for (double& v : x) v /= nx;
        op.forward(x, kx);
        double nk = 0.0;
        for (double v : kx) nk += v * v;
        norm_est = std::sqrt(nk);
        if (norm_est < 1e-300) return 0.0;
        op.adjoint(kx, x);
    }
    return norm_est;
}

namespace pdhg_detail {

inline double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// prox of tau * (gamma ||.||_2 + indicator(. >= 0)): shrink, then clamp.
inline void prox_primal(std::vector<double>& x, double tau_gamma) {
    if (tau_gamma > 0.0) {
        const double nx = norm2(x);
        const double scale = nx > tau_gamma ? 1.0 - tau_gamma / nx : 0.0;
        for (double& v : x) v *= scale;
    }
    for (double& v : x) v = std::max(v, 0.0);
}

inline void project_tv_dual(std::span<double> p, int n, TvVariant variant) {
    if (variant == TvVariant::anisotropic) {
        for (double& v : p) v = std::clamp(v, -1.0, 1.0);
    } else {
        for (int i = 0; i < n; ++i) {
            const double s = std::sqrt(p[i] * p[i] + p[n + i] * p[n + i]);
            if (s > 1.0) {
                p[i] /= s;
                p[n + i] /= s;
            }
        }
    }
}

}  // namespace pdhg_detail

// Primal-dual hybrid gradient iteration for
//   min TV(u) + gamma ||u||_2   s.t.  u >= 0, A^l u <= f^u, A^u u >= f^l.
// Dual blocks: TV-ball projection for the gradient, one-sided shifted cones
// for the interval constraints (a single box block when A^l = A^u).
inline Solution solve_constrained_tv(const FeasibilityProblem& problem, const SolverConfig& config,
                                     GridShape shape = {}, const ImageGrid* initial = nullptr) {
    config.validate();
    const int n = problem.op.cols();
    const int m = problem.op.rows();
    const int rows = shape.rows > 0 ? shape.rows : n;
    const int cols = shape.rows > 0 ? shape.cols : 1;
    if (rows * cols != n) throw std::invalid_argument("solve_constrained_tv: shape does not match problem");
    const bool degenerate = problem.op.degenerate();
    const SparseMatrix& alo = problem.op.lower();
    const SparseMatrix& aup = problem.op.upper();
    const std::vector<double>& fl = problem.data.lower.values();
    const std::vector<double>& fu = problem.data.upper.values();

    const LinearOperator stack = make_constraint_stack(problem, {rows, cols});
    double L = 1.02 * estimate_operator_norm(stack, 50);
    if (L < 1e-12) L = 1.0;
    const double tau = config.step_ratio / L;
    const double sigma = 1.0 / (config.step_ratio * L);
    const double rho = config.over_relaxation;

    double feas_scale = 1.0;
    for (double v : fu) feas_scale = std::max(feas_scale, std::abs(v));
    for (double v : fl) feas_scale = std::max(feas_scale, std::abs(v));

    // Warm start: midpoint back-projection clamped to the nonnegative orthant.
    std::vector<double> u(n, 0.0);
    if (initial) {
        if (static_cast<std::size_t>(n) != initial->size())
            throw std::invalid_argument("solve_constrained_tv: initial iterate shape mismatch");
        u = initial->values();
        for (double& v : u) v = std::max(v, 0.0);
    } else {
        std::vector<double> fmid(m);
        for (int i = 0; i < m; ++i) fmid[i] = 0.5 * (fl[i] + fu[i]);
        SparseMatrix amid = combine(alo, aup, [](double a, double b) { return 0.5 * (a + b); });
        amid.apply_transpose_add(fmid, u);
        for (double& v : u) v = std::max(v, 0.0);
    }

    const int dual_dim = stack.out_dim;
    std::vector<double> y(dual_dim, 0.0);       // (p, q, r) or (p, s)
    std::vector<double> u_new(n), w(n), kt(n), kw(dual_dim), y_new(dual_dim);
    std::vector<double> u_prev, y_prev, diff_u(n), diff_y(dual_dim), tmp_n(n), tmp_d(dual_dim);
    std::vector<double> u_best;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<double> u_sum(n, 0.0), y_sum(dual_dim, 0.0);
    int avg_count = 0;

    std::ofstream trace_out;
    if (!config.trace_path.empty()) {
        trace_out.open(config.trace_path);
        if (!trace_out) throw std::runtime_error("solve_constrained_tv: cannot open trace " + config.trace_path);
        trace_out << "iteration,objective,residual,max_violation\n";
        trace_out.precision(12);
    }

    Solution sol;
    sol.converged = false;
    double residual = std::numeric_limits<double>::infinity();
    int iter = 0;
    const double tau_gamma = tau * config.gamma;

    auto slack_of = [&](const std::vector<double>& x, ConstraintSlacks& s) {
        std::vector<double> lo_x(m), up_x(m);
        alo.apply(x, lo_x);
        if (degenerate) up_x = lo_x;
        else aup.apply(x, up_x);
        s.u_min = *std::min_element(x.begin(), x.end());
        s.upper_violation = -std::numeric_limits<double>::infinity();
        s.lower_violation = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            s.upper_violation = std::max(s.upper_violation, lo_x[i] - fu[i]);
            s.lower_violation = std::max(s.lower_violation, fl[i] - up_x[i]);
        }
    };

    for (iter = 1; iter <= config.max_iterations; ++iter) {
        const bool check = (iter % config.check_interval == 0) || iter == config.max_iterations;
        if (check) {
            u_prev = u;
            y_prev = y;
        }

        // primal
        stack.adjoint(y, kt);
        for (int i = 0; i < n; ++i) u_new[i] = u[i] - tau * kt[i];
        pdhg_detail::prox_primal(u_new, tau_gamma);
        for (int i = 0; i < n; ++i) w[i] = 2.0 * u_new[i] - u[i];

        // dual
        stack.forward(w, kw);
        for (int i = 0; i < dual_dim; ++i) y_new[i] = y[i] + sigma * kw[i];
        pdhg_detail::project_tv_dual(std::span<double>(y_new.data(), 2 * static_cast<std::size_t>(n)), n,
                                     config.tv_variant);
        if (degenerate) {
            for (int i = 0; i < m; ++i) {
                const double yi = y_new[2 * static_cast<std::size_t>(n) + i];
                y_new[2 * static_cast<std::size_t>(n) + i] =
                    std::max(yi - sigma * fu[i], 0.0) + std::min(yi - sigma * fl[i], 0.0);
            }
        } else {
            for (int i = 0; i < m; ++i) {
                double& qi = y_new[2 * static_cast<std::size_t>(n) + i];
                qi = std::max(qi - sigma * fu[i], 0.0);
                double& ri = y_new[2 * static_cast<std::size_t>(n) + m + i];
                ri = std::min(ri - sigma * fl[i], 0.0);
            }
        }

        // relaxation
        for (int i = 0; i < n; ++i) u[i] += rho * (u_new[i] - u[i]);
        for (int i = 0; i < dual_dim; ++i) y[i] += rho * (y_new[i] - y[i]);

        if (config.restart_interval > 0) {
            for (int i = 0; i < n; ++i) u_sum[i] += u[i];
            for (int i = 0; i < dual_dim; ++i) y_sum[i] += y[i];
            ++avg_count;
        }

        if (!check) continue;

        for (int i = 0; i < n; ++i) diff_u[i] = u_prev[i] - u[i];
        for (int i = 0; i < dual_dim; ++i) diff_y[i] = y_prev[i] - y[i];
        stack.adjoint(diff_y, tmp_n);
        double pn = 0.0;
        for (int i = 0; i < n; ++i) {
            const double pi = diff_u[i] / tau - tmp_n[i];
            pn += pi * pi;
        }
        stack.forward(diff_u, tmp_d);
        double dn = 0.0;
        for (int i = 0; i < dual_dim; ++i) {
            const double di = diff_y[i] / sigma - tmp_d[i];
            dn += di * di;
        }
        residual = std::sqrt(pn) / (1.0 + pdhg_detail::norm2(u)) + std::sqrt(dn) / (1.0 + pdhg_detail::norm2(y));

        ConstraintSlacks slacks;
        slack_of(u, slacks);
        const double violation =
            std::max({0.0, slacks.upper_violation, slacks.lower_violation, -slacks.u_min});
        const double scaled_violation = violation / feas_scale;

        if (config.keep_trace || trace_out.is_open()) {
            ImageGrid ug(rows, cols);
            ug.values() = u;
            TraceRow row{iter, tv_value(ug, config.tv_variant) + config.gamma * pdhg_detail::norm2(u), residual,
                         violation};
            if (config.keep_trace) sol.trace.push_back(row);
            if (trace_out.is_open())
                trace_out << row.iteration << "," << row.objective << "," << row.residual << ","
                          << row.max_violation << "\n";
        }

        const double score = residual + scaled_violation;
        if (score < best_score) {
            best_score = score;
            u_best = u;
        }
        if (residual <= config.tolerance && scaled_violation <= config.feasibility_tol) {
            sol.converged = true;
            break;
        }

        // averaging restart; the running mean of (u, y) damps the limit
        // cycles that stall the plain iteration on degenerate problems.
        // Placed after the residual check so that no measured difference
        // spans the jump.
        if (config.restart_interval > 0 && avg_count >= config.restart_interval) {
            const double inv = 1.0 / avg_count;
            for (int i = 0; i < n; ++i) {
                u[i] = u_sum[i] * inv;
                u_sum[i] = 0.0;
            }
            for (int i = 0; i < dual_dim; ++i) {
                y[i] = y_sum[i] * inv;
                y_sum[i] = 0.0;
            }
            avg_count = 0;
        }
    }

    if (!sol.converged && !u_best.empty()) u = u_best;
    sol.iterations_used = std::min(iter, config.max_iterations);
    sol.primal_dual_residual = residual;
    sol.u = ImageGrid(rows, cols);
    sol.u.values() = u;
    slack_of(u, sol.constraint_slacks);
    sol.objective_value = tv_value(sol.u, config.tv_variant) + config.gamma * pdhg_detail::norm2(u);
    return sol;
}

// min TV(u) s.t. u >= 0, ||A u - f||_inf <= c, via the equivalent degenerate
// interval problem with f^l = f - c, f^u = f + c.
inline Solution solve_residual_linf(const SparseMatrix& a, const ImageGrid& f, double c, const SolverConfig& config,
                                    GridShape shape = {}) {
    if (c < 0.0) throw std::invalid_argument("solve_residual_linf: c must be >= 0");
    FeasibilityProblem problem(IntervalOperator(a, a), data_bounds(f, c));
    return solve_constrained_tv(problem, config, shape);
}

}  // namespace ordres
