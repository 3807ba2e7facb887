#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ordres/errors.hpp"
#include "ordres/image.hpp"
#include "ordres/rng.hpp"
#include "ordres/sparse.hpp"

namespace ordres {

enum class Boundary { dirichlet, neumann };

inline Boundary boundary_from_string(const std::string& s) {
    if (s == "dirichlet") return Boundary::dirichlet;
    if (s == "neumann") return Boundary::neumann;
    throw std::invalid_argument("unknown boundary condition: " + s);
}

// Elementwise lower/upper matrices on a unified sparsity pattern.
class IntervalOperator {
public:
    IntervalOperator(SparseMatrix lower, SparseMatrix upper) {
        auto [lo, up] = unify_pattern(lower, upper);
        for (std::size_t k = 0; k < lo.values().size(); ++k)
            if (lo.values()[k] > up.values()[k])
                throw inconsistent_bounds_error("IntervalOperator: lower exceeds upper");
        lower_ = std::move(lo);
        upper_ = std::move(up);
    }

    const SparseMatrix& lower() const { return lower_; }
    const SparseMatrix& upper() const { return upper_; }
    int rows() const { return lower_.rows(); }
    int cols() const { return lower_.cols(); }

    bool degenerate() const { return lower_.values() == upper_.values(); }

    // Membership of a concrete matrix in the order interval. Entries off the
    // stored pattern must be zero.
    bool contains(const SparseMatrix& a, double tol = 0.0) const {
        if (a.rows() != rows() || a.cols() != cols()) return false;
        for (int i = 0; i < rows(); ++i) {
            auto cols_i = a.row_cols(i);
            auto vals_i = a.row_values(i);
            for (std::size_t k = 0; k < cols_i.size(); ++k) {
                const double lo = lower_.entry(i, cols_i[k]);
                const double up = upper_.entry(i, cols_i[k]);
                if (vals_i[k] < lo - tol || vals_i[k] > up + tol) return false;
            }
        }
        return true;
    }

private:
    SparseMatrix lower_;
    SparseMatrix upper_;
};

// Data order-interval with an optional point estimate.
struct BoundedData {
    ImageGrid lower;
    ImageGrid upper;
    std::optional<ImageGrid> point;

    BoundedData(ImageGrid lo, ImageGrid up, std::optional<ImageGrid> pt = std::nullopt)
        : lower(std::move(lo)), upper(std::move(up)), point(std::move(pt)) {
        require_same_shape(lower, upper, "BoundedData");
        for (std::size_t i = 0; i < lower.size(); ++i)
            if (lower[i] > upper[i]) throw inconsistent_bounds_error("BoundedData: lower exceeds upper");
        if (point) {
            require_same_shape(lower, *point, "BoundedData");
            for (std::size_t i = 0; i < lower.size(); ++i)
                if ((*point)[i] < lower[i] || (*point)[i] > upper[i])
                    throw inconsistent_bounds_error("BoundedData: point outside interval");
        }
    }

    bool degenerate() const { return lower.values() == upper.values(); }
};

struct MidpointRepresentation {
    SparseMatrix operator_center;  // A_h
    ImageGrid data_center;         // f_delta
    double operator_radius;        // h
    double data_radius;            // delta
};

namespace detail {

inline std::vector<double> gaussian_kernel(double sigma, int radius) {
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        k[i + radius] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

inline int default_radius(double sigma) { return std::max(1, static_cast<int>(std::ceil(4.0 * sigma))); }

}  // namespace detail

// Convolution matrix of a truncated, normalized Gaussian. Dirichlet drops
// out-of-range taps (boundary rows sum to < 1); Neumann folds them onto the
// clamped pixel (every row sums to 1). radius < 0 selects ceil(4*sigma).
inline SparseMatrix gaussian_blur_matrix_1d(int n, double sigma, Boundary boundary, int radius = -1) {
    if (n <= 0) throw std::invalid_argument("gaussian_blur_matrix_1d: n must be positive");
    if (sigma <= 0.0) throw std::invalid_argument("gaussian_blur_matrix_1d: sigma must be positive");
    const int r = radius < 0 ? detail::default_radius(sigma) : radius;
    const auto kernel = detail::gaussian_kernel(sigma, r);
    std::vector<SparseMatrix::Entry> tr;
    tr.reserve(static_cast<std::size_t>(n) * kernel.size());
    for (int i = 0; i < n; ++i) {
        for (int t = -r; t <= r; ++t) {
            int j = i + t;
            if (boundary == Boundary::dirichlet) {
                if (j < 0 || j >= n) continue;
            } else {
                j = std::clamp(j, 0, n - 1);
            }
            tr.push_back({i, j, kernel[t + r]});
        }
    }
    return SparseMatrix::from_triplets(n, n, std::move(tr));
}

// Acts on row-major vectorized images of the given shape.
inline SparseMatrix gaussian_blur_matrix_2d(int rows, int cols, double sigma, Boundary boundary, int radius = -1) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("gaussian_blur_matrix_2d: shape must be positive");
    if (sigma <= 0.0) throw std::invalid_argument("gaussian_blur_matrix_2d: sigma must be positive");
    const int r = radius < 0 ? detail::default_radius(sigma) : radius;
    const auto kernel = detail::gaussian_kernel(sigma, r);
    const int n = rows * cols;
    std::vector<SparseMatrix::Entry> tr;
    tr.reserve(static_cast<std::size_t>(n) * kernel.size() * kernel.size());
    for (int pr = 0; pr < rows; ++pr) {
        for (int pc = 0; pc < cols; ++pc) {
            const int out = pr * cols + pc;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    int sr = pr + dy, sc = pc + dx;
                    if (boundary == Boundary::dirichlet) {
                        if (sr < 0 || sr >= rows || sc < 0 || sc >= cols) continue;
                    } else {
                        sr = std::clamp(sr, 0, rows - 1);
                        sc = std::clamp(sc, 0, cols - 1);
                    }
                    tr.push_back({out, sr * cols + sc, kernel[dy + r] * kernel[dx + r]});
                }
            }
        }
    }
    return SparseMatrix::from_triplets(n, n, std::move(tr));
}

// Entrywise noise a_ij -> max{a_ij + r_ij * d, 0} with d = relative_level *
// max entry of A and r_ij i.i.d. uniform on [-1, 1]. Noise is drawn for every
// entry of the window pattern in row-major order, so results are
// bit-reproducible for a fixed seed. Without a window, only stored entries
// of A are perturbed.
inline SparseMatrix perturb_operator(const SparseMatrix& a, double relative_level, std::uint64_t seed,
                                     const SparseMatrix* window = nullptr) {
    if (relative_level < 0.0) throw std::invalid_argument("perturb_operator: relative_level must be >= 0");
    if (relative_level == 0.0) return a;
    const double d = relative_level * a.max_entry();
    Rng rng(seed);
    const SparseMatrix& pat = window ? *window : a;
    if (window && (window->rows() != a.rows() || window->cols() != a.cols()))
        throw std::invalid_argument("perturb_operator: window shape mismatch");
    std::vector<SparseMatrix::Entry> tr;
    tr.reserve(pat.nnz());
    for (int i = 0; i < pat.rows(); ++i) {
        for (int j : pat.row_cols(i)) {
            const double noisy = std::max(a.entry(i, j) + rng.uniform_pm1() * d, 0.0);
            if (noisy != 0.0) tr.push_back({i, j, noisy});
        }
    }
    return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(tr));
}

// Sets entries < threshold to zero, then rescales each row to unit sum.
inline SparseMatrix threshold_and_normalize(const SparseMatrix& a, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("threshold_and_normalize: threshold must be >= 0");
    std::vector<SparseMatrix::Entry> tr;
    tr.reserve(a.nnz());
    for (int i = 0; i < a.rows(); ++i) {
        auto cols = a.row_cols(i);
        auto vals = a.row_values(i);
        double sum = 0.0;
        std::size_t first = tr.size();
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (vals[k] < threshold) continue;
            tr.push_back({i, cols[k], vals[k]});
            sum += vals[k];
        }
        if (tr.size() == first || sum <= 0.0)
            throw degenerate_row_error("threshold_and_normalize: row empty after thresholding", i);
        for (std::size_t k = first; k < tr.size(); ++k) tr[k].value /= sum;
    }
    return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(tr));
}

// Order interval around an estimated operator: upper = a + d, lower =
// max{a - d, 0} on the stored pattern. support_aware keeps the upper bound
// at zero wherever the estimate is zero; otherwise entries of the window
// pattern that are absent from (or zero in) the estimate get [0, d].
inline IntervalOperator interval_from_estimate(const SparseMatrix& a, double d, bool support_aware,
                                               const SparseMatrix* window = nullptr) {
    if (d < 0.0) throw std::invalid_argument("interval_from_estimate: d must be >= 0");
    std::vector<SparseMatrix::Entry> lo, up;
    const SparseMatrix& pat = (!support_aware && window) ? *window : a;
    if (window && (window->rows() != a.rows() || window->cols() != a.cols()))
        throw std::invalid_argument("interval_from_estimate: window shape mismatch");
    for (int i = 0; i < pat.rows(); ++i) {
        for (int j : pat.row_cols(i)) {
            const double v = a.entry(i, j);
            if (v == 0.0 && support_aware) continue;  // bounds pinned to [0, 0]
            lo.push_back({i, j, std::max(v - d, 0.0)});
            up.push_back({i, j, v + d});
        }
    }
    return IntervalOperator(SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(lo)),
                            SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(up)));
}

// f^l = f - c, f^u = f + c, point = f.
inline BoundedData data_bounds(const ImageGrid& f, double c) {
    if (c < 0.0) throw std::invalid_argument("data_bounds: c must be >= 0");
    return BoundedData(f - c, f + c, f);
}

// Center/radius form: A_h = (A^u + A^l)/2, f_d = (f^u + f^l)/2, with radii
// measured in the sup-norm convention (max absolute row sum for operators).
inline MidpointRepresentation midpoint_representation(const IntervalOperator& op, const BoundedData& data) {
    SparseMatrix center = op.lower();
    SparseMatrix half_width = op.lower();
    const auto& lo = op.lower().values();
    const auto& up = op.upper().values();
    for (std::size_t k = 0; k < lo.size(); ++k) {
        center.values()[k] = 0.5 * (up[k] + lo[k]);
        half_width.values()[k] = 0.5 * (up[k] - lo[k]);
    }
    ImageGrid fd = data.lower;
    double delta = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
        fd[i] = 0.5 * (data.upper[i] + data.lower[i]);
        delta = std::max(delta, 0.5 * (data.upper[i] - data.lower[i]));
    }
    return {std::move(center), std::move(fd), half_width.inf_norm(), delta};
}

// Running supremum of lower bounds and infimum of upper bounds.
inline std::vector<BoundedData> monotonize_bounds(const std::vector<BoundedData>& seq) {
    if (seq.empty()) throw std::invalid_argument("monotonize_bounds: empty sequence");
    std::vector<BoundedData> out;
    out.reserve(seq.size());
    ImageGrid lo = seq.front().lower, up = seq.front().upper;
    require_same_shape(lo, up, "monotonize_bounds");
    for (std::size_t n = 0; n < seq.size(); ++n) {
        require_same_shape(seq[n].lower, lo, "monotonize_bounds");
        for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] = std::max(lo[i], seq[n].lower[i]);
            up[i] = std::min(up[i], seq[n].upper[i]);
            if (lo[i] > up[i])
                throw inconsistent_bounds_error("monotonize_bounds: lower exceeds upper at step " +
                                                std::to_string(n + 1) + " (" + std::to_string(lo[i]) + " > " +
                                                std::to_string(up[i]) + ")");
        }
        out.emplace_back(lo, up);
    }
    return out;
}

inline std::vector<IntervalOperator> monotonize_bounds(const std::vector<IntervalOperator>& seq) {
    if (seq.empty()) throw std::invalid_argument("monotonize_bounds: empty sequence");
    std::vector<IntervalOperator> out;
    out.reserve(seq.size());
    SparseMatrix lo = seq.front().lower(), up = seq.front().upper();
    for (std::size_t n = 0; n < seq.size(); ++n) {
        lo = combine(lo, seq[n].lower(), [](double a, double b) { return std::max(a, b); });
        up = combine(up, seq[n].upper(), [](double a, double b) { return std::min(a, b); });
        auto [l2, u2] = unify_pattern(lo, up);
        for (std::size_t k = 0; k < l2.values().size(); ++k)
            if (l2.values()[k] > u2.values()[k])
                throw inconsistent_bounds_error("monotonize_bounds: lower exceeds upper at step " +
                                                std::to_string(n + 1));
        out.emplace_back(l2, u2);
        lo = std::move(l2);
        up = std::move(u2);
    }
    return out;
}

}  // namespace ordres
