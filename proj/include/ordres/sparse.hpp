#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ordres/errors.hpp"

namespace ordres {

// Row-compressed sparse matrix. Column indices are strictly increasing
// within each row; stored values may be zero (pattern and values are kept
// separate concerns).
class SparseMatrix {
public:
    struct Entry {
        int row;
        int col;
        double value;
    };

    SparseMatrix() = default;

    SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(static_cast<std::size_t>(rows) + 1, 0) {
        if (rows <= 0 || cols <= 0) throw std::invalid_argument("SparseMatrix: shape must be positive");
    }

    // Duplicate (row, col) pairs are summed.
    static SparseMatrix from_triplets(int rows, int cols, std::vector<Entry> entries) {
        SparseMatrix m(rows, cols);
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });
        m.col_idx_.reserve(entries.size());
        m.vals_.reserve(entries.size());
        int prev_row = -1, prev_col = -1;
        for (const Entry& e : entries) {
            if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
                throw std::invalid_argument("SparseMatrix: entry out of range");
            if (e.row == prev_row && e.col == prev_col) {
                m.vals_.back() += e.value;
                continue;
            }
            m.col_idx_.push_back(e.col);
            m.vals_.push_back(e.value);
            prev_row = e.row;
            prev_col = e.col;
            m.row_ptr_[static_cast<std::size_t>(e.row) + 1] += 1;
        }
        for (std::size_t r = 1; r < m.row_ptr_.size(); ++r) m.row_ptr_[r] += m.row_ptr_[r - 1];
        return m;
    }

    static SparseMatrix identity(int n) {
        SparseMatrix m(n, n);
        m.col_idx_.resize(n);
        m.vals_.assign(n, 1.0);
        for (int i = 0; i < n; ++i) {
            m.col_idx_[i] = i;
            m.row_ptr_[static_cast<std::size_t>(i) + 1] = static_cast<std::size_t>(i) + 1;
        }
        return m;
    }

    static SparseMatrix from_dense(int rows, int cols, const std::vector<double>& dense, double drop_tol = 0.0) {
        std::vector<Entry> tr;
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                const double v = dense[static_cast<std::size_t>(i) * cols + j];
                if (std::abs(v) > drop_tol) tr.push_back({i, j, v});
            }
        return from_triplets(rows, cols, std::move(tr));
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return vals_.size(); }

    std::span<const int> row_cols(int i) const {
        return {col_idx_.data() + row_ptr_[i], row_ptr_[static_cast<std::size_t>(i) + 1] - row_ptr_[i]};
    }
    std::span<const double> row_values(int i) const {
        return {vals_.data() + row_ptr_[i], row_ptr_[static_cast<std::size_t>(i) + 1] - row_ptr_[i]};
    }
    std::span<double> row_values(int i) {
        return {vals_.data() + row_ptr_[i], row_ptr_[static_cast<std::size_t>(i) + 1] - row_ptr_[i]};
    }

    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return vals_; }
    std::vector<double>& values() { return vals_; }

    double entry(int i, int j) const {
        auto cols = row_cols(i);
        auto it = std::lower_bound(cols.begin(), cols.end(), j);
        if (it == cols.end() || *it != j) return 0.0;
        return vals_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
    }

    bool same_pattern(const SparseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && row_ptr_ == o.row_ptr_ && col_idx_ == o.col_idx_;
    }

    bool same_values(const SparseMatrix& o) const { return same_pattern(o) && vals_ == o.vals_; }

    // y = A x, preallocated output
    void apply(std::span<const double> x, std::span<double> y) const {
        for (int i = 0; i < rows_; ++i) {
            double acc = 0.0;
            const std::size_t lo = row_ptr_[i], hi = row_ptr_[static_cast<std::size_t>(i) + 1];
            for (std::size_t k = lo; k < hi; ++k) acc += vals_[k] * x[col_idx_[k]];
            y[i] = acc;
        }
    }

    // y += alpha * A^T x
    void apply_transpose_add(std::span<const double> x, std::span<double> y, double alpha = 1.0) const {
        for (int i = 0; i < rows_; ++i) {
            const double xi = alpha * x[i];
            if (xi == 0.0) continue;
            const std::size_t lo = row_ptr_[i], hi = row_ptr_[static_cast<std::size_t>(i) + 1];
            for (std::size_t k = lo; k < hi; ++k) y[col_idx_[k]] += vals_[k] * xi;
        }
    }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> y(rows_);
        apply(x, y);
        return y;
    }

    double max_entry() const {
        double m = 0.0;
        for (double v : vals_) m = std::max(m, v);
        return m;
    }

    // Operator norm induced by the vector sup-norm.
    double inf_norm() const {
        double m = 0.0;
        for (int i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (double v : row_values(i)) s += std::abs(v);
            m = std::max(m, s);
        }
        return m;
    }

    double row_sum(int i) const {
        double s = 0.0;
        for (double v : row_values(i)) s += v;
        return s;
    }

    bool all_finite() const {
        for (double v : vals_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    // Drops stored entries with |value| <= tol (pattern pruning, not the
    // thresholding operation).
    SparseMatrix pruned(double tol = 0.0) const {
        std::vector<Entry> tr;
        tr.reserve(nnz());
        for (int i = 0; i < rows_; ++i) {
            auto cols = row_cols(i);
            auto vals = row_values(i);
            for (std::size_t k = 0; k < cols.size(); ++k)
                if (std::abs(vals[k]) > tol) tr.push_back({i, cols[k], vals[k]});
        }
        return from_triplets(rows_, cols_, std::move(tr));
    }

    // Entrywise map over stored entries.
    template <typename F>
    SparseMatrix map_values(F&& f) const {
        SparseMatrix m = *this;
        for (double& v : m.vals_) v = f(v);
        return m;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<int> col_idx_;
    std::vector<double> vals_;
};

// Two matrices rewritten onto the union sparsity pattern (absent entries
// become explicit zeros).
inline std::pair<SparseMatrix, SparseMatrix> unify_pattern(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("unify_pattern: shape mismatch");
    if (a.same_pattern(b)) return {a, b};
    std::vector<SparseMatrix::Entry> ta, tb;
    for (int i = 0; i < a.rows(); ++i) {
        auto ca = a.row_cols(i), cb = b.row_cols(i);
        auto va = a.row_values(i), vb = b.row_values(i);
        std::size_t p = 0, q = 0;
        while (p < ca.size() || q < cb.size()) {
            int col;
            double x = 0.0, y = 0.0;
            if (q >= cb.size() || (p < ca.size() && ca[p] < cb[q])) {
                col = ca[p];
                x = va[p++];
            } else if (p >= ca.size() || cb[q] < ca[p]) {
                col = cb[q];
                y = vb[q++];
            } else {
                col = ca[p];
                x = va[p++];
                y = vb[q++];
            }
            ta.push_back({i, col, x});
            tb.push_back({i, col, y});
        }
    }
    return {SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(ta)),
            SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(tb))};
}

// Elementwise binary op over the union pattern.
template <typename F>
SparseMatrix combine(const SparseMatrix& a, const SparseMatrix& b, F&& f) {
    auto [ua, ub] = unify_pattern(a, b);
    SparseMatrix out = ua;
    for (std::size_t k = 0; k < out.values().size(); ++k) out.values()[k] = f(ua.values()[k], ub.values()[k]);
    return out;
}

// ---- MatrixMarket coordinate text format ----

inline void write_matrix_market(const SparseMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_matrix_market: cannot open " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
    out.precision(17);
    for (int i = 0; i < m.rows(); ++i) {
        auto cols = m.row_cols(i);
        auto vals = m.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) out << i + 1 << " " << cols[k] + 1 << " " << vals[k] << "\n";
    }
}

inline SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_matrix_market: cannot open " + path);
    std::string line;
    bool header_seen = false;
    int rows = 0, cols = 0;
    long long nnz = -1;
    std::vector<SparseMatrix::Entry> tr;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '%') {
            if (!header_seen && line.rfind("%%MatrixMarket", 0) == 0) {
                std::istringstream hs(line);
                std::string tag, obj, fmt, field, sym;
                hs >> tag >> obj >> fmt >> field >> sym;
                if (obj != "matrix" || fmt != "coordinate" || field != "real" || sym != "general")
                    throw std::runtime_error("read_matrix_market: unsupported header in " + path);
                header_seen = true;
            }
            continue;
        }
        std::istringstream ls(line);
        if (nnz < 0) {
            if (!(ls >> rows >> cols >> nnz)) throw std::runtime_error("read_matrix_market: bad size line in " + path);
            tr.reserve(static_cast<std::size_t>(nnz));
            continue;
        }
        int i, j;
        double v;
        if (!(ls >> i >> j >> v)) throw std::runtime_error("read_matrix_market: bad entry line in " + path);
        tr.push_back({i - 1, j - 1, v});
    }
    if (nnz < 0 || static_cast<long long>(tr.size()) != nnz)
        throw std::runtime_error("read_matrix_market: entry count mismatch in " + path);
    return SparseMatrix::from_triplets(rows, cols, std::move(tr));
}

}  // namespace ordres
