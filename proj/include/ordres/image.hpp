#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ordres/errors.hpp"

namespace ordres {

// Dense real-valued grid, row-major. 1D signals use cols == 1.
class ImageGrid {
public:
    ImageGrid() = default;

    ImageGrid(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(static_cast<std::size_t>(rows) * cols, fill) {
        if (rows <= 0 || cols <= 0) throw std::invalid_argument("ImageGrid: shape must be positive");
    }

    static ImageGrid column(std::vector<double> values) {
        if (values.empty()) throw std::invalid_argument("ImageGrid: empty signal");
        ImageGrid g;
        g.rows_ = static_cast<int>(values.size());
        g.cols_ = 1;
        g.values_ = std::move(values);
        return g;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }
    bool same_shape(const ImageGrid& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    double& operator()(int r, int c) { return values_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return values_[static_cast<std::size_t>(r) * cols_ + c]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double min_value() const { return *std::min_element(values_.begin(), values_.end()); }
    double max_value() const { return *std::max_element(values_.begin(), values_.end()); }

    double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    ImageGrid& operator+=(double s) {
        for (double& v : values_) v += s;
        return *this;
    }

    friend ImageGrid operator+(ImageGrid g, double s) { return g += s; }
    friend ImageGrid operator-(ImageGrid g, double s) { return g += -s; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> values_;
};

inline void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* where) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(where) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()) + ")");
}

// ---- binary PGM (P5), 8 bit ----

inline void write_pgm(const ImageGrid& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
    out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
    for (double v : img.values()) {
        const double q = std::clamp(std::round(v), 0.0, 255.0);
        out.put(static_cast<char>(static_cast<std::uint8_t>(q)));
    }
    if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

inline ImageGrid read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("read_pgm: not a binary PGM: " + path);
    auto next_int = [&in, &path]() {
        // skip whitespace and '#' comment lines
        int c = in.peek();
        while (c == '#' || std::isspace(c)) {
            if (c == '#') in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
            else in.get();
            c = in.peek();
        }
        int v;
        if (!(in >> v)) throw std::runtime_error("read_pgm: malformed header in " + path);
        return v;
    };
    const int cols = next_int();
    const int rows = next_int();
    const int maxval = next_int();
    if (maxval <= 0 || maxval > 255) throw std::runtime_error("read_pgm: unsupported maxval in " + path);
    in.get();  // single whitespace after maxval
    ImageGrid img(rows, cols);
    std::vector<char> buf(img.size());
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
        throw std::runtime_error("read_pgm: truncated pixel data in " + path);
    for (std::size_t i = 0; i < buf.size(); ++i) img[i] = static_cast<double>(static_cast<std::uint8_t>(buf[i]));
    return img;
}

// ---- single-column CSV for 1D signals ----

inline void write_signal_csv(const ImageGrid& sig, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_signal_csv: cannot open " + path);
    out.precision(17);
    for (double v : sig.values()) out << v << "\n";
}

inline ImageGrid read_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_signal_csv: cannot open " + path);
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        vals.push_back(std::stod(line));
    }
    if (vals.empty()) throw std::runtime_error("read_signal_csv: no data in " + path);
    return ImageGrid::column(std::move(vals));
}

}  // namespace ordres
