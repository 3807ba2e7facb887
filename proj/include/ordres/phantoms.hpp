#pragma once

#include <string>

#include "ordres/errors.hpp"
#include "ordres/image.hpp"

namespace ordres {

// Piecewise-constant 1D test signal in [0, 255].
inline ImageGrid phantom_steps1d(int length) {
    if (length < 8) throw std::invalid_argument("phantom_steps1d: length too small");
    ImageGrid s(length, 1);
    const struct {
        double from, to, value;
    } steps[] = {
        {0.00, 0.10, 10.0},  {0.10, 0.22, 180.0}, {0.22, 0.34, 60.0},  {0.34, 0.44, 220.0},
        {0.44, 0.58, 20.0},  {0.58, 0.70, 140.0}, {0.70, 0.82, 90.0},  {0.82, 1.01, 10.0},
    };
    for (int i = 0; i < length; ++i) {
        const double t = (i + 0.5) / length;
        for (const auto& st : steps)
            if (t >= st.from && t < st.to) {
                s[i] = st.value;
                break;
            }
    }
    return s;
}

// Axis-aligned rectangles of distinct intensities on a flat background.
inline ImageGrid phantom_squares(int rows, int cols) {
    ImageGrid img(rows, cols, 20.0);
    const struct {
        double r0, r1, c0, c1, value;
    } boxes[] = {
        {0.10, 0.35, 0.10, 0.38, 220.0},
        {0.12, 0.42, 0.55, 0.90, 120.0},
        {0.55, 0.90, 0.12, 0.45, 70.0},
        {0.58, 0.86, 0.60, 0.88, 180.0},
    };
    for (const auto& b : boxes) {
        const int r0 = static_cast<int>(b.r0 * rows), r1 = static_cast<int>(b.r1 * rows);
        const int c0 = static_cast<int>(b.c0 * cols), c1 = static_cast<int>(b.c1 * cols);
        for (int r = r0; r < r1; ++r)
            for (int c = c0; c < c1; ++c) img(r, c) = b.value;
    }
    return img;
}

// Horizontal lines of width 1-3 px, including one low-contrast line.
inline ImageGrid phantom_thinlines(int rows, int cols) {
    ImageGrid img(rows, cols, 10.0);
    const struct {
        double at;
        int width;
        double value;
    } lines[] = {
        {0.15, 3, 200.0}, {0.30, 2, 150.0}, {0.45, 1, 230.0},
        {0.60, 2, 40.0},  // low contrast against the background
        {0.75, 3, 90.0},  {0.90, 1, 160.0},
    };
    for (const auto& ln : lines) {
        const int r0 = static_cast<int>(ln.at * rows);
        for (int r = r0; r < std::min(r0 + ln.width, rows); ++r)
            for (int c = 0; c < cols; ++c) img(r, c) = ln.value;
    }
    return img;
}

enum class PhantomKind { steps1d, squares, thinlines, file };

inline PhantomKind phantom_kind_from_string(const std::string& s) {
    if (s == "steps1d") return PhantomKind::steps1d;
    if (s == "squares") return PhantomKind::squares;
    if (s == "thinlines") return PhantomKind::thinlines;
    if (s == "file") return PhantomKind::file;
    throw std::invalid_argument("unknown phantom kind: " + s);
}

inline ImageGrid generate_phantom(PhantomKind kind, int rows, int cols, const std::string& path = "") {
    switch (kind) {
        case PhantomKind::steps1d:
            if (cols != 1) throw std::invalid_argument("generate_phantom: steps1d requires cols = 1");
            return phantom_steps1d(rows);
        case PhantomKind::squares: return phantom_squares(rows, cols);
        case PhantomKind::thinlines: return phantom_thinlines(rows, cols);
        case PhantomKind::file: return read_pgm(path);
    }
    throw std::invalid_argument("generate_phantom: unknown kind");
}

}  // namespace ordres
