#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "ordres/errors.hpp"
#include "ordres/image.hpp"

namespace ordres {

// Peak signal-to-noise ratio in dB; identical images report +infinity.
inline double psnr(const ImageGrid& u, const ImageGrid& reference, double peak = 255.0) {
    require_same_shape(u, reference, "psnr");
    double mse = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - reference[i];
        mse += d * d;
    }
    mse /= static_cast<double>(u.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

struct SsimParams {
    int window = 11;
    double window_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
};

// Mean local structural similarity with a Gaussian window, evaluated over
// the region where the full window fits. 1D signals use a 1D window of the
// same length.
inline double ssim(const ImageGrid& u, const ImageGrid& reference, const SsimParams& params = {}) {
    require_same_shape(u, reference, "ssim");
    const int win = params.window;
    const int half = win / 2;
    const bool is_1d = u.cols() == 1;
    if ((is_1d && u.rows() < win) || (!is_1d && (u.rows() < win || u.cols() < win)))
        throw std::invalid_argument("ssim: window does not fit within image");

    std::vector<double> w(win);
    double wsum = 0.0;
    for (int i = 0; i < win; ++i) {
        const double t = i - half;
        w[i] = std::exp(-t * t / (2.0 * params.window_sigma * params.window_sigma));
        wsum += w[i];
    }
    for (double& x : w) x /= wsum;

    const double c1 = params.k1 * params.dynamic_range * params.k1 * params.dynamic_range;
    const double c2 = params.k2 * params.dynamic_range * params.k2 * params.dynamic_range;

    double acc = 0.0;
    long count = 0;
    const int row_lo = half, row_hi = u.rows() - half;
    const int col_lo = is_1d ? 0 : half;
    const int col_hi = is_1d ? 1 : u.cols() - half;
    for (int r = row_lo; r < row_hi; ++r) {
        for (int c = col_lo; c < col_hi; ++c) {
            double mx = 0.0, my = 0.0, mxx = 0.0, myy = 0.0, mxy = 0.0;
            if (is_1d) {
                for (int dr = -half; dr <= half; ++dr) {
                    const double wi = w[dr + half];
                    const double x = u(r + dr, 0), y = reference(r + dr, 0);
                    mx += wi * x;
                    my += wi * y;
                    mxx += wi * x * x;
                    myy += wi * y * y;
                    mxy += wi * x * y;
                }
            } else {
                for (int dr = -half; dr <= half; ++dr) {
                    for (int dc = -half; dc <= half; ++dc) {
                        const double wi = w[dr + half] * w[dc + half];
                        const double x = u(r + dr, c + dc), y = reference(r + dr, c + dc);
                        mx += wi * x;
                        my += wi * y;
                        mxx += wi * x * x;
                        myy += wi * y * y;
                        mxy += wi * x * y;
                    }
                }
            }
            const double vx = mxx - mx * mx;
            const double vy = myy - my * my;
            const double vxy = mxy - mx * my;
            acc += ((2.0 * mx * my + c1) * (2.0 * vxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

}  // namespace ordres
