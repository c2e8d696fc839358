#include "detail.hpp"

#include <cmath>

namespace qpd::detail {

namespace {
constexpr double kTwoPi = 6.283185307179586476925;
}

Eigen::MatrixXd gaussian_blur_operator(int n, double h, double sigma, int pad) {
    const int len = n + 2 * pad;
    if (sigma <= 0.0) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(len, n);
        for (int i = 0; i < n; ++i) e(pad + i, i) = 1.0;
        return e;
    }
    // first column of the circulant smoothing matrix
    Eigen::VectorXd c = Eigen::VectorXd::Zero(len);
    const int j_lo = -(len / 2);
    const int j_hi = j_lo + len - 1;
    for (int d = 0; d < len; ++d) {
        double acc = 0.0;
        for (int j = j_lo; j <= j_hi; ++j) {
            const double k = kTwoPi * j / (len * h);
            acc += std::exp(-0.5 * sigma * sigma * k * k) * std::cos(k * d * h);
        }
        c(d) = acc / len;
    }
    Eigen::MatrixXd op(len, n);
    for (int a = 0; a < len; ++a) {
        for (int i = 0; i < n; ++i) {
            int d = (a - (pad + i)) % len;
            if (d < 0) d += len;
            op(a, i) = c(d);
        }
    }
    return op;
}

int blur_padding(double h, double sigma, double pad_sigmas) {
    return static_cast<int>(std::ceil(pad_sigmas * sigma / h)) + 2;
}

Eigen::MatrixXd gaussian_blur_2d(const Eigen::MatrixXd& v, double hq, double hp, double sigma_q, double sigma_p,
                                 double pad_sigmas, int* pad_q, int* pad_p, double* leaked) {
    const int pq = blur_padding(hq, sigma_q, pad_sigmas);
    const int pp = blur_padding(hp, sigma_p, pad_sigmas);
    const Eigen::MatrixXd bq = gaussian_blur_operator(static_cast<int>(v.rows()), hq, sigma_q, pq);
    const Eigen::MatrixXd bp = gaussian_blur_operator(static_cast<int>(v.cols()), hp, sigma_p, pp);
    Eigen::MatrixXd out = bq * v * bp.transpose();
    if (pad_q) *pad_q = pq;
    if (pad_p) *pad_p = pp;
    if (leaked) {
        const double total = out.cwiseAbs().sum();
        const double inside = out.block(pq, pp, v.rows(), v.cols()).cwiseAbs().sum();
        *leaked = total > 0.0 ? (total - inside) / total : 0.0;
    }
    return out;
}

Eigen::VectorXd symmetric_axis(double extent, double max_step) {
    const int half = static_cast<int>(std::ceil(extent / max_step));
    const int n = 2 * half + 1;
    return Eigen::VectorXd::LinSpaced(n, -half * (extent / half), half * (extent / half));
}

}  // namespace qpd::detail
