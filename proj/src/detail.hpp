#pragma once

// Shared numerical kernels; not part of the installed interface.

#include <Eigen/Dense>
#include <complex>

namespace qpd::detail {

/// Operator taking n uniformly spaced samples (spacing h) to their
/// convolution with a unit-mass Gaussian of standard deviation sigma, sampled
/// on the same nodes extended by `pad` nodes on each side (output length
/// n + 2 pad). The convolution is done spectrally on the zero-padded,
/// periodic sequence, so widths below the spacing are handled exactly.
Eigen::MatrixXd gaussian_blur_operator(int n, double h, double sigma, int pad);

/// Number of padding nodes for a blur of width sigma.
int blur_padding(double h, double sigma, double pad_sigmas);

/// Separable 2-D blur. Returns the padded result; `leaked` receives the
/// fraction of absolute mass landing in the padding.
Eigen::MatrixXd gaussian_blur_2d(const Eigen::MatrixXd& v, double hq, double hp, double sigma_q, double sigma_p,
                                 double pad_sigmas, int* pad_q, int* pad_p, double* leaked);

/// Symmetric uniform axis -extent..extent with spacing at most `max_step`.
Eigen::VectorXd symmetric_axis(double extent, double max_step);

}  // namespace qpd::detail
