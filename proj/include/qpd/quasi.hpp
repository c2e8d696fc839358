#pragma once

// Quasi-probability distributions on phase-space grids.
//
// Every distribution here is an alpha-plane density: the grid is laid out in
// (q, p) under a LadderConvention, but values are normalised so that
//   integral F d^2 alpha = 1,   d^2 alpha = dq dp / (2 hbar).
// With this convention the Husimi function is Q(alpha) = <alpha|rho|alpha> / pi,
// the vacuum Wigner function is (2/pi) e^{-2|alpha|^2}, and the thermal
// P function is e^{-|alpha|^2/nbar} / (pi nbar). Expectation values are plain
// integrals of distribution x dual symbol against d^2 alpha.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qpd/fock_core.hpp"

namespace qpd {

/// Uniform rectangular sampling of (q, p); node i of the q axis is
/// q_min + i * dq with dq = (q_max - q_min) / (nq - 1).
struct PhaseGrid {
    double q_min = -6.0;
    double q_max = 6.0;
    double p_min = -6.0;
    double p_max = 6.0;
    int nq = 128;
    int np = 128;

    void validate() const;
    double dq() const { return (q_max - q_min) / (nq - 1); }
    double dp() const { return (p_max - p_min) / (np - 1); }
    double q(int i) const { return q_min + i * dq(); }
    double p(int j) const { return p_min + j * dp(); }
    /// d^2 alpha of one cell.
    double cell_area(const LadderConvention& conv) const { return dq() * dp() * conv.alpha_area_per_qp(); }
    /// Grid with every coordinate multiplied by `factor`.
    PhaseGrid scaled(double factor) const;
    bool contains(double q, double p) const;

    static PhaseGrid square(double half_extent, int n);
    /// Grid covering +-`widths` natural widths around the state's mean.
    static PhaseGrid for_state(const DensityMatrix& rho, const LadderConvention& conv, double widths = 6.0,
                               int n = 128);
};

enum class Ordering { normal, symmetric, antinormal };

std::string to_string(Ordering o);
Ordering parse_ordering(const std::string& s);

/// What a grid of values represents.
struct DistributionKind {
    enum class Family { s_param, cohen, symbol, smoothed };

    Family family = Family::s_param;
    double s = 0.0;                         ///< s_param: +1 P, 0 W, -1 Q
    std::string label;                      ///< cohen kernel id
    Ordering ordering = Ordering::symmetric;  ///< symbol ordering
    double kappa = 0.0;                     ///< smoothed: kernel width parameter

    static DistributionKind s_param(double s);
    static DistributionKind cohen(std::string kernel_id);
    static DistributionKind symbol(Ordering o);
    static DistributionKind smoothed(double kappa);

    bool is_s(double value, double tol = 1e-12) const { return family == Family::s_param && std::abs(s - value) <= tol; }
    std::string describe() const;
    bool operator==(const DistributionKind&) const = default;
};

/// Values are stored nq x np: values(i, j) at (q_i, p_j).
struct QuasiDistribution {
    PhaseGrid grid;
    LadderConvention convention;
    Eigen::MatrixXd values;
    DistributionKind kind;
    Diagnostics diagnostics;

    double integral() const;
    /// Mean of alpha under the distribution (as a density).
    cplx mean_alpha() const;
    double min_value() const { return values.minCoeff(); }
    double max_value() const { return values.maxCoeff(); }
    /// Bicubic (Catmull-Rom) interpolation; zero outside the grid.
    double interpolate(double q, double p) const;
    /// Writes "normalization", "min_value", "max_value" into diagnostics.
    void refresh_diagnostics();
};

// ---- point evaluations ----------------------------------------------------

/// Tr(D(beta) rho) e^{s |beta|^2 / 2}.
cplx characteristic_function(const DensityMatrix& rho, cplx beta, double s);

/// <alpha|rho|alpha> / pi with the exact coherent-state coefficients.
double husimi_direct(const DensityMatrix& rho, cplx alpha);

struct WignerOptions {
    double tail_tolerance = 1e-12;  ///< integrand magnitude allowed at the u cutoff
    double extent_widths = 8.0;     ///< u extent beyond the classical turning point
    double oversample = 1.0;        ///< multiplies the sample density
};

/// Quadrature of  int du rho(q+u/2, q-u/2) e^{-i p u / hbar}, converted to the
/// alpha-plane density (division by pi). Position matrix elements are built
/// from oscillator eigenfunctions under `conv`.
double wigner_direct(const DensityMatrix& rho, double q, double p, const LadderConvention& conv = {},
                     const WignerOptions& opts = {});

/// wigner_direct on every grid node, sharing the position-representation work.
QuasiDistribution wigner_direct_grid(const DensityMatrix& rho, const PhaseGrid& grid,
                                     const LadderConvention& conv = {}, const WignerOptions& opts = {});

QuasiDistribution husimi_direct_grid(const DensityMatrix& rho, const PhaseGrid& grid,
                                     const LadderConvention& conv = {});

/// Oscillator eigenfunctions phi_0..phi_{count-1} at position x.
Eigen::VectorXd oscillator_functions(double x, int count, const LadderConvention& conv = {});
/// <x|rho|x'>.
cplx position_matrix_element(const DensityMatrix& rho, double x, double x_prime, const LadderConvention& conv = {});
/// <p|rho|p>, the momentum probability density.
double momentum_density(const DensityMatrix& rho, double p, const LadderConvention& conv = {});

// ---- grid transforms --------------------------------------------------------

struct TransformOptions {
    /// |G(beta)| allowed on the boundary of the beta grid, relative to G(0) = 1.
    double decay_threshold = 1e-12;
    /// When |G| stops decreasing before reaching decay_threshold (the
    /// numerical floor of s > 0 transforms), the transform proceeds with a
    /// warning if the floor is below this level, and throws IllPosed otherwise.
    double floor_tolerance = 1e-6;
    /// beta-grid spacing is chosen so the alias period exceeds this multiple
    /// of the alpha-grid extent.
    double alias_margin = 2.0;
    double max_beta_extent = 40.0;
    /// Imaginary residual above which a warning is recorded.
    double imaginary_tolerance = 1e-8;
    /// Opt-in Gaussian regularisation: evaluates at s - regularization.
    double regularization = 0.0;
};

/// F(alpha, s) = (1/pi^2) int d^2 beta G(beta, s) e^{alpha beta* - alpha* beta}.
/// Throws IllPosed when G does not decay within max_beta_extent.
QuasiDistribution s_distribution(const DensityMatrix& rho, const PhaseGrid& grid, double s,
                                 const LadderConvention& conv = {}, const TransformOptions& opts = {});

/// kappa for which weierstrass_smooth maps s -> s - 1 (the coherent-state width).
double matched_smoothing_width(const LadderConvention& conv);

struct SmoothOptions {
    double leak_tolerance = 1e-6;  ///< kernel mass allowed to leave the grid
    double pad_sigmas = 10.0;
};

/// Convolution with  exp(-(kappa (q~ - q)^2 + (p~ - p)^2 / kappa) / hbar) / (pi hbar).
/// The kernel integrates to one, so normalisation is preserved. At the matched
/// width an s_param(s) input becomes s_param(s - 1).
QuasiDistribution weierstrass_smooth(const QuasiDistribution& w, double kappa, const SmoothOptions& opts = {});

struct MehtaOptions {
    double decay_threshold = 1e-6;  ///< |e^{|v|^2} <-v|rho|v>| required on the v-grid boundary
    double max_extent = 12.0;
    double alias_margin = 2.0;
    /// When false, a non-decaying input is reported through the "ill_posed"
    /// diagnostic instead of an exception.
    bool throw_on_ill_posed = true;
};

/// Glauber-Sudarshan P via P(alpha) e^{-|alpha|^2} = FT[e^{|v|^2} <-v|rho|v>].
/// Records "condition_estimate" (largest e^{|alpha|^2} applied) and throws
/// IllPosed when the transform input does not decay.
QuasiDistribution mehta_p(const DensityMatrix& rho, const PhaseGrid& grid, const LadderConvention& conv = {},
                          const MehtaOptions& opts = {});

// ---- Cohen class ----------------------------------------------------------

/// Kernel Phi(theta, tau) multiplying the ambiguity function; theta is
/// conjugate to q and tau is a position lag.
class CohenKernel {
  public:
    static CohenKernel identity();
    /// exp(-sigma^2 theta^2 / 2 - tau^2 / (8 sigma^2)): Gaussian smoothing
    /// with position width sigma and momentum width hbar / (2 sigma).
    static CohenKernel gaussian(double sigma);
    /// Gaussian whose output is the Husimi function under `conv`.
    static CohenKernel matched_gaussian(const LadderConvention& conv);
    /// Bilinear interpolation of samples on a rectangular (theta, tau) table;
    /// zero outside the table.
    static CohenKernel tabulated(std::vector<double> theta_axis, std::vector<double> tau_axis,
                                 Eigen::MatrixXcd samples);

    cplx operator()(double theta, double tau) const { return fn_(theta, tau); }
    const std::string& id() const { return id_; }

  private:
    CohenKernel(std::string id, std::function<cplx(double, double)> fn);
    std::string id_;
    std::function<cplx(double, double)> fn_;
};

/// A wavefunction sampled on a uniform q axis.
struct SampledWavefunction {
    double q_min = 0.0;
    double dq = 0.0;
    Eigen::VectorXcd values;
};

/// Samples sum_n c_n phi_n(q) on the grid's q axis.
SampledWavefunction sample_wavefunction(const StateVector& psi, const PhaseGrid& grid,
                                        const LadderConvention& conv = {});

struct CohenOptions {
    double edge_tolerance = 1e-6;  ///< |psi| / max |psi| allowed at the ends of the sampled axis
};

/// Two-point product psi*(q - tau/2) psi(q + tau/2) -> ambiguity plane ->
/// multiply by Phi -> back to (q, p). Phi = 1 yields the Wigner function.
QuasiDistribution cohen_distribution(const SampledWavefunction& psi, const CohenKernel& kernel,
                                     const PhaseGrid& grid, const LadderConvention& conv = {},
                                     const CohenOptions& opts = {});

// ---- symbols and expectation values ----------------------------------------

/// Tabulates an operator symbol g(alpha) on the grid.
QuasiDistribution symbol_grid(const PhaseGrid& grid, Ordering ordering, const std::function<double(cplx)>& g,
                              const LadderConvention& conv = {});

/// int g(alpha) F(alpha) d^2 alpha for the dual pairs (normal symbol, P),
/// (symmetric symbol, W), (anti-normal symbol, Q). Throws ValidationError on a
/// kind or grid mismatch.
double expectation_from_symbols(const QuasiDistribution& g_symbol, const QuasiDistribution& rho_dist);

}  // namespace qpd
