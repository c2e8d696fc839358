#pragma once

// Truncated Fock-space linear algebra: ladder operators, displacement and
// squeeze operators, the su(1,1) 2x2 identity behind the squeeze
// decomposition, and density-matrix validation.

#include <complex>
#include <Eigen/Dense>

#include "qpd/errors.hpp"

namespace qpd {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Truncation level: basis |0>, ..., |dim-1>.
class FockSpace {
  public:
    explicit FockSpace(int dim);
    int dim() const noexcept { return dim_; }
    bool operator==(const FockSpace&) const = default;

  private:
    int dim_;
};

/// Fixes the phase-space <-> complex-amplitude map
///   alpha = (2 hbar)^{-1/2} (lambda q + i p / lambda).
struct LadderConvention {
    double hbar = 1.0;
    double lambda = 1.0;

    void validate() const;
    cplx to_alpha(double q, double p) const;
    double q_of(cplx alpha) const;
    double p_of(cplx alpha) const;
    /// d^2 alpha per unit dq dp.
    double alpha_area_per_qp() const { return 1.0 / (2.0 * hbar); }
    bool operator==(const LadderConvention&) const = default;
};

/// zeta = r e^{i theta}; theta is defined as 0 when r == 0.
class SqueezeParameter {
  public:
    SqueezeParameter() = default;
    SqueezeParameter(cplx zeta);  // NOLINT: implicit on purpose
    static SqueezeParameter polar(double r, double theta);

    cplx zeta() const noexcept { return zeta_; }
    double r() const noexcept { return std::abs(zeta_); }
    double theta() const noexcept;

  private:
    cplx zeta_{0.0, 0.0};
};

struct Tolerances {
    double algebraic = 1e-10;
    double truncation = 1e-6;
};

ComplexMatrix annihilation(FockSpace space);
ComplexMatrix creation(FockSpace space);
ComplexMatrix number_operator(FockSpace space);
ComplexMatrix identity(FockSpace space);

/// Dense matrix exponential (Pade scaling and squaring).
ComplexMatrix expm(const ComplexMatrix& m);

/// |<dim-1| M |0>|^2: weight the image of the vacuum leaves in the last level.
double ground_tail_weight(const ComplexMatrix& m);

/// exp(alpha a+ - alpha* a) on the truncated space. Accurate on the low
/// levels when |alpha|^2 << dim; a warning is recorded in `diag` when the
/// displaced vacuum reaches the top level above `tol.truncation`.
ComplexMatrix displacement(cplx alpha, FockSpace space, Diagnostics* diag = nullptr,
                           const Tolerances& tol = {});

/// Fock matrix elements <m|D(beta)|n> of the untruncated displacement operator,
/// projected onto the first `space.dim()` levels. Uses the associated Laguerre
/// form with a normalised three-term recurrence.
ComplexMatrix displacement_elements(cplx beta, FockSpace space);

/// exp(1/2 (zeta* a^2 - zeta a+^2)) by direct exponentiation.
ComplexMatrix squeeze_direct(const SqueezeParameter& zeta, FockSpace space,
                             Diagnostics* diag = nullptr, const Tolerances& tol = {});

/// Three-factor form
///   exp(-1/2 e^{i theta} tanh r a+^2) exp(-ln cosh r (1/2 + a+a)) exp(1/2 e^{-i theta} tanh r a^2),
/// with each factor exponentiated from its own generator.
ComplexMatrix squeeze_decomposed(const SqueezeParameter& zeta, FockSpace space,
                                 Diagnostics* diag = nullptr, const Tolerances& tol = {});

/// Generators of the 2x2 representation: K0 <-> {a,a+}/4, K- <-> a^2/2, K+ <-> a+^2/2.
struct Su11Generators {
    Eigen::Matrix2cd k0;
    Eigen::Matrix2cd k_minus;
    Eigen::Matrix2cd k_plus;
};
Su11Generators su11_generators();

/// e^{a K+} e^{c K0} e^{b K-} in the 2x2 representation.
Eigen::Matrix2cd su11_ordered_product(cplx a, cplx c, cplx b);

struct BchIdentity {
    Eigen::Matrix2cd numerical;    ///< exp([[0, zeta*], [zeta, 0]]) by series
    Eigen::Matrix2cd closed_form;  ///< cosh / sinh form
    cplx a;                        ///< coefficient of K+
    cplx b;                        ///< coefficient of K-
    double c;                      ///< coefficient of K0
};

BchIdentity bch_matrix_identity(const SqueezeParameter& zeta);

/// Largest singular value of the leading n x n block.
double block_norm(const ComplexMatrix& m, int n);

struct DensityReport {
    double hermiticity = 0.0;  ///< ||rho - rho^dagger||_F
    double trace_error = 0.0;  ///< |Tr rho - 1|
    double min_eigenvalue = 0.0;
    double tail_weight = 0.0;  ///< <dim-1|rho|dim-1>
};

/// Validated density operator on a truncated Fock space.
class DensityMatrix {
  public:
    /// Throws ValidationError naming the violated invariant.
    explicit DensityMatrix(ComplexMatrix mat, double tol = 1e-10);
    static DensityMatrix from_pure(const StateVector& psi, double tol = 1e-10);

    const ComplexMatrix& matrix() const noexcept { return mat_; }
    FockSpace space() const { return FockSpace(static_cast<int>(mat_.rows())); }
    int dim() const noexcept { return static_cast<int>(mat_.rows()); }
    const DensityReport& report() const noexcept { return report_; }
    double tail_weight() const noexcept { return report_.tail_weight; }

    double purity() const;
    cplx expectation(const ComplexMatrix& op) const;
    double mean_photon_number() const;
    /// Smallest k with total weight on levels >= k below `eps`; used to trim loops.
    int effective_dim(double eps = 1e-18) const;

  private:
    ComplexMatrix mat_;
    DensityReport report_;
};

DensityReport inspect_density(const ComplexMatrix& mat);

}  // namespace qpd
