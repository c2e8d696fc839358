#include "qpd/fock_core.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

namespace qpd {

FockSpace::FockSpace(int dim) : dim_(dim) {
    if (dim < 2) throw ValidationError("FockSpace: dim must be >= 2, got " + std::to_string(dim));
}

void LadderConvention::validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ValidationError("LadderConvention: hbar must be > 0");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw ValidationError("LadderConvention: lambda must be > 0");
}

cplx LadderConvention::to_alpha(double q, double p) const {
    return cplx(lambda * q, p / lambda) / std::sqrt(2.0 * hbar);
}

double LadderConvention::q_of(cplx alpha) const { return alpha.real() * std::sqrt(2.0 * hbar) / lambda; }

double LadderConvention::p_of(cplx alpha) const { return alpha.imag() * std::sqrt(2.0 * hbar) * lambda; }

SqueezeParameter::SqueezeParameter(cplx zeta) : zeta_(zeta) {
    if (!std::isfinite(zeta.real()) || !std::isfinite(zeta.imag()))
        throw ValidationError("SqueezeParameter: zeta must be finite");
}

SqueezeParameter SqueezeParameter::polar(double r, double theta) {
    if (r < 0.0) throw ValidationError("SqueezeParameter: r must be >= 0");
    return SqueezeParameter(std::polar(r, theta));
}

double SqueezeParameter::theta() const noexcept {
    if (zeta_ == cplx(0.0, 0.0)) return 0.0;
    double t = std::arg(zeta_);
    return t < 0.0 ? t + 2.0 * kPi : t;
}

ComplexMatrix annihilation(FockSpace space) {
    const int d = space.dim();
    ComplexMatrix a = ComplexMatrix::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

ComplexMatrix creation(FockSpace space) { return annihilation(space).adjoint(); }

ComplexMatrix number_operator(FockSpace space) {
    const int d = space.dim();
    ComplexMatrix n = ComplexMatrix::Zero(d, d);
    for (int k = 0; k < d; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

ComplexMatrix identity(FockSpace space) { return ComplexMatrix::Identity(space.dim(), space.dim()); }

ComplexMatrix expm(const ComplexMatrix& m) { return m.exp(); }

double ground_tail_weight(const ComplexMatrix& m) { return std::norm(m(m.rows() - 1, 0)); }

namespace {

void record_tail(const ComplexMatrix& op, const char* name, Diagnostics* diag, const Tolerances& tol) {
    if (diag == nullptr) return;
    const double tail = ground_tail_weight(op);
    diag->set("tail_weight", tail);
    if (tail > tol.truncation) {
        diag->warn(std::string(name) + ": ground-state image has tail weight " + std::to_string(tail) +
                   " at the top Fock level; increase dim");
    }
}

}  // namespace

ComplexMatrix displacement(cplx alpha, FockSpace space, Diagnostics* diag, const Tolerances& tol) {
    const ComplexMatrix a = annihilation(space);
    const ComplexMatrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
    ComplexMatrix d = expm(gen);
    record_tail(d, "displacement", diag, tol);
    return d;
}

ComplexMatrix displacement_elements(cplx beta, FockSpace space) {
    const int d = space.dim();
    const double x = std::norm(beta);
    const double rho = std::abs(beta);
    const cplx phase = rho > 0.0 ? beta / rho : cplx(1.0, 0.0);
    ComplexMatrix out = ComplexMatrix::Zero(d, d);

    // For k = m - n >= 0:
    //   <n+k|D|n> = beta^k e^{-x/2} / sqrt(k!) * g_n,   g_n = sqrt(n! k! / (n+k)!) L_n^{(k)}(x)
    // with sqrt((n+1)(n+k+1)) g_{n+1} = (2n+1+k-x) g_n - sqrt(n(n+k)) g_{n-1}, g_0 = 1.
    // Entries above the diagonal follow from <m|D(beta)|n> = conj(<n|D(-beta)|m>).
    for (int k = 0; k < d; ++k) {
        double log_pref = -0.5 * x - 0.5 * std::lgamma(k + 1.0);
        if (k > 0) log_pref += (rho > 0.0 ? k * std::log(rho) : -std::numeric_limits<double>::infinity());
        const double pref = std::exp(log_pref);
        const cplx ph = std::pow(phase, k);
        const cplx ph_upper = std::pow(-std::conj(phase), k);
        double g_prev = 0.0;
        double g = 1.0;
        for (int n = 0; n + k < d; ++n) {
            out(n + k, n) = ph * (pref * g);
            if (k > 0) out(n, n + k) = ph_upper * (pref * g);
            const double next = ((2.0 * n + 1.0 + k - x) * g - std::sqrt(double(n) * (n + k)) * g_prev) /
                                std::sqrt((n + 1.0) * (n + k + 1.0));
            g_prev = g;
            g = next;
        }
    }
    return out;
}

ComplexMatrix squeeze_direct(const SqueezeParameter& zeta, FockSpace space, Diagnostics* diag,
                             const Tolerances& tol) {
    const ComplexMatrix a = annihilation(space);
    const ComplexMatrix ad = a.adjoint();
    const ComplexMatrix gen = 0.5 * (std::conj(zeta.zeta()) * (a * a) - zeta.zeta() * (ad * ad));
    ComplexMatrix s = expm(gen);
    record_tail(s, "squeeze_direct", diag, tol);
    return s;
}

ComplexMatrix squeeze_decomposed(const SqueezeParameter& zeta, FockSpace space, Diagnostics* diag,
                                 const Tolerances& tol) {
    const BchIdentity bch = bch_matrix_identity(zeta);
    const ComplexMatrix a = annihilation(space);
    const ComplexMatrix ad = a.adjoint();
    const int d = space.dim();

    // K+ <-> a+^2/2, K0 <-> (a+a + 1/2)/2, K- <-> a^2/2
    const ComplexMatrix raise = expm(bch.a * 0.5 * (ad * ad));
    ComplexMatrix middle = ComplexMatrix::Zero(d, d);
    for (int n = 0; n < d; ++n) middle(n, n) = std::exp(0.5 * bch.c * (n + 0.5));
    const ComplexMatrix lower = expm(bch.b * 0.5 * (a * a));

    ComplexMatrix s = raise * middle * lower;
    record_tail(s, "squeeze_decomposed", diag, tol);
    return s;
}

Su11Generators su11_generators() {
    Su11Generators g;
    g.k0 << -0.5, 0.0, 0.0, 0.5;
    g.k_minus << 0.0, 1.0, 0.0, 0.0;
    g.k_plus << 0.0, 0.0, -1.0, 0.0;
    return g;
}

Eigen::Matrix2cd su11_ordered_product(cplx a, cplx c, cplx b) {
    Eigen::Matrix2cd ea, ec, eb;
    ea << 1.0, 0.0, -a, 1.0;
    ec << std::exp(-c / 2.0), 0.0, 0.0, std::exp(c / 2.0);
    eb << 1.0, b, 0.0, 1.0;
    return ea * ec * eb;
}

namespace {

Eigen::Matrix2cd exp_series(const Eigen::Matrix2cd& x) {
    Eigen::Matrix2cd sum = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd term = Eigen::Matrix2cd::Identity();
    for (int k = 1; k < 200; ++k) {
        term = term * x / static_cast<double>(k);
        sum += term;
        if (term.norm() < 1e-18 * sum.norm()) break;
    }
    return sum;
}

}  // namespace

BchIdentity bch_matrix_identity(const SqueezeParameter& zeta) {
    const cplx z = zeta.zeta();
    const double r = zeta.r();
    const double theta = zeta.theta();
    const cplx e_plus = std::polar(1.0, theta);
    const cplx e_minus = std::polar(1.0, -theta);

    BchIdentity out;
    Eigen::Matrix2cd gen;
    gen << 0.0, std::conj(z), z, 0.0;
    out.numerical = exp_series(gen);

    out.closed_form << std::cosh(r), e_minus * std::sinh(r), e_plus * std::sinh(r), std::cosh(r);

    const double t = std::tanh(r);
    out.a = -e_plus * t;
    out.b = e_minus * t;
    out.c = -2.0 * std::log(std::cosh(r));
    return out;
}

double block_norm(const ComplexMatrix& m, int n) {
    n = std::min<int>(n, static_cast<int>(std::min(m.rows(), m.cols())));
    Eigen::JacobiSVD<ComplexMatrix> svd(m.topLeftCorner(n, n));
    return svd.singularValues()(0);
}

DensityReport inspect_density(const ComplexMatrix& mat) {
    DensityReport r;
    r.hermiticity = (mat - mat.adjoint()).norm();
    r.trace_error = std::abs(mat.trace() - cplx(1.0, 0.0));
    const ComplexMatrix herm = 0.5 * (mat + mat.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    r.tail_weight = mat(mat.rows() - 1, mat.cols() - 1).real();
    return r;
}

DensityMatrix::DensityMatrix(ComplexMatrix mat, double tol) : mat_(std::move(mat)) {
    if (mat_.rows() != mat_.cols()) throw ValidationError("DensityMatrix: matrix must be square");
    if (mat_.rows() < 2) throw ValidationError("DensityMatrix: dim must be >= 2");
    if (!mat_.allFinite()) throw ValidationError("DensityMatrix: entries must be finite");
    report_ = inspect_density(mat_);
    if (report_.hermiticity > tol)
        throw ValidationError("DensityMatrix: not Hermitian (||rho - rho^+|| = " +
                              std::to_string(report_.hermiticity) + ")");
    if (report_.trace_error > tol)
        throw ValidationError("DensityMatrix: trace != 1 (|Tr rho - 1| = " +
                              std::to_string(report_.trace_error) + ")");
    if (report_.min_eigenvalue < -tol)
        throw ValidationError("DensityMatrix: not positive semidefinite (min eigenvalue " +
                              std::to_string(report_.min_eigenvalue) + ")");
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi, double tol) {
    return DensityMatrix(psi * psi.adjoint(), tol);
}

double DensityMatrix::purity() const { return (mat_ * mat_).trace().real(); }

cplx DensityMatrix::expectation(const ComplexMatrix& op) const { return (op * mat_).trace(); }

double DensityMatrix::mean_photon_number() const {
    double n = 0.0;
    for (int k = 0; k < dim(); ++k) n += k * mat_(k, k).real();
    return n;
}

int DensityMatrix::effective_dim(double eps) const {
    double tail = 0.0;
    for (int k = dim() - 1; k >= 0; --k) {
        tail += std::abs(mat_(k, k).real());
        if (tail > eps) return std::min(dim(), k + 1);
    }
    return 1;
}

}  // namespace qpd
