#pragma once

// Linear amplifier channel acting on Husimi functions, and the closed-form
// Gaussian moment integrals used to push ordered operator expansions through it.

#include <map>
#include <optional>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "qpd/quasi.hpp"

namespace qpd {

/// N1 excited and N0 ground-state atoms (N0 < N1) with amplification
/// coefficient gamma, observed after time t.
struct AmplifierChannel {
    double gamma = 0.0;
    double n0 = 0.0;
    double n1 = 1.0;
    double t = 0.0;

    void validate() const;
    /// Parses `gamma=0.5,n0=1,n1=2,t=1` (keys in any order, all required).
    static AmplifierChannel parse(const std::string& text);
    std::string to_string() const;
};

struct ChannelParams {
    double gain = 1.0;   ///< G = exp(2 (N1 - N0) gamma t)
    double noise = 0.0;  ///< m = N0 / (N1 - N0) (G^2 - 1)
};

ChannelParams channel_params(const AmplifierChannel& ch);

struct AmplifyOptions {
    /// Output mass allowed to fall outside an explicit target grid.
    double overflow_tolerance = 2e-3;
    double pad_sigmas = 10.0;
};

/// Q_out(alpha) = (1/G^2) Q_in(alpha / G). Without a target grid the result
/// lives on the input grid scaled by G (exact resampling); with one, the
/// input is interpolated bicubically and SupportOverflow is thrown when the
/// rescaled state leaves the target.
QuasiDistribution evolve_husimi_pure_gain(const QuasiDistribution& q_in, double gain,
                                          const std::optional<PhaseGrid>& target = std::nullopt,
                                          const AmplifyOptions& opts = {});

/// Q_out(alpha) = (1/(pi m)) int d^2 beta Q_in(beta) e^{-|alpha - beta G|^2 / m}.
/// Evaluated as a Gaussian smoothing of Q_in (variance m / G^2 in alpha units)
/// followed by the pure-gain rescale. m == 0 takes the pure-gain path.
QuasiDistribution evolve_husimi(const QuasiDistribution& q_in, double gain, double noise,
                                const std::optional<PhaseGrid>& target = std::nullopt,
                                const AmplifyOptions& opts = {});
QuasiDistribution evolve_husimi(const QuasiDistribution& q_in, const AmplifierChannel& ch,
                                const std::optional<PhaseGrid>& target = std::nullopt,
                                const AmplifyOptions& opts = {});

using Rational = boost::multiprecision::cpp_rational;

/// int_0^inf rho^{2n+1} e^{-rho^2} d rho = n!/2, by I_{2n+1} = n I_{2n-1}, I_1 = 1/2.
Rational radial_integral(unsigned n);

/// Closed form of  I_{N,M} = int d^2 beta beta^M beta*^N e^{-|alpha - beta G|^2 / m}:
///   (pi m / G^{M+N+2}) sum_{j=max(0,N-M)}^{N} M! C(N,j) / (M-N+j)! alpha^{M-N+j} alpha*^j m^{N-j}.
/// Terms are accumulated in the log domain.
cplx moment_integral(int n_conj, int m_pow, cplx alpha, double gain, double noise);

/// The same integral by tensor Gauss-Hermite quadrature in the shifted
/// variable z = (alpha - beta G)/sqrt(m). Exact for polynomial degree
/// N + M < 2 nodes.
cplx moment_integral_quadrature(int n_conj, int m_pow, cplx alpha, double gain, double noise, int nodes = 0);

/// Finite expansion of an operator in one ordering:
///   normal      sum c_{N,M} a+^N a^M
///   antinormal  sum d_{N,M} a^M a+^N
///   symmetric   sum e_{N,M} (1/(1+M)) sum_{n=0}^{M} a^{M-n} a+^N a^n
/// Keys are (N, M): N counts a+, M counts a.
struct OrderedPolynomial {
    Ordering ordering = Ordering::normal;
    std::map<std::pair<int, int>, cplx> coeffs;

    int max_degree() const;
    static OrderedPolynomial identity(Ordering o = Ordering::normal);
    static OrderedPolynomial monomial(int n, int m, Ordering o = Ordering::normal, cplx c = 1.0);
};

/// Matrix of the operator on `space`, computed exactly (no truncation
/// artefacts from intermediate a+ products) and cropped.
ComplexMatrix operator_matrix(const OrderedPolynomial& f, FockSpace space);

/// Re-expresses `f` in `target` ordering. Goes through the operator matrix on
/// a working space (`work`, enlarged if too small for the degree) and a
/// triangular solve for normal-ordered coefficients; other orderings follow by
/// peeling leading monomials. Coefficients below `prune` are dropped.
OrderedPolynomial convert_ordering(const OrderedPolynomial& f, Ordering target, FockSpace work = FockSpace(10),
                                   double prune = 1e-13);

/// Husimi function at alpha of the operator after it passed the channel:
///   sum_{N,M} c_{N,M} I_{N,M}(alpha) / (pi m),
/// with c the normal-ordered coefficients of f (f is converted if needed).
cplx amplified_operator_husimi(const OrderedPolynomial& f, cplx alpha, double gain, double noise);
cplx amplified_operator_husimi(const OrderedPolynomial& f, cplx alpha, const AmplifierChannel& ch);

/// The per-ordering series taken literally, coefficient x I_{N,M} / (pi m),
/// without conversion. Coincides with amplified_operator_husimi for normal input.
cplx amplified_series_literal(const OrderedPolynomial& f, cplx alpha, double gain, double noise);

}  // namespace qpd
