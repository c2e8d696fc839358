#include "qpd/amplifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "detail.hpp"

namespace qpd {

// ---- channel --------------------------------------------------------------

void AmplifierChannel::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("amplifier: gamma must be positive");
    if (!(n0 >= 0.0)) throw ValidationError("amplifier: n0 must be non-negative");
    if (!(n1 > n0) || !std::isfinite(n1)) throw ValidationError("amplifier: requires n0 < n1");
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("amplifier: t must be non-negative");
}

AmplifierChannel AmplifierChannel::parse(const std::string& text) {
    AmplifierChannel ch;
    bool seen[4] = {false, false, false, false};
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ValidationError("amplifier: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("amplifier: bad number in '" + item + "'");
        }
        if (key == "gamma") ch.gamma = v, seen[0] = true;
        else if (key == "n0") ch.n0 = v, seen[1] = true;
        else if (key == "n1") ch.n1 = v, seen[2] = true;
        else if (key == "t") ch.t = v, seen[3] = true;
        else throw ValidationError("amplifier: unknown key '" + key + "'");
    }
    if (!(seen[0] && seen[1] && seen[2] && seen[3]))
        throw ValidationError("amplifier: gamma, n0, n1 and t are all required");
    ch.validate();
    return ch;
}

std::string AmplifierChannel::to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << "gamma=" << gamma << ",n0=" << n0 << ",n1=" << n1 << ",t=" << t;
    return os.str();
}

ChannelParams channel_params(const AmplifierChannel& ch) {
    ch.validate();
    ChannelParams p;
    p.gain = std::exp(2.0 * (ch.n1 - ch.n0) * ch.gamma * ch.t);
    p.noise = ch.n0 / (ch.n1 - ch.n0) * (p.gain * p.gain - 1.0);
    return p;
}

// ---- Husimi evolution -------------------------------------------------------

namespace {

void check_husimi_input(const QuasiDistribution& q, double gain, double noise) {
    if (!q.kind.is_s(-1.0)) throw ValidationError("amplifier: input must be a Husimi function");
    if (!(gain >= 1.0) || !std::isfinite(gain)) throw ValidationError("amplifier: gain must be >= 1");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw ValidationError("amplifier: noise must be >= 0");
}

// Resamples `src` onto `target`; throws when `src` carries more than `tol`
// of its mass outside the target rectangle.
QuasiDistribution onto_target(const QuasiDistribution& src, const PhaseGrid& target, double tol) {
    target.validate();
    double total = 0.0, outside = 0.0, reach = 0.0;
    const double cell = src.grid.cell_area(src.convention);
    for (int i = 0; i < src.grid.nq; ++i) {
        for (int j = 0; j < src.grid.np; ++j) {
            const double w = std::abs(src.values(i, j)) * cell;
            total += w;
            const double q = src.grid.q(i), p = src.grid.p(j);
            if (!target.contains(q, p)) {
                outside += w;
                if (w > tol * 1e-3 * cell) reach = std::max({reach, std::abs(q), std::abs(p)});
            }
        }
    }
    const double frac = total > 0.0 ? outside / total : 0.0;
    if (frac > tol) {
        std::ostringstream os;
        os << "amplifier: " << frac << " of the output mass falls outside the target grid";
        throw SupportOverflow(os.str(), reach * 1.1);
    }
    QuasiDistribution out;
    out.grid = target;
    out.convention = src.convention;
    out.kind = src.kind;
    out.diagnostics = src.diagnostics;
    out.diagnostics.set("mass_outside_target", frac);
    out.values.resize(target.nq, target.np);
    for (int i = 0; i < target.nq; ++i)
        for (int j = 0; j < target.np; ++j) out.values(i, j) = src.interpolate(target.q(i), target.p(j));
    out.refresh_diagnostics();
    return out;
}

}  // namespace

QuasiDistribution evolve_husimi_pure_gain(const QuasiDistribution& q_in, double gain,
                                          const std::optional<PhaseGrid>& target, const AmplifyOptions& opts) {
    check_husimi_input(q_in, gain, 0.0);
    const double g2 = gain * gain;
    if (target) {
        target->validate();
        QuasiDistribution out;
        out.grid = *target;
        out.convention = q_in.convention;
        out.kind = q_in.kind;
        out.values.resize(target->nq, target->np);
        for (int i = 0; i < target->nq; ++i)
            for (int j = 0; j < target->np; ++j)
                out.values(i, j) = q_in.interpolate(target->q(i) / gain, target->p(j) / gain) / g2;
        // mass of the exact output that the target cannot hold
        QuasiDistribution exact = evolve_husimi_pure_gain(q_in, gain);
        QuasiDistribution checked = onto_target(exact, *target, opts.overflow_tolerance);
        out.diagnostics = checked.diagnostics;
        out.diagnostics.set("gain", gain);
        out.diagnostics.set("noise", 0.0);
        out.refresh_diagnostics();
        return out;
    }
    QuasiDistribution out;
    out.grid = q_in.grid.scaled(gain);
    out.convention = q_in.convention;
    out.kind = q_in.kind;
    out.values = q_in.values / g2;
    out.diagnostics.set("gain", gain);
    out.diagnostics.set("noise", 0.0);
    out.refresh_diagnostics();
    return out;
}

QuasiDistribution evolve_husimi(const QuasiDistribution& q_in, double gain, double noise,
                                const std::optional<PhaseGrid>& target, const AmplifyOptions& opts) {
    check_husimi_input(q_in, gain, noise);
    if (noise == 0.0) return evolve_husimi_pure_gain(q_in, gain, target, opts);

    // Gaussian of variance noise / G^2 in alpha, written per quadrature.
    const LadderConvention& c = q_in.convention;
    const double v = noise / (gain * gain);
    const double sigma_q = std::sqrt(c.hbar * v) / c.lambda;
    const double sigma_p = std::sqrt(c.hbar * v) * c.lambda;

    int pq = 0, pp = 0;
    double leaked = 0.0;
    const Eigen::MatrixXd blurred = detail::gaussian_blur_2d(q_in.values, q_in.grid.dq(), q_in.grid.dp(), sigma_q,
                                                             sigma_p, opts.pad_sigmas, &pq, &pp, &leaked);

    QuasiDistribution smoothed;
    smoothed.grid = q_in.grid;
    smoothed.grid.q_min -= pq * q_in.grid.dq();
    smoothed.grid.q_max += pq * q_in.grid.dq();
    smoothed.grid.p_min -= pp * q_in.grid.dp();
    smoothed.grid.p_max += pp * q_in.grid.dp();
    smoothed.grid.nq += 2 * pq;
    smoothed.grid.np += 2 * pp;
    smoothed.convention = c;
    smoothed.kind = q_in.kind;
    smoothed.values = blurred;

    QuasiDistribution out = evolve_husimi_pure_gain(smoothed, gain, target, opts);
    out.diagnostics.set("noise", noise);
    out.diagnostics.set("padding_mass", leaked);
    return out;
}

QuasiDistribution evolve_husimi(const QuasiDistribution& q_in, const AmplifierChannel& ch,
                                const std::optional<PhaseGrid>& target, const AmplifyOptions& opts) {
    const ChannelParams p = channel_params(ch);
    return evolve_husimi(q_in, p.gain, p.noise, target, opts);
}

// ---- moment integrals ---------------------------------------------------------

Rational radial_integral(unsigned n) {
    Rational r(1, 2);
    for (unsigned k = 1; k <= n; ++k) r *= k;
    return r;
}

namespace {

// I_{N,M} / (pi m); finite as m -> 0.
cplx reduced_moment(int n, int m_pow, cplx alpha, double gain, double noise) {
    if (n < 0 || m_pow < 0) throw ValidationError("moment: N and M must be non-negative");
    if (!(gain > 0.0)) throw ValidationError("moment: gain must be positive");
    if (!(noise >= 0.0)) throw ValidationError("moment: noise must be non-negative");
    const double abs_a = std::abs(alpha);
    const double log_g = std::log(gain);
    double sum = 0.0;
    for (int j = std::max(0, n - m_pow); j <= n; ++j) {
        const int pa = m_pow - n + j;  // power of alpha
        const int pc = j;              // power of alpha*
        const int pm = n - j;          // power of m
        if ((pa + pc > 0 && abs_a == 0.0) || (pm > 0 && noise == 0.0)) continue;
        double lt = std::lgamma(m_pow + 1.0) + std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                    std::lgamma(n - j + 1.0) - std::lgamma(pa + 1.0);
        if (pa + pc > 0) lt += (pa + pc) * std::log(abs_a);
        if (pm > 0) lt += pm * std::log(noise);
        lt -= (m_pow + n + 2) * log_g;
        sum += std::exp(lt);
    }
    const double phase = abs_a > 0.0 ? (m_pow - n) * std::arg(alpha) : 0.0;
    return std::polar(sum, phase);
}

struct GaussHermite {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

// Golub-Welsch for the weight e^{-x^2}.
GaussHermite gauss_hermite(int n) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) j(k, k - 1) = j(k - 1, k) = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    GaussHermite gh;
    gh.nodes = es.eigenvalues();
    gh.weights = std::sqrt(kPi) * es.eigenvectors().row(0).transpose().array().square();
    return gh;
}

}  // namespace

cplx moment_integral(int n_conj, int m_pow, cplx alpha, double gain, double noise) {
    return kPi * noise * reduced_moment(n_conj, m_pow, alpha, gain, noise);
}

cplx moment_integral_quadrature(int n_conj, int m_pow, cplx alpha, double gain, double noise, int nodes) {
    if (n_conj < 0 || m_pow < 0) throw ValidationError("moment: N and M must be non-negative");
    if (!(gain > 0.0)) throw ValidationError("moment: gain must be positive");
    if (!(noise > 0.0)) throw QuadratureError("moment: quadrature needs m > 0");
    const int n = std::max(nodes, (n_conj + m_pow) / 2 + 2);
    const GaussHermite gh = gauss_hermite(n);
    const double sm = std::sqrt(noise);
    cplx acc = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const cplx beta = (alpha - sm * cplx(gh.nodes(a), gh.nodes(b))) / gain;
            acc += gh.weights(a) * gh.weights(b) * std::pow(beta, m_pow) * std::pow(std::conj(beta), n_conj);
        }
    }
    return acc * noise / (gain * gain);
}

// ---- ordered polynomials ------------------------------------------------------

int OrderedPolynomial::max_degree() const {
    int d = 0;
    for (const auto& [k, c] : coeffs) d = std::max(d, k.first + k.second);
    return d;
}

OrderedPolynomial OrderedPolynomial::identity(Ordering o) { return monomial(0, 0, o); }

OrderedPolynomial OrderedPolynomial::monomial(int n, int m, Ordering o, cplx c) {
    if (n < 0 || m < 0) throw ValidationError("polynomial: powers must be non-negative");
    OrderedPolynomial p;
    p.ordering = o;
    p.coeffs[{n, m}] = c;
    return p;
}

namespace {

// a! / b! for a >= b >= 0
double fact_ratio(int a, int b) {
    double r = 1.0;
    for (int k = b + 1; k <= a; ++k) r *= k;
    return r;
}

// <k| monomial |l>, k = l + N - M.
double monomial_element(Ordering o, int n, int m, int l) {
    const int k = l + n - m;
    if (k < 0) return 0.0;
    switch (o) {
        case Ordering::normal:
            if (l < m) return 0.0;
            return std::sqrt(fact_ratio(l, l - m) * fact_ratio(k, l - m));
        case Ordering::antinormal:
            // (l+N)! / sqrt(l! k!)
            return std::sqrt(fact_ratio(l + n, l) * fact_ratio(l + n, k));
        case Ordering::symmetric: {
            double acc = 0.0;
            for (int s = 0; s <= std::min(m, l); ++s)
                acc += std::sqrt(fact_ratio(l, l - s) * fact_ratio(l - s + n, l - s) * fact_ratio(l - s + n, k));
            return acc / (1.0 + m);
        }
    }
    return 0.0;
}

}  // namespace

ComplexMatrix operator_matrix(const OrderedPolynomial& f, FockSpace space) {
    const int d = space.dim();
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (const auto& [key, c] : f.coeffs) {
        const auto [n, m] = key;
        for (int l = 0; l < d; ++l) {
            const int k = l + n - m;
            if (k < 0 || k >= d) continue;
            out(k, l) += c * monomial_element(f.ordering, n, m, l);
        }
    }
    return out;
}

namespace {

OrderedPolynomial normal_from_matrix(const ComplexMatrix& f, int max_degree, double prune) {
    OrderedPolynomial out;
    out.ordering = Ordering::normal;
    const int dim = static_cast<int>(f.rows());
    for (int d = -max_degree; d <= max_degree; ++d) {
        const int dp = std::max(d, 0), dm = std::max(-d, 0);
        const int t_max = (max_degree - std::abs(d)) / 2;
        std::vector<cplx> c(t_max + 1, 0.0);
        for (int s = 0; s <= t_max; ++s) {
            const int k = s + dp, l = s + dm;
            if (k >= dim || l >= dim) throw ValidationError("convert_ordering: working space too small");
            // F(k,l) = sum_{t<=s} c_t sqrt(k! l!) / (s-t)!
            const double root = std::sqrt(fact_ratio(k, 0) * fact_ratio(l, 0));
            cplx rest = f(k, l);
            for (int t = 0; t < s; ++t) rest -= c[t] * root / fact_ratio(s - t, 0);
            c[s] = rest / root;
            if (std::abs(c[s]) > prune) out.coeffs[{s + dp, s + dm}] = c[s];
        }
    }
    return out;
}

OrderedPolynomial to_normal(const OrderedPolynomial& f, FockSpace work, double prune) {
    if (f.ordering == Ordering::normal) return f;
    const int deg = f.max_degree();
    const FockSpace space(std::max(work.dim(), deg + 2));
    return normal_from_matrix(operator_matrix(f, space), deg, prune);
}

}  // namespace

OrderedPolynomial convert_ordering(const OrderedPolynomial& f, Ordering target, FockSpace work, double prune) {
    if (f.ordering == target) return f;
    OrderedPolynomial rest = to_normal(f, work, prune);
    if (target == Ordering::normal) return rest;

    OrderedPolynomial out;
    out.ordering = target;
    while (!rest.coeffs.empty()) {
        // leading monomial of highest total degree
        auto lead = rest.coeffs.begin();
        for (auto it = rest.coeffs.begin(); it != rest.coeffs.end(); ++it)
            if (it->first.first + it->first.second > lead->first.first + lead->first.second) lead = it;
        const auto key = lead->first;
        const cplx c = lead->second;
        out.coeffs[key] += c;
        const OrderedPolynomial expansion =
            to_normal(OrderedPolynomial::monomial(key.first, key.second, target), work, 0.0);
        for (const auto& [k2, c2] : expansion.coeffs) rest.coeffs[k2] -= c * c2;
        rest.coeffs.erase(key);
        for (auto it = rest.coeffs.begin(); it != rest.coeffs.end();) {
            if (std::abs(it->second) <= prune) it = rest.coeffs.erase(it);
            else ++it;
        }
    }
    for (auto it = out.coeffs.begin(); it != out.coeffs.end();) {
        if (std::abs(it->second) <= prune) it = out.coeffs.erase(it);
        else ++it;
    }
    return out;
}

cplx amplified_operator_husimi(const OrderedPolynomial& f, cplx alpha, double gain, double noise) {
    const OrderedPolynomial normal = convert_ordering(f, Ordering::normal, FockSpace(std::max(10, f.max_degree() + 2)), 0.0);
    cplx acc = 0.0;
    for (const auto& [key, c] : normal.coeffs) acc += c * reduced_moment(key.first, key.second, alpha, gain, noise);
    return acc;
}

cplx amplified_operator_husimi(const OrderedPolynomial& f, cplx alpha, const AmplifierChannel& ch) {
    const ChannelParams p = channel_params(ch);
    return amplified_operator_husimi(f, alpha, p.gain, p.noise);
}

cplx amplified_series_literal(const OrderedPolynomial& f, cplx alpha, double gain, double noise) {
    cplx acc = 0.0;
    for (const auto& [key, c] : f.coeffs) acc += c * reduced_moment(key.first, key.second, alpha, gain, noise);
    return acc;
}

}  // namespace qpd
