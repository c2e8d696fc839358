#include "qpd/quasi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "detail.hpp"

namespace qpd {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

bool same_grid(const PhaseGrid& a, const PhaseGrid& b) {
    auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); };
    return a.nq == b.nq && a.np == b.np && close(a.q_min, b.q_min) && close(a.q_max, b.q_max) &&
           close(a.p_min, b.p_min) && close(a.p_max, b.p_max);
}

QuasiDistribution make_distribution(const PhaseGrid& grid, const LadderConvention& conv, DistributionKind kind) {
    QuasiDistribution d;
    d.grid = grid;
    d.convention = conv;
    d.kind = std::move(kind);
    d.values = Eigen::MatrixXd::Zero(grid.nq, grid.np);
    return d;
}

/// Half-extent of the grid in alpha units along Re and Im.
std::pair<double, double> alpha_extent(const PhaseGrid& grid, const LadderConvention& conv) {
    const double xr = std::max(std::abs(conv.to_alpha(grid.q_min, 0).real()), std::abs(conv.to_alpha(grid.q_max, 0).real()));
    const double yr = std::max(std::abs(conv.to_alpha(0, grid.p_min).imag()), std::abs(conv.to_alpha(0, grid.p_max).imag()));
    return {xr, yr};
}

/// (1/pi^2) int d^2 beta f(beta) e^{alpha beta* - alpha* beta} on the alpha grid,
/// f sampled on u (Re beta) x v (Im beta). Returns complex values nq x np.
Eigen::MatrixXcd complex_plane_transform(const Eigen::MatrixXcd& f, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                         const PhaseGrid& grid, const LadderConvention& conv) {
    // alpha beta* - alpha* beta = 2i (y u - x v)  for alpha = x + iy, beta = u + iv
    const double du = u.size() > 1 ? u(1) - u(0) : 1.0;
    const double dv = v.size() > 1 ? v(1) - v(0) : 1.0;
    Eigen::MatrixXcd ex(grid.nq, v.size());
    for (int i = 0; i < grid.nq; ++i) {
        const double x = conv.to_alpha(grid.q(i), 0.0).real();
        for (int l = 0; l < v.size(); ++l) ex(i, l) = std::polar(1.0, -2.0 * x * v(l));
    }
    Eigen::MatrixXcd ey(u.size(), grid.np);
    for (int k = 0; k < u.size(); ++k) {
        for (int j = 0; j < grid.np; ++j) {
            const double y = conv.to_alpha(0.0, grid.p(j)).imag();
            ey(k, j) = std::polar(1.0, 2.0 * y * u(k));
        }
    }
    // out(i, j) = sum_{k,l} ex(i,l) f(k,l) ey(k,j)
    Eigen::MatrixXcd out = ex * f.transpose() * ey;
    out *= du * dv / (kPi * kPi);
    return out;
}

double circle_max(const std::function<double(cplx)>& mag, double radius, int samples) {
    double m = 0.0;
    for (int k = 0; k < samples; ++k) m = std::max(m, mag(std::polar(radius, 2.0 * kPi * k / samples)));
    return m;
}

Eigen::VectorXd momentum_functions(double p, int count, const LadderConvention& conv) {
    // <p|n> = (-i)^n times this real function
    LadderConvention dual{conv.hbar, 1.0 / conv.lambda};
    return oscillator_functions(p, count, dual);
}

}  // namespace

// ---- PhaseGrid ---------------------------------------------------------------

void PhaseGrid::validate() const {
    if (!(q_min < q_max)) throw ValidationError("PhaseGrid: q_min < q_max required");
    if (!(p_min < p_max)) throw ValidationError("PhaseGrid: p_min < p_max required");
    if (nq < 8 || np < 8) throw ValidationError("PhaseGrid: nq, np >= 8 required");
}

PhaseGrid PhaseGrid::scaled(double f) const {
    PhaseGrid g = *this;
    g.q_min *= f;
    g.q_max *= f;
    g.p_min *= f;
    g.p_max *= f;
    return g;
}

bool PhaseGrid::contains(double q, double p) const {
    return q >= q_min && q <= q_max && p >= p_min && p <= p_max;
}

PhaseGrid PhaseGrid::square(double half_extent, int n) {
    PhaseGrid g{-half_extent, half_extent, -half_extent, half_extent, n, n};
    g.validate();
    return g;
}

PhaseGrid PhaseGrid::for_state(const DensityMatrix& rho, const LadderConvention& conv, double widths, int n) {
    const cplx mean = rho.expectation(annihilation(rho.space()));
    const double spread = std::sqrt(std::max(0.0, rho.mean_photon_number() - std::norm(mean)) + 0.5);
    const double ext = widths * spread;
    const double sq = std::sqrt(2.0 * conv.hbar);
    PhaseGrid g;
    g.q_min = conv.q_of(mean) - ext * sq / conv.lambda;
    g.q_max = conv.q_of(mean) + ext * sq / conv.lambda;
    g.p_min = conv.p_of(mean) - ext * sq * conv.lambda;
    g.p_max = conv.p_of(mean) + ext * sq * conv.lambda;
    g.nq = g.np = n;
    g.validate();
    return g;
}

// ---- kinds -------------------------------------------------------------------

std::string to_string(Ordering o) {
    switch (o) {
        case Ordering::normal: return "normal";
        case Ordering::symmetric: return "symmetric";
        case Ordering::antinormal: return "antinormal";
    }
    return "?";
}

Ordering parse_ordering(const std::string& s) {
    if (s == "normal") return Ordering::normal;
    if (s == "symmetric") return Ordering::symmetric;
    if (s == "antinormal") return Ordering::antinormal;
    throw ValidationError("unknown ordering '" + s + "'");
}

DistributionKind DistributionKind::s_param(double s) {
    DistributionKind k;
    k.family = Family::s_param;
    k.s = s;
    return k;
}

DistributionKind DistributionKind::cohen(std::string id) {
    DistributionKind k;
    k.family = Family::cohen;
    k.label = std::move(id);
    return k;
}

DistributionKind DistributionKind::symbol(Ordering o) {
    DistributionKind k;
    k.family = Family::symbol;
    k.ordering = o;
    return k;
}

DistributionKind DistributionKind::smoothed(double kappa) {
    DistributionKind k;
    k.family = Family::smoothed;
    k.kappa = kappa;
    return k;
}

std::string DistributionKind::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (family) {
        case Family::s_param: os << "s_param(" << s << ")"; break;
        case Family::cohen: os << "cohen(" << label << ")"; break;
        case Family::symbol: os << "symbol(" << to_string(ordering) << ")"; break;
        case Family::smoothed: os << "smoothed(" << kappa << ")"; break;
    }
    return os.str();
}

// ---- QuasiDistribution ---------------------------------------------------------

double QuasiDistribution::integral() const { return values.sum() * grid.cell_area(convention); }

cplx QuasiDistribution::mean_alpha() const {
    cplx acc = 0.0;
    for (int i = 0; i < grid.nq; ++i)
        for (int j = 0; j < grid.np; ++j) acc += values(i, j) * convention.to_alpha(grid.q(i), grid.p(j));
    return acc * grid.cell_area(convention);
}

double QuasiDistribution::interpolate(double q, double p) const {
    if (!grid.contains(q, p)) return 0.0;
    const double fx = (q - grid.q_min) / grid.dq();
    const double fy = (p - grid.p_min) / grid.dp();
    const int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, grid.nq - 2);
    const int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, grid.np - 2);
    const double tx = fx - ix;
    const double ty = fy - iy;
    auto at = [&](int i, int j) {
        if (i < 0 || j < 0 || i >= grid.nq || j >= grid.np) return 0.0;
        return values(i, j);
    };
    auto cubic = [](double p0, double p1, double p2, double p3, double t) {
        return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
    };
    double col[4];
    for (int a = 0; a < 4; ++a) {
        const int i = ix - 1 + a;
        col[a] = cubic(at(i, iy - 1), at(i, iy), at(i, iy + 1), at(i, iy + 2), ty);
    }
    return cubic(col[0], col[1], col[2], col[3], tx);
}

void QuasiDistribution::refresh_diagnostics() {
    diagnostics.set("normalization", integral());
    diagnostics.set("min_value", min_value());
    diagnostics.set("max_value", max_value());
}

// ---- point evaluations -----------------------------------------------------------

cplx characteristic_function(const DensityMatrix& rho, cplx beta, double s) {
    const int k = rho.effective_dim();
    const FockSpace sub(std::max(k, 2));
    const ComplexMatrix d = displacement_elements(beta, sub);
    const auto block = rho.matrix().topLeftCorner(sub.dim(), sub.dim());
    const cplx tr = d.cwiseProduct(block.transpose()).sum();
    return tr * std::exp(0.5 * s * std::norm(beta));
}

double husimi_direct(const DensityMatrix& rho, cplx alpha) {
    const int d = rho.dim();
    StateVector c(d);
    cplx v = std::exp(-0.5 * std::norm(alpha));
    for (int n = 0; n < d; ++n) {
        c(n) = v;
        v *= alpha / std::sqrt(n + 1.0);
    }
    return c.dot(rho.matrix() * c).real() / kPi;
}

QuasiDistribution husimi_direct_grid(const DensityMatrix& rho, const PhaseGrid& grid, const LadderConvention& conv) {
    grid.validate();
    conv.validate();
    QuasiDistribution out = make_distribution(grid, conv, DistributionKind::s_param(-1.0));
    for (int i = 0; i < grid.nq; ++i)
        for (int j = 0; j < grid.np; ++j) out.values(i, j) = husimi_direct(rho, conv.to_alpha(grid.q(i), grid.p(j)));
    out.diagnostics.set("tail_weight", rho.tail_weight());
    out.refresh_diagnostics();
    return out;
}

Eigen::VectorXd oscillator_functions(double x, int count, const LadderConvention& conv) {
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(count);
    if (count == 0) return phi;
    const double xi = conv.lambda * x / std::sqrt(conv.hbar);
    const double norm = std::pow(conv.lambda * conv.lambda / (kPi * conv.hbar), 0.25);
    phi(0) = norm * std::exp(-0.5 * xi * xi);
    if (count > 1) phi(1) = std::sqrt(2.0) * xi * phi(0);
    for (int n = 1; n + 1 < count; ++n)
        phi(n + 1) = std::sqrt(2.0 / (n + 1.0)) * xi * phi(n) - std::sqrt(n / (n + 1.0)) * phi(n - 1);
    return phi;
}

cplx position_matrix_element(const DensityMatrix& rho, double x, double xp, const LadderConvention& conv) {
    const int k = rho.effective_dim();
    const Eigen::VectorXd a = oscillator_functions(x, k, conv);
    const Eigen::VectorXd b = oscillator_functions(xp, k, conv);
    return a.cast<cplx>().transpose() * rho.matrix().topLeftCorner(k, k) * b.cast<cplx>();
}

double momentum_density(const DensityMatrix& rho, double p, const LadderConvention& conv) {
    const int k = rho.effective_dim();
    const Eigen::VectorXd f = momentum_functions(p, k, conv);
    StateVector ket(k);
    for (int n = 0; n < k; ++n) ket(n) = std::pow(cplx(0.0, -1.0), n) * f(n);  // <p|n>
    // <p|rho|p> = sum_{nm} <p|n> rho_nm <m|p>
    return (ket.transpose() * rho.matrix().topLeftCorner(k, k) * ket.conjugate()).value().real();
}

namespace {

struct WignerSampling {
    Eigen::VectorXd u;
    double h = 0.0;
    int k = 0;
};

WignerSampling wigner_sampling(const DensityMatrix& rho, double p_abs_max, const LadderConvention& conv,
                               const WignerOptions& opts) {
    WignerSampling s;
    s.k = std::max(rho.effective_dim(), 1);
    const double width = std::sqrt(conv.hbar) / conv.lambda;
    const double turning = width * std::sqrt(2.0 * s.k + 1.0);
    const double reach = turning + opts.extent_widths * width;
    const double u_max = 2.0 * reach;
    const double p_band = conv.lambda * std::sqrt(conv.hbar) * (std::sqrt(2.0 * s.k + 1.0) + opts.extent_widths);
    const double h = kTwoPi * conv.hbar / (p_abs_max + p_band) / (1.5 * opts.oversample);
    s.u = detail::symmetric_axis(u_max, h);
    s.h = s.u.size() > 1 ? s.u(1) - s.u(0) : h;
    return s;
}

/// rho(q + u/2, q - u/2) for every u.
Eigen::VectorXcd wigner_integrand(const DensityMatrix& rho, double q, const WignerSampling& s,
                                  const LadderConvention& conv) {
    const int n = static_cast<int>(s.u.size());
    Eigen::MatrixXd plus(s.k, n), minus(s.k, n);
    for (int t = 0; t < n; ++t) {
        plus.col(t) = oscillator_functions(q + 0.5 * s.u(t), s.k, conv);
        minus.col(t) = oscillator_functions(q - 0.5 * s.u(t), s.k, conv);
    }
    const Eigen::MatrixXcd rm = rho.matrix().topLeftCorner(s.k, s.k) * minus.cast<cplx>();
    return (plus.cast<cplx>().cwiseProduct(rm)).colwise().sum().transpose();
}

void check_tail(const Eigen::VectorXcd& r, const WignerOptions& opts) {
    const double peak = r.cwiseAbs().maxCoeff();
    const double edge = std::max(std::abs(r(0)), std::abs(r(r.size() - 1)));
    if (peak > 0.0 && edge > opts.tail_tolerance * std::max(peak, 1.0))
        throw QuadratureError("wigner_direct: u-integral tail " + std::to_string(edge) + " exceeds tolerance");
}

}  // namespace

double wigner_direct(const DensityMatrix& rho, double q, double p, const LadderConvention& conv,
                     const WignerOptions& opts) {
    conv.validate();
    const WignerSampling s = wigner_sampling(rho, std::abs(p), conv, opts);
    const Eigen::VectorXcd r = wigner_integrand(rho, q, s, conv);
    check_tail(r, opts);
    cplx acc = 0.0;
    for (int t = 0; t < s.u.size(); ++t) acc += r(t) * std::polar(1.0, -p * s.u(t) / conv.hbar);
    return (acc * s.h).real() / kPi;
}

QuasiDistribution wigner_direct_grid(const DensityMatrix& rho, const PhaseGrid& grid, const LadderConvention& conv,
                                     const WignerOptions& opts) {
    grid.validate();
    conv.validate();
    const double pmax = std::max(std::abs(grid.p_min), std::abs(grid.p_max));
    const WignerSampling s = wigner_sampling(rho, pmax, conv, opts);
    const int nu = static_cast<int>(s.u.size());
    Eigen::MatrixXcd phase(nu, grid.np);
    for (int t = 0; t < nu; ++t)
        for (int j = 0; j < grid.np; ++j) phase(t, j) = std::polar(1.0, -grid.p(j) * s.u(t) / conv.hbar);

    QuasiDistribution out = make_distribution(grid, conv, DistributionKind::s_param(0.0));
    double imag = 0.0;
    for (int i = 0; i < grid.nq; ++i) {
        const Eigen::VectorXcd r = wigner_integrand(rho, grid.q(i), s, conv);
        check_tail(r, opts);
        const Eigen::RowVectorXcd row = r.transpose() * phase * (s.h / kPi);
        out.values.row(i) = row.real();
        imag = std::max(imag, row.imag().cwiseAbs().maxCoeff());
    }
    out.diagnostics.set("imaginary_residual", imag);
    out.diagnostics.set("tail_weight", rho.tail_weight());
    out.refresh_diagnostics();
    return out;
}

// ---- s-parametrised transform ---------------------------------------------------

QuasiDistribution s_distribution(const DensityMatrix& rho, const PhaseGrid& grid, double s,
                                 const LadderConvention& conv, const TransformOptions& opts) {
    grid.validate();
    conv.validate();
    QuasiDistribution out = make_distribution(grid, conv, DistributionKind::s_param(s));
    if (opts.regularization != 0.0) {
        if (opts.regularization < 0.0) throw ValidationError("s_distribution: regularization must be >= 0");
        s -= opts.regularization;
        out.diagnostics.set("regularized_s", s);
        out.diagnostics.warn("Gaussian regularisation applied: evaluated at s = " + std::to_string(s));
    }
    if (s > 0.0)
        out.diagnostics.warn("s > 0: the distribution may be singular; result is reliable only for P-regular states");

    const auto [xr, yr] = alpha_extent(grid, conv);
    const double span = 2.0 * std::max(xr, yr);
    const double step = kPi / (opts.alias_margin * span);

    auto mag = [&](cplx b) {
        const double v = std::abs(characteristic_function(rho, b, s));
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    double extent = s < 1.0 ? std::sqrt(2.0 * std::log(1.0 / opts.decay_threshold) / (1.0 - s)) : 2.0;
    extent = std::min(std::max(extent, 1.0), opts.max_beta_extent);
    double edge = circle_max(mag, extent, 256);
    bool at_floor = false;
    while (edge > opts.decay_threshold) {
        const double next = std::min(extent * 1.1, opts.max_beta_extent);
        const double next_edge = next > extent ? circle_max(mag, next, 256) : edge;
        if (!(next_edge < edge)) {
            // no further decay: either the numerical floor or a non-decaying G
            if (edge <= opts.floor_tolerance) {
                at_floor = true;
                break;
            }
            std::ostringstream msg;
            msg << "s_distribution: characteristic function does not decay (|G| = " << edge << " at |beta| = " << extent
                << ")";
            throw IllPosed(msg.str());
        }
        extent = next;
        edge = next_edge;
    }
    if (at_floor) {
        std::ostringstream msg;
        msg << "characteristic function reached its numerical floor |G| = " << edge << " at |beta| = " << extent;
        out.diagnostics.warn(msg.str());
    }

    // G is used on the disk |beta| <= extent only
    const Eigen::VectorXd axis = detail::symmetric_axis(extent, step);
    const int nb = static_cast<int>(axis.size());
    Eigen::MatrixXcd g(nb, nb);
    for (int k = 0; k < nb; ++k)
        for (int l = 0; l < nb; ++l) {
            const cplx b(axis(k), axis(l));
            g(k, l) = std::abs(b) <= extent ? characteristic_function(rho, b, s) : cplx(0.0, 0.0);
        }

    const Eigen::MatrixXcd f = complex_plane_transform(g, axis, axis, grid, conv);
    out.values = f.real();
    const double imag = f.imag().cwiseAbs().maxCoeff();
    out.diagnostics.set("imaginary_residual", imag);
    out.diagnostics.set("beta_extent", extent);
    out.diagnostics.set("beta_edge_magnitude", edge);
    out.diagnostics.set("tail_weight", rho.tail_weight());
    if (imag > opts.imaginary_tolerance)
        out.diagnostics.warn("imaginary residual " + std::to_string(imag) + " above tolerance");
    out.refresh_diagnostics();
    return out;
}

// ---- Weierstrass smoothing ------------------------------------------------------

double matched_smoothing_width(const LadderConvention& conv) { return conv.lambda * conv.lambda; }

QuasiDistribution weierstrass_smooth(const QuasiDistribution& w, double kappa, const SmoothOptions& opts) {
    if (!(kappa > 0.0)) throw ValidationError("weierstrass_smooth: kappa must be > 0");
    const double hbar = w.convention.hbar;
    const double sigma_q = std::sqrt(hbar / (2.0 * kappa));
    const double sigma_p = std::sqrt(hbar * kappa / 2.0);
    int pq = 0, pp = 0;
    double leaked = 0.0;
    const Eigen::MatrixXd padded =
        detail::gaussian_blur_2d(w.values, w.grid.dq(), w.grid.dp(), sigma_q, sigma_p, opts.pad_sigmas, &pq, &pp, &leaked);

    QuasiDistribution out = w;
    out.values = padded.block(pq, pp, w.grid.nq, w.grid.np);
    const bool matched = std::abs(kappa - matched_smoothing_width(w.convention)) <= 1e-12 * kappa;
    if (matched && w.kind.family == DistributionKind::Family::s_param)
        out.kind = DistributionKind::s_param(w.kind.s - 1.0);
    else
        out.kind = DistributionKind::smoothed(kappa);
    out.diagnostics = Diagnostics{};
    out.diagnostics.set("leaked_mass", leaked);
    if (leaked > opts.leak_tolerance)
        out.diagnostics.warn("weierstrass_smooth: kernel mass leaking off-grid " + std::to_string(leaked));
    out.refresh_diagnostics();
    return out;
}

// ---- Mehta P ---------------------------------------------------------------------

QuasiDistribution mehta_p(const DensityMatrix& rho, const PhaseGrid& grid, const LadderConvention& conv,
                          const MehtaOptions& opts) {
    grid.validate();
    conv.validate();
    const int k = std::max(rho.effective_dim(), 2);
    const ComplexMatrix block = rho.matrix().topLeftCorner(k, k);

    // e^{|v|^2} <-v|rho|v> = sum_{nm} rho_nm conj((-v)^n / sqrt(n!)) v^m / sqrt(m!)
    auto transform_input = [&](cplx v) {
        StateVector e(k), e_minus(k);
        cplx c = 1.0, cm = 1.0;
        for (int n = 0; n < k; ++n) {
            e(n) = c;
            e_minus(n) = cm;
            c *= v / std::sqrt(n + 1.0);
            cm *= -v / std::sqrt(n + 1.0);
        }
        return e_minus.dot(block * e);
    };
    auto mag = [&](cplx v) { return std::abs(transform_input(v)); };

    QuasiDistribution out = make_distribution(grid, conv, DistributionKind::s_param(1.0));
    // the truncated series is only trusted inside the disk |v| <= extent
    double extent = 1.0;
    double edge = circle_max(mag, extent, 256);
    bool ill_posed = false;
    while (edge > opts.decay_threshold) {
        extent += 0.25;
        if (extent > opts.max_extent) {
            ill_posed = true;
            break;
        }
        edge = circle_max(mag, extent, 256);
    }
    if (ill_posed) {
        std::ostringstream msg;
        msg << "mehta_p: e^{|v|^2}<-v|rho|v> does not decay (|f| = " << edge << " at |v| = " << opts.max_extent
            << "); P is not a regular function for this state";
        if (opts.throw_on_ill_posed) throw IllPosed(msg.str());
        out.diagnostics.warn(msg.str());
        extent = opts.max_extent;
    }

    const auto [xr, yr] = alpha_extent(grid, conv);
    const double step = kPi / (opts.alias_margin * 2.0 * std::max(xr, yr));
    const Eigen::VectorXd axis = detail::symmetric_axis(extent, step);
    const int nb = static_cast<int>(axis.size());
    Eigen::MatrixXcd f(nb, nb);
    for (int a = 0; a < nb; ++a)
        for (int b = 0; b < nb; ++b) {
            const cplx v(axis(a), axis(b));
            f(a, b) = std::abs(v) <= extent ? transform_input(v) : cplx(0.0, 0.0);
        }

    const Eigen::MatrixXcd pe = complex_plane_transform(f, axis, axis, grid, conv);
    double cond = 1.0;
    for (int i = 0; i < grid.nq; ++i) {
        for (int j = 0; j < grid.np; ++j) {
            const double r2 = std::norm(conv.to_alpha(grid.q(i), grid.p(j)));
            out.values(i, j) = pe(i, j).real() * std::exp(r2);
            cond = std::max(cond, std::exp(r2));
        }
    }
    out.diagnostics.set("ill_posed", ill_posed ? 1.0 : 0.0);
    out.diagnostics.set("condition_estimate", cond);
    out.diagnostics.set("upsilon_extent", extent);
    out.diagnostics.set("upsilon_edge_magnitude", edge);
    out.diagnostics.set("imaginary_residual", pe.imag().cwiseAbs().maxCoeff());
    out.diagnostics.set("tail_weight", rho.tail_weight());
    out.refresh_diagnostics();
    return out;
}

// ---- Cohen class -----------------------------------------------------------------

CohenKernel::CohenKernel(std::string id, std::function<cplx(double, double)> fn)
    : id_(std::move(id)), fn_(std::move(fn)) {}

CohenKernel CohenKernel::identity() {
    return CohenKernel("identity", [](double, double) { return cplx(1.0, 0.0); });
}

CohenKernel CohenKernel::gaussian(double sigma) {
    if (!(sigma > 0.0)) throw ValidationError("CohenKernel::gaussian: sigma must be > 0");
    std::ostringstream id;
    id.precision(17);
    id << "gaussian(" << sigma << ")";
    return CohenKernel(id.str(), [sigma](double theta, double tau) {
        return cplx(std::exp(-0.5 * sigma * sigma * theta * theta - tau * tau / (8.0 * sigma * sigma)), 0.0);
    });
}

CohenKernel CohenKernel::matched_gaussian(const LadderConvention& conv) {
    return gaussian(std::sqrt(conv.hbar / 2.0) / conv.lambda);
}

CohenKernel CohenKernel::tabulated(std::vector<double> theta_axis, std::vector<double> tau_axis,
                                   Eigen::MatrixXcd samples) {
    if (theta_axis.size() < 2 || tau_axis.size() < 2)
        throw ValidationError("CohenKernel::tabulated: need at least 2 samples per axis");
    if (samples.rows() != static_cast<Eigen::Index>(theta_axis.size()) ||
        samples.cols() != static_cast<Eigen::Index>(tau_axis.size()))
        throw ValidationError("CohenKernel::tabulated: sample table shape does not match axes");
    if (!std::is_sorted(theta_axis.begin(), theta_axis.end()) || !std::is_sorted(tau_axis.begin(), tau_axis.end()))
        throw ValidationError("CohenKernel::tabulated: axes must be increasing");
    auto fn = [th = std::move(theta_axis), ta = std::move(tau_axis), s = std::move(samples)](double theta, double tau) {
        if (theta < th.front() || theta > th.back() || tau < ta.front() || tau > ta.back()) return cplx(0.0, 0.0);
        auto locate = [](const std::vector<double>& ax, double x) {
            const auto it = std::upper_bound(ax.begin(), ax.end(), x);
            const std::size_t hi = std::clamp<std::size_t>(it - ax.begin(), 1, ax.size() - 1);
            const double t = (x - ax[hi - 1]) / (ax[hi] - ax[hi - 1]);
            return std::pair{hi - 1, t};
        };
        const auto [i, ti] = locate(th, theta);
        const auto [j, tj] = locate(ta, tau);
        return (1 - ti) * (1 - tj) * s(i, j) + ti * (1 - tj) * s(i + 1, j) + (1 - ti) * tj * s(i, j + 1) +
               ti * tj * s(i + 1, j + 1);
    };
    CohenKernel k("tabulated", std::move(fn));
    if (std::abs(k(0.0, 0.0) - cplx(1.0, 0.0)) > 1e-9)
        throw ValidationError("CohenKernel::tabulated: Phi(0,0) must equal 1");
    return k;
}

SampledWavefunction sample_wavefunction(const StateVector& psi, const PhaseGrid& grid, const LadderConvention& conv) {
    grid.validate();
    SampledWavefunction out;
    out.q_min = grid.q_min;
    out.dq = grid.dq();
    out.values.resize(grid.nq);
    for (int i = 0; i < grid.nq; ++i) {
        const Eigen::VectorXd phi = oscillator_functions(grid.q(i), static_cast<int>(psi.size()), conv);
        out.values(i) = (phi.cast<cplx>().array() * psi.array()).sum();
    }
    return out;
}

QuasiDistribution cohen_distribution(const SampledWavefunction& psi, const CohenKernel& kernel, const PhaseGrid& grid,
                                     const LadderConvention& conv, const CohenOptions& opts) {
    grid.validate();
    conv.validate();
    const int n = grid.nq;
    if (psi.values.size() != n || std::abs(psi.q_min - grid.q_min) > 1e-12 || std::abs(psi.dq - grid.dq()) > 1e-12)
        throw ValidationError("cohen_distribution: psi must be sampled on the grid's q axis");
    const double peak = psi.values.cwiseAbs().maxCoeff();
    const double edge = std::max(std::abs(psi.values(0)), std::abs(psi.values(n - 1)));
    if (edge > opts.edge_tolerance * peak)
    {
        std::ostringstream msg;
        msg << "cohen_distribution: resolution error, psi support not contained in the grid (edge/peak = "
            << edge / peak << ")";
        throw ValidationError(msg.str());
    }

    const double h = grid.dq();
    const int lags = n - 1;
    const int nt = 2 * lags + 1;
    Eigen::VectorXd tau(nt);
    for (int k = 0; k < nt; ++k) tau(k) = 2.0 * (k - lags) * h;

    // R(q_i, tau_k) = psi*(q_i - k h) psi(q_i + k h)
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n, nt);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < nt; ++k) {
            const int s = k - lags;
            const int lo = i - s, hi = i + s;
            if (lo < 0 || hi < 0 || lo >= n || hi >= n) continue;
            r(i, k) = std::conj(psi.values(lo)) * psi.values(hi);
        }
    }

    if (kernel.id() != "identity") {
        // ambiguity plane: theta conjugate to q, on the zero-padded DFT grid
        const int pad = n;
        const int len = n + 2 * pad;
        Eigen::VectorXd theta(len);
        for (int j = 0; j < len; ++j) theta(j) = kTwoPi * (j - len / 2) / (len * h);
        Eigen::MatrixXcd fwd(len, n), inv(n, len);
        for (int j = 0; j < len; ++j) {
            for (int i = 0; i < n; ++i) {
                const double x = (pad + i) * h;
                fwd(j, i) = std::polar(1.0, theta(j) * x);
                inv(i, j) = std::polar(1.0, -theta(j) * x) / static_cast<double>(len);
            }
        }
        Eigen::MatrixXcd amb = fwd * r;
        for (int j = 0; j < len; ++j)
            for (int k = 0; k < nt; ++k) amb(j, k) *= kernel(theta(j), tau(k));
        r = inv * amb;
    }

    Eigen::MatrixXcd phase(nt, grid.np);
    for (int k = 0; k < nt; ++k)
        for (int j = 0; j < grid.np; ++j) phase(k, j) = std::polar(1.0, -tau(k) * grid.p(j) / conv.hbar);
    const Eigen::MatrixXcd c = r * phase * (2.0 * h / kPi);

    QuasiDistribution out = make_distribution(grid, conv, DistributionKind::cohen(kernel.id()));
    out.values = c.real();
    out.diagnostics.set("imaginary_residual", c.imag().cwiseAbs().maxCoeff());
    out.diagnostics.set("edge_ratio", edge / peak);
    out.refresh_diagnostics();
    return out;
}

// ---- symbols ---------------------------------------------------------------------

QuasiDistribution symbol_grid(const PhaseGrid& grid, Ordering ordering, const std::function<double(cplx)>& g,
                              const LadderConvention& conv) {
    grid.validate();
    conv.validate();
    QuasiDistribution out = make_distribution(grid, conv, DistributionKind::symbol(ordering));
    for (int i = 0; i < grid.nq; ++i)
        for (int j = 0; j < grid.np; ++j) out.values(i, j) = g(conv.to_alpha(grid.q(i), grid.p(j)));
    return out;
}

double expectation_from_symbols(const QuasiDistribution& g, const QuasiDistribution& rho) {
    if (g.kind.family != DistributionKind::Family::symbol)
        throw ValidationError("expectation_from_symbols: first argument must be an operator symbol");
    if (!same_grid(g.grid, rho.grid)) throw ValidationError("expectation_from_symbols: grids differ");
    if (!(g.convention == rho.convention)) throw ValidationError("expectation_from_symbols: conventions differ");
    double dual = 0.0;
    switch (g.kind.ordering) {
        case Ordering::normal: dual = 1.0; break;
        case Ordering::symmetric: dual = 0.0; break;
        case Ordering::antinormal: dual = -1.0; break;
    }
    if (!rho.kind.is_s(dual)) {
        throw ValidationError("expectation_from_symbols: kind mismatch, " + g.kind.describe() + " pairs with s_param(" +
                              std::to_string(dual) + "), got " + rho.kind.describe());
    }
    return g.values.cwiseProduct(rho.values).sum() * rho.grid.cell_area(rho.convention);
}

}  // namespace qpd
