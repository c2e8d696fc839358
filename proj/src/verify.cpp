#include "qpd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qpd/amplifier.hpp"
#include "qpd/quasi.hpp"
#include "qpd/states.hpp"

namespace qpd {

ToleranceSet::ToleranceSet()
    : values_{{"algebraic", 1e-10},   {"truncation", 1e-6}, {"distribution", 1e-5}, {"smoothing", 1e-4},
              {"marginal", 1e-4},     {"normalization", 2e-3}, {"mean", 1e-3},    {"pure_gain", 1e-3},
              {"moment", 1e-6},       {"closure", 1e-8},     {"expectation", 1e-2}} {}

double ToleranceSet::get(const std::string& name) const {
    const auto it = values_.find(name);
    if (it == values_.end()) throw ValidationError("tolerance '" + name + "' is not defined");
    return it->second;
}

void ToleranceSet::set(const std::string& name, double value) {
    if (!defines(name)) throw ValidationError("unknown tolerance '" + name + "'");
    if (!(value >= 0.0) || !std::isfinite(value)) throw ValidationError("tolerance '" + name + "' must be >= 0");
    values_[name] = value;
}

bool VerifyReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::json VerifyReport::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json r = {{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}};
        if (!c.note.empty()) r["note"] = c.note;
        rows.push_back(std::move(r));
    }
    return {{"suite", suite}, {"pass", all_pass()}, {"checks", std::move(rows)}};
}

std::vector<std::string> verify_suites() { return {"algebra", "distributions", "smoothing", "amplifier", "moments"}; }

namespace {

class Recorder {
  public:
    Recorder(VerifyReport& r, const ToleranceSet& t) : report_(r), tol_(t) {}

    void add(const std::string& name, double residual, const std::string& tol_name, std::string note = "") {
        const double t = tol_.get(tol_name);
        report_.checks.push_back({name, residual, t, std::isfinite(residual) && residual <= t, std::move(note)});
    }

    // Runs `fn`; an exception becomes a failed check.
    template <class F>
    void guarded(const std::string& name, F&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            report_.checks.push_back({name, std::numeric_limits<double>::infinity(), 0.0, false, e.what()});
        }
    }

  private:
    VerifyReport& report_;
    const ToleranceSet& tol_;
};

double central_max_diff(const QuasiDistribution& a, const QuasiDistribution& b) {
    double worst = 0.0;
    const double hq = 0.25 * (a.grid.q_max - a.grid.q_min), hp = 0.25 * (a.grid.p_max - a.grid.p_min);
    const double cq = 0.5 * (a.grid.q_max + a.grid.q_min), cp = 0.5 * (a.grid.p_max + a.grid.p_min);
    for (int i = 0; i < a.grid.nq; ++i)
        for (int j = 0; j < a.grid.np; ++j)
            if (std::abs(a.grid.q(i) - cq) <= hq + 1e-12 && std::abs(a.grid.p(j) - cp) <= hp + 1e-12)
                worst = std::max(worst, std::abs(a.values(i, j) - b.values(i, j)));
    return worst;
}

struct NamedState {
    std::string name;
    DensityMatrix rho;
};

std::vector<NamedState> probe_states(FockSpace s) {
    return {{"vacuum", fock_state(0, s)},
            {"coherent(1)", coherent_state(1.0, s).density()},
            {"fock(1)", fock_state(1, s)},
            {"thermal(0.5)", thermal_state(0.5, s)}};
}

void algebra(Recorder& rec, const VerifyConfig& cfg) {
    const FockSpace s(cfg.dim);
    const int d = cfg.dim;
    const ComplexMatrix a = annihilation(s), ad = creation(s);
    const ComplexMatrix comm = a * ad - ad * a;
    rec.add("commutator_identity_below_top", (comm - identity(s)).topLeftCorner(d - 1, d - 1).cwiseAbs().maxCoeff(),
            "algebraic");
    rec.add("commutator_top_entry", std::abs(comm(d - 1, d - 1) + double(d - 1)), "algebraic",
            "entry (dim-1, dim-1) equals -(dim-1)");

    const cplx alpha(0.7, 0.3);
    rec.guarded("displacement", [&] {
        const ComplexMatrix dp = displacement(alpha, s), dm = displacement(-alpha, s);
        rec.add("displacement_inverse", block_norm(dp * dm - identity(s), d / 2), "truncation");
        rec.add("displacement_conjugation", block_norm(dp.adjoint() * a * dp - a - alpha * identity(s), d / 2),
                "truncation");
        rec.add("displacement_vs_laguerre_elements", block_norm(dp - displacement_elements(alpha, s), d / 2),
                "truncation");
    });

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ur(0.0, 3.0), ut(0.0, 2.0 * kPi);
    double bch = 0.0, factors = 0.0;
    for (int k = 0; k < 20; ++k) {
        const BchIdentity id = bch_matrix_identity(SqueezeParameter::polar(ur(rng), ut(rng)));
        const double scale = std::max(1.0, id.closed_form.cwiseAbs().maxCoeff());
        bch = std::max(bch, (id.numerical - id.closed_form).cwiseAbs().maxCoeff() / scale);
        factors = std::max(factors,
                           (su11_ordered_product(id.a, id.c, id.b) - id.closed_form).cwiseAbs().maxCoeff() / scale);
    }
    rec.add("bch_series_vs_closed_form", bch, "algebraic");
    rec.add("bch_factor_product", factors, "algebraic");

    rec.guarded("squeeze", [&] {
        const SqueezeParameter z = SqueezeParameter::polar(0.8, 0.4);
        const ComplexMatrix sd = squeeze_direct(z, s);
        rec.add("squeeze_unitarity", block_norm(sd.adjoint() * sd - identity(s), d / 2), "truncation");
        const double r = std::min(0.5, 0.02 * d);
        const SqueezeParameter zr = SqueezeParameter::polar(r, 0.4);
        const ComplexMatrix diff = squeeze_decomposed(zr, s) - squeeze_direct(zr, s);
        rec.add("squeeze_decomposition_vacuum_column", diff.col(0).head(d / 2).norm(), "truncation",
                "r = " + std::to_string(r));
        const StateVector vac = squeeze_decomposed(zr, s).col(0);
        double odd = 0.0;
        for (int n = 1; n < d; n += 2) odd = std::max(odd, std::abs(vac(n)));
        rec.add("squeezed_vacuum_odd_levels", odd, "algebraic");
    });

    rec.guarded("nonunitary", [&] {
        const cplx zeta = 0.4;
        const NonunitarySqueezedVacuum v = squeezed_vacuum_nonunitary(zeta, s);
        rec.add("nonunitary_annihilation", ((a + zeta * ad) * v.paired).head(d - 1).norm(), "truncation");
        rec.add("nonunitary_pairing", std::abs(nonunitary_pairing(zeta, s) - 1.0), "truncation");
    });
}

void distributions(Recorder& rec, const VerifyConfig& cfg) {
    const FockSpace s(cfg.dim);
    const LadderConvention& conv = cfg.convention;
    const PhaseGrid grid = PhaseGrid::square(5.0, 48);
    for (const auto& st : probe_states(s)) {
        rec.guarded("distributions:" + st.name, [&] {
            const QuasiDistribution wd = wigner_direct_grid(st.rho, grid, conv);
            rec.add("wigner_transform_vs_direct:" + st.name,
                    central_max_diff(s_distribution(st.rho, grid, 0.0, conv), wd), "distribution");
            rec.add("husimi_transform_vs_direct:" + st.name,
                    central_max_diff(s_distribution(st.rho, grid, -1.0, conv), husimi_direct_grid(st.rho, grid, conv)),
                    "distribution");
            rec.add("wigner_normalization:" + st.name, std::abs(wd.integral() - 1.0), "normalization");
        });
    }
    rec.guarded("fock1_wigner_origin", [&] {
        const double w0 = wigner_direct(fock_state(1, s), 0.0, 0.0, conv);
        rec.add("fock1_wigner_origin", std::abs(w0 + 2.0 / kPi), "distribution", "W(0) = -2/pi");
    });
    rec.guarded("marginal", [&] {
        const DensityMatrix rho = coherent_state(1.0, s).density();
        const PhaseGrid wide = PhaseGrid::square(8.0, 97);
        const QuasiDistribution w = wigner_direct_grid(rho, wide, conv);
        double worst = 0.0;
        for (int j = 0; j < wide.np; ++j) {
            const double m = w.values.col(j).sum() * wide.dq() * conv.alpha_area_per_qp();
            worst = std::max(worst, std::abs(m - momentum_density(rho, wide.p(j), conv)));
        }
        rec.add("marginal_over_q", worst, "marginal");
    });
    rec.guarded("cohen_identity", [&] {
        const PhaseGrid g7 = PhaseGrid::square(7.0, 57);
        const PureState vac = fock_vector(0, s);
        const QuasiDistribution c =
            cohen_distribution(sample_wavefunction(vac.vec, g7, conv), CohenKernel::identity(), g7, conv);
        rec.add("cohen_identity_is_wigner", (c.values - wigner_direct_grid(vac.density(), g7, conv).values).cwiseAbs().maxCoeff(),
                "distribution");
    });
    rec.guarded("optical_equivalence", [&] {
        const DensityMatrix rho = thermal_state(1.0, FockSpace(std::max(cfg.dim, 60)));
        const PhaseGrid wide = PhaseGrid::square(8.0, 97);
        const QuasiDistribution p = s_distribution(rho, wide, 1.0, conv);
        const QuasiDistribution sym = symbol_grid(wide, Ordering::normal, [](cplx z) { return std::norm(z); }, conv);
        rec.add("optical_equivalence_thermal", std::abs(expectation_from_symbols(sym, p) - rho.mean_photon_number()),
                "expectation");
    });
}

void smoothing(Recorder& rec, const VerifyConfig& cfg) {
    const FockSpace s(cfg.dim);
    const LadderConvention& conv = cfg.convention;
    const PhaseGrid grid = PhaseGrid::square(6.0, 64);
    const double kappa = matched_smoothing_width(conv);
    for (const auto& st : probe_states(s)) {
        rec.guarded("smoothing:" + st.name, [&] {
            const QuasiDistribution w = wigner_direct_grid(st.rho, grid, conv);
            const QuasiDistribution sm = weierstrass_smooth(w, kappa);
            rec.add("smoothed_wigner_is_husimi:" + st.name,
                    (sm.values - husimi_direct_grid(st.rho, grid, conv).values).cwiseAbs().maxCoeff(), "smoothing");
            rec.add("smoothed_nonnegative:" + st.name, std::max(0.0, -sm.min_value()), "algebraic");
            rec.add("smoothing_keeps_normalization:" + st.name, std::abs(sm.integral() - w.integral()), "normalization");
        });
    }
    rec.guarded("cohen_matched_gaussian", [&] {
        const PhaseGrid g7 = PhaseGrid::square(7.0, 57);
        const PureState coh = coherent_state(0.5, s);
        const QuasiDistribution c =
            cohen_distribution(sample_wavefunction(coh.vec, g7, conv), CohenKernel::matched_gaussian(conv), g7, conv);
        rec.add("cohen_matched_gaussian_is_husimi",
                (c.values - husimi_direct_grid(coh.density(), g7, conv).values).cwiseAbs().maxCoeff(), "smoothing");
    });
}

void amplifier(Recorder& rec, const VerifyConfig& cfg) {
    const FockSpace s(cfg.dim);
    const LadderConvention& conv = cfg.convention;
    const cplx beta0(0.6, -0.3);
    const DensityMatrix rho = coherent_state(beta0, s).density();
    const PhaseGrid grid = PhaseGrid::square(6.0, 96);
    const QuasiDistribution q_in = husimi_direct_grid(rho, grid, conv);
    rec.guarded("amplifier", [&] {
        const AmplifierChannel ch{0.5, 1.0, 2.0, 0.3};
        const ChannelParams p = channel_params(ch);
        const QuasiDistribution out = evolve_husimi(q_in, ch);
        rec.add("amplified_normalization", std::abs(out.integral() - 1.0), "normalization");
        rec.add("amplified_mean", std::abs(out.mean_alpha() - p.gain * beta0), "mean");
        rec.add("amplified_range", std::max({0.0, -out.min_value(), out.max_value() - 1.0 / kPi}), "algebraic",
                "values within [0, 1/pi]");

        const QuasiDistribution pure = evolve_husimi_pure_gain(q_in, p.gain);
        const QuasiDistribution tiny = evolve_husimi(q_in, p.gain, 1e-6, pure.grid);
        rec.add("small_noise_is_pure_gain", (tiny.values - pure.values).cwiseAbs().maxCoeff(), "pure_gain");

        double resample = 0.0;
        for (int i = 0; i < pure.grid.nq; ++i)
            for (int j = 0; j < pure.grid.np; ++j) {
                const cplx z = conv.to_alpha(pure.grid.q(i), pure.grid.p(j));
                resample = std::max(resample,
                                    std::abs(pure.values(i, j) - husimi_direct(rho, z / p.gain) / (p.gain * p.gain)));
            }
        rec.add("pure_gain_rescaling", resample, "algebraic");

        const AmplifierChannel idle{0.5, 1.0, 2.0, 0.0};
        const QuasiDistribution same = evolve_husimi(q_in, idle);
        rec.add("zero_time_is_identity", (same.values - q_in.values).cwiseAbs().maxCoeff(), "algebraic");
    });
}

void moments(Recorder& rec, const VerifyConfig&) {
    bool exact = true;
    Rational fact = 1;
    for (unsigned n = 0; n <= 20; ++n) {
        if (n > 0) fact *= n;
        if (radial_integral(n) != fact / 2) exact = false;
    }
    rec.add("radial_integral_exact", exact ? 0.0 : 1.0, "algebraic", "n!/2 for n <= 20");
    double radial = 0.0;
    for (int n = 0; n <= 10; ++n) {
        // int d^2 beta |beta|^{2n} e^{-|beta|^2} = 2 pi I_{2n+1}
        const double q = moment_integral_quadrature(n, n, 0.0, 1.0, 1.0).real() / (2.0 * kPi);
        const double ref = static_cast<double>(radial_integral(n));
        radial = std::max(radial, std::abs(q - ref) / ref);
    }
    rec.add("radial_integral_quadrature", radial, "moment");

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.5, 1.5), ug(1.0, 3.0), um(0.2, 2.0);
    double closed = 0.0, sym = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const cplx alpha(u(rng), u(rng));
        const double g = ug(rng), m = um(rng);
        for (int n = 0; n <= 6; ++n)
            for (int k = 0; k <= 6; ++k) {
                const cplx cf = moment_integral(n, k, alpha, g, m);
                const cplx qd = moment_integral_quadrature(n, k, alpha, g, m);
                closed = std::max(closed, std::abs(cf - qd) / std::abs(qd));
                sym = std::max(sym, std::abs(std::conj(cf) - moment_integral(k, n, alpha, g, m)) / std::abs(cf));
            }
    }
    rec.add("moment_closed_form_vs_quadrature", closed, "moment");
    rec.add("moment_conjugate_symmetry", sym, "algebraic");

    rec.add("identity_operator_gain_only",
            std::abs(amplified_operator_husimi(OrderedPolynomial::identity(), {0.3, 0.2}, 2.0, 1.0) - 0.25),
            "algebraic", "1/G^2");

    rec.guarded("ordering_closure", [&] {
        std::uniform_real_distribution<double> uc(-1.0, 1.0);
        OrderedPolynomial f;
        for (int n = 0; n <= 3; ++n)
            for (int k = 0; k <= 3; ++k)
                if (n + k <= 4) f.coeffs[{n, k}] = cplx(uc(rng), uc(rng));
        const FockSpace work(10);
        const OrderedPolynomial anti = convert_ordering(f, Ordering::antinormal, work);
        const OrderedPolynomial symm = convert_ordering(f, Ordering::symmetric, work);
        double worst = 0.0;
        for (const cplx alpha : {cplx(0.0, 0.0), cplx(0.5, -0.3), cplx(-1.2, 0.8)}) {
            const cplx hn = amplified_operator_husimi(f, alpha, 2.0, 1.5);
            const double scale = std::max(1.0, std::abs(hn));
            worst = std::max({worst, std::abs(amplified_operator_husimi(anti, alpha, 2.0, 1.5) - hn) / scale,
                              std::abs(amplified_operator_husimi(symm, alpha, 2.0, 1.5) - hn) / scale});
        }
        rec.add("ordering_conversion_closure", worst, "closure");
    });
}

}  // namespace

VerifyReport run_verify(const std::string& suite, const VerifyConfig& cfg) {
    if (cfg.dim < 8) throw ValidationError("verify: dim >= 8 required");
    VerifyReport report;
    report.suite = suite;
    Recorder rec(report, cfg.tolerances);
    auto run = [&](const std::string& name) {
        if (name == "algebra") algebra(rec, cfg);
        else if (name == "distributions") distributions(rec, cfg);
        else if (name == "smoothing") smoothing(rec, cfg);
        else if (name == "amplifier") amplifier(rec, cfg);
        else if (name == "moments") moments(rec, cfg);
        else throw ValidationError("unknown verify suite '" + name + "'");
    };
    if (suite == "all")
        for (const auto& name : verify_suites()) run(name);
    else
        run(suite);
    return report;
}

}  // namespace qpd
