#include "qpd/states.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace qpd {

namespace {

PureState renormalised(StateVector v, double untruncated_norm2) {
    const double kept = v.squaredNorm();
    PureState out;
    out.discarded_weight = std::max(0.0, untruncated_norm2 - kept);
    out.vec = v / std::sqrt(kept);
    return out;
}

double parse_real(std::string_view text, std::string_view what) {
    std::string s(text);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ValidationError("cannot parse " + std::string(what) + " from '" + s + "'");
    }
    if (pos != s.size()) throw ValidationError("trailing characters in " + std::string(what) + ": '" + s + "'");
    return v;
}

int parse_int(std::string_view text, std::string_view what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ValidationError("cannot parse integer " + std::string(what) + " from '" + std::string(text) + "'");
    return v;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace

PureState fock_vector(int n, FockSpace space) {
    if (n < 0 || n >= space.dim())
        throw ValidationError("fock state: n must satisfy 0 <= n < dim (n=" + std::to_string(n) + ")");
    StateVector v = StateVector::Zero(space.dim());
    v(n) = 1.0;
    return PureState{v, 0.0};
}

PureState coherent_state(cplx alpha, FockSpace space, const StateOptions& opts) {
    const double x = std::norm(alpha);
    if (x > opts.max_alpha_fraction * space.dim()) {
        throw ValidationError("coherent state: |alpha|^2 = " + std::to_string(x) + " exceeds " +
                              std::to_string(opts.max_alpha_fraction) + " * dim; increase dim");
    }
    StateVector v(space.dim());
    cplx c = std::exp(-0.5 * x);
    for (int n = 0; n < space.dim(); ++n) {
        v(n) = c;
        c *= alpha / std::sqrt(n + 1.0);
    }
    return renormalised(std::move(v), 1.0);
}

PureState squeezed_coherent(cplx alpha, const SqueezeParameter& zeta, FockSpace space, Diagnostics* diag) {
    Diagnostics local;
    const ComplexMatrix s = squeeze_direct(zeta, space, &local);
    const ComplexMatrix d = displacement(alpha, space, &local);
    if (diag != nullptr) diag->merge(local);
    StateVector v = d * s.col(0);
    return renormalised(std::move(v), 1.0);
}

NonunitarySqueezedVacuum squeezed_vacuum_nonunitary(cplx zeta, FockSpace space) {
    if (!(std::abs(zeta) < 1.0))
        throw ValidationError("non-unitary squeezed vacuum requires |zeta| < 1 (got " +
                              std::to_string(std::abs(zeta)) + ")");
    // exp(-zeta a+^2 / 2)|0> = sum_k (-zeta/2)^k sqrt((2k)!) / k! |2k>
    StateVector v = StateVector::Zero(space.dim());
    cplx c = 1.0;
    for (int k = 0; 2 * k < space.dim(); ++k) {
        v(2 * k) = c;
        // ratio of successive coefficients: (-zeta/2) sqrt((2k+1)(2k+2)) / (k+1)
        c *= (-zeta / 2.0) * std::sqrt((2.0 * k + 1.0) * (2.0 * k + 2.0)) / (k + 1.0);
    }
    NonunitarySqueezedVacuum out;
    out.paired = std::pow(1.0 + std::norm(zeta), 0.25) * v;
    out.unit = v / v.norm();
    return out;
}

cplx nonunitary_pairing(cplx zeta, FockSpace space) {
    const auto plus = squeezed_vacuum_nonunitary(zeta, space);
    const auto minus = squeezed_vacuum_nonunitary(-zeta, space);
    return minus.paired.dot(plus.paired);
}

SqueezeParameter matched_squeeze_parameter(cplx zeta) {
    if (!(std::abs(zeta) < 1.0)) throw ValidationError("matched squeeze parameter requires |zeta| < 1");
    const double r = std::atanh(std::abs(zeta));
    const double theta = std::abs(zeta) > 0.0 ? std::arg(zeta) : 0.0;
    return SqueezeParameter::polar(r, theta);
}

DensityMatrix thermal_state(double nbar, FockSpace space) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw ValidationError("thermal state: nbar must be >= 0");
    ComplexMatrix rho = ComplexMatrix::Zero(space.dim(), space.dim());
    const double ratio = nbar / (1.0 + nbar);
    double w = 1.0 / (1.0 + nbar);
    double total = 0.0;
    for (int n = 0; n < space.dim(); ++n) {
        rho(n, n) = w;
        total += w;
        w *= ratio;
    }
    rho /= total;
    return DensityMatrix(rho);
}

DensityMatrix fock_state(int n, FockSpace space) { return fock_vector(n, space).density(); }

// ---- textual forms -------------------------------------------------------

cplx parse_complex(std::string_view text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw ValidationError("empty complex number");
    if (s.back() != 'i' && s.back() != 'j') return {parse_real(s, "real number"), 0.0};

    s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_of = [](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_real(t, "imaginary part");
    };
    if (split == std::string::npos) return {0.0, imag_of(s)};
    return {parse_real(s.substr(0, split), "real part"), imag_of(s.substr(split))};
}

std::string format_complex(cplx z) {
    std::ostringstream os;
    os.precision(17);
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() < 0.0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

namespace {

StateSpec parse_single(const std::string& text) {
    const std::size_t colon = text.find(':');
    const std::string head = colon == std::string::npos ? text : text.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);

    if (head == "vacuum" && body.empty()) return StateSpec{spec::Fock{0}};
    if (body.empty()) throw ValidationError("state spec '" + text + "' is missing its parameter");
    if (head == "fock") return StateSpec{spec::Fock{parse_int(body, "fock level")}};
    if (head == "coherent") return StateSpec{spec::Coherent{parse_complex(body)}};
    if (head == "thermal") return StateSpec{spec::Thermal{parse_real(body, "thermal nbar")}};
    if (head == "nonunitary") return StateSpec{spec::NonunitarySqueezed{parse_complex(body)}};
    if (head == "squeezed") {
        const std::size_t sep = body.find(':');
        if (sep == std::string::npos) throw ValidationError("squeezed spec needs 'squeezed:<alpha>:<zeta>'");
        return StateSpec{spec::SqueezedCoherent{parse_complex(body.substr(0, sep)), parse_complex(body.substr(sep + 1))}};
    }
    throw ValidationError("unknown state kind '" + head + "'");
}

}  // namespace

StateSpec parse_state_spec(std::string_view text_in) {
    const std::string text = trim(text_in);
    if (text.rfind("mix:", 0) != 0) return parse_single(text);

    spec::Mixture mix;
    std::string rest = text.substr(4);
    std::size_t start = 0;
    while (start <= rest.size()) {
        std::size_t comma = rest.find(',', start);
        const std::string item = trim(rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        const std::size_t star = item.find('*');
        if (star == std::string::npos) throw ValidationError("mixture term '" + item + "' must be '<weight>*<state>'");
        const double w = parse_real(trim(item.substr(0, star)), "mixture weight");
        StateSpec component = parse_single(trim(item.substr(star + 1)));
        mix.weights.push_back(w);
        mix.components.push_back(std::move(component));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    double total = 0.0;
    for (double w : mix.weights) {
        if (w < 0.0) throw ValidationError("mixture weights must be >= 0");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("mixture weights must sum to 1 (sum = " + std::to_string(total) + ")");
    return StateSpec{std::move(mix)};
}

std::string to_string(const StateSpec& s) {
    struct Visitor {
        std::string operator()(const spec::Fock& f) const { return "fock:" + std::to_string(f.n); }
        std::string operator()(const spec::Coherent& c) const { return "coherent:" + format_complex(c.alpha); }
        std::string operator()(const spec::SqueezedCoherent& c) const {
            return "squeezed:" + format_complex(c.alpha) + ":" + format_complex(c.zeta);
        }
        std::string operator()(const spec::NonunitarySqueezed& c) const {
            return "nonunitary:" + format_complex(c.zeta);
        }
        std::string operator()(const spec::Thermal& t) const {
            std::ostringstream os;
            os.precision(17);
            os << "thermal:" << t.nbar;
            return os.str();
        }
        std::string operator()(const spec::Mixture& m) const {
            std::ostringstream os;
            os.precision(17);
            os << "mix:";
            for (std::size_t k = 0; k < m.weights.size(); ++k) {
                if (k) os << ",";
                os << m.weights[k] << "*" << to_string(m.components[k]);
            }
            return os.str();
        }
    };
    return std::visit(Visitor{}, s.kind);
}

DensityMatrix build_state(const StateSpec& s, FockSpace space, Diagnostics* diag, const StateOptions& opts) {
    struct Visitor {
        FockSpace space;
        Diagnostics* diag;
        const StateOptions& opts;

        void note(double discarded) const {
            if (diag == nullptr) return;
            const double prev = diag->has("discarded_weight") ? diag->get("discarded_weight") : 0.0;
            diag->set("discarded_weight", std::max(prev, discarded));
        }
        DensityMatrix operator()(const spec::Fock& f) const { return fock_state(f.n, space); }
        DensityMatrix operator()(const spec::Coherent& c) const {
            PureState p = coherent_state(c.alpha, space, opts);
            note(p.discarded_weight);
            return p.density();
        }
        DensityMatrix operator()(const spec::SqueezedCoherent& c) const {
            PureState p = squeezed_coherent(c.alpha, SqueezeParameter(c.zeta), space, diag);
            return p.density();
        }
        DensityMatrix operator()(const spec::NonunitarySqueezed& c) const {
            return DensityMatrix::from_pure(squeezed_vacuum_nonunitary(c.zeta, space).unit);
        }
        DensityMatrix operator()(const spec::Thermal& t) const { return thermal_state(t.nbar, space); }
        DensityMatrix operator()(const spec::Mixture& m) const {
            ComplexMatrix rho = ComplexMatrix::Zero(space.dim(), space.dim());
            for (std::size_t k = 0; k < m.weights.size(); ++k)
                rho += m.weights[k] * build_state(m.components[k], space, diag, opts).matrix();
            return DensityMatrix(rho);
        }
    };
    return std::visit(Visitor{space, diag, opts}, s.kind);
}

}  // namespace qpd
