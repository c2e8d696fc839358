#include "qpd/cli.hpp"

#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qpd/amplifier.hpp"
#include "qpd/states.hpp"

namespace qpd::cli {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(what + ": not a number '" + s + "'");
    }
}

int to_int(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(what + ": not an integer '" + s + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

json complex_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

void emit(const json& report, std::ostream& os) { os << report.dump(2) << '\n'; }

// Writes a distribution to cfg.out, or embeds it in the report when no
// output path is configured.
void write_grid(const QuasiDistribution& d, const RunConfig& cfg, const std::string& path, json& report,
                const std::string& key) {
    if (path.empty()) {
        report[key] = to_json(d);
        return;
    }
    save(d, path, cfg.format);
    report[key + "_path"] = path;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    if (path.empty()) return path;
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

DensityMatrix make_state(const std::string& text, const RunConfig& cfg, Diagnostics& diag) {
    return build_state(parse_state_spec(text), FockSpace(cfg.dim), &diag);
}

StateVector leading_vector(const DensityMatrix& rho) {
    if (std::abs(rho.purity() - 1.0) > 1e-9)
        throw ValidationError("Cohen distributions need a pure state (purity " + std::to_string(rho.purity()) + ")");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
    return es.eigenvectors().col(rho.dim() - 1);
}

CohenKernel parse_kernel(const std::string& text, const LadderConvention& conv) {
    if (text == "identity") return CohenKernel::identity();
    if (text == "matched") return CohenKernel::matched_gaussian(conv);
    if (text.rfind("gaussian:", 0) == 0) return CohenKernel::gaussian(to_double(text.substr(9), "gaussian width"));
    throw ValidationError("unknown Cohen kernel '" + text + "' (identity, matched, gaussian:<sigma>)");
}

}  // namespace

void RunConfig::validate() const {
    if (dim < 2 || dim > 4096) throw ValidationError("dim must be in [2, 4096], got " + std::to_string(dim));
    convention.validate();
    if (grid) grid->validate();
}

PhaseGrid parse_grid(const std::string& text) {
    const auto axes = split(text, ',');
    if (axes.size() != 2) throw ValidationError("grid must be qmin:qmax:nq,pmin:pmax:np");
    const auto q = split(axes[0], ':');
    const auto p = split(axes[1], ':');
    if (q.size() != 3 || p.size() != 3) throw ValidationError("grid must be qmin:qmax:nq,pmin:pmax:np");
    PhaseGrid g;
    g.q_min = to_double(q[0], "grid qmin");
    g.q_max = to_double(q[1], "grid qmax");
    g.nq = to_int(q[2], "grid nq");
    g.p_min = to_double(p[0], "grid pmin");
    g.p_max = to_double(p[1], "grid pmax");
    g.np = to_int(p[2], "grid np");
    g.validate();
    return g;
}

void apply_tolerance(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ValidationError("tolerance must be name=value, got '" + assignment + "'");
    cfg.tolerances.set(trim(assignment.substr(0, eq)), to_double(trim(assignment.substr(eq + 1)), "tolerance"));
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "dim") cfg.dim = to_int(value, "dim");
        else if (key == "hbar") cfg.convention.hbar = to_double(value, "hbar");
        else if (key == "lambda") cfg.convention.lambda = to_double(value, "lambda");
        else if (key == "grid") cfg.grid = parse_grid(value);
        else if (key == "out") cfg.out = value;
        else if (key == "format") cfg.format = parse_grid_format(value);
        else if (key.rfind("tol.", 0) == 0) cfg.tolerances.set(key.substr(4), to_double(value, key));
        else throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    apply_config_text(cfg, ss.str());
}

int guarded(std::ostream& report, const std::function<int()>& fn) {
    try {
        return fn();
    } catch (const SupportOverflow& e) {
        emit({{"error", e.what()}, {"type", "support_overflow"}, {"suggested_extent", e.suggested_extent()}}, report);
    } catch (const IllPosed& e) {
        emit({{"error", e.what()}, {"type", "ill_posed"}}, report);
    } catch (const ValidationError& e) {
        emit({{"error", e.what()}, {"type", "validation"}}, report);
    } catch (const Error& e) {
        emit({{"error", e.what()}, {"type", "error"}}, report);
    } catch (const nlohmann::json::exception& e) {
        emit({{"error", e.what()}, {"type", "format"}}, report);
    }
    return 2;
}

int cmd_state(const std::string& state, const RunConfig& cfg, std::ostream& report) {
    cfg.validate();
    Diagnostics diag;
    const DensityMatrix rho = make_state(state, cfg, diag);
    std::vector<double> pops(rho.dim());
    for (int n = 0; n < rho.dim(); ++n) pops[n] = rho.matrix()(n, n).real();
    const double tol = cfg.tolerances.get("truncation");
    json r = {{"command", "state"},
              {"state", to_string(parse_state_spec(state))},
              {"dim", rho.dim()},
              {"mean_photon_number", rho.mean_photon_number()},
              {"mean_amplitude", complex_json(rho.expectation(annihilation(rho.space())))},
              {"purity", rho.purity()},
              {"tail_weight", rho.tail_weight()},
              {"populations", pops},
              {"diagnostics", to_json(diag)}};
    const bool pass = rho.tail_weight() <= tol;
    r["pass"] = pass;
    if (!cfg.out.empty()) {
        std::ofstream os(cfg.out);
        if (!os) throw Error("cannot open '" + cfg.out + "' for writing");
        emit(r, os);
        r.erase("populations");
        r["output_path"] = cfg.out;
    }
    emit(r, report);
    return pass ? 0 : 1;
}

int cmd_dist(const std::string& state, const DistRequest& req, const RunConfig& cfg, std::ostream& report) {
    cfg.validate();
    if (req.s && req.cohen) throw ValidationError("give either --s or --cohen, not both");
    Diagnostics diag;
    const DensityMatrix rho = make_state(state, cfg, diag);
    const PhaseGrid grid = cfg.grid ? *cfg.grid : PhaseGrid::for_state(rho, cfg.convention);

    QuasiDistribution d;
    json extra = json::object();
    if (req.cohen) {
        const CohenKernel k = parse_kernel(*req.cohen, cfg.convention);
        d = cohen_distribution(sample_wavefunction(leading_vector(rho), grid, cfg.convention), k, grid,
                               cfg.convention);
    } else {
        const double s = req.s.value_or(0.0);
        if (s == -1.0) d = husimi_direct_grid(rho, grid, cfg.convention);
        else if (s == 0.0) d = wigner_direct_grid(rho, grid, cfg.convention);
        else d = s_distribution(rho, grid, s, cfg.convention);
        if (s == 1.0) {
            MehtaOptions mo;
            mo.throw_on_ill_posed = false;
            const QuasiDistribution mp = mehta_p(rho, grid, cfg.convention, mo);
            extra["ill_posed"] = mp.diagnostics.get("ill_posed") != 0.0;
            extra["mehta_condition_estimate"] = mp.diagnostics.get("condition_estimate");
        }
    }
    d.diagnostics.merge(diag);
    const double norm = d.integral();
    const bool pass = std::abs(norm - 1.0) <= cfg.tolerances.get("normalization") &&
                      rho.tail_weight() <= cfg.tolerances.get("truncation");
    json r = {{"command", "dist"},
              {"state", to_string(parse_state_spec(state))},
              {"kind", to_json(d.kind)},
              {"grid", to_json(grid)},
              {"normalization", norm},
              {"min_value", d.min_value()},
              {"max_value", d.max_value()},
              {"tail_weight", rho.tail_weight()},
              {"warnings", d.diagnostics.warnings},
              {"pass", pass}};
    r.update(extra);
    write_grid(d, cfg, cfg.out, r, "distribution");
    emit(r, report);
    return pass ? 0 : 1;
}

int cmd_amplify(const std::string& state, const std::string& channel, const std::optional<PhaseGrid>& target,
                const RunConfig& cfg, std::ostream& report) {
    cfg.validate();
    const AmplifierChannel ch = AmplifierChannel::parse(channel);
    const ChannelParams p = channel_params(ch);
    Diagnostics diag;
    const DensityMatrix rho = make_state(state, cfg, diag);
    const PhaseGrid grid = cfg.grid ? *cfg.grid : PhaseGrid::for_state(rho, cfg.convention);
    const QuasiDistribution q_in = husimi_direct_grid(rho, grid, cfg.convention);
    const QuasiDistribution q_out = evolve_husimi(q_in, ch, target);

    const cplx mean_in = rho.expectation(annihilation(rho.space()));
    const cplx mean_out = q_out.mean_alpha();
    const double norm = q_out.integral();
    const double mean_err = std::abs(mean_out - p.gain * mean_in);
    const bool pass = std::abs(norm - 1.0) <= cfg.tolerances.get("normalization") &&
                      mean_err <= cfg.tolerances.get("mean") && rho.tail_weight() <= cfg.tolerances.get("truncation");
    json r = {{"command", "amplify"},
              {"state", to_string(parse_state_spec(state))},
              {"channel", ch.to_string()},
              {"gain", p.gain},
              {"noise", p.noise},
              {"input_normalization", q_in.integral()},
              {"output_normalization", norm},
              {"input_mean", complex_json(mean_in)},
              {"output_mean", complex_json(mean_out)},
              {"mean_error", mean_err},
              {"input_grid", to_json(q_in.grid)},
              {"output_grid", to_json(q_out.grid)},
              {"tail_weight", rho.tail_weight()},
              {"pass", pass}};
    if (cfg.format == GridFormat::json && !cfg.out.empty()) {
        std::ofstream os(cfg.out);
        if (!os) throw Error("cannot open '" + cfg.out + "' for writing");
        os << json{{"gain", p.gain}, {"noise", p.noise}, {"channel", ch.to_string()}, {"input", to_json(q_in)},
                   {"output", to_json(q_out)}}
                  .dump(1)
           << '\n';
        r["output_path"] = cfg.out;
    } else {
        write_grid(q_in, cfg, with_suffix(cfg.out, "_in"), r, "input");
        write_grid(q_out, cfg, with_suffix(cfg.out, "_out"), r, "output");
    }
    emit(r, report);
    return pass ? 0 : 1;
}

int cmd_moment(const std::string& query, const RunConfig& cfg, std::ostream& report) {
    const auto parts = split(query, ',');
    if (parts.size() != 5) throw ValidationError("moment query must be N,M,alpha,G,m");
    const int n = to_int(parts[0], "N");
    const int m = to_int(parts[1], "M");
    const cplx alpha = parse_complex(parts[2]);
    const double g = to_double(parts[3], "G");
    const double noise = to_double(parts[4], "m");
    if (n < 0 || m < 0) throw ValidationError("N and M must be non-negative");
    if (!(g >= 1.0)) throw ValidationError("G must be >= 1");
    if (!(noise >= 0.0)) throw ValidationError("m must be >= 0");

    const cplx closed = moment_integral(n, m, alpha, g, noise);
    json r = {{"command", "moment"},
              {"N", n},
              {"M", m},
              {"alpha", complex_json(alpha)},
              {"G", g},
              {"m", noise},
              {"closed_form", {{"value", complex_json(closed)}, {"route", "closed form, log-domain sum"}}}};
    bool pass = true;
    if (noise > 0.0) {
        const int nodes = (n + m) / 2 + 2;
        const cplx quad = moment_integral_quadrature(n, m, alpha, g, noise, nodes);
        const double rel = std::abs(closed - quad) / std::max(std::abs(quad), 1e-300);
        r["quadrature"] = {{"value", complex_json(quad)},
                           {"route", "tensor Gauss-Hermite, " + std::to_string(nodes) + " nodes per axis"}};
        r["relative_difference"] = rel;
        pass = rel <= cfg.tolerances.get("moment");
    } else {
        r["quadrature"] = nullptr;
        r["note"] = "m = 0: the Gaussian is a point mass, the integral vanishes";
    }
    r["pass"] = pass;
    if (!cfg.out.empty()) {
        std::ofstream os(cfg.out);
        if (!os) throw Error("cannot open '" + cfg.out + "' for writing");
        emit(r, os);
    }
    emit(r, report);
    return pass ? 0 : 1;
}

int cmd_verify(const std::string& suite, const RunConfig& cfg, std::ostream& report) {
    cfg.validate();
    VerifyConfig vc;
    vc.dim = cfg.dim;
    vc.convention = cfg.convention;
    vc.tolerances = cfg.tolerances;
    const VerifyReport vr = run_verify(suite, vc);
    json r = vr.to_json();
    r["command"] = "verify";
    r["dim"] = cfg.dim;
    if (!cfg.out.empty()) {
        std::ofstream os(cfg.out);
        if (!os) throw Error("cannot open '" + cfg.out + "' for writing");
        emit(r, os);
    }
    emit(r, report);
    return vr.all_pass() ? 0 : 1;
}

}  // namespace qpd::cli
