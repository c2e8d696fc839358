#include "qpd/grid_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace qpd {

using nlohmann::json;

GridFormat parse_grid_format(const std::string& s) {
    if (s == "csv") return GridFormat::csv;
    if (s == "json") return GridFormat::json;
    throw ValidationError("format must be csv or json, got '" + s + "'");
}

std::string to_string(GridFormat f) { return f == GridFormat::csv ? "csv" : "json"; }

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> split_numbers(const std::string& line, std::string* first_cell) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
        if (first && first_cell) {
            *first_cell = cell;
            first = false;
            continue;
        }
        first = false;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
        } catch (const std::exception&) {
            throw ValidationError("read_csv: not a number: '" + cell + "'");
        }
    }
    return out;
}

// Recovers (min, max, n) from a uniform axis.
void axis_from_samples(const std::vector<double>& x, double& lo, double& hi, int& n, const char* name) {
    if (x.size() < 2) throw ValidationError(std::string("read_csv: ") + name + " axis needs at least two nodes");
    n = static_cast<int>(x.size());
    lo = x.front();
    hi = x.back();
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i)
        if (std::abs(x[i] - (lo + i * h)) > 1e-9 * std::max(1.0, std::abs(hi - lo)))
            throw ValidationError(std::string("read_csv: ") + name + " axis is not uniform");
}

}  // namespace

void write_csv(const QuasiDistribution& d, std::ostream& os) {
    os << "# kind=" << to_json(d.kind).dump() << " hbar=" << num(d.convention.hbar)
       << " lambda=" << num(d.convention.lambda) << "\n";
    os << "p\\q";
    for (int i = 0; i < d.grid.nq; ++i) os << ',' << num(d.grid.q(i));
    os << '\n';
    for (int j = 0; j < d.grid.np; ++j) {
        os << num(d.grid.p(j));
        for (int i = 0; i < d.grid.nq; ++i) os << ',' << num(d.values(i, j));
        os << '\n';
    }
}

QuasiDistribution read_csv(std::istream& is) {
    QuasiDistribution d;
    d.kind = DistributionKind::s_param(0.0);
    std::string line;
    std::vector<double> q_axis, p_axis;
    std::vector<std::vector<double>> rows;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto k = line.find("kind=");
            const auto h = line.find(" hbar=");
            const auto l = line.find(" lambda=");
            if (k != std::string::npos && h != std::string::npos && l != std::string::npos) {
                d.kind = kind_from_json(json::parse(line.substr(k + 5, h - k - 5)));
                d.convention.hbar = std::stod(line.substr(h + 6, l - h - 6));
                d.convention.lambda = std::stod(line.substr(l + 8));
            }
            continue;
        }
        std::string first;
        std::vector<double> cells = split_numbers(line, &first);
        if (!have_header) {
            q_axis = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != q_axis.size()) throw ValidationError("read_csv: ragged row");
        p_axis.push_back(std::stod(first));
        rows.push_back(std::move(cells));
    }
    if (!have_header) throw ValidationError("read_csv: empty input");
    axis_from_samples(q_axis, d.grid.q_min, d.grid.q_max, d.grid.nq, "q");
    axis_from_samples(p_axis, d.grid.p_min, d.grid.p_max, d.grid.np, "p");
    d.convention.validate();
    d.values.resize(d.grid.nq, d.grid.np);
    for (int j = 0; j < d.grid.np; ++j)
        for (int i = 0; i < d.grid.nq; ++i) d.values(i, j) = rows[j][i];
    d.refresh_diagnostics();
    return d;
}

json to_json(const DistributionKind& k) {
    json j;
    switch (k.family) {
        case DistributionKind::Family::s_param:
            j["family"] = "s_param";
            j["s"] = k.s;
            break;
        case DistributionKind::Family::cohen:
            j["family"] = "cohen";
            j["label"] = k.label;
            break;
        case DistributionKind::Family::symbol:
            j["family"] = "symbol";
            j["ordering"] = to_string(k.ordering);
            break;
        case DistributionKind::Family::smoothed:
            j["family"] = "smoothed";
            j["kappa"] = k.kappa;
            break;
    }
    j["description"] = k.describe();
    return j;
}

DistributionKind kind_from_json(const json& j) {
    const std::string f = j.at("family").get<std::string>();
    if (f == "s_param") return DistributionKind::s_param(j.at("s").get<double>());
    if (f == "cohen") return DistributionKind::cohen(j.at("label").get<std::string>());
    if (f == "symbol") return DistributionKind::symbol(parse_ordering(j.at("ordering").get<std::string>()));
    if (f == "smoothed") return DistributionKind::smoothed(j.at("kappa").get<double>());
    throw ValidationError("unknown distribution family '" + f + "'");
}

json to_json(const PhaseGrid& g) {
    return {{"q_min", g.q_min}, {"q_max", g.q_max}, {"nq", g.nq}, {"p_min", g.p_min}, {"p_max", g.p_max}, {"np", g.np}};
}

PhaseGrid grid_from_json(const json& j) {
    PhaseGrid g;
    g.q_min = j.at("q_min").get<double>();
    g.q_max = j.at("q_max").get<double>();
    g.nq = j.at("nq").get<int>();
    g.p_min = j.at("p_min").get<double>();
    g.p_max = j.at("p_max").get<double>();
    g.np = j.at("np").get<int>();
    g.validate();
    return g;
}

json to_json(const Diagnostics& d) {
    json v = json::object();
    for (const auto& [k, x] : d.values) v[k] = x;
    return {{"values", v}, {"warnings", d.warnings}};
}

json to_json(const QuasiDistribution& d) {
    json rows = json::array();
    for (int i = 0; i < d.grid.nq; ++i) {
        std::vector<double> r(d.values.cols());
        for (int j = 0; j < d.grid.np; ++j) r[j] = d.values(i, j);
        rows.push_back(std::move(r));
    }
    return {{"convention", {{"hbar", d.convention.hbar}, {"lambda", d.convention.lambda}}},
            {"kind", to_json(d.kind)},
            {"grid", to_json(d.grid)},
            {"values", std::move(rows)},
            {"diagnostics", to_json(d.diagnostics)}};
}

QuasiDistribution distribution_from_json(const json& j) {
    QuasiDistribution d;
    d.convention.hbar = j.at("convention").at("hbar").get<double>();
    d.convention.lambda = j.at("convention").at("lambda").get<double>();
    d.convention.validate();
    d.kind = kind_from_json(j.at("kind"));
    d.grid = grid_from_json(j.at("grid"));
    const json& rows = j.at("values");
    if (rows.size() != static_cast<std::size_t>(d.grid.nq)) throw ValidationError("envelope: values rows != nq");
    d.values.resize(d.grid.nq, d.grid.np);
    for (int i = 0; i < d.grid.nq; ++i) {
        if (rows[i].size() != static_cast<std::size_t>(d.grid.np)) throw ValidationError("envelope: row length != np");
        for (int k = 0; k < d.grid.np; ++k) d.values(i, k) = rows[i][k].get<double>();
    }
    if (j.contains("diagnostics")) {
        const json& dg = j["diagnostics"];
        if (dg.contains("values"))
            for (const auto& [k, v] : dg["values"].items()) d.diagnostics.set(k, v.get<double>());
        if (dg.contains("warnings"))
            for (const auto& w : dg["warnings"]) d.diagnostics.warn(w.get<std::string>());
    }
    return d;
}

void save(const QuasiDistribution& d, const std::string& path, GridFormat f) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    if (f == GridFormat::csv) write_csv(d, os);
    else os << to_json(d).dump(1) << '\n';
    if (!os) throw Error("write to '" + path + "' failed");
}

QuasiDistribution load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open '" + path + "'");
    const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    if (is_json) return distribution_from_json(json::parse(is));
    return read_csv(is);
}

}  // namespace qpd
