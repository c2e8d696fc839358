#pragma once

// Reading and writing distributions: CSV for spreadsheets, a JSON envelope
// {convention, kind, grid, values, diagnostics} for programs.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "qpd/quasi.hpp"

namespace qpd {

enum class GridFormat { csv, json };

GridFormat parse_grid_format(const std::string& s);
std::string to_string(GridFormat f);

/// First row: "p\q" then the q axis; each further row: p_j then F(q_i, p_j).
/// A leading `#` line carries the convention and kind so a round trip is lossless.
void write_csv(const QuasiDistribution& d, std::ostream& os);
/// Reads what write_csv produced. Without the `#` line the convention is the
/// default and the kind is s_param(0). Throws ValidationError on ragged rows or
/// a non-uniform axis.
QuasiDistribution read_csv(std::istream& is);

nlohmann::json to_json(const DistributionKind& k);
DistributionKind kind_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PhaseGrid& g);
PhaseGrid grid_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Diagnostics& d);

/// values are written as rows of constant q.
nlohmann::json to_json(const QuasiDistribution& d);
QuasiDistribution distribution_from_json(const nlohmann::json& j);

void save(const QuasiDistribution& d, const std::string& path, GridFormat f);
/// Format chosen by extension (.json, anything else CSV).
QuasiDistribution load(const std::string& path);

}  // namespace qpd
