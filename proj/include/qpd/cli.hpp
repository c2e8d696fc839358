#pragma once

// Command implementations behind the `qpd` executable. Each command writes a
// JSON report to `report`, emits data to the configured output, and returns
// the process exit status: 0 when every diagnostic is within tolerance,
// 1 when some is not, 2 on invalid input or a failed computation.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "qpd/grid_io.hpp"
#include "qpd/verify.hpp"

namespace qpd::cli {

inline constexpr const char* kConfigEnv = "QPD_CONFIG";

struct RunConfig {
    int dim = 64;
    LadderConvention convention;
    std::optional<PhaseGrid> grid;  ///< unset: chosen from the state
    ToleranceSet tolerances;
    std::string out;  ///< empty: data goes to the report stream
    GridFormat format = GridFormat::csv;

    /// dim in [2, 4096], convention and grid valid.
    void validate() const;
};

/// `qmin:qmax:nq,pmin:pmax:np`
PhaseGrid parse_grid(const std::string& text);
/// `name=value`, applied to the tolerance set.
void apply_tolerance(RunConfig& cfg, const std::string& assignment);

/// Flat `key = value` lines; `#` starts a comment. Keys: dim, hbar, lambda,
/// grid, out, format, tol.<name>.
void apply_config_text(RunConfig& cfg, const std::string& text);
void apply_config_file(RunConfig& cfg, const std::string& path);

struct DistRequest {
    std::optional<double> s;
    /// identity | matched | gaussian:<sigma>
    std::optional<std::string> cohen;
};

int cmd_state(const std::string& state, const RunConfig& cfg, std::ostream& report);
int cmd_dist(const std::string& state, const DistRequest& req, const RunConfig& cfg, std::ostream& report);
int cmd_amplify(const std::string& state, const std::string& channel, const std::optional<PhaseGrid>& target,
                const RunConfig& cfg, std::ostream& report);
/// `N,M,alpha,G,m`
int cmd_moment(const std::string& query, const RunConfig& cfg, std::ostream& report);
int cmd_verify(const std::string& suite, const RunConfig& cfg, std::ostream& report);

/// Runs `fn`, turning library errors into a JSON error report and status 2.
int guarded(std::ostream& report, const std::function<int()>& fn);

}  // namespace qpd::cli
