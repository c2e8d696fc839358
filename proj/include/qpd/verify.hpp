#pragma once

// Self-checks of the library's invariants, grouped in suites and reported
// as measured residuals against named tolerances.

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpd/fock_core.hpp"

namespace qpd {

/// Named tolerances; the defaults cover every name any suite uses.
class ToleranceSet {
  public:
    ToleranceSet();
    double get(const std::string& name) const;
    /// Throws ValidationError for a name no suite defines.
    void set(const std::string& name, double value);
    bool defines(const std::string& name) const { return values_.count(name) != 0; }
    const std::map<std::string, double>& values() const { return values_; }

  private:
    std::map<std::string, double> values_;
};

struct Check {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct VerifyReport {
    std::string suite;
    std::vector<Check> checks;

    bool all_pass() const;
    nlohmann::json to_json() const;
};

struct VerifyConfig {
    int dim = 64;
    LadderConvention convention;
    ToleranceSet tolerances;
};

/// Suites: algebra, distributions, smoothing, amplifier, moments, all.
std::vector<std::string> verify_suites();
VerifyReport run_verify(const std::string& suite, const VerifyConfig& cfg = {});

}  // namespace qpd
