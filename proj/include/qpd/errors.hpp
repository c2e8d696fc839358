#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An input violates a documented invariant; the message names it.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// A quantity that must be representable on the chosen grid is not.
class SupportOverflow : public Error {
  public:
    SupportOverflow(const std::string& what, double suggested_extent)
        : Error(what), suggested_extent_(suggested_extent) {}
    double suggested_extent() const noexcept { return suggested_extent_; }

  private:
    double suggested_extent_;
};

/// The requested transform does not exist as a function on this grid
/// (e.g. the P function of a non-classical state).
class IllPosed : public Error {
  public:
    using Error::Error;
};

class QuadratureError : public Error {
  public:
    using Error::Error;
};

/// Named measurements and warnings attached to a result.
struct Diagnostics {
    std::map<std::string, double> values;
    std::vector<std::string> warnings;

    void set(const std::string& key, double v) { values[key] = v; }
    void warn(std::string msg) { warnings.push_back(std::move(msg)); }
    bool has(const std::string& key) const { return values.count(key) != 0; }
    double get(const std::string& key) const { return values.at(key); }
    void merge(const Diagnostics& other, const std::string& prefix = "");
};

inline void Diagnostics::merge(const Diagnostics& other, const std::string& prefix) {
    for (const auto& [k, v] : other.values) values[prefix + k] = v;
    for (const auto& w : other.warnings) warnings.push_back(prefix + w);
}

}  // namespace qpd
