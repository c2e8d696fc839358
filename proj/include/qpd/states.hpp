#pragma once

// Constructors for the standard single-mode states, returned as validated
// density matrices or as truncated state vectors.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qpd/fock_core.hpp"

namespace qpd {

struct StateOptions {
    /// coherent_state rejects |alpha|^2 > max_alpha_fraction * dim.
    double max_alpha_fraction = 0.25;
};

/// A truncated pure state, renormalised to unit norm; `discarded_weight`
/// is the probability the untruncated state had outside the space.
struct PureState {
    StateVector vec;
    double discarded_weight = 0.0;

    DensityMatrix density(double tol = 1e-10) const { return DensityMatrix::from_pure(vec, tol); }
};

PureState fock_vector(int n, FockSpace space);
PureState coherent_state(cplx alpha, FockSpace space, const StateOptions& opts = {});
/// D(alpha) S(zeta) |0>, both factors by matrix exponential.
PureState squeezed_coherent(cplx alpha, const SqueezeParameter& zeta, FockSpace space,
                            Diagnostics* diag = nullptr);

/// The non-unitary squeezed vacuum (1 + |zeta|^2)^{1/4} exp(-zeta a+^2 / 2) |0>.
struct NonunitarySqueezedVacuum {
    /// Normalised so that <0,0;-zeta|0,0;zeta> = 1 (not unit norm).
    StateVector paired;
    /// The same ray at unit norm.
    StateVector unit;
};

/// Requires |zeta| < 1.
NonunitarySqueezedVacuum squeezed_vacuum_nonunitary(cplx zeta, FockSpace space);
/// <0,0;-zeta|0,0;zeta> evaluated on the truncated space.
cplx nonunitary_pairing(cplx zeta, FockSpace space);
/// The unitary squeeze parameter whose vacuum matches the non-unitary state:
/// tanh r e^{i theta} = zeta.
SqueezeParameter matched_squeeze_parameter(cplx zeta);

DensityMatrix thermal_state(double nbar, FockSpace space);
DensityMatrix fock_state(int n, FockSpace space);

// ---- textual state specifications -------------------------------------

struct StateSpec;

namespace spec {
struct Fock {
    int n = 0;
};
struct Coherent {
    cplx alpha;
};
struct SqueezedCoherent {
    cplx alpha;
    cplx zeta;
};
struct NonunitarySqueezed {
    cplx zeta;
};
struct Thermal {
    double nbar = 0.0;
};
struct Mixture {
    std::vector<double> weights;
    std::vector<StateSpec> components;
};
}  // namespace spec

struct StateSpec {
    std::variant<spec::Fock, spec::Coherent, spec::SqueezedCoherent, spec::NonunitarySqueezed, spec::Thermal,
                 spec::Mixture>
        kind;
};

/// Parses forms such as `fock:2`, `coherent:1.0+0.5i`, `squeezed:1:0.3i`,
/// `nonunitary:0.4`, `thermal:0.5`, `vacuum`, `mix:0.5*fock:0,0.5*coherent:2.0`.
StateSpec parse_state_spec(std::string_view text);
std::string to_string(const StateSpec& spec);

/// Builds and validates the density matrix; renormalisation loss is written
/// to `diag` as "discarded_weight".
DensityMatrix build_state(const StateSpec& spec, FockSpace space, Diagnostics* diag = nullptr,
                          const StateOptions& opts = {});

/// Parses `1`, `-0.5`, `2i`, `1.0+0.5i`, `-0.3-0.2i`, `1e-3-2e-1i`.
cplx parse_complex(std::string_view text);
std::string format_complex(cplx z);

}  // namespace qpd
