#pragma once

#include <stdexcept>
#include <string>

namespace twistor {

enum class Kind { pseudo_riemannian, symplectic };

inline const char* kind_name(Kind k) {
    return k == Kind::pseudo_riemannian ? "pseudo_riemannian" : "symplectic";
}

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad dimensions, signature mismatches, unsupported kind/size combinations.
struct DimensionError : Error {
    using Error::Error;
};

// An input fails a documented precondition (membership, symmetry, degeneracy).
struct PreconditionError : Error {
    using Error::Error;
};

// A numerical procedure failed to reach its accuracy contract (FD gate, pivots).
struct NumericalError : Error {
    using Error::Error;
};

// Bad user-facing configuration (CLI flags, config files).
struct ConfigError : Error {
    using Error::Error;
};

// All tolerances used by the library.  One profile is threaded through every
// operation; the defaults match the contracts asserted by the test suites.
struct ToleranceProfile {
    double exact = 1e-10;         // exact-algebra identities (J^2=-Id, projectors)
    double reconstruction = 1e-9; // sums of computed parts vs. the input
    double group = 1e-9;          // form preservation of sampled group elements
    double membership = 1e-8;     // vertical / V3 membership gates
    double rank = 1e-8;           // relative singular-value cutoff for ranks
    double fd_gate = 1e-5;        // pre-snap constraint residual of the FD engine
    double fd_match = 1e-6;       // FD curvature vs. closed-form oracles
    double verdict_pass = 1e-6;   // sampled residual below this => condition holds
    double verdict_fail = 1e-3;   // sampled residual above this => condition fails
    double degenerate = 1e-8;     // plane / pivot degeneracy guards
};

namespace detail {
// Selftest mutation hook: a nonzero value perturbs one internal coefficient so
// that `twistorctl selftest` must go red.  Zero in normal operation.
inline double& mutation_epsilon() {
    static double eps = 0.0;
    return eps;
}
} // namespace detail

} // namespace twistor
