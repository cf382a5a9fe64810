#pragma once

// Independent reference computations used to pin expected values in tests.
// Everything in this file deliberately avoids the production code paths it
// is used to check: results are computed either in closed form or by a
// different numerical method.

#include <qipsim/epr.hpp>
#include <qipsim/reflection.hpp>
#include <qipsim/rng.hpp>
#include <qipsim/types.hpp>

namespace qipsim::oracles {

// Trace distance between two single-qubit density matrices via the closed
// form for a traceless Hermitian 2x2 difference: both eigenvalues are
// +/- sqrt(-det(rho - sigma)).
double qubit_trace_distance(const Matrix& rho, const Matrix& sigma);

// Maximum acceptance probability of the modified reflection procedure,
// estimated without any eigendecomposition: random unit vectors are scored
// by running the procedure itself, and the best candidate is polished by
// power iteration on the (positive semidefinite) acceptance map assembled
// step by step from the spec.  The returned value is always an acceptance
// probability measured through the procedure.
double random_search_max_accept(const ReflectionSpec& spec, std::uint64_t seed,
                                int samples = 10000, int polish_iters = 300);

// Best acceptance probability of an end-to-end unitary `q` over legal initial
// states (the range of `init`), measured against the projector `accept`.
// Estimated without any eigendecomposition: random init-supported unit states
// are scored directly as |accept q psi|^2, and the best candidate is polished
// by power iteration on the acceptance map psi -> init q^dag accept q init psi
// applied as successive matrix-vector products.
double random_search_max_acceptance(const Matrix& q, const Matrix& init, const Matrix& accept,
                                    std::uint64_t seed, int samples = 2000,
                                    int polish_iters = 500);

// Outcome masses of the pair-sharing protocol, recomputed by evolving a
// density operator through an independently assembled instrument: every
// measurement is a diagonal 0/1 mask on computational patterns (after a basis
// change where needed) applied to an unnormalized density, and the three
// outcome masses are accumulated as traces.  No branch bookkeeping, no
// StateVector measurements, and none of the production distillation or
// reflection-simulation routines are involved.
struct OracleProtocolMasses {
  double accept = 0.0;
  double give_up = 0.0;
  double reject = 0.0;
};

OracleProtocolMasses oracle_run_protocol(const ProtocolConfig& config,
                                         const EPRProverStrategy& prover);

}  // namespace qipsim::oracles
