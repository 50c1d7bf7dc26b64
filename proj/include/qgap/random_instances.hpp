#pragma once

#include <random>

#include "qgap/circuits.hpp"
#include "qgap/linalg.hpp"

namespace qgap {

using Rng = std::mt19937_64;

CMatrix random_unitary(Rng& rng, int dim);
CVector random_state(Rng& rng, int dim);
CMatrix random_hermitian(Rng& rng, int dim, double scale = 1.0);

// Haar-random gates on random targets; decision qubit 0.
VerifierCircuit random_circuit(Rng& rng, int m, int w, int gate_count);

// Witness-controlled coin flips followed by a classical decision function.
// Accept operator is diagonal, every basis-witness probability is a nonzero
// multiple of 1/4.
VerifierCircuit random_dyadic_verifier(Rng& rng, int w);

// Random eigenbasis, lowest eigenvalue `ground`, the rest in [ground+gap, ground+gap+spread].
CMatrix random_gapped_hamiltonian(Rng& rng, int dim, double ground, double gap, double spread);

}  // namespace qgap
