#pragma once

#include "qgap/linalg.hpp"

namespace qgap {

struct PerturbationSplit {
  CMatrix h0;
  CMatrix h1;
  double lambda0 = 0.0;
  double delta = 0.0;
  CMatrix p0;
  CMatrix ground_basis;  // orthonormal columns spanning range(p0)
  CMatrix excited_basis;
  RVector excited_energies;
  double h1_norm = 0.0;
};

// Ground space of h0 = eigenvalues within degeneracy_tol of the minimum.
PerturbationSplit make_split(const CMatrix& h0, const CMatrix& h1, double degeneracy_tol = 1e-9);

CMatrix low_energy_projector(const PerturbationSplit& split);
CMatrix sw_unitary(const CMatrix& p0, const CMatrix& p);

struct EffectiveHamiltonian {
  CMatrix matrix;  // in split.ground_basis coordinates
  RVector eigenvalues;
};

EffectiveHamiltonian effective_hamiltonian(const PerturbationSplit& split, int order);

double truncation_error_bound(double epsilon, double delta, double constant = 10.0);

}  // namespace qgap
