#pragma once

#include "qgap/linalg.hpp"

namespace qgap {

// sum_{k=0}^{K} (-2 beta)^k / k! Tr(H^k A), accumulated in `bits` of MPFR precision.
double taylor_thermal_trace(const SparseHermitian& h, const SparseHermitian& a, double beta, int K, long bits);

}  // namespace qgap
