#include "qgap/wide_real.hpp"

#include <mpfr.h>

#include <stdexcept>
#include <vector>

namespace qgap {

namespace {

class Real {
 public:
  explicit Real(long bits) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  Real(const Real&) = delete;
  Real& operator=(const Real&) = delete;
  Real(Real&& o) noexcept { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_swap(v_, o.v_); }
  ~Real() { mpfr_clear(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

std::vector<Real> make_vec(std::size_t n, long bits) {
  std::vector<Real> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) v.emplace_back(bits);
  return v;
}

}  // namespace

double taylor_thermal_trace(const SparseHermitian& h, const SparseHermitian& a, double beta, int K, long bits) {
  const std::size_t n = h.dim();
  if (a.dim() != n) throw std::invalid_argument("taylor_thermal_trace: dimension mismatch");
  if (K < 0) throw std::invalid_argument("taylor_thermal_trace: negative order");
  if (bits < MPFR_PREC_MIN || bits > 1L << 20) throw std::invalid_argument("taylor_thermal_trace: bad precision");
  const bool real = h.is_real() && a.is_real();

  // P = H^k A stored densely, row-major, real and imaginary parts.
  auto pr = make_vec(n * n, bits), pi = make_vec(n * n, bits);
  auto qr = make_vec(n * n, bits), qi = make_vec(n * n, bits);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& e : a.row(i)) {
      mpfr_set_d(pr[i * n + e.col].get(), e.value.real(), MPFR_RNDN);
      mpfr_set_d(pi[i * n + e.col].get(), e.value.imag(), MPFR_RNDN);
    }

  Real coeff(bits), sum(bits), tr(bits), tmp(bits);
  mpfr_set_ui(coeff.get(), 1, MPFR_RNDN);
  for (int k = 0;; ++k) {
    mpfr_set_zero(tr.get(), 1);
    for (std::size_t i = 0; i < n; ++i) mpfr_add(tr.get(), tr.get(), pr[i * n + i].get(), MPFR_RNDN);
    mpfr_mul(tmp.get(), tr.get(), coeff.get(), MPFR_RNDN);
    mpfr_add(sum.get(), sum.get(), tmp.get(), MPFR_RNDN);
    if (k == K) break;
    // coeff *= -2 beta / (k+1)
    mpfr_mul_d(coeff.get(), coeff.get(), -2.0 * beta, MPFR_RNDN);
    mpfr_div_ui(coeff.get(), coeff.get(), static_cast<unsigned long>(k + 1), MPFR_RNDN);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        mpfr_ptr outr = qr[i * n + j].get();
        mpfr_ptr outi = qi[i * n + j].get();
        mpfr_set_zero(outr, 1);
        mpfr_set_zero(outi, 1);
        for (const auto& e : h.row(i)) {
          const std::size_t l = e.col;
          const double hr = e.value.real(), hi = e.value.imag();
          mpfr_mul_d(tmp.get(), pr[l * n + j].get(), hr, MPFR_RNDN);
          mpfr_add(outr, outr, tmp.get(), MPFR_RNDN);
          if (real) continue;
          mpfr_mul_d(tmp.get(), pi[l * n + j].get(), hi, MPFR_RNDN);
          mpfr_sub(outr, outr, tmp.get(), MPFR_RNDN);
          mpfr_mul_d(tmp.get(), pi[l * n + j].get(), hr, MPFR_RNDN);
          mpfr_add(outi, outi, tmp.get(), MPFR_RNDN);
          mpfr_mul_d(tmp.get(), pr[l * n + j].get(), hi, MPFR_RNDN);
          mpfr_add(outi, outi, tmp.get(), MPFR_RNDN);
        }
      }
    std::swap(pr, qr);
    std::swap(pi, qi);
  }
  return mpfr_get_d(sum.get(), MPFR_RNDN);
}

}  // namespace qgap
