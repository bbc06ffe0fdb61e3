#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>

namespace geoth {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int factorial(unsigned n) {
  Int r = 1;
  for (unsigned i = 2; i <= n; i++) r *= i;
  return r;
}

inline Int binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  Int r = 1;
  for (unsigned i = 0; i < k; i++) {
    r *= (n - i);
    r /= (i + 1);
  }
  return r;
}

// (m n)! / (m! (n!)^m), the coefficient of gamma_m(gamma_n(x)).
// Computed as a product of binomials so every intermediate is integral.
inline Int gamma_composition_coeff(unsigned m, unsigned n) {
  Int r = 1;
  for (unsigned i = 1; i <= m; i++) r *= binomial(i * n - 1, n - 1);
  return r;
}

// (k n - e)! / (n!)^k as an exact rational (integral for k large enough).
inline Rat nil_certificate_coeff(unsigned n, unsigned e, unsigned k) {
  if (k * n < e) throw std::invalid_argument("nil_certificate_coeff: kn < e");
  Rat num = factorial(k * n - e);
  Rat den = 1;
  Int nf = factorial(n);
  for (unsigned i = 0; i < k; i++) den *= nf;
  return num / den;
}

}  // namespace geoth
