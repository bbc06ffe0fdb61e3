#pragma once

#include "geoth/ring.hpp"

namespace geoth {

// ---------------------------------------------------------------------------
// Truncated divided-power polynomial algebras K<X...>[Y...] with divided
// degree cut at d: the module basis is
//   prod_i gamma_{a_i}(X_i) * prod_j Y_j^{b_j},  a_i <= d,
// and gamma_n(X_i) = 0 for n > d. The omitted basis elements span an ideal
// closed under the gamma operations, so the truncation is an honest PD
// quotient of K<X...>[Y...].

struct PDMonomial {
  std::vector<unsigned> xdeg;  // divided degree per X variable
  std::vector<int64_t> ydeg;   // ordinary exponent per Y variable (negative once localized)
  auto operator<=>(const PDMonomial&) const = default;
};

struct PDElement {
  std::map<PDMonomial, Scalar> coeffs;  // no zero coefficients stored
  bool is_zero() const { return coeffs.empty(); }
  bool operator==(const PDElement&) const = default;
  bool operator<(const PDElement& o) const { return coeffs < o.coeffs; }
};

struct TruncatedPDAlgebra {
  Scalar::Tag base = Scalar::Tag::Q;
  uint64_t mod = 0;
  // Base PD data: generators of I_K as scalars plus their gamma table.
  // Empty for Q and Z bases with trivial base ideal.
  std::optional<PDRingData> base_pd;
  std::vector<Name> xvars;
  std::vector<Name> yvars;
  unsigned trunc = 4;                   // divided-degree truncation d
  std::optional<size_t> inverted_yvar;  // localized at this Y variable

  static TruncatedPDAlgebra make(Scalar::Tag base, uint64_t mod, std::vector<Name> xs,
                                 std::vector<Name> ys, unsigned d);

  Scalar scalar_one() const { return Scalar::of_int(1, base, mod); }
  Scalar scalar_int(Int n) const { return Scalar::of_int(std::move(n), base, mod); }

  PDElement zero() const { return {}; }
  PDElement one() const;
  PDElement scalar(const Scalar& c) const;
  PDElement from_int(Int n) const { return scalar(scalar_int(std::move(n))); }
  // gamma_n(X_i) as a basis element.
  PDElement gamma_x(size_t i, unsigned n) const;
  PDElement yvar(size_t j, int64_t exp = 1) const;

  PDElement add(const PDElement& a, const PDElement& b) const;
  PDElement mul(const PDElement& a, const PDElement& b) const;
  PDElement neg(const PDElement& a) const;
  PDElement smul(const Scalar& c, const PDElement& a) const;
  PDElement pow(const PDElement& a, uint64_t n) const;

  // Membership in the canonical PD ideal: every monomial has positive
  // X-degree, or is X-free with coefficient in the base ideal I_K.
  bool in_pd_ideal(const PDElement& e) const;

  // gamma_n on PD-ideal elements, by recursive expansion (sum rule over
  // monomials, scalar rule on coefficients and Y-parts, composition rule on
  // the gamma factor of highest index).
  PDElement gamma(unsigned n, const PDElement& e) const;

  // Localization at a Y variable; the PD structure extends by
  // gamma_n(a / y^k) = gamma_n(a) / y^{nk}.
  TruncatedPDAlgebra localize(const Name& yvar) const;

  std::string str(const PDElement& e) const;
};

// Handle on a PD-generated ideal: a generator list whose members lie in the
// canonical PD ideal.
struct PDIdealHandle {
  std::vector<PDElement> gens;
};

// Closes the generator list under gamma_n, n >= 1, up to truncation, and
// verifies the result is a fixed point via a linear-algebra ideal-membership
// test (available over Q and Z/p).
PDIdealHandle pd_saturate(const TruncatedPDAlgebra& alg, const PDIdealHandle& ideal);

// Ideal membership over a field base (Q or Z/p): x in ideal(gens)?
bool ideal_member(const TruncatedPDAlgebra& alg, const std::vector<PDElement>& gens,
                  const PDElement& x);

// Nilpotence certificate per the divided-power nilpotence lemma: given
// a^e = 0, returns the least k with (gamma_n(a))^k = 0 together with the
// certified bound ceil(e/n)*(n+1) and the integral coefficient
// c = (kn - e)!/(n!)^k at the bound.
struct NilWitness {
  unsigned k_direct;
  unsigned k_bound;
  Int coefficient;     // at the bound
  bool identity_checked;  // (gamma_n(X))^k = c X^e gamma_{kn-e}(X) verified over Q
};
NilWitness nil_witness(const TruncatedPDAlgebra& alg, const PDElement& a, unsigned e, unsigned n);

// Five-axiom check on algebra elements.
std::vector<PDAxiomFailure> check_pd_axioms(const TruncatedPDAlgebra& alg,
                                            const std::vector<PDElement>& samples,
                                            unsigned max_index);

}  // namespace geoth
