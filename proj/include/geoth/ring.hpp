#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "geoth/bignum.hpp"
#include "geoth/syntax.hpp"

namespace geoth {

// ---------------------------------------------------------------------------
// Exact scalars over Z, Q or Z/m.

struct Scalar {
  enum class Tag : uint8_t { Z, Q, Zmod } tag = Tag::Z;
  Int z;           // Tag::Z
  Rat q;           // Tag::Q
  uint64_t m = 0;  // Tag::Zmod value, in [0, mod)
  uint64_t mod = 0;

  static Scalar zi(Int v) { return Scalar{Tag::Z, std::move(v), 0, 0, 0}; }
  static Scalar qr(Rat v) { return Scalar{Tag::Q, 0, std::move(v), 0, 0}; }
  static Scalar zm(uint64_t v, uint64_t mod) { return Scalar{Tag::Zmod, 0, 0, v % mod, mod}; }
  static Scalar of_int(Int v, Tag tag, uint64_t mod);

  bool is_zero() const;
  bool is_one() const;
  Scalar operator+(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator-() const;
  Scalar pow(uint64_t n) const;
  std::optional<Scalar> inverse() const;
  bool operator==(const Scalar& o) const;
  bool operator<(const Scalar& o) const;
  std::string str() const;
};

// ---------------------------------------------------------------------------
// Multivariate polynomials (Laurent in designated inverted variables).

using Monomial = std::vector<int64_t>;  // exponent per generator

struct Poly {
  std::map<Monomial, Scalar> coeffs;  // no zero coefficients stored

  static Poly zero() { return {}; }
  static Poly constant(const Scalar& c, size_t nvars);

  bool is_zero() const { return coeffs.empty(); }
  Poly operator+(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  bool operator==(const Poly& o) const { return coeffs == o.coeffs; }
  bool operator<(const Poly& o) const { return coeffs < o.coeffs; }
};

// ---------------------------------------------------------------------------
// Presented rings: base tag Z | Q | Z/m, polynomial generators, relations.
// Polynomial normal forms are available when there are no relations (the
// relations stay symbolic data for theory emission); elements of Z/m with no
// generators reduce to tables. Localization at a single generator variable
// is supported via Laurent exponents.

struct PresentedRing {
  Scalar::Tag base = Scalar::Tag::Z;
  uint64_t mod = 0;  // for Zmod
  std::vector<Name> gens;
  std::vector<Poly> relations;                  // over gens; symbolic
  std::optional<size_t> inverted;               // localized at this generator
  std::function<bool(const Poly&, const Poly&)> equality_oracle;  // for presented classes

  static PresentedRing Z();
  static PresentedRing Q();
  static PresentedRing Zmod(uint64_t m);
  // Z[g1, ..., gk] etc.
  static PresentedRing poly_over(const PresentedRing& base, const std::vector<Name>& gens);
  PresentedRing localized_at(const Name& gen) const;

  size_t nvars() const { return gens.size(); }
  Poly zero() const { return Poly::zero(); }
  Poly one() const { return Poly::constant(scalar_one(), nvars()); }
  Poly from_int(Int n) const { return Poly::constant(Scalar::of_int(std::move(n), base, mod), nvars()); }
  Poly gen(size_t i) const {
    Poly p;
    Monomial m(nvars(), 0);
    m.at(i) = 1;
    p.coeffs[m] = scalar_one();
    return p;
  }
  Poly gen(const Name& n) const;
  Scalar scalar_one() const { return Scalar::of_int(1, base, mod); }

  Poly add(const Poly& a, const Poly& b) const { return a + b; }
  Poly mul(const Poly& a, const Poly& b) const { return a * b; }
  Poly neg(const Poly& a) const { return -a; }
  Poly pow(const Poly& a, uint64_t n) const {
    Poly r = one();
    for (uint64_t i = 0; i < n; i++) r = r * a;
    return r;
  }
  bool eq(const Poly& a, const Poly& b) const;

  // Finite enumeration: available iff base is Z/m and there are no
  // generators (desk-scale schematic expansion).
  bool is_finite() const { return base == Scalar::Tag::Zmod && gens.empty(); }
  std::vector<Poly> enumerate() const;

  // Canonical closed term over the theory of rings: numerals for scalars,
  // generator constants named by gen_constant(i).
  Term to_term(const Poly& p, const std::function<Term(size_t)>& gen_constant) const;
  std::string str(const Poly& p) const;
};

// ---------------------------------------------------------------------------
// User-supplied PD data on a presented ring: ideal generators and a gamma
// table on them, extended to the whole ideal by the gamma axioms.

struct PDRingData {
  PresentedRing ring;
  std::vector<Poly> ideal_gens;
  // gamma[(n, i)] = gamma_n(ideal_gens[i]); indices n >= 1 up to a cutoff,
  // entries beyond the cutoff are zero.
  std::map<std::pair<unsigned, size_t>, Poly> gamma;
  unsigned cutoff = 0;

  Poly gamma_of_generator(unsigned n, size_t i) const;
  // Membership decomposition x = sum lambda_i g_i (finite rings: search).
  std::optional<std::vector<Poly>> ideal_decompose(const Poly& x) const;
  bool in_ideal(const Poly& x) const { return ideal_decompose(x).has_value(); }
  // gamma_n extended to the whole ideal by the sum and scalar rules.
  Poly gamma_eval(unsigned n, const Poly& x) const;
  std::vector<Poly> ideal_elements() const;  // finite rings only

  // The canonical PD ring (Z/p^k, (p)) with gamma_n(p) = p^n / n! reduced.
  static PDRingData prime_power(uint64_t p, unsigned k, unsigned cutoff = 8);
};

struct PDAxiomFailure {
  std::string axiom;
  std::string witness;
};

// Evaluates the five divided-power axioms on all relevant tuples drawn from
// the samples; empty report means all pass.
std::vector<PDAxiomFailure> check_pd_axioms(const PDRingData& data, const std::vector<Poly>& samples,
                                            unsigned max_index);

}  // namespace geoth
