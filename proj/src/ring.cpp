#include "geoth/ring.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace geoth {

// ---------------------------------------------------------------------------
// Scalar

Scalar Scalar::of_int(Int v, Tag tag, uint64_t mod) {
  switch (tag) {
    case Tag::Z:
      return zi(std::move(v));
    case Tag::Q:
      return qr(Rat(std::move(v)));
    case Tag::Zmod: {
      Int r = v % Int(mod);
      if (r < 0) r += mod;
      return zm(r.convert_to<uint64_t>(), mod);
    }
  }
  throw std::logic_error("unreachable");
}

bool Scalar::is_zero() const {
  switch (tag) {
    case Tag::Z:
      return z == 0;
    case Tag::Q:
      return q == 0;
    case Tag::Zmod:
      return m == 0;
  }
  return false;
}

bool Scalar::is_one() const {
  switch (tag) {
    case Tag::Z:
      return z == 1;
    case Tag::Q:
      return q == 1;
    case Tag::Zmod:
      return m == 1 % mod;
  }
  return false;
}

static void check_same(const Scalar& a, const Scalar& b) {
  if (a.tag != b.tag || (a.tag == Scalar::Tag::Zmod && a.mod != b.mod))
    throw PreconditionError("scalar arithmetic across different base rings");
}

Scalar Scalar::operator+(const Scalar& o) const {
  check_same(*this, o);
  switch (tag) {
    case Tag::Z:
      return zi(z + o.z);
    case Tag::Q:
      return qr(q + o.q);
    case Tag::Zmod:
      return zm((m + o.m) % mod, mod);
  }
  throw std::logic_error("unreachable");
}

Scalar Scalar::operator*(const Scalar& o) const {
  check_same(*this, o);
  switch (tag) {
    case Tag::Z:
      return zi(z * o.z);
    case Tag::Q:
      return qr(q * o.q);
    case Tag::Zmod:
      return zm(static_cast<uint64_t>((static_cast<unsigned __int128>(m) * o.m) % mod), mod);
  }
  throw std::logic_error("unreachable");
}

Scalar Scalar::operator-() const {
  switch (tag) {
    case Tag::Z:
      return zi(-z);
    case Tag::Q:
      return qr(-q);
    case Tag::Zmod:
      return zm(m == 0 ? 0 : mod - m, mod);
  }
  throw std::logic_error("unreachable");
}

Scalar Scalar::pow(uint64_t n) const {
  Scalar r = Scalar::of_int(1, tag, mod);
  for (uint64_t i = 0; i < n; i++) r = r * *this;
  return r;
}

std::optional<Scalar> Scalar::inverse() const {
  switch (tag) {
    case Tag::Z:
      if (z == 1 || z == -1) return *this;
      return std::nullopt;
    case Tag::Q:
      if (q == 0) return std::nullopt;
      return qr(Rat(1) / q);
    case Tag::Zmod: {
      for (uint64_t x = 0; x < mod; x++)
        if ((static_cast<unsigned __int128>(m) * x) % mod == 1 % mod) return zm(x, mod);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

bool Scalar::operator==(const Scalar& o) const {
  if (tag != o.tag) return false;
  switch (tag) {
    case Tag::Z:
      return z == o.z;
    case Tag::Q:
      return q == o.q;
    case Tag::Zmod:
      return mod == o.mod && m == o.m;
  }
  return false;
}

bool Scalar::operator<(const Scalar& o) const {
  if (tag != o.tag) return tag < o.tag;
  switch (tag) {
    case Tag::Z:
      return z < o.z;
    case Tag::Q:
      return q < o.q;
    case Tag::Zmod:
      return std::tie(mod, m) < std::tie(o.mod, o.m);
  }
  return false;
}

std::string Scalar::str() const {
  std::ostringstream os;
  switch (tag) {
    case Tag::Z:
      os << z;
      break;
    case Tag::Q:
      os << q;
      break;
    case Tag::Zmod:
      os << m;
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Poly

Poly Poly::constant(const Scalar& c, size_t nvars) {
  Poly p;
  if (!c.is_zero()) p.coeffs[Monomial(nvars, 0)] = c;
  return p;
}

Poly Poly::operator+(const Poly& o) const {
  Poly out = *this;
  for (const auto& [m, c] : o.coeffs) {
    auto it = out.coeffs.find(m);
    if (it == out.coeffs.end()) {
      out.coeffs[m] = c;
    } else {
      Scalar s = it->second + c;
      if (s.is_zero())
        out.coeffs.erase(it);
      else
        it->second = s;
    }
  }
  return out;
}

Poly Poly::operator*(const Poly& o) const {
  Poly out;
  for (const auto& [m1, c1] : coeffs) {
    for (const auto& [m2, c2] : o.coeffs) {
      Monomial m = m1;
      for (size_t i = 0; i < m.size(); i++) m[i] += m2[i];
      Scalar c = c1 * c2;
      auto it = out.coeffs.find(m);
      if (it == out.coeffs.end()) {
        if (!c.is_zero()) out.coeffs[m] = c;
      } else {
        Scalar s = it->second + c;
        if (s.is_zero())
          out.coeffs.erase(it);
        else
          it->second = s;
      }
    }
  }
  return out;
}

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& [m, c] : out.coeffs) c = -c;
  return out;
}

// ---------------------------------------------------------------------------
// PresentedRing

PresentedRing PresentedRing::Z() {
  PresentedRing r;
  r.base = Scalar::Tag::Z;
  return r;
}

PresentedRing PresentedRing::Q() {
  PresentedRing r;
  r.base = Scalar::Tag::Q;
  return r;
}

PresentedRing PresentedRing::Zmod(uint64_t m) {
  PresentedRing r;
  r.base = Scalar::Tag::Zmod;
  r.mod = m;
  return r;
}

PresentedRing PresentedRing::poly_over(const PresentedRing& base, const std::vector<Name>& gens) {
  if (!base.gens.empty()) throw PreconditionError("poly_over: base must be a scalar ring");
  PresentedRing r = base;
  r.gens = gens;
  return r;
}

PresentedRing PresentedRing::localized_at(const Name& g) const {
  for (size_t i = 0; i < gens.size(); i++) {
    if (gens[i] == g) {
      PresentedRing r = *this;
      r.inverted = i;
      return r;
    }
  }
  throw PreconditionError("localized_at: unknown generator " + g);
}

Poly PresentedRing::gen(const Name& n) const {
  for (size_t i = 0; i < gens.size(); i++) {
    if (gens[i] == n) {
      Poly p;
      Monomial m(nvars(), 0);
      m[i] = 1;
      p.coeffs[m] = scalar_one();
      return p;
    }
  }
  throw PreconditionError("unknown generator: " + n);
}

bool PresentedRing::eq(const Poly& a, const Poly& b) const {
  if (!relations.empty()) {
    if (equality_oracle) return equality_oracle(a, b);
    throw PreconditionError("equality undecidable without an oracle for presented relations");
  }
  return a == b;
}

std::vector<Poly> PresentedRing::enumerate() const {
  if (!is_finite()) throw PreconditionError("enumerate: ring is not a finite table");
  std::vector<Poly> out;
  for (uint64_t v = 0; v < mod; v++) out.push_back(Poly::constant(Scalar::zm(v, mod), 0));
  return out;
}

Term PresentedRing::to_term(const Poly& p, const std::function<Term(size_t)>& gen_constant) const {
  if (p.coeffs.empty()) return Term::app("zero");
  // Deterministic: monomials in map order; coefficient * product of gens.
  std::vector<Term> monos;
  for (const auto& [m, c] : p.coeffs) {
    // Scalar part as a numeral (Z and Z/m; rationals are not termable).
    Term scal = Term::app("one");
    bool neg = false;
    bool have_scal = true;
    switch (c.tag) {
      case Scalar::Tag::Z: {
        Int v = c.z;
        if (v < 0) {
          neg = true;
          v = -v;
        }
        if (v == 1)
          have_scal = false;
        else
          scal = numeral_term(v.convert_to<uint64_t>());
        break;
      }
      case Scalar::Tag::Zmod: {
        if (c.m == 1)
          have_scal = false;
        else
          scal = numeral_term(c.m);
        break;
      }
      case Scalar::Tag::Q:
        throw PreconditionError("rational coefficients have no canonical ring term");
    }
    Term t;
    bool have_t = false;
    for (size_t i = 0; i < m.size(); i++) {
      if (m[i] == 0) continue;
      if (m[i] < 0) throw PreconditionError("negative exponents have no canonical ring term");
      Term g = gen_constant(i);
      Term powed = power_term(g, static_cast<uint64_t>(m[i]));
      t = have_t ? Term::app("mul", {t, powed}) : powed;
      have_t = true;
    }
    Term mono;
    if (have_t && have_scal)
      mono = Term::app("mul", {scal, t});
    else if (have_t)
      mono = t;
    else
      mono = scal;
    if (neg) mono = Term::app("neg", {mono});
    monos.push_back(mono);
  }
  Term out = monos[0];
  for (size_t i = 1; i < monos.size(); i++) out = Term::app("add", {out, monos[i]});
  return out;
}

std::string PresentedRing::str(const Poly& p) const {
  if (p.coeffs.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.coeffs) {
    if (!first) os << " + ";
    first = false;
    os << c.str();
    for (size_t i = 0; i < m.size(); i++) {
      if (m[i] == 0) continue;
      os << "*" << gens[i];
      if (m[i] != 1) os << "^" << m[i];
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// PDRingData

Poly PDRingData::gamma_of_generator(unsigned n, size_t i) const {
  if (n == 0) return ring.one();
  if (n == 1) return ideal_gens.at(i);
  if (ideal_gens.at(i).is_zero()) return ring.zero();
  auto it = gamma.find({n, i});
  if (it != gamma.end()) return it->second;
  if (cutoff && n > cutoff) return ring.zero();
  throw PreconditionError("gamma table missing entry n=" + std::to_string(n));
}

std::optional<std::vector<Poly>> PDRingData::ideal_decompose(const Poly& x) const {
  if (!ring.is_finite())
    throw PreconditionError("ideal_decompose requires a finite ring table");
  std::vector<Poly> elems = ring.enumerate();
  // Brute-force search over coefficient tuples; desk scale by contract.
  std::vector<size_t> idx(ideal_gens.size(), 0);
  while (true) {
    Poly acc = ring.zero();
    for (size_t i = 0; i < ideal_gens.size(); i++)
      acc = acc + (elems[idx[i]] * ideal_gens[i]);
    if (acc == x) {
      std::vector<Poly> out;
      for (size_t i = 0; i < ideal_gens.size(); i++) out.push_back(elems[idx[i]]);
      return out;
    }
    size_t k = 0;
    while (k < idx.size()) {
      if (++idx[k] < elems.size()) break;
      idx[k] = 0;
      k++;
    }
    if (k == idx.size() || idx.empty()) break;
  }
  return std::nullopt;
}

Poly PDRingData::gamma_eval(unsigned n, const Poly& x) const {
  if (n == 0) return ring.one();
  auto dec = ideal_decompose(x);
  if (!dec) throw PreconditionError("gamma_eval: element not in the ideal");
  // gamma_n of sum lambda_i g_i via the sum rule over the summands and the
  // scalar rule on each lambda_i g_i.
  std::function<Poly(unsigned, size_t)> of_tail = [&](unsigned k, size_t from) -> Poly {
    if (k == 0) return ring.one();
    if (from >= ideal_gens.size()) return ring.zero();
    // gamma_k(lambda g + rest) = sum_{i+j=k} gamma_i(lambda g) gamma_j(rest)
    Poly acc = ring.zero();
    for (unsigned i = 0; i <= k; i++) {
      unsigned j = k - i;
      Poly gi = ring.pow((*dec)[from], i) * gamma_of_generator(i, from);
      Poly gj = of_tail(j, from + 1);
      acc = acc + (gi * gj);
    }
    return acc;
  };
  return of_tail(n, 0);
}

std::vector<Poly> PDRingData::ideal_elements() const {
  std::vector<Poly> out;
  for (const auto& e : ring.enumerate()) {
    if (in_ideal(e)) out.push_back(e);
  }
  return out;
}

PDRingData PDRingData::prime_power(uint64_t p, unsigned k, unsigned cutoff) {
  PDRingData d;
  uint64_t pk = 1;
  for (unsigned i = 0; i < k; i++) pk *= p;
  d.ring = PresentedRing::Zmod(pk);
  d.ideal_gens = {Poly::constant(Scalar::zm(p % pk, pk), 0)};
  d.cutoff = cutoff;
  for (unsigned n = 2; n <= cutoff; n++) {
    // gamma_n(p) = p^n / n! in Z_(p), reduced mod p^k.
    Int num = 1;
    for (unsigned i = 0; i < n; i++) num *= p;
    Int den = factorial(n);
    // strip p-adic valuation of den
    unsigned v = 0;
    while (den % p == 0) {
      den /= p;
      v++;
    }
    if (v >= n) throw std::logic_error("v_p(n!) >= n impossible");
    Int pw = 1;
    for (unsigned i = 0; i < n - v; i++) pw *= p;
    // value = p^(n-v) * den^{-1} mod p^k
    Int denmod = den % pk;
    if (denmod < 0) denmod += pk;
    Scalar dm = Scalar::zm(denmod.convert_to<uint64_t>(), pk);
    auto inv = dm.inverse();
    if (!inv) throw std::logic_error("denominator not invertible mod p^k");
    Scalar val = Scalar::of_int(pw, Scalar::Tag::Zmod, pk) * *inv;
    d.gamma[{n, 0}] = Poly::constant(val, 0);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Axiom checking on PDRingData

std::vector<PDAxiomFailure> check_pd_axioms(const PDRingData& data, const std::vector<Poly>& samples,
                                            unsigned max_index) {
  std::vector<PDAxiomFailure> fails;
  const auto& R = data.ring;
  auto gam = [&](unsigned n, const Poly& x) { return data.gamma_eval(n, x); };
  auto render = [&](const Poly& p) { return R.str(p); };

  for (const auto& x : samples) {
    if (!data.in_ideal(x)) continue;
    // gamma_1(x) = x
    if (!(gam(1, x) == x)) fails.push_back({"gamma_1(x) = x", "x=" + render(x)});
    for (unsigned n = 1; n <= max_index; n++) {
      // gamma_n(lambda x) = lambda^n gamma_n(x)
      for (const auto& lam : R.enumerate()) {
        Poly lhs = gam(n, lam * x);
        Poly rhs = R.pow(lam, n) * gam(n, x);
        if (!(lhs == rhs))
          fails.push_back({"gamma_n(lambda x) = lambda^n gamma_n(x)",
                           "n=" + std::to_string(n) + " lambda=" + render(lam) + " x=" + render(x)});
      }
    }
    for (unsigned m = 1; m <= max_index; m++) {
      for (unsigned n = 1; m + n <= max_index; n++) {
        // gamma_m(x) gamma_n(x) = C(m+n, m) gamma_{m+n}(x)
        Poly lhs = gam(m, x) * gam(n, x);
        Poly c = R.from_int(binomial(m + n, m));
        Poly rhs = c * gam(m + n, x);
        if (!(lhs == rhs))
          fails.push_back({"gamma_m(x) gamma_n(x) = binom(m+n,m) gamma_{m+n}(x)",
                           "m=" + std::to_string(m) + " n=" + std::to_string(n) + " x=" + render(x)});
      }
    }
    for (unsigned m = 1; m <= max_index; m++) {
      for (unsigned n = 1; m * n <= max_index; n++) {
        // gamma_m(gamma_n(x)) = ((mn)!/(m!(n!)^m)) gamma_{mn}(x)
        Poly gn = gam(n, x);
        if (!data.in_ideal(gn)) {
          fails.push_back({"gamma_n(x) stays in the ideal",
                           "n=" + std::to_string(n) + " x=" + render(x)});
          continue;
        }
        Poly lhs = gam(m, gn);
        Poly rhs = R.from_int(gamma_composition_coeff(m, n)) * gam(m * n, x);
        if (!(lhs == rhs))
          fails.push_back({"gamma_m(gamma_n(x)) = ((mn)!/(m!(n!)^m)) gamma_{mn}(x)",
                           "m=" + std::to_string(m) + " n=" + std::to_string(n) + " x=" + render(x)});
      }
    }
    // x^n = n! gamma_n(x)
    for (unsigned n = 1; n <= max_index; n++) {
      Poly lhs = R.pow(x, n);
      Poly rhs = R.from_int(factorial(n)) * gam(n, x);
      if (!(lhs == rhs))
        fails.push_back({"x^n = n! gamma_n(x)", "n=" + std::to_string(n) + " x=" + render(x)});
    }
  }
  // gamma_n(x + y) = sum_{i+j=n} gamma_i(x) gamma_j(y)
  for (const auto& x : samples) {
    if (!data.in_ideal(x)) continue;
    for (const auto& y : samples) {
      if (!data.in_ideal(y)) continue;
      for (unsigned n = 1; n <= max_index; n++) {
        Poly lhs = gam(n, x + y);
        Poly rhs = R.zero();
        for (unsigned i = 0; i <= n; i++) rhs = rhs + (gam(i, x) * gam(n - i, y));
        if (!(lhs == rhs))
          fails.push_back({"gamma_n(x + y) = sum gamma_i(x) gamma_j(y)",
                           "n=" + std::to_string(n) + " x=" + render(x) + " y=" + render(y)});
      }
    }
  }
  return fails;
}

}  // namespace geoth
