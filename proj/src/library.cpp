#include "geoth/library.hpp"

#include <algorithm>

namespace geoth {

RingOps RingOps::on(const Name& sort) {
  if (sort == "A") return RingOps{"A", "zero", "one", "neg", "add", "mul"};
  return RingOps{sort, "zero" + sort, "one" + sort, "neg" + sort, "add" + sort, "mul" + sort};
}

Formula inv_formula(const Term& t, const RingOps& ops, const std::set<Name>& avoid) {
  std::set<Name> used = avoid;
  collect_term_vars(t, used);
  Name w = fresh_name("w", used);
  return Formula::exists(
      w, ops.sort, Formula::eq(Term::app(ops.mul, {t, Term::mkvar(w)}), Term::app(ops.one)));
}

// ---------------------------------------------------------------------------
// Ring

static void ring_signature(Signature& sig, const RingOps& ops) {
  sig.sorts.insert(ops.sort);
  sig.functions[ops.zero] = FunDecl{{}, ops.sort};
  sig.functions[ops.one] = FunDecl{{}, ops.sort};
  sig.functions[ops.neg] = FunDecl{{ops.sort}, ops.sort};
  sig.functions[ops.add] = FunDecl{{ops.sort, ops.sort}, ops.sort};
  sig.functions[ops.mul] = FunDecl{{ops.sort, ops.sort}, ops.sort};
}

std::vector<Sequent> ring_axioms(const RingOps& ops) {
  const Name& S = ops.sort;
  Term x = Term::mkvar("x"), y = Term::mkvar("y"), z = Term::mkvar("z");
  auto add = [&](Term a, Term b) { return Term::app(ops.add, {a, b}); };
  auto mul = [&](Term a, Term b) { return Term::app(ops.mul, {a, b}); };
  Term zero = Term::app(ops.zero), one = Term::app(ops.one);
  std::vector<Sequent> out;
  auto eqax = [&](Context ctx, Term a, Term b) {
    out.push_back({std::move(ctx), Formula::truth(), Formula::eq(a, b)});
  };
  Context cx{{"x", S}};
  Context cxy{{"x", S}, {"y", S}};
  Context cxyz{{"x", S}, {"y", S}, {"z", S}};
  eqax(cxyz, add(add(x, y), z), add(x, add(y, z)));
  eqax(cxy, add(x, y), add(y, x));
  eqax(cx, add(x, zero), x);
  eqax(cx, add(x, Term::app(ops.neg, {x})), zero);
  eqax(cxyz, mul(mul(x, y), z), mul(x, mul(y, z)));
  eqax(cxy, mul(x, y), mul(y, x));
  eqax(cx, mul(x, one), x);
  eqax(cxyz, mul(x, add(y, z)), add(mul(x, y), mul(x, z)));
  return out;
}

Theory ring_theory(const RingOps& ops) {
  Theory t;
  ring_signature(t.sig, ops);
  t.axioms = ring_axioms(ops);
  return t;
}

// ---------------------------------------------------------------------------
// Ideal, nil, loc, surj

TheoryExtension builtin_ideal() {
  TheoryExtension e;
  e.base = ring_theory();
  e.delta_relations["I"] = {"A"};
  Term x = Term::mkvar("x"), y = Term::mkvar("y"), lam = Term::mkvar("lambda");
  auto mem = [](Term t) { return Formula::rel("I", {t}); };
  e.delta_axioms.push_back({{}, Formula::truth(), mem(Term::app("zero"))});
  e.delta_axioms.push_back({{{"x", "A"}, {"y", "A"}},
                            Formula::conj({mem(x), mem(y)}),
                            mem(Term::app("add", {x, y}))});
  e.delta_axioms.push_back(
      {{{"lambda", "A"}, {"x", "A"}}, mem(x), mem(Term::app("mul", {lam, x}))});
  return e;
}

Sequent nil_axiom(const std::function<Formula(const Term&)>& membership, const RingOps& ops) {
  Sequent q;
  q.ctx = {{"x", ops.sort}};
  q.lhs = membership(Term::mkvar("x"));
  q.rhs = Formula::schema_or("pow0", {Term::mkvar("x")}, Bound::sort_size());
  return q;
}

TheoryExtension builtin_nil() {
  TheoryExtension e;
  e.base = apply_extension(ring_theory(), builtin_ideal());
  e.delta_axioms.push_back(
      nil_axiom([](const Term& t) { return Formula::rel("I", {t}); }, RingOps::on("A")));
  return e;
}

std::vector<Sequent> loc_finite_axioms(const RingOps& ops) {
  std::vector<Sequent> out;
  out.push_back(
      {{}, Formula::eq(Term::app(ops.zero), Term::app(ops.one)), Formula::falsity()});
  Term x = Term::mkvar("x");
  Term one_minus_x = Term::app(ops.add, {Term::app(ops.one), Term::app(ops.neg, {x})});
  out.push_back({{{"x", ops.sort}},
                 Formula::truth(),
                 Formula::disj({inv_formula(x, ops, {"x"}), inv_formula(one_minus_x, ops, {"x"})})});
  return out;
}

TheoryExtension builtin_loc(LocVariant v) {
  TheoryExtension e;
  e.base = ring_theory();
  if (v == LocVariant::Finite) {
    e.delta_axioms = loc_finite_axioms(RingOps::on("A"));
  } else {
    e.delta_schemas.push_back(AxiomSchema{"loc", {"A"}, Bound::sort_size()});
  }
  return e;
}

Sequent surj_axiom(const Name& f, const Name& sort_a, const Name& sort_b) {
  Sequent q;
  q.ctx = {{"y", sort_b}};
  q.lhs = Formula::truth();
  q.rhs = Formula::exists(
      "x", sort_a, Formula::eq(Term::app(f, {Term::mkvar("x")}), Term::mkvar("y")));
  return q;
}

TheoryExtension builtin_surj() {
  TheoryExtension e;
  e.base = alg_alg(PresentedRing::Z(), PresentedRing::Z(), AlgFlavor::Economical);
  e.delta_axioms.push_back(surj_axiom("f", "A", "B"));
  return e;
}

// ---------------------------------------------------------------------------
// PD

void pd_ideal_signature(Signature& sig, const RingOps& ops, const PDNames& pd,
                        unsigned gamma_bound) {
  sig.sorts.insert(pd.sort);
  sig.functions[pd.iota] = FunDecl{{pd.sort}, ops.sort};
  sig.functions[pd.zero] = FunDecl{{}, pd.sort};
  sig.functions[pd.add] = FunDecl{{pd.sort, pd.sort}, pd.sort};
  sig.functions[pd.smul] = FunDecl{{ops.sort, pd.sort}, pd.sort};
  for (unsigned n = 1; n <= gamma_bound; n++)
    sig.functions[pd.gamma_prefix + std::to_string(n)] = FunDecl{{pd.sort}, pd.sort};
}

std::vector<Sequent> pd_ideal_axioms(const RingOps& ops, const PDNames& pd, unsigned gamma_bound) {
  std::vector<Sequent> out;
  const Name& SI = pd.sort;
  Term x = Term::mkvar("x"), y = Term::mkvar("y"), lam = Term::mkvar("lambda");
  auto iota = [&](Term t) { return Term::app(pd.iota, {t}); };
  auto addI = [&](Term a, Term b) { return Term::app(pd.add, {a, b}); };
  auto smul = [&](Term a, Term b) { return Term::app(pd.smul, {a, b}); };
  auto gam = [&](unsigned n, Term t) { return Term::app(pd.gamma_prefix + std::to_string(n), {t}); };
  auto numeral = [&](const Int& v) {
    return numeral_for_ops(v, ops);
  };

  // iota is an injective A-module homomorphism.
  out.push_back({{{"x", SI}, {"y", SI}},
                 Formula::eq(iota(x), iota(y)),
                 Formula::eq(x, y)});
  out.push_back({{}, Formula::truth(), Formula::eq(iota(Term::app(pd.zero)), Term::app(ops.zero))});
  out.push_back({{{"x", SI}, {"y", SI}},
                 Formula::truth(),
                 Formula::eq(iota(addI(x, y)), Term::app(ops.add, {iota(x), iota(y)}))});
  out.push_back({{{"lambda", ops.sort}, {"x", SI}},
                 Formula::truth(),
                 Formula::eq(iota(smul(lam, x)), Term::app(ops.mul, {lam, iota(x)}))});

  // gamma_1(x) = x
  out.push_back({{{"x", SI}}, Formula::truth(), Formula::eq(gam(1, x), x)});

  for (unsigned n = 2; n <= gamma_bound; n++) {
    // gamma_n(x + y) = gamma_n(x) + gamma_n(y) + sum_{i+j=n, i,j>=1} iota(gamma_i(x)) gamma_j(y)
    Term rhs = addI(gam(n, x), gam(n, y));
    for (unsigned i = 1; i + 1 <= n - 1 + 1 && i <= n - 1; i++) {
      unsigned j = n - i;
      rhs = addI(rhs, smul(iota(gam(i, x)), gam(j, y)));
    }
    out.push_back({{{"x", SI}, {"y", SI}}, Formula::truth(), Formula::eq(gam(n, addI(x, y)), rhs)});
  }
  for (unsigned n = 2; n <= gamma_bound; n++) {
    // gamma_n(lambda x) = lambda^n gamma_n(x)
    Term pw = power_term_for_ops(lam, n, ops);
    out.push_back({{{"lambda", ops.sort}, {"x", SI}},
                   Formula::truth(),
                   Formula::eq(gam(n, smul(lam, x)), smul(pw, gam(n, x)))});
  }
  for (unsigned m = 1; m <= gamma_bound; m++) {
    for (unsigned n = m; m + n <= gamma_bound; n++) {
      // iota(gamma_m(x)) gamma_n(x) = binom(m+n, m) gamma_{m+n}(x)
      out.push_back({{{"x", SI}},
                     Formula::truth(),
                     Formula::eq(smul(iota(gam(m, x)), gam(n, x)),
                                 smul(numeral(binomial(m + n, m)), gam(m + n, x)))});
    }
  }
  for (unsigned m = 2; m <= gamma_bound; m++) {
    for (unsigned n = 1; m * n <= gamma_bound; n++) {
      // gamma_m(gamma_n(x)) = ((mn)!/(m!(n!)^m)) gamma_{mn}(x)
      out.push_back({{{"x", SI}},
                     Formula::truth(),
                     Formula::eq(gam(m, gam(n, x)),
                                 smul(numeral(gamma_composition_coeff(m, n)), gam(m * n, x)))});
    }
  }
  return out;
}

std::vector<Sequent> pd_membership_axioms(const std::function<Formula(const Term&)>& membership,
                                          const RingOps& ops, const PDNames& pd) {
  std::vector<Sequent> out;
  Formula img = Formula::exists(
      "x", pd.sort, Formula::eq(Term::app(pd.iota, {Term::mkvar("x")}), Term::mkvar("y")));
  out.push_back({{{"y", ops.sort}}, img, membership(Term::mkvar("y"))});
  out.push_back({{{"y", ops.sort}}, membership(Term::mkvar("y")), img});
  return out;
}

TheoryExtension builtin_pd_ideal(unsigned gamma_bound) {
  TheoryExtension e;
  e.base = ring_theory();
  RingOps ops = RingOps::on("A");
  PDNames pd;
  Signature delta;
  pd_ideal_signature(delta, ops, pd, gamma_bound);
  delta.sorts.erase("A");
  e.delta_sorts = delta.sorts;
  e.delta_functions = delta.functions;
  e.delta_axioms = pd_ideal_axioms(ops, pd, gamma_bound);
  return e;
}

TheoryExtension builtin_pd(unsigned gamma_bound) {
  TheoryExtension e = builtin_pd_ideal(gamma_bound);
  e.base = apply_extension(ring_theory(), builtin_ideal());
  auto mem = [](const Term& t) { return Formula::rel("I", {t}); };
  auto ms = pd_membership_axioms(mem, RingOps::on("A"), PDNames{});
  e.delta_axioms.insert(e.delta_axioms.end(), ms.begin(), ms.end());
  return e;
}

// ---------------------------------------------------------------------------
// Numerals on arbitrary ring ops

Term numeral_for_ops(const Int& v, const RingOps& ops) {
  if (ops.sort == "A") {
    if (v < 0) return Term::app(ops.neg, {numeral_term((-v).convert_to<uint64_t>())});
    return numeral_term(v.convert_to<uint64_t>());
  }
  // suffixed ops: build explicitly
  std::function<Term(uint64_t)> mk = [&](uint64_t n) -> Term {
    if (n == 0) return Term::app(ops.zero);
    if (n == 1) return Term::app(ops.one);
    return Term::app(ops.add, {Term::app(ops.one), mk(n - 1)});
  };
  if (v < 0) return Term::app(ops.neg, {mk((-v).convert_to<uint64_t>())});
  return mk(v.convert_to<uint64_t>());
}

Term power_term_for_ops(const Term& t, uint64_t n, const RingOps& ops) {
  if (n == 0) return Term::app(ops.one);
  if (n == 1) return t;
  return Term::app(ops.mul, {t, power_term_for_ops(t, n - 1, ops)});
}

// ---------------------------------------------------------------------------
// Element terms

Term ElementTermEnv::gen_constant(size_t i) const {
  return Term::app(constant_prefix + ring->gens.at(i) + constant_suffix);
}

Term ElementTermEnv::operator()(const Poly& p) const {
  if (p.coeffs.empty())
    return scalar_term ? scalar_term(Int(0)) : Term::app(ops.zero);
  auto render_scalar = [&](const Int& v) {
    return scalar_term ? scalar_term(v) : numeral_for_ops(v, ops);
  };
  std::vector<Term> monos;
  for (const auto& [m, c] : p.coeffs) {
    Term scal;
    bool have_scal = true;
    switch (c.tag) {
      case Scalar::Tag::Z:
        if (c.z == 1)
          have_scal = false;
        else
          scal = render_scalar(c.z);
        break;
      case Scalar::Tag::Zmod:
        if (c.m == 1)
          have_scal = false;
        else
          scal = render_scalar(Int(c.m));
        break;
      case Scalar::Tag::Q:
        throw PreconditionError("rational coefficients have no canonical ring term");
    }
    Term t;
    bool have_t = false;
    for (size_t i = 0; i < m.size(); i++) {
      if (m[i] == 0) continue;
      if (m[i] < 0) throw PreconditionError("negative exponent in element term");
      Term powed = power_term_for_ops(gen_constant(i), static_cast<uint64_t>(m[i]), ops);
      t = have_t ? Term::app(ops.mul, {t, powed}) : powed;
      have_t = true;
    }
    Term mono;
    if (have_t && have_scal)
      mono = Term::app(ops.mul, {scal, t});
    else if (have_t)
      mono = t;
    else if (have_scal)
      mono = scal;
    else
      mono = scalar_term ? scalar_term(Int(1)) : Term::app(ops.one);
    monos.push_back(mono);
  }
  Term out = monos[0];
  for (size_t i = 1; i < monos.size(); i++) out = Term::app(ops.add, {out, monos[i]});
  return out;
}

// ---------------------------------------------------------------------------
// AlgStr

TheoryExtension alg_str(const Theory& base, const PresentedRing& K, AlgFlavor flavor,
                        const RingOps& ops, std::optional<uint64_t> expand_level) {
  TheoryExtension e;
  e.base = base;
  if (flavor == AlgFlavor::Economical) {
    ElementTermEnv env;
    env.ring = &K;
    env.ops = ops;
    for (size_t i = 0; i < K.gens.size(); i++)
      e.delta_functions["c" + K.gens[i]] = FunDecl{{}, ops.sort};
    // Characteristic relation of a Z/m base.
    if (K.base == Scalar::Tag::Zmod) {
      e.delta_axioms.push_back({{},
                                Formula::truth(),
                                Formula::eq(numeral_for_ops(Int(K.mod), ops), Term::app(ops.zero))});
    }
    for (const auto& r : K.relations) {
      e.delta_axioms.push_back({{}, Formula::truth(), Formula::eq(env(r), Term::app(ops.zero))});
    }
    return e;
  }
  // Schematic: constants c_lambda for all lambda with the compatibility
  // axiom families; finitely expanded (full table for finite rings, first
  // expand_level elements otherwise).
  if (!K.is_finite() && !expand_level)
    throw PreconditionError("alg_str: schematic flavor over an infinite ring needs an expansion level");
  std::vector<Poly> elems;
  if (K.is_finite()) {
    elems = K.enumerate();
  } else {
    throw PreconditionError("alg_str: schematic expansion of infinite rings is limited to finite tables");
  }
  auto cname = [&](const Poly& p) { return "c" + K.str(p); };
  for (const auto& el : elems) e.delta_functions[cname(el)] = FunDecl{{}, ops.sort};
  auto capp = [&](const Poly& p) { return Term::app(cname(p)); };
  e.delta_axioms.push_back(
      {{}, Formula::truth(), Formula::eq(capp(K.zero()), Term::app(ops.zero))});
  e.delta_axioms.push_back({{}, Formula::truth(), Formula::eq(capp(K.one()), Term::app(ops.one))});
  for (const auto& a : elems) {
    for (const auto& b : elems) {
      e.delta_axioms.push_back({{},
                                Formula::truth(),
                                Formula::eq(Term::app(ops.add, {capp(a), capp(b)}), capp(a + b))});
      e.delta_axioms.push_back({{},
                                Formula::truth(),
                                Formula::eq(Term::app(ops.mul, {capp(a), capp(b)}), capp(a * b))});
    }
  }
  return e;
}

Theory alg(const PresentedRing& K, AlgFlavor flavor, std::optional<uint64_t> expand_level) {
  Theory r = ring_theory();
  return apply_extension(r, alg_str(r, K, flavor, RingOps::on("A"), expand_level));
}

TheoryExtension alg_str_over(const Theory& base, const PresentedRing& R_over_K,
                             const PresentedRing& K, const Name& f, const RingOps& ops_a,
                             const RingOps& ops_b, AlgFlavor flavor) {
  if (flavor != AlgFlavor::Economical)
    throw PreconditionError("alg_str_over: only the economical flavor is implemented for R/K");
  (void)K;
  TheoryExtension e;
  e.base = base;
  // Scalar coefficients of R-relations act through f; generator constants
  // live on sort B.
  ElementTermEnv env;
  env.ring = &R_over_K;
  env.ops = ops_b;
  env.scalar_term = [f, ops_a](const Int& v) -> Term {
    return Term::app(f, {numeral_for_ops(v, ops_a)});
  };
  for (size_t i = 0; i < R_over_K.gens.size(); i++)
    e.delta_functions["c" + R_over_K.gens[i]] = FunDecl{{}, ops_b.sort};
  if (R_over_K.base == Scalar::Tag::Zmod) {
    // characteristic of the base of R, with the scalar acting through f
    e.delta_axioms.push_back({{},
                              Formula::truth(),
                              Formula::eq(env.scalar_term(Int(R_over_K.mod)),
                                          Term::app(ops_b.zero))});
  }
  for (const auto& r : R_over_K.relations)
    e.delta_axioms.push_back({{}, Formula::truth(), Formula::eq(env(r), Term::app(ops_b.zero))});
  return e;
}

Theory alg_alg(const PresentedRing& K, const PresentedRing& R_over_K, AlgFlavor flavor) {
  RingOps a = RingOps::on("A"), b = RingOps::on("B");
  Theory t = ring_theory(a);
  Theory tb = ring_theory(b);
  t.sig = Signature::merged(t.sig, tb.sig);
  for (const auto& ax : tb.axioms) t.axioms.push_back(ax);
  t.sig.functions["f"] = FunDecl{{"A"}, "B"};
  // f is a ring homomorphism.
  Term x = Term::mkvar("x"), y = Term::mkvar("y");
  auto F = [&](Term tm) { return Term::app("f", {tm}); };
  t.axioms.push_back({{}, Formula::truth(), Formula::eq(F(Term::app(a.zero)), Term::app(b.zero))});
  t.axioms.push_back({{}, Formula::truth(), Formula::eq(F(Term::app(a.one)), Term::app(b.one))});
  t.axioms.push_back({{{"x", "A"}},
                      Formula::truth(),
                      Formula::eq(F(Term::app(a.neg, {x})), Term::app(b.neg, {F(x)}))});
  t.axioms.push_back({{{"x", "A"}, {"y", "A"}},
                      Formula::truth(),
                      Formula::eq(F(Term::app(a.add, {x, y})), Term::app(b.add, {F(x), F(y)}))});
  t.axioms.push_back({{{"x", "A"}, {"y", "A"}},
                      Formula::truth(),
                      Formula::eq(F(Term::app(a.mul, {x, y})), Term::app(b.mul, {F(x), F(y)}))});
  Theory out = t;
  TheoryExtension ka = alg_str(out, K, flavor, a);
  out = apply_extension_raw(out, ka);
  TheoryExtension rb = alg_str_over(out, R_over_K, K, "f", a, b, AlgFlavor::Economical);
  out = apply_extension_raw(out, rb);
  return out;
}

Theory alg_quot(const PresentedRing& K, const PresentedRing& R_over_K, AlgFlavor flavor) {
  Theory t = alg_alg(K, R_over_K, flavor);
  t.axioms.push_back(surj_axiom("f", "A", "B"));
  return t;
}

std::vector<Sequent> ideal_ik_axioms(const PDRingData& K_data,
                                     const std::function<Formula(const Term&)>& membership,
                                     const ElementTermEnv& term_env) {
  std::vector<Sequent> out;
  for (const auto& g : K_data.ideal_gens)
    out.push_back({{}, Formula::truth(), membership(term_env(g))});
  return out;
}

std::vector<Sequent> gamma_compat_axioms(const PDRingData& K_data, unsigned gamma_bound,
                                         const RingOps& ops, const PDNames& pd,
                                         const ElementTermEnv& term_env) {
  std::vector<Sequent> out;
  auto iota = [&](Term t) { return Term::app(pd.iota, {t}); };
  Term x = Term::mkvar("x");
  for (const auto& lam : K_data.ideal_elements()) {
    for (unsigned n = 1; n <= gamma_bound; n++) {
      Poly g = K_data.gamma_eval(n, lam);
      out.push_back({{{"x", pd.sort}},
                     Formula::eq(iota(x), term_env(lam)),
                     Formula::eq(iota(Term::app(pd.gamma_prefix + std::to_string(n), {x})),
                                 term_env(g))});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// import_set

Theory import_set(const Name& sort, const std::vector<Name>& elements,
                  const std::vector<ImportedFunction>& funs,
                  const std::vector<ImportedRelation>& rels) {
  Theory t;
  t.sig.sorts.insert(sort);
  for (const auto& e : elements) t.sig.functions["c" + e] = FunDecl{{}, sort};
  auto c = [&](size_t i) { return Term::app("c" + elements[i]); };
  // pairwise distinctness
  for (size_t i = 0; i < elements.size(); i++)
    for (size_t j = i + 1; j < elements.size(); j++)
      t.axioms.push_back({{}, Formula::eq(c(i), c(j)), Formula::falsity()});
  // covering disjunction (empty set: x |- false)
  std::vector<Formula> disj;
  for (size_t i = 0; i < elements.size(); i++)
    disj.push_back(Formula::eq(Term::mkvar("x"), c(i)));
  t.axioms.push_back({{{"x", sort}}, Formula::truth(), Formula::disj(disj)});
  for (const auto& f : funs) {
    if (f.table.size() != elements.size())
      throw PreconditionError("import_set: function table size mismatch");
    t.sig.functions[f.name] = FunDecl{{sort}, sort};
    for (size_t i = 0; i < elements.size(); i++)
      t.axioms.push_back(
          {{}, Formula::truth(), Formula::eq(Term::app(f.name, {c(i)}), c(f.table.at(i)))});
  }
  for (const auto& r : rels) {
    t.sig.relations[r.name] = {sort};
    for (size_t i = 0; i < elements.size(); i++) {
      if (r.members.count(i))
        t.axioms.push_back({{}, Formula::truth(), Formula::rel(r.name, {c(i)})});
      else
        t.axioms.push_back({{}, Formula::rel(r.name, {c(i)}), Formula::falsity()});
    }
  }
  return t;
}

}  // namespace geoth
