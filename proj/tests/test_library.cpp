#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geoth/dsl.hpp"
#include "geoth/gluing.hpp"
#include "geoth/library.hpp"

using namespace geoth;

TEST_CASE("builtin(Ring): one sort, five function symbols, ring axioms") {
  Theory r = ring_theory();
  CHECK(r.sig.sorts == std::set<Name>{"A"});
  CHECK(r.sig.functions.size() == 5);
  CHECK(check_wellformed(r).empty());
}

TEST_CASE("builtin(PD) includes gamma_1(x) = x") {
  TheoryExtension pd = builtin_pd(4);
  bool found = false;
  for (const auto& a : pd.delta_axioms) {
    if (a.rhs == Formula::eq(Term::app("gam1", {Term::mkvar("x")}), Term::mkvar("x"))) found = true;
  }
  CHECK(found);
  CHECK(check_wellformed(apply_extension_raw(pd.base, pd)).empty());
}

TEST_CASE("builtin(loc, finite) has the two sequents") {
  TheoryExtension loc = builtin_loc(LocVariant::Finite);
  REQUIRE(loc.delta_axioms.size() == 2);
  CHECK(loc.delta_axioms[0] ==
        Sequent{{}, Formula::eq(Term::app("zero"), Term::app("one")), Formula::falsity()});
  const Sequent& cover = loc.delta_axioms[1];
  CHECK(cover.rhs.kind == FKind::Or);
  CHECK(cover.rhs.sub.size() == 2);
}

TEST_CASE("builtin(loc, schematic) is the indexed family") {
  TheoryExtension loc = builtin_loc(LocVariant::Schematic);
  CHECK(loc.delta_axioms.empty());
  REQUIRE(loc.delta_schemas.size() == 1);
  CHECK(loc.delta_schemas[0].family == "loc");
}

TEST_CASE("builtin(nil) uses the schematic disjunction") {
  TheoryExtension nil = builtin_nil();
  REQUIRE(nil.delta_axioms.size() == 1);
  CHECK(nil.delta_axioms[0].rhs.kind == FKind::SchemaOr);
  CHECK(nil.delta_axioms[0].rhs.name == "pow0");
}

TEST_CASE("alg economical: Z gives the empty delta") {
  TheoryExtension e = alg_str(ring_theory(), PresentedRing::Z(), AlgFlavor::Economical);
  CHECK(e.delta_functions.empty());
  CHECK(e.delta_axioms.empty());
  CHECK(apply_extension(ring_theory(), e) == normalize(ring_theory()));
}

TEST_CASE("alg economical: Z[X] gives local-rings-with-one-distinguished-element shape") {
  PresentedRing K = PresentedRing::poly_over(PresentedRing::Z(), {"X"});
  TheoryExtension e = alg_str(ring_theory(), K, AlgFlavor::Economical);
  CHECK(e.delta_functions.size() == 1);
  CHECK(e.delta_functions.count("cX"));
  CHECK(e.delta_axioms.empty());
}

TEST_CASE("alg economical: Z/4 is the characteristic axiom") {
  TheoryExtension e = alg_str(ring_theory(), PresentedRing::Zmod(4), AlgFlavor::Economical);
  CHECK(e.delta_functions.empty());
  REQUIRE(e.delta_axioms.size() == 1);
  CHECK(e.delta_axioms[0].rhs == Formula::eq(numeral_term(4), Term::app("zero")));
}

TEST_CASE("alg schematic: Z/6 expands to 6 constants with operation tables") {
  TheoryExtension e = alg_str(ring_theory(), PresentedRing::Zmod(6), AlgFlavor::Schematic);
  CHECK(e.delta_functions.size() == 6);
  // c0 = 0, c1 = 1, plus two tables over 36 pairs
  CHECK(e.delta_axioms.size() == 2 + 2 * 36);
  CHECK(check_wellformed(apply_extension_raw(ring_theory(), e)).empty());
}

TEST_CASE("AlgQuot = AlgAlg + surj") {
  PresentedRing K = PresentedRing::Zmod(4);
  PresentedRing R = PresentedRing::Zmod(2);
  Theory aa = alg_alg(K, R, AlgFlavor::Economical);
  Theory aq = alg_quot(K, R, AlgFlavor::Economical);
  CHECK(aq.axioms.size() == aa.axioms.size() + 1);
  CHECK(check_wellformed(aq).empty());
  Theory aa_plus = aa;
  aa_plus.axioms.push_back(surj_axiom("f", "A", "B"));
  CHECK(normalize(aq) == normalize(aa_plus));
}

TEST_CASE("Ideal_IK with the zero ideal is plain membership of 0") {
  PDRingData K;
  K.ring = PresentedRing::Zmod(5);
  K.ideal_gens = {K.ring.zero()};
  K.cutoff = 4;
  ElementTermEnv env;
  env.ring = &K.ring;
  env.ops = RingOps::on("A");
  auto mem = [](const Term& t) { return Formula::rel("I", {t}); };
  auto axs = ideal_ik_axioms(K, mem, env);
  REQUIRE(axs.size() == 1);
  CHECK(axs[0].rhs == Formula::rel("I", {Term::app("zero")}));
}

TEST_CASE("gamma compatibility axioms for (Z/4, (2))") {
  PDRingData K = PDRingData::prime_power(2, 2, 8);
  ElementTermEnv env;
  env.ring = &K.ring;
  env.ops = RingOps::on("A");
  auto axs = gamma_compat_axioms(K, 3, RingOps::on("A"), PDNames{}, env);
  // lambda in {0, 2}, n in {1,2,3}
  CHECK(axs.size() == 6);
  // the lambda=2, n=2 instance pins iota(gam2(x)) = 2
  bool found = false;
  for (const auto& a : axs) {
    if (a.lhs == Formula::eq(Term::app("iota", {Term::mkvar("x")}), numeral_term(2)) &&
        a.rhs == Formula::eq(Term::app("iota", {Term::app("gam2", {Term::mkvar("x")})}),
                             numeral_term(2)))
      found = true;
  }
  CHECK(found);
}

TEST_CASE("import_set({0,1}): constants, disequality, covering disjunction") {
  Theory t = import_set("S", {"a0", "a1"});
  CHECK(t.sig.functions.size() == 2);
  CHECK(t.axioms.size() == 2);  // one disequality + covering
  CHECK(check_wellformed(t).empty());
}

TEST_CASE("import_set(empty): only the empty covering disjunction") {
  Theory t = import_set("S", {});
  REQUIRE(t.axioms.size() == 1);
  CHECK(t.axioms[0].rhs == Formula::falsity());
  CHECK(t.axioms[0].ctx.size() == 1);
}

TEST_CASE("importing the identity function gives two equations") {
  Theory t = import_set("S", {"a0", "a1"}, {ImportedFunction{"idf", {0, 1}}});
  int eqs = 0;
  for (const auto& a : t.axioms)
    if (a.rhs.kind == FKind::Eq && !a.rhs.terms[0].var && a.rhs.terms[0].head == "idf") eqs++;
  // operand sorting may flip sides; count both orders
  for (const auto& a : t.axioms)
    if (a.rhs.kind == FKind::Eq && !a.rhs.terms[1].var && a.rhs.terms[1].head == "idf") eqs++;
  CHECK(eqs == 2);
  CHECK(check_wellformed(t).empty());
}

TEST_CASE("every generator output passes check_wellformed") {
  CHECK(check_wellformed(ring_theory()).empty());
  CHECK(check_wellformed(apply_extension_raw(ring_theory(), builtin_ideal())).empty());
  CHECK(check_wellformed(apply_extension_raw(builtin_nil().base, builtin_nil())).empty());
  CHECK(check_wellformed(apply_extension_raw(ring_theory(), builtin_loc(LocVariant::Finite))).empty());
  CHECK(check_wellformed(apply_extension_raw(ring_theory(), builtin_loc(LocVariant::Schematic))).empty());
  CHECK(check_wellformed(apply_extension_raw(builtin_pd(4).base, builtin_pd(4))).empty());
  CHECK(check_wellformed(apply_extension_raw(builtin_surj().base, builtin_surj())).empty());
  CHECK(check_wellformed(crystalline_base_theory(3, LocVariant::Finite)).empty());
  CrystallineChart chart{PDRingData::prime_power(2, 2, 8), PresentedRing::Zmod(2)};
  CHECK(check_wellformed(affine_crystalline_theory(chart, 3, LocVariant::Finite)).empty());
}
