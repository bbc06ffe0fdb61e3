#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geoth/dsl.hpp"
#include "geoth/extension.hpp"
#include "geoth/library.hpp"

using namespace geoth;

TEST_CASE("Ring + loc is the local ring theory") {
  Theory t = apply_extension(ring_theory(), builtin_loc(LocVariant::Finite));
  CHECK(check_wellformed(t).empty());
  CHECK(t.axioms.size() == ring_theory().axioms.size() + 2);
}

TEST_CASE("applying the empty extension is normalization") {
  Theory r = ring_theory();
  CHECK(apply_extension(r, empty_extension(r)) == normalize(r));
}

TEST_CASE("Ring + Ideal + PD is well-formed") {
  Theory t = apply_extension(ring_theory(), builtin_ideal());
  TheoryExtension pd = builtin_pd(3);
  pd.base = t;
  Theory t2 = apply_extension(t, pd);
  CHECK(check_wellformed(t2).empty());
}

TEST_CASE("sum of extensions equals sequential application") {
  Theory r = ring_theory();
  TheoryExtension ideal = builtin_ideal();
  TheoryExtension pd = builtin_pd(3);
  // pd over Ring+Ideal; as a sum over Ring the deltas must combine
  TheoryExtension pd_delta = pd;
  pd_delta.base = r;
  TheoryExtension both = sum(ideal, pd_delta);
  Theory sequential = apply_extension_raw(r, ideal);
  TheoryExtension pd2 = pd;
  pd2.base = sequential;
  sequential = apply_extension_raw(sequential, pd2);
  Theory at_once = apply_extension_raw(r, both);
  CHECK(normalize(sequential) == normalize(at_once));
}

TEST_CASE("sum rejects clashes and accepts proposition symbols") {
  Theory empty;
  TheoryExtension p1;
  p1.base = empty;
  p1.delta_relations["p"] = {};
  TheoryExtension p2;
  p2.base = empty;
  p2.delta_relations["q"] = {};
  TheoryExtension s = sum(p1, p2);
  CHECK(s.delta_relations.size() == 2);
  CHECK_THROWS_AS(sum(p1, p1), PreconditionError);
}

TEST_CASE("sum with the empty extension is the identity") {
  TheoryExtension e = builtin_ideal();
  TheoryExtension s = sum(e, empty_extension(e.base));
  CHECK(s == e);
}

TEST_CASE("desugaring a constant yields the partial-constant presentation") {
  Theory r = ring_theory();
  TheoryExtension e;
  e.base = r;
  e.delta_functions["c"] = FunDecl{{}, "A"};
  TheoryExtension d = desugar_functions(e);
  CHECK(d.delta_functions.empty());
  REQUIRE(d.delta_relations.count("c"));
  CHECK(d.delta_relations.at("c") == std::vector<Name>{"A"});
  REQUIRE(d.delta_axioms.size() == 2);
  // totality: true |- ex y. c(y); uniqueness: c(y) & c(z) |- y = z
  Theory base_plus = apply_extension_raw(r, d);
  CHECK(check_wellformed(base_plus).empty());
  Sequent tot = normalize_sequent(d.delta_axioms[0], base_plus.sig);
  CHECK(tot.lhs == Formula::truth());
  CHECK(tot.rhs.kind == FKind::Exists);
}

TEST_CASE("nested applications flatten innermost-first") {
  // axiom g(f(x)) = z desugars to ex y. f(x, y) & g(y, z) in the consequent
  Theory t;
  t.sig.sorts = {"A"};
  TheoryExtension e;
  e.base = t;
  e.delta_functions["f"] = FunDecl{{"A"}, "A"};
  e.delta_functions["g"] = FunDecl{{"A"}, "A"};
  Sequent ax;
  ax.ctx = {{"x", "A"}, {"z", "A"}};
  ax.lhs = Formula::truth();
  ax.rhs = Formula::eq(Term::app("g", {Term::app("f", {Term::mkvar("x")})}), Term::mkvar("z"));
  e.delta_axioms.push_back(ax);
  TheoryExtension d = desugar_functions(e);
  // last delta axiom is the rewritten one
  const Sequent& rw = d.delta_axioms.back();
  REQUIRE(rw.rhs.kind == FKind::Exists);
  const Formula& body = rw.rhs.sub[0];
  REQUIRE(body.kind == FKind::And);
  CHECK(body.sub[0] == Formula::rel("f", {Term::mkvar("x"), Term::mkvar(rw.rhs.name)}));
  CHECK(body.sub[1] == Formula::rel("g", {Term::mkvar(rw.rhs.name), Term::mkvar("z")}));
}

TEST_CASE("function-free extensions are unchanged by desugaring") {
  TheoryExtension e = builtin_ideal();
  CHECK(desugar_functions(e) == e);
}

TEST_CASE("conditional rejects function symbols and open formulas") {
  Theory r = ring_theory();
  TheoryExtension e;
  e.base = r;
  e.delta_functions["c"] = FunDecl{{}, "A"};
  Formula p = Formula::eq(Term::app("zero"), Term::app("one"));
  CHECK_THROWS_AS(conditional(e, p), PreconditionError);
  TheoryExtension d = desugar_functions(e);
  Formula open = Formula::eq(Term::mkvar("x"), Term::app("one"));
  CHECK_THROWS_AS(conditional(d, open), PreconditionError);
  CHECK_NOTHROW(conditional(d, p));
}

TEST_CASE("conditional adds guards per sort, relation and axiom") {
  Theory t;
  t.sig.sorts = {"A"};
  t.sig.relations["p"] = {};
  TheoryExtension e;
  e.base = t;
  e.delta_sorts.insert("S");
  e.delta_relations["R"] = {"A"};
  Sequent ax;
  ax.ctx = {{"x", "A"}};
  ax.lhs = Formula::rel("R", {Term::mkvar("x")});
  ax.rhs = Formula::falsity();
  e.delta_axioms.push_back(ax);
  Formula p = Formula::rel("p", {});
  TheoryExtension c = conditional(e, p);
  REQUIRE(c.delta_axioms.size() == 3);
  CHECK(c.delta_axioms[0] == Sequent{{{"x", "S"}}, Formula::truth(), p});
  CHECK(c.delta_axioms[1] == Sequent{{{"x1", "A"}}, Formula::rel("R", {Term::mkvar("x1")}), p});
  // guarded axiom: R(x) & p |- false
  CHECK(c.delta_axioms[2].lhs == Formula::conj({ax.lhs, p}));
}

TEST_CASE("Lemma law (i): T + E/phi + phi equals T + phi + E") {
  // for twenty corpus instances built over Ring
  Theory r = ring_theory();
  std::vector<Formula> phis;
  phis.push_back(Formula::eq(Term::app("zero"), Term::app("one")));
  phis.push_back(Formula::exists("x", "A", Formula::eq(Term::app("mul", {Term::mkvar("x"), Term::mkvar("x")}),
                                                       Term::app("one"))));
  std::vector<TheoryExtension> exts;
  {
    TheoryExtension e;
    e.base = r;
    e.delta_relations["R"] = {"A"};
    Sequent ax;
    ax.ctx = {{"x", "A"}, {"y", "A"}};
    ax.lhs = Formula::conj({Formula::rel("R", {Term::mkvar("x")}), Formula::rel("R", {Term::mkvar("y")})});
    ax.rhs = Formula::eq(Term::mkvar("x"), Term::mkvar("y"));
    e.delta_axioms.push_back(ax);
    exts.push_back(e);
  }
  {
    TheoryExtension e;
    e.base = r;
    e.delta_relations["p"] = {};
    Sequent ax;
    ax.lhs = Formula::rel("p", {});
    ax.rhs = Formula::exists("x", "A", Formula::rel("p", {}));
    e.delta_axioms.push_back(ax);
    exts.push_back(e);
  }
  {
    TheoryExtension e;
    e.base = r;
    e.delta_sorts.insert("S");
    e.delta_relations["Q"] = {"S", "A"};
    exts.push_back(e);
  }
  int checked = 0;
  for (const auto& phi : phis) {
    for (const auto& e : exts) {
      Theory lhs = apply_extension_raw(r, conditional(e, phi));
      lhs.axioms.push_back({{}, Formula::truth(), phi});
      Theory rhs = r;
      rhs.axioms.push_back({{}, Formula::truth(), phi});
      TheoryExtension e2 = e;
      e2.base = rhs;
      rhs = apply_extension_raw(rhs, e2);
      CHECK(normalize(lhs) == normalize(rhs));
      checked++;
    }
  }
  CHECK(checked == 6);
}

TEST_CASE("Lemma law (ii): (E1+E2)/phi equals E1/phi + E2/phi") {
  Theory r = ring_theory();
  Formula phi = Formula::eq(Term::app("zero"), Term::app("one"));
  TheoryExtension e1;
  e1.base = r;
  e1.delta_relations["R"] = {"A"};
  Sequent a1;
  a1.ctx = {{"x", "A"}};
  a1.lhs = Formula::rel("R", {Term::mkvar("x")});
  a1.rhs = Formula::falsity();
  e1.delta_axioms.push_back(a1);
  TheoryExtension e2;
  e2.base = r;
  e2.delta_relations["Sx"] = {"A"};
  TheoryExtension sum_then_cond = conditional(sum(e1, e2), phi);
  TheoryExtension cond_then_sum = sum(conditional(e1, phi), conditional(e2, phi));
  Theory a = apply_extension(r, sum_then_cond);
  Theory b = apply_extension(r, cond_then_sum);
  CHECK(a == b);
}

TEST_CASE("E / true normalizes to E") {
  Theory r = ring_theory();
  TheoryExtension e;
  e.base = r;
  e.delta_relations["R"] = {"A"};
  Sequent ax;
  ax.ctx = {{"x", "A"}};
  ax.lhs = Formula::rel("R", {Term::mkvar("x")});
  ax.rhs = Formula::falsity();
  e.delta_axioms.push_back(ax);
  TheoryExtension c = conditional(e, Formula::truth());
  CHECK(apply_extension(r, c) == apply_extension(r, e));
}

TEST_CASE("conditional_system enforces conjunct monotonicity") {
  Theory t;
  t.sig.relations["p1"] = {};
  t.sig.relations["p2"] = {};
  ExtensionSystem sys;
  sys.base = t;
  sys.index = {"a", "ab"};
  sys.leq = {{true, true}, {false, true}};
  TheoryExtension ea;
  ea.base = t;
  ea.delta_relations["R"] = {};
  sys.assignment["a"] = ea;
  TheoryExtension eab;
  eab.base = apply_extension_raw(t, ea);
  sys.assignment["ab"] = eab;
  Formula p1 = Formula::rel("p1", {});
  Formula p2 = Formula::rel("p2", {});
  std::map<Name, Formula> ok{{"a", p1}, {"ab", Formula::conj({p1, p2})}};
  CHECK_NOTHROW(conditional_system(sys, ok));
  std::map<Name, Formula> bad{{"a", p2}, {"ab", p1}};
  CHECK_THROWS_AS(conditional_system(sys, bad), PreconditionError);
  CHECK_NOTHROW(conditional_system(sys, bad, true));
  // incomparable indices need no relation between their formulas
  ExtensionSystem two;
  two.base = t;
  two.index = {"a", "b"};
  two.leq = {{true, false}, {false, true}};
  two.assignment["a"] = ea;
  TheoryExtension eb;
  eb.base = t;
  eb.delta_relations["Sx"] = {};
  two.assignment["b"] = eb;
  std::map<Name, Formula> unrelated{{"a", p1}, {"b", p2}};
  CHECK_NOTHROW(conditional_system(two, unrelated));
}

TEST_CASE("extension by definitions emits both directions plus obligations") {
  Theory t = ring_theory();
  RelDef inv_def;
  inv_def.ctx = {{"x", "A"}};
  inv_def.phi = Formula::exists(
      "xb", "A", Formula::eq(Term::app("mul", {Term::mkvar("x"), Term::mkvar("xb")}), Term::app("one")));
  TheoryExtension e = extension_by_definitions(t, {{"invr", inv_def}}, {});
  CHECK(e.delta_relations.count("invr"));
  CHECK(e.delta_axioms.size() == 2);
  CHECK(e.obligations.empty());
  // defining p by true
  Theory t2;
  t2.sig.sorts = {"A"};
  RelDef triv;
  triv.phi = Formula::truth();
  TheoryExtension e2 = extension_by_definitions(t2, {{"p", triv}}, {});
  CHECK(e2.delta_axioms.size() == 2);
  // function definition carries functionality obligations
  FunDef fd;
  fd.ctx = {{"x", "A"}, {"z", "A"}};
  fd.psi = Formula::eq(Term::app("add", {Term::mkvar("x"), Term::app("one")}), Term::mkvar("z"));
  TheoryExtension e3 = extension_by_definitions(t, {}, {{"succ", fd}});
  CHECK(e3.delta_functions.count("succ"));
  CHECK(e3.obligations.size() == 2);
}

TEST_CASE("materialize subobject and quotient") {
  Theory t = ring_theory();
  Formula phi = Formula::exists(
      "xb", "A", Formula::eq(Term::app("mul", {Term::mkvar("x"), Term::mkvar("xb")}), Term::app("one")));
  TheoryExtension sub = materialize_subobject(t, "A", "x", phi, "U", "emb");
  CHECK(sub.delta_sorts.count("U"));
  CHECK(sub.delta_functions.count("emb"));
  CHECK(sub.delta_axioms.size() == 3);
  CHECK(check_wellformed(apply_extension_raw(t, sub)).empty());

  Formula eqrel = Formula::eq(Term::mkvar("x"), Term::mkvar("y"));
  TheoryExtension quot = materialize_quotient(t, "A", "x", "y", eqrel, "Qs", "proj");
  CHECK(quot.delta_sorts.count("Qs"));
  CHECK(quot.delta_axioms.size() == 3);
  CHECK(quot.obligations.size() == 3);
  CHECK(check_wellformed(apply_extension_raw(t, quot)).empty());
}

TEST_CASE("simplex poset of three charts") {
  SimplexPoset d = SimplexPoset::of({"a", "b", "c"});
  CHECK(d.subsets.size() == 7);
  CHECK(d.subsets[0] == std::vector<size_t>{0});
  CHECK(d.subsets[6] == std::vector<size_t>{0, 1, 2});
  CHECK(d.leq(0, 3));   // {a} <= {a,b}
  CHECK(!d.leq(3, 0));
  CHECK(!d.leq(1, 4));  // {b} vs {a,c}
}
