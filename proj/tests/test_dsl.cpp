#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geoth/dsl.hpp"
#include "geoth/extension.hpp"
#include "geoth/library.hpp"

using namespace geoth;

TEST_CASE("theory print/parse round-trip") {
  Theory t = normalize(ring_theory());
  std::string doc = print_theory(t);
  Theory back = parse_theory(doc);
  CHECK(normalize(back) == t);
  CHECK(print_theory(normalize(back)) == doc);
}

TEST_CASE("round-trip with relations, schemas and existentials") {
  Theory t = ring_theory();
  t.sig.relations["I"] = {"A"};
  t.sig.relations["p"] = {};
  Sequent s;
  s.ctx = {{"x", "A"}};
  s.lhs = Formula::rel("I", {Term::mkvar("x")});
  s.rhs = Formula::disj({Formula::rel("p", {}),
                         Formula::exists("y", "A", Formula::eq(Term::app("mul", {Term::mkvar("x"),
                                                                                 Term::mkvar("y")}),
                                                               Term::app("one")))});
  t.axioms.push_back(s);
  Sequent nil;
  nil.ctx = {{"x", "A"}};
  nil.lhs = Formula::rel("I", {Term::mkvar("x")});
  nil.rhs = Formula::schema_or("pow0", {Term::mkvar("x")}, Bound::sort_size());
  t.axioms.push_back(nil);
  t.schemas.push_back(AxiomSchema{"loc", {"A"}, Bound::sort_size()});

  Theory n = normalize(t);
  std::string doc = print_theory(n);
  Theory back = parse_theory(doc);
  CHECK(normalize(back) == n);
}

TEST_CASE("numerals round-trip") {
  CHECK(parse_term("4") == numeral_term(4));
  CHECK(print_term(numeral_term(4)) == "4");
  CHECK(parse_term("0") == Term::app("zero"));
  CHECK(parse_term("x * 2 + 1") ==
        Term::app("add", {Term::app("mul", {Term::mkvar("x"), numeral_term(2)}), Term::app("one")}));
}

TEST_CASE("powers parse to repeated products") {
  CHECK(parse_term("x^3") == power_term(Term::mkvar("x"), 3));
  CHECK(parse_term("x^1") == Term::mkvar("x"));
  CHECK(parse_term("x^0") == Term::app("one"));
}

TEST_CASE("inv sugar expands") {
  Formula f = parse_formula("inv(x)");
  CHECK(f.kind == FKind::Exists);
  CHECK(f.sub[0] ==
        Formula::eq(Term::app("mul", {Term::mkvar("x"), Term::mkvar(f.name)}), Term::app("one")));
}

TEST_CASE("formula precedence: and binds tighter than or") {
  Formula f = parse_formula("p | q & r");
  REQUIRE(f.kind == FKind::Or);
  CHECK(f.sub[0] == Formula::rel("p", {}));
  CHECK(f.sub[1].kind == FKind::And);
}

TEST_CASE("diff: theory vs itself permuted is empty") {
  Theory a = ring_theory();
  Theory b = a;
  std::reverse(b.axioms.begin(), b.axioms.end());
  CHECK(diff_theories(a, b).empty());
}

TEST_CASE("diff: loc finite vs loc schematic is non-empty") {
  Theory a = apply_extension(ring_theory(), builtin_loc(LocVariant::Finite));
  Theory b = apply_extension(ring_theory(), builtin_loc(LocVariant::Schematic));
  CHECK(!diff_theories(a, b).empty());
}

TEST_CASE("extension print/parse round-trip") {
  TheoryExtension e = builtin_ideal();
  std::string doc = print_extension(e);
  TheoryExtension back = parse_extension(doc);
  CHECK(back.delta_relations == e.delta_relations);
  CHECK(normalize(back.base) == normalize(e.base));
  CHECK(back.delta_axioms.size() == e.delta_axioms.size());
}

TEST_CASE("emitting the same theory twice gives identical text") {
  Theory a = normalize(apply_extension(ring_theory(), builtin_loc(LocVariant::Finite)));
  Theory b = normalize(apply_extension(ring_theory(), builtin_loc(LocVariant::Finite)));
  CHECK(print_theory(a) == print_theory(b));
}
