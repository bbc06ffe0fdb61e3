#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "geoth/dsl.hpp"
#include "geoth/library.hpp"
#include "geoth/syntax.hpp"

using namespace geoth;

TEST_CASE("ring theory is well-formed") {
  Theory r = ring_theory();
  CHECK(check_wellformed(r).empty());
  CHECK(r.sig.sorts.size() == 1);
  CHECK(r.sig.functions.size() == 5);
  CHECK(r.axioms.size() == 8);
}

TEST_CASE("unknown sort produces one diagnostic") {
  Theory t = ring_theory();
  Sequent bad;
  bad.ctx = {{"x", "Q"}};
  bad.lhs = Formula::truth();
  bad.rhs = Formula::eq(Term::mkvar("x"), Term::mkvar("x"));
  t.axioms.push_back(bad);
  auto diags = check_wellformed(t);
  REQUIRE(!diags.empty());
  bool found = false;
  for (const auto& d : diags)
    if (d.message.find("unknown sort") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("equality across different sorts is diagnosed") {
  Theory t;
  t.sig.sorts = {"A", "B"};
  Sequent bad;
  bad.ctx = {{"x", "A"}, {"y", "B"}};
  bad.lhs = Formula::truth();
  bad.rhs = Formula::eq(Term::mkvar("x"), Term::mkvar("y"));
  t.axioms.push_back(bad);
  auto diags = check_wellformed(t);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("sort mismatch") != std::string::npos);
}

TEST_CASE("substitution replaces free variables") {
  // f(x) = y with x -> c
  Formula f = Formula::eq(Term::app("f", {Term::mkvar("x")}), Term::mkvar("y"));
  std::map<Name, Term> bind{{"x", Term::app("c")}};
  Formula out = substitute(f, bind);
  CHECK(out == Formula::eq(Term::app("f", {Term::app("c")}), Term::mkvar("y")));
}

TEST_CASE("substitution avoids capture") {
  // ex y. f(x) = y  with  x -> y
  Formula f = Formula::exists(
      "y", "A", Formula::eq(Term::app("f", {Term::mkvar("x")}), Term::mkvar("y")));
  std::map<Name, Term> bind{{"x", Term::mkvar("y")}};
  Formula out = substitute(f, bind);
  REQUIRE(out.kind == FKind::Exists);
  CHECK(out.name != "y");  // binder renamed
  const Formula& body = out.sub[0];
  CHECK(body.terms[0] == Term::app("f", {Term::mkvar("y")}));
  CHECK(body.terms[1] == Term::mkvar(out.name));
}

TEST_CASE("identity substitution is the identity") {
  Formula f = Formula::exists(
      "y", "A", Formula::eq(Term::app("f", {Term::mkvar("x")}), Term::mkvar("y")));
  std::map<Name, Term> bind{{"x", Term::mkvar("x")}};
  CHECK(substitute(f, bind) == f);
}

TEST_CASE("truth conjuncts are dropped") {
  Formula f = Formula::conj({Formula::eq(Term::mkvar("x"), Term::mkvar("x")), Formula::truth()});
  Formula n = normalize_formula(f);
  CHECK(n.kind == FKind::Eq);
}

TEST_CASE("permuted axiom lists normalize identically") {
  Theory a = ring_theory();
  Theory b = a;
  std::reverse(b.axioms.begin(), b.axioms.end());
  CHECK(normalize(a) == normalize(b));
}

TEST_CASE("renamed variables normalize identically") {
  Theory a = ring_theory();
  Theory b = a;
  for (auto& ax : b.axioms) {
    std::map<Name, Term> ren;
    Context nc;
    for (const auto& [v, s] : ax.ctx) {
      ren[v] = Term::mkvar(v + "_renamed");
      nc.emplace_back(v + "_renamed", s);
    }
    ax.ctx = nc;
    ax.lhs = substitute(ax.lhs, ren);
    ax.rhs = substitute(ax.rhs, ren);
  }
  CHECK(normalize(a) == normalize(b));
}

TEST_CASE("antecedent existentials unhoist into the context") {
  Theory t = ring_theory();
  Sequent a;
  a.ctx = {{"z", "A"}};
  a.lhs = Formula::exists("w", "A", Formula::eq(Term::app("mul", {Term::mkvar("z"), Term::mkvar("w")}),
                                                Term::app("one")));
  a.rhs = Formula::eq(Term::mkvar("z"), Term::mkvar("z"));
  Sequent b;
  b.ctx = {{"z", "A"}, {"w", "A"}};
  b.lhs = Formula::eq(Term::app("mul", {Term::mkvar("z"), Term::mkvar("w")}), Term::app("one"));
  b.rhs = Formula::eq(Term::mkvar("z"), Term::mkvar("z"));
  CHECK(normalize_sequent(a, t.sig) == normalize_sequent(b, t.sig));
}

TEST_CASE("closed axioms absorb antecedent conjuncts and guard consequents") {
  // T + (E/phi) + phi  ==  T + phi + E
  Theory t = ring_theory();
  Formula phi = Formula::eq(Term::app("zero"), Term::app("one"));
  Sequent inner;
  inner.ctx = {{"x", "A"}};
  inner.lhs = Formula::eq(Term::mkvar("x"), Term::app("zero"));
  inner.rhs = Formula::eq(Term::mkvar("x"), Term::app("one"));

  Theory lhs = t;
  // E/phi: guarded axiom
  Sequent guarded = inner;
  guarded.lhs = Formula::conj({inner.lhs, phi});
  lhs.axioms.push_back(guarded);
  lhs.axioms.push_back({{}, Formula::truth(), phi});

  Theory rhs = t;
  rhs.axioms.push_back(inner);
  rhs.axioms.push_back({{}, Formula::truth(), phi});

  CHECK(normalize(lhs) == normalize(rhs));
}

namespace {

// Small random formula generator over the ring signature.
Formula random_formula(std::mt19937& rng, int depth, const std::vector<Name>& vars) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 5);
  auto rand_term = [&](auto self, int d) -> Term {
    std::uniform_int_distribution<int> tp(0, d <= 0 ? 1 : 3);
    switch (tp(rng)) {
      case 0:
        return Term::mkvar(vars[std::uniform_int_distribution<size_t>(0, vars.size() - 1)(rng)]);
      case 1:
        return std::uniform_int_distribution<int>(0, 1)(rng) ? Term::app("zero") : Term::app("one");
      case 2:
        return Term::app("neg", {self(self, d - 1)});
      default:
        return Term::app(std::uniform_int_distribution<int>(0, 1)(rng) ? "add" : "mul",
                         {self(self, d - 1), self(self, d - 1)});
    }
  };
  switch (pick(rng)) {
    case 0:
      return Formula::truth();
    case 1:
      return Formula::falsity();
    case 2:
      return Formula::eq(rand_term(rand_term, 2), rand_term(rand_term, 2));
    case 3:
      return Formula::conj({random_formula(rng, depth - 1, vars), random_formula(rng, depth - 1, vars)});
    case 4:
      return Formula::disj({random_formula(rng, depth - 1, vars), random_formula(rng, depth - 1, vars)});
    default: {
      std::vector<Name> inner = vars;
      Name b = "b" + std::to_string(depth);
      inner.push_back(b);
      return Formula::exists(b, "A", random_formula(rng, depth - 1, inner));
    }
  }
}

}  // namespace

TEST_CASE("normalize_formula is idempotent on random formulas") {
  std::mt19937 rng(42);
  std::vector<Name> vars{"x", "y"};
  for (int i = 0; i < 1000; i++) {
    Formula f = random_formula(rng, 3, vars);
    Formula n = normalize_formula(f);
    CHECK(normalize_formula(n) == n);
  }
}

TEST_CASE("normalize is idempotent on theories") {
  Theory t = ring_theory();
  Theory n = normalize(t);
  CHECK(normalize(n) == n);
}

TEST_CASE("substitute commutes with formula normalization") {
  std::mt19937 rng(7);
  std::vector<Name> vars{"x", "y"};
  int done = 0;
  for (int i = 0; i < 1000; i++) {
    Formula f = random_formula(rng, 3, vars);
    std::map<Name, Term> bind{{"x", Term::app("add", {Term::mkvar("y"), Term::app("one")})}};
    Formula a = normalize_formula(substitute(f, bind));
    Formula b = normalize_formula(substitute(normalize_formula(f), bind));
    CHECK(a == b);
    done++;
  }
  CHECK(done == 1000);
}

TEST_CASE("schema expansion: pow0 instances") {
  Formula f = expand_schema_or("pow0", {Term::mkvar("x")}, 0);
  CHECK(f == Formula::eq(Term::mkvar("x"), Term::app("zero")));
  Formula f2 = expand_schema_or("pow0", {Term::mkvar("x")}, 2);
  CHECK(f2 == Formula::eq(power_term(Term::mkvar("x"), 3), Term::app("zero")));
}

TEST_CASE("loc axiom schema instance 0 is 0=1 |- false") {
  Sequent s = expand_axiom_schema(AxiomSchema{"loc", {"A"}, Bound::sort_size()}, 0);
  CHECK(s.ctx.empty());
  CHECK(s.rhs == Formula::falsity());
  CHECK(s.lhs == Formula::eq(Term::app("zero"), Term::app("one")));
}

TEST_CASE("expand_schemas produces concrete axioms") {
  Theory t = ring_theory();
  t.schemas.push_back(AxiomSchema{"loc", {"A"}, Bound::sort_size()});
  Theory e = expand_schemas(t, 2);
  CHECK(e.schemas.empty());
  CHECK(e.axioms.size() == t.axioms.size() + 3);
}
