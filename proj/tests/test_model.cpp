#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "geoth/dsl.hpp"
#include "geoth/library.hpp"
#include "geoth/model.hpp"

using namespace geoth;

TEST_CASE("0 = 1 is empty in Z/4") {
  PresheafModel M = zmod_ring_model(4);
  Subfunctor s = interpret(M, {}, Formula::eq(Term::app("zero"), Term::app("one")));
  CHECK(s.at[0].empty());
}

TEST_CASE("units of Z/6 are 1 and 5") {
  PresheafModel M = zmod_ring_model(6);
  Context ctx{{"x", "A"}};
  Formula inv = inv_formula(Term::mkvar("x"), RingOps::on("A"), {"x"});
  Subfunctor s = interpret(M, ctx, inv);
  CHECK(s.at[0] == std::set<std::vector<size_t>>{{1}, {5}});
}

TEST_CASE("a proposition over the Sierpinski poset is an up-set") {
  PresheafModel M = sierpinski_ring_model(4, 2);
  M.sig.relations["p"] = {};
  M.rels["p"][0] = {};
  M.rels["p"][1] = {{}};
  M.validate();
  UpSet u = up_set_of(M, Formula::rel("p", {}));
  CHECK(u.member == std::vector<bool>{false, true});
}

TEST_CASE("Z/4 satisfies the finite locality axioms") {
  PresheafModel M = zmod_ring_model(4);
  Theory t = apply_extension(ring_theory(), builtin_loc(LocVariant::Finite));
  CHECK(check_theory(M, t).holds);
}

TEST_CASE("Z/6 fails locality with minimal counterexample x = 3") {
  PresheafModel M = zmod_ring_model(6);
  Theory t = apply_extension_raw(ring_theory(), builtin_loc(LocVariant::Finite));
  auto r = check_theory(M, t);
  REQUIRE(!r.holds);
  REQUIRE(r.cex);
  CHECK(r.cex->tuple == std::vector<size_t>{3});
}

TEST_CASE("true |- true holds in any model") {
  PresheafModel M = zmod_ring_model(2);
  CHECK(!check_sequent(M, Sequent{}));
}

TEST_CASE("schematic and finite locality agree on Z/m for 2 <= m <= 12") {
  Theory fin = apply_extension(ring_theory(), builtin_loc(LocVariant::Finite));
  Theory sch = apply_extension(ring_theory(), builtin_loc(LocVariant::Schematic));
  for (uint64_t m = 2; m <= 12; m++) {
    PresheafModel M = zmod_ring_model(m);
    CHECK(check_theory(M, fin).holds == check_theory(M, sch).holds);
  }
}

TEST_CASE("the specialized loc check agrees with generic instance expansion") {
  AxiomSchema loc{"loc", {"A"}, Bound::sort_size()};
  for (uint64_t m = 1; m <= 4; m++) {
    PresheafModel M = zmod_ring_model(m);
    bool fast = !check_axiom_schema(M, loc).has_value();
    bool slow = !check_axiom_schema_generic(M, loc).has_value();
    CHECK(fast == slow);
  }
  PresheafModel S = sierpinski_ring_model(4, 2);
  CHECK(check_axiom_schema(S, loc).has_value() == check_axiom_schema_generic(S, loc).has_value());
}

TEST_CASE("schematic and finite locality agree on two-point ring models") {
  Theory fin = apply_extension(ring_theory(), builtin_loc(LocVariant::Finite));
  Theory sch = apply_extension(ring_theory(), builtin_loc(LocVariant::Schematic));
  std::mt19937 rng(5);
  int trials = 0;
  for (uint64_t m0 = 2; m0 <= 12; m0++) {
    for (uint64_t m1 = 2; m1 <= m0; m1++) {
      if (m0 % m1) continue;
      PresheafModel M = sierpinski_ring_model(m0, m1);
      CHECK(check_theory(M, fin).holds == check_theory(M, sch).holds);
      trials++;
    }
  }
  CHECK(trials >= 20);
}

TEST_CASE("restriction to the full poset is the identity") {
  PresheafModel M = sierpinski_ring_model(4, 2);
  UpSet all{std::vector<bool>{true, true}};
  CHECK(restrict_model(M, all) == M);
}

TEST_CASE("restriction to the empty up-set satisfies every theory") {
  PresheafModel M = sierpinski_ring_model(4, 2);
  UpSet none{std::vector<bool>{false, false}};
  PresheafModel R = restrict_model(M, none);
  CHECK(R.poset.n() == 0);
  Theory t = apply_extension(ring_theory(), builtin_loc(LocVariant::Finite));
  t.axioms.push_back({{}, Formula::truth(), Formula::falsity()});
  CHECK(check_theory(R, t).holds);
}

TEST_CASE("restriction to the top point is the stalk") {
  PresheafModel M = sierpinski_ring_model(4, 2);
  UpSet top{std::vector<bool>{false, true}};
  PresheafModel R = restrict_model(M, top);
  PresheafModel stalk = zmod_ring_model(2);
  CHECK(R.sorts.at("A").size == stalk.sorts.at("A").size);
  CHECK(R.funs.at("mul") == stalk.funs.at("mul"));
}

TEST_CASE("interpretation yields transition-closed subfunctors") {
  PresheafModel M = sierpinski_ring_model(4, 2);
  Context ctx{{"x", "A"}};
  std::vector<Formula> formulas{
      inv_formula(Term::mkvar("x"), RingOps::on("A"), {"x"}),
      Formula::eq(Term::app("mul", {Term::mkvar("x"), Term::mkvar("x")}), Term::app("zero")),
      Formula::schema_or("pow0", {Term::mkvar("x")}, Bound::sort_size())};
  for (const auto& f : formulas) {
    Subfunctor s = interpret(M, ctx, f);
    for (const auto& t : s.at[0]) {
      auto img = M.transport_tuple({"A"}, 0, 1, t);
      CHECK(s.at[1].count(img));
    }
  }
}

TEST_CASE("extensions of the point model along <p> are exactly two") {
  Theory empty_t;
  PresheafModel M;
  M.sig = empty_t.sig;
  M.poset = FinitePoset::single();
  TheoryExtension e;
  e.base = empty_t;
  e.delta_relations["p"] = {};
  auto exts = enumerate_extensions(M, e, 2);
  CHECK(exts.size() == 2);
}

TEST_CASE("the defined inverse relation has exactly one extension over Z/4") {
  Theory r = ring_theory();
  RelDef def;
  def.ctx = {{"x", "A"}};
  def.phi = inv_formula(Term::mkvar("x"), RingOps::on("A"), {"x"});
  TheoryExtension e = extension_by_definitions(r, {{"invr", def}}, {});
  PresheafModel M = zmod_ring_model(4);
  auto exts = enumerate_extensions(M, e, 4);
  REQUIRE(exts.size() == 1);
  CHECK(exts[0].rels.at("invr").at(0) == std::set<std::vector<size_t>>{{1}, {3}});
}

TEST_CASE("import_set has exactly one model up to isomorphism for |A| <= 3") {
  for (size_t n = 0; n <= 3; n++) {
    std::vector<Name> elems;
    for (size_t i = 0; i < n; i++) elems.push_back("a" + std::to_string(i));
    Theory imp = import_set("S", elems);
    Theory empty_t;
    PresheafModel M;
    M.sig = empty_t.sig;
    M.poset = FinitePoset::single();
    TheoryExtension e;
    e.base = empty_t;
    e.delta_sorts.insert("S");
    for (const auto& [f, d] : imp.sig.functions) e.delta_functions[f] = d;
    e.delta_axioms = imp.axioms;
    auto exts = enumerate_extensions(M, e, n + 1);
    CHECK(exts.size() == 1);
    CHECK(exts[0].sort_size("S", 0) == n);
  }
}

TEST_CASE("desugaring preserves the finite model category (counts agree)") {
  // T = Ring plus one constant, models over Z/2 and over the Sierpinski ring
  Theory r = ring_theory();
  TheoryExtension e;
  e.base = r;
  e.delta_functions["c"] = FunDecl{{}, "A"};
  TheoryExtension d = desugar_functions(e);
  for (const PresheafModel& M : {zmod_ring_model(2), sierpinski_ring_model(4, 2)}) {
    auto before = enumerate_extensions(M, e, 3);
    auto after = enumerate_extensions(M, d, 3);
    CHECK(before.size() == after.size());
  }
  // also with a unary function symbol
  TheoryExtension ef;
  ef.base = r;
  ef.delta_functions["endo"] = FunDecl{{"A"}, "A"};
  TheoryExtension df = desugar_functions(ef);
  PresheafModel M2 = zmod_ring_model(2);
  CHECK(enumerate_extensions(M2, ef, 3).size() == enumerate_extensions(M2, df, 3).size());
}

TEST_CASE("model documents round-trip through the DSL") {
  for (const PresheafModel& M : {zmod_ring_model(3), sierpinski_ring_model(4, 2)}) {
    std::string doc = print_model(M);
    PresheafModel back = parse_model(doc, M.sig);
    CHECK(back.poset == M.poset);
    CHECK(back.funs == M.funs);
    CHECK(back.sorts.at("A").size == M.sorts.at("A").size);
    CHECK(print_model(back) == doc);
  }
}

TEST_CASE("the defined inverse relation is unique over more models") {
  Theory r = ring_theory();
  RelDef def;
  def.ctx = {{"x", "A"}};
  def.phi = inv_formula(Term::mkvar("x"), RingOps::on("A"), {"x"});
  TheoryExtension e = extension_by_definitions(r, {{"invr", def}}, {});
  for (const PresheafModel& M : {zmod_ring_model(6), sierpinski_ring_model(4, 2)}) {
    CHECK(enumerate_extensions(M, e, 6).size() == 1);
  }
}

TEST_CASE("materialized quotient by equality forces a bijection") {
  Theory r = ring_theory();
  Formula eqrel = Formula::eq(Term::mkvar("x"), Term::mkvar("y"));
  TheoryExtension e = materialize_quotient(r, "A", "x", "y", eqrel, "Qs", "proj");
  PresheafModel M = zmod_ring_model(2);
  auto exts = enumerate_extensions(M, e, 3);
  REQUIRE(exts.size() == 1);
  CHECK(exts[0].sort_size("Qs", 0) == 2);  // |A/~| = number of classes
  // obligations hold
  Theory ob;
  ob.sig = exts[0].sig;
  ob.axioms = e.obligations;
  CHECK(check_theory(exts[0], ob).holds);
}

TEST_CASE("materialized subobject by truth is an isomorphic copy") {
  Theory r = ring_theory();
  TheoryExtension e = materialize_subobject(r, "A", "x", Formula::truth(), "U", "emb");
  PresheafModel M = zmod_ring_model(2);
  auto exts = enumerate_extensions(M, e, 3);
  REQUIRE(exts.size() == 1);
  CHECK(exts[0].sort_size("U", 0) == 2);
}

namespace {

// The conditional-extension scenario: base theory <p> with an imported
// two-element sort; E adds a partial constant relation over T + p.
struct CondScenario {
  Theory base;
  TheoryExtension ext;  // function-free, over base + p
  Formula phi = Formula::rel("p", {});
};

CondScenario make_scenario() {
  CondScenario s;
  s.base.sig.sorts = {"A"};
  s.base.sig.relations["p"] = {};
  TheoryExtension e;
  e.base = s.base;
  e.delta_relations["ctil"] = {"A"};
  Sequent tot;
  tot.lhs = Formula::truth();
  tot.rhs = Formula::exists("x", "A", Formula::rel("ctil", {Term::mkvar("x")}));
  e.delta_axioms.push_back(tot);
  Sequent uniq;
  uniq.ctx = {{"x", "A"}, {"y", "A"}};
  uniq.lhs = Formula::conj({Formula::rel("ctil", {Term::mkvar("x")}),
                            Formula::rel("ctil", {Term::mkvar("y")})});
  uniq.rhs = Formula::eq(Term::mkvar("x"), Term::mkvar("y"));
  e.delta_axioms.push_back(uniq);
  s.ext = e;
  return s;
}

PresheafModel sierpinski_base_model(bool p_at_bottom) {
  CondScenario s = make_scenario();
  PresheafModel M;
  M.sig = s.base.sig;
  M.poset = FinitePoset::chain(2);
  SortTable t;
  t.size = {2, 2};
  t.elem_names = {{}, {}};
  t.map[{0, 1}] = {0, 1};
  M.sorts["A"] = t;
  M.rels["p"][0] = p_at_bottom ? std::set<std::vector<size_t>>{{}} : std::set<std::vector<size_t>>{};
  M.rels["p"][1] = {{}};
  M.validate();
  return M;
}

}  // namespace

TEST_CASE("conditional model roundtrip on the Sierpinski partial constant") {
  CondScenario s = make_scenario();
  PresheafModel M = sierpinski_base_model(false);  // U = {1}
  UpSet U = up_set_of(M, s.phi);
  CHECK(U.member == std::vector<bool>{false, true});
  PresheafModel MU = restrict_model(M, U);
  auto exts_over_U = enumerate_extensions(MU, s.ext, 2);
  // base elements are fixed under extension isomorphism, so picking element 0
  // or 1 as the constant gives two distinct extensions
  CHECK(exts_over_U.size() == 2);
  for (const auto& ext : exts_over_U) {
    CHECK(conditional_roundtrip(M, s.phi, s.ext, ext));
  }
}

TEST_CASE("U = whole poset: both directions are inverse") {
  CondScenario s = make_scenario();
  PresheafModel M = sierpinski_base_model(true);
  UpSet U = up_set_of(M, s.phi);
  CHECK(U.member == std::vector<bool>{true, true});
  PresheafModel MU = restrict_model(M, U);
  for (const auto& ext : enumerate_extensions(MU, s.ext, 2))
    CHECK(conditional_roundtrip(M, s.phi, s.ext, ext));
}

TEST_CASE("U empty: the unique conditional extension is empty everywhere") {
  CondScenario s = make_scenario();
  PresheafModel M = sierpinski_base_model(false);
  M.rels["p"][1] = {};
  M.validate();
  TheoryExtension cond = conditional(s.ext, s.phi);
  auto exts = enumerate_extensions(M, cond, 2);
  REQUIRE(exts.size() == 1);
  CHECK(exts[0].rels.at("ctil").at(0).empty());
  CHECK(exts[0].rels.at("ctil").at(1).empty());
}

TEST_CASE("extension-count equality across the conditional correspondence") {
  CondScenario s = make_scenario();
  for (bool pb : {false, true}) {
    PresheafModel M = sierpinski_base_model(pb);
    UpSet U = up_set_of(M, s.phi);
    PresheafModel MU = restrict_model(M, U);
    TheoryExtension cond = conditional(s.ext, s.phi);
    auto a = enumerate_extensions(M, cond, 3);
    auto b = enumerate_extensions(MU, s.ext, 3);
    CHECK(a.size() == b.size());
  }
}

namespace {

// Random chain models over {R sub A, f : A -> A} with stability and
// naturality by construction.
PresheafModel random_chain_model(std::mt19937& rng) {
  std::uniform_int_distribution<size_t> len(1, 4), sz(1, 3);
  PresheafModel M;
  M.sig.sorts = {"A"};
  M.sig.relations["R"] = {"A"};
  M.sig.functions["f"] = FunDecl{{"A"}, "A"};
  size_t n = len(rng);
  M.poset = FinitePoset::chain(n);
  SortTable t;
  t.elem_names.resize(n);
  for (size_t p = 0; p < n; p++) t.size.push_back(sz(rng));
  for (size_t p = 0; p + 1 < n; p++) {
    std::vector<size_t> m(t.size[p]);
    for (auto& v : m) v = std::uniform_int_distribution<size_t>(0, t.size[p + 1] - 1)(rng);
    t.map[{p, p + 1}] = m;
  }
  // composite maps
  for (size_t p = 0; p < n; p++)
    for (size_t q = p + 2; q < n; q++) {
      std::vector<size_t> m(t.size[p]);
      for (size_t e = 0; e < t.size[p]; e++) {
        size_t v = e;
        for (size_t k = p; k < q; k++) v = t.map[{k, k + 1}][v];
        m[e] = v;
      }
      t.map[{p, q}] = m;
    }
  M.sorts["A"] = t;
  // stable relation: random then closed forward
  for (size_t p = 0; p < n; p++) M.rels["R"][p] = {};
  for (size_t p = 0; p < n; p++) {
    for (size_t e = 0; e < t.size[p]; e++) {
      if (std::uniform_int_distribution<int>(0, 1)(rng)) {
        size_t v = e;
        M.rels["R"][p].insert({v});
        for (size_t q = p; q + 1 < n; q++) {
          v = t.map[{q, q + 1}][v];
          M.rels["R"][q + 1].insert({v});
        }
      }
    }
  }
  // natural unary function: free at the bottom, forced on images upward;
  // colliding forced values mean this random draw is inconsistent, retry
  while (true) {
    bool ok = true;
    for (size_t p = 0; p < n; p++) M.funs["f"][p] = std::vector<size_t>(t.size[p], 0);
    for (size_t p = 0; p < n && ok; p++) {
      std::vector<int> forced(t.size[p], -1);
      if (p > 0) {
        for (size_t e = 0; e < t.size[p - 1]; e++) {
          size_t img = t.map[{p - 1, p}][e];
          size_t val = t.map[{p - 1, p}][M.funs["f"][p - 1][e]];
          if (forced[img] >= 0 && static_cast<size_t>(forced[img]) != val) {
            ok = false;
            break;
          }
          forced[img] = static_cast<int>(val);
        }
      }
      if (!ok) break;
      for (size_t e = 0; e < t.size[p]; e++) {
        M.funs["f"][p][e] = forced[e] >= 0
                                ? static_cast<size_t>(forced[e])
                                : std::uniform_int_distribution<size_t>(0, t.size[p] - 1)(rng);
      }
    }
    if (ok) break;
  }
  M.validate();
  return M;
}

Formula random_geom_formula(std::mt19937& rng, int depth, std::vector<Name> vars) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 3 : 5);
  auto rt = [&]() {
    if (vars.empty() || std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
      // f applied to a variable
      if (vars.empty()) throw std::logic_error("no vars");
      return Term::app("f", {Term::mkvar(vars[std::uniform_int_distribution<size_t>(0, vars.size() - 1)(rng)])});
    }
    return Term::mkvar(vars[std::uniform_int_distribution<size_t>(0, vars.size() - 1)(rng)]);
  };
  switch (pick(rng)) {
    case 0:
      return Formula::truth();
    case 1:
      return Formula::rel("R", {rt()});
    case 2:
    case 3:
      return Formula::eq(rt(), rt());
    case 4:
      return std::uniform_int_distribution<int>(0, 1)(rng)
                 ? Formula::conj({random_geom_formula(rng, depth - 1, vars),
                                  random_geom_formula(rng, depth - 1, vars)})
                 : Formula::disj({random_geom_formula(rng, depth - 1, vars),
                                  random_geom_formula(rng, depth - 1, vars)});
    default: {
      Name b = "b" + std::to_string(depth) + std::to_string(vars.size());
      auto inner = vars;
      inner.push_back(b);
      return Formula::exists(b, "A", random_geom_formula(rng, depth - 1, inner));
    }
  }
}

}  // namespace

TEST_CASE("geometric stability: restriction preserves satisfaction (5000 trials)") {
  std::mt19937 rng(123);
  int trials = 0;
  while (trials < 5000) {
    PresheafModel M = random_chain_model(rng);
    Sequent s;
    s.ctx = {{"x", "A"}};
    s.lhs = random_geom_formula(rng, 2, {"x"});
    s.rhs = random_geom_formula(rng, 2, {"x"});
    if (check_sequent(M, s)) continue;  // only sequents that hold
    // random up-set of a chain: a suffix
    size_t cut = std::uniform_int_distribution<size_t>(0, M.poset.n())(rng);
    UpSet u;
    u.member.resize(M.poset.n());
    for (size_t p = 0; p < M.poset.n(); p++) u.member[p] = p >= cut;
    PresheafModel R = restrict_model(M, u);
    CHECK(!check_sequent(R, s));
    trials++;
  }
  CHECK(trials == 5000);
}
