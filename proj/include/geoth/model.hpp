#pragma once

#include "geoth/extension.hpp"
#include "geoth/parallel.hpp"
#include "geoth/syntax.hpp"

namespace geoth {

// ---------------------------------------------------------------------------
// Finite posets

struct FinitePoset {
  std::vector<Name> points;
  std::vector<std::vector<bool>> le;  // le[p][q] iff p <= q

  size_t n() const { return points.size(); }
  void validate() const;  // order laws, throws PreconditionError
  static FinitePoset single();
  static FinitePoset chain(size_t k);  // 0 <= 1 <= ... <= k-1
  std::vector<std::pair<size_t, size_t>> pairs_le() const;      // all p <= q, p != q
  std::vector<std::pair<size_t, size_t>> hasse_edges() const;   // covering pairs
  bool operator==(const FinitePoset&) const = default;
};

// Up-closed subset of the poset.
struct UpSet {
  std::vector<bool> member;
  bool operator==(const UpSet&) const = default;
};

// ---------------------------------------------------------------------------
// Presheaf models: finite-set-valued functors on a finite poset.

struct SortTable {
  std::vector<size_t> size;                                   // per point
  std::vector<std::vector<Name>> elem_names;                  // per point (may be empty)
  std::map<std::pair<size_t, size_t>, std::vector<size_t>> map;  // (p,q) with p<q only

  Name name_of(size_t p, size_t e) const {
    if (p < elem_names.size() && e < elem_names[p].size()) return elem_names[p][e];
    return "e" + std::to_string(e);
  }
  bool operator==(const SortTable&) const = default;
};

struct PresheafModel {
  Signature sig;
  FinitePoset poset;
  std::map<Name, SortTable> sorts;
  // relation -> point -> set of tuples
  std::map<Name, std::map<size_t, std::set<std::vector<size_t>>>> rels;
  // function -> point -> flat table indexed by tuple rank over the domain
  std::map<Name, std::map<size_t, std::vector<size_t>>> funs;

  void validate() const;  // functoriality, stability, naturality
  size_t sort_size(const Name& s, size_t p) const { return sorts.at(s).size.at(p); }
  size_t max_sort_size() const;
  // transition of a single element / a tuple along p <= q
  size_t transport(const Name& sort, size_t p, size_t q, size_t e) const;
  std::vector<size_t> transport_tuple(const std::vector<Name>& sorts_of, size_t p, size_t q,
                                      const std::vector<size_t>& tuple) const;
  size_t apply_fun(const Name& f, size_t p, const std::vector<size_t>& args) const;

  bool operator==(const PresheafModel&) const = default;
};

// Subfunctor of a context product: per-point set of tuples, transition-closed.
struct Subfunctor {
  Context ctx;
  std::vector<std::set<std::vector<size_t>>> at;  // per point
};

// ---------------------------------------------------------------------------
// Semantics

Subfunctor interpret(const PresheafModel& M, const Context& ctx, const Formula& phi);

struct Counterexample {
  size_t point;
  std::vector<size_t> tuple;
  std::string render(const PresheafModel& M, const Context& ctx) const;
};

// holds iff at every point the antecedent tuples are antecedent of the
// consequent; the counterexample is minimal in point-then-lex order.
std::optional<Counterexample> check_sequent(const PresheafModel& M, const Sequent& seq);

struct TheoryCheckResult {
  bool holds = true;
  std::string axiom;  // rendering of the failing axiom
  std::optional<Counterexample> cex;
  Sequent failing;
};
TheoryCheckResult check_theory(const PresheafModel& M, const Theory& T,
                               par::Mode mode = par::default_mode());

// Axiom-schema checking. The generic route expands instances 0..bound; the
// locality family additionally has a specialized evaluation (subset
// enumeration plus ideal closure) which is exponentially faster and agrees
// with the generic route (property-tested).
std::optional<Counterexample> check_axiom_schema_generic(const PresheafModel& M,
                                                         const AxiomSchema& s);
std::optional<Counterexample> check_axiom_schema(const PresheafModel& M, const AxiomSchema& s);

// Up-set of a closed formula; the subterminal interpretation.
UpSet up_set_of(const PresheafModel& M, const Formula& phi_closed);

// Pointwise restriction to an up-set (geometric stability: restriction
// preserves satisfaction of sequents).
PresheafModel restrict_model(const PresheafModel& M, const UpSet& U);

// ---------------------------------------------------------------------------
// Model extensions

// Enumerates model extensions of M along E, sort sizes bounded by
// size_bound, exhaustively and duplicate-free up to isomorphism over the
// delta (base interpretation fixed). Deterministic order.
std::vector<PresheafModel> enumerate_extensions(const PresheafModel& M, const TheoryExtension& E,
                                                size_t size_bound,
                                                par::Mode mode = par::default_mode());

// i_! construction: extends an E-interpretation over M|_U to an
// (E/phi)-interpretation over M by empty sorts / empty relations off U.
PresheafModel extend_by_empty(const PresheafModel& M, const UpSet& U,
                              const PresheafModel& ext_over_U, const TheoryExtension& E);

// Round-trip check of the conditional-model correspondence on given data:
// restricting extend_by_empty(ext) recovers ext, and extending a restricted
// (E/phi)-model recovers it.
bool conditional_roundtrip(const PresheafModel& M, const Formula& phi, const TheoryExtension& E,
                           const PresheafModel& ext_over_U);

// ---------------------------------------------------------------------------
// Model DSL

std::string print_model(const PresheafModel& M);
PresheafModel parse_model(const std::string& text, const Signature& sig);

// ---------------------------------------------------------------------------
// Ring model helpers (used by tests and the CLI examples)

// One-point model of Ring with A = Z/m.
PresheafModel zmod_ring_model(uint64_t m);
// Two-point Sierpinski model of Ring: A(0) = Z/m0 -> A(1) = Z/m1, m1 | m0.
PresheafModel sierpinski_ring_model(uint64_t m0, uint64_t m1);

}  // namespace geoth
