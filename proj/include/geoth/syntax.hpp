#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace geoth {

using Name = std::string;

// Error classes aligned with the CLI exit-code contract.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Signatures

struct FunDecl {
  std::vector<Name> domain;
  Name codomain;
  bool operator==(const FunDecl&) const = default;
  bool operator<(const FunDecl& o) const {
    return std::tie(domain, codomain) < std::tie(o.domain, o.codomain);
  }
};

struct Signature {
  std::set<Name> sorts;
  std::map<Name, std::vector<Name>> relations;  // name -> arity
  std::map<Name, FunDecl> functions;

  bool has_sort(const Name& s) const { return sorts.count(s) > 0; }
  bool has_symbol(const Name& n) const { return relations.count(n) || functions.count(n); }

  // Disjoint union; throws PreconditionError on name clashes.
  static Signature merged(const Signature& a, const Signature& b);

  bool operator==(const Signature&) const = default;
};

// ---------------------------------------------------------------------------
// Terms

struct Term {
  bool var = true;
  Name head;               // variable name, or function symbol
  std::vector<Term> args;  // empty for variables

  static Term mkvar(Name v) { return Term{true, std::move(v), {}}; }
  static Term app(Name f, std::vector<Term> a = {}) { return Term{false, std::move(f), std::move(a)}; }

  int cmp(const Term& o) const;
  bool operator==(const Term& o) const { return cmp(o) == 0; }
  bool operator!=(const Term& o) const { return cmp(o) != 0; }
  bool operator<(const Term& o) const { return cmp(o) < 0; }
};

using Context = std::vector<std::pair<Name, Name>>;  // (variable, sort), names distinct

// Infers the sort of a term; throws PreconditionError on unknown symbols/vars.
Name term_sort(const Term& t, const Context& ctx, const Signature& sig);

void collect_term_vars(const Term& t, std::set<Name>& out);

// ---------------------------------------------------------------------------
// Formulas (geometric fragment)

enum class FKind : uint8_t { Truth, Falsity, RelAtom, Eq, And, Or, SchemaOr, Exists };

// Bound descriptor for schematic disjunctions / axiom families: either a
// fixed number of instances or "max sort size of the model".
struct Bound {
  enum class Kind : uint8_t { SortSize, Const } kind = Kind::SortSize;
  uint64_t value = 0;
  uint64_t eval(uint64_t max_sort_size) const {
    return kind == Kind::SortSize ? max_sort_size : value;
  }
  static Bound sort_size() { return Bound{Kind::SortSize, 0}; }
  static Bound constant(uint64_t n) { return Bound{Kind::Const, n}; }
  bool operator==(const Bound&) const = default;
  bool operator<(const Bound& o) const {
    return std::tie(kind, value) < std::tie(o.kind, o.value);
  }
};

struct Formula {
  FKind kind = FKind::Truth;
  Name name;                 // RelAtom: relation; Exists: bound variable; SchemaOr: family name
  Name sort;                 // Exists: sort of the bound variable
  std::vector<Term> terms;   // RelAtom args; Eq: exactly two; SchemaOr: family term arguments
  std::vector<Formula> sub;  // And/Or children; Exists: exactly one body
  Bound bound;               // SchemaOr only

  static Formula truth() { return Formula{FKind::Truth, {}, {}, {}, {}, {}}; }
  static Formula falsity() { return Formula{FKind::Falsity, {}, {}, {}, {}, {}}; }
  static Formula rel(Name r, std::vector<Term> ts) {
    return Formula{FKind::RelAtom, std::move(r), {}, std::move(ts), {}, {}};
  }
  static Formula eq(Term a, Term b) {
    return Formula{FKind::Eq, {}, {}, {std::move(a), std::move(b)}, {}, {}};
  }
  // The empty and singleton cases collapse: true / false / the formula.
  static Formula conj(std::vector<Formula> fs) {
    if (fs.empty()) return truth();
    if (fs.size() == 1) return fs[0];
    return Formula{FKind::And, {}, {}, {}, std::move(fs), {}};
  }
  static Formula disj(std::vector<Formula> fs) {
    if (fs.empty()) return falsity();
    if (fs.size() == 1) return fs[0];
    return Formula{FKind::Or, {}, {}, {}, std::move(fs), {}};
  }
  static Formula exists(Name v, Name s, Formula body) {
    return Formula{FKind::Exists, std::move(v), std::move(s), {}, {std::move(body)}, {}};
  }
  static Formula schema_or(Name family, std::vector<Term> ts, Bound b) {
    return Formula{FKind::SchemaOr, std::move(family), {}, std::move(ts), {}, b};
  }

  int cmp(const Formula& o) const;
  bool operator==(const Formula& o) const { return cmp(o) == 0; }
  bool operator!=(const Formula& o) const { return cmp(o) != 0; }
  bool operator<(const Formula& o) const { return cmp(o) < 0; }
};

void collect_free_vars(const Formula& f, std::set<Name>& bound, std::set<Name>& out);
std::set<Name> free_vars(const Formula& f);
bool is_closed(const Formula& f);

// ---------------------------------------------------------------------------
// Sequents and theories

struct Sequent {
  Context ctx;
  Formula lhs = Formula::truth();
  Formula rhs = Formula::truth();
  int cmp(const Sequent& o) const;
  bool operator==(const Sequent& o) const { return cmp(o) == 0; }
  bool operator!=(const Sequent& o) const { return cmp(o) != 0; }
  bool operator<(const Sequent& o) const { return cmp(o) < 0; }
};

// A named axiom family (countably many sequents) with a stabilization bound.
// Families are drawn from a fixed registry (see schema.cpp); the arguments
// pin the family to concrete sorts of the host theory.
struct AxiomSchema {
  Name family;
  std::vector<Name> args;
  Bound bound;
  bool operator==(const AxiomSchema&) const = default;
  bool operator<(const AxiomSchema& o) const {
    return std::tie(family, args, bound) < std::tie(o.family, o.args, o.bound);
  }
};

struct Theory {
  Signature sig;
  std::vector<Sequent> axioms;
  std::vector<AxiomSchema> schemas;
  bool operator==(const Theory&) const = default;
};

// ---------------------------------------------------------------------------
// Schema registry: every schematic family used anywhere in the toolchain is
// a named entry so that values stay printable, comparable and re-parsable.

// n-th disjunct of a formula-level family (n = 0, 1, ...).
Formula expand_schema_or(const Name& family, const std::vector<Term>& terms, uint64_t n);
// n-th sequent of a theory-level family.
Sequent expand_axiom_schema(const AxiomSchema& s, uint64_t n);
bool schema_or_known(const Name& family);
bool axiom_schema_known(const Name& family);

// ---------------------------------------------------------------------------
// Operations

struct Diagnostic {
  std::string path;
  std::string message;
};

std::vector<Diagnostic> check_wellformed(const Theory& t);
// Formula-level check used by extension machinery.
std::vector<Diagnostic> check_formula(const Formula& f, const Context& ctx, const Signature& sig,
                                      const std::string& path);

// Capture-avoiding substitution of context variables by terms.
Formula substitute(const Formula& f, const std::map<Name, Term>& binding);
Term substitute(const Term& t, const std::map<Name, Term>& binding);

// Boolean-unit flattening, child sorting, deduplication. Does not rename.
Formula normalize_formula(const Formula& f);

// Full sequent canonicalization: formula normalization, antecedent
// existential unhoisting, redundant-hypothesis elimination, canonical
// variable renaming, canonical context ordering.
Sequent normalize_sequent(const Sequent& s, const Signature& sig);

// Canonical form of an entire theory (sorted tables, normalized axioms,
// closed-axiom absorption, guard absorption, deduplication). Idempotent.
Theory normalize(const Theory& t);

// Structural equality of canonical forms.
bool equivalent_normal_forms(const Theory& a, const Theory& b);

// Stable serialization key used for canonical ordering (defined in dsl.cpp).
std::string sequent_key(const Sequent& s);

// Forces finite expansion of schema families: axiom schemas become their
// instances 0..level, schematic disjunctions become finite disjunctions.
Theory expand_schemas(const Theory& t, uint64_t level);
Formula expand_schema_ors(const Formula& f, uint64_t level);

// Fresh-name helper: smallest "base", "base1", "base2", ... not in used.
Name fresh_name(const Name& base, const std::set<Name>& used);

// Canonical numeral term n * 1 in a ring-like signature: 0 -> zero, 1 -> one,
// n -> add(one, numeral(n-1)).
Term numeral_term(uint64_t n);
std::optional<uint64_t> read_numeral(const Term& t);
// mul(t, mul(t, ... )) with n factors; n >= 1.
Term power_term(const Term& t, uint64_t n);

}  // namespace geoth
