#pragma once

#include "geoth/syntax.hpp"

namespace geoth {

// An extension as a first-class delta over a base theory. Values are
// immutable after construction; the base is held by value (theories are
// values, matched by canonical form).
struct TheoryExtension {
  Theory base;
  std::set<Name> delta_sorts;
  std::map<Name, std::vector<Name>> delta_relations;
  std::map<Name, FunDecl> delta_functions;
  std::vector<Sequent> delta_axioms;
  std::vector<AxiomSchema> delta_schemas;
  // Proof obligations that are not checked syntactically (provable
  // functionality, equivalence-relation laws); discharged by finite-model
  // checks in presheaf-semantics.
  std::vector<Sequent> obligations;

  bool localic() const { return delta_sorts.empty(); }
  bool quotient() const {
    return delta_sorts.empty() && delta_relations.empty() && delta_functions.empty();
  }
  Signature delta_signature() const {
    Signature s;
    s.sorts = delta_sorts;
    s.relations = delta_relations;
    s.functions = delta_functions;
    return s;
  }
  bool operator==(const TheoryExtension&) const = default;
};

// T + E. Checks base identity (canonical form) and name clashes; result is
// normalized.
Theory apply_extension(const Theory& base, const TheoryExtension& ext);
// As above but without normalization; used where axiom multisets matter.
Theory apply_extension_raw(const Theory& base, const TheoryExtension& ext);

// E1 + E2 over the same base; disjoint delta names.
TheoryExtension sum(const TheoryExtension& e1, const TheoryExtension& e2);

TheoryExtension empty_extension(const Theory& base);

// Replaces every delta function symbol f : A* -> B by a graph relation with
// totality and uniqueness axioms. Delta constants are hoisted into
// antecedent hypotheses; non-nullary applications become existentially
// bound graph atoms, innermost first, left to right.
TheoryExtension desugar_functions(const TheoryExtension& ext);

// Desugars occurrences of delta constants/functions inside a standalone
// formula (used for overlap formulas phi_{i,j} that mention chart symbols).
Formula desugar_formula_against(const Formula& f, const TheoryExtension& ext);

// The conditional extension E/phi of T, for E an extension of T + phi (or of
// T) without delta function symbols and phi a closed formula of T.
TheoryExtension conditional(const TheoryExtension& ext, const Formula& phi);

// Poset-indexed system of extensions; assignment[i] has base
// T + sum of assignment[j], j < i (by canonical form).
struct ExtensionSystem {
  Theory base;
  std::vector<Name> index;                       // poset elements
  std::vector<std::vector<bool>> leq;            // leq[i][j] : i <= j
  std::map<Name, TheoryExtension> assignment;
};

// Delta(I): nonempty subsets of I ordered by inclusion.
struct SimplexPoset {
  std::vector<Name> base_index;
  std::vector<std::vector<size_t>> subsets;  // sorted index lists, canonical order
  static SimplexPoset of(const std::vector<Name>& idx);
  bool leq(size_t a, size_t b) const;  // subset inclusion
};

// Applies E_i -> E_i/phi_i with the monotonicity precondition: for j <= i,
// phi_j must be a conjunct of phi_i after flattening, unless
// assume_entailment is set.
ExtensionSystem conditional_system(const ExtensionSystem& system,
                                   const std::map<Name, Formula>& phis,
                                   bool assume_entailment = false);

// Fold of a system into a single theory T + sum E_i (in topological order).
Theory fold_system(const ExtensionSystem& system);

// Extension by definitions: R(x) -||- phi and f(y)=z -||- psi axiom pairs.
// Functionality of psi becomes an obligation record.
struct RelDef {
  Context ctx;
  Formula phi;
};
struct FunDef {
  Context ctx;  // arguments followed by the codomain variable
  Formula psi;
};
TheoryExtension extension_by_definitions(const Theory& base, const std::map<Name, RelDef>& rel_defs,
                                         const std::map<Name, FunDef>& fun_defs);

// Materialization of a subobject or quotient as a new sort.
TheoryExtension materialize_subobject(const Theory& base, const Name& sort, const Name& var,
                                      const Formula& phi, const Name& new_sort, const Name& embedding);
TheoryExtension materialize_quotient(const Theory& base, const Name& sort, const Name& var1,
                                     const Name& var2, const Formula& equiv, const Name& new_sort,
                                     const Name& projection);

}  // namespace geoth
