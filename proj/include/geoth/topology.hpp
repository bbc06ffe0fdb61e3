#pragma once

#include "geoth/model.hpp"

namespace geoth {

// Set-based models are one-point presheaf models; a homomorphism is a
// per-sort map preserving relations and commuting with functions.
struct Hom {
  std::map<Name, std::vector<size_t>> per_sort;
  bool operator==(const Hom&) const = default;
  bool operator<(const Hom& o) const { return per_sort < o.per_sort; }
};

struct Arrow {
  Hom hom;
  PresheafModel codomain;
};

// Exhaustive hom-set enumeration between one-point models (deterministic).
std::vector<Hom> enumerate_homs(const PresheafModel& from, const PresheafModel& to);
Hom identity_hom(const PresheafModel& M);
Hom compose(const PresheafModel& a, const Hom& f, const Hom& g);  // g after f
bool is_model_hom(const PresheafModel& from, const PresheafModel& to, const Hom& h);

// A compact-model family: base theory, quotient axioms, a model enumerator
// up to a size bound (duplicate-free up to isomorphism) and optionally a
// universal-operation constructor producing the generating arrows of the
// cosieve attached to one failing axiom instance.
struct ModelFamilyPlugin {
  Name name;
  Theory base;
  std::vector<Sequent> quotient_axioms;
  std::function<std::vector<PresheafModel>(size_t bound)> enumerate_models;
  std::function<std::optional<std::vector<Arrow>>(const PresheafModel& M, size_t axiom_idx,
                                                  const std::vector<size_t>& xbar)>
      universal_op;
};

// Built-in families.
ModelFamilyPlugin surjective_function_family();
ModelFamilyPlugin pointed_set_family();
// Periodic truncation of the left-infinite chain: sorts A0..A3 with
// f_n : A_{n+1 mod 4} -> A_n; quotients split into even and odd surjectivity.
ModelFamilyPlugin truncated_chain_family(bool even_axioms, bool odd_axioms);

// Cosieve on M: membership = factoring through one of the generators.
struct Cosieve {
  PresheafModel root;
  std::vector<Arrow> generators;
  bool maximal = false;  // satisfied instance: the identity generates
  bool member(const PresheafModel& target, const Hom& h) const;
};

// The generating arrows of S_{M, xbar, psi} for the axiom instance xbar in
// [[phi]]_M. If the plugin's universal operation applies, its arrows are
// verified against brute force within verify_bound (0 skips verification).
Cosieve cosieve_generators(const ModelFamilyPlugin& plugin, const PresheafModel& M,
                           size_t axiom_idx, const std::vector<size_t>& xbar,
                           size_t verify_bound = 0);

// Exhaustive membership table over all arrows to models of size <= bound.
struct CosieveTable {
  struct Row {
    size_t codomain_index;
    Hom hom;
    bool member;
  };
  std::vector<PresheafModel> codomains;
  std::vector<Row> rows;
};
CosieveTable brute_force_cosieve(const ModelFamilyPlugin& plugin, const PresheafModel& M,
                                 size_t axiom_idx, const std::vector<size_t>& xbar,
                                 size_t size_bound);

// Agreement of a generator description with the brute-force table.
bool cosieve_matches_table(const Cosieve& c, const CosieveTable& t);

// Failing instances of one axiom, in lex order.
std::vector<std::vector<size_t>> failing_instances(const PresheafModel& M, const Sequent& axiom);

// The rigidity covering run: repeatedly repair the least failing instance.
struct CoveringTrace {
  struct Node {
    std::string model;       // rendered model
    int axiom = -1;          // -1: leaf
    std::vector<size_t> instance;
    std::vector<size_t> children;  // node indices
    bool closed_by_empty_cosieve = false;
  };
  std::vector<Node> nodes;
  bool success = false;
  bool fuel_exhausted = false;
  std::string render() const;
};
CoveringTrace rigidity_run(const ModelFamilyPlugin& plugin, const PresheafModel& M, size_t fuel,
                           size_t verify_bound = 0);

// A model is irreducible iff it satisfies the quotient axioms.
bool irreducible(const ModelFamilyPlugin& plugin, const PresheafModel& M);

// Canonical one-line rendering of a one-point model (used in traces).
std::string render_set_model(const PresheafModel& M);

}  // namespace geoth
