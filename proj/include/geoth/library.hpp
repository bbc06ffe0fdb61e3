#pragma once

#include "geoth/extension.hpp"
#include "geoth/ring.hpp"

namespace geoth {

// Standard ring operation names per sort: the primary ring sort A uses the
// plain names (which the DSL prints infix), other sorts get suffixed names.
struct RingOps {
  Name sort, zero, one, neg, add, mul;
  static RingOps on(const Name& sort);
};

// inv(t) := ex w. t * w = 1 over the given ring ops.
Formula inv_formula(const Term& t, const RingOps& ops, const std::set<Name>& avoid = {});

// Numeral and power terms over arbitrary ring ops (the plain-A versions live
// in syntax.hpp).
Term numeral_for_ops(const Int& v, const RingOps& ops);
Term power_term_for_ops(const Term& t, uint64_t n, const RingOps& ops);

enum class LocVariant : uint8_t { Schematic, Finite };
enum class AlgFlavor : uint8_t { Economical, Schematic };

// ---------------------------------------------------------------------------
// builtin(...): the named theories and extensions.

// Commutative unitary ring on the given sort (default A).
Theory ring_theory(const RingOps& ops = RingOps::on("A"));
std::vector<Sequent> ring_axioms(const RingOps& ops);

// Ideal: relation I sub A over Ring.
TheoryExtension builtin_ideal();

// nil: quotient of Ring + Ideal; the membership formula is parameterized so
// the kernel convention (x in I := f(x) = 0) can reuse the same generator.
TheoryExtension builtin_nil();
Sequent nil_axiom(const std::function<Formula(const Term&)>& membership, const RingOps& ops);

// loc: quotient of Ring, either the schematic n-indexed family or the
// two-sequent form.
TheoryExtension builtin_loc(LocVariant v);
std::vector<Sequent> loc_finite_axioms(const RingOps& ops);

// surj: quotient of AlgAlg-shaped theories: every y : B is an f-image.
Sequent surj_axiom(const Name& f, const Name& sort_a, const Name& sort_b);
TheoryExtension builtin_surj();

// PD-Ideal: sort SI with module structure, embedding iota into A, and
// divided-power operations gam1..gamN with the five axiom families expanded
// for indices up to gamma_bound.
struct PDNames {
  Name sort = "SI";
  Name iota = "iota";
  Name zero = "zeroI";
  Name add = "addI";
  Name smul = "smulI";
  Name gamma_prefix = "gam";
};
TheoryExtension builtin_pd_ideal(unsigned gamma_bound);
// PD over Ring + Ideal: PD-Ideal plus the image-membership compatibility
// axioms, with membership given by I(t) or the kernel form f(t) = 0.
TheoryExtension builtin_pd(unsigned gamma_bound);
// Reusable blocks:
std::vector<Sequent> pd_ideal_axioms(const RingOps& ops, const PDNames& pd, unsigned gamma_bound);
std::vector<Sequent> pd_membership_axioms(const std::function<Formula(const Term&)>& membership,
                                          const RingOps& ops, const PDNames& pd);
void pd_ideal_signature(Signature& sig, const RingOps& ops, const PDNames& pd, unsigned gamma_bound);

// ---------------------------------------------------------------------------
// AlgStr and friends.

// Canonical closed term of a ring element over generator constants.
// Constants are named <prefix><gen name> on the given sort; scalars become
// numerals over the sort's ring operations (wrapped by `scalar_wrap` when
// the scalar lives in another sort, as for K-coefficients on the R-algebra).
struct ElementTermEnv {
  const PresentedRing* ring = nullptr;
  RingOps ops;
  Name constant_prefix = "c";
  Name constant_suffix;                        // chart disambiguation
  std::function<Term(const Int&)> scalar_term; // optional custom scalar rendering
  Term operator()(const Poly& p) const;
  Term gen_constant(size_t i) const;
};

// AlgStr_K on the given sort: economical flavor adds one constant per
// generator and one axiom per presentation relation (plus the characteristic
// relation of a Z/m base); schematic flavor requires a finite base ring (or
// an expansion level for infinite enumerable rings) and adds the full
// constant table with the four compatibility axiom families.
TheoryExtension alg_str(const Theory& base, const PresentedRing& K, AlgFlavor flavor,
                        const RingOps& ops = RingOps::on("A"),
                        std::optional<uint64_t> expand_level = std::nullopt);

// Alg_K = Ring + AlgStr_K.
Theory alg(const PresentedRing& K, AlgFlavor flavor,
           std::optional<uint64_t> expand_level = std::nullopt);

// AlgStr_R/K on sort B: an R-algebra structure compatible with the K-algebra
// structure transported along f. R is presented over K; its relation axioms
// map K-coefficients through f.
TheoryExtension alg_str_over(const Theory& base, const PresentedRing& R_over_K,
                             const PresentedRing& K, const Name& f, const RingOps& ops_a,
                             const RingOps& ops_b, AlgFlavor flavor);

// AlgAlg(K, R): Alg_K(A) + Alg_R(B) + K-algebra homomorphism f : A -> B.
Theory alg_alg(const PresentedRing& K, const PresentedRing& R_over_K, AlgFlavor flavor);
// AlgQuot(K, R) = AlgAlg(K, R) + surj.
Theory alg_quot(const PresentedRing& K, const PresentedRing& R_over_K, AlgFlavor flavor);

// Ideal_IK over Alg_K: Ideal plus c_lambda in I for generators of I_K; in
// kernel form the membership is f(term(lambda)) = 0.
std::vector<Sequent> ideal_ik_axioms(const PDRingData& K_data,
                                     const std::function<Formula(const Term&)>& membership,
                                     const ElementTermEnv& term_env);

// gamma/gamma_K: the axioms pinning the divided powers over the base PD ring:
// iota(x) = term(lambda) |- iota(gam_n(x)) = term(gamma_{K,n}(lambda)),
// for lambda ranging over the (finite) ideal and n <= gamma_bound.
std::vector<Sequent> gamma_compat_axioms(const PDRingData& K_data, unsigned gamma_bound,
                                         const RingOps& ops, const PDNames& pd,
                                         const ElementTermEnv& term_env);

// ---------------------------------------------------------------------------
// import_set

struct ImportedFunction {
  Name name;
  std::vector<size_t> table;  // index map on elements
};
struct ImportedRelation {
  Name name;
  std::set<size_t> members;
};
Theory import_set(const Name& sort, const std::vector<Name>& elements,
                  const std::vector<ImportedFunction>& funs = {},
                  const std::vector<ImportedRelation>& rels = {});

}  // namespace geoth
