#pragma once

#include "geoth/extension.hpp"
#include "geoth/library.hpp"
#include "geoth/ring.hpp"

namespace geoth {

// ---------------------------------------------------------------------------
// Localic gluing data: a base theory, one localic extension per chart, a
// closed overlap formula per ordered pair, and a diagonal quotient extension
// (axiom set) per unordered pair. Chart extensions and formulas may use
// constant symbols; they are desugared before conditioning.

struct LocalicGlueSpec {
  Theory t0;
  std::vector<Name> charts;
  std::map<Name, TheoryExtension> exts;                                  // E_i over t0
  std::map<std::pair<Name, Name>, Formula> overlaps;                     // phi_{i,j} over t0+E_i
  std::map<std::pair<Name, Name>, std::vector<Sequent>> diag_quotients;  // Q_{i,j}, key i<j
};

Name prop_name(const Name& chart);  // "p_" + chart

Theory glue_localic(const LocalicGlueSpec& spec);

// The main gluing construction: T0 + sum over nonempty S of E_S / phi_S with
// phi_S the conjunction of the chart formulas. Missing subsets mean empty
// extensions.
Theory glue_general(const Theory& t0, const std::vector<Name>& charts,
                    const std::map<std::vector<Name>, TheoryExtension>& exts,
                    const std::map<Name, Formula>& phis);
// Un-normalized assembly (axiom multiset inspection).
Theory glue_general_raw(const Theory& t0, const std::vector<Name>& charts,
                        const std::map<std::vector<Name>, TheoryExtension>& exts,
                        const std::map<Name, Formula>& phis);

// Eliminates proposition symbols: each p is replaced by a witness formula
// with p -||- psi present or derivable by one-step unfolding of a totality
// block. Runs a bounded redundancy sweep afterwards.
Theory eliminate_props(const Theory& t, const std::vector<Name>& props,
                       const std::map<Name, Formula>& witnesses = {});

// Bounded provability: the sequent follows from the axioms by one round of
// forward chaining plus direct witnessing. Sound, incomplete, deterministic.
bool bounded_provable(const Sequent& goal, const Theory& axioms);

// ---------------------------------------------------------------------------
// Zariski cover data

struct ZariskiOverlap {
  // Elements f^j on each side of one unordered pair {i, i'}, indexed by j.
  std::vector<std::pair<Poly, Poly>> fs;  // (f in K_i, f in K_i')
};

struct ZariskiCoverSpec {
  std::vector<Name> charts;
  std::map<Name, PresentedRing> rings;
  std::map<std::pair<Name, Name>, ZariskiOverlap> overlaps;  // key i<j
  // transition(i, i', j, lambda in K_i) = (lambda' in K_i', n) realizing
  // phi(lambda) = f^{-n} lambda'.
  std::function<std::pair<Poly, unsigned>(const Name&, const Name&, size_t, const Poly&)> transition;
  AlgFlavor flavor = AlgFlavor::Economical;
  LocVariant loc = LocVariant::Finite;
  // Elements lambda for which transition axioms are emitted, per chart;
  // defaults to all elements (finite rings) or the generators (economical).
  std::map<Name, std::vector<Poly>> lambda_samples;
};

Theory glue_zariski(const ZariskiCoverSpec& spec);

// Round-trip sanity check of the transition data on sampled elements.
void check_zariski_transitions(const ZariskiCoverSpec& spec);

// ---------------------------------------------------------------------------
// Crystalline cover data

struct CrystallineChart {
  PDRingData K;        // (K_i, I_{K_i}, gamma_{K_i})
  PresentedRing R;     // R_i presented over K_i / I_{K_i}
};

struct CrystallineOverlap {
  // g^j in K_i, K_i' and h^j in R_i, R_i' with g | h witnessed.
  std::vector<std::pair<Poly, Poly>> gs;
  std::vector<std::pair<Poly, Poly>> hs;
};

struct CrystallineCoverSpec {
  std::vector<Name> charts;
  std::map<Name, CrystallineChart> data;
  std::map<std::pair<Name, Name>, CrystallineOverlap> overlaps;  // key i<j
  std::function<std::pair<Poly, unsigned>(const Name&, const Name&, size_t, const Poly&)>
      transition_k;  // phi
  std::function<std::pair<Poly, unsigned>(const Name&, const Name&, size_t, const Poly&)>
      transition_r;  // phi tilde
  LocVariant loc = LocVariant::Finite;
  unsigned gamma_bound = 4;
  std::map<Name, std::vector<Poly>> lambda_samples;  // K-side
  std::map<Name, std::vector<Poly>> mu_samples;      // R-side
};

Theory glue_crystalline(const CrystallineCoverSpec& spec);

// The affine crystalline theory AlgQuot(K, R) + PD_gammaK + (nil) + (loc),
// assembled from the same blocks the gluing pipeline uses.
Theory affine_crystalline_theory(const CrystallineChart& chart, unsigned gamma_bound,
                                 LocVariant loc);
// Its base: AlgQuot(Z, Z) + PD + (nil) + (loc) with the kernel convention.
Theory crystalline_base_theory(unsigned gamma_bound, LocVariant loc);
// The chart delta E_i = AlgStr_K(A) + AlgStr_R/K(B) + Ideal_IK + gamma/gamma_K.
TheoryExtension crystalline_chart_extension(const Theory& base, const CrystallineChart& chart,
                                            unsigned gamma_bound);

}  // namespace geoth
