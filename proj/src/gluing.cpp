#include "geoth/gluing.hpp"

#include <algorithm>
#include <functional>

#include "geoth/dsl.hpp"

namespace geoth {

Name prop_name(const Name& chart) { return "p_" + chart; }

// ---------------------------------------------------------------------------
// glue_general

Theory glue_general_raw(const Theory& t0, const std::vector<Name>& charts,
                        const std::map<std::vector<Name>, TheoryExtension>& exts,
                        const std::map<Name, Formula>& phis) {
  SimplexPoset delta = SimplexPoset::of(charts);
  Theory acc = t0;
  for (size_t si = 0; si < delta.subsets.size(); si++) {
    const auto& S = delta.subsets[si];
    std::vector<Name> key;
    for (size_t i : S) key.push_back(charts[i]);
    auto it = exts.find(key);
    if (it == exts.end()) continue;  // empty extension
    // phi_S = conjunction of the chart formulas
    std::vector<Formula> cs;
    for (size_t i : S) cs.push_back(phis.at(charts[i]));
    Formula phi_s = Formula::conj(cs);
    TheoryExtension cond = conditional(it->second, phi_s);
    cond.base = acc;
    acc = apply_extension_raw(acc, cond);
  }
  return acc;
}

Theory glue_general(const Theory& t0, const std::vector<Name>& charts,
                    const std::map<std::vector<Name>, TheoryExtension>& exts,
                    const std::map<Name, Formula>& phis) {
  return normalize(glue_general_raw(t0, charts, exts, phis));
}

// ---------------------------------------------------------------------------
// glue_localic

Theory glue_localic(const LocalicGlueSpec& spec) {
  // Base: T0 + proposition symbols p_i + covering disjunction.
  Theory t0p = spec.t0;
  std::vector<Formula> cover;
  for (const auto& c : spec.charts) {
    Name p = prop_name(c);
    if (t0p.sig.relations.count(p)) throw PreconditionError("glue_localic: symbol clash " + p);
    t0p.sig.relations[p] = {};
    cover.push_back(Formula::rel(p, {}));
  }
  t0p.axioms.push_back({{}, Formula::truth(), Formula::disj(cover)});

  // Desugar chart extensions (the only place auto-desugaring is allowed).
  std::map<Name, TheoryExtension> des;
  for (const auto& c : spec.charts) {
    auto it = spec.exts.find(c);
    if (it == spec.exts.end()) throw PreconditionError("glue_localic: missing extension for " + c);
    if (!it->second.localic()) throw PreconditionError("glue_localic: extension not localic: " + c);
    des[c] = desugar_functions(it->second);
  }

  Theory acc = t0p;
  auto extend = [&](const TheoryExtension& e) {
    TheoryExtension r = e;
    r.base = acc;
    acc = apply_extension_raw(acc, r);
  };

  // E_i / p_i
  for (const auto& c : spec.charts) {
    TheoryExtension e = des[c];
    e.base = t0p;
    extend(conditional(e, Formula::rel(prop_name(c), {})));
  }
  // (p_j -||- phi_{i,j}) / p_i
  for (const auto& i : spec.charts) {
    for (const auto& j : spec.charts) {
      if (i == j) continue;
      auto it = spec.overlaps.find({i, j});
      if (it == spec.overlaps.end())
        throw PreconditionError("glue_localic: missing overlap formula (" + i + "," + j + ")");
      Formula phi = desugar_formula_against(it->second, spec.exts.at(i));
      if (!is_closed(phi)) throw PreconditionError("glue_localic: overlap formula not closed");
      TheoryExtension pair_ext;
      pair_ext.base = acc;
      Formula pj = Formula::rel(prop_name(j), {});
      pair_ext.delta_axioms.push_back({{}, pj, phi});
      pair_ext.delta_axioms.push_back({{}, phi, pj});
      extend(conditional(pair_ext, Formula::rel(prop_name(i), {})));
    }
  }
  // Q_{i,j} / (p_i and p_j)
  for (size_t a = 0; a < spec.charts.size(); a++) {
    for (size_t b = a + 1; b < spec.charts.size(); b++) {
      const Name& i = std::min(spec.charts[a], spec.charts[b]);
      const Name& j = std::max(spec.charts[a], spec.charts[b]);
      auto it = spec.diag_quotients.find({i, j});
      if (it == spec.diag_quotients.end()) continue;
      TheoryExtension q;
      q.base = acc;
      TheoryExtension both = sum(spec.exts.at(i), spec.exts.at(j));
      for (const auto& ax : it->second) {
        // Desugar chart constants inside the axiom. desugar_functions on a
        // single-axiom extension yields totality/uniqueness per symbol
        // followed by the rewritten axiom; only the latter belongs to Q (the
        // symbols themselves come with the chart extensions).
        TheoryExtension sugared;
        sugared.base = acc;
        sugared.delta_functions = both.delta_functions;
        sugared.delta_axioms.push_back(ax);
        TheoryExtension ds = desugar_functions(sugared);
        if (ds.delta_axioms.empty()) throw std::logic_error("desugar lost the axiom");
        q.delta_axioms.push_back(ds.delta_axioms.back());
      }
      Formula pij = Formula::conj({Formula::rel(prop_name(i), {}), Formula::rel(prop_name(j), {})});
      extend(conditional(q, pij));
    }
  }
  return normalize(acc);
}

// ---------------------------------------------------------------------------
// Bounded prover and redundancy sweep

namespace {

std::vector<Formula> conjuncts_list(const Formula& f) {
  if (f.kind == FKind::And) return f.sub;
  if (f.kind == FKind::Truth) return {};
  return {f};
}

void collect_terms_of_formula(const Formula& f, std::vector<Term>& out) {
  for (const auto& t : f.terms) {
    std::function<void(const Term&)> rec = [&](const Term& tt) {
      out.push_back(tt);
      for (const auto& a : tt.args) rec(a);
    };
    rec(t);
  }
  for (const auto& g : f.sub) collect_terms_of_formula(g, out);
}

// Tries to find substitutions of the axiom's context variables by candidate
// terms such that all antecedent conjuncts match facts; calls emit for each.
void match_axiom(const Sequent& ax, const std::set<Formula>& facts,
                 const std::vector<Term>& candidates,
                 const std::function<void(const std::map<Name, Term>&)>& emit) {
  std::vector<Formula> need;
  for (const auto& c : conjuncts_list(normalize_formula(ax.lhs))) need.push_back(c);
  // enumerate assignments var -> candidate (bounded)
  std::map<Name, Term> bind;
  size_t budget = 20000;
  std::function<void(size_t)> rec = [&](size_t vi) {
    if (budget == 0) return;
    if (vi == ax.ctx.size()) {
      budget--;
      for (const auto& c : need) {
        Formula inst = normalize_formula(substitute(c, bind));
        if (inst.kind == FKind::Truth) continue;
        if (inst.kind == FKind::Eq && inst.terms[0] == inst.terms[1]) continue;
        if (!facts.count(inst)) return;
      }
      emit(bind);
      return;
    }
    for (const auto& t : candidates) {
      bind[ax.ctx[vi].first] = t;
      rec(vi + 1);
      if (budget == 0) break;
    }
    bind.erase(ax.ctx[vi].first);
  };
  rec(0);
}

// Union-find over terms, seeded by the equality facts; lets the witness
// check reason across derived equations (e.g. commutativity instances).
struct EqClasses {
  std::map<Term, Term> parent;
  Term find(const Term& t) {
    auto it = parent.find(t);
    if (it == parent.end()) {
      parent[t] = t;
      return t;
    }
    if (it->second == t) return t;
    Term r = find(it->second);
    parent[t] = r;
    return r;
  }
  void unite(const Term& a, const Term& b) {
    Term ra = find(a), rb = find(b);
    if (!(ra == rb)) parent[ra] = rb;
  }
  bool equal(const Term& a, const Term& b) { return find(a) == find(b); }

  static EqClasses from(const std::set<Formula>& facts) {
    EqClasses eq;
    for (const auto& f : facts)
      if (f.kind == FKind::Eq) eq.unite(f.terms[0], f.terms[1]);
    return eq;
  }
};

// Direct witnessing: is the goal formula obvious from the fact set, modulo
// the equality classes of the derived equations?
bool obvious(const Formula& goal, const std::set<Formula>& facts, EqClasses& eq,
             const std::vector<Term>& candidates, int depth) {
  Formula g = normalize_formula(goal);
  switch (g.kind) {
    case FKind::Truth:
      return true;
    case FKind::Falsity:
      return facts.count(Formula::falsity()) > 0;
    case FKind::Eq:
      if (g.terms[0] == g.terms[1]) return true;
      if (facts.count(g)) return true;
      return eq.equal(g.terms[0], g.terms[1]);
    case FKind::RelAtom: {
      if (facts.count(g)) return true;
      for (const auto& f : facts) {
        if (f.kind != FKind::RelAtom || f.name != g.name || f.terms.size() != g.terms.size())
          continue;
        bool all = true;
        for (size_t i = 0; i < g.terms.size() && all; i++)
          if (!eq.equal(f.terms[i], g.terms[i])) all = false;
        if (all) return true;
      }
      return false;
    }
    case FKind::And: {
      for (const auto& c : g.sub)
        if (!obvious(c, facts, eq, candidates, depth)) return false;
      return true;
    }
    case FKind::Or: {
      for (const auto& c : g.sub)
        if (obvious(c, facts, eq, candidates, depth)) return true;
      return false;
    }
    case FKind::SchemaOr:
      return false;
    case FKind::Exists: {
      if (depth <= 0) return false;
      for (const auto& w : candidates) {
        std::map<Name, Term> bind{{g.name, w}};
        if (obvious(substitute(g.sub[0], bind), facts, eq, candidates, depth - 1)) return true;
      }
      return false;
    }
  }
  return false;
}

}  // namespace

bool bounded_provable(const Sequent& goal, const Theory& axioms) {
  // Fact set: the goal's antecedent conjuncts (context variables are treated
  // as fresh constants simply by leaving them as variables).
  std::set<Formula> facts;
  for (const auto& c : conjuncts_list(normalize_formula(goal.lhs))) facts.insert(normalize_formula(c));

  std::vector<Term> candidates;
  for (const auto& [v, s] : goal.ctx) candidates.push_back(Term::mkvar(v));
  {
    std::vector<Term> ts;
    collect_terms_of_formula(goal.lhs, ts);
    for (const auto& t : ts) candidates.push_back(t);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  }
  if (candidates.size() > 12) candidates.resize(12);

  // One round of forward chaining with atom-consequent axioms.
  std::set<Formula> derived = facts;
  for (const auto& ax : axioms.axioms) {
    Formula rhs = normalize_formula(ax.rhs);
    bool atomic = rhs.kind == FKind::RelAtom || rhs.kind == FKind::Eq ||
                  (rhs.kind == FKind::And && std::all_of(rhs.sub.begin(), rhs.sub.end(), [](const Formula& c) {
                     return c.kind == FKind::RelAtom || c.kind == FKind::Eq;
                   }));
    if (!atomic) continue;
    if (ax.ctx.size() > 4) continue;
    match_axiom(ax, facts, candidates, [&](const std::map<Name, Term>& bind) {
      for (const auto& c : conjuncts_list(rhs)) derived.insert(normalize_formula(substitute(c, bind)));
    });
  }
  EqClasses eq = EqClasses::from(derived);
  return obvious(goal.rhs, derived, eq, candidates, 3);
}

// ---------------------------------------------------------------------------
// eliminate_props

Theory eliminate_props(const Theory& t, const std::vector<Name>& props,
                       const std::map<Name, Formula>& witnesses) {
  Theory cur = normalize(t);
  for (const auto& p : props) {
    if (!cur.sig.relations.count(p)) continue;
    Formula patom = Formula::rel(p, {});
    // Count occurrences outside the bare covering axiom.
    auto occurs_in = [&](const Formula& f) {
      std::function<bool(const Formula&)> rec = [&](const Formula& g) -> bool {
        if (g == patom) return true;
        for (const auto& s : g.sub)
          if (rec(s)) return true;
        return false;
      };
      return rec(f);
    };
    std::optional<Formula> witness;
    auto wit = witnesses.find(p);
    if (wit != witnesses.end()) witness = wit->second;
    bool only_cover = true;
    for (const auto& ax : cur.axioms) {
      bool is_cover = ax.ctx.empty() && ax.lhs.kind == FKind::Truth && ax.rhs == patom;
      if (!is_cover && (occurs_in(ax.lhs) || occurs_in(ax.rhs))) only_cover = false;
    }
    if (!witness && only_cover) {
      // p is pinned by a top-level axiom only; drop symbol and axiom.
      std::vector<Sequent> kept;
      for (const auto& ax : cur.axioms) {
        bool is_cover = ax.ctx.empty() && ax.lhs.kind == FKind::Truth && ax.rhs == patom;
        if (!is_cover) kept.push_back(ax);
      }
      cur.axioms = kept;
      cur.sig.relations.erase(p);
      cur = normalize(cur);
      continue;
    }
    if (!witness) {
      // auto-derivation: T |- p (covering axiom true |- p) gives witness true
      for (const auto& ax : cur.axioms) {
        if (ax.ctx.empty() && ax.lhs.kind == FKind::Truth && ax.rhs == patom) {
          witness = Formula::truth();
          break;
        }
      }
    }
    if (!witness) {
      // one-step unfolding of a conditional totality block:
      // p |- ex x. R(x)  together with a guard  R(x) |- p.
      for (const auto& ax : cur.axioms) {
        if (!(ax.ctx.empty() && ax.lhs == patom && ax.rhs.kind == FKind::Exists)) continue;
        const Formula& body = ax.rhs.sub[0];
        if (body.kind != FKind::RelAtom) continue;
        // look for the guard
        for (const auto& gx : cur.axioms) {
          if (gx.rhs == patom && gx.lhs.kind == FKind::RelAtom && gx.lhs.name == body.name) {
            witness = ax.rhs;
            break;
          }
        }
        if (witness) break;
      }
    }
    if (!witness)
      throw PreconditionError("eliminate_props: no witness for " + p);
    // substitute
    std::function<Formula(const Formula&)> subst = [&](const Formula& f) -> Formula {
      if (f == patom) return *witness;
      Formula out = f;
      for (auto& s : out.sub) s = subst(s);
      return out;
    };
    for (auto& ax : cur.axioms) {
      ax.lhs = subst(ax.lhs);
      ax.rhs = subst(ax.rhs);
    }
    cur.sig.relations.erase(p);
    cur = normalize(cur);
  }

  // Bounded redundancy sweep: drop axioms provable from the remaining ones.
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < cur.axioms.size(); i++) {
      Theory rest = cur;
      rest.axioms.erase(rest.axioms.begin() + i);
      if (bounded_provable(cur.axioms[i], rest)) {
        cur.axioms.erase(cur.axioms.begin() + i);
        changed = true;
        break;
      }
    }
  }
  return normalize(cur);
}

// ---------------------------------------------------------------------------
// Zariski

namespace {

// inv(t) on the main ring sort.
Formula inv_on_a(const Term& t) { return inv_formula(t, RingOps::on("A")); }

}  // namespace

void check_zariski_transitions(const ZariskiCoverSpec& spec) {
  // Involutivity on samples: with phi(lambda) = f_ji^{-n} lambda' and
  // phi^{-1}(mu) = f_ij^{-m} mu', round-tripping lambda must satisfy
  //   lambda'' * f_ij^{n * nf} = img(f_ji)^n * lambda * f_ij^{n2}      in K_i,
  // where phi^{-1}(f_ji) = f_ij^{-nf} img(f_ji).
  for (const auto& [pair, ov] : spec.overlaps) {
    const auto& [i, j] = pair;
    for (size_t jj = 0; jj < ov.fs.size(); jj++) {
      const PresentedRing& Ki = spec.rings.at(i);
      const Poly f_i = ov.fs[jj].first;
      const Poly f_j = ov.fs[jj].second;
      auto [fji_img, nf] = spec.transition(j, i, jj, f_j);
      std::vector<Poly> samples;
      samples.push_back(Ki.one());
      for (size_t g = 0; g < Ki.gens.size(); g++) samples.push_back(Ki.gen(g));
      samples.push_back(f_i);
      for (const auto& lam : samples) {
        auto [l1, n1] = spec.transition(i, j, jj, lam);
        auto [l2, n2] = spec.transition(j, i, jj, l1);
        Poly lhs = l2;
        for (unsigned k = 0; k < n1 * nf; k++) lhs = lhs * f_i;
        Poly rhs = lam;
        for (unsigned k = 0; k < n1; k++) rhs = rhs * fji_img;
        for (unsigned k = 0; k < n2; k++) rhs = rhs * f_i;
        if (!Ki.eq(lhs, rhs))
          throw PreconditionError("zariski transitions are not involutive on sampled element");
      }
    }
  }
}

Theory glue_zariski(const ZariskiCoverSpec& spec) {
  if (!spec.overlaps.empty() && spec.transition) check_zariski_transitions(spec);
  LocalicGlueSpec ls;
  Theory ring = ring_theory();
  TheoryExtension locx = builtin_loc(spec.loc);
  ls.t0 = apply_extension_raw(ring, locx);
  ls.charts = spec.charts;

  // Chart constants get a _<chart> suffix only if names collide across charts.
  bool collide = false;
  {
    std::map<Name, size_t> seen;
    for (const auto& c : spec.charts)
      for (const auto& g : spec.rings.at(c).gens)
        if (++seen["c" + g] > 1) collide = true;
  }
  auto suffix = [&](const Name& chart) { return collide ? "_" + chart : Name{}; };

  for (const auto& c : spec.charts) {
    const PresentedRing& K = spec.rings.at(c);
    TheoryExtension e = alg_str(ls.t0, K, spec.flavor, RingOps::on("A"));
    if (!collide) {
      ls.exts[c] = e;
      continue;
    }
    TheoryExtension renamed;
    renamed.base = e.base;
    std::map<Name, Name> ren;
    for (const auto& [f, d] : e.delta_functions) {
      ren[f] = f + suffix(c);
      renamed.delta_functions[f + suffix(c)] = d;
    }
    std::function<Term(const Term&)> rt = [&](const Term& t) -> Term {
      Term o = t;
      if (!o.var && ren.count(o.head)) o.head = ren.at(o.head);
      for (auto& a : o.args) a = rt(a);
      return o;
    };
    std::function<Formula(const Formula&)> rf = [&](const Formula& f) -> Formula {
      Formula o = f;
      for (auto& t : o.terms) t = rt(t);
      for (auto& s : o.sub) s = rf(s);
      return o;
    };
    for (auto ax : e.delta_axioms) {
      ax.lhs = rf(ax.lhs);
      ax.rhs = rf(ax.rhs);
      renamed.delta_axioms.push_back(ax);
    }
    ls.exts[c] = renamed;
  }
  auto term_of = [&](const Name& chart, const Poly& p) -> Term {
    ElementTermEnv env;
    env.ring = &spec.rings.at(chart);
    env.ops = RingOps::on("A");
    env.constant_suffix = suffix(chart);
    return env(p);
  };

  // Overlap formulas phi_{i,j} = \/_j inv(term(f^j)).
  for (const auto& i : spec.charts) {
    for (const auto& j : spec.charts) {
      if (i == j) continue;
      std::vector<Formula> disj;
      auto key = i < j ? std::make_pair(i, j) : std::make_pair(j, i);
      auto it = spec.overlaps.find(key);
      if (it != spec.overlaps.end()) {
        for (const auto& f : it->second.fs) {
          const Poly& fi = (i < j) ? f.first : f.second;
          disj.push_back(inv_on_a(term_of(i, fi)));
        }
      }
      // Empty overlap family: the disjunction is empty, i.e. false.
      ls.overlaps[{i, j}] = Formula::disj(disj);
    }
  }

  // Diagonal quotients from the transition data.
  for (size_t a = 0; a < spec.charts.size(); a++) {
    for (size_t b = a + 1; b < spec.charts.size(); b++) {
      const Name& i = spec.charts[a];
      const Name& j = spec.charts[b];
      auto it = spec.overlaps.find({i, j});
      if (it == spec.overlaps.end()) continue;
      std::vector<Sequent> qs;
      auto lambdas_of = [&](const Name& chart) {
        auto ls_it = spec.lambda_samples.find(chart);
        if (ls_it != spec.lambda_samples.end()) return ls_it->second;
        const PresentedRing& K = spec.rings.at(chart);
        std::vector<Poly> out;
        if (K.is_finite()) {
          out = K.enumerate();
        } else {
          for (size_t g = 0; g < K.gens.size(); g++) out.push_back(K.gen(g));
        }
        return out;
      };
      // Q_{i,j}: inv(f_{j,i}) |- f_{j,i}^n c_lambda = c_lambda', lambda in K_i
      auto emit = [&](const Name& from, const Name& to) {
        for (size_t jj = 0; jj < it->second.fs.size(); jj++) {
          const Poly& f_to = (to == i) ? it->second.fs[jj].first : it->second.fs[jj].second;
          Term f_term = term_of(to, f_to);
          for (const auto& lam : lambdas_of(from)) {
            auto [lam2, n] = spec.transition(from, to, jj, lam);
            Term lhs = Term::app("mul", {power_term(f_term, n), term_of(from, lam)});
            if (n == 0) lhs = term_of(from, lam);
            Sequent q;
            q.lhs = inv_on_a(f_term);
            q.rhs = Formula::eq(lhs, term_of(to, lam2));
            qs.push_back(q);
          }
        }
      };
      emit(i, j);
      emit(j, i);
      ls.diag_quotients[{i, j}] = qs;
    }
  }
  return glue_localic(ls);
}

// ---------------------------------------------------------------------------
// Crystalline

Theory crystalline_base_theory(unsigned gamma_bound, LocVariant loc) {
  // AlgQuot(Z, Z) + PD + (nil) + (loc), with the ideal given by the kernel
  // of f (x in I := f(x) = 0) and the quotient sort B present.
  Theory t = alg_quot(PresentedRing::Z(), PresentedRing::Z(), AlgFlavor::Economical);
  RingOps a = RingOps::on("A");
  RingOps b = RingOps::on("B");
  PDNames pd;
  pd_ideal_signature(t.sig, a, pd, gamma_bound);
  for (const auto& ax : pd_ideal_axioms(a, pd, gamma_bound)) t.axioms.push_back(ax);
  auto mem = [&](const Term& x) {
    return Formula::eq(Term::app("f", {x}), Term::app(b.zero));
  };
  for (const auto& ax : pd_membership_axioms(mem, a, pd)) t.axioms.push_back(ax);
  t.axioms.push_back(nil_axiom(mem, a));
  if (loc == LocVariant::Finite) {
    for (const auto& ax : loc_finite_axioms(a)) t.axioms.push_back(ax);
  } else {
    t.schemas.push_back(AxiomSchema{"loc", {"A"}, Bound::sort_size()});
  }
  return t;
}

TheoryExtension crystalline_chart_extension(const Theory& base, const CrystallineChart& chart,
                                            unsigned gamma_bound) {
  // I_K must vanish in R (the kernel convention makes f(c_lambda) = 0
  // provable only then). For scalar rings this is decidable directly.
  if (chart.K.ring.gens.empty() && chart.R.base == Scalar::Tag::Zmod) {
    for (const auto& g : chart.K.ideal_gens) {
      if (g.is_zero()) continue;
      if (chart.K.ring.base != Scalar::Tag::Zmod)
        throw PreconditionError("crystalline chart: unsupported base ring for the ideal");
      uint64_t v = g.coeffs.begin()->second.m;
      if (v % chart.R.mod != 0)
        throw PreconditionError("crystalline chart: the base ideal does not vanish in R");
    }
  }
  RingOps a = RingOps::on("A");
  RingOps b = RingOps::on("B");
  PDNames pd;
  TheoryExtension e = alg_str(base, chart.K.ring, AlgFlavor::Economical, a);
  {
    Theory mid = apply_extension_raw(base, e);
    TheoryExtension rb = alg_str_over(mid, chart.R, chart.K.ring, "f", a, b, AlgFlavor::Economical);
    rb.base = base;
    e = sum(e, rb);
  }
  ElementTermEnv env;
  env.ring = &chart.K.ring;
  env.ops = a;
  auto mem = [&](const Term& x) {
    return Formula::eq(Term::app("f", {x}), Term::app(b.zero));
  };
  for (const auto& ax : ideal_ik_axioms(chart.K, mem, env)) e.delta_axioms.push_back(ax);
  for (const auto& ax : gamma_compat_axioms(chart.K, gamma_bound, a, pd, env))
    e.delta_axioms.push_back(ax);
  return e;
}

Theory affine_crystalline_theory(const CrystallineChart& chart, unsigned gamma_bound,
                                 LocVariant loc) {
  Theory base = crystalline_base_theory(gamma_bound, loc);
  TheoryExtension e = crystalline_chart_extension(base, chart, gamma_bound);
  return normalize(apply_extension_raw(base, e));
}

Theory glue_crystalline(const CrystallineCoverSpec& spec) {
  LocalicGlueSpec ls;
  ls.t0 = crystalline_base_theory(spec.gamma_bound, spec.loc);
  ls.charts = spec.charts;
  RingOps b_ops = RingOps::on("B");

  bool collide = false;
  {
    std::map<Name, size_t> seen;
    for (const auto& c : spec.charts) {
      for (const auto& g : spec.data.at(c).K.ring.gens)
        if (++seen["c" + g] > 1) collide = true;
      for (const auto& g : spec.data.at(c).R.gens)
        if (++seen["c" + g] > 1) collide = true;
    }
  }
  auto suffix = [&](const Name& chart) { return collide ? "_" + chart : Name{}; };

  for (const auto& c : spec.charts) {
    const CrystallineChart& chart = spec.data.at(c);
    TheoryExtension e = crystalline_chart_extension(ls.t0, chart, spec.gamma_bound);
    if (!collide) {
      ls.exts[c] = e;
      continue;
    }
    TheoryExtension renamed;
    renamed.base = e.base;
    std::map<Name, Name> ren;
    for (const auto& [f, d] : e.delta_functions) {
      ren[f] = f + suffix(c);
      renamed.delta_functions[f + suffix(c)] = d;
    }
    std::function<Term(const Term&)> rt = [&](const Term& t) -> Term {
      Term o = t;
      if (!o.var && ren.count(o.head)) o.head = ren.at(o.head);
      for (auto& arg : o.args) arg = rt(arg);
      return o;
    };
    std::function<Formula(const Formula&)> rf = [&](const Formula& f) -> Formula {
      Formula o = f;
      for (auto& t : o.terms) t = rt(t);
      for (auto& s : o.sub) s = rf(s);
      return o;
    };
    for (auto ax : e.delta_axioms) {
      ax.lhs = rf(ax.lhs);
      ax.rhs = rf(ax.rhs);
      renamed.delta_axioms.push_back(ax);
    }
    ls.exts[c] = renamed;
  }

  auto term_k = [&](const Name& chart, const Poly& p) -> Term {
    ElementTermEnv env;
    env.ring = &spec.data.at(chart).K.ring;
    env.ops = RingOps::on("A");
    env.constant_suffix = suffix(chart);
    return env(p);
  };
  auto term_r = [&](const Name& chart, const Poly& p) -> Term {
    ElementTermEnv env;
    env.ring = &spec.data.at(chart).R;
    env.ops = b_ops;
    env.constant_suffix = suffix(chart);
    env.scalar_term = [](const Int& v) -> Term {
      return Term::app("f", {numeral_for_ops(v, RingOps::on("A"))});
    };
    return env(p);
  };

  // Overlap formulas: phi_{i,i'} = \/_j inv(c_{h^j} : B).
  for (const auto& i : spec.charts) {
    for (const auto& j : spec.charts) {
      if (i == j) continue;
      std::vector<Formula> disj;
      auto key = i < j ? std::make_pair(i, j) : std::make_pair(j, i);
      auto it = spec.overlaps.find(key);
      if (it != spec.overlaps.end()) {
        for (const auto& h : it->second.hs) {
          const Poly& hi = (i < j) ? h.first : h.second;
          disj.push_back(inv_formula(term_r(i, hi), b_ops));
        }
      }
      ls.overlaps[{i, j}] = Formula::disj(disj);
    }
  }

  // Diagonal quotients: K-side and R-side transition axiom families.
  for (size_t aa = 0; aa < spec.charts.size(); aa++) {
    for (size_t bb = aa + 1; bb < spec.charts.size(); bb++) {
      const Name& i = spec.charts[aa];
      const Name& j = spec.charts[bb];
      auto it = spec.overlaps.find({i, j});
      if (it == spec.overlaps.end()) continue;
      std::vector<Sequent> qs;
      auto lambdas_of = [&](const Name& chart) {
        auto sit = spec.lambda_samples.find(chart);
        if (sit != spec.lambda_samples.end()) return sit->second;
        const PresentedRing& K = spec.data.at(chart).K.ring;
        std::vector<Poly> out;
        if (K.is_finite())
          out = K.enumerate();
        else
          for (size_t g = 0; g < K.gens.size(); g++) out.push_back(K.gen(g));
        return out;
      };
      auto mus_of = [&](const Name& chart) {
        auto sit = spec.mu_samples.find(chart);
        if (sit != spec.mu_samples.end()) return sit->second;
        const PresentedRing& R = spec.data.at(chart).R;
        std::vector<Poly> out;
        if (R.is_finite())
          out = R.enumerate();
        else
          for (size_t g = 0; g < R.gens.size(); g++) out.push_back(R.gen(g));
        return out;
      };
      auto emit = [&](const Name& from, const Name& to) {
        for (size_t jj = 0; jj < it->second.gs.size(); jj++) {
          const Poly& g_to = (to == i) ? it->second.gs[jj].first : it->second.gs[jj].second;
          const Poly& h_to = (to == i) ? it->second.hs[jj].first : it->second.hs[jj].second;
          Term g_term = term_k(to, g_to);
          Term h_term = term_r(to, h_to);
          for (const auto& lam : lambdas_of(from)) {
            auto [lam2, n] = spec.transition_k(from, to, jj, lam);
            Term lhs = n == 0 ? term_k(from, lam)
                              : Term::app("mul", {power_term(g_term, n), term_k(from, lam)});
            Sequent q;
            q.lhs = inv_formula(g_term, RingOps::on("A"));
            q.rhs = Formula::eq(lhs, term_k(to, lam2));
            qs.push_back(q);
          }
          for (const auto& mu : mus_of(from)) {
            auto [mu2, n] = spec.transition_r(from, to, jj, mu);
            Term lhs = n == 0 ? term_r(from, mu)
                              : Term::app(b_ops.mul,
                                          {power_term_for_ops(h_term, n, b_ops), term_r(from, mu)});
            Sequent q;
            q.lhs = inv_formula(h_term, b_ops);
            q.rhs = Formula::eq(lhs, term_r(to, mu2));
            qs.push_back(q);
          }
        }
      };
      emit(i, j);
      emit(j, i);
      ls.diag_quotients[{i, j}] = qs;
    }
  }
  return glue_localic(ls);
}

}  // namespace geoth
