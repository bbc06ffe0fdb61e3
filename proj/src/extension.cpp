#include "geoth/extension.hpp"

#include <algorithm>
#include <functional>

namespace geoth {

// ---------------------------------------------------------------------------
// Application and sums

Theory apply_extension_raw(const Theory& base, const TheoryExtension& ext) {
  if (normalize(ext.base) != normalize(base))
    throw PreconditionError("apply_extension: base theory mismatch");
  Theory out = base;
  out.sig = Signature::merged(base.sig, ext.delta_signature());
  for (const auto& a : ext.delta_axioms) out.axioms.push_back(a);
  for (const auto& s : ext.delta_schemas) out.schemas.push_back(s);
  auto diags = check_wellformed(out);
  if (!diags.empty())
    throw PreconditionError("apply_extension: ill-formed result: " + diags[0].path + ": " +
                            diags[0].message);
  return out;
}

Theory apply_extension(const Theory& base, const TheoryExtension& ext) {
  return normalize(apply_extension_raw(base, ext));
}

TheoryExtension sum(const TheoryExtension& e1, const TheoryExtension& e2) {
  if (normalize(e1.base) != normalize(e2.base))
    throw PreconditionError("sum: extensions have different bases");
  TheoryExtension out = e1;
  for (const auto& s : e2.delta_sorts)
    if (!out.delta_sorts.insert(s).second) throw PreconditionError("sum: sort clash " + s);
  for (const auto& [r, ar] : e2.delta_relations) {
    if (out.delta_relations.count(r) || out.delta_functions.count(r))
      throw PreconditionError("sum: symbol clash " + r);
    out.delta_relations[r] = ar;
  }
  for (const auto& [f, d] : e2.delta_functions) {
    if (out.delta_relations.count(f) || out.delta_functions.count(f))
      throw PreconditionError("sum: symbol clash " + f);
    out.delta_functions[f] = d;
  }
  for (const auto& a : e2.delta_axioms) out.delta_axioms.push_back(a);
  for (const auto& s : e2.delta_schemas) out.delta_schemas.push_back(s);
  for (const auto& o : e2.obligations) out.obligations.push_back(o);
  return out;
}

TheoryExtension empty_extension(const Theory& base) {
  TheoryExtension e;
  e.base = base;
  return e;
}

// ---------------------------------------------------------------------------
// Desugaring
//
// Delta constants c : B become relations c sub B with totality and
// uniqueness. In a sequent, every occurrence of c is replaced by a hypothesis
// variable bound in the antecedent (the "partial constant" reading); in a
// standalone formula, by an existential wrapper at the widest scope.
// Non-nullary delta functions f become graph relations; applications are
// rewritten innermost-first into existentially bound graph atoms, except
// that an equation f(t...) = s with f-free s becomes the graph atom directly.

namespace {

struct DesugarEnv {
  std::set<Name> delta_constants;       // 0-ary delta functions
  std::set<Name> delta_funs;            // non-nullary delta functions
  std::map<Name, FunDecl> decls;        // all delta functions
  std::set<Name>* used_names = nullptr; // for fresh variable generation
};

bool term_mentions(const Term& t, const std::set<Name>& funs) {
  if (t.var) return false;
  if (funs.count(t.head)) return true;
  for (const auto& a : t.args)
    if (term_mentions(a, funs)) return true;
  return false;
}

bool formula_mentions(const Formula& f, const std::set<Name>& funs) {
  for (const auto& t : f.terms)
    if (term_mentions(t, funs)) return true;
  for (const auto& g : f.sub)
    if (formula_mentions(g, funs)) return true;
  return false;
}

// Rewrites one innermost non-nullary delta application inside the term,
// returning the graph atom binding plus the rewritten term. Returns false if
// none found.
bool extract_innermost(Term& t, const DesugarEnv& env, Name& out_var, Term& out_app) {
  if (t.var) return false;
  for (auto& a : t.args)
    if (extract_innermost(a, env, out_var, out_app)) return true;
  if (env.delta_funs.count(t.head)) {
    // innermost: arguments contain no delta functions anymore
    for (const auto& a : t.args)
      if (term_mentions(a, env.delta_funs)) return false;
    out_var = fresh_name("u", *env.used_names);
    env.used_names->insert(out_var);
    out_app = t;
    t = Term::mkvar(out_var);
    return true;
  }
  return false;
}

// Desugars all non-nullary delta applications in an atomic formula.
Formula desugar_atom_funs(Formula atom, const DesugarEnv& env) {
  if (atom.kind != FKind::RelAtom && atom.kind != FKind::Eq) return atom;
  // Special case: equation f(t...) = s (or s = f(t...)) with delta f at the
  // root and the other side free of delta functions becomes the graph atom.
  auto graph_case = [&](Term& app_side, Term& other) -> std::optional<Formula> {
    if (!app_side.var && env.delta_funs.count(app_side.head) && !term_mentions(other, env.delta_funs)) {
      bool args_clean = true;
      for (const auto& a : app_side.args)
        if (term_mentions(a, env.delta_funs)) args_clean = false;
      if (args_clean) {
        std::vector<Term> ts = app_side.args;
        ts.push_back(other);
        return Formula::rel(app_side.head, std::move(ts));
      }
    }
    return std::nullopt;
  };
  std::vector<std::pair<Name, Term>> bindings;
  while (formula_mentions(atom, env.delta_funs)) {
    if (atom.kind == FKind::Eq) {
      if (auto g = graph_case(atom.terms[0], atom.terms[1])) {
        atom = *g;
        continue;
      }
      if (auto g = graph_case(atom.terms[1], atom.terms[0])) {
        atom = *g;
        continue;
      }
    }
    Name v;
    Term app;
    bool found = false;
    for (auto& t : atom.terms) {
      if (extract_innermost(t, env, v, app)) {
        found = true;
        break;
      }
    }
    if (!found) break;
    bindings.emplace_back(v, app);
  }
  // Wrap innermost-first bindings: ex v_k ... ex v_1. (graph_1 & ... & atom)
  Formula body = atom;
  for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) {
    std::vector<Term> ts = it->second.args;
    ts.push_back(Term::mkvar(it->first));
    Formula graph = Formula::rel(it->second.head, std::move(ts));
    body = Formula::exists(it->first, env.decls.at(it->second.head).codomain,
                           Formula::conj({graph, body}));
  }
  return body;
}

Formula desugar_formula_funs(const Formula& f, const DesugarEnv& env) {
  switch (f.kind) {
    case FKind::Truth:
    case FKind::Falsity:
      return f;
    case FKind::RelAtom:
    case FKind::Eq:
      return desugar_atom_funs(f, env);
    case FKind::SchemaOr:
      if (formula_mentions(f, env.delta_funs) ||
          [&] {
            for (const auto& t : f.terms)
              if (term_mentions(t, env.delta_constants)) return true;
            return false;
          }())
        throw PreconditionError("cannot desugar delta symbols under a schematic disjunction");
      return f;
    case FKind::And:
    case FKind::Or: {
      Formula out = f;
      for (auto& g : out.sub) g = desugar_formula_funs(g, env);
      return out;
    }
    case FKind::Exists: {
      Formula out = f;
      env.used_names->insert(f.name);
      out.sub[0] = desugar_formula_funs(f.sub[0], env);
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

// Replaces occurrences of delta constants in a formula by existentially
// bound membership witnesses at the widest scope (constants have no
// arguments, so the scope is the whole formula).
Formula desugar_constants_existential(const Formula& f, const DesugarEnv& env) {
  std::set<Name> present;
  std::function<void(const Term&)> scan_term = [&](const Term& t) {
    if (!t.var) {
      if (env.delta_constants.count(t.head)) present.insert(t.head);
      for (const auto& a : t.args) scan_term(a);
    }
  };
  std::function<void(const Formula&)> scan = [&](const Formula& g) {
    for (const auto& t : g.terms) scan_term(t);
    for (const auto& s : g.sub) scan(s);
  };
  scan(f);
  Formula body = f;
  // Deterministic order: sorted constant names, outermost binder first.
  std::vector<Name> cs(present.begin(), present.end());
  for (auto it = cs.rbegin(); it != cs.rend(); ++it) {
    Name v = fresh_name("u", *env.used_names);
    env.used_names->insert(v);
    std::map<Name, Term> bind;  // replace the application term by the variable
    // substitute() replaces variables, so do a manual term rewrite:
    std::function<Term(const Term&)> rw = [&](const Term& t) -> Term {
      if (!t.var && t.head == *it && t.args.empty()) return Term::mkvar(v);
      Term o = t;
      for (auto& a : o.args) a = rw(a);
      return o;
    };
    std::function<Formula(const Formula&)> rwf = [&](const Formula& g) -> Formula {
      Formula o = g;
      for (auto& t : o.terms) t = rw(t);
      for (auto& s : o.sub) s = rwf(s);
      return o;
    };
    body = Formula::exists(v, env.decls.at(*it).codomain,
                           Formula::conj({Formula::rel(*it, {Term::mkvar(v)}), rwf(body)}));
  }
  return body;
}

}  // namespace

TheoryExtension desugar_functions(const TheoryExtension& ext) {
  if (ext.delta_functions.empty()) return ext;
  TheoryExtension out;
  out.base = ext.base;
  out.delta_sorts = ext.delta_sorts;
  out.delta_relations = ext.delta_relations;
  out.obligations = ext.obligations;

  DesugarEnv env;
  env.decls = ext.delta_functions;
  for (const auto& [f, d] : ext.delta_functions) {
    (d.domain.empty() ? env.delta_constants : env.delta_funs).insert(f);
    std::vector<Name> ar = d.domain;
    ar.push_back(d.codomain);
    if (out.delta_relations.count(f))
      throw PreconditionError("desugar: relation name already used: " + f);
    out.delta_relations[f] = ar;
  }

  // Totality and uniqueness axioms for every former function symbol.
  for (const auto& [f, d] : ext.delta_functions) {
    Sequent tot;
    std::vector<Term> xs;
    for (size_t i = 0; i < d.domain.size(); i++) {
      Name x = "x" + std::to_string(i + 1);
      tot.ctx.emplace_back(x, d.domain[i]);
      xs.push_back(Term::mkvar(x));
    }
    std::vector<Term> atom_args = xs;
    atom_args.push_back(Term::mkvar("y"));
    tot.lhs = Formula::truth();
    tot.rhs = Formula::exists("y", d.codomain, Formula::rel(f, atom_args));
    out.delta_axioms.push_back(tot);

    Sequent uniq;
    uniq.ctx = tot.ctx;
    uniq.ctx.emplace_back("y", d.codomain);
    uniq.ctx.emplace_back("z", d.codomain);
    std::vector<Term> a1 = xs, a2 = xs;
    a1.push_back(Term::mkvar("y"));
    a2.push_back(Term::mkvar("z"));
    uniq.lhs = Formula::conj({Formula::rel(f, a1), Formula::rel(f, a2)});
    uniq.rhs = Formula::eq(Term::mkvar("y"), Term::mkvar("z"));
    out.delta_axioms.push_back(uniq);
  }

  // Rewrite the delta axioms.
  for (const auto& a : ext.delta_axioms) {
    Sequent q = a;
    std::set<Name> used;
    for (const auto& [v, s] : q.ctx) used.insert(v);
    for (const auto& v : free_vars(q.lhs)) used.insert(v);
    for (const auto& v : free_vars(q.rhs)) used.insert(v);
    env.used_names = &used;

    q.lhs = desugar_formula_funs(q.lhs, env);
    q.rhs = desugar_formula_funs(q.rhs, env);

    // Constants become antecedent hypotheses shared by both sides.
    std::set<Name> present;
    std::function<void(const Term&)> scan_term = [&](const Term& t) {
      if (!t.var) {
        if (env.delta_constants.count(t.head)) present.insert(t.head);
        for (const auto& arg : t.args) scan_term(arg);
      }
    };
    std::function<void(const Formula&)> scan = [&](const Formula& g) {
      for (const auto& t : g.terms) scan_term(t);
      for (const auto& s : g.sub) scan(s);
    };
    scan(q.lhs);
    scan(q.rhs);
    std::vector<Formula> hyps;
    for (const auto& c : present) {
      Name v = fresh_name("u", used);
      used.insert(v);
      std::function<Term(const Term&)> rw = [&](const Term& t) -> Term {
        if (!t.var && t.head == c && t.args.empty()) return Term::mkvar(v);
        Term o = t;
        for (auto& arg : o.args) arg = rw(arg);
        return o;
      };
      std::function<Formula(const Formula&)> rwf = [&](const Formula& g) -> Formula {
        Formula o = g;
        for (auto& t : o.terms) t = rw(t);
        for (auto& s : o.sub) s = rwf(s);
        return o;
      };
      q.lhs = rwf(q.lhs);
      q.rhs = rwf(q.rhs);
      q.ctx.emplace_back(v, env.decls.at(c).codomain);
      hyps.push_back(Formula::rel(c, {Term::mkvar(v)}));
    }
    if (!hyps.empty()) {
      std::vector<Formula> cs = hyps;
      if (q.lhs.kind == FKind::And) {
        for (const auto& g : q.lhs.sub) cs.push_back(g);
      } else if (q.lhs.kind != FKind::Truth) {
        cs.push_back(q.lhs);
      }
      q.lhs = Formula::conj(cs);
    }
    out.delta_axioms.push_back(q);
  }
  out.delta_schemas = ext.delta_schemas;
  return out;
}

Formula desugar_formula_against(const Formula& f, const TheoryExtension& ext) {
  DesugarEnv env;
  env.decls = ext.delta_functions;
  for (const auto& [fn, d] : ext.delta_functions)
    (d.domain.empty() ? env.delta_constants : env.delta_funs).insert(fn);
  std::set<Name> used = free_vars(f);
  env.used_names = &used;
  Formula out = desugar_formula_funs(f, env);
  return desugar_constants_existential(out, env);
}

// ---------------------------------------------------------------------------
// Conditional extensions

TheoryExtension conditional(const TheoryExtension& ext, const Formula& phi) {
  if (!ext.delta_functions.empty())
    throw PreconditionError("conditional: extension has function symbols; desugar_functions first");
  if (!is_closed(phi)) throw PreconditionError("conditional: phi must be closed");

  TheoryExtension out;
  // The base of E/phi is T itself; accept E given over T + phi or over T.
  out.base = ext.base;
  {
    // If phi is literally an axiom of the base, strip it (E over T + phi).
    Theory stripped = ext.base;
    Sequent phi_ax{{}, Formula::truth(), normalize_formula(phi)};
    auto& axs = stripped.axioms;
    for (auto it = axs.begin(); it != axs.end(); ++it) {
      if (normalize_sequent(*it, stripped.sig) == normalize_sequent(phi_ax, stripped.sig)) {
        axs.erase(it);
        out.base = stripped;
        break;
      }
    }
  }
  out.delta_sorts = ext.delta_sorts;
  out.delta_relations = ext.delta_relations;
  out.obligations = ext.obligations;

  for (const auto& s : ext.delta_sorts) {
    Sequent g;
    g.ctx.emplace_back("x", s);
    g.lhs = Formula::truth();
    g.rhs = phi;
    out.delta_axioms.push_back(g);
  }
  for (const auto& [r, ar] : ext.delta_relations) {
    Sequent g;
    std::vector<Term> xs;
    for (size_t i = 0; i < ar.size(); i++) {
      Name x = "x" + std::to_string(i + 1);
      g.ctx.emplace_back(x, ar[i]);
      xs.push_back(Term::mkvar(x));
    }
    g.lhs = Formula::rel(r, xs);
    g.rhs = phi;
    out.delta_axioms.push_back(g);
  }
  for (const auto& a : ext.delta_axioms) {
    Sequent q = a;
    std::vector<Formula> cs;
    if (q.lhs.kind == FKind::And)
      cs = q.lhs.sub;
    else if (q.lhs.kind != FKind::Truth)
      cs = {q.lhs};
    cs.push_back(phi);
    q.lhs = Formula::conj(cs);
    out.delta_axioms.push_back(q);
  }
  if (!ext.delta_schemas.empty())
    throw PreconditionError("conditional: schematic axiom families cannot be conditioned directly; "
                            "expand them first");
  return out;
}

// ---------------------------------------------------------------------------
// Systems

SimplexPoset SimplexPoset::of(const std::vector<Name>& idx) {
  SimplexPoset p;
  p.base_index = idx;
  size_t n = idx.size();
  for (size_t mask = 1; mask < (size_t(1) << n); mask++) {
    std::vector<size_t> s;
    for (size_t i = 0; i < n; i++)
      if (mask & (size_t(1) << i)) s.push_back(i);
    p.subsets.push_back(s);
  }
  // Order by size then lexicographically: all singletons first.
  std::sort(p.subsets.begin(), p.subsets.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return p;
}

bool SimplexPoset::leq(size_t a, size_t b) const {
  const auto& A = subsets[a];
  const auto& B = subsets[b];
  return std::includes(B.begin(), B.end(), A.begin(), A.end());
}

namespace {

bool is_conjunct_of(const Formula& small, const Formula& big) {
  Formula ns = normalize_formula(small), nb = normalize_formula(big);
  if (ns == nb) return true;
  if (ns.kind == FKind::Truth) return true;
  if (nb.kind != FKind::And) return false;
  std::vector<Formula> need;
  if (ns.kind == FKind::And)
    need = ns.sub;
  else
    need = {ns};
  for (const auto& c : need) {
    bool found = false;
    for (const auto& d : nb.sub)
      if (c == d) found = true;
    if (!found) return false;
  }
  return true;
}

std::vector<size_t> topological_order(const ExtensionSystem& sys) {
  size_t n = sys.index.size();
  std::vector<size_t> order;
  std::vector<bool> placed(n, false);
  for (size_t round = 0; round < n; round++) {
    for (size_t i = 0; i < n; i++) {
      if (placed[i]) continue;
      bool ready = true;
      for (size_t j = 0; j < n; j++)
        if (j != i && !placed[j] && sys.leq[j][i]) ready = false;
      if (ready) {
        placed[i] = true;
        order.push_back(i);
        break;
      }
    }
  }
  if (order.size() != n) throw PreconditionError("system poset has a cycle");
  return order;
}

}  // namespace

ExtensionSystem conditional_system(const ExtensionSystem& system, const std::map<Name, Formula>& phis,
                                   bool assume_entailment) {
  size_t n = system.index.size();
  for (size_t i = 0; i < n; i++) {
    for (size_t j = 0; j < n; j++) {
      if (i == j || !system.leq[j][i]) continue;
      const Formula& pi = phis.at(system.index[i]);
      const Formula& pj = phis.at(system.index[j]);
      if (!assume_entailment && !is_conjunct_of(pj, pi))
        throw PreconditionError("conditional_system: phi_" + system.index[j] +
                                " is not a conjunct of phi_" + system.index[i] +
                                " (pass assume_entailment to override)");
    }
  }
  ExtensionSystem out;
  out.base = system.base;
  out.index = system.index;
  out.leq = system.leq;
  // Rebase sequentially: E_i/phi_i lives over T + sum_{j<i} E_j/phi_j.
  std::vector<size_t> order = topological_order(system);
  std::map<Name, TheoryExtension> done;
  for (size_t k = 0; k < order.size(); k++) {
    size_t i = order[k];
    const Name& name = system.index[i];
    TheoryExtension cond = conditional(system.assignment.at(name), phis.at(name));
    // Rebase onto the accumulated conditional base (smaller indices only).
    Theory acc = system.base;
    for (size_t l = 0; l < k; l++) {
      size_t j = order[l];
      if (!system.leq[j][i] || j == i) continue;
      TheoryExtension ej = done.at(system.index[j]);
      ej.base = acc;
      acc = apply_extension_raw(acc, ej);
    }
    cond.base = acc;
    done[name] = cond;
    out.assignment[name] = cond;
  }
  return out;
}

Theory fold_system(const ExtensionSystem& system) {
  std::vector<size_t> order = topological_order(system);
  Theory acc = system.base;
  for (size_t i : order) {
    TheoryExtension e = system.assignment.at(system.index[i]);
    e.base = acc;
    acc = apply_extension_raw(acc, e);
  }
  return normalize(acc);
}

// ---------------------------------------------------------------------------
// Extension by definitions and materialization

TheoryExtension extension_by_definitions(const Theory& base, const std::map<Name, RelDef>& rel_defs,
                                         const std::map<Name, FunDef>& fun_defs) {
  TheoryExtension out;
  out.base = base;
  for (const auto& [r, def] : rel_defs) {
    auto diags = check_formula(def.phi, def.ctx, base.sig, "def." + r);
    if (!diags.empty()) throw PreconditionError("extension_by_definitions: " + diags[0].message);
    std::vector<Name> ar;
    std::vector<Term> xs;
    for (const auto& [v, s] : def.ctx) {
      ar.push_back(s);
      xs.push_back(Term::mkvar(v));
    }
    out.delta_relations[r] = ar;
    Sequent fwd{def.ctx, Formula::rel(r, xs), def.phi};
    Sequent bwd{def.ctx, def.phi, Formula::rel(r, xs)};
    out.delta_axioms.push_back(fwd);
    out.delta_axioms.push_back(bwd);
  }
  for (const auto& [f, def] : fun_defs) {
    if (def.ctx.empty()) throw PreconditionError("fun def context must end with the codomain variable");
    auto diags = check_formula(def.psi, def.ctx, base.sig, "def." + f);
    if (!diags.empty()) throw PreconditionError("extension_by_definitions: " + diags[0].message);
    std::vector<Name> dom;
    std::vector<Term> ys;
    for (size_t i = 0; i + 1 < def.ctx.size(); i++) {
      dom.push_back(def.ctx[i].second);
      ys.push_back(Term::mkvar(def.ctx[i].first));
    }
    const auto& [zvar, zsort] = def.ctx.back();
    out.delta_functions[f] = FunDecl{dom, zsort};
    Formula app_eq = Formula::eq(Term::app(f, ys), Term::mkvar(zvar));
    out.delta_axioms.push_back({def.ctx, app_eq, def.psi});
    out.delta_axioms.push_back({def.ctx, def.psi, app_eq});
    // Obligations: psi is provably functional (total and single-valued).
    std::set<Name> used;
    for (const auto& [v, s] : def.ctx) used.insert(v);
    Sequent total;
    for (size_t i = 0; i + 1 < def.ctx.size(); i++) total.ctx.push_back(def.ctx[i]);
    total.lhs = Formula::truth();
    total.rhs = Formula::exists(zvar, zsort, def.psi);
    out.obligations.push_back(total);
    Name z2 = fresh_name(zvar, used);
    Sequent single;
    single.ctx = def.ctx;
    single.ctx.emplace_back(z2, zsort);
    std::map<Name, Term> ren{{zvar, Term::mkvar(z2)}};
    single.lhs = Formula::conj({def.psi, substitute(def.psi, ren)});
    single.rhs = Formula::eq(Term::mkvar(zvar), Term::mkvar(z2));
    out.obligations.push_back(single);
  }
  return out;
}

TheoryExtension materialize_subobject(const Theory& base, const Name& sort, const Name& var,
                                      const Formula& phi, const Name& new_sort,
                                      const Name& embedding) {
  Context ctx{{var, sort}};
  auto diags = check_formula(phi, ctx, base.sig, "materialize");
  if (!diags.empty()) throw PreconditionError("materialize_subobject: " + diags[0].message);
  TheoryExtension out;
  out.base = base;
  out.delta_sorts.insert(new_sort);
  out.delta_functions[embedding] = FunDecl{{new_sort}, sort};
  // iota injective
  Sequent inj;
  inj.ctx = {{"x", new_sort}, {"y", new_sort}};
  inj.lhs = Formula::eq(Term::app(embedding, {Term::mkvar("x")}), Term::app(embedding, {Term::mkvar("y")}));
  inj.rhs = Formula::eq(Term::mkvar("x"), Term::mkvar("y"));
  out.delta_axioms.push_back(inj);
  // (ex x. iota(x) = y) -||- phi(y)
  Formula img = Formula::exists("x", new_sort,
                                Formula::eq(Term::app(embedding, {Term::mkvar("x")}), Term::mkvar("y")));
  std::map<Name, Term> bind{{var, Term::mkvar("y")}};
  Formula phi_y = substitute(phi, bind);
  out.delta_axioms.push_back({{{"y", sort}}, img, phi_y});
  out.delta_axioms.push_back({{{"y", sort}}, phi_y, img});
  return out;
}

TheoryExtension materialize_quotient(const Theory& base, const Name& sort, const Name& var1,
                                     const Name& var2, const Formula& equiv, const Name& new_sort,
                                     const Name& projection) {
  Context ctx{{var1, sort}, {var2, sort}};
  auto diags = check_formula(equiv, ctx, base.sig, "materialize");
  if (!diags.empty()) throw PreconditionError("materialize_quotient: " + diags[0].message);
  TheoryExtension out;
  out.base = base;
  out.delta_sorts.insert(new_sort);
  out.delta_functions[projection] = FunDecl{{sort}, new_sort};
  // surjectivity
  Sequent surj;
  surj.ctx = {{"y", new_sort}};
  surj.lhs = Formula::truth();
  surj.rhs = Formula::exists("x", sort,
                             Formula::eq(Term::app(projection, {Term::mkvar("x")}), Term::mkvar("y")));
  out.delta_axioms.push_back(surj);
  // pi(x) = pi(x') -||- x ~ x'
  Formula pi_eq = Formula::eq(Term::app(projection, {Term::mkvar(var1)}),
                              Term::app(projection, {Term::mkvar(var2)}));
  out.delta_axioms.push_back({ctx, pi_eq, equiv});
  out.delta_axioms.push_back({ctx, equiv, pi_eq});
  // Obligations: ~ is an equivalence relation.
  std::map<Name, Term> refl{{var2, Term::mkvar(var1)}};
  out.obligations.push_back({{{var1, sort}}, Formula::truth(), substitute(equiv, refl)});
  std::map<Name, Term> swap{{var1, Term::mkvar(var2)}, {var2, Term::mkvar(var1)}};
  out.obligations.push_back({ctx, equiv, substitute(equiv, swap)});
  std::set<Name> used{var1, var2};
  Name v3 = fresh_name(var2, used);
  std::map<Name, Term> s23{{var1, Term::mkvar(var2)}, {var2, Term::mkvar(v3)}};
  std::map<Name, Term> s13{{var2, Term::mkvar(v3)}};
  Context ctx3 = ctx;
  ctx3.emplace_back(v3, sort);
  out.obligations.push_back(
      {ctx3, Formula::conj({equiv, substitute(equiv, s23)}), substitute(equiv, s13)});
  return out;
}

}  // namespace geoth
