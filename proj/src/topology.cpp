#include "geoth/topology.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "geoth/parallel.hpp"

namespace geoth {

// ---------------------------------------------------------------------------
// Homs between one-point models

bool is_model_hom(const PresheafModel& from, const PresheafModel& to, const Hom& h) {
  for (const auto& [f, d] : from.sig.functions) {
    std::vector<std::vector<size_t>> tuples;
    std::vector<size_t> cur(d.domain.size(), 0);
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == d.domain.size()) {
        tuples.push_back(cur);
        return;
      }
      for (size_t e = 0; e < from.sort_size(d.domain[i], 0); e++) {
        cur[i] = e;
        rec(i + 1);
      }
    };
    rec(0);
    for (const auto& args : tuples) {
      std::vector<size_t> img(args.size());
      for (size_t i = 0; i < args.size(); i++) img[i] = h.per_sort.at(d.domain[i])[args[i]];
      size_t lhs = h.per_sort.at(d.codomain)[from.apply_fun(f, 0, args)];
      size_t rhs = to.apply_fun(f, 0, img);
      if (lhs != rhs) return false;
    }
  }
  for (const auto& [r, ar] : from.sig.relations) {
    for (const auto& t : from.rels.at(r).at(0)) {
      std::vector<size_t> img(t.size());
      for (size_t i = 0; i < t.size(); i++) img[i] = h.per_sort.at(ar[i])[t[i]];
      if (!to.rels.at(r).at(0).count(img)) return false;
    }
  }
  return true;
}

std::vector<Hom> enumerate_homs(const PresheafModel& from, const PresheafModel& to) {
  std::vector<Name> sorts(from.sig.sorts.begin(), from.sig.sorts.end());
  std::vector<Hom> out;
  Hom cur;
  // backtracking per sort; constraint check at the end (sizes are tiny)
  std::function<void(size_t)> rec = [&](size_t si) {
    if (si == sorts.size()) {
      if (is_model_hom(from, to, cur)) out.push_back(cur);
      return;
    }
    const Name& s = sorts[si];
    size_t n = from.sort_size(s, 0), m = to.sort_size(s, 0);
    std::vector<size_t> map(n, 0);
    if (n > 0 && m == 0) return;
    std::function<void(size_t)> rec_e = [&](size_t e) {
      if (e == n) {
        cur.per_sort[s] = map;
        rec(si + 1);
        cur.per_sort.erase(s);
        return;
      }
      for (size_t v = 0; v < m; v++) {
        map[e] = v;
        rec_e(e + 1);
      }
    };
    rec_e(0);
  };
  rec(0);
  return out;
}

Hom identity_hom(const PresheafModel& M) {
  Hom h;
  for (const auto& s : M.sig.sorts) {
    std::vector<size_t> id(M.sort_size(s, 0));
    for (size_t i = 0; i < id.size(); i++) id[i] = i;
    h.per_sort[s] = id;
  }
  return h;
}

Hom compose(const PresheafModel& a, const Hom& f, const Hom& g) {
  Hom out;
  for (const auto& [s, fm] : f.per_sort) {
    std::vector<size_t> c(fm.size());
    for (size_t i = 0; i < fm.size(); i++) c[i] = g.per_sort.at(s)[fm[i]];
    out.per_sort[s] = c;
  }
  (void)a;
  return out;
}

// ---------------------------------------------------------------------------
// Built-in families

namespace {

Signature fun_theory_sig() {
  Signature s;
  s.sorts = {"A", "B"};
  s.functions["f"] = FunDecl{{"A"}, "B"};
  return s;
}

PresheafModel one_point_model(const Signature& sig, const std::map<Name, size_t>& sizes) {
  PresheafModel M;
  M.sig = sig;
  M.poset = FinitePoset::single();
  for (const auto& s : sig.sorts) {
    SortTable t;
    t.size = {sizes.at(s)};
    t.elem_names.resize(1);
    M.sorts[s] = t;
  }
  for (const auto& [r, ar] : sig.relations) M.rels[r][0] = {};
  return M;
}

// Generic one-point iso check over all sorts (relations and functions).
bool set_models_isomorphic(const PresheafModel& A, const PresheafModel& B) {
  std::vector<Name> sorts(A.sig.sorts.begin(), A.sig.sorts.end());
  for (const auto& s : sorts)
    if (A.sort_size(s, 0) != B.sort_size(s, 0)) return false;
  Hom cur;
  std::function<bool(size_t)> rec = [&](size_t si) -> bool {
    if (si == sorts.size()) {
      if (!is_model_hom(A, B, cur)) return false;
      // relations must match exactly (bijective hom with preserved relation
      // sizes is an isomorphism here)
      for (const auto& [r, ar] : A.sig.relations)
        if (A.rels.at(r).at(0).size() != B.rels.at(r).at(0).size()) return false;
      return true;
    }
    const Name& s = sorts[si];
    size_t n = A.sort_size(s, 0);
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; i++) perm[i] = i;
    do {
      cur.per_sort[s] = perm;
      if (rec(si + 1)) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    cur.per_sort.erase(s);
    return false;
  };
  return rec(0);
}

// The surjectivity axiom over the f : A -> B signature.
Sequent surj_like_axiom() {
  Sequent q;
  q.ctx = {{"y", "B"}};
  q.lhs = Formula::truth();
  q.rhs =
      Formula::exists("x", "A", Formula::eq(Term::app("f", {Term::mkvar("x")}), Term::mkvar("y")));
  return q;
}

std::vector<PresheafModel> dedupe_models(std::vector<PresheafModel> ms) {
  std::vector<PresheafModel> reps;
  for (auto& m : ms) {
    bool dup = false;
    for (const auto& r : reps)
      if (set_models_isomorphic(r, m)) {
        dup = true;
        break;
      }
    if (!dup) reps.push_back(std::move(m));
  }
  return reps;
}

}  // namespace

ModelFamilyPlugin surjective_function_family() {
  ModelFamilyPlugin p;
  p.name = "surjective-function";
  p.base.sig = fun_theory_sig();
  p.quotient_axioms.push_back(surj_like_axiom());
  p.enumerate_models = [](size_t bound) {
    std::vector<PresheafModel> out;
    Signature sig = fun_theory_sig();
    for (size_t a = 0; a <= bound; a++) {
      for (size_t b = 0; b <= bound; b++) {
        if (a > 0 && b == 0) continue;
        // all f tables
        std::vector<size_t> table(a, 0);
        std::function<void(size_t)> rec = [&](size_t i) {
          if (i == a) {
            PresheafModel M = one_point_model(sig, {{"A", a}, {"B", b}});
            M.funs["f"][0] = table;
            out.push_back(M);
            return;
          }
          for (size_t v = 0; v < b; v++) {
            table[i] = v;
            rec(i + 1);
          }
        };
        if (a == 0) {
          PresheafModel M = one_point_model(sig, {{"A", a}, {"B", b}});
          M.funs["f"][0] = {};
          out.push_back(M);
        } else {
          rec(0);
        }
      }
    }
    return dedupe_models(std::move(out));
  };
  p.universal_op = [](const PresheafModel& M, size_t axiom_idx,
                      const std::vector<size_t>& xbar) -> std::optional<std::vector<Arrow>> {
    if (axiom_idx != 0 || xbar.size() != 1) return std::nullopt;
    size_t y = xbar[0];
    // freely add a preimage x of y
    PresheafModel M2 = M;
    size_t a = M.sort_size("A", 0);
    M2.sorts["A"].size[0] = a + 1;
    M2.funs["f"][0].push_back(y);
    Hom h = identity_hom(M);
    Arrow ar{h, M2};
    return std::vector<Arrow>{ar};
  };
  return p;
}

ModelFamilyPlugin pointed_set_family() {
  ModelFamilyPlugin p;
  p.name = "pointed-set";
  p.base.sig.sorts = {"A"};
  p.base.sig.functions["c"] = FunDecl{{}, "A"};
  Sequent collapse;
  collapse.ctx = {{"x", "A"}};
  collapse.lhs = Formula::truth();
  collapse.rhs = Formula::eq(Term::mkvar("x"), Term::app("c"));
  p.quotient_axioms.push_back(collapse);
  Signature sig = p.base.sig;
  p.enumerate_models = [sig](size_t bound) {
    std::vector<PresheafModel> out;
    for (size_t a = 1; a <= bound; a++) {
      PresheafModel M = one_point_model(sig, {{"A", a}});
      M.funs["c"][0] = {0};
      out.push_back(M);
    }
    return out;  // already canonical: the point is element 0
  };
  p.universal_op = [sig](const PresheafModel& M, size_t axiom_idx,
                         const std::vector<size_t>& xbar) -> std::optional<std::vector<Arrow>> {
    if (axiom_idx != 0 || xbar.size() != 1) return std::nullopt;
    size_t x = xbar[0];
    size_t c = M.funs.at("c").at(0).at(0);
    if (x == c) return std::vector<Arrow>{};  // cannot happen for a failing instance
    size_t a = M.sort_size("A", 0);
    PresheafModel M2 = one_point_model(sig, {{"A", a - 1}});
    // merge x into c: renumber, mapping x -> c
    std::vector<size_t> h(a);
    size_t next = 0;
    std::vector<long> newidx(a, -1);
    for (size_t e = 0; e < a; e++) {
      if (e == x) continue;
      newidx[e] = static_cast<long>(next++);
    }
    for (size_t e = 0; e < a; e++) h[e] = static_cast<size_t>(e == x ? newidx[c] : newidx[e]);
    M2.funs["c"][0] = {h[c]};
    Hom hom;
    hom.per_sort["A"] = h;
    return std::vector<Arrow>{Arrow{hom, M2}};
  };
  return p;
}

ModelFamilyPlugin truncated_chain_family(bool even_axioms, bool odd_axioms) {
  ModelFamilyPlugin p;
  p.name = "truncated-chain";
  Signature sig;
  sig.sorts = {"A0", "A1", "A2", "A3"};
  // f_n : A_{n+1 mod 4} -> A_n; the periodic truncation of the left-infinite
  // chain identifies A_{n+4} with A_n.
  sig.functions["f0"] = FunDecl{{"A1"}, "A0"};
  sig.functions["f1"] = FunDecl{{"A2"}, "A1"};
  sig.functions["f2"] = FunDecl{{"A3"}, "A2"};
  sig.functions["f3"] = FunDecl{{"A0"}, "A3"};
  p.base.sig = sig;
  auto surj_ax = [](const Name& f, const Name& dom, const Name& cod) {
    Sequent q;
    q.ctx = {{"y", cod}};
    q.lhs = Formula::truth();
    q.rhs = Formula::exists("x", dom,
                            Formula::eq(Term::app(f, {Term::mkvar("x")}), Term::mkvar("y")));
    return q;
  };
  if (even_axioms) {
    p.quotient_axioms.push_back(surj_ax("f0", "A1", "A0"));
    p.quotient_axioms.push_back(surj_ax("f2", "A3", "A2"));
  }
  if (odd_axioms) {
    p.quotient_axioms.push_back(surj_ax("f1", "A2", "A1"));
    p.quotient_axioms.push_back(surj_ax("f3", "A0", "A3"));
  }
  p.enumerate_models = [sig](size_t bound) {
    std::vector<PresheafModel> out;
    std::vector<Name> sorts{"A0", "A1", "A2", "A3"};
    std::map<Name, size_t> sizes;
    std::function<void(size_t)> rec_sizes = [&](size_t i) {
      if (i == sorts.size()) {
        // enumerate tables
        std::vector<std::pair<Name, FunDecl>> fs(sig.functions.begin(), sig.functions.end());
        PresheafModel M = one_point_model(sig, sizes);
        std::function<void(size_t)> rec_f = [&](size_t fi) {
          if (fi == fs.size()) {
            out.push_back(M);
            return;
          }
          const auto& [f, d] = fs[fi];
          size_t dom = sizes.at(d.domain[0]);
          size_t cod = sizes.at(d.codomain);
          if (dom > 0 && cod == 0) return;
          std::vector<size_t> table(dom, 0);
          std::function<void(size_t)> rec_e = [&](size_t e) {
            if (e == dom) {
              M.funs[f][0] = table;
              rec_f(fi + 1);
              return;
            }
            for (size_t v = 0; v < cod; v++) {
              table[e] = v;
              rec_e(e + 1);
            }
          };
          if (dom == 0) {
            M.funs[f][0] = {};
            rec_f(fi + 1);
          } else {
            rec_e(0);
          }
        };
        rec_f(0);
        return;
      }
      for (size_t s = 0; s <= bound; s++) {
        sizes[sorts[i]] = s;
        rec_sizes(i + 1);
      }
    };
    rec_sizes(0);
    return dedupe_models(std::move(out));
  };
  p.universal_op = [p_axioms = p.quotient_axioms, sig](
                       const PresheafModel& M, size_t axiom_idx,
                       const std::vector<size_t>& xbar) -> std::optional<std::vector<Arrow>> {
    if (xbar.size() != 1) return std::nullopt;
    const Sequent& ax = p_axioms.at(axiom_idx);
    // identify the function from the axiom's consequent
    const Formula& ex = ax.rhs;
    if (ex.kind != FKind::Exists) return std::nullopt;
    const Name f = ex.sub[0].terms[0].var ? ex.sub[0].terms[1].head : ex.sub[0].terms[0].head;
    const FunDecl& d = sig.functions.at(f);
    PresheafModel M2 = M;
    M2.sorts[d.domain[0]].size[0] += 1;
    M2.funs[f][0].push_back(xbar[0]);
    // the fresh element needs an image under the function whose domain sort
    // gained it only if that is the same sort; in the cyclic chain each sort
    // is the domain of exactly one function, namely f itself
    Hom h = identity_hom(M);
    return std::vector<Arrow>{Arrow{h, M2}};
  };
  return p;
}

// ---------------------------------------------------------------------------
// Cosieves

bool Cosieve::member(const PresheafModel& target, const Hom& h) const {
  if (maximal) return true;
  for (const auto& g : generators) {
    for (const auto& r : enumerate_homs(g.codomain, target)) {
      if (compose(root, g.hom, r) == h) return true;
    }
  }
  return false;
}

std::vector<std::vector<size_t>> failing_instances(const PresheafModel& M, const Sequent& axiom) {
  std::vector<std::vector<size_t>> out;
  Subfunctor phi = interpret(M, axiom.ctx, axiom.lhs);
  Subfunctor psi = interpret(M, axiom.ctx, axiom.rhs);
  for (const auto& t : phi.at.at(0))
    if (!psi.at.at(0).count(t)) out.push_back(t);
  std::sort(out.begin(), out.end());
  return out;
}

Cosieve cosieve_generators(const ModelFamilyPlugin& plugin, const PresheafModel& M,
                           size_t axiom_idx, const std::vector<size_t>& xbar, size_t verify_bound) {
  const Sequent& ax = plugin.quotient_axioms.at(axiom_idx);
  Subfunctor phi = interpret(M, ax.ctx, ax.lhs);
  if (!phi.at.at(0).count(xbar))
    throw PreconditionError("cosieve_generators: instance not in [[phi]]");
  Cosieve c;
  c.root = M;
  Subfunctor psi = interpret(M, ax.ctx, ax.rhs);
  if (psi.at.at(0).count(xbar)) {
    c.maximal = true;
    c.generators.push_back(Arrow{identity_hom(M), M});
    return c;
  }
  if (ax.rhs.kind == FKind::Falsity) {
    return c;  // empty cosieve
  }
  std::optional<std::vector<Arrow>> gens;
  if (plugin.universal_op) gens = plugin.universal_op(M, axiom_idx, xbar);
  if (gens) {
    c.generators = *gens;
    if (verify_bound > 0) {
      CosieveTable t = brute_force_cosieve(plugin, M, axiom_idx, xbar, verify_bound);
      if (!cosieve_matches_table(c, t))
        throw std::logic_error("universal operation disagrees with brute force");
    }
    return c;
  }
  // Brute force: minimal members within the bound generate.
  size_t bound = verify_bound > 0 ? verify_bound : M.max_sort_size() + 1;
  CosieveTable t = brute_force_cosieve(plugin, M, axiom_idx, xbar, bound);
  std::vector<Arrow> members;
  for (const auto& row : t.rows)
    if (row.member) members.push_back(Arrow{row.hom, t.codomains[row.codomain_index]});
  // g <= h iff h factors through g; keep the minimal ones
  auto factors_through = [&](const Arrow& h, const Arrow& g) {
    for (const auto& r : enumerate_homs(g.codomain, h.codomain))
      if (compose(M, g.hom, r) == h.hom) return true;
    return false;
  };
  std::vector<Arrow> mins;
  for (size_t i = 0; i < members.size(); i++) {
    bool minimal = true;
    for (size_t j = 0; j < members.size() && minimal; j++) {
      if (i == j) continue;
      if (factors_through(members[i], members[j]) && !factors_through(members[j], members[i]))
        minimal = false;
    }
    if (minimal) {
      // avoid redundant generators that factor through an already kept one
      bool redundant = false;
      for (const auto& kept : mins)
        if (factors_through(members[i], kept)) redundant = true;
      if (!redundant) mins.push_back(members[i]);
    }
  }
  c.generators = mins;
  return c;
}

CosieveTable brute_force_cosieve(const ModelFamilyPlugin& plugin, const PresheafModel& M,
                                 size_t axiom_idx, const std::vector<size_t>& xbar,
                                 size_t size_bound) {
  const Sequent& ax = plugin.quotient_axioms.at(axiom_idx);
  CosieveTable t;
  t.codomains = plugin.enumerate_models(size_bound);
  for (size_t ci = 0; ci < t.codomains.size(); ci++) {
    const PresheafModel& M2 = t.codomains[ci];
    std::vector<Hom> homs = enumerate_homs(M, M2);
    for (const auto& h : homs) {
      // member iff h(xbar) in [[psi]]_{M2}
      std::vector<size_t> img(xbar.size());
      for (size_t i = 0; i < xbar.size(); i++) img[i] = h.per_sort.at(ax.ctx[i].second)[xbar[i]];
      Subfunctor psi = interpret(M2, ax.ctx, ax.rhs);
      t.rows.push_back({ci, h, psi.at.at(0).count(img) > 0});
    }
  }
  return t;
}

bool cosieve_matches_table(const Cosieve& c, const CosieveTable& t) {
  for (const auto& row : t.rows) {
    if (c.member(t.codomains[row.codomain_index], row.hom) != row.member) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Rigidity

std::string render_set_model(const PresheafModel& M) {
  std::ostringstream os;
  bool first = true;
  for (const auto& s : M.sig.sorts) {
    if (!first) os << " ";
    first = false;
    os << s << ":" << M.sort_size(s, 0);
  }
  for (const auto& [f, tab] : M.funs) {
    os << " " << f << "=[";
    for (size_t i = 0; i < tab.at(0).size(); i++) {
      if (i) os << ",";
      os << tab.at(0)[i];
    }
    os << "]";
  }
  for (const auto& [r, tab] : M.rels) {
    os << " " << r << "={";
    bool f2 = true;
    for (const auto& tp : tab.at(0)) {
      if (!f2) os << ",";
      f2 = false;
      os << "(";
      for (size_t i = 0; i < tp.size(); i++) {
        if (i) os << ",";
        os << tp[i];
      }
      os << ")";
    }
    os << "}";
  }
  return os.str();
}

CoveringTrace rigidity_run(const ModelFamilyPlugin& plugin, const PresheafModel& M, size_t fuel,
                           size_t verify_bound) {
  CoveringTrace tr;
  struct Item {
    PresheafModel m;
    size_t node;
    size_t depth;
  };
  tr.nodes.push_back({render_set_model(M), -1, {}, {}, false});
  std::vector<Item> work{{M, 0, 0}};
  bool exhausted = false;
  while (!work.empty()) {
    Item it = work.back();
    work.pop_back();
    // least failing axiom instance
    int ax_idx = -1;
    std::vector<size_t> inst;
    for (size_t a = 0; a < plugin.quotient_axioms.size(); a++) {
      auto fails = failing_instances(it.m, plugin.quotient_axioms[a]);
      if (!fails.empty()) {
        ax_idx = static_cast<int>(a);
        inst = fails.front();
        break;
      }
    }
    if (ax_idx < 0) continue;  // leaf: satisfies all axioms
    if (it.depth >= fuel) {
      exhausted = true;
      continue;
    }
    Cosieve c = cosieve_generators(plugin, it.m, static_cast<size_t>(ax_idx), inst, verify_bound);
    tr.nodes[it.node].axiom = ax_idx;
    tr.nodes[it.node].instance = inst;
    if (!c.maximal && c.generators.empty()) {
      tr.nodes[it.node].closed_by_empty_cosieve = true;
      continue;  // empty cosieve covers the branch trivially
    }
    for (const auto& g : c.generators) {
      size_t child = tr.nodes.size();
      tr.nodes.push_back({render_set_model(g.codomain), -1, {}, {}, false});
      tr.nodes[it.node].children.push_back(child);
      work.push_back({g.codomain, child, it.depth + 1});
    }
  }
  tr.fuel_exhausted = exhausted;
  tr.success = !exhausted;
  return tr;
}

std::string CoveringTrace::render() const {
  std::ostringstream os;
  std::function<void(size_t, size_t)> rec = [&](size_t n, size_t indent) {
    for (size_t i = 0; i < indent; i++) os << "  ";
    const Node& node = nodes[n];
    os << node.model;
    if (node.axiom >= 0) {
      os << "  [axiom " << node.axiom << " at (";
      for (size_t i = 0; i < node.instance.size(); i++) {
        if (i) os << ",";
        os << node.instance[i];
      }
      os << ")";
      if (node.closed_by_empty_cosieve) os << "; empty cosieve";
      os << "]";
    } else {
      os << "  [leaf]";
    }
    os << "\n";
    for (size_t c : node.children) rec(c, indent + 1);
  };
  if (!nodes.empty()) rec(0, 0);
  os << (fuel_exhausted ? "result: fuel-exhausted\n" : "result: covered\n");
  return os.str();
}

bool irreducible(const ModelFamilyPlugin& plugin, const PresheafModel& M) {
  Theory q;
  q.sig = plugin.base.sig;
  q.axioms = plugin.quotient_axioms;
  return check_theory(M, q, par::Mode::Serial).holds;
}

}  // namespace geoth
