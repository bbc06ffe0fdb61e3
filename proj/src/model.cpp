#include "geoth/model.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace geoth {

// ---------------------------------------------------------------------------
// FinitePoset

void FinitePoset::validate() const {
  size_t k = n();
  if (le.size() != k) throw PreconditionError("poset: relation size mismatch");
  for (const auto& row : le)
    if (row.size() != k) throw PreconditionError("poset: relation size mismatch");
  for (size_t p = 0; p < k; p++)
    if (!le[p][p]) throw PreconditionError("poset: not reflexive");
  for (size_t p = 0; p < k; p++)
    for (size_t q = 0; q < k; q++) {
      if (p != q && le[p][q] && le[q][p]) throw PreconditionError("poset: not antisymmetric");
      for (size_t r = 0; r < k; r++)
        if (le[p][q] && le[q][r] && !le[p][r]) throw PreconditionError("poset: not transitive");
    }
}

FinitePoset FinitePoset::single() { return chain(1); }

FinitePoset FinitePoset::chain(size_t k) {
  FinitePoset p;
  for (size_t i = 0; i < k; i++) p.points.push_back("p" + std::to_string(i));
  p.le.assign(k, std::vector<bool>(k, false));
  for (size_t i = 0; i < k; i++)
    for (size_t j = i; j < k; j++) p.le[i][j] = true;
  return p;
}

std::vector<std::pair<size_t, size_t>> FinitePoset::pairs_le() const {
  std::vector<std::pair<size_t, size_t>> out;
  for (size_t p = 0; p < n(); p++)
    for (size_t q = 0; q < n(); q++)
      if (p != q && le[p][q]) out.emplace_back(p, q);
  return out;
}

std::vector<std::pair<size_t, size_t>> FinitePoset::hasse_edges() const {
  std::vector<std::pair<size_t, size_t>> out;
  for (const auto& [p, q] : pairs_le()) {
    bool cover = true;
    for (size_t r = 0; r < n(); r++)
      if (r != p && r != q && le[p][r] && le[r][q]) cover = false;
    if (cover) out.emplace_back(p, q);
  }
  return out;
}

// ---------------------------------------------------------------------------
// PresheafModel

size_t PresheafModel::transport(const Name& sort, size_t p, size_t q, size_t e) const {
  if (p == q) return e;
  return sorts.at(sort).map.at({p, q}).at(e);
}

std::vector<size_t> PresheafModel::transport_tuple(const std::vector<Name>& sorts_of, size_t p,
                                                   size_t q, const std::vector<size_t>& tuple) const {
  std::vector<size_t> out(tuple.size());
  for (size_t i = 0; i < tuple.size(); i++) out[i] = transport(sorts_of[i], p, q, tuple[i]);
  return out;
}

size_t PresheafModel::apply_fun(const Name& f, size_t p, const std::vector<size_t>& args) const {
  const FunDecl& d = sig.functions.at(f);
  size_t rank = 0;
  for (size_t i = 0; i < args.size(); i++) rank = rank * sort_size(d.domain[i], p) + args[i];
  return funs.at(f).at(p).at(rank);
}

size_t PresheafModel::max_sort_size() const {
  size_t m = 1;
  for (const auto& [s, tbl] : sorts)
    for (size_t v : tbl.size) m = std::max(m, v);
  return m;
}

namespace {

std::vector<std::vector<size_t>> all_tuples(const PresheafModel& M, const std::vector<Name>& sorts_of,
                                            size_t p) {
  std::vector<std::vector<size_t>> out;
  std::vector<size_t> cur(sorts_of.size(), 0);
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == sorts_of.size()) {
      out.push_back(cur);
      return;
    }
    size_t k = M.sort_size(sorts_of[i], p);
    for (size_t e = 0; e < k; e++) {
      cur[i] = e;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

std::vector<Name> ctx_sorts(const Context& ctx) {
  std::vector<Name> out;
  for (const auto& [v, s] : ctx) out.push_back(s);
  return out;
}

}  // namespace

void PresheafModel::validate() const {
  poset.validate();
  size_t np = poset.n();
  for (const auto& s : sig.sorts) {
    auto it = sorts.find(s);
    if (it == sorts.end()) throw PreconditionError("model: missing sort table " + s);
    if (it->second.size.size() != np) throw PreconditionError("model: sort table size mismatch " + s);
    // functoriality: identity on p<=p implicit; composition law
    for (const auto& [p, q] : poset.pairs_le()) {
      const auto& m = it->second.map;
      auto mit = m.find({p, q});
      if (mit == m.end()) throw PreconditionError("model: missing transition map for " + s);
      if (mit->second.size() != it->second.size[p])
        throw PreconditionError("model: transition map domain mismatch for " + s);
      for (size_t e : mit->second)
        if (e >= it->second.size[q]) throw PreconditionError("model: transition map out of range");
    }
    for (const auto& [p, q] : poset.pairs_le())
      for (const auto& [q2, r] : poset.pairs_le()) {
        if (q2 != q || !poset.le[p][r] || p == r) continue;
        for (size_t e = 0; e < it->second.size[p]; e++) {
          if (transport(s, q, r, transport(s, p, q, e)) != transport(s, p, r, e))
            throw PreconditionError("model: transition maps do not compose for " + s);
        }
      }
  }
  for (const auto& [r, ar] : sig.relations) {
    auto it = rels.find(r);
    if (it == rels.end()) throw PreconditionError("model: missing relation table " + r);
    for (size_t p = 0; p < np; p++) {
      auto pit = it->second.find(p);
      if (pit == it->second.end()) throw PreconditionError("model: missing relation at point " + r);
      for (const auto& t : pit->second) {
        if (t.size() != ar.size()) throw PreconditionError("model: relation arity mismatch " + r);
        for (size_t i = 0; i < t.size(); i++)
          if (t[i] >= sort_size(ar[i], p)) throw PreconditionError("model: relation tuple range " + r);
        for (size_t q = 0; q < np; q++) {
          if (p == q || !poset.le[p][q]) continue;
          auto img = transport_tuple(ar, p, q, t);
          if (!it->second.at(q).count(img))
            throw PreconditionError("model: relation " + r + " not transition-stable");
        }
      }
    }
  }
  for (const auto& [f, d] : sig.functions) {
    auto it = funs.find(f);
    if (it == funs.end()) throw PreconditionError("model: missing function table " + f);
    for (size_t p = 0; p < np; p++) {
      size_t dom = 1;
      for (const auto& s : d.domain) dom *= sort_size(s, p);
      auto pit = it->second.find(p);
      if (pit == it->second.end() || pit->second.size() != dom)
        throw PreconditionError("model: function table size mismatch " + f);
      for (size_t v : pit->second)
        if (v >= sort_size(d.codomain, p)) throw PreconditionError("model: function value range " + f);
    }
    // naturality
    for (const auto& [p, q] : poset.pairs_le()) {
      for (const auto& args : all_tuples(*this, d.domain, p)) {
        size_t via_p = transport(d.codomain, p, q, apply_fun(f, p, args));
        size_t via_q = apply_fun(f, q, transport_tuple(d.domain, p, q, args));
        if (via_p != via_q) throw PreconditionError("model: function " + f + " not natural");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Interpretation

namespace {

size_t eval_term(const PresheafModel& M, size_t p, const Context& ctx,
                 const std::vector<size_t>& tuple, const Term& t) {
  if (t.var) {
    for (size_t i = 0; i < ctx.size(); i++)
      if (ctx[i].first == t.head) return tuple[i];
    throw PreconditionError("eval_term: unbound variable " + t.head);
  }
  std::vector<size_t> args;
  for (const auto& a : t.args) args.push_back(eval_term(M, p, ctx, tuple, a));
  return M.apply_fun(t.head, p, args);
}

bool holds_at(const PresheafModel& M, size_t p, const Context& ctx, const std::vector<size_t>& tuple,
              const Formula& phi) {
  switch (phi.kind) {
    case FKind::Truth:
      return true;
    case FKind::Falsity:
      return false;
    case FKind::RelAtom: {
      std::vector<size_t> args;
      for (const auto& t : phi.terms) args.push_back(eval_term(M, p, ctx, tuple, t));
      return M.rels.at(phi.name).at(p).count(args) > 0;
    }
    case FKind::Eq:
      return eval_term(M, p, ctx, tuple, phi.terms[0]) == eval_term(M, p, ctx, tuple, phi.terms[1]);
    case FKind::And:
      for (const auto& g : phi.sub)
        if (!holds_at(M, p, ctx, tuple, g)) return false;
      return true;
    case FKind::Or:
      for (const auto& g : phi.sub)
        if (holds_at(M, p, ctx, tuple, g)) return true;
      return false;
    case FKind::SchemaOr: {
      uint64_t B = phi.bound.eval(M.max_sort_size());
      for (uint64_t n = 0; n <= B; n++) {
        Formula inst = expand_schema_or(phi.name, phi.terms, n);
        if (holds_at(M, p, ctx, tuple, inst)) return true;
      }
      return false;
    }
    case FKind::Exists: {
      for (const auto& [v, s] : ctx)
        if (v == phi.name)
          throw PreconditionError("interpret: shadowed binder " + phi.name + "; normalize first");
      Context ext = ctx;
      ext.emplace_back(phi.name, phi.sort);
      std::vector<size_t> tup = tuple;
      tup.push_back(0);
      size_t k = M.sort_size(phi.sort, p);
      for (size_t e = 0; e < k; e++) {
        tup.back() = e;
        if (holds_at(M, p, ext, tup, phi.sub[0])) return true;
      }
      return false;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

Subfunctor interpret(const PresheafModel& M, const Context& ctx, const Formula& phi) {
  Subfunctor out;
  out.ctx = ctx;
  out.at.resize(M.poset.n());
  auto sorts_of = ctx_sorts(ctx);
  for (size_t p = 0; p < M.poset.n(); p++) {
    for (const auto& tup : all_tuples(M, sorts_of, p))
      if (holds_at(M, p, ctx, tup, phi)) out.at[p].insert(tup);
  }
  return out;
}

std::optional<Counterexample> check_sequent(const PresheafModel& M, const Sequent& seq) {
  auto sorts_of = ctx_sorts(seq.ctx);
  for (size_t p = 0; p < M.poset.n(); p++) {
    for (const auto& tup : all_tuples(M, sorts_of, p)) {
      if (holds_at(M, p, seq.ctx, tup, seq.lhs) && !holds_at(M, p, seq.ctx, tup, seq.rhs))
        return Counterexample{p, tup};
    }
  }
  return std::nullopt;
}

std::string Counterexample::render(const PresheafModel& M, const Context& ctx) const {
  std::ostringstream os;
  os << "at " << M.poset.points.at(point);
  for (size_t i = 0; i < tuple.size(); i++) {
    os << " " << ctx[i].first << "=" << M.sorts.at(ctx[i].second).name_of(point, tuple[i]);
  }
  return os.str();
}

std::optional<Counterexample> check_axiom_schema_generic(const PresheafModel& M,
                                                         const AxiomSchema& s) {
  uint64_t b = s.bound.eval(M.max_sort_size());
  for (uint64_t n = 0; n <= b; n++) {
    if (auto cex = check_sequent(M, expand_axiom_schema(s, n))) return cex;
  }
  return std::nullopt;
}

namespace {

// Locality over a ring model: the n-th instance quantifies over tuples of
// ring elements; regrouping coefficients collapses duplicates, so only
// distinct-element subsets matter, and the antecedent "some combination is
// one" is ideal membership of 1.
std::optional<Counterexample> check_loc_schema(const PresheafModel& M, const AxiomSchema& s) {
  const Name& A = s.args.at(0);
  uint64_t bound = s.bound.eval(M.max_sort_size());
  for (size_t p = 0; p < M.poset.n(); p++) {
    size_t m = M.sort_size(A, p);
    if (m == 0) continue;
    size_t one = M.apply_fun("one", p, {});
    size_t zero = M.apply_fun("zero", p, {});
    std::vector<bool> invertible(m, false);
    for (size_t x = 0; x < m; x++)
      for (size_t w = 0; w < m; w++)
        if (M.apply_fun("mul", p, {x, w}) == one) invertible[x] = true;
    if (m > 20) throw PreconditionError("loc check: sort too large");
    for (size_t mask = 0; mask < (size_t(1) << m); mask++) {
      std::vector<size_t> subset;
      for (size_t x = 0; x < m; x++)
        if (mask & (size_t(1) << x)) subset.push_back(x);
      if (subset.size() > bound) continue;
      bool some_inv = false;
      for (size_t x : subset)
        if (invertible[x]) some_inv = true;
      if (some_inv) continue;  // consequent holds
      // ideal closure of the subset
      std::set<size_t> ideal{zero};
      for (size_t x : subset) ideal.insert(x);
      bool grew = true;
      while (grew) {
        grew = false;
        std::vector<size_t> cur(ideal.begin(), ideal.end());
        for (size_t a : cur)
          for (size_t b2 : cur)
            if (ideal.insert(M.apply_fun("add", p, {a, b2})).second) grew = true;
        for (size_t a : cur)
          for (size_t lam = 0; lam < m; lam++)
            if (ideal.insert(M.apply_fun("mul", p, {lam, a})).second) grew = true;
      }
      if (ideal.count(one)) return Counterexample{p, subset};
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Counterexample> check_axiom_schema(const PresheafModel& M, const AxiomSchema& s) {
  if (s.family == "loc") return check_loc_schema(M, s);
  return check_axiom_schema_generic(M, s);
}

TheoryCheckResult check_theory(const PresheafModel& M, const Theory& T, par::Mode mode) {
  const std::vector<Sequent>& to_check = T.axioms;
  std::vector<std::optional<Counterexample>> results =
      par::map_index<std::optional<Counterexample>>(
          to_check.size(), [&](size_t i) { return check_sequent(M, to_check[i]); }, mode);
  for (size_t i = 0; i < to_check.size(); i++) {
    if (results[i]) {
      TheoryCheckResult r;
      r.holds = false;
      r.failing = to_check[i];
      r.axiom = sequent_key(to_check[i]);
      r.cex = results[i];
      return r;
    }
  }
  for (const auto& s : T.schemas) {
    if (auto cex = check_axiom_schema(M, s)) {
      TheoryCheckResult r;
      r.holds = false;
      r.failing = expand_axiom_schema(s, cex->tuple.size());
      r.axiom = "schema " + s.family + " instance " + std::to_string(cex->tuple.size());
      r.cex = cex;
      return r;
    }
  }
  return {};
}

UpSet up_set_of(const PresheafModel& M, const Formula& phi_closed) {
  if (!is_closed(phi_closed)) throw PreconditionError("up_set_of: formula not closed");
  Subfunctor s = interpret(M, {}, phi_closed);
  UpSet u;
  u.member.resize(M.poset.n());
  for (size_t p = 0; p < M.poset.n(); p++) u.member[p] = !s.at[p].empty();
  return u;
}

PresheafModel restrict_model(const PresheafModel& M, const UpSet& U) {
  // up-closedness check
  for (size_t p = 0; p < M.poset.n(); p++)
    for (size_t q = 0; q < M.poset.n(); q++)
      if (U.member[p] && M.poset.le[p][q] && !U.member[q])
        throw PreconditionError("restrict_model: subset is not up-closed");
  PresheafModel out;
  out.sig = M.sig;
  std::vector<size_t> keep;
  for (size_t p = 0; p < M.poset.n(); p++)
    if (U.member[p]) keep.push_back(p);
  std::map<size_t, size_t> idx;
  for (size_t i = 0; i < keep.size(); i++) idx[keep[i]] = i;
  out.poset.points.clear();
  for (size_t p : keep) out.poset.points.push_back(M.poset.points[p]);
  out.poset.le.assign(keep.size(), std::vector<bool>(keep.size(), false));
  for (size_t i = 0; i < keep.size(); i++)
    for (size_t j = 0; j < keep.size(); j++) out.poset.le[i][j] = M.poset.le[keep[i]][keep[j]];
  for (const auto& [s, tbl] : M.sorts) {
    SortTable t;
    for (size_t p : keep) {
      t.size.push_back(tbl.size[p]);
      t.elem_names.push_back(p < tbl.elem_names.size() ? tbl.elem_names[p] : std::vector<Name>{});
    }
    for (const auto& [pq, m] : tbl.map)
      if (idx.count(pq.first) && idx.count(pq.second)) t.map[{idx[pq.first], idx[pq.second]}] = m;
    out.sorts[s] = t;
  }
  for (const auto& [r, tab] : M.rels) {
    for (size_t p : keep) out.rels[r][idx[p]] = tab.at(p);
  }
  for (const auto& [f, tab] : M.funs) {
    for (size_t p : keep) out.funs[f][idx[p]] = tab.at(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Extension enumeration

namespace {

struct DeltaShape {
  std::vector<Name> sorts;  // delta sorts in canonical order
  std::vector<std::pair<Name, std::vector<Name>>> rels;
  std::vector<std::pair<Name, FunDecl>> funs;
};

DeltaShape shape_of(const TheoryExtension& E) {
  DeltaShape d;
  for (const auto& s : E.delta_sorts) d.sorts.push_back(s);
  for (const auto& [r, ar] : E.delta_relations) d.rels.emplace_back(r, ar);
  for (const auto& [f, fd] : E.delta_functions) d.funs.emplace_back(f, fd);
  return d;
}

// Enumerate all sort tables (sizes + functorial maps) for one delta sort.
std::vector<SortTable> enumerate_sort_tables(const FinitePoset& P, size_t bound) {
  std::vector<SortTable> out;
  size_t np = P.n();
  auto hasse = P.hasse_edges();
  std::vector<size_t> sizes(np, 0);
  std::function<void(size_t)> rec_sizes = [&](size_t i) {
    if (i == np) {
      // enumerate maps on Hasse edges, then complete by composition and
      // check path-independence
      std::vector<std::vector<size_t>> choices(hasse.size());
      std::function<void(size_t, std::map<std::pair<size_t, size_t>, std::vector<size_t>>&)>
          rec_maps = [&](size_t ei, std::map<std::pair<size_t, size_t>, std::vector<size_t>>& acc) {
            if (ei == hasse.size()) {
              // complete to all pairs by composing along Hasse paths
              SortTable t;
              t.size = sizes;
              t.elem_names.assign(np, {});
              std::map<std::pair<size_t, size_t>, std::vector<size_t>> full = acc;
              // Floyd-Warshall-ish completion
              bool ok = true;
              bool changed = true;
              while (changed && ok) {
                changed = false;
                for (const auto& [p, q] : P.pairs_le()) {
                  if (full.count({p, q})) continue;
                  // try to find r with p<r<=q, maps (p,r) and (r,q) known
                  for (size_t r = 0; r < np && !full.count({p, q}); r++) {
                    if (r == p || r == q || !P.le[p][r] || !P.le[r][q]) continue;
                    auto it1 = full.find({p, r});
                    auto it2 = full.find({r, q});
                    if (it1 == full.end() || it2 == full.end()) continue;
                    std::vector<size_t> comp(sizes[p]);
                    for (size_t e = 0; e < sizes[p]; e++) comp[e] = it2->second[it1->second[e]];
                    full[{p, q}] = comp;
                    changed = true;
                  }
                }
              }
              for (const auto& [p, q] : P.pairs_le())
                if (!full.count({p, q})) ok = false;
              if (ok) {
                // path independence: check all compositions agree
                for (const auto& [p, q] : P.pairs_le()) {
                  for (size_t r = 0; r < np; r++) {
                    if (r == p || r == q || !P.le[p][r] || !P.le[r][q]) continue;
                    for (size_t e = 0; e < sizes[p]; e++) {
                      if (full.at({r, q})[full.at({p, r})[e]] != full.at({p, q})[e]) ok = false;
                    }
                  }
                }
              }
              if (ok) {
                t.map = full;
                out.push_back(t);
              }
              return;
            }
            auto [p, q] = hasse[ei];
            std::vector<size_t> m(sizes[p], 0);
            if (sizes[p] == 0) {
              acc[{p, q}] = m;
              rec_maps(ei + 1, acc);
              acc.erase({p, q});
              return;
            }
            if (sizes[q] == 0) return;  // no map from nonempty to empty
            std::function<void(size_t)> rec_entry = [&](size_t j) {
              if (j == sizes[p]) {
                acc[{p, q}] = m;
                rec_maps(ei + 1, acc);
                acc.erase({p, q});
                return;
              }
              for (size_t v = 0; v < sizes[q]; v++) {
                m[j] = v;
                rec_entry(j + 1);
              }
            };
            rec_entry(0);
          };
      std::map<std::pair<size_t, size_t>, std::vector<size_t>> acc;
      rec_maps(0, acc);
      return;
    }
    for (size_t s = 0; s <= bound; s++) {
      sizes[i] = s;
      rec_sizes(i + 1);
    }
  };
  rec_sizes(0);
  return out;
}

// Enumerate transition-stable relation tables over the combined model.
void enumerate_relation_tables(const PresheafModel& M, const std::vector<Name>& arity,
                               const std::function<void(const std::map<size_t, std::set<std::vector<size_t>>>&)>& emit) {
  size_t np = M.poset.n();
  // linear extension: process points so that all predecessors come first
  std::vector<size_t> order;
  std::vector<bool> placed(np, false);
  for (size_t round = 0; round < np; round++) {
    for (size_t p = 0; p < np; p++) {
      if (placed[p]) continue;
      bool ready = true;
      for (size_t q = 0; q < np; q++)
        if (q != p && !placed[q] && M.poset.le[q][p]) ready = false;
      if (ready) {
        placed[p] = true;
        order.push_back(p);
        break;
      }
    }
  }
  std::map<size_t, std::set<std::vector<size_t>>> acc;
  std::function<void(size_t)> rec = [&](size_t oi) {
    if (oi == order.size()) {
      emit(acc);
      return;
    }
    size_t p = order[oi];
    auto tuples = all_tuples(M, arity, p);
    // forced members: images of accumulated members at earlier points
    std::set<std::vector<size_t>> forced;
    for (size_t q = 0; q < np; q++) {
      if (q == p || !M.poset.le[q][p] || !acc.count(q)) continue;
      for (const auto& t : acc.at(q)) forced.insert(M.transport_tuple(arity, q, p, t));
    }
    std::vector<std::vector<size_t>> optional_tuples;
    for (const auto& t : tuples)
      if (!forced.count(t)) optional_tuples.push_back(t);
    // enumerate subsets of the optional tuples
    size_t no = optional_tuples.size();
    if (no > 20) throw PreconditionError("enumerate_extensions: relation space too large");
    for (size_t mask = 0; mask < (size_t(1) << no); mask++) {
      std::set<std::vector<size_t>> cur = forced;
      for (size_t i = 0; i < no; i++)
        if (mask & (size_t(1) << i)) cur.insert(optional_tuples[i]);
      acc[p] = cur;
      rec(oi + 1);
    }
    acc.erase(p);
  };
  rec(0);
}

// Enumerate natural function tables over the combined model.
void enumerate_function_tables(const PresheafModel& M, const FunDecl& d,
                               const std::function<void(const std::map<size_t, std::vector<size_t>>&)>& emit) {
  size_t np = M.poset.n();
  std::vector<size_t> order;
  std::vector<bool> placed(np, false);
  for (size_t round = 0; round < np; round++) {
    for (size_t p = 0; p < np; p++) {
      if (placed[p]) continue;
      bool ready = true;
      for (size_t q = 0; q < np; q++)
        if (q != p && !placed[q] && M.poset.le[q][p]) ready = false;
      if (ready) {
        placed[p] = true;
        order.push_back(p);
        break;
      }
    }
  }
  std::map<size_t, std::vector<size_t>> acc;
  std::function<void(size_t)> rec = [&](size_t oi) {
    if (oi == order.size()) {
      emit(acc);
      return;
    }
    size_t p = order[oi];
    auto tuples = all_tuples(M, d.domain, p);
    size_t cod = M.sort_size(d.codomain, p);
    std::vector<std::optional<size_t>> forced(tuples.size());
    std::map<std::vector<size_t>, size_t> rank;
    for (size_t i = 0; i < tuples.size(); i++) rank[tuples[i]] = i;
    bool consistent = true;
    for (size_t q = 0; q < np && consistent; q++) {
      if (q == p || !M.poset.le[q][p] || !acc.count(q)) continue;
      auto qtuples = all_tuples(M, d.domain, q);
      for (size_t i = 0; i < qtuples.size(); i++) {
        size_t val_q = acc.at(q)[i];
        auto img_args = M.transport_tuple(d.domain, q, p, qtuples[i]);
        size_t img_val = M.transport(d.codomain, q, p, val_q);
        size_t r = rank.at(img_args);
        if (forced[r] && *forced[r] != img_val) consistent = false;
        forced[r] = img_val;
      }
    }
    if (!consistent) return;
    if (!tuples.empty() && cod == 0) {
      // no function into an empty set from a nonempty domain
      bool dom_empty = tuples.empty();
      if (!dom_empty) return;
    }
    std::vector<size_t> table(tuples.size(), 0);
    std::function<void(size_t)> rec_entry = [&](size_t i) {
      if (i == tuples.size()) {
        acc[p] = table;
        rec(oi + 1);
        acc.erase(p);
        return;
      }
      if (forced[i]) {
        table[i] = *forced[i];
        rec_entry(i + 1);
        return;
      }
      for (size_t v = 0; v < cod; v++) {
        table[i] = v;
        rec_entry(i + 1);
      }
    };
    rec_entry(0);
  };
  rec(0);
}

// Isomorphism of two extensions over the same base: per-delta-sort,
// per-point bijections commuting with transitions and preserving all delta
// relations/functions; identity on base sorts.
bool extensions_isomorphic(const PresheafModel& A, const PresheafModel& B, const DeltaShape& delta) {
  size_t np = A.poset.n();
  for (const auto& s : delta.sorts)
    for (size_t p = 0; p < np; p++)
      if (A.sort_size(s, p) != B.sort_size(s, p)) return false;

  // candidate bijections per (sort, point), composed into a backtracking search
  struct Slot {
    Name sort;
    size_t point;
  };
  std::vector<Slot> slots;
  for (const auto& s : delta.sorts)
    for (size_t p = 0; p < np; p++) slots.push_back({s, p});
  std::map<std::pair<Name, size_t>, std::vector<size_t>> iso;  // (sort, point) -> bijection

  std::function<bool(size_t)> rec = [&](size_t si) -> bool {
    if (si == slots.size()) {
      // check transitions, relations, functions
      for (const auto& s : delta.sorts) {
        for (const auto& [p, q] : A.poset.pairs_le()) {
          size_t k = A.sort_size(s, p);
          for (size_t e = 0; e < k; e++) {
            size_t lhs = iso.at({s, q})[A.transport(s, p, q, e)];
            size_t rhs = B.transport(s, p, q, iso.at({s, p})[e]);
            if (lhs != rhs) return false;
          }
        }
      }
      auto map_elem = [&](const Name& sort, size_t p, size_t e) -> size_t {
        auto it = iso.find({sort, p});
        return it == iso.end() ? e : it->second[e];
      };
      for (const auto& [r, ar] : delta.rels) {
        for (size_t p = 0; p < np; p++) {
          const auto& at_a = A.rels.at(r).at(p);
          const auto& at_b = B.rels.at(r).at(p);
          if (at_a.size() != at_b.size()) return false;
          for (const auto& t : at_a) {
            std::vector<size_t> img(t.size());
            for (size_t i = 0; i < t.size(); i++) img[i] = map_elem(ar[i], p, t[i]);
            if (!at_b.count(img)) return false;
          }
        }
      }
      for (const auto& [f, d] : delta.funs) {
        for (size_t p = 0; p < np; p++) {
          for (const auto& args : all_tuples(A, d.domain, p)) {
            std::vector<size_t> img(args.size());
            for (size_t i = 0; i < args.size(); i++) img[i] = map_elem(d.domain[i], p, args[i]);
            size_t lhs = map_elem(d.codomain, p, A.apply_fun(f, p, args));
            size_t rhs = B.apply_fun(f, p, img);
            if (lhs != rhs) return false;
          }
        }
      }
      return true;
    }
    const auto& slot = slots[si];
    size_t k = A.sort_size(slot.sort, slot.point);
    std::vector<size_t> perm(k);
    for (size_t i = 0; i < k; i++) perm[i] = i;
    do {
      iso[{slot.sort, slot.point}] = perm;
      if (rec(si + 1)) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    iso.erase({slot.sort, slot.point});
    return false;
  };
  return rec(0);
}

}  // namespace

std::vector<PresheafModel> enumerate_extensions(const PresheafModel& M, const TheoryExtension& E,
                                                size_t size_bound, par::Mode mode) {
  DeltaShape delta = shape_of(E);
  Signature full = Signature::merged(M.sig, E.delta_signature());

  // Stage 1: sort tables for the delta sorts.
  std::vector<std::map<Name, SortTable>> sort_choices{{}};
  for (const auto& s : delta.sorts) {
    std::vector<std::map<Name, SortTable>> next;
    for (const auto& tbl : enumerate_sort_tables(M.poset, size_bound)) {
      for (const auto& prev : sort_choices) {
        auto cur = prev;
        cur[s] = tbl;
        next.push_back(cur);
      }
    }
    sort_choices = std::move(next);
  }

  // Stage 2: relations and functions over each sort choice.
  std::vector<PresheafModel> candidates;
  for (const auto& schoice : sort_choices) {
    PresheafModel base = M;
    base.sig = full;
    for (const auto& [s, tbl] : schoice) base.sorts[s] = tbl;
    std::vector<PresheafModel> stage{base};
    for (const auto& [r, ar] : delta.rels) {
      std::vector<PresheafModel> next;
      for (const auto& m : stage) {
        enumerate_relation_tables(m, ar, [&](const auto& tab) {
          PresheafModel mm = m;
          mm.rels[r] = tab;
          next.push_back(mm);
        });
      }
      stage = std::move(next);
    }
    for (const auto& [f, d] : delta.funs) {
      std::vector<PresheafModel> next;
      for (const auto& m : stage) {
        enumerate_function_tables(m, d, [&](const auto& tab) {
          PresheafModel mm = m;
          mm.funs[f] = tab;
          next.push_back(mm);
        });
      }
      stage = std::move(next);
    }
    for (auto& m : stage) candidates.push_back(std::move(m));
  }

  // Stage 3: filter by the delta axioms (data-parallel kernel with a serial
  // reference path; outputs are order-preserving either way).
  Theory delta_th;
  delta_th.sig = full;
  delta_th.axioms = E.delta_axioms;
  delta_th.schemas = E.delta_schemas;
  std::vector<char> ok = par::map_index<char>(
      candidates.size(),
      [&](size_t i) { return check_theory(candidates[i], delta_th, par::Mode::Serial).holds ? 1 : 0; },
      mode);
  std::vector<PresheafModel> sat;
  for (size_t i = 0; i < candidates.size(); i++)
    if (ok[i]) sat.push_back(std::move(candidates[i]));

  // Stage 4: deduplicate up to isomorphism (deterministic representative:
  // first in enumeration order).
  std::vector<PresheafModel> reps;
  for (const auto& m : sat) {
    bool dup = false;
    for (const auto& r : reps) {
      if (extensions_isomorphic(r, m, delta)) {
        dup = true;
        break;
      }
    }
    if (!dup) reps.push_back(m);
  }
  return reps;
}

PresheafModel extend_by_empty(const PresheafModel& M, const UpSet& U,
                              const PresheafModel& ext_over_U, const TheoryExtension& E) {
  PresheafModel out = M;
  out.sig = Signature::merged(M.sig, E.delta_signature());
  size_t np = M.poset.n();
  // index mapping from restricted poset to full poset
  std::vector<size_t> keep;
  for (size_t p = 0; p < np; p++)
    if (U.member[p]) keep.push_back(p);
  std::map<size_t, size_t> sub_idx;  // full point -> restricted index
  for (size_t i = 0; i < keep.size(); i++) sub_idx[keep[i]] = i;

  for (const auto& s : E.delta_sorts) {
    SortTable t;
    t.size.assign(np, 0);
    t.elem_names.assign(np, {});
    for (size_t p : keep) {
      t.size[p] = ext_over_U.sort_size(s, sub_idx[p]);
      t.elem_names[p] = ext_over_U.sorts.at(s).elem_names.size() > sub_idx[p]
                            ? ext_over_U.sorts.at(s).elem_names[sub_idx[p]]
                            : std::vector<Name>{};
    }
    for (const auto& [p, q] : M.poset.pairs_le()) {
      if (U.member[p] && U.member[q]) {
        t.map[{p, q}] = ext_over_U.sorts.at(s).map.count({sub_idx[p], sub_idx[q]})
                            ? ext_over_U.sorts.at(s).map.at({sub_idx[p], sub_idx[q]})
                            : std::vector<size_t>{};
      } else {
        t.map[{p, q}] = std::vector<size_t>(t.size[p], 0);  // p off U: size 0, empty map
      }
    }
    out.sorts[s] = t;
  }
  for (const auto& [r, ar] : E.delta_relations) {
    for (size_t p = 0; p < np; p++) {
      if (U.member[p])
        out.rels[r][p] = ext_over_U.rels.at(r).at(sub_idx[p]);
      else
        out.rels[r][p] = {};
    }
  }
  for (const auto& [f, d] : E.delta_functions) {
    for (size_t p = 0; p < np; p++) {
      if (U.member[p]) {
        out.funs[f][p] = ext_over_U.funs.at(f).at(sub_idx[p]);
      } else {
        // every delta-function domain includes a delta sort which is empty
        // off U, so the table is empty; a function into an empty codomain
        // from a nonempty domain cannot occur for well-typed conditional data
        size_t dom = 1;
        for (const auto& s : d.domain) dom *= out.sort_size(s, p);
        if (dom != 0)
          throw PreconditionError("extend_by_empty: function " + f +
                                  " has nonempty domain off the up-set");
        out.funs[f][p] = {};
      }
    }
  }
  return out;
}

bool conditional_roundtrip(const PresheafModel& M, const Formula& phi, const TheoryExtension& E,
                           const PresheafModel& ext_over_U) {
  UpSet U = up_set_of(M, phi);
  PresheafModel big = extend_by_empty(M, U, ext_over_U, E);
  big.validate();
  PresheafModel back = restrict_model(big, U);
  // compare delta parts with the original
  for (const auto& s : E.delta_sorts) {
    if (back.sorts.at(s).size != ext_over_U.sorts.at(s).size) return false;
    if (back.sorts.at(s).map != ext_over_U.sorts.at(s).map) return false;
  }
  for (const auto& [r, ar] : E.delta_relations)
    if (back.rels.at(r) != ext_over_U.rels.at(r)) return false;
  for (const auto& [f, d] : E.delta_functions)
    if (back.funs.at(f) != ext_over_U.funs.at(f)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Ring model helpers

PresheafModel zmod_ring_model(uint64_t m) {
  PresheafModel M;
  M.sig = Signature{};
  M.sig.sorts.insert("A");
  M.sig.functions["zero"] = FunDecl{{}, "A"};
  M.sig.functions["one"] = FunDecl{{}, "A"};
  M.sig.functions["neg"] = FunDecl{{"A"}, "A"};
  M.sig.functions["add"] = FunDecl{{"A", "A"}, "A"};
  M.sig.functions["mul"] = FunDecl{{"A", "A"}, "A"};
  M.poset = FinitePoset::single();
  SortTable t;
  t.size = {static_cast<size_t>(m)};
  t.elem_names.resize(1);
  for (uint64_t i = 0; i < m; i++) t.elem_names[0].push_back(std::to_string(i));
  M.sorts["A"] = t;
  M.funs["zero"][0] = {0};
  M.funs["one"][0] = {1 % m};
  std::vector<size_t> neg(m), add(m * m), mul(m * m);
  for (uint64_t i = 0; i < m; i++) {
    neg[i] = static_cast<size_t>((m - i) % m);
    for (uint64_t j = 0; j < m; j++) {
      add[i * m + j] = static_cast<size_t>((i + j) % m);
      mul[i * m + j] = static_cast<size_t>((i * j) % m);
    }
  }
  M.funs["neg"][0] = neg;
  M.funs["add"][0] = add;
  M.funs["mul"][0] = mul;
  return M;
}

PresheafModel sierpinski_ring_model(uint64_t m0, uint64_t m1) {
  if (m0 % m1 != 0) throw PreconditionError("sierpinski_ring_model: need m1 | m0");
  PresheafModel a = zmod_ring_model(m0);
  PresheafModel b = zmod_ring_model(m1);
  PresheafModel M;
  M.sig = a.sig;
  M.poset = FinitePoset::chain(2);
  SortTable t;
  t.size = {a.sorts["A"].size[0], b.sorts["A"].size[0]};
  t.elem_names = {a.sorts["A"].elem_names[0], b.sorts["A"].elem_names[0]};
  std::vector<size_t> tr(m0);
  for (uint64_t i = 0; i < m0; i++) tr[i] = static_cast<size_t>(i % m1);
  t.map[{0, 1}] = tr;
  M.sorts["A"] = t;
  for (const auto& f : {"zero", "one", "neg", "add", "mul"}) {
    M.funs[f][0] = a.funs[f][0];
    M.funs[f][1] = b.funs[f][0];
  }
  return M;
}

// ---------------------------------------------------------------------------
// Model DSL

std::string print_model(const PresheafModel& M) {
  std::ostringstream os;
  os << "model {\n  poset {";
  for (const auto& p : M.poset.points) os << " point " << p << ";";
  for (const auto& [p, q] : M.poset.pairs_le())
    os << " le " << M.poset.points[p] << " " << M.poset.points[q] << ";";
  os << " }\n";
  for (const auto& [s, tbl] : M.sorts) {
    for (size_t p = 0; p < M.poset.n(); p++) {
      os << "  sort " << s << " at " << M.poset.points[p] << " = {";
      for (size_t e = 0; e < tbl.size[p]; e++) {
        if (e) os << ",";
        os << " " << tbl.name_of(p, e);
      }
      os << " };\n";
    }
    for (const auto& [pq, m] : tbl.map) {
      os << "  map " << s << " " << M.poset.points[pq.first] << " " << M.poset.points[pq.second]
         << " :";
      for (size_t e = 0; e < m.size(); e++) {
        if (e) os << ",";
        os << " " << tbl.name_of(pq.first, e) << " -> " << tbl.name_of(pq.second, m[e]);
      }
      os << ";\n";
    }
  }
  for (const auto& [r, tab] : M.rels) {
    const auto& ar = M.sig.relations.at(r);
    for (const auto& [p, tuples] : tab) {
      os << "  rel " << r << " at " << M.poset.points[p] << " = {";
      bool first = true;
      for (const auto& t : tuples) {
        if (!first) os << ",";
        first = false;
        os << " (";
        for (size_t i = 0; i < t.size(); i++) {
          if (i) os << ", ";
          os << M.sorts.at(ar[i]).name_of(p, t[i]);
        }
        os << ")";
      }
      os << " };\n";
    }
  }
  for (const auto& [f, tab] : M.funs) {
    const auto& d = M.sig.functions.at(f);
    for (const auto& [p, table] : tab) {
      os << "  fun " << f << " at " << M.poset.points[p] << " :";
      auto tuples = all_tuples(M, d.domain, p);
      for (size_t i = 0; i < tuples.size(); i++) {
        if (i) os << ",";
        os << " (";
        for (size_t j = 0; j < tuples[i].size(); j++) {
          if (j) os << ", ";
          os << M.sorts.at(d.domain[j]).name_of(p, tuples[i][j]);
        }
        os << ") -> " << M.sorts.at(d.codomain).name_of(p, table[i]);
      }
      os << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

namespace {

struct MLex {
  std::string src;
  size_t pos = 0;
  void skip() {
    while (pos < src.size()) {
      if (isspace(static_cast<unsigned char>(src[pos])))
        pos++;
      else if (src[pos] == '#') {
        while (pos < src.size() && src[pos] != '\n') pos++;
      } else
        break;
    }
  }
  bool eof() {
    skip();
    return pos >= src.size();
  }
  bool try_sym(const std::string& s) {
    skip();
    if (src.compare(pos, s.size(), s) == 0) {
      if (isalpha(static_cast<unsigned char>(s[0]))) {
        size_t end = pos + s.size();
        if (end < src.size() && (isalnum(static_cast<unsigned char>(src[end])) || src[end] == '_'))
          return false;
      }
      pos += s.size();
      return true;
    }
    return false;
  }
  void expect(const std::string& s) {
    if (!try_sym(s)) throw ParseError("model parse error: expected '" + s + "' near position " +
                                      std::to_string(pos));
  }
  Name ident() {
    skip();
    size_t start = pos;
    while (pos < src.size() && (isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) pos++;
    if (start == pos) throw ParseError("model parse error: expected identifier at position " +
                                       std::to_string(pos));
    return src.substr(start, pos - start);
  }
};

}  // namespace

PresheafModel parse_model(const std::string& text, const Signature& sig) {
  MLex lx{text};
  PresheafModel M;
  M.sig = sig;
  lx.expect("model");
  lx.expect("{");
  lx.expect("poset");
  lx.expect("{");
  std::map<Name, size_t> pidx;
  std::vector<std::pair<Name, Name>> les;
  while (!lx.try_sym("}")) {
    if (lx.try_sym("point")) {
      Name p = lx.ident();
      pidx[p] = M.poset.points.size();
      M.poset.points.push_back(p);
      lx.expect(";");
    } else if (lx.try_sym("le")) {
      Name p = lx.ident();
      Name q = lx.ident();
      les.emplace_back(p, q);
      lx.expect(";");
    } else {
      throw ParseError("model parse error: expected point/le");
    }
  }
  size_t np = M.poset.n();
  M.poset.le.assign(np, std::vector<bool>(np, false));
  for (size_t i = 0; i < np; i++) M.poset.le[i][i] = true;
  for (const auto& [p, q] : les) M.poset.le.at(pidx.at(p)).at(pidx.at(q)) = true;
  // transitive closure
  for (size_t k = 0; k < np; k++)
    for (size_t i = 0; i < np; i++)
      for (size_t j = 0; j < np; j++)
        if (M.poset.le[i][k] && M.poset.le[k][j]) M.poset.le[i][j] = true;
  M.poset.validate();

  std::map<std::pair<Name, size_t>, std::map<Name, size_t>> eidx;  // (sort, point) -> name -> index
  auto elem = [&](const Name& sort, size_t p, const Name& n) -> size_t {
    auto it = eidx.find({sort, p});
    if (it == eidx.end() || !it->second.count(n))
      throw ParseError("model parse error: unknown element " + n + " of " + sort);
    return it->second.at(n);
  };

  while (!lx.try_sym("}")) {
    if (lx.try_sym("sort")) {
      Name s = lx.ident();
      lx.expect("at");
      size_t p = pidx.at(lx.ident());
      lx.expect("=");
      lx.expect("{");
      auto& tbl = M.sorts[s];
      if (tbl.size.size() != np) {
        tbl.size.assign(np, 0);
        tbl.elem_names.assign(np, {});
      }
      std::vector<Name> names;
      if (!lx.try_sym("}")) {
        names.push_back(lx.ident());
        while (lx.try_sym(",")) names.push_back(lx.ident());
        lx.expect("}");
      }
      lx.expect(";");
      tbl.size[p] = names.size();
      tbl.elem_names[p] = names;
      for (size_t e = 0; e < names.size(); e++) eidx[{s, p}][names[e]] = e;
    } else if (lx.try_sym("map")) {
      Name s = lx.ident();
      size_t p = pidx.at(lx.ident());
      size_t q = pidx.at(lx.ident());
      lx.expect(":");
      auto& tbl = M.sorts.at(s);
      std::vector<size_t> m(tbl.size.at(p), 0);
      std::vector<bool> seen(tbl.size.at(p), false);
      if (!lx.try_sym(";")) {
        do {
          Name from = lx.ident();
          lx.expect("->");
          Name to = lx.ident();
          size_t fe = elem(s, p, from);
          m.at(fe) = elem(s, q, to);
          seen.at(fe) = true;
        } while (lx.try_sym(","));
        lx.expect(";");
      }
      for (size_t e = 0; e < seen.size(); e++)
        if (!seen[e]) throw ParseError("model parse error: map for " + s + " misses an element");
      tbl.map[{p, q}] = m;
    } else if (lx.try_sym("rel")) {
      Name r = lx.ident();
      lx.expect("at");
      size_t p = pidx.at(lx.ident());
      lx.expect("=");
      lx.expect("{");
      const auto& ar = sig.relations.at(r);
      std::set<std::vector<size_t>> tuples;
      if (!lx.try_sym("}")) {
        do {
          lx.expect("(");
          std::vector<size_t> t;
          if (!lx.try_sym(")")) {
            t.push_back(elem(ar[t.size()], p, lx.ident()));
            while (lx.try_sym(",")) t.push_back(elem(ar[t.size()], p, lx.ident()));
            lx.expect(")");
          }
          if (t.size() != ar.size()) throw ParseError("model parse error: relation arity");
          tuples.insert(t);
        } while (lx.try_sym(","));
        lx.expect("}");
      }
      lx.expect(";");
      M.rels[r][p] = tuples;
    } else if (lx.try_sym("fun")) {
      Name f = lx.ident();
      lx.expect("at");
      size_t p = pidx.at(lx.ident());
      lx.expect(":");
      const auto& d = sig.functions.at(f);
      size_t dom = 1;
      for (const auto& s : d.domain) dom *= M.sorts.at(s).size.at(p);
      std::vector<size_t> table(dom, 0);
      std::vector<bool> seen(dom, false);
      if (!lx.try_sym(";")) {
        do {
          lx.expect("(");
          std::vector<size_t> args;
          if (!lx.try_sym(")")) {
            args.push_back(elem(d.domain[args.size()], p, lx.ident()));
            while (lx.try_sym(",")) args.push_back(elem(d.domain[args.size()], p, lx.ident()));
            lx.expect(")");
          }
          lx.expect("->");
          Name val = lx.ident();
          if (args.size() != d.domain.size()) throw ParseError("model parse error: function arity");
          size_t rank = 0;
          for (size_t i = 0; i < args.size(); i++)
            rank = rank * M.sorts.at(d.domain[i]).size.at(p) + args[i];
          table.at(rank) = elem(d.codomain, p, val);
          seen.at(rank) = true;
        } while (lx.try_sym(","));
        lx.expect(";");
      }
      for (size_t e = 0; e < seen.size(); e++)
        if (!seen[e]) throw ParseError("model parse error: function table for " + f + " incomplete");
      M.funs[f][p] = table;
    } else {
      throw ParseError("model parse error: expected sort/map/rel/fun");
    }
  }
  // default tables for missing relations/functions at points without entries
  for (const auto& [r, ar] : sig.relations)
    for (size_t p = 0; p < np; p++)
      if (!M.rels[r].count(p)) M.rels[r][p] = {};
  M.validate();
  return M;
}

}  // namespace geoth
