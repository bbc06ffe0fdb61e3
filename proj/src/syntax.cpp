#include "geoth/syntax.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

namespace geoth {

// ---------------------------------------------------------------------------
// Comparisons

int Term::cmp(const Term& o) const {
  if (var != o.var) return var ? -1 : 1;
  if (int c = head.compare(o.head)) return c < 0 ? -1 : 1;
  if (args.size() != o.args.size()) return args.size() < o.args.size() ? -1 : 1;
  for (size_t i = 0; i < args.size(); i++)
    if (int c = args[i].cmp(o.args[i])) return c;
  return 0;
}

int Formula::cmp(const Formula& o) const {
  if (kind != o.kind) return kind < o.kind ? -1 : 1;
  if (int c = name.compare(o.name)) return c < 0 ? -1 : 1;
  if (int c = sort.compare(o.sort)) return c < 0 ? -1 : 1;
  if (terms.size() != o.terms.size()) return terms.size() < o.terms.size() ? -1 : 1;
  for (size_t i = 0; i < terms.size(); i++)
    if (int c = terms[i].cmp(o.terms[i])) return c;
  if (sub.size() != o.sub.size()) return sub.size() < o.sub.size() ? -1 : 1;
  for (size_t i = 0; i < sub.size(); i++)
    if (int c = sub[i].cmp(o.sub[i])) return c;
  if (bound != o.bound) return bound < o.bound ? -1 : 1;
  return 0;
}

int Sequent::cmp(const Sequent& o) const {
  if (ctx != o.ctx) return ctx < o.ctx ? -1 : 1;
  if (int c = lhs.cmp(o.lhs)) return c;
  return rhs.cmp(o.rhs);
}

// ---------------------------------------------------------------------------
// Signature

Signature Signature::merged(const Signature& a, const Signature& b) {
  Signature out = a;
  for (const auto& s : b.sorts) {
    if (!out.sorts.insert(s).second) throw PreconditionError("sort name clash: " + s);
  }
  for (const auto& [r, ar] : b.relations) {
    if (out.relations.count(r) || out.functions.count(r))
      throw PreconditionError("relation name clash: " + r);
    out.relations[r] = ar;
  }
  for (const auto& [f, d] : b.functions) {
    if (out.relations.count(f) || out.functions.count(f))
      throw PreconditionError("function name clash: " + f);
    out.functions[f] = d;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Terms

Name term_sort(const Term& t, const Context& ctx, const Signature& sig) {
  if (t.var) {
    for (const auto& [v, s] : ctx)
      if (v == t.head) return s;
    throw PreconditionError("unbound variable: " + t.head);
  }
  auto it = sig.functions.find(t.head);
  if (it == sig.functions.end()) throw PreconditionError("unknown function symbol: " + t.head);
  return it->second.codomain;
}

void collect_term_vars(const Term& t, std::set<Name>& out) {
  if (t.var) {
    out.insert(t.head);
    return;
  }
  for (const auto& a : t.args) collect_term_vars(a, out);
}

// ---------------------------------------------------------------------------
// Free variables

void collect_free_vars(const Formula& f, std::set<Name>& bound, std::set<Name>& out) {
  switch (f.kind) {
    case FKind::Truth:
    case FKind::Falsity:
      return;
    case FKind::RelAtom:
    case FKind::Eq:
    case FKind::SchemaOr: {
      std::set<Name> vars;
      for (const auto& t : f.terms) collect_term_vars(t, vars);
      for (const auto& v : vars)
        if (!bound.count(v)) out.insert(v);
      return;
    }
    case FKind::And:
    case FKind::Or:
      for (const auto& g : f.sub) collect_free_vars(g, bound, out);
      return;
    case FKind::Exists: {
      bool fresh = bound.insert(f.name).second;
      collect_free_vars(f.sub[0], bound, out);
      if (fresh) bound.erase(f.name);
      return;
    }
  }
}

std::set<Name> free_vars(const Formula& f) {
  std::set<Name> bound, out;
  collect_free_vars(f, bound, out);
  return out;
}

bool is_closed(const Formula& f) { return free_vars(f).empty(); }

Name fresh_name(const Name& base, const std::set<Name>& used) {
  if (!used.count(base)) return base;
  for (uint64_t i = 1;; i++) {
    Name cand = base + std::to_string(i);
    if (!used.count(cand)) return cand;
  }
}

// ---------------------------------------------------------------------------
// Numerals and powers (relative to the standard ring symbol names)

Term numeral_term(uint64_t n) {
  if (n == 0) return Term::app("zero");
  if (n == 1) return Term::app("one");
  return Term::app("add", {Term::app("one"), numeral_term(n - 1)});
}

std::optional<uint64_t> read_numeral(const Term& t) {
  if (t.var) return std::nullopt;
  if (t.head == "zero" && t.args.empty()) return 0;
  if (t.head == "one" && t.args.empty()) return 1;
  if (t.head == "add" && t.args.size() == 2 && t.args[0] == Term::app("one")) {
    auto rest = read_numeral(t.args[1]);
    if (rest) return 1 + *rest;
  }
  return std::nullopt;
}

Term power_term(const Term& t, uint64_t n) {
  if (n == 0) return Term::app("one");
  if (n == 1) return t;
  return Term::app("mul", {t, power_term(t, n - 1)});
}

// ---------------------------------------------------------------------------
// Schema registry
//
// Families:
//   formula-level
//     "pow0"(t)       n-th disjunct (n>=0):  t^(n+1) = 0        (nil ideal)
//   theory-level
//     "loc"(A)        n-th sequent (n>=0): the n-ary locality axiom
//                     ex y1..yn. sum xi*yi = 1  |-{x1..xn}  \/ inv(xi)
// Both use the standard ring symbol names zero/one/add/mul.

static Formula inv_formula(const Term& t, const Name& sort, const std::set<Name>& avoid) {
  Name xb = fresh_name("w", avoid);
  return Formula::exists(xb, sort, Formula::eq(Term::app("mul", {t, Term::mkvar(xb)}), Term::app("one")));
}

bool schema_or_known(const Name& family) { return family == "pow0"; }

Formula expand_schema_or(const Name& family, const std::vector<Term>& terms, uint64_t n) {
  if (family == "pow0") {
    if (terms.size() != 1) throw PreconditionError("pow0 takes one term");
    return Formula::eq(power_term(terms[0], n + 1), Term::app("zero"));
  }
  throw PreconditionError("unknown schema family: " + family);
}

bool axiom_schema_known(const Name& family) { return family == "loc"; }

Sequent expand_axiom_schema(const AxiomSchema& s, uint64_t n) {
  if (s.family == "loc") {
    if (s.args.size() != 1) throw PreconditionError("loc takes one sort argument");
    const Name& A = s.args[0];
    Sequent seq;
    std::vector<Term> xs, ys;
    std::set<Name> used;
    for (uint64_t i = 1; i <= n; i++) {
      Name x = "x" + std::to_string(i);
      seq.ctx.emplace_back(x, A);
      xs.push_back(Term::mkvar(x));
      used.insert(x);
    }
    // lhs: ex y1..yn. x1*y1 + ... + xn*yn = 1  (n = 0: 0 = 1)
    Term sum = Term::app("zero");
    for (uint64_t i = 0; i < n; i++) {
      Name y = "y" + std::to_string(i + 1);
      ys.push_back(Term::mkvar(y));
      used.insert(y);
      Term prod = Term::app("mul", {xs[i], ys[i]});
      sum = (i == 0) ? prod : Term::app("add", {sum, prod});
    }
    Formula lhs = Formula::eq(sum, Term::app("one"));
    for (uint64_t i = n; i > 0; i--) lhs = Formula::exists("y" + std::to_string(i), A, lhs);
    seq.lhs = lhs;
    std::vector<Formula> disj;
    for (uint64_t i = 0; i < n; i++) disj.push_back(inv_formula(xs[i], A, used));
    seq.rhs = Formula::disj(disj);
    return seq;
  }
  throw PreconditionError("unknown axiom schema family: " + s.family);
}

// ---------------------------------------------------------------------------
// Well-formedness

static void check_term(const Term& t, const Context& ctx, const Signature& sig,
                       const std::string& path, std::vector<Diagnostic>& out,
                       const Name& expected_sort) {
  if (t.var) {
    for (const auto& [v, s] : ctx) {
      if (v == t.head) {
        if (!expected_sort.empty() && s != expected_sort)
          out.push_back({path, "sort mismatch: variable " + v + " has sort " + s + ", expected " +
                                   expected_sort});
        return;
      }
    }
    out.push_back({path, "unbound variable: " + t.head});
    return;
  }
  auto it = sig.functions.find(t.head);
  if (it == sig.functions.end()) {
    out.push_back({path, "unknown function symbol: " + t.head});
    return;
  }
  const FunDecl& d = it->second;
  if (!expected_sort.empty() && d.codomain != expected_sort)
    out.push_back({path, "sort mismatch: " + t.head + " yields " + d.codomain + ", expected " +
                             expected_sort});
  if (d.domain.size() != t.args.size()) {
    out.push_back({path, "arity mismatch for " + t.head});
    return;
  }
  for (size_t i = 0; i < t.args.size(); i++)
    check_term(t.args[i], ctx, sig, path + "." + std::to_string(i), out, d.domain[i]);
}

std::vector<Diagnostic> check_formula(const Formula& f, const Context& ctx, const Signature& sig,
                                      const std::string& path) {
  std::vector<Diagnostic> out;
  switch (f.kind) {
    case FKind::Truth:
    case FKind::Falsity:
      break;
    case FKind::RelAtom: {
      auto it = sig.relations.find(f.name);
      if (it == sig.relations.end()) {
        out.push_back({path, "unknown relation symbol: " + f.name});
        break;
      }
      if (it->second.size() != f.terms.size()) {
        out.push_back({path, "arity mismatch for relation " + f.name});
        break;
      }
      for (size_t i = 0; i < f.terms.size(); i++)
        check_term(f.terms[i], ctx, sig, path + ".arg" + std::to_string(i), out, it->second[i]);
      break;
    }
    case FKind::Eq: {
      try {
        Name s0 = term_sort(f.terms[0], ctx, sig);
        Name s1 = term_sort(f.terms[1], ctx, sig);
        if (s0 != s1)
          out.push_back({path, "sort mismatch in equality: " + s0 + " vs " + s1});
      } catch (const PreconditionError& e) {
        out.push_back({path, e.what()});
        break;
      }
      check_term(f.terms[0], ctx, sig, path + ".l", out, "");
      check_term(f.terms[1], ctx, sig, path + ".r", out, "");
      break;
    }
    case FKind::And:
    case FKind::Or:
      for (size_t i = 0; i < f.sub.size(); i++) {
        auto sub = check_formula(f.sub[i], ctx, sig, path + "." + std::to_string(i));
        out.insert(out.end(), sub.begin(), sub.end());
      }
      break;
    case FKind::SchemaOr: {
      if (!schema_or_known(f.name)) {
        out.push_back({path, "unknown schema family: " + f.name});
        break;
      }
      // Well-formedness of the family is checked on a prefix of instances.
      for (uint64_t n = 0; n < 2; n++) {
        Formula inst = expand_schema_or(f.name, f.terms, n);
        auto sub = check_formula(inst, ctx, sig, path + ".inst" + std::to_string(n));
        out.insert(out.end(), sub.begin(), sub.end());
      }
      break;
    }
    case FKind::Exists: {
      if (!sig.has_sort(f.sort)) out.push_back({path, "unknown sort: " + f.sort});
      Context ext = ctx;
      for (auto& [v, s] : ext) {
        if (v == f.name) v = "#shadowed";  // inner binder shadows
      }
      ext.emplace_back(f.name, f.sort);
      auto sub = check_formula(f.sub[0], ext, sig, path + ".body");
      out.insert(out.end(), sub.begin(), sub.end());
      break;
    }
  }
  return out;
}

static std::vector<Diagnostic> check_sequent_wf(const Sequent& q, const Signature& sig,
                                                const std::string& path) {
  std::vector<Diagnostic> out;
  std::set<Name> seen;
  for (const auto& [v, s] : q.ctx) {
    if (!seen.insert(v).second) out.push_back({path, "duplicate context variable: " + v});
    if (!sig.has_sort(s)) out.push_back({path, "unknown sort: " + s});
  }
  auto l = check_formula(q.lhs, q.ctx, sig, path + ".lhs");
  auto r = check_formula(q.rhs, q.ctx, sig, path + ".rhs");
  out.insert(out.end(), l.begin(), l.end());
  out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::vector<Diagnostic> check_wellformed(const Theory& t) {
  std::vector<Diagnostic> out;
  for (const auto& [r, ar] : t.sig.relations) {
    if (r.empty()) out.push_back({"sig." + r, "empty relation name"});
    for (const auto& s : ar)
      if (!t.sig.has_sort(s)) out.push_back({"sig." + r, "unknown sort in arity: " + s});
    if (t.sig.functions.count(r)) out.push_back({"sig." + r, "name used as relation and function"});
  }
  for (const auto& [f, d] : t.sig.functions) {
    if (f.empty()) out.push_back({"sig." + f, "empty function name"});
    for (const auto& s : d.domain)
      if (!t.sig.has_sort(s)) out.push_back({"sig." + f, "unknown sort in domain: " + s});
    if (!t.sig.has_sort(d.codomain)) out.push_back({"sig." + f, "unknown sort in codomain: " + d.codomain});
  }
  for (size_t i = 0; i < t.axioms.size(); i++) {
    auto sub = check_sequent_wf(t.axioms[i], t.sig, "axiom" + std::to_string(i));
    out.insert(out.end(), sub.begin(), sub.end());
  }
  for (size_t i = 0; i < t.schemas.size(); i++) {
    const auto& s = t.schemas[i];
    std::string path = "schema" + std::to_string(i);
    if (!axiom_schema_known(s.family)) {
      out.push_back({path, "unknown axiom schema family: " + s.family});
      continue;
    }
    for (uint64_t n = 0; n < 3; n++) {
      auto sub = check_sequent_wf(expand_axiom_schema(s, n), t.sig, path + ".inst" + std::to_string(n));
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Substitution

Term substitute(const Term& t, const std::map<Name, Term>& binding) {
  if (t.var) {
    auto it = binding.find(t.head);
    return it == binding.end() ? t : it->second;
  }
  Term out = t;
  for (auto& a : out.args) a = substitute(a, binding);
  return out;
}

Formula substitute(const Formula& f, const std::map<Name, Term>& binding) {
  switch (f.kind) {
    case FKind::Truth:
    case FKind::Falsity:
      return f;
    case FKind::RelAtom:
    case FKind::Eq:
    case FKind::SchemaOr: {
      Formula out = f;
      for (auto& t : out.terms) t = substitute(t, binding);
      return out;
    }
    case FKind::And:
    case FKind::Or: {
      Formula out = f;
      for (auto& g : out.sub) g = substitute(g, binding);
      return out;
    }
    case FKind::Exists: {
      std::map<Name, Term> inner = binding;
      inner.erase(f.name);
      if (inner.empty()) return f;
      // Capture avoidance: rename the binder if it occurs in any replacement.
      std::set<Name> clash;
      for (const auto& [v, t] : inner) collect_term_vars(t, clash);
      Formula body = f.sub[0];
      Name binder = f.name;
      if (clash.count(binder)) {
        std::set<Name> used = clash;
        for (const auto& v : free_vars(body)) used.insert(v);
        Name nb = fresh_name(binder, used);
        std::map<Name, Term> ren{{binder, Term::mkvar(nb)}};
        body = substitute(body, ren);
        binder = nb;
      }
      return Formula::exists(binder, f.sort, substitute(body, inner));
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Formula normalization

Formula normalize_formula(const Formula& f) {
  switch (f.kind) {
    case FKind::Truth:
    case FKind::Falsity:
    case FKind::RelAtom:
    case FKind::SchemaOr:
      return f;
    case FKind::Eq: {
      Formula out = f;
      if (out.terms[1] < out.terms[0]) std::swap(out.terms[0], out.terms[1]);
      return out;
    }
    case FKind::And:
    case FKind::Or: {
      bool is_and = f.kind == FKind::And;
      std::vector<Formula> kids;
      for (const auto& g : f.sub) {
        Formula n = normalize_formula(g);
        if (n.kind == f.kind) {
          for (auto& k : n.sub) kids.push_back(std::move(k));
        } else if (is_and && n.kind == FKind::Truth) {
          // drop
        } else if (!is_and && n.kind == FKind::Falsity) {
          // drop
        } else if (is_and && n.kind == FKind::Falsity) {
          return Formula::falsity();
        } else if (!is_and && n.kind == FKind::Truth) {
          return Formula::truth();
        } else {
          kids.push_back(std::move(n));
        }
      }
      std::sort(kids.begin(), kids.end());
      kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
      if (kids.empty()) return is_and ? Formula::truth() : Formula::falsity();
      if (kids.size() == 1) return kids[0];
      return Formula{f.kind, {}, {}, {}, std::move(kids), {}};
    }
    case FKind::Exists: {
      Formula body = normalize_formula(f.sub[0]);
      if (body.kind == FKind::Falsity) return Formula::falsity();
      // ex x. phi with x not free in phi is NOT simplified away: over an
      // empty interpretation of the sort the two formulas differ.
      return Formula::exists(f.name, f.sort, std::move(body));
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Sequent canonicalization

namespace {

std::vector<Formula> conjuncts_of(const Formula& f) {
  if (f.kind == FKind::And) return f.sub;
  if (f.kind == FKind::Truth) return {};
  return {f};
}

Formula conj_of(std::vector<Formula> fs) { return normalize_formula(Formula::conj(std::move(fs))); }

// Pull top-level existentials of the antecedent into the context. Handles
// existentials nested inside the top-level conjunction, to a fixpoint.
void unhoist_antecedent(Sequent& q) {
  bool changed = true;
  while (changed) {
    changed = false;
    q.lhs = normalize_formula(q.lhs);
    std::vector<Formula> cs = conjuncts_of(q.lhs);
    for (size_t i = 0; i < cs.size(); i++) {
      if (cs[i].kind != FKind::Exists) continue;
      std::set<Name> used;
      for (const auto& [v, s] : q.ctx) used.insert(v);
      for (const auto& c : cs)
        for (const auto& v : free_vars(c)) used.insert(v);
      for (const auto& v : free_vars(q.rhs)) used.insert(v);
      Name nv = fresh_name(cs[i].name, used);
      Formula body = cs[i].sub[0];
      if (nv != cs[i].name) {
        std::map<Name, Term> ren{{cs[i].name, Term::mkvar(nv)}};
        body = substitute(body, ren);
      }
      q.ctx.emplace_back(nv, cs[i].sort);
      cs[i] = body;
      changed = true;
      break;
    }
    if (changed) q.lhs = conj_of(cs);
  }
}

void collect_subterms(const Term& t, std::vector<Term>& out) {
  out.push_back(t);
  for (const auto& a : t.args) collect_subterms(a, out);
}

// Drop antecedent hypotheses whose variables are local to them and which are
// instances of remaining hypotheses (sound: instantiate the local variable).
void drop_redundant_hypotheses(Sequent& q, const Signature& sig) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Formula> cs = conjuncts_of(normalize_formula(q.lhs));
    std::set<Name> rhs_vars = free_vars(q.rhs);
    for (size_t vi = 0; vi < q.ctx.size() && !changed; vi++) {
      const Name v = q.ctx[vi].first;
      const Name vsort = q.ctx[vi].second;
      if (rhs_vars.count(v)) continue;
      std::vector<size_t> holders;
      bool elsewhere = false;
      for (size_t i = 0; i < cs.size(); i++) {
        if (free_vars(cs[i]).count(v)) holders.push_back(i);
      }
      if (holders.empty()) continue;  // unused vars are kept: dropping them is unsound
      // Candidate witness terms: other context variables of the same sort and
      // subterms of non-holder conjuncts of the same sort.
      std::vector<Term> cands;
      for (const auto& [w, s] : q.ctx)
        if (w != v && s == vsort) cands.push_back(Term::mkvar(w));
      for (size_t i = 0; i < cs.size(); i++) {
        if (std::find(holders.begin(), holders.end(), i) != holders.end()) continue;
        for (const auto& t : cs[i].terms) {
          std::vector<Term> subs;
          collect_subterms(t, subs);
          for (const auto& st : subs) {
            try {
              if (term_sort(st, q.ctx, sig) == vsort) cands.push_back(st);
            } catch (const PreconditionError&) {
            }
          }
        }
      }
      std::sort(cands.begin(), cands.end());
      cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
      for (const auto& w : cands) {
        bool witness_clean = true;
        {
          std::set<Name> wv;
          collect_term_vars(w, wv);
          if (wv.count(v)) witness_clean = false;
        }
        if (!witness_clean) continue;
        std::map<Name, Term> bind{{v, w}};
        bool all_present = true;
        for (size_t h : holders) {
          Formula inst = normalize_formula(substitute(cs[h], bind));
          bool present = inst.kind == FKind::Truth;
          if (!present && inst.kind == FKind::Eq && inst.terms[0] == inst.terms[1]) present = true;
          if (!present) {
            for (size_t i = 0; i < cs.size(); i++) {
              if (std::find(holders.begin(), holders.end(), i) != holders.end()) continue;
              if (normalize_formula(cs[i]) == inst) {
                present = true;
                break;
              }
            }
          }
          if (!present) {
            all_present = false;
            break;
          }
        }
        if (all_present) {
          std::vector<Formula> kept;
          for (size_t i = 0; i < cs.size(); i++)
            if (std::find(holders.begin(), holders.end(), i) == holders.end()) kept.push_back(cs[i]);
          q.lhs = conj_of(kept);
          q.ctx.erase(q.ctx.begin() + vi);
          changed = true;
          break;
        }
      }
    }
  }
}

struct Renamer {
  std::map<Name, Name> map;
  int next = 0;
  Name get(const Name& v) {
    auto it = map.find(v);
    if (it != map.end()) return it->second;
    Name n = "v" + std::to_string(next++);
    map[v] = n;
    return n;
  }
};

Term rename_term(const Term& t, Renamer& r) {
  if (t.var) return Term::mkvar(r.get(t.head));
  Term out = t;
  for (auto& a : out.args) a = rename_term(a, r);
  return out;
}

Formula rename_formula(const Formula& f, Renamer& r) {
  switch (f.kind) {
    case FKind::Truth:
    case FKind::Falsity:
      return f;
    case FKind::RelAtom:
    case FKind::Eq:
    case FKind::SchemaOr: {
      Formula out = f;
      for (auto& t : out.terms) t = rename_term(t, r);
      return out;
    }
    case FKind::And:
    case FKind::Or: {
      Formula out = f;
      for (auto& g : out.sub) g = rename_formula(g, r);
      return out;
    }
    case FKind::Exists: {
      // Binders get canonical names too, continuing the same counter.
      Renamer saved = r;  // binder scoping: shadowed outer mapping restored after
      Name nb = "v" + std::to_string(r.next++);
      r.map[f.name] = nb;
      Formula body = rename_formula(f.sub[0], r);
      r.map = saved.map;  // restore mapping, keep counter
      return Formula::exists(nb, f.sort, std::move(body));
    }
  }
  throw std::logic_error("unreachable");
}

// Order context variables by first occurrence in (sorted) lhs then rhs,
// unused last by sort name; rename positionally; re-sort conjuncts. Iterated
// twice so the conjunct order and the naming stabilize together.
Sequent canonical_rename(Sequent q) {
  for (int round = 0; round < 2; round++) {
    q.lhs = normalize_formula(q.lhs);
    q.rhs = normalize_formula(q.rhs);
    std::vector<Name> order;
    std::set<Name> seen;
    std::function<void(const Term&)> visit_term = [&](const Term& t) {
      if (t.var) {
        if (!seen.count(t.head)) {
          seen.insert(t.head);
          order.push_back(t.head);
        }
        return;
      }
      for (const auto& a : t.args) visit_term(a);
    };
    std::function<void(const Formula&)> visit = [&](const Formula& f) {
      for (const auto& t : f.terms) visit_term(t);
      for (const auto& g : f.sub) visit(g);
    };
    visit(q.lhs);
    visit(q.rhs);
    Context new_ctx;
    for (const auto& v : order) {
      for (const auto& [w, s] : q.ctx)
        if (w == v) new_ctx.emplace_back(w, s);
    }
    std::vector<std::pair<Name, Name>> unused;
    for (const auto& [w, s] : q.ctx)
      if (!seen.count(w)) unused.emplace_back(w, s);
    std::sort(unused.begin(), unused.end(),
              [](const auto& a, const auto& b) { return a.second < b.second || (a.second == b.second && a.first < b.first); });
    for (const auto& p : unused) new_ctx.push_back(p);
    Renamer r;
    Context renamed;
    for (const auto& [v, s] : new_ctx) renamed.emplace_back(r.get(v), s);
    q.lhs = normalize_formula(rename_formula(q.lhs, r));
    Renamer r2 = r;  // rhs binders continue numbering deterministically
    q.rhs = normalize_formula(rename_formula(q.rhs, r2));
    q.ctx = renamed;
  }
  return q;
}

}  // namespace

Sequent normalize_sequent(const Sequent& s, const Signature& sig) {
  Sequent q = s;
  q.lhs = normalize_formula(q.lhs);
  q.rhs = normalize_formula(q.rhs);
  unhoist_antecedent(q);
  drop_redundant_hypotheses(q, sig);
  return canonical_rename(q);
}

// ---------------------------------------------------------------------------
// Theory normalization

namespace {

// Alpha-canonical key for closed formulas (binders renamed positionally).
Formula canonical_closed(const Formula& f) {
  Renamer r;
  return normalize_formula(rename_formula(normalize_formula(f), r));
}

// True if every conjunct of rhs is either trivial or (alpha-canonically)
// contained in the pool of closed formulas.
bool conjuncts_subsumed(const Formula& rhs, const std::set<Formula>& pool) {
  for (const auto& c : conjuncts_of(rhs)) {
    if (c.kind == FKind::Truth) continue;
    if (c.kind == FKind::Eq && c.terms[0] == c.terms[1]) continue;
    if (!is_closed(c) || !pool.count(canonical_closed(c))) return false;
  }
  return true;
}

}  // namespace

Theory normalize(const Theory& t) {
  Theory out;
  out.sig = t.sig;
  out.schemas = t.schemas;
  std::sort(out.schemas.begin(), out.schemas.end());
  out.schemas.erase(std::unique(out.schemas.begin(), out.schemas.end()), out.schemas.end());

  // Axioms stay in a light normal form during absorption (no unhoisting yet,
  // so closed antecedent conjuncts remain visible); the full sequent
  // canonicalization runs at the end of each round, to a fixpoint.
  std::vector<Sequent> axs;
  for (const auto& a : t.axioms) {
    Sequent q = a;
    q.lhs = normalize_formula(q.lhs);
    q.rhs = normalize_formula(q.rhs);
    axs.push_back(q);
  }

  bool changed = true;
  while (changed) {
    changed = false;

    // Exact duplicates first, so that a closed axiom cannot absorb its own
    // copy (keeping the first occurrence).
    {
      std::vector<Sequent> uniq;
      for (const auto& a : axs) {
        bool seen = false;
        for (const auto& b : uniq)
          if (a == b) seen = true;
        if (!seen) uniq.push_back(a);
      }
      if (uniq.size() != axs.size()) changed = true;
      axs = std::move(uniq);
    }

    // Guard axioms: R(distinct vars) |- p  with p a proposition symbol.
    std::set<std::pair<Name, Name>> guards;  // (relation, proposition)
    for (const auto& a : axs) {
      if (a.rhs.kind == FKind::RelAtom && a.rhs.terms.empty() && a.lhs.kind == FKind::RelAtom &&
          !a.lhs.terms.empty()) {
        bool all_vars = true;
        for (const auto& tm : a.lhs.terms)
          if (!tm.var) all_vars = false;
        if (all_vars) guards.insert({a.lhs.name, a.rhs.name});
      }
    }

    std::vector<Sequent> next;
    for (size_t ai = 0; ai < axs.size(); ai++) {
      Sequent a = axs[ai];

      // Closed axioms from the other axioms, alpha-canonical.
      std::set<Formula> closed_others;
      for (size_t bj = 0; bj < axs.size(); bj++) {
        if (bj == ai) continue;
        const Sequent& b = axs[bj];
        if (b.ctx.empty() && b.lhs.kind == FKind::Truth)
          for (const auto& c : conjuncts_of(b.rhs)) closed_others.insert(canonical_closed(c));
      }

      // Absorb closed axioms and guarded propositions in the antecedent.
      std::vector<Formula> cs = conjuncts_of(a.lhs);
      std::set<Name> present_rels;
      for (const auto& c : cs)
        if (c.kind == FKind::RelAtom && !c.terms.empty()) present_rels.insert(c.name);
      std::vector<Formula> kept;
      for (const auto& c : cs) {
        bool drop = false;
        if (is_closed(c) && closed_others.count(canonical_closed(c))) drop = true;
        if (!drop && c.kind == FKind::RelAtom && c.terms.empty()) {
          for (const auto& [r, p] : guards)
            if (p == c.name && present_rels.count(r) && r != c.name) drop = true;
        }
        if (!drop) kept.push_back(c);
      }
      if (kept.size() != cs.size()) {
        a.lhs = conj_of(kept);
        changed = true;
      }

      // Drop axioms with absurd antecedent or subsumed consequent.
      if (a.lhs.kind == FKind::Falsity) {
        changed = true;
        continue;
      }
      std::set<Formula> lhs_pool;
      for (const auto& c : conjuncts_of(a.lhs)) lhs_pool.insert(c);
      bool rhs_in_lhs = true;
      for (const auto& c : conjuncts_of(a.rhs)) {
        if (c.kind == FKind::Truth) continue;
        if (c.kind == FKind::Eq && c.terms[0] == c.terms[1]) continue;
        if (!lhs_pool.count(c)) rhs_in_lhs = false;
      }
      if (rhs_in_lhs) {
        changed = true;
        continue;
      }
      if (conjuncts_subsumed(a.rhs, closed_others)) {
        changed = true;
        continue;
      }
      next.push_back(a);
    }
    axs = std::move(next);

    // Full canonicalization; if it changes anything, run another round so
    // absorption sees the new shapes (e.g. guards exposed by unhoisting).
    std::vector<Sequent> canon;
    for (const auto& a : axs) canon.push_back(normalize_sequent(a, t.sig));
    std::sort(canon.begin(), canon.end(),
              [](const Sequent& a, const Sequent& b) { return sequent_key(a) < sequent_key(b); });
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
    if (canon != axs) changed = true;
    axs = std::move(canon);
  }

  out.axioms = std::move(axs);
  return out;
}

bool equivalent_normal_forms(const Theory& a, const Theory& b) { return normalize(a) == normalize(b); }

Formula expand_schema_ors(const Formula& f, uint64_t level) {
  if (f.kind == FKind::SchemaOr) {
    std::vector<Formula> kids;
    for (uint64_t n = 0; n <= level; n++) kids.push_back(expand_schema_or(f.name, f.terms, n));
    return Formula::disj(std::move(kids));
  }
  Formula out = f;
  for (auto& g : out.sub) g = expand_schema_ors(g, level);
  return out;
}

Theory expand_schemas(const Theory& t, uint64_t level) {
  Theory out = t;
  out.schemas.clear();
  for (auto& a : out.axioms) {
    a.lhs = expand_schema_ors(a.lhs, level);
    a.rhs = expand_schema_ors(a.rhs, level);
  }
  for (const auto& s : t.schemas)
    for (uint64_t n = 0; n <= level; n++) out.axioms.push_back(expand_axiom_schema(s, n));
  return out;
}

}  // namespace geoth
