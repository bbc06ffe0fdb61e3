#include "geoth/dsl.hpp"

#include <cctype>
#include <sstream>

namespace geoth {

// ---------------------------------------------------------------------------
// Printing

namespace {

// Term precedence: 0 sum, 1 product, 2 atom/negation.
void print_term_prec(std::ostream& os, const Term& t, int prec) {
  if (t.var) {
    os << t.head;
    return;
  }
  if (auto n = read_numeral(t)) {
    os << *n;
    return;
  }
  if (t.head == "add" && t.args.size() == 2) {
    if (prec > 0) os << "(";
    print_term_prec(os, t.args[0], 0);
    os << " + ";
    print_term_prec(os, t.args[1], 1);
    if (prec > 0) os << ")";
    return;
  }
  if (t.head == "mul" && t.args.size() == 2) {
    if (prec > 1) os << "(";
    print_term_prec(os, t.args[0], 1);
    os << " * ";
    print_term_prec(os, t.args[1], 2);
    if (prec > 1) os << ")";
    return;
  }
  if (t.head == "neg" && t.args.size() == 1) {
    os << "-";
    print_term_prec(os, t.args[0], 2);
    return;
  }
  os << t.head;
  if (!t.args.empty()) {
    os << "(";
    for (size_t i = 0; i < t.args.size(); i++) {
      if (i) os << ", ";
      print_term_prec(os, t.args[i], 0);
    }
    os << ")";
  }
}

void print_bound(std::ostream& os, const Bound& b) {
  if (b.kind == Bound::Kind::SortSize)
    os << "sortsize";
  else
    os << b.value;
}

// Formula precedence: 0 or, 1 and, 2 atom.
void print_formula_prec(std::ostream& os, const Formula& f, int prec) {
  switch (f.kind) {
    case FKind::Truth:
      os << "true";
      return;
    case FKind::Falsity:
      os << "false";
      return;
    case FKind::RelAtom:
      os << f.name;
      if (!f.terms.empty()) {
        os << "(";
        for (size_t i = 0; i < f.terms.size(); i++) {
          if (i) os << ", ";
          print_term_prec(os, f.terms[i], 0);
        }
        os << ")";
      }
      return;
    case FKind::Eq:
      print_term_prec(os, f.terms[0], 0);
      os << " = ";
      print_term_prec(os, f.terms[1], 0);
      return;
    case FKind::And: {
      if (prec > 1) os << "(";
      for (size_t i = 0; i < f.sub.size(); i++) {
        if (i) os << " & ";
        print_formula_prec(os, f.sub[i], 2);
      }
      if (prec > 1) os << ")";
      return;
    }
    case FKind::Or: {
      if (prec > 0) os << "(";
      for (size_t i = 0; i < f.sub.size(); i++) {
        if (i) os << " | ";
        print_formula_prec(os, f.sub[i], 1);
      }
      if (prec > 0) os << ")";
      return;
    }
    case FKind::SchemaOr:
      os << "anyof " << f.name << "(";
      for (size_t i = 0; i < f.terms.size(); i++) {
        if (i) os << ", ";
        print_term_prec(os, f.terms[i], 0);
      }
      os << ") upto ";
      print_bound(os, f.bound);
      return;
    case FKind::Exists:
      os << "(ex " << f.name << ":" << f.sort << ". ";
      print_formula_prec(os, f.sub[0], 0);
      os << ")";
      return;
  }
}

}  // namespace

std::string print_term(const Term& t) {
  std::ostringstream os;
  print_term_prec(os, t, 0);
  return os.str();
}

std::string print_formula(const Formula& f) {
  std::ostringstream os;
  print_formula_prec(os, f, 0);
  return os.str();
}

std::string print_sequent(const Sequent& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.ctx.size(); i++) {
    if (i) os << ", ";
    os << s.ctx[i].first << ":" << s.ctx[i].second;
  }
  os << "] ";
  print_formula_prec(os, s.lhs, 0);
  os << " |- ";
  print_formula_prec(os, s.rhs, 0);
  return os.str();
}

std::string sequent_key(const Sequent& s) { return print_sequent(s); }

std::string print_theory(const Theory& t) {
  std::ostringstream os;
  os << "theory {\n";
  for (const auto& s : t.sig.sorts) os << "  sort " << s << ";\n";
  for (const auto& [r, ar] : t.sig.relations) {
    os << "  rel " << r;
    if (!ar.empty()) {
      os << " sub ";
      for (size_t i = 0; i < ar.size(); i++) {
        if (i) os << " * ";
        os << ar[i];
      }
    }
    os << ";\n";
  }
  for (const auto& [f, d] : t.sig.functions) {
    os << "  fun " << f << " : ";
    for (size_t i = 0; i < d.domain.size(); i++) {
      if (i) os << " * ";
      os << d.domain[i];
    }
    if (!d.domain.empty()) os << " -> ";
    os << d.codomain << ";\n";
  }
  for (const auto& a : t.axioms) os << "  axiom " << print_sequent(a) << ";\n";
  for (const auto& s : t.schemas) {
    os << "  axiomschema " << s.family << "(";
    for (size_t i = 0; i < s.args.size(); i++) {
      if (i) os << ", ";
      os << s.args[i];
    }
    os << ") upto ";
    print_bound(os, s.bound);
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Lexer {
  std::string src;
  size_t pos = 0;

  explicit Lexer(std::string s) : src(std::move(s)) {}

  void skip_ws() {
    while (pos < src.size()) {
      if (isspace(static_cast<unsigned char>(src[pos]))) {
        pos++;
      } else if (src[pos] == '#') {
        while (pos < src.size() && src[pos] != '\n') pos++;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool try_sym(const std::string& s) {
    skip_ws();
    if (src.compare(pos, s.size(), s) == 0) {
      // keyword-like symbols must not run into identifier characters
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
    if (!try_sym(s)) fail("expected '" + s + "'");
  }

  [[noreturn]] void fail(const std::string& msg) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i < pos && i < src.size(); i++) {
      if (src[i] == '\n') {
        line++;
        col = 1;
      } else {
        col++;
      }
    }
    throw ParseError("parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }

  bool peek_ident() {
    skip_ws();
    return pos < src.size() &&
           (isalpha(static_cast<unsigned char>(src[pos])) || src[pos] == '_');
  }

  Name ident() {
    skip_ws();
    if (!peek_ident()) fail("expected identifier");
    size_t start = pos;
    while (pos < src.size() && (isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) pos++;
    return src.substr(start, pos - start);
  }

  bool peek_number() {
    skip_ws();
    return pos < src.size() && isdigit(static_cast<unsigned char>(src[pos]));
  }

  uint64_t number() {
    skip_ws();
    if (!peek_number()) fail("expected number");
    uint64_t n = 0;
    while (pos < src.size() && isdigit(static_cast<unsigned char>(src[pos]))) {
      n = n * 10 + (src[pos] - '0');
      pos++;
    }
    return n;
  }
};

struct Parser {
  Lexer lex;
  explicit Parser(std::string s) : lex(std::move(s)) {}

  Bound bound() {
    if (lex.try_sym("sortsize")) return Bound::sort_size();
    return Bound::constant(lex.number());
  }

  Term term() { return sum(); }

  Term sum() {
    Term t = product();
    while (true) {
      if (lex.try_sym("+")) {
        Term r = product();
        t = Term::app("add", {t, r});
      } else {
        break;
      }
    }
    return t;
  }

  Term product() {
    Term t = factor();
    while (true) {
      if (lex.try_sym("*")) {
        Term r = factor();
        t = Term::app("mul", {t, r});
      } else {
        break;
      }
    }
    return t;
  }

  Term factor() {
    if (lex.try_sym("-")) return Term::app("neg", {factor()});
    Term base = atom_term();
    if (lex.try_sym("^")) {
      uint64_t n = lex.number();
      if (n == 0) return Term::app("one");
      base = power_term(base, n);
    }
    return base;
  }

  Term atom_term() {
    if (lex.peek_number()) {
      uint64_t n = lex.number();
      return numeral_term(n);
    }
    if (lex.try_sym("(")) {
      Term t = term();
      lex.expect(")");
      return t;
    }
    Name id = lex.ident();
    if (lex.try_sym("(")) {
      std::vector<Term> args;
      if (!lex.try_sym(")")) {
        args.push_back(term());
        while (lex.try_sym(",")) args.push_back(term());
        lex.expect(")");
      }
      return Term::app(id, std::move(args));
    }
    return Term::mkvar(id);  // resolved to a constant later if known 0-ary fun
  }

  Formula formula() { return disj(); }

  bool try_or_bar() {
    lex.skip_ws();
    if (lex.pos < lex.src.size() && lex.src[lex.pos] == '|' &&
        (lex.pos + 1 >= lex.src.size() || lex.src[lex.pos + 1] != '-')) {
      lex.pos++;
      return true;
    }
    return false;
  }

  Formula disj() {
    std::vector<Formula> fs{conj()};
    while (try_or_bar()) fs.push_back(conj());
    if (fs.size() == 1) return fs[0];
    return Formula::disj(std::move(fs));
  }

  Formula conj() {
    std::vector<Formula> fs{prim()};
    while (lex.try_sym("&")) fs.push_back(prim());
    if (fs.size() == 1) return fs[0];
    return Formula::conj(std::move(fs));
  }

  Formula prim() {
    if (lex.try_sym("true")) return Formula::truth();
    if (lex.try_sym("false")) return Formula::falsity();
    if (lex.try_sym("ex")) {
      Name v = lex.ident();
      lex.expect(":");
      Name s = lex.ident();
      lex.expect(".");
      Formula body = disj();
      return Formula::exists(v, s, std::move(body));
    }
    if (lex.try_sym("inv")) {
      // reserved sugar: inv(t) = ex w. t * w = 1
      lex.expect("(");
      Term t = term();
      lex.expect(")");
      std::set<Name> used;
      collect_term_vars(t, used);
      Name w = fresh_name("w", used);
      return Formula::exists(
          w, "A", Formula::eq(Term::app("mul", {t, Term::mkvar(w)}), Term::app("one")));
    }
    if (lex.try_sym("anyof")) {
      Name fam = lex.ident();
      lex.expect("(");
      std::vector<Term> args;
      if (!lex.try_sym(")")) {
        args.push_back(term());
        while (lex.try_sym(",")) args.push_back(term());
        lex.expect(")");
      }
      lex.expect("upto");
      Bound b = bound();
      return Formula::schema_or(fam, std::move(args), b);
    }
    lex.skip_ws();
    size_t before_paren = lex.pos;
    if (lex.try_sym("(")) {
      // Either a parenthesized formula or a parenthesized term inside an
      // equality / arithmetic expression.
      try {
        Formula f = formula();
        if (lex.peek() == ')') {
          lex.expect(")");
          char next = lex.peek();
          if (next != '=' && next != '+' && next != '*' && next != '^') return f;
        }
      } catch (const ParseError&) {
      }
      lex.pos = before_paren;
      Term t = term();
      lex.expect("=");
      Term r = term();
      return Formula::eq(std::move(t), std::move(r));
    }
    // RelAtom or equality over terms.
    size_t save = lex.pos;
    if (lex.peek_ident()) {
      Name id = lex.ident();
      if (lex.try_sym("(")) {
        std::vector<Term> args;
        if (!lex.try_sym(")")) {
          args.push_back(term());
          while (lex.try_sym(",")) args.push_back(term());
          lex.expect(")");
        }
        // If an '=' or arithmetic operator follows, it was a term application.
        if (lex.peek() == '=' || lex.peek() == '+' || lex.peek() == '*' || lex.peek() == '^') {
          lex.pos = save;
        } else {
          return Formula::rel(id, std::move(args));
        }
      } else if (lex.peek() != '=' && lex.peek() != '+' && lex.peek() != '*' && lex.peek() != '^' &&
                 lex.peek() != '-') {
        return Formula::rel(id, {});  // bare proposition symbol
      } else {
        lex.pos = save;
      }
    }
    Term t = term();
    lex.expect("=");
    Term r = term();
    return Formula::eq(std::move(t), std::move(r));
  }

  Context context() {
    Context ctx;
    lex.expect("[");
    if (!lex.try_sym("]")) {
      do {
        Name v = lex.ident();
        lex.expect(":");
        Name s = lex.ident();
        ctx.emplace_back(v, s);
      } while (lex.try_sym(","));
      lex.expect("]");
    }
    return ctx;
  }

  Sequent sequent() {
    Sequent q;
    q.ctx = context();
    q.lhs = formula();
    lex.expect("|-");
    q.rhs = formula();
    return q;
  }

  Theory theory() {
    Theory t;
    lex.expect("theory");
    lex.expect("{");
    while (!lex.try_sym("}")) {
      if (lex.try_sym("sort")) {
        t.sig.sorts.insert(lex.ident());
        lex.expect(";");
      } else if (lex.try_sym("rel")) {
        Name r = lex.ident();
        std::vector<Name> ar;
        if (lex.try_sym("sub")) {
          ar.push_back(lex.ident());
          while (lex.try_sym("*")) ar.push_back(lex.ident());
        }
        t.sig.relations[r] = ar;
        lex.expect(";");
      } else if (lex.try_sym("fun")) {
        Name f = lex.ident();
        lex.expect(":");
        std::vector<Name> parts;
        parts.push_back(lex.ident());
        while (lex.try_sym("*")) parts.push_back(lex.ident());
        FunDecl d;
        if (lex.try_sym("->")) {
          d.domain = parts;
          d.codomain = lex.ident();
        } else {
          if (parts.size() != 1) lex.fail("constant declarations take a single sort");
          d.codomain = parts[0];
        }
        t.sig.functions[f] = d;
        lex.expect(";");
      } else if (lex.try_sym("axiomschema")) {
        AxiomSchema s;
        s.family = lex.ident();
        lex.expect("(");
        if (!lex.try_sym(")")) {
          s.args.push_back(lex.ident());
          while (lex.try_sym(",")) s.args.push_back(lex.ident());
          lex.expect(")");
        }
        lex.expect("upto");
        s.bound = bound();
        t.schemas.push_back(s);
        lex.expect(";");
      } else if (lex.try_sym("axiom")) {
        t.axioms.push_back(sequent());
        lex.expect(";");
      } else {
        lex.fail("expected theory item");
      }
    }
    return t;
  }
};

// Variables that are actually 0-ary function symbols get re-tagged as
// applications once the full signature is known.
Term resolve_constants_term(const Term& t, const Signature& sig) {
  if (t.var) {
    auto it = sig.functions.find(t.head);
    if (it != sig.functions.end() && it->second.domain.empty()) return Term::app(t.head);
    return t;
  }
  Term out = t;
  for (auto& a : out.args) a = resolve_constants_term(a, sig);
  return out;
}

Formula resolve_constants(const Formula& f, const Signature& sig) {
  Formula out = f;
  for (auto& t : out.terms) t = resolve_constants_term(t, sig);
  for (auto& g : out.sub) g = resolve_constants(g, sig);
  // A bare identifier parsed as a 0-ary relation might be a relation; if it
  // is not declared but matches a 0-ary relation, leave as is.
  return out;
}

}  // namespace

Term parse_term(const std::string& text) {
  Parser p(text);
  Term t = p.term();
  if (!p.lex.eof()) p.lex.fail("trailing input");
  return t;
}

Formula parse_formula(const std::string& text) {
  Parser p(text);
  Formula f = p.formula();
  if (!p.lex.eof()) p.lex.fail("trailing input");
  return f;
}

Theory parse_theory(const std::string& text) {
  Parser p(text);
  Theory t = p.theory();
  if (!p.lex.eof()) p.lex.fail("trailing input");
  for (auto& a : t.axioms) {
    a.lhs = resolve_constants(a.lhs, t.sig);
    a.rhs = resolve_constants(a.rhs, t.sig);
  }
  return t;
}

std::string print_extension(const TheoryExtension& e) {
  std::ostringstream os;
  os << "extension {\n";
  {
    std::istringstream base(print_theory(e.base));
    std::string line;
    os << "  base ";
    bool first = true;
    while (std::getline(base, line)) {
      if (!first) os << "  ";
      os << line << "\n";
      first = false;
    }
  }
  for (const auto& s : e.delta_sorts) os << "  sort " << s << ";\n";
  for (const auto& [r, ar] : e.delta_relations) {
    os << "  rel " << r;
    if (!ar.empty()) {
      os << " sub ";
      for (size_t i = 0; i < ar.size(); i++) {
        if (i) os << " * ";
        os << ar[i];
      }
    }
    os << ";\n";
  }
  for (const auto& [f, d] : e.delta_functions) {
    os << "  fun " << f << " : ";
    for (size_t i = 0; i < d.domain.size(); i++) {
      if (i) os << " * ";
      os << d.domain[i];
    }
    if (!d.domain.empty()) os << " -> ";
    os << d.codomain << ";\n";
  }
  for (const auto& a : e.delta_axioms) os << "  axiom " << print_sequent(a) << ";\n";
  for (const auto& s : e.delta_schemas) {
    os << "  axiomschema " << s.family << "(";
    for (size_t i = 0; i < s.args.size(); i++) {
      if (i) os << ", ";
      os << s.args[i];
    }
    os << ") upto ";
    print_bound(os, s.bound);
    os << ";\n";
  }
  for (const auto& a : e.obligations) os << "  obligation " << print_sequent(a) << ";\n";
  os << "}\n";
  return os.str();
}

TheoryExtension parse_extension(const std::string& text) {
  Parser p(text);
  p.lex.expect("extension");
  p.lex.expect("{");
  p.lex.expect("base");
  TheoryExtension e;
  e.base = p.theory();
  Theory delta;  // collect delta items through the theory-item grammar
  while (!p.lex.try_sym("}")) {
    if (p.lex.try_sym("sort")) {
      delta.sig.sorts.insert(p.lex.ident());
      p.lex.expect(";");
    } else if (p.lex.try_sym("rel")) {
      Name r = p.lex.ident();
      std::vector<Name> ar;
      if (p.lex.try_sym("sub")) {
        ar.push_back(p.lex.ident());
        while (p.lex.try_sym("*")) ar.push_back(p.lex.ident());
      }
      delta.sig.relations[r] = ar;
      p.lex.expect(";");
    } else if (p.lex.try_sym("fun")) {
      Name f = p.lex.ident();
      p.lex.expect(":");
      std::vector<Name> parts;
      parts.push_back(p.lex.ident());
      while (p.lex.try_sym("*")) parts.push_back(p.lex.ident());
      FunDecl d;
      if (p.lex.try_sym("->")) {
        d.domain = parts;
        d.codomain = p.lex.ident();
      } else {
        if (parts.size() != 1) p.lex.fail("constant declarations take a single sort");
        d.codomain = parts[0];
      }
      delta.sig.functions[f] = d;
      p.lex.expect(";");
    } else if (p.lex.try_sym("axiomschema")) {
      AxiomSchema s;
      s.family = p.lex.ident();
      p.lex.expect("(");
      if (!p.lex.try_sym(")")) {
        s.args.push_back(p.lex.ident());
        while (p.lex.try_sym(",")) s.args.push_back(p.lex.ident());
        p.lex.expect(")");
      }
      p.lex.expect("upto");
      s.bound = p.bound();
      delta.schemas.push_back(s);
      p.lex.expect(";");
    } else if (p.lex.try_sym("axiom")) {
      e.delta_axioms.push_back(p.sequent());
      p.lex.expect(";");
    } else if (p.lex.try_sym("obligation")) {
      e.obligations.push_back(p.sequent());
      p.lex.expect(";");
    } else {
      p.lex.fail("expected extension item");
    }
  }
  if (!p.lex.eof()) p.lex.fail("trailing input");
  e.delta_sorts = delta.sig.sorts;
  e.delta_relations = delta.sig.relations;
  e.delta_functions = delta.sig.functions;
  e.delta_schemas = delta.schemas;
  Signature full = Signature::merged(e.base.sig, e.delta_signature());
  for (auto& a : e.delta_axioms) {
    a.lhs = resolve_constants(a.lhs, full);
    a.rhs = resolve_constants(a.rhs, full);
  }
  for (auto& a : e.obligations) {
    a.lhs = resolve_constants(a.lhs, full);
    a.rhs = resolve_constants(a.rhs, full);
  }
  return e;
}

std::string diff_theories(const Theory& a, const Theory& b) {
  Theory na = normalize(a), nb = normalize(b);
  if (na == nb) return "";
  std::ostringstream os;
  if (na.sig != nb.sig) {
    for (const auto& s : na.sig.sorts)
      if (!nb.sig.sorts.count(s)) os << "- sort " << s << "\n";
    for (const auto& s : nb.sig.sorts)
      if (!na.sig.sorts.count(s)) os << "+ sort " << s << "\n";
    for (const auto& [r, ar] : na.sig.relations)
      if (!nb.sig.relations.count(r) || nb.sig.relations.at(r) != ar) os << "- rel " << r << "\n";
    for (const auto& [r, ar] : nb.sig.relations)
      if (!na.sig.relations.count(r) || na.sig.relations.at(r) != ar) os << "+ rel " << r << "\n";
    for (const auto& [f, d] : na.sig.functions)
      if (!nb.sig.functions.count(f) || nb.sig.functions.at(f) != d) os << "- fun " << f << "\n";
    for (const auto& [f, d] : nb.sig.functions)
      if (!na.sig.functions.count(f) || na.sig.functions.at(f) != d) os << "+ fun " << f << "\n";
  }
  auto in = [](const std::vector<Sequent>& v, const Sequent& s) {
    for (const auto& x : v)
      if (x == s) return true;
    return false;
  };
  for (const auto& s : na.axioms)
    if (!in(nb.axioms, s)) os << "- axiom " << print_sequent(s) << "\n";
  for (const auto& s : nb.axioms)
    if (!in(na.axioms, s)) os << "+ axiom " << print_sequent(s) << "\n";
  auto ins = [](const std::vector<AxiomSchema>& v, const AxiomSchema& s) {
    for (const auto& x : v)
      if (x == s) return true;
    return false;
  };
  for (const auto& s : na.schemas)
    if (!ins(nb.schemas, s)) os << "- axiomschema " << s.family << "\n";
  for (const auto& s : nb.schemas)
    if (!ins(na.schemas, s)) os << "+ axiomschema " << s.family << "\n";
  if (os.str().empty()) os << "(differs)\n";
  return os.str();
}

}  // namespace geoth
