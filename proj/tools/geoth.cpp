// Command-line front end: DSL parsing, transformations, gluing, model
// checking, divided-power arithmetic and topology exploration.
//
// Exit codes: 0 ok, 1 parse error, 2 semantic precondition failure,
// 3 check/diff mismatch.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "geoth/dsl.hpp"
#include "geoth/gluing.hpp"
#include "geoth/library.hpp"
#include "geoth/model.hpp"
#include "geoth/pd.hpp"
#include "geoth/topology.hpp"

using namespace geoth;

namespace {

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// ---------------------------------------------------------------------------
// Cover-spec dialects
//
//   zariski {
//     flavor economical;  loc finite;
//     chart a ring Z [ X1 ];
//     chart b ring Z [ X2 ];
//     overlap a b { f a : X1; f b : X2; transition a b : X1 -> X2^-1; ... }
//   }
//   localic {
//     loc finite;
//     base ring Zmod 2 [ ];
//     chart a constants [ c1 ];
//     overlap a b : inv(c1);
//     quotient a b { axiom [] true |- c1 * c2 = 1; }
//   }
//   cris {
//     loc finite; gammabound 4;
//     chart a { K Zmod 4 [ ] ideal [ 2 ]; R Zmod 2 [ ]; }
//   }

struct SpecLex {
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
    if (!try_sym(s)) throw ParseError("spec parse error: expected '" + s + "'");
  }
  Name ident() {
    skip();
    size_t start = pos;
    while (pos < src.size() && (isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) pos++;
    if (start == pos) throw ParseError("spec parse error: expected identifier");
    return src.substr(start, pos - start);
  }
  int64_t integer() {
    skip();
    bool neg = try_sym("-");
    size_t start = pos;
    while (pos < src.size() && isdigit(static_cast<unsigned char>(src[pos]))) pos++;
    if (start == pos) throw ParseError("spec parse error: expected integer");
    int64_t v = std::stoll(src.substr(start, pos - start));
    return neg ? -v : v;
  }
  bool peek(const std::string& s) {
    size_t save = pos;
    bool ok = try_sym(s);
    pos = save;
    return ok;
  }
};

PresentedRing parse_ring_decl(SpecLex& lx) {
  // ring (Z | Q | Zmod m) [ gens ] [ localized g ]
  lx.expect("ring");
  PresentedRing r;
  if (lx.try_sym("Zmod")) {
    r = PresentedRing::Zmod(static_cast<uint64_t>(lx.integer()));
  } else if (lx.try_sym("Z")) {
    r = PresentedRing::Z();
  } else if (lx.try_sym("Q")) {
    r = PresentedRing::Q();
  } else {
    throw ParseError("spec parse error: expected base ring tag");
  }
  lx.expect("[");
  std::vector<Name> gens;
  if (!lx.try_sym("]")) {
    gens.push_back(lx.ident());
    while (lx.try_sym(",")) gens.push_back(lx.ident());
    lx.expect("]");
  }
  r.gens = gens;
  return r;
}

// Laurent polynomial literal over a ring: sums of monomials.
Poly parse_poly(SpecLex& lx, const PresentedRing& K) {
  auto mono = [&]() {
    Poly acc = K.one();
    bool neg = false;
    lx.skip();
    if (lx.try_sym("-")) neg = true;
    bool any = false;
    while (true) {
      lx.skip();
      if (lx.pos < lx.src.size() && isdigit(static_cast<unsigned char>(lx.src[lx.pos]))) {
        acc = acc * K.from_int(Int(lx.integer()));
        any = true;
      } else if (lx.pos < lx.src.size() &&
                 (isalpha(static_cast<unsigned char>(lx.src[lx.pos])) || lx.src[lx.pos] == '_')) {
        size_t save = lx.pos;
        Name g = lx.ident();
        bool found = false;
        for (size_t i = 0; i < K.gens.size(); i++) {
          if (K.gens[i] == g) {
            int64_t e = 1;
            if (lx.try_sym("^")) e = lx.integer();
            Poly p;
            Monomial m(K.nvars(), 0);
            m[i] = e;
            p.coeffs[m] = K.scalar_one();
            acc = acc * p;
            found = true;
          }
        }
        if (!found) {
          lx.pos = save;
          break;
        }
        any = true;
      } else {
        break;
      }
      if (!lx.try_sym("*")) break;
    }
    if (!any) throw ParseError("spec parse error: expected polynomial");
    return neg ? -acc : acc;
  };
  Poly p = mono();
  while (true) {
    lx.skip();
    if (lx.try_sym("+")) {
      p = p + mono();
    } else if (lx.peek("-")) {
      p = p + mono();
    } else {
      break;
    }
  }
  return p;
}

AlgFlavor parse_flavor(SpecLex& lx) {
  if (lx.try_sym("economical")) return AlgFlavor::Economical;
  if (lx.try_sym("schematic")) return AlgFlavor::Schematic;
  throw ParseError("spec parse error: expected flavor");
}

LocVariant parse_loc(SpecLex& lx) {
  if (lx.try_sym("finite")) return LocVariant::Finite;
  if (lx.try_sym("schematic")) return LocVariant::Schematic;
  throw ParseError("spec parse error: expected loc variant");
}

// Generator-image transitions; builds the (lambda', n) callable.
struct TransitionTable {
  // (from, to) -> per overlap index j -> map gen index -> Laurent image
  std::map<std::pair<Name, Name>, std::map<size_t, std::map<size_t, Poly>>> images;
  std::map<Name, PresentedRing> rings;
  std::map<std::pair<Name, Name>, std::vector<std::pair<Poly, Poly>>> fs;

  std::pair<Poly, unsigned> apply(const Name& from, const Name& to, size_t j,
                                  const Poly& lam) const {
    const PresentedRing& Kf = rings.at(from);
    const PresentedRing& Kt = rings.at(to);
    auto key = std::make_pair(from, to);
    const auto& gen_img = images.at(key).at(j);
    // substitute generators, computing in the localized target ring
    Poly out;
    for (const auto& [m, c] : lam.coeffs) {
      Poly term = Poly::constant(Scalar::of_int(
                                     c.tag == Scalar::Tag::Z ? c.z : Int(c.m), Kt.base, Kt.mod),
                                 Kt.nvars());
      if (c.tag == Scalar::Tag::Q) throw PreconditionError("rational chart coefficients unsupported");
      for (size_t i = 0; i < m.size(); i++) {
        for (int64_t e = 0; e < m[i]; e++) term = term * gen_img.at(i);
        if (m[i] < 0) throw PreconditionError("negative exponents in chart elements unsupported");
      }
      out = out + term;
    }
    // clear denominators: f_to is the overlap element on the target side
    auto fkey = from < to ? std::make_pair(from, to) : std::make_pair(to, from);
    const Poly& f_to = (to == fkey.first) ? fs.at(fkey).at(j).first : fs.at(fkey).at(j).second;
    // find the localized variable: f must be a single generator monomial
    std::optional<size_t> fvar;
    if (f_to.coeffs.size() == 1) {
      const auto& [m, c] = *f_to.coeffs.begin();
      size_t nz = 0, idx = 0;
      for (size_t i = 0; i < m.size(); i++)
        if (m[i] != 0) {
          nz++;
          idx = i;
        }
      if (nz == 1 && m[idx] == 1 && c.is_one()) fvar = idx;
    }
    if (!fvar) {
      // f is not a plain generator: images must already be polynomial
      for (const auto& [m, c] : out.coeffs)
        for (int64_t e : m)
          if (e < 0)
            throw PreconditionError("transition image has denominators but f is not a generator");
      return {out, 0};
    }
    int64_t minexp = 0;
    for (const auto& [m, c] : out.coeffs) minexp = std::min(minexp, m[*fvar]);
    unsigned n = static_cast<unsigned>(-minexp);
    Poly shifted;
    for (const auto& [m, c] : out.coeffs) {
      Monomial mm = m;
      mm[*fvar] += n;
      shifted.coeffs[mm] = c;
    }
    return {shifted, n};
  }
};

Theory glue_from_spec(const std::string& text, uint64_t gamma_bound_override) {
  SpecLex lx{text};
  if (lx.try_sym("zariski")) {
    lx.expect("{");
    ZariskiCoverSpec spec;
    auto table = std::make_shared<TransitionTable>();
    while (!lx.try_sym("}")) {
      if (lx.try_sym("flavor")) {
        spec.flavor = parse_flavor(lx);
        lx.expect(";");
      } else if (lx.try_sym("loc")) {
        spec.loc = parse_loc(lx);
        lx.expect(";");
      } else if (lx.try_sym("chart")) {
        Name c = lx.ident();
        spec.charts.push_back(c);
        spec.rings[c] = parse_ring_decl(lx);
        lx.expect(";");
      } else if (lx.try_sym("overlap")) {
        Name i = lx.ident();
        Name j = lx.ident();
        auto key = i < j ? std::make_pair(i, j) : std::make_pair(j, i);
        lx.expect("{");
        ZariskiOverlap ov;
        while (!lx.try_sym("}")) {
          if (lx.try_sym("f")) {
            Name side1 = lx.ident();
            lx.expect(":");
            Poly f1 = parse_poly(lx, spec.rings.at(side1));
            lx.expect(",");
            Name side2 = lx.ident();
            lx.expect(":");
            Poly f2 = parse_poly(lx, spec.rings.at(side2));
            lx.expect(";");
            if (side1 == key.first)
              ov.fs.emplace_back(f1, f2);
            else
              ov.fs.emplace_back(f2, f1);
          } else if (lx.try_sym("transition")) {
            Name from = lx.ident();
            Name to = lx.ident();
            lx.expect(":");
            size_t jidx = ov.fs.empty() ? 0 : ov.fs.size() - 1;
            std::map<size_t, Poly>& img = table->images[{from, to}][jidx];
            const PresentedRing& Kf = spec.rings.at(from);
            do {
              Name g = lx.ident();
              lx.expect("->");
              Poly p = parse_poly(lx, spec.rings.at(to));
              bool found = false;
              for (size_t gi = 0; gi < Kf.gens.size(); gi++)
                if (Kf.gens[gi] == g) {
                  img[gi] = p;
                  found = true;
                }
              if (!found) throw ParseError("spec parse error: unknown generator " + g);
            } while (lx.try_sym(","));
            lx.expect(";");
          } else {
            throw ParseError("spec parse error: expected f/transition");
          }
        }
        spec.overlaps[key] = ov;
      } else {
        throw ParseError("spec parse error: expected zariski item");
      }
    }
    table->rings = spec.rings;
    for (const auto& [k, ov] : spec.overlaps) table->fs[k] = ov.fs;
    spec.transition = [table](const Name& from, const Name& to, size_t j, const Poly& lam) {
      return table->apply(from, to, j, lam);
    };
    if (!spec.overlaps.empty()) check_zariski_transitions(spec);
    return glue_zariski(spec);
  }
  if (lx.try_sym("localic")) {
    lx.expect("{");
    LocalicGlueSpec spec;
    LocVariant loc = LocVariant::Finite;
    PresentedRing K = PresentedRing::Z();
    bool base_set = false;
    std::vector<std::pair<Name, std::vector<Name>>> chart_consts;
    std::vector<std::tuple<Name, Name, std::string>> overlaps;
    std::vector<std::tuple<Name, Name, std::string>> quotients;
    while (!lx.try_sym("}")) {
      if (lx.try_sym("loc")) {
        loc = parse_loc(lx);
        lx.expect(";");
      } else if (lx.try_sym("base")) {
        K = parse_ring_decl(lx);
        base_set = true;
        lx.expect(";");
      } else if (lx.try_sym("chart")) {
        Name c = lx.ident();
        lx.expect("constants");
        lx.expect("[");
        std::vector<Name> cs;
        if (!lx.try_sym("]")) {
          cs.push_back(lx.ident());
          while (lx.try_sym(",")) cs.push_back(lx.ident());
          lx.expect("]");
        }
        lx.expect(";");
        chart_consts.emplace_back(c, cs);
      } else if (lx.try_sym("overlap")) {
        Name i = lx.ident();
        Name j = lx.ident();
        lx.expect(":");
        // formula text up to ';'
        lx.skip();
        size_t start = lx.pos;
        while (lx.pos < lx.src.size() && lx.src[lx.pos] != ';') lx.pos++;
        std::string ftext = lx.src.substr(start, lx.pos - start);
        lx.expect(";");
        overlaps.emplace_back(i, j, ftext);
      } else if (lx.try_sym("quotient")) {
        Name i = lx.ident();
        Name j = lx.ident();
        lx.expect("{");
        size_t start = lx.pos;
        int depth = 1;
        while (lx.pos < lx.src.size() && depth > 0) {
          if (lx.src[lx.pos] == '{') depth++;
          if (lx.src[lx.pos] == '}') depth--;
          if (depth > 0) lx.pos++;
        }
        std::string qtext = lx.src.substr(start, lx.pos - start);
        lx.expect("}");
        quotients.emplace_back(i, j, qtext);
      } else {
        throw ParseError("spec parse error: expected localic item");
      }
    }
    (void)base_set;
    Theory t0 = alg(K, AlgFlavor::Economical);
    TheoryExtension locx = builtin_loc(loc);
    locx.base = t0;
    t0 = apply_extension_raw(t0, locx);
    spec.t0 = t0;
    // chart extensions: constants on sort A
    for (const auto& [c, cs] : chart_consts) {
      spec.charts.push_back(c);
      TheoryExtension e;
      e.base = t0;
      for (const auto& cn : cs) e.delta_functions[cn] = FunDecl{{}, "A"};
      spec.exts[c] = e;
    }
    // formulas are parsed against the merged signature (constants resolved)
    auto parse_chart_formula = [&](const std::string& ftext, const Name& chart) {
      Theory env = apply_extension_raw(t0, spec.exts.at(chart));
      Theory dummy = env;
      std::string doc = print_theory(dummy);
      doc.insert(doc.rfind('}'), "axiom [] true |- " + ftext + ";\n");
      Theory parsed = parse_theory(doc);
      return parsed.axioms.back().rhs;
    };
    for (const auto& [i, j, ftext] : overlaps) spec.overlaps[{i, j}] = parse_chart_formula(ftext, i);
    for (const auto& [i, j, qtext] : quotients) {
      TheoryExtension both = sum(spec.exts.at(i), spec.exts.at(j));
      Theory env = apply_extension_raw(t0, both);
      std::string doc = print_theory(env);
      doc.insert(doc.rfind('}'), qtext);
      Theory parsed = parse_theory(doc);
      std::vector<Sequent> qs(parsed.axioms.begin() + env.axioms.size(), parsed.axioms.end());
      auto key = i < j ? std::make_pair(i, j) : std::make_pair(j, i);
      spec.diag_quotients[key] = qs;
    }
    return glue_localic(spec);
  }
  if (lx.try_sym("cris")) {
    lx.expect("{");
    CrystallineCoverSpec spec;
    while (!lx.try_sym("}")) {
      if (lx.try_sym("loc")) {
        spec.loc = parse_loc(lx);
        lx.expect(";");
      } else if (lx.try_sym("gammabound")) {
        spec.gamma_bound = static_cast<unsigned>(lx.integer());
        lx.expect(";");
      } else if (lx.try_sym("chart")) {
        Name c = lx.ident();
        lx.expect("{");
        CrystallineChart chart;
        while (!lx.try_sym("}")) {
          if (lx.try_sym("K")) {
            chart.K.ring = parse_ring_decl(lx);
            lx.expect("ideal");
            lx.expect("[");
            if (!lx.try_sym("]")) {
              chart.K.ideal_gens.push_back(parse_poly(lx, chart.K.ring));
              while (lx.try_sym(",")) chart.K.ideal_gens.push_back(parse_poly(lx, chart.K.ring));
              lx.expect("]");
            }
            lx.expect(";");
          } else if (lx.try_sym("R")) {
            chart.R = parse_ring_decl(lx);
            lx.expect(";");
          } else {
            throw ParseError("spec parse error: expected K/R");
          }
        }
        // derive the gamma table for prime-power data; otherwise require
        // trivial ideal
        if (!chart.K.ideal_gens.empty()) {
          if (chart.K.ring.base == Scalar::Tag::Zmod && chart.K.ideal_gens.size() == 1) {
            uint64_t m = chart.K.ring.mod;
            uint64_t p = chart.K.ideal_gens[0].coeffs.begin()->second.m;
            unsigned k = 0;
            uint64_t mm = m;
            while (mm % p == 0 && mm > 1) {
              mm /= p;
              k++;
            }
            if (mm != 1) throw PreconditionError("cris spec: ideal data must be (p) in Z/p^k");
            chart.K = PDRingData::prime_power(p, k, std::max(8u, spec.gamma_bound * 2));
          } else {
            throw PreconditionError("cris spec: unsupported PD data");
          }
        } else {
          chart.K.cutoff = 8;
        }
        spec.data[c] = chart;
        spec.charts.push_back(c);
      } else {
        throw ParseError("spec parse error: expected cris item");
      }
    }
    if (gamma_bound_override) spec.gamma_bound = static_cast<unsigned>(gamma_bound_override);
    return glue_crystalline(spec);
  }
  throw ParseError("spec parse error: expected zariski/localic/cris block");
}

// ---------------------------------------------------------------------------
// PD element expressions: sums of products of g<k>(X), Y^e, integer scalars.

PDElement parse_pd_element(const std::string& text, const TruncatedPDAlgebra& alg) {
  SpecLex lx{text};
  auto factor = [&]() -> PDElement {
    lx.skip();
    if (lx.pos < lx.src.size() && isdigit(static_cast<unsigned char>(lx.src[lx.pos]))) {
      return alg.from_int(Int(lx.integer()));
    }
    Name id = lx.ident();
    if (id.size() >= 2 && id[0] == 'g' && isdigit(static_cast<unsigned char>(id[1]))) {
      unsigned n = static_cast<unsigned>(std::stoul(id.substr(1)));
      lx.expect("(");
      Name v = lx.ident();
      lx.expect(")");
      for (size_t i = 0; i < alg.xvars.size(); i++)
        if (alg.xvars[i] == v) return alg.gamma_x(i, n);
      throw ParseError("pd parse error: unknown X variable " + v);
    }
    for (size_t j = 0; j < alg.yvars.size(); j++) {
      if (alg.yvars[j] == id) {
        int64_t e = 1;
        if (lx.try_sym("^")) e = lx.integer();
        return alg.yvar(j, e);
      }
    }
    for (size_t i = 0; i < alg.xvars.size(); i++)
      if (alg.xvars[i] == id) return alg.gamma_x(i, 1);
    throw ParseError("pd parse error: unknown variable " + id);
  };
  auto mono = [&]() -> PDElement {
    bool neg = lx.try_sym("-");
    PDElement acc = factor();
    while (lx.try_sym("*")) acc = alg.mul(acc, factor());
    return neg ? alg.neg(acc) : acc;
  };
  PDElement p = mono();
  while (true) {
    lx.skip();
    if (lx.try_sym("+"))
      p = alg.add(p, mono());
    else
      break;
  }
  lx.skip();
  if (lx.pos != lx.src.size()) throw ParseError("pd parse error: trailing input");
  return p;
}

TruncatedPDAlgebra algebra_from_flags(const std::string& base, uint64_t mod,
                                      const std::vector<std::string>& xs,
                                      const std::vector<std::string>& ys, unsigned trunc,
                                      const std::string& ideal) {
  Scalar::Tag tag;
  if (base == "Q")
    tag = Scalar::Tag::Q;
  else if (base == "Z")
    tag = Scalar::Tag::Z;
  else if (base == "Zmod")
    tag = Scalar::Tag::Zmod;
  else
    throw PreconditionError("unknown base ring tag: " + base);
  TruncatedPDAlgebra alg = TruncatedPDAlgebra::make(
      tag, mod, std::vector<Name>(xs.begin(), xs.end()), std::vector<Name>(ys.begin(), ys.end()),
      trunc);
  if (!ideal.empty()) {
    // base PD data of shape p^k (Z/p^k, (p))
    if (tag != Scalar::Tag::Zmod)
      throw PreconditionError("base ideal data is only supported over Zmod");
    uint64_t p = std::stoull(ideal);
    unsigned k = 0;
    uint64_t mm = mod;
    while (mm % p == 0 && mm > 1) {
      mm /= p;
      k++;
    }
    if (mm != 1) throw PreconditionError("base ideal must be (p) in Z/p^k");
    alg.base_pd = PDRingData::prime_power(p, k, std::max(8u, trunc * 2));
  }
  return alg;
}

// Set-model literal for topo commands: per-sort sizes and function tables.
PresheafModel parse_family_model(const ModelFamilyPlugin& plugin, const std::string& text) {
  // "A=2,B=1;f=0,0"  (sorts then functions, tables comma-separated)
  PresheafModel M;
  M.sig = plugin.base.sig;
  M.poset = FinitePoset::single();
  for (const auto& s : M.sig.sorts) {
    SortTable t;
    t.size = {0};
    t.elem_names.resize(1);
    M.sorts[s] = t;
  }
  for (const auto& [r, ar] : M.sig.relations) M.rels[r][0] = {};
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ';')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("model literal: expected name=...");
    std::string name = item.substr(0, eq);
    std::string rest = item.substr(eq + 1);
    if (M.sig.sorts.count(name)) {
      M.sorts[name].size[0] = std::stoul(rest);
    } else if (M.sig.functions.count(name)) {
      std::vector<size_t> table;
      std::istringstream rs(rest);
      std::string v;
      while (std::getline(rs, v, ',')) {
        if (!v.empty()) table.push_back(std::stoul(v));
      }
      M.funs[name][0] = table;
    } else {
      throw ParseError("model literal: unknown symbol " + name);
    }
  }
  for (const auto& [f, d] : M.sig.functions)
    if (!M.funs.count(f)) M.funs[f][0] = {};
  M.validate();
  return M;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geometric theory workbench"};
  app.require_subcommand(1);
  uint64_t expand_schemas_level = 0;
  app.add_option("--expand-schemas", expand_schemas_level,
                 "force finite expansion of schema families to this level");
  bool serial = false;
  app.add_flag("--serial", serial, "use the serial reference kernels");

  // check
  std::string check_file;
  auto* c_check = app.add_subcommand("check", "well-formedness of a theory document");
  c_check->add_option("file", check_file)->required();

  // transform
  auto* c_tr = app.add_subcommand("transform", "extension transformations");
  std::string tr_file, tr_conditional;
  std::vector<std::string> tr_sum;
  bool tr_desugar = false;
  c_tr->add_option("file", tr_file);
  c_tr->add_flag("--desugar", tr_desugar);
  c_tr->add_option("--conditional", tr_conditional, "closed formula phi");
  c_tr->add_option("--sum", tr_sum, "extension files to sum")->expected(2);

  // glue
  auto* c_glue = app.add_subcommand("glue", "compile cover data into a glued theory");
  std::string glue_kind, glue_file;
  c_glue->add_option("kind", glue_kind, "zariski|cris|localic|general")->required();
  c_glue->add_option("spec", glue_file)->required();
  bool glue_eliminate = false;
  c_glue->add_flag("--eliminate-props", glue_eliminate);

  // model
  auto* c_model = app.add_subcommand("model", "finite presheaf model commands");
  std::string model_cmd, model_file, model_theory;
  uint64_t model_bound = 2;
  c_model->add_option("cmd", model_cmd, "check|enum-ext")->required();
  c_model->add_option("model", model_file)->required();
  c_model->add_option("theory", model_theory)->required();
  c_model->add_option("--bound", model_bound);

  // pd
  auto* c_pd = app.add_subcommand("pd", "divided-power arithmetic");
  std::string pd_cmd, pd_expr, pd_base = "Q", pd_ideal;
  std::vector<std::string> pd_x{"X"}, pd_y;
  uint64_t pd_mod = 0;
  unsigned pd_trunc = 6, pd_n = 2, pd_e = 2;
  c_pd->add_option("cmd", pd_cmd, "eval|gamma|saturate|nil-witness|axioms")->required();
  c_pd->add_option("expr", pd_expr);
  c_pd->add_option("--base", pd_base);
  c_pd->add_option("--mod", pd_mod);
  c_pd->add_option("--xvars", pd_x);
  c_pd->add_option("--yvars", pd_y);
  c_pd->add_option("--trunc", pd_trunc);
  c_pd->add_option("--n", pd_n);
  c_pd->add_option("--e", pd_e);
  c_pd->add_option("--ideal", pd_ideal, "base ideal generator p (over Zmod p^k)");

  // topo
  auto* c_topo = app.add_subcommand("topo", "induced-topology exploration");
  std::string topo_cmd, topo_family = "surjective-function", topo_model;
  uint64_t topo_axiom = 0, topo_fuel = 8, topo_bound = 3;
  std::vector<uint64_t> topo_at;
  c_topo->add_option("cmd", topo_cmd, "cosieve|rigidity|irreducible")->required();
  c_topo->add_option("--family", topo_family);
  c_topo->add_option("--model", topo_model)->required();
  c_topo->add_option("--axiom", topo_axiom);
  c_topo->add_option("--at", topo_at);
  c_topo->add_option("--fuel", topo_fuel);
  c_topo->add_option("--bound", topo_bound);

  // diff
  auto* c_diff = app.add_subcommand("diff", "structural diff of two theories");
  std::string diff_a, diff_b;
  c_diff->add_option("t1", diff_a)->required();
  c_diff->add_option("t2", diff_b)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (serial) par::set_default_mode(par::Mode::Serial);

    if (*c_check) {
      Theory t = parse_theory(slurp(check_file));
      auto diags = check_wellformed(t);
      for (const auto& d : diags) std::cout << d.path << ": " << d.message << "\n";
      return diags.empty() ? 0 : 3;
    }

    if (*c_tr) {
      if (!tr_sum.empty()) {
        TheoryExtension a = parse_extension(slurp(tr_sum[0]));
        TheoryExtension b = parse_extension(slurp(tr_sum[1]));
        std::cout << print_extension(sum(a, b));
        return 0;
      }
      if (tr_file.empty()) throw PreconditionError("transform: missing extension file");
      TheoryExtension e = parse_extension(slurp(tr_file));
      if (tr_desugar) {
        std::cout << print_extension(desugar_functions(e));
        return 0;
      }
      if (!tr_conditional.empty()) {
        Formula phi = parse_formula(tr_conditional);
        std::cout << print_extension(conditional(desugar_functions(e), phi));
        return 0;
      }
      throw PreconditionError("transform: pass --desugar, --conditional or --sum");
    }

    if (*c_glue) {
      Theory t;
      if (glue_kind == "zariski" || glue_kind == "cris" || glue_kind == "localic" ||
          glue_kind == "general") {
        t = glue_from_spec(slurp(glue_file), expand_schemas_level);
      } else {
        throw PreconditionError("glue: unknown kind " + glue_kind);
      }
      if (glue_eliminate) {
        std::vector<Name> props;
        for (const auto& [r, ar] : t.sig.relations)
          if (ar.empty() && r.rfind("p_", 0) == 0) props.push_back(r);
        t = eliminate_props(t, props);
      }
      if (expand_schemas_level) t = normalize(expand_schemas(t, expand_schemas_level));
      std::cout << print_theory(t);
      return 0;
    }

    if (*c_model) {
      if (model_cmd == "check") {
        Theory t = parse_theory(slurp(model_theory));
        if (expand_schemas_level) t = expand_schemas(t, expand_schemas_level);
        PresheafModel M = parse_model(slurp(model_file), t.sig);
        auto r = check_theory(M, t);
        if (r.holds) {
          std::cout << "holds\n";
          return 0;
        }
        std::cout << "counterexample axiom=\"" << r.axiom << "\" "
                  << r.cex->render(M, r.failing.ctx) << "\n";
        return 3;
      }
      if (model_cmd == "enum-ext") {
        TheoryExtension e = parse_extension(slurp(model_theory));
        PresheafModel M = parse_model(slurp(model_file), e.base.sig);
        auto exts = enumerate_extensions(M, e, model_bound);
        std::cout << exts.size() << " extension(s) up to isomorphism\n";
        for (const auto& x : exts) std::cout << print_model(x);
        return 0;
      }
      throw PreconditionError("model: unknown command " + model_cmd);
    }

    if (*c_pd) {
      TruncatedPDAlgebra alg = algebra_from_flags(pd_base, pd_mod, pd_x, pd_y, pd_trunc, pd_ideal);
      if (pd_cmd == "eval") {
        PDElement e = parse_pd_element(pd_expr, alg);
        std::cout << alg.str(e) << "\n";
        return 0;
      }
      if (pd_cmd == "gamma") {
        PDElement e = parse_pd_element(pd_expr, alg);
        std::cout << alg.str(alg.gamma(pd_n, e)) << "\n";
        return 0;
      }
      if (pd_cmd == "saturate") {
        PDElement e = parse_pd_element(pd_expr, alg);
        PDIdealHandle h = pd_saturate(alg, PDIdealHandle{{e}});
        for (const auto& g : h.gens) std::cout << alg.str(g) << "\n";
        return 0;
      }
      if (pd_cmd == "nil-witness") {
        TruncatedPDAlgebra a2 =
            algebra_from_flags(pd_base, pd_mod, pd_x, pd_y, pd_e > 0 ? pd_e - 1 : 0, pd_ideal);
        PDElement x = a2.gamma_x(0, 1);
        NilWitness w = nil_witness(a2, x, pd_e, pd_n);
        std::cout << "k_direct=" << w.k_direct << " k_bound=" << w.k_bound
                  << " c=" << w.coefficient << " identity=" << (w.identity_checked ? "ok" : "FAIL")
                  << "\n";
        return 0;
      }
      if (pd_cmd == "axioms") {
        std::vector<PDElement> samples;
        samples.push_back(alg.zero());
        for (size_t i = 0; i < alg.xvars.size(); i++) {
          samples.push_back(alg.gamma_x(i, 1));
          samples.push_back(alg.gamma_x(i, 2));
        }
        if (!pd_expr.empty()) samples.push_back(parse_pd_element(pd_expr, alg));
        auto fails = check_pd_axioms(alg, samples, std::min(pd_trunc, 4u));
        for (const auto& f : fails) std::cout << "FAIL " << f.axiom << " [" << f.witness << "]\n";
        std::cout << (fails.empty() ? "all axioms pass\n" : "");
        return fails.empty() ? 0 : 3;
      }
      throw PreconditionError("pd: unknown command " + pd_cmd);
    }

    if (*c_topo) {
      ModelFamilyPlugin plugin;
      if (topo_family == "surjective-function")
        plugin = surjective_function_family();
      else if (topo_family == "pointed-set")
        plugin = pointed_set_family();
      else if (topo_family == "truncated-chain")
        plugin = truncated_chain_family(true, true);
      else
        throw PreconditionError("topo: unknown family " + topo_family);
      PresheafModel M = parse_family_model(plugin, topo_model);
      if (topo_cmd == "cosieve") {
        std::vector<size_t> at(topo_at.begin(), topo_at.end());
        Cosieve c = cosieve_generators(plugin, M, topo_axiom, at, topo_bound);
        if (c.maximal) {
          std::cout << "maximal cosieve\n";
        } else if (c.generators.empty()) {
          std::cout << "empty cosieve\n";
        } else {
          for (const auto& g : c.generators)
            std::cout << "generator -> " << render_set_model(g.codomain) << "\n";
        }
        return 0;
      }
      if (topo_cmd == "rigidity") {
        CoveringTrace tr = rigidity_run(plugin, M, topo_fuel);
        std::cout << tr.render();
        return tr.fuel_exhausted ? 3 : 0;
      }
      if (topo_cmd == "irreducible") {
        bool irr = irreducible(plugin, M);
        std::cout << (irr ? "irreducible\n" : "reducible\n");
        return 0;
      }
      throw PreconditionError("topo: unknown command " + topo_cmd);
    }

    if (*c_diff) {
      Theory a = parse_theory(slurp(diff_a));
      Theory b = parse_theory(slurp(diff_b));
      if (expand_schemas_level) {
        a = expand_schemas(a, expand_schemas_level);
        b = expand_schemas(b, expand_schemas_level);
      }
      std::string d = diff_theories(a, b);
      if (d.empty()) return 0;
      std::cout << d;
      return 3;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
