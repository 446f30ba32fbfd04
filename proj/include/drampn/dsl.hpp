#pragma once

#include <cctype>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "drampn/error.hpp"
#include "drampn/expr.hpp"
#include "drampn/model.hpp"

namespace drampn {

namespace dsl_detail {

enum class Tok : std::uint8_t { Ident, Nat, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Nat;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (src.substr(i, 2) == "->" || src.substr(i, 2) == "..") {
      t.kind = Tok::Punct;
      t.text = std::string(src.substr(i, 2));
      advance(2);
    } else if (std::string_view("{}()[];,=+-*:").find(c) != std::string_view::npos) {
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError({{line, col, std::string("unexpected character '") + c + "'"}});
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

// Pending semantic check with the source position it is reported at.
struct RefSite {
  std::size_t block;
  Ref ref;
  std::size_t line, column;
};

struct ExprSite {
  Expr expr;
  bool timing;  // timing delay vs. structural weight/init
  std::size_t line, column;
};

struct NameSite {
  std::string name;
  std::size_t line, column;
};

class Parser {
public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  ModelDefinition parse_model() {
    ModelDefinition m;
    if (at_end()) return m;
    expect_word("device");
    m.name = expect_ident("device name");
    expect("{");
    while (!peek_is("}")) parse_section(m);
    expect("}");
    if (!at_end()) fail({"end of input"});
    check(m);
    if (!diags_.empty()) throw ParseError(diags_);
    return m;
  }

  Expr parse_standalone_expr() {
    Expr e = parse_expr();
    if (!at_end()) fail({"end of input"});
    return e;
  }

private:
  const Token& peek() const { return toks_[pos_]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool peek_is(std::string_view p) const { return peek().kind == Tok::Punct && peek().text == p; }
  bool peek_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }

  [[noreturn]] void fail(const std::set<std::string>& expected) const {
    std::string msg = "syntax error: found ";
    msg += at_end() ? std::string("end of input") : "'" + peek().text + "'";
    msg += ", expected one of {";
    bool first = true;
    for (const auto& e : expected) {
      if (!first) msg += ", ";
      first = false;
      msg += e;
    }
    msg += "}";
    throw ParseError({{peek().line, peek().column, msg}});
  }

  void expect(std::string_view p) {
    if (!peek_is(p)) fail({"'" + std::string(p) + "'"});
    ++pos_;
  }

  void expect_word(std::string_view w) {
    if (!peek_word(w)) fail({"'" + std::string(w) + "'"});
    ++pos_;
  }

  std::string expect_ident(const std::string& what) {
    if (peek().kind != Tok::Ident) fail({what});
    return toks_[pos_++].text;
  }

  std::int64_t expect_nat() {
    if (peek().kind != Tok::Nat) fail({"natural number"});
    const auto& t = toks_[pos_++];
    try {
      return std::stoll(t.text);
    } catch (const std::out_of_range&) {
      throw ParseError({{t.line, t.column, "number out of range: " + t.text}});
    }
  }

  void error(std::size_t line, std::size_t col, std::string msg) { diags_.push_back({line, col, std::move(msg)}); }

  void declare_name(std::set<std::string>& seen, const std::string& name, const Token& at, const char* what) {
    if (!seen.insert(name).second) error(at.line, at.column, std::string("duplicate ") + what + " '" + name + "'");
  }

  void parse_section(ModelDefinition& m) {
    if (peek_word("params")) {
      ++pos_;
      expect("{");
      while (!peek_is("}")) {
        const Token& at = peek();
        std::string n = expect_ident("parameter name");
        expect("=");
        std::int64_t v = expect_nat();
        expect(";");
        declare_name(param_names_, n, at, "parameter");
        m.params.emplace_back(std::move(n), v);
      }
      expect("}");
    } else if (peek_word("timing_params")) {
      ++pos_;
      expect("{");
      while (!peek_is("}")) {
        const Token& at = peek();
        std::string n = expect_ident("timing parameter name");
        expect("=");
        ParamRange r;
        r.lo = expect_nat();
        if (peek_is("..")) {
          ++pos_;
          r.hi = expect_nat();
          if (*r.hi < r.lo) error(at.line, at.column, "empty range for timing parameter '" + n + "'");
        }
        expect(";");
        declare_name(timing_names_, n, at, "timing parameter");
        m.timing_params.emplace_back(std::move(n), r);
      }
      expect("}");
    } else if (peek_word("per") || peek_word("global")) {
      Block b;
      if (peek_word("global")) {
        ++pos_;
        b.level = Level::Global;
      } else {
        ++pos_;
        if (peek_word("bank")) b.level = Level::Bank;
        else if (peek_word("rank")) b.level = Level::Rank;
        else fail({"'bank'", "'rank'"});
        ++pos_;
        b.var = expect_ident("coordinate variable");
      }
      expect("{");
      const std::size_t index = m.blocks.size();
      while (!peek_is("}")) b.stmts.push_back(parse_stmt(index, b.level));
      expect("}");
      m.blocks.push_back(std::move(b));
    } else if (peek_word("timing")) {
      ++pos_;
      TimingDecl t;
      const Token& scope_tok = peek();
      auto scope = scope_from_name(expect_ident("scope"));
      if (!scope) {
        pos_--;
        fail({"'intra_bank'", "'intra_bank_group'", "'intra_rank'", "'global'"});
      }
      t.scope = *scope;
      t.sources = parse_label_list();
      expect("->");
      t.destinations = parse_label_list();
      expect(":");
      const Token& expr_tok = peek();
      t.delay = parse_expr();
      expect(";");
      for (const auto& c : t.sources) commands_.push_back({c, scope_tok.line, scope_tok.column});
      for (const auto& c : t.destinations) commands_.push_back({c, scope_tok.line, scope_tok.column});
      exprs_.push_back({t.delay, true, expr_tok.line, expr_tok.column});
      m.timing.push_back(std::move(t));
    } else {
      fail({"'params'", "'timing_params'", "'per'", "'global'", "'timing'", "'}'"});
    }
  }

  std::vector<std::string> parse_label_list() {
    std::vector<std::string> xs;
    expect("[");
    xs.push_back(expect_ident("command label"));
    while (peek_is(",")) {
      ++pos_;
      xs.push_back(expect_ident("command label"));
    }
    expect("]");
    return xs;
  }

  Ref parse_ref(std::size_t block) {
    const Token& at = peek();
    Ref r;
    r.name = expect_ident("node name");
    if (peek_is("(")) {
      ++pos_;
      r.coord_var = expect_ident("coordinate variable");
      expect(")");
    }
    refs_.push_back({block, r, at.line, at.column});
    return r;
  }

  Statement parse_stmt(std::size_t block, Level level) {
    const Token& at = peek();
    if (peek_word("place")) {
      ++pos_;
      PlaceDecl p;
      p.name = expect_ident("place name");
      expect_word("init");
      const Token& e = peek();
      p.init = parse_expr();
      expect(";");
      exprs_.push_back({p.init, false, e.line, e.column});
      declare_name(node_names_[static_cast<int>(level)], p.name, at, "declaration");
      return p;
    }
    if (peek_word("transition")) {
      ++pos_;
      TransitionDecl t;
      t.name = expect_ident("transition name");
      expect(";");
      declare_name(node_names_[static_cast<int>(level)], t.name, at, "declaration");
      return t;
    }
    ArcDecl a;
    if (peek_word("arc")) a.kind = ArcKind::Regular;
    else if (peek_word("inhibitor")) a.kind = ArcKind::Inhibitor;
    else if (peek_word("reset")) a.kind = ArcKind::Reset;
    else fail({"'place'", "'transition'", "'arc'", "'inhibitor'", "'reset'", "'}'"});
    ++pos_;
    a.source = parse_ref(block);
    expect("->");
    a.target = parse_ref(block);
    if (a.kind != ArcKind::Reset && peek_word("weight")) {
      ++pos_;
      const Token& e = peek();
      a.weight = parse_expr();
      exprs_.push_back({*a.weight, false, e.line, e.column});
    }
    expect(";");
    arcs_.push_back({block, a, at.line, at.column});
    return a;
  }

  // expr := term (("+" | "-") term)*; term := atom ("*" atom)*
  Expr parse_expr() {
    Expr e = parse_term();
    while (peek_is("+") || peek_is("-")) {
      const auto op = peek().text == "+" ? Expr::Op::Add : Expr::Op::Sub;
      ++pos_;
      e = Expr::binary(op, std::move(e), parse_term());
    }
    return e;
  }

  Expr parse_term() {
    Expr e = parse_atom();
    while (peek_is("*")) {
      ++pos_;
      e = Expr::binary(Expr::Op::Mul, std::move(e), parse_atom());
    }
    return e;
  }

  Expr parse_atom() {
    if (peek().kind == Tok::Nat) return Expr::constant(expect_nat());
    if (peek_is("(")) {
      ++pos_;
      Expr e = parse_expr();
      expect(")");
      return e;
    }
    if (peek_word("max")) {
      ++pos_;
      expect("(");
      std::vector<Expr> xs;
      xs.push_back(parse_expr());
      expect(",");
      xs.push_back(parse_expr());
      while (peek_is(",")) {
        ++pos_;
        xs.push_back(parse_expr());
      }
      expect(")");
      return Expr::max_of(std::move(xs));
    }
    if (peek().kind == Tok::Ident) return Expr::param(toks_[pos_++].text);
    fail({"natural number", "parameter name", "'('", "'max'"});
  }

  struct ArcSite {
    std::size_t block;
    ArcDecl arc;
    std::size_t line, column;
  };

  void check(const ModelDefinition& m) {
    DeclarationIndex decls(m);
    for (const auto& site : refs_) {
      auto r = resolve_ref(decls, m.blocks[site.block], site.ref);
      if (auto* msg = std::get_if<std::string>(&r)) error(site.line, site.column, *msg);
    }
    for (const auto& site : arcs_) {
      const Block& b = m.blocks[site.block];
      auto src = resolve_ref(decls, b, site.arc.source);
      auto dst = resolve_ref(decls, b, site.arc.target);
      const auto* s = std::get_if<DeclaredNode>(&src);
      const auto* d = std::get_if<DeclaredNode>(&dst);
      if (!s || !d) continue;
      const bool ok = site.arc.kind == ArcKind::Regular ? s->is_place != d->is_place
                                                        : (s->is_place && !d->is_place);
      if (!ok)
        error(site.line, site.column,
              std::string(arc_kind_name(site.arc.kind)) +
                  (site.arc.kind == ArcKind::Regular ? " must connect a place and a transition"
                                                     : " must go from a place to a transition"));
    }
    for (const auto& c : commands_) {
      if (!decls.has_transition_named(c.name))
        error(c.line, c.column, "reference to undeclared label '" + c.name + "' in timing declaration");
    }
    for (const auto& site : exprs_) {
      for (const auto& p : params_of(site.expr)) {
        if (site.timing) {
          if (!m.timing_param(p))
            error(site.line, site.column, "timing parameter '" + p + "' is not bound in timing_params");
        } else if (p != kBanksVar && p != kRanksVar && p != kGroupsVar && !m.param(p)) {
          error(site.line, site.column, "parameter '" + p + "' is not declared in params");
        }
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> diags_;
  std::set<std::string> param_names_, timing_names_;
  std::set<std::string> node_names_[3];
  std::vector<RefSite> refs_;
  std::vector<ArcSite> arcs_;
  std::vector<ExprSite> exprs_;
  std::vector<NameSite> commands_;
};

}  // namespace dsl_detail

// Parses model-description text. Syntax errors stop at the first offending
// token; semantic problems (duplicates, undeclared labels, unbound
// parameters) are collected and reported together.
inline ModelDefinition parse_model(std::string_view text) {
  return dsl_detail::Parser(text).parse_model();
}

inline Expr parse_expr(std::string_view text) {
  return dsl_detail::Parser(text).parse_standalone_expr();
}

}  // namespace drampn
