#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "drampn/error.hpp"

namespace drampn {

using Bindings = std::map<std::string, std::int64_t, std::less<>>;

// Arithmetic over named parameters and natural constants. Used for timing
// delays and for weights/initial tokens that scale with the configuration.
struct Expr {
  enum class Op : std::uint8_t { Const, Param, Add, Sub, Mul, Max };

  Op op = Op::Const;
  std::int64_t value = 0;
  std::string name;
  std::vector<Expr> args;

  static Expr constant(std::int64_t v) { return Expr{Op::Const, v, {}, {}}; }
  static Expr param(std::string n) { return Expr{Op::Param, 0, std::move(n), {}}; }
  static Expr binary(Op op, Expr l, Expr r) {
    Expr e{op, 0, {}, {}};
    e.args.push_back(std::move(l));
    e.args.push_back(std::move(r));
    return e;
  }
  static Expr max_of(std::vector<Expr> xs) { return Expr{Op::Max, 0, {}, std::move(xs)}; }

  bool is_constant() const { return op == Op::Const; }

  friend bool operator==(const Expr&, const Expr&) = default;
};

namespace detail {

inline int precedence(Expr::Op op) {
  switch (op) {
    case Expr::Op::Add:
    case Expr::Op::Sub: return 1;
    case Expr::Op::Mul: return 2;
    default: return 3;
  }
}

inline void print_expr(const Expr& e, int min_prec, std::string& out) {
  const int prec = precedence(e.op);
  const bool paren = prec < min_prec;
  if (paren) out += '(';
  switch (e.op) {
    case Expr::Op::Const: out += std::to_string(e.value); break;
    case Expr::Op::Param: out += e.name; break;
    case Expr::Op::Max:
      out += "max(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_expr(e.args[i], 0, out);
      }
      out += ')';
      break;
    default: {
      // Left-associative: an equal-precedence right operand keeps its parens.
      print_expr(e.args[0], prec, out);
      out += e.op == Expr::Op::Add ? " + " : e.op == Expr::Op::Sub ? " - " : " * ";
      print_expr(e.args[1], prec + 1, out);
    }
  }
  if (paren) out += ')';
}

}  // namespace detail

// Source form; the model parser reads it back to an identical tree.
inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print_expr(e, 0, out);
  return out;
}

inline void collect_params(const Expr& e, std::set<std::string>& out) {
  if (e.op == Expr::Op::Param) out.insert(e.name);
  for (const auto& a : e.args) collect_params(a, out);
}

inline std::set<std::string> params_of(const Expr& e) {
  std::set<std::string> out;
  collect_params(e, out);
  return out;
}

inline std::int64_t evaluate(const Expr& e, const Bindings& b) {
  switch (e.op) {
    case Expr::Op::Const: return e.value;
    case Expr::Op::Param: {
      auto it = b.find(e.name);
      if (it == b.end()) throw BuildError("unbound parameter '" + e.name + "'");
      return it->second;
    }
    case Expr::Op::Add: return evaluate(e.args[0], b) + evaluate(e.args[1], b);
    case Expr::Op::Sub: return evaluate(e.args[0], b) - evaluate(e.args[1], b);
    case Expr::Op::Mul: return evaluate(e.args[0], b) * evaluate(e.args[1], b);
    case Expr::Op::Max: {
      std::int64_t m = evaluate(e.args.at(0), b);
      for (std::size_t i = 1; i < e.args.size(); ++i) m = std::max(m, evaluate(e.args[i], b));
      return m;
    }
  }
  return 0;
}

// Normal form: a polynomial with integer coefficients whose atoms are
// parameter names and canonicalized max(...) terms. Two expressions share a
// normal form iff they are equal as polynomials over those atoms; identities
// that move terms into or out of a max (max(a,b)+c = max(a+c,b+c)) are not
// applied.
class Polynomial {
public:
  using Monomial = std::vector<std::string>;  // sorted atom keys; empty = constant

  static Polynomial constant(std::int64_t v) {
    Polynomial p;
    if (v != 0) p.terms_[{}] = v;
    return p;
  }

  static Polynomial atom(std::string key) {
    Polynomial p;
    p.terms_[{std::move(key)}] = 1;
    return p;
  }

  Polynomial operator+(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
  }

  Polynomial operator-(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
    return r;
  }

  Polynomial operator*(const Polynomial& o) const {
    Polynomial r;
    for (const auto& [m1, c1] : terms_) {
      for (const auto& [m2, c2] : o.terms_) {
        Monomial m = m1;
        m.insert(m.end(), m2.begin(), m2.end());
        std::sort(m.begin(), m.end());
        r.add_term(m, c1 * c2);
      }
    }
    return r;
  }

  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

  std::int64_t constant_part() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? 0 : it->second;
  }

  // A lone atom with coefficient one, e.g. a nested max term.
  const std::string* single_atom() const {
    if (terms_.size() != 1) return nullptr;
    const auto& [m, c] = *terms_.begin();
    return (c == 1 && m.size() == 1) ? &m.front() : nullptr;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    // Highest degree first, constant last.
    std::vector<std::pair<Monomial, std::int64_t>> ordered(terms_.begin(), terms_.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
      return a.first.size() > b.first.size();
    });
    std::string out;
    bool first = true;
    for (const auto& [m, c] : ordered) {
      std::int64_t mag = c < 0 ? -c : c;
      if (first) {
        if (c < 0) out += "-";
      } else {
        out += c < 0 ? " - " : " + ";
      }
      first = false;
      std::string body;
      if (m.empty() || mag != 1) body = std::to_string(mag);
      for (const auto& a : m) {
        if (!body.empty()) body += "*";
        body += a;
      }
      out += body;
    }
    return out;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
  void add_term(const Monomial& m, std::int64_t c) {
    auto& slot = terms_[m];
    slot += c;
    if (slot == 0) terms_.erase(m);
  }

  std::map<Monomial, std::int64_t> terms_;
};

inline Polynomial normalize(const Expr& e) {
  switch (e.op) {
    case Expr::Op::Const: return Polynomial::constant(e.value);
    case Expr::Op::Param: return Polynomial::atom(e.name);
    case Expr::Op::Add: return normalize(e.args[0]) + normalize(e.args[1]);
    case Expr::Op::Sub: return normalize(e.args[0]) - normalize(e.args[1]);
    case Expr::Op::Mul: return normalize(e.args[0]) * normalize(e.args[1]);
    case Expr::Op::Max: {
      bool have_const = false;
      std::int64_t max_const = 0;
      std::vector<Polynomial> symbolic;
      std::set<std::string> flat;
      for (const auto& a : e.args) {
        Polynomial p = normalize(a);
        if (p.is_constant()) {
          max_const = have_const ? std::max(max_const, p.constant_part()) : p.constant_part();
          have_const = true;
          continue;
        }
        // Flatten max(max(a, b), c) into max(a, b, c).
        const std::string* atom = p.single_atom();
        if (atom && atom->rfind("max(", 0) == 0) {
          const std::string inner = atom->substr(4, atom->size() - 5);
          int depth = 0;
          std::size_t start = 0;
          for (std::size_t i = 0; i <= inner.size(); ++i) {
            if (i == inner.size() || (inner[i] == ',' && depth == 0)) {
              std::string part = inner.substr(start, i - start);
              while (!part.empty() && part.front() == ' ') part.erase(part.begin());
              const bool numeric = !part.empty() &&
                  part.find_first_not_of("-0123456789") == std::string::npos;
              if (numeric) {
                const std::int64_t v = std::stoll(part);
                max_const = have_const ? std::max(max_const, v) : v;
                have_const = true;
              } else {
                flat.insert(part);
              }
              start = i + 1;
            } else if (inner[i] == '(') {
              ++depth;
            } else if (inner[i] == ')') {
              --depth;
            }
          }
        } else {
          flat.insert(p.to_string());
        }
        symbolic.push_back(std::move(p));
      }
      if (symbolic.empty()) return Polynomial::constant(max_const);
      if (have_const) flat.insert(std::to_string(max_const));
      if (flat.size() == 1) return symbolic.front();
      std::string key = "max(";
      bool first = true;
      for (const auto& k : flat) {
        if (!first) key += ", ";
        first = false;
        key += k;
      }
      key += ")";
      return Polynomial::atom(key);
    }
  }
  return {};
}

inline std::string canonical(const Expr& e) { return normalize(e).to_string(); }

}  // namespace drampn
