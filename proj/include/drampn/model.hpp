#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "drampn/coordinate.hpp"
#include "drampn/expr.hpp"
#include "drampn/net.hpp"

namespace drampn {

// Hierarchy level a template block is replicated over.
enum class Level : std::uint8_t { Bank, Rank, Global };

inline const char* level_name(Level l) {
  switch (l) {
    case Level::Bank: return "bank";
    case Level::Rank: return "rank";
    case Level::Global: return "global";
  }
  return "?";
}

// Reference to a declared node; `coord_var` optionally pins the level.
struct Ref {
  std::string name;
  std::optional<std::string> coord_var;

  friend bool operator==(const Ref&, const Ref&) = default;
};

struct PlaceDecl {
  std::string name;
  Expr init;
  friend bool operator==(const PlaceDecl&, const PlaceDecl&) = default;
};

struct TransitionDecl {
  std::string name;
  friend bool operator==(const TransitionDecl&, const TransitionDecl&) = default;
};

struct ArcDecl {
  ArcKind kind = ArcKind::Regular;
  Ref source;
  Ref target;
  std::optional<Expr> weight;  // absent means 1; never set for reset arcs
  friend bool operator==(const ArcDecl&, const ArcDecl&) = default;
};

using Statement = std::variant<PlaceDecl, TransitionDecl, ArcDecl>;

struct Block {
  Level level = Level::Global;
  std::string var;  // empty for global blocks
  std::vector<Statement> stmts;
  friend bool operator==(const Block&, const Block&) = default;
};

struct TimingDecl {
  Scope scope = Scope::IntraBank;
  std::vector<std::string> sources;
  std::vector<std::string> destinations;
  Expr delay;
  friend bool operator==(const TimingDecl&, const TimingDecl&) = default;
};

// A timing parameter bound to a value or given as an inclusive range.
struct ParamRange {
  std::int64_t lo = 0;
  std::optional<std::int64_t> hi;
  friend bool operator==(const ParamRange&, const ParamRange&) = default;
};

struct ModelDefinition {
  std::string name;
  std::vector<std::pair<std::string, std::int64_t>> params;
  std::vector<std::pair<std::string, ParamRange>> timing_params;
  std::vector<Block> blocks;
  std::vector<TimingDecl> timing;

  friend bool operator==(const ModelDefinition&, const ModelDefinition&) = default;

  std::optional<std::int64_t> param(const std::string& n) const {
    for (const auto& [k, v] : params)
      if (k == n) return v;
    return std::nullopt;
  }

  const ParamRange* timing_param(const std::string& n) const {
    for (const auto& [k, v] : timing_params)
      if (k == n) return &v;
    return nullptr;
  }

  bool empty() const {
    return name.empty() && params.empty() && timing_params.empty() && blocks.empty() && timing.empty();
  }
};

// Names usable in weight and initial-token expressions besides `params`.
inline constexpr const char* kBanksVar = "B";
inline constexpr const char* kRanksVar = "R";
inline constexpr const char* kGroupsVar = "G";

struct DeclaredNode {
  Level level;
  bool is_place;
};

// Declarations keyed by (level, name).
class DeclarationIndex {
public:
  explicit DeclarationIndex(const ModelDefinition& m) {
    for (const auto& b : m.blocks) {
      for (const auto& s : b.stmts) {
        if (const auto* p = std::get_if<PlaceDecl>(&s)) nodes_[{b.level, p->name}] = true;
        if (const auto* t = std::get_if<TransitionDecl>(&s)) nodes_[{b.level, t->name}] = false;
      }
    }
  }

  std::optional<DeclaredNode> find(Level l, const std::string& name) const {
    auto it = nodes_.find({l, name});
    if (it == nodes_.end()) return std::nullopt;
    return DeclaredNode{l, it->second};
  }

  bool has_transition_named(const std::string& name) const {
    for (const auto& [k, is_place] : nodes_)
      if (!is_place && k.second == name) return true;
    return false;
  }

private:
  std::map<std::pair<Level, std::string>, bool> nodes_;
};

// Levels visible from a block, innermost first.
inline std::vector<Level> visible_levels(Level from) {
  switch (from) {
    case Level::Bank: return {Level::Bank, Level::Rank, Level::Global};
    case Level::Rank: return {Level::Rank, Level::Global};
    case Level::Global: return {Level::Global};
  }
  return {};
}

// Resolves a reference inside a block. An unqualified name binds to the
// innermost visible level declaring it; `NAME(v)` binds at the block's own
// level when v is the block variable, or at the level named by v.
inline std::variant<DeclaredNode, std::string> resolve_ref(const DeclarationIndex& decls,
                                                           const Block& block, const Ref& ref) {
  const auto visible = visible_levels(block.level);
  if (ref.coord_var) {
    const std::string& v = *ref.coord_var;
    std::optional<Level> level;
    if (!block.var.empty() && v == block.var) level = block.level;
    else if (v == "bank") level = Level::Bank;
    else if (v == "rank") level = Level::Rank;
    else if (v == "global") level = Level::Global;
    if (!level) return "unknown coordinate variable '" + v + "'";
    if (std::find(visible.begin(), visible.end(), *level) == visible.end())
      return "level '" + std::string(level_name(*level)) + "' is not visible from a " +
             level_name(block.level) + " block";
    if (auto d = decls.find(*level, ref.name)) return *d;
    return "reference to undeclared label '" + ref.name + "(" + v + ")'";
  }
  for (Level l : visible)
    if (auto d = decls.find(l, ref.name)) return *d;
  return "reference to undeclared label '" + ref.name + "'";
}

namespace detail {

inline std::string print_ref(const Ref& r) {
  return r.coord_var ? r.name + "(" + *r.coord_var + ")" : r.name;
}

inline std::string print_list(const std::vector<std::string>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += xs[i];
  }
  return s + "]";
}

}  // namespace detail

inline std::string print_statement(const Statement& s) {
  if (const auto* p = std::get_if<PlaceDecl>(&s)) return "place " + p->name + " init " + to_string(p->init) + ";";
  if (const auto* t = std::get_if<TransitionDecl>(&s)) return "transition " + t->name + ";";
  const auto& a = std::get<ArcDecl>(s);
  std::string out = std::string(arc_kind_name(a.kind)) + " " + detail::print_ref(a.source) + " -> " +
                    detail::print_ref(a.target);
  if (a.weight) out += " weight " + to_string(*a.weight);
  return out + ";";
}

inline std::string print_timing(const TimingDecl& t) {
  return std::string("timing ") + scope_name(t.scope) + " " + detail::print_list(t.sources) + " -> " +
         detail::print_list(t.destinations) + " : " + to_string(t.delay) + ";";
}

// Canonical source text; parse_model(print_model(m)) == m.
inline std::string print_model(const ModelDefinition& m) {
  if (m.empty()) return "";
  std::string out = "device " + m.name + " {\n";
  if (!m.params.empty()) {
    out += "  params {\n";
    for (const auto& [k, v] : m.params) out += "    " + k + " = " + std::to_string(v) + ";\n";
    out += "  }\n";
  }
  if (!m.timing_params.empty()) {
    out += "  timing_params {\n";
    for (const auto& [k, r] : m.timing_params) {
      out += "    " + k + " = " + std::to_string(r.lo);
      if (r.hi) out += ".." + std::to_string(*r.hi);
      out += ";\n";
    }
    out += "  }\n";
  }
  for (const auto& b : m.blocks) {
    out += "  ";
    out += b.level == Level::Global ? std::string("global") : std::string("per ") + level_name(b.level) + " " + b.var;
    out += " {\n";
    for (const auto& s : b.stmts) out += "    " + print_statement(s) + "\n";
    out += "  }\n";
  }
  for (const auto& t : m.timing) out += "  " + print_timing(t) + "\n";
  out += "}\n";
  return out;
}

}  // namespace drampn
