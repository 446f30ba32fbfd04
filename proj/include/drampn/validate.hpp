#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "drampn/build.hpp"
#include "drampn/model.hpp"
#include "drampn/net.hpp"

namespace drampn {

struct ValidationIssue {
  enum class Kind : std::uint8_t { EmptyNet, Orphan, DanglingArc, IllFormedArc, DuplicateLabel, UnboundParameter };
  Kind kind;
  std::string subject;

  static const char* kind_name(Kind k) {
    switch (k) {
      case Kind::EmptyNet: return "empty-net";
      case Kind::Orphan: return "orphan";
      case Kind::DanglingArc: return "dangling-arc";
      case Kind::IllFormedArc: return "ill-formed-arc";
      case Kind::DuplicateLabel: return "duplicate-label";
      case Kind::UnboundParameter: return "unbound-parameter";
    }
    return "?";
  }

  std::string to_string() const { return std::string(kind_name(kind)) + ": " + subject; }
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }

  bool contains(ValidationIssue::Kind k, const std::string& subject) const {
    for (const auto& i : issues)
      if (i.kind == k && i.subject == subject) return true;
    return false;
  }
};

inline ValidationReport validate_structure(const Net& net) {
  using K = ValidationIssue::Kind;
  ValidationReport rep;
  if (net.places().empty() && net.transitions().empty()) {
    rep.issues.push_back({K::EmptyNet, "net has no nodes"});
    return rep;
  }
  std::vector<bool> place_used(net.places().size()), transition_used(net.transitions().size());
  auto mark = [&](NodeRef r) {
    if (net.has_place(r)) place_used[r.index] = true;
    else if (net.has_transition(r)) transition_used[r.index] = true;
  };
  for (const auto& a : net.arcs()) {
    const std::string desc = std::string(arc_kind_name(a.kind)) + " " + net.node_label(a.source) + " -> " +
                             net.node_label(a.target);
    if (!net.has_node(a.source) || !net.has_node(a.target)) {
      rep.issues.push_back({K::DanglingArc, desc});
    } else {
      const bool ok = a.kind == ArcKind::Regular ? a.source.is_place() != a.target.is_place()
                                                 : (a.source.is_place() && !a.target.is_place());
      if (!ok) rep.issues.push_back({K::IllFormedArc, desc});
    }
    mark(a.source);
    mark(a.target);
  }
  for (const auto& ta : net.timed_arcs()) {
    if (ta.source >= net.transitions().size() || ta.target >= net.transitions().size()) {
      rep.issues.push_back({K::DanglingArc, "timed " + net.node_label(NodeRef::transition(ta.source)) + " -> " +
                                                net.node_label(NodeRef::transition(ta.target))});
    }
    for (const auto& p : params_of(ta.delay))
      if (!net.timing_params().count(p)) rep.issues.push_back({K::UnboundParameter, p});
  }
  for (PlaceId i = 0; i < net.places().size(); ++i)
    if (!place_used[i]) rep.issues.push_back({K::Orphan, net.places()[i].label()});
  for (TransitionId i = 0; i < net.transitions().size(); ++i)
    if (!transition_used[i]) rep.issues.push_back({K::Orphan, net.transitions()[i].label()});

  std::set<std::string> seen;
  for (const auto& p : net.places())
    if (!seen.insert("place " + p.label()).second) rep.issues.push_back({K::DuplicateLabel, p.label()});
  for (const auto& t : net.transitions())
    if (!seen.insert("transition " + t.label()).second) rep.issues.push_back({K::DuplicateLabel, t.label()});

  // Unbound parameters are reported once each.
  std::vector<ValidationIssue> dedup;
  std::set<std::string> keys;
  for (auto& i : rep.issues)
    if (keys.insert(i.to_string()).second) dedup.push_back(std::move(i));
  rep.issues = std::move(dedup);
  return rep;
}

// True iff swapping any two banks of a rank (within a bank group), or any two
// bank groups of a rank, maps the net onto itself. Adjacent transpositions
// generate the symmetric group, so only those are tested.
inline bool check_bank_symmetry(const Net& net) {
  const auto base = net.signature();
  const NetConfig& cfg = net.config();
  auto holds = [&](auto&& remap) { return net.signature(remap) == base; };
  for (std::uint32_t r = 0; r < cfg.ranks; ++r) {
    for (std::uint32_t g = 0; g < cfg.groups.value_or(1); ++g) {
      const std::optional<std::uint32_t> group = cfg.groups ? std::optional<std::uint32_t>(g) : std::nullopt;
      for (std::uint32_t b = 0; b + 1 < cfg.banks; ++b) {
        auto swap_banks = [&](const Coordinate& c) {
          Coordinate out = c;
          if (c.is_bank() && c.rank == r && c.group == group) {
            if (*c.bank == b) out.bank = b + 1;
            else if (*c.bank == b + 1) out.bank = b;
          }
          return out;
        };
        if (!holds(swap_banks)) return false;
      }
    }
    if (cfg.groups) {
      for (std::uint32_t g = 0; g + 1 < *cfg.groups; ++g) {
        auto swap_groups = [&](const Coordinate& c) {
          Coordinate out = c;
          if (c.is_bank() && c.rank == r) {
            if (*c.group == g) out.group = g + 1;
            else if (*c.group == g + 1) out.group = g;
          }
          return out;
        };
        if (!holds(swap_groups)) return false;
      }
    }
  }
  return true;
}

struct WeightFamily {
  std::string key;  // "kind SRC@level -> DST@level"
  std::array<std::int64_t, 3> weights{};  // at B = 1, 2, 3
  std::int64_t alpha = 0;
  std::int64_t beta = 0;
  bool linear = false;
};

struct LinearityReport {
  bool linear = true;
  std::vector<WeightFamily> families;
};

// Fits every arc family's weight at B = 1, 2, 3 to alpha*B + beta with
// natural alpha and beta. A family is the set of arcs that share kind and
// endpoint names/levels; all its members must agree on the weight at each B.
inline LinearityReport check_weight_linearity(const ModelDefinition& model, const BuildOptions& opts = {}) {
  std::map<std::string, std::array<std::set<std::int64_t>, 3>> seen;
  for (std::uint32_t b = 1; b <= 3; ++b) {
    const Net net = build_net(model, b, 1, opts);
    auto name = [&](NodeRef r) {
      if (net.has_place(r)) {
        const auto& p = net.places()[r.index];
        return p.name + (p.coord.is_bank() ? "@bank" : "@rank");
      }
      const auto& t = net.transitions()[r.index];
      return t.command + (t.coord.is_bank() ? "@bank" : "@rank");
    };
    for (const auto& a : net.arcs()) {
      if (a.kind == ArcKind::Reset || !net.has_node(a.source) || !net.has_node(a.target)) continue;
      seen[std::string(arc_kind_name(a.kind)) + " " + name(a.source) + " -> " + name(a.target)][b - 1].insert(a.weight);
    }
  }
  LinearityReport rep;
  for (const auto& [key, per_b] : seen) {
    WeightFamily f;
    f.key = key;
    bool consistent = true;
    for (int i = 0; i < 3; ++i) {
      if (per_b[i].size() != 1) {
        consistent = false;
        break;
      }
      f.weights[i] = *per_b[i].begin();
    }
    if (consistent) {
      f.alpha = f.weights[1] - f.weights[0];
      f.beta = f.weights[0] - f.alpha;
      f.linear = f.weights[2] - f.weights[1] == f.alpha && f.alpha >= 0 && f.beta >= 0;
    }
    rep.linear = rep.linear && f.linear;
    rep.families.push_back(f);
  }
  return rep;
}

}  // namespace drampn
