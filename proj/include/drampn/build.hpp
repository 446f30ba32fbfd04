#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "drampn/error.hpp"
#include "drampn/model.hpp"
#include "drampn/net.hpp"

namespace drampn {

struct BuildOptions {
  // Overrides for timing parameters (or structural params of the same name).
  Bindings overrides;
  // Overrides the model's `bank_groups` param; 0 disables groups.
  std::optional<std::uint32_t> groups;
};

// The device config a model instantiates to at (B, R).
inline NetConfig config_for(const ModelDefinition& model, std::uint32_t banks, std::uint32_t ranks,
                            const BuildOptions& opts = {}) {
  NetConfig cfg;
  cfg.banks = banks;
  cfg.ranks = ranks;
  std::optional<std::int64_t> g = opts.groups ? std::optional<std::int64_t>(*opts.groups) : model.param("bank_groups");
  if (auto it = opts.overrides.find("bank_groups"); !opts.groups && it != opts.overrides.end()) g = it->second;
  if (g && *g > 0) cfg.groups = static_cast<std::uint32_t>(*g);
  return cfg;
}

// Timing parameters at their range minimum unless overridden.
inline Bindings timing_bindings(const ModelDefinition& model, const Bindings& overrides = {}) {
  Bindings b;
  for (const auto& [k, r] : model.timing_params) b[k] = r.lo;
  for (const auto& [k, v] : overrides) {
    if (b.count(k)) b[k] = v;
    else if (!model.param(k) && k != "bank_groups")
      throw BuildError("override for unknown parameter '" + k + "'");
  }
  return b;
}

namespace build_detail {

struct Instance {
  Level level;
  Coordinate coord;
};

inline std::vector<Instance> instances(Level level, const NetConfig& cfg) {
  std::vector<Instance> out;
  if (level == Level::Global) {
    out.push_back({Level::Global, Coordinate::of_rank(0)});
    return out;
  }
  for (std::uint32_t r = 0; r < cfg.ranks; ++r) {
    if (level == Level::Rank) {
      out.push_back({Level::Rank, Coordinate::of_rank(r)});
      continue;
    }
    for (std::uint32_t g = 0; g < cfg.groups.value_or(1); ++g)
      for (std::uint32_t b = 0; b < cfg.banks; ++b)
        out.push_back({Level::Bank, Coordinate::of_bank(r, b, cfg.groups ? std::optional<std::uint32_t>(g)
                                                                         : std::nullopt)});
  }
  return out;
}

// The coordinate of the node at `target` level seen from an instance.
inline Coordinate project(const Coordinate& from, Level target) {
  switch (target) {
    case Level::Bank: return from;
    case Level::Rank: return Coordinate::of_rank(from.rank);
    case Level::Global: return Coordinate::of_rank(0);
  }
  return from;
}

}  // namespace build_detail

// Emits one timed arc per (source, destination) command pair and per pair of
// transitions carrying them whose coordinates satisfy the scope. Duplicates
// (same endpoints and same canonical delay) collapse.
inline std::vector<TimedArc> expand_timing_constraints(const ModelDefinition& model, const Net& net) {
  std::map<std::string, std::vector<TransitionId>> by_command;
  for (TransitionId i = 0; i < net.transitions().size(); ++i) by_command[net.transitions()[i].command].push_back(i);

  std::vector<TimedArc> out;
  std::set<std::tuple<TransitionId, TransitionId, std::string>> seen;
  for (const auto& decl : model.timing) {
    for (const auto& src : decl.sources) {
      for (const auto& dst : decl.destinations) {
        auto s = by_command.find(src);
        auto d = by_command.find(dst);
        if (s == by_command.end()) throw BuildError("unknown command '" + src + "' in timing declaration");
        if (d == by_command.end()) throw BuildError("unknown command '" + dst + "' in timing declaration");
        for (TransitionId ti : s->second) {
          for (TransitionId tj : d->second) {
            if (!scope_admits(decl.scope, net.transitions()[ti].coord, net.transitions()[tj].coord)) continue;
            if (seen.emplace(ti, tj, canonical(decl.delay)).second) out.push_back({ti, tj, decl.delay});
          }
        }
      }
    }
  }
  return out;
}

// Instantiates a model at B banks (per group) and R ranks. Per-bank blocks are
// replicated for every bank, per-rank blocks for every rank. Arcs declared
// more than once between the same endpoints merge: regular weights add,
// inhibitor thresholds take the minimum.
inline Net build_net(const ModelDefinition& model, std::uint32_t banks, std::uint32_t ranks,
                     const BuildOptions& opts = {}) {
  using namespace build_detail;
  if (banks < 1 || ranks < 1) throw BuildError("bank and rank counts must be at least 1");
  const NetConfig cfg = config_for(model, banks, ranks, opts);

  Bindings structural;
  for (const auto& [k, v] : model.params) structural[k] = v;
  for (const auto& [k, v] : opts.overrides)
    if (structural.count(k)) structural[k] = v;
  structural[kBanksVar] = cfg.banks;
  structural[kRanksVar] = cfg.ranks;
  structural[kGroupsVar] = cfg.groups.value_or(1);
  Bindings timing = timing_bindings(model, opts.overrides);

  auto eval_natural = [&](const Expr& e, const std::string& what, std::int64_t min) -> Tokens {
    const std::int64_t v = evaluate(e, structural);
    if (v < min || v > UINT32_MAX)
      throw BuildError(what + " evaluates to " + std::to_string(v) + " under " + cfg.to_string());
    return static_cast<Tokens>(v);
  };

  std::vector<Place> places;
  std::vector<Transition> transitions;
  // (level, name, coordinate) -> node
  std::map<std::tuple<Level, std::string, Coordinate>, NodeRef> nodes;

  const Level order[] = {Level::Global, Level::Rank, Level::Bank};
  for (Level level : order) {
    for (const auto& inst : instances(level, cfg)) {
      for (const auto& block : model.blocks) {
        if (block.level != level) continue;
        for (const auto& stmt : block.stmts) {
          if (const auto* p = std::get_if<PlaceDecl>(&stmt)) {
            nodes[{level, p->name, inst.coord}] = NodeRef::place(static_cast<PlaceId>(places.size()));
            places.push_back({p->name, inst.coord, eval_natural(p->init, "initial tokens of " + p->name, 0)});
          } else if (const auto* t = std::get_if<TransitionDecl>(&stmt)) {
            nodes[{level, t->name, inst.coord}] = NodeRef::transition(static_cast<TransitionId>(transitions.size()));
            transitions.push_back({t->name, inst.coord});
          }
        }
      }
    }
  }

  const DeclarationIndex decls(model);
  std::vector<Arc> arcs;
  std::map<std::tuple<ArcKind, NodeRef, NodeRef>, std::size_t> arc_slot;
  std::size_t stmt_id = 0;
  for (const auto& block : model.blocks) {
    const auto insts = instances(block.level, cfg);
    for (const auto& stmt : block.stmts) {
      const std::size_t id = stmt_id++;
      const auto* a = std::get_if<ArcDecl>(&stmt);
      if (!a) continue;
      auto src = resolve_ref(decls, block, a->source);
      auto dst = resolve_ref(decls, block, a->target);
      if (auto* msg = std::get_if<std::string>(&src)) throw BuildError(*msg);
      if (auto* msg = std::get_if<std::string>(&dst)) throw BuildError(*msg);
      const auto& s = std::get<DeclaredNode>(src);
      const auto& d = std::get<DeclaredNode>(dst);
      const bool shape_ok = a->kind == ArcKind::Regular ? s.is_place != d.is_place : (s.is_place && !d.is_place);
      if (!shape_ok) throw BuildError("ill-formed " + print_statement(stmt));
      const Tokens w = a->weight ? eval_natural(*a->weight, "weight of " + print_statement(stmt), 1) : 1;
      for (const auto& inst : insts) {
        const NodeRef from = nodes.at({s.level, a->source.name, project(inst.coord, s.level)});
        const NodeRef to = nodes.at({d.level, a->target.name, project(inst.coord, d.level)});
        auto [it, fresh] = arc_slot.try_emplace({a->kind, from, to}, arcs.size());
        if (fresh) {
          arcs.push_back({a->kind, from, to, a->kind == ArcKind::Reset ? Tokens{1} : w, id});
        } else if (a->kind == ArcKind::Regular) {
          arcs[it->second].weight += w;
        } else if (a->kind == ArcKind::Inhibitor) {
          arcs[it->second].weight = std::min(arcs[it->second].weight, w);
        }
      }
    }
  }

  Net untimed(cfg, places, transitions, arcs, {}, timing);
  std::vector<TimedArc> timed = expand_timing_constraints(model, untimed);
  for (const auto& ta : timed) {
    const std::int64_t v = evaluate(ta.delay, timing);
    if (v < 1)
      throw BuildError("delay " + to_string(ta.delay) + " evaluates to " + std::to_string(v) + ", expected >= 1");
  }
  return Net(cfg, std::move(places), std::move(transitions), std::move(arcs), std::move(timed), std::move(timing));
}

}  // namespace drampn
