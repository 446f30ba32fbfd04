#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drampn/coordinate.hpp"
#include "drampn/error.hpp"
#include "drampn/expr.hpp"

namespace drampn {

using Tokens = std::uint32_t;
using PlaceId = std::uint32_t;
using TransitionId = std::uint32_t;

struct NetConfig {
  std::uint32_t banks = 1;  // per bank group when groups are configured
  std::uint32_t ranks = 1;
  std::optional<std::uint32_t> groups;

  std::uint32_t banks_per_rank() const { return banks * groups.value_or(1); }

  friend bool operator==(const NetConfig&, const NetConfig&) = default;

  std::string to_string() const {
    std::string s = "B=" + std::to_string(banks) + ",R=" + std::to_string(ranks);
    if (groups) s += ",G=" + std::to_string(*groups);
    return s;
  }
};

struct Place {
  std::string name;
  Coordinate coord;
  Tokens initial_tokens = 0;

  std::string label() const { return name + "@" + coord.to_string(); }
};

struct Transition {
  std::string command;
  Coordinate coord;

  std::string label() const { return command + "@" + coord.to_string(); }
};

struct NodeRef {
  enum class Kind : std::uint8_t { Place, Transition };
  Kind kind = Kind::Place;
  std::uint32_t index = 0;

  static NodeRef place(PlaceId i) { return {Kind::Place, i}; }
  static NodeRef transition(TransitionId i) { return {Kind::Transition, i}; }

  bool is_place() const { return kind == Kind::Place; }

  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

enum class ArcKind : std::uint8_t { Regular, Inhibitor, Reset };

inline const char* arc_kind_name(ArcKind k) {
  switch (k) {
    case ArcKind::Regular: return "arc";
    case ArcKind::Inhibitor: return "inhibitor";
    case ArcKind::Reset: return "reset";
  }
  return "?";
}

struct Arc {
  ArcKind kind = ArcKind::Regular;
  NodeRef source;
  NodeRef target;
  Tokens weight = 1;  // ignored for Reset
  // Index of the model statement this arc was instantiated from, if any.
  std::optional<std::size_t> origin;
};

struct TimedArc {
  TransitionId source = 0;
  TransitionId target = 0;
  Expr delay;
};

// Token count per place, indexed by PlaceId.
class Marking {
public:
  Marking() = default;
  explicit Marking(std::vector<Tokens> tokens) : tokens_(std::move(tokens)) {}

  Tokens operator[](PlaceId p) const { return tokens_[p]; }
  Tokens& operator[](PlaceId p) { return tokens_[p]; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<Tokens>& tokens() const { return tokens_; }

  friend auto operator<=>(const Marking&, const Marking&) = default;
  friend bool operator==(const Marking&, const Marking&) = default;

  std::size_t hash() const {
    std::size_t h = 1469598103934665603ull;
    for (Tokens t : tokens_) {
      h ^= t + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }

private:
  std::vector<Tokens> tokens_;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const { return m.hash(); }
};

// Per-transition view of the arcs, precomputed for the firing rule.
struct TransitionIO {
  std::vector<std::pair<PlaceId, Tokens>> inputs;
  std::vector<std::pair<PlaceId, Tokens>> outputs;
  std::vector<std::pair<PlaceId, Tokens>> inhibitors;
  std::vector<PlaceId> resets;
  // (source transition, bound delay) for timed arcs ending here.
  std::vector<std::pair<TransitionId, std::int64_t>> timed_in;
};

// A coordinate-decorated timed inhibitor-reset Petri net. Immutable once
// constructed. Arcs whose endpoints do not exist are kept (so validation can
// report them) but take no part in the firing rule.
class Net {
public:
  Net() = default;

  Net(NetConfig config, std::vector<Place> places, std::vector<Transition> transitions,
      std::vector<Arc> arcs, std::vector<TimedArc> timed_arcs, Bindings timing_params)
      : config_(config),
        places_(std::move(places)),
        transitions_(std::move(transitions)),
        arcs_(std::move(arcs)),
        timed_arcs_(std::move(timed_arcs)),
        timing_params_(std::move(timing_params)) {
    for (const auto& p : places_) check_coordinate(p.coord, p.label());
    for (const auto& t : transitions_) check_coordinate(t.coord, t.label());
    index();
  }

  const NetConfig& config() const { return config_; }
  const std::vector<Place>& places() const { return places_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<TimedArc>& timed_arcs() const { return timed_arcs_; }
  const Bindings& timing_params() const { return timing_params_; }
  const TransitionIO& io(TransitionId t) const { return io_[t]; }

  bool has_place(NodeRef r) const { return r.is_place() && r.index < places_.size(); }
  bool has_transition(NodeRef r) const { return !r.is_place() && r.index < transitions_.size(); }
  bool has_node(NodeRef r) const { return has_place(r) || has_transition(r); }

  std::string node_label(NodeRef r) const {
    if (has_place(r)) return places_[r.index].label();
    if (has_transition(r)) return transitions_[r.index].label();
    return std::string(r.is_place() ? "place#" : "transition#") + std::to_string(r.index);
  }

  // Bound delay of a timed arc; empty if a referenced parameter is unbound.
  std::optional<std::int64_t> delay_value(const TimedArc& ta) const {
    try {
      return evaluate(ta.delay, timing_params_);
    } catch (const BuildError&) {
      return std::nullopt;
    }
  }

  Marking initial_marking() const {
    std::vector<Tokens> m;
    m.reserve(places_.size());
    for (const auto& p : places_) m.push_back(p.initial_tokens);
    return Marking(std::move(m));
  }

  std::optional<TransitionId> find_transition(const std::string& label) const {
    auto it = transition_by_label_.find(label);
    if (it == transition_by_label_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<PlaceId> find_place(const std::string& label) const {
    auto it = place_by_label_.find(label);
    if (it == place_by_label_.end()) return std::nullopt;
    return it->second;
  }

  // Label-based description of the whole net, sorted. Two nets are equal by
  // labels iff their signatures are equal; internal indices never appear.
  // `remap` relabels coordinates first, which is how automorphisms are tested.
  std::vector<std::string> signature(const std::function<Coordinate(const Coordinate&)>& remap = {}) const {
    auto place_label = [&](PlaceId i) {
      const auto& p = places_[i];
      return p.name + "@" + (remap ? remap(p.coord) : p.coord).to_string();
    };
    auto transition_label = [&](TransitionId i) {
      const auto& t = transitions_[i];
      return t.command + "@" + (remap ? remap(t.coord) : t.coord).to_string();
    };
    auto label = [&](NodeRef r) {
      if (has_place(r)) return place_label(r.index);
      if (has_transition(r)) return transition_label(r.index);
      return node_label(r);
    };
    std::vector<std::string> sig;
    for (PlaceId i = 0; i < places_.size(); ++i)
      sig.push_back("P " + place_label(i) + " " + std::to_string(places_[i].initial_tokens));
    for (TransitionId i = 0; i < transitions_.size(); ++i) sig.push_back("T " + transition_label(i));
    for (const auto& a : arcs_) {
      std::string s = std::string("A ") + arc_kind_name(a.kind) + " " + label(a.source) + " " + label(a.target);
      if (a.kind != ArcKind::Reset) s += " " + std::to_string(a.weight);
      sig.push_back(std::move(s));
    }
    for (const auto& ta : timed_arcs_) {
      auto v = delay_value(ta);
      sig.push_back("D " + label(NodeRef::transition(ta.source)) + " " + label(NodeRef::transition(ta.target)) +
                    " " + canonical(ta.delay) + " " + (v ? std::to_string(*v) : "?"));
    }
    std::sort(sig.begin(), sig.end());
    return sig;
  }

  friend bool label_equal(const Net& a, const Net& b) {
    return a.config_ == b.config_ && a.signature() == b.signature();
  }

private:
  void check_coordinate(const Coordinate& c, const std::string& what) const {
    bool ok = c.rank < config_.ranks;
    if (c.is_bank()) {
      ok = ok && c.bank && *c.bank < config_.banks;
      if (config_.groups) {
        ok = ok && c.group && *c.group < *config_.groups;
      } else {
        ok = ok && !c.group;
      }
    } else {
      ok = ok && !c.bank && !c.group;
    }
    if (!ok) throw BuildError("coordinate out of range for " + what + " under " + config_.to_string());
  }

  void index() {
    io_.assign(transitions_.size(), {});
    for (PlaceId i = 0; i < places_.size(); ++i) place_by_label_.emplace(places_[i].label(), i);
    for (TransitionId i = 0; i < transitions_.size(); ++i) transition_by_label_.emplace(transitions_[i].label(), i);
    for (const auto& a : arcs_) {
      if (!has_node(a.source) || !has_node(a.target)) continue;
      if (a.kind == ArcKind::Regular) {
        if (has_place(a.source) && has_transition(a.target)) {
          io_[a.target.index].inputs.emplace_back(a.source.index, a.weight);
        } else if (has_transition(a.source) && has_place(a.target)) {
          io_[a.source.index].outputs.emplace_back(a.target.index, a.weight);
        }
      } else if (has_place(a.source) && has_transition(a.target)) {
        if (a.kind == ArcKind::Inhibitor) {
          io_[a.target.index].inhibitors.emplace_back(a.source.index, a.weight);
        } else {
          io_[a.target.index].resets.push_back(a.source.index);
        }
      }
    }
    for (const auto& ta : timed_arcs_) {
      if (ta.source >= transitions_.size() || ta.target >= transitions_.size()) continue;
      if (auto v = delay_value(ta)) io_[ta.target].timed_in.emplace_back(ta.source, *v);
    }
  }

  NetConfig config_;
  std::vector<Place> places_;
  std::vector<Transition> transitions_;
  std::vector<Arc> arcs_;
  std::vector<TimedArc> timed_arcs_;
  Bindings timing_params_;
  std::vector<TransitionIO> io_;
  std::map<std::string, PlaceId, std::less<>> place_by_label_;
  std::map<std::string, TransitionId, std::less<>> transition_by_label_;
};

}  // namespace drampn
