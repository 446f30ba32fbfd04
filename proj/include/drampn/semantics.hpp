#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "drampn/error.hpp"
#include "drampn/net.hpp"

namespace drampn {

using Time = std::int64_t;

// Marking plus firing history. `now` starts at -1 so an unconstrained first
// command fires at time 0.
struct SimState {
  Marking marking;
  std::vector<std::optional<Time>> last_fired;
  Time now = -1;

  friend bool operator==(const SimState&, const SimState&) = default;
};

inline SimState initial_state(const Net& net) {
  return {net.initial_marking(), std::vector<std::optional<Time>>(net.transitions().size()), -1};
}

// Structural enabledness: every regular input holds at least its weight and
// every inhibitor place holds fewer tokens than its threshold. Reset arcs
// impose nothing.
inline bool enabled_untimed(const Net& net, const Marking& m, TransitionId t) {
  const TransitionIO& io = net.io(t);
  for (const auto& [p, w] : io.inputs)
    if (m[p] < w) return false;
  for (const auto& [p, w] : io.inhibitors)
    if (m[p] >= w) return false;
  return true;
}

// Earliest time t may fire: strictly after `now` and no earlier than
// last_fired[s] + d for every timed arc (s, t, d) whose source has fired.
inline std::optional<Time> min_fire_time(const Net& net, const SimState& s, TransitionId t) {
  if (!enabled_untimed(net, s.marking, t)) return std::nullopt;
  Time tau = s.now + 1;
  for (const auto& [src, d] : net.io(t).timed_in)
    if (s.last_fired[src]) tau = std::max(tau, *s.last_fired[src] + d);
  return tau;
}

// Token game only: consume, then reset, then produce.
inline Marking fire_untimed(const Net& net, const Marking& m, TransitionId t) {
  const TransitionIO& io = net.io(t);
  Marking out = m;
  for (const auto& [p, w] : io.inputs) {
    assert(out[p] >= w);
    out[p] -= w;
  }
  for (PlaceId p : io.resets) out[p] = 0;
  for (const auto& [p, w] : io.outputs) out[p] += w;
  return out;
}

inline SimState fire(const Net& net, const SimState& s, TransitionId t, Time tau) {
  if (t >= net.transitions().size()) throw ContractError("fire: no such transition");
  const auto earliest = min_fire_time(net, s, t);
  if (!earliest) throw ContractError("fire: " + net.transitions()[t].label() + " is not enabled");
  if (tau < *earliest)
    throw ContractError("fire: " + net.transitions()[t].label() + " at " + std::to_string(tau) +
                        " precedes its minimum time " + std::to_string(*earliest));
  SimState out{fire_untimed(net, s.marking, t), s.last_fired, tau};
  out.last_fired[t] = tau;
  return out;
}

// Every untimed-enabled transition with its minimum firing time, in
// transition order.
inline std::vector<std::pair<TransitionId, Time>> enabled_set(const Net& net, const SimState& s) {
  std::vector<std::pair<TransitionId, Time>> out;
  for (TransitionId t = 0; t < net.transitions().size(); ++t)
    if (auto tau = min_fire_time(net, s, t)) out.emplace_back(t, *tau);
  return out;
}

}  // namespace drampn
