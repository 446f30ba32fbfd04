#pragma once

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "drampn.hpp"

namespace testing_support {

using namespace drampn;

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"mini-ddr", "mini-ddr-bg", "mini-ddr-pwr", "guard-token",
                                              "guard-inhibitor"};
  return names;
}

inline std::string fixture_path(const std::string& name) { return std::string(DRAMPN_MODELS_DIR) + "/" + name + ".dpn"; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ModelDefinition fixture(const std::string& name) { return parse_model(read_file(fixture_path(name))); }

// Independent reference semantics, written against the raw arc list rather
// than the net's precomputed index. No memoization: every sequence is tried.
struct Oracle {
  const Net& net;

  bool enabled(const std::vector<long>& m, TransitionId t) const {
    for (const auto& a : net.arcs()) {
      if (a.target.is_place() || a.target.index != t) continue;
      if (a.kind == ArcKind::Regular && m[a.source.index] < static_cast<long>(a.weight)) return false;
      if (a.kind == ArcKind::Inhibitor && m[a.source.index] >= static_cast<long>(a.weight)) return false;
    }
    return true;
  }

  std::vector<long> fire(std::vector<long> m, TransitionId t) const {
    for (const auto& a : net.arcs())
      if (a.kind == ArcKind::Regular && !a.target.is_place() && a.target.index == t) m[a.source.index] -= a.weight;
    for (const auto& a : net.arcs())
      if (a.kind == ArcKind::Reset && a.target.index == t) m[a.source.index] = 0;
    for (const auto& a : net.arcs())
      if (a.kind == ArcKind::Regular && a.source.kind == NodeRef::Kind::Transition && a.source.index == t)
        m[a.target.index] += a.weight;
    return m;
  }

  std::vector<long> initial() const {
    std::vector<long> m;
    for (const auto& p : net.places()) m.push_back(p.initial_tokens);
    return m;
  }

  void walk(const std::vector<long>& m, std::size_t k, std::vector<TransitionId>& path,
            std::set<std::vector<TransitionId>>& out) const {
    if (path.size() == k) {
      out.insert(path);
      return;
    }
    for (TransitionId t = 0; t < net.transitions().size(); ++t) {
      if (!enabled(m, t)) continue;
      path.push_back(t);
      walk(fire(m, t), k, path, out);
      path.pop_back();
    }
  }

  std::set<std::vector<TransitionId>> paths(std::size_t k) const {
    std::set<std::vector<TransitionId>> out;
    std::vector<TransitionId> path;
    walk(initial(), k, path, out);
    return out;
  }

  std::string key(const std::vector<TransitionId>& path) const {
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) s += (i ? "," : "") + net.transitions()[path[i]].label();
    return s;
  }

  std::set<std::string> traces(std::size_t k) const {
    std::set<std::string> out;
    for (const auto& p : paths(k)) out.insert(key(p));
    return out;
  }

  // Minimum times by direct scan of the timed-arc list.
  std::vector<long> times(const std::vector<TransitionId>& path) const {
    std::vector<long> out;
    std::vector<std::optional<long>> last(net.transitions().size());
    long now = -1;
    for (TransitionId t : path) {
      long tau = now + 1;
      for (const auto& ta : net.timed_arcs())
        if (ta.target == t && last[ta.source]) tau = std::max(tau, *last[ta.source] + evaluate(ta.delay, net.timing_params()));
      last[t] = tau;
      now = tau;
      out.push_back(tau);
    }
    return out;
  }

  std::set<std::string> timed_traces(std::size_t k) const {
    std::set<std::string> out;
    for (const auto& p : paths(k)) {
      const auto ts = times(p);
      std::string s;
      for (std::size_t i = 0; i < p.size(); ++i)
        s += (i ? "," : "") + net.transitions()[p[i]].label() + ":" + std::to_string(ts[i]);
      out.insert(s);
    }
    return out;
  }
};

inline std::set<std::string> as_set(const TraceSet& ts) { return {ts.begin(), ts.end()}; }

}  // namespace testing_support
