#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <deque>
#include <exception>
#include <iterator>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "drampn/error.hpp"
#include "drampn/net.hpp"
#include "drampn/semantics.hpp"

namespace drampn {

inline constexpr std::size_t kDefaultBudget = 10'000'000;

struct EnumOptions {
  std::size_t budget = kDefaultBudget;  // node expansions
  unsigned workers = 1;
};

struct EnumStats {
  std::size_t states = 0;      // distinct markings expanded
  std::size_t expansions = 0;  // states plus materialized prefix nodes
};

struct Step {
  std::string command;
  Coordinate coord;

  std::string to_string() const { return command + "@" + coord.to_string(); }
  friend bool operator==(const Step&, const Step&) = default;
};

using Trace = std::vector<Step>;

inline std::string format_trace(const Trace& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ',';
    s += t[i].to_string();
  }
  return s;
}

inline Trace trace_of(const Net& net, const std::vector<TransitionId>& path) {
  Trace t;
  t.reserve(path.size());
  for (TransitionId id : path) t.push_back({net.transitions()[id].command, net.transitions()[id].coord});
  return t;
}

// A set of traces keyed by their serialized form (`CMD@coord,...`, with
// `:time` per step for timed traces). Kept sorted and unique, so file order
// is lexicographic and set algebra is a linear merge.
class TraceSet {
public:
  TraceSet() = default;
  explicit TraceSet(std::vector<std::string> keys) : keys_(std::move(keys)) {
    std::sort(keys_.begin(), keys_.end());
    keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
  }

  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  auto begin() const { return keys_.begin(); }
  auto end() const { return keys_.end(); }
  const std::vector<std::string>& keys() const { return keys_; }

  bool contains(const std::string& key) const { return std::binary_search(keys_.begin(), keys_.end(), key); }

  friend bool operator==(const TraceSet&, const TraceSet&) = default;

  friend std::size_t intersection_size(const TraceSet& a, const TraceSet& b) {
    std::size_t n = 0;
    auto i = a.keys_.begin(), j = b.keys_.begin();
    while (i != a.keys_.end() && j != b.keys_.end()) {
      if (*i < *j) ++i;
      else if (*j < *i) ++j;
      else {
        ++n;
        ++i;
        ++j;
      }
    }
    return n;
  }

  friend std::vector<std::string> symmetric_difference(const TraceSet& a, const TraceSet& b) {
    std::vector<std::string> out;
    std::set_symmetric_difference(a.keys_.begin(), a.keys_.end(), b.keys_.begin(), b.keys_.end(),
                                  std::back_inserter(out));
    return out;
  }

  std::string serialize() const {
    std::string out;
    for (const auto& k : keys_) {
      out += k;
      out += '\n';
    }
    return out;
  }

private:
  std::vector<std::string> keys_;
};

namespace traces_detail {

using StateId = std::uint32_t;

// Markings reachable within `depth` firings, each expanded once. Untimed
// futures depend on the marking alone, so merging equal markings never loses
// a trace; paths through this graph are exactly the untimed traces.
struct StateGraph {
  std::vector<Marking> markings;
  std::vector<std::vector<std::pair<TransitionId, StateId>>> succ;
  std::vector<std::uint32_t> depth;
};

inline StateGraph explore(const Net& net, std::size_t depth, std::atomic<std::size_t>& expansions,
                          std::size_t budget) {
  StateGraph g;
  std::unordered_map<Marking, StateId, MarkingHash> ids;
  auto intern = [&](Marking m, std::uint32_t d) {
    auto [it, fresh] = ids.try_emplace(m, static_cast<StateId>(g.markings.size()));
    if (fresh) {
      g.markings.push_back(std::move(m));
      g.succ.emplace_back();
      g.depth.push_back(d);
    }
    return it->second;
  };
  intern(net.initial_marking(), 0);
  for (StateId s = 0; s < g.markings.size(); ++s) {  // BFS order: first visit is shallowest
    if (g.depth[s] >= depth) continue;
    if (++expansions > budget) throw BudgetExceeded(budget);
    std::vector<std::pair<TransitionId, StateId>> out;
    for (TransitionId t = 0; t < net.transitions().size(); ++t) {
      if (!enabled_untimed(net, g.markings[s], t)) continue;
      out.emplace_back(t, intern(fire_untimed(net, g.markings[s], t), g.depth[s] + 1));
    }
    g.succ[s] = std::move(out);
  }
  return g;
}

// Walks all paths of exactly `length` steps from the root, calling
// visit(path) for each. Root edges are dealt round-robin to workers; each
// worker gets its own sink and the caller merges them.
template <class Sink, class Visit>
std::vector<Sink> walk_paths(const StateGraph& g, std::size_t length, unsigned workers,
                             std::atomic<std::size_t>& expansions, std::size_t budget, Visit visit) {
  workers = std::max(1u, workers);
  std::vector<Sink> sinks(workers);
  if (length == 0) return sinks;
  const auto& roots = g.succ[0];
  auto run = [&](unsigned w) {
    std::vector<TransitionId> path;
    std::vector<std::pair<StateId, std::size_t>> stack;  // (state, next edge)
    for (std::size_t r = w; r < roots.size(); r += workers) {
      path.assign(1, roots[r].first);
      if (++expansions > budget) throw BudgetExceeded(budget);
      if (length == 1) {
        visit(sinks[w], path);
        continue;
      }
      stack.assign(1, {roots[r].second, 0});
      while (!stack.empty()) {
        auto& [s, next] = stack.back();
        if (next == g.succ[s].size()) {
          stack.pop_back();
          path.pop_back();
          continue;
        }
        const auto [t, child] = g.succ[s][next++];
        path.push_back(t);
        if (++expansions > budget) throw BudgetExceeded(budget);
        if (path.size() == length) {
          visit(sinks[w], path);
          path.pop_back();
        } else {
          stack.push_back({child, 0});
        }
      }
    }
  };
  if (workers == 1) {
    run(0);
    return sinks;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        run(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return sinks;
}

inline std::vector<std::string> step_labels(const Net& net) {
  std::vector<std::string> labels;
  for (const auto& t : net.transitions()) labels.push_back(t.label());
  return labels;
}

}  // namespace traces_detail

// Tr_k: every length-k transition sequence firable from the initial marking,
// timing ignored.
inline TraceSet enumerate_traces(const Net& net, std::size_t k, const EnumOptions& opts = {},
                                 EnumStats* stats = nullptr) {
  using namespace traces_detail;
  if (k < 1) throw ContractError("trace length must be at least 1");
  std::atomic<std::size_t> expansions{0};
  const StateGraph g = explore(net, k, expansions, opts.budget);
  const auto labels = step_labels(net);
  auto sinks = walk_paths<std::vector<std::string>>(
      g, k, opts.workers, expansions, opts.budget,
      [&](std::vector<std::string>& out, const std::vector<TransitionId>& path) {
        std::string key;
        for (std::size_t i = 0; i < path.size(); ++i) {
          if (i) key += ',';
          key += labels[path[i]];
        }
        out.push_back(std::move(key));
      });
  std::vector<std::string> all;
  for (auto& s : sinks) all.insert(all.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  if (stats) *stats = {g.markings.size(), expansions.load()};
  return TraceSet(std::move(all));
}

// Replays a transition path under timed semantics at minimum firing times.
inline std::vector<Time> minimum_times(const Net& net, const std::vector<TransitionId>& path) {
  SimState s = initial_state(net);
  std::vector<Time> times;
  for (TransitionId t : path) {
    const auto tau = min_fire_time(net, s, t);
    if (!tau) throw ContractError("path is not firable at " + net.transitions()[t].label());
    s = fire(net, s, t, *tau);
    times.push_back(*tau);
  }
  return times;
}

// Tr_k^tau: each untimed trace annotated with its minimum firing times.
inline TraceSet enumerate_timed_traces(const Net& net, std::size_t k, const EnumOptions& opts = {}) {
  using namespace traces_detail;
  if (k < 1) throw ContractError("trace length must be at least 1");
  std::atomic<std::size_t> expansions{0};
  const StateGraph g = explore(net, k, expansions, opts.budget);
  const auto labels = step_labels(net);
  auto sinks = walk_paths<std::vector<std::string>>(
      g, k, opts.workers, expansions, opts.budget,
      [&](std::vector<std::string>& out, const std::vector<TransitionId>& path) {
        const auto times = minimum_times(net, path);
        std::string key;
        for (std::size_t i = 0; i < path.size(); ++i) {
          if (i) key += ',';
          key += labels[path[i]] + ":" + std::to_string(times[i]);
        }
        out.push_back(std::move(key));
      });
  std::vector<std::string> all;
  for (auto& s : sinks) all.insert(all.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  return TraceSet(std::move(all));
}

struct Deadlock {
  Trace witness;
  Marking marking;
};

// Markings reachable within `depth` untimed firings that enable nothing, each
// with a shortest witnessing trace.
inline std::vector<Deadlock> find_deadlocks(const Net& net, std::size_t depth, const EnumOptions& opts = {}) {
  struct Node {
    Marking marking;
    std::int64_t parent;
    TransitionId via;
    std::size_t depth;
  };
  std::vector<Node> nodes{{net.initial_marking(), -1, 0, 0}};
  std::unordered_map<Marking, std::size_t, MarkingHash> seen{{nodes[0].marking, 0}};
  std::vector<Deadlock> out;
  std::size_t expansions = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (++expansions > opts.budget) throw BudgetExceeded(opts.budget);
    bool any = false;
    for (TransitionId t = 0; t < net.transitions().size(); ++t) {
      if (!enabled_untimed(net, nodes[i].marking, t)) continue;
      any = true;
      if (nodes[i].depth >= depth) break;
      Marking next = fire_untimed(net, nodes[i].marking, t);
      if (seen.count(next)) continue;
      seen.emplace(next, nodes.size());
      nodes.push_back({std::move(next), static_cast<std::int64_t>(i), t, nodes[i].depth + 1});
    }
    if (!any) {
      std::vector<TransitionId> path;
      for (std::int64_t j = static_cast<std::int64_t>(i); nodes[j].parent >= 0; j = nodes[j].parent)
        path.push_back(nodes[j].via);
      std::reverse(path.begin(), path.end());
      out.push_back({trace_of(net, path), nodes[i].marking});
    }
  }
  return out;
}

}  // namespace drampn
