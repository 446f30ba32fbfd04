#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "drampn/build.hpp"
#include "drampn/error.hpp"
#include "drampn/model.hpp"
#include "drampn/net.hpp"
#include "drampn/semantics.hpp"
#include "drampn/traces.hpp"
#include "drampn/validate.hpp"

namespace drampn {

// Exact non-negative fraction in lowest terms.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Rational of(std::uint64_t n, std::uint64_t d) {
    if (d == 0) throw ContractError("rational with zero denominator");
    const std::uint64_t g = std::gcd(n, d);
    return g ? Rational{n / g, d / g} : Rational{0, 1};
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const { return std::to_string(num) + "/" + std::to_string(den); }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<unsigned __int128>(a.num) * b.den < static_cast<unsigned __int128>(b.num) * a.den;
  }
};

inline void require_same_config(const Net& a, const Net& b) {
  if (a.config() != b.config())
    throw ContractError("nets instantiated at different configurations: " + a.config().to_string() + " vs " +
                        b.config().to_string());
}

// Jaccard index of the length-k trace sets; 1 when both are empty.
inline Rational jaccard(const TraceSet& a, const TraceSet& b) {
  const std::size_t inter = intersection_size(a, b);
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? Rational{1, 1} : Rational::of(inter, uni);
}

inline Rational jaccard(const Net& gen, const Net& gt, std::size_t k, const EnumOptions& opts = {}) {
  require_same_config(gen, gt);
  return jaccard(enumerate_traces(gen, k, opts), enumerate_traces(gt, k, opts));
}

// A timing-constraint family: command pair, scope and canonical delay.
struct TimingConstraint {
  std::string source;
  std::string destination;
  Scope scope = Scope::IntraBank;
  std::string expr;

  friend auto operator<=>(const TimingConstraint&, const TimingConstraint&) = default;

  std::string to_string() const {
    return source + " -> " + destination + " [" + scope_name(scope) + "] : " + expr;
  }
};

struct TimingConstraintSet {
  std::set<TimingConstraint> constraints;
  // Families whose scope could not be told apart from the next looser one at
  // this configuration (e.g. intra_bank vs intra_rank with one bank).
  std::vector<TimingConstraint> ambiguous;

  std::size_t size() const { return constraints.size(); }
  bool contains(const TimingConstraint& c) const { return constraints.count(c) > 0; }
};

// Collapses per-coordinate timed arcs back into families and infers each
// family's scope as the tightest predicate admitting every realized pair.
inline TimingConstraintSet extract_timing_constraints(const Net& net) {
  const auto& ts = net.transitions();
  std::map<std::tuple<std::string, std::string, std::string>, std::set<std::pair<TransitionId, TransitionId>>> fams;
  for (const auto& ta : net.timed_arcs()) {
    if (ta.source >= ts.size() || ta.target >= ts.size()) continue;
    fams[{ts[ta.source].command, ts[ta.target].command, canonical(ta.delay)}].insert({ta.source, ta.target});
  }
  std::vector<Scope> candidates{Scope::IntraBank};
  if (net.config().groups) candidates.push_back(Scope::IntraBankGroup);
  candidates.push_back(Scope::IntraRank);
  candidates.push_back(Scope::Global);

  auto generated = [&](Scope s, const std::string& src, const std::string& dst) {
    std::set<std::pair<TransitionId, TransitionId>> out;
    for (TransitionId i = 0; i < ts.size(); ++i) {
      if (ts[i].command != src) continue;
      for (TransitionId j = 0; j < ts.size(); ++j)
        if (ts[j].command == dst && scope_admits(s, ts[i].coord, ts[j].coord)) out.insert({i, j});
    }
    return out;
  };

  TimingConstraintSet out;
  for (const auto& [key, pairs] : fams) {
    const auto& [src, dst, expr] = key;
    std::size_t chosen = candidates.size() - 1;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const bool admits_all = std::all_of(pairs.begin(), pairs.end(), [&](const auto& p) {
        return scope_admits(candidates[c], ts[p.first].coord, ts[p.second].coord);
      });
      if (admits_all) {
        chosen = c;
        break;
      }
    }
    TimingConstraint tc{src, dst, candidates[chosen], expr};
    if (chosen + 1 < candidates.size() &&
        generated(candidates[chosen], src, dst) == generated(candidates[chosen + 1], src, dst))
      out.ambiguous.push_back(tc);
    out.constraints.insert(std::move(tc));
  }
  return out;
}

// |TC(gen) & TC(gt)| / |TC(gt)|; constraints only in gen are not penalized.
inline Rational tc_recall(const TimingConstraintSet& gen, const TimingConstraintSet& gt) {
  if (gt.size() == 0) throw ContractError("timing recall is undefined for a ground truth without timing constraints");
  std::size_t hit = 0;
  for (const auto& c : gt.constraints) hit += gen.contains(c);
  return Rational::of(hit, gt.size());
}

inline Rational tc_recall(const Net& gen, const Net& gt) {
  return tc_recall(extract_timing_constraints(gen), extract_timing_constraints(gt));
}

struct Witness {
  std::string trace;      // serialized; timed form when the check was timed
  std::size_t length = 0;
  int present_in = 1;     // 1 or 2: the only net admitting the trace
  bool timing_only = false;  // both nets admit the commands, at different times
};

struct EquivalenceVerdict {
  bool equivalent = true;
  std::optional<Witness> witness;
  std::size_t joint_states = 0;
};

namespace metrics_detail {

// Per-net view used by the product exploration: transition labels shared by
// both nets are matched by (command, coordinate), never by index.
struct Side {
  const Net* net;
  std::vector<std::int64_t> max_out_delay;  // per transition, -1 if not a timed source
  std::vector<TransitionId> timed_sources;

  explicit Side(const Net& n) : net(&n), max_out_delay(n.transitions().size(), -1) {
    for (const auto& ta : n.timed_arcs()) {
      if (ta.source >= n.transitions().size()) continue;
      if (auto v = n.delay_value(ta)) max_out_delay[ta.source] = std::max(max_out_delay[ta.source], *v);
    }
    for (TransitionId t = 0; t < max_out_delay.size(); ++t)
      if (max_out_delay[t] >= 0) timed_sources.push_back(t);
  }

  // Enough of the firing history to decide all future minimum times.
  void encode(const SimState& s, std::vector<std::int64_t>& key) const {
    for (Tokens x : s.marking.tokens()) key.push_back(x);
    key.push_back(-2);
    for (TransitionId t : timed_sources) {
      const auto& last = s.last_fired[t];
      key.push_back(last ? std::min(s.now - *last, max_out_delay[t]) : -1);
    }
  }
};

struct KeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (auto x : v) h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

}  // namespace metrics_detail

// Breadth-first search over pairs of states reached by the same label trace.
// Both nets are label-deterministic, so the trace sets agree up to length k
// iff at every joint state reached within k-1 steps the enabled labels (and,
// when timed, their minimum delays) agree. The first disagreement found is a
// shortest witness.
inline EquivalenceVerdict check_trace_equivalence(const Net& n1, const Net& n2, std::size_t k, bool timed = false,
                                                  const EnumOptions& opts = {}) {
  using namespace metrics_detail;
  require_same_config(n1, n2);
  const Side a(n1), b(n2);
  std::map<std::string, std::pair<std::optional<TransitionId>, std::optional<TransitionId>>> by_label;
  for (TransitionId t = 0; t < n1.transitions().size(); ++t) by_label[n1.transitions()[t].label()].first = t;
  for (TransitionId t = 0; t < n2.transitions().size(); ++t) by_label[n2.transitions()[t].label()].second = t;
  // Labels in sorted order; fixes the exploration (and witness) order.
  std::vector<std::pair<std::string, std::pair<std::optional<TransitionId>, std::optional<TransitionId>>>> labels(
      by_label.begin(), by_label.end());

  struct Node {
    SimState s1, s2;
    std::int64_t parent;
    std::size_t label;
    std::size_t depth;
  };
  std::vector<Node> nodes;
  nodes.push_back({initial_state(n1), initial_state(n2), -1, 0, 0});
  std::unordered_map<std::vector<std::int64_t>, std::size_t, KeyHash> seen;
  auto key_of = [&](const Node& n) {
    std::vector<std::int64_t> key;
    a.encode(n.s1, key);
    key.push_back(-3);
    b.encode(n.s2, key);
    if (!timed) {
      // Untimed futures depend on markings only.
      key.clear();
      for (Tokens x : n.s1.marking.tokens()) key.push_back(x);
      key.push_back(-2);
      for (Tokens x : n.s2.marking.tokens()) key.push_back(x);
    }
    return key;
  };
  seen.emplace(key_of(nodes[0]), 0);

  auto path_to = [&](std::size_t i) {
    std::vector<std::size_t> path;
    for (std::int64_t j = static_cast<std::int64_t>(i); nodes[j].parent >= 0; j = nodes[j].parent)
      path.push_back(nodes[j].label);
    std::reverse(path.begin(), path.end());
    return path;
  };

  EquivalenceVerdict verdict;
  std::size_t expansions = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].depth >= k) continue;
    if (++expansions > opts.budget) throw BudgetExceeded(opts.budget);
    for (std::size_t l = 0; l < labels.size(); ++l) {
      const auto& [t1, t2] = labels[l].second;
      const auto& cur = nodes[i];
      const std::optional<Time> tau1 = t1 ? min_fire_time(n1, cur.s1, *t1) : std::nullopt;
      const std::optional<Time> tau2 = t2 ? min_fire_time(n2, cur.s2, *t2) : std::nullopt;
      if (!tau1 && !tau2) continue;
      const bool structural = tau1.has_value() != tau2.has_value();
      const bool timing = !structural && timed && (*tau1 - cur.s1.now) != (*tau2 - cur.s2.now);
      if (structural || timing) {
        auto path = path_to(i);
        path.push_back(l);
        const int present = tau1 ? 1 : 2;
        const Net& host = present == 1 ? n1 : n2;
        std::vector<TransitionId> ids;
        for (std::size_t x : path) ids.push_back(present == 1 ? *labels[x].second.first : *labels[x].second.second);
        std::string text;
        const auto times = timed ? minimum_times(host, ids) : std::vector<Time>{};
        for (std::size_t x = 0; x < ids.size(); ++x) {
          if (x) text += ',';
          text += host.transitions()[ids[x]].label();
          if (timed) text += ":" + std::to_string(times[x]);
        }
        verdict.equivalent = false;
        verdict.witness = Witness{text, ids.size(), present, timing};
        verdict.joint_states = nodes.size();
        return verdict;
      }
      Node next{fire(n1, cur.s1, *t1, *tau1), fire(n2, cur.s2, *t2, *tau2), static_cast<std::int64_t>(i), l,
                cur.depth + 1};
      auto key = key_of(next);
      if (seen.count(key)) continue;
      seen.emplace(std::move(key), nodes.size());
      nodes.push_back(std::move(next));
    }
  }
  verdict.joint_states = nodes.size();
  return verdict;
}

struct HypothesisChecks {
  bool symmetric = false;
  bool linear = false;
  bool met() const { return symmetric && linear; }
};

struct ConjectureVerdict {
  bool equivalent = true;
  std::optional<Witness> witness;
  std::optional<NetConfig> witness_config;
  HypothesisChecks first, second;
  bool hypotheses_met() const { return first.met() && second.met(); }
};

inline HypothesisChecks hypothesis_checks(const ModelDefinition& m, const BuildOptions& opts) {
  HypothesisChecks h;
  h.symmetric = check_bank_symmetry(build_net(m, 2, 1, opts)) && check_bank_symmetry(build_net(m, 1, 1, opts));
  h.linear = check_weight_linearity(m, opts).linear;
  return h;
}

// Compares length-4 (by default) untimed traces at one and two banks on a
// single rank. Hypothesis failures are recorded; the trace check still runs.
inline ConjectureVerdict minimal_config_check(const ModelDefinition& m1, const ModelDefinition& m2,
                                              const BuildOptions& opts = {}, std::size_t k = 4,
                                              const EnumOptions& enum_opts = {}) {
  ConjectureVerdict v;
  v.first = hypothesis_checks(m1, opts);
  v.second = hypothesis_checks(m2, opts);
  for (std::uint32_t banks : {1u, 2u}) {
    const Net a = build_net(m1, banks, 1, opts);
    const Net b = build_net(m2, banks, 1, opts);
    auto r = check_trace_equivalence(a, b, k, false, enum_opts);
    if (!r.equivalent) {
      v.equivalent = false;
      v.witness = r.witness;
      v.witness_config = a.config();
      return v;
    }
  }
  return v;
}

struct ComparisonReport {
  Rational jaccard;
  std::size_t k = 0;
  NetConfig config;
  std::size_t gen_traces = 0, gt_traces = 0, common_traces = 0;
  std::optional<Rational> tc_recall;  // empty when the ground truth has no constraints
  std::vector<TimingConstraint> missing_constraints;
  std::vector<TimingConstraint> extra_constraints;
  std::vector<TimingConstraint> ambiguous_constraints;
  std::vector<std::string> witness_traces;  // in exactly one net; gen-only first
};

// Jaccard on traces of `gen`/`gt` at their shared configuration. Timing
// constraints come from `gen_tc`/`gt_tc`, which callers may build at a
// larger configuration so scope inference is exact.
inline ComparisonReport compare_nets(const Net& gen, const Net& gt, std::size_t k, const Net& gen_tc, const Net& gt_tc,
                                     std::size_t max_witnesses = 10, const EnumOptions& opts = {}) {
  require_same_config(gen, gt);
  ComparisonReport rep;
  rep.k = k;
  rep.config = gen.config();
  const TraceSet a = enumerate_traces(gen, k, opts);
  const TraceSet b = enumerate_traces(gt, k, opts);
  rep.gen_traces = a.size();
  rep.gt_traces = b.size();
  rep.common_traces = intersection_size(a, b);
  rep.jaccard = jaccard(a, b);
  std::vector<std::string> only_gen, only_gt;
  for (const auto& t : a)
    if (!b.contains(t)) only_gen.push_back(t);
  for (const auto& t : b)
    if (!a.contains(t)) only_gt.push_back(t);
  for (auto* src : {&only_gen, &only_gt})
    for (const auto& t : *src)
      if (rep.witness_traces.size() < max_witnesses) rep.witness_traces.push_back(t);

  const auto tc_gen = extract_timing_constraints(gen_tc);
  const auto tc_gt = extract_timing_constraints(gt_tc);
  if (tc_gt.size() > 0) rep.tc_recall = tc_recall(tc_gen, tc_gt);
  for (const auto& c : tc_gt.constraints)
    if (!tc_gen.contains(c)) rep.missing_constraints.push_back(c);
  for (const auto& c : tc_gen.constraints)
    if (!tc_gt.contains(c)) rep.extra_constraints.push_back(c);
  rep.ambiguous_constraints = tc_gt.ambiguous;
  return rep;
}

}  // namespace drampn
