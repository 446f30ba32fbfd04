#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "drampn/build.hpp"
#include "drampn/error.hpp"
#include "drampn/metrics.hpp"
#include "drampn/model.hpp"
#include "drampn/validate.hpp"

namespace drampn {

enum class MutationKind : std::uint8_t {
  RemoveInhibitorArc,
  PerturbArcWeight,
  ModifyCoordinatePredicate,
  RemoveRegularArc,
  RemoveResetArc,
  DropTimedArcFamily,
  Composite,
};

inline constexpr std::size_t kMutationKinds = 7;

inline const char* mutation_kind_name(MutationKind k) {
  switch (k) {
    case MutationKind::RemoveInhibitorArc: return "remove-inhibitor-arc";
    case MutationKind::PerturbArcWeight: return "perturb-arc-weight";
    case MutationKind::ModifyCoordinatePredicate: return "modify-coordinate-predicate";
    case MutationKind::RemoveRegularArc: return "remove-regular-arc";
    case MutationKind::RemoveResetArc: return "remove-reset-arc";
    case MutationKind::DropTimedArcFamily: return "drop-timed-arc-family";
    case MutationKind::Composite: return "composite";
  }
  return "?";
}

struct StmtLocator {
  std::size_t block = 0;
  std::size_t stmt = 0;
  friend bool operator==(const StmtLocator&, const StmtLocator&) = default;
};

// One primitive edit of a model template. Which fields are set depends on
// the kind: statement edits use `stmt`, timing edits use `timing`.
struct Edit {
  MutationKind kind = MutationKind::RemoveRegularArc;
  std::optional<StmtLocator> stmt;
  std::optional<std::size_t> timing;
  int weight_delta = 0;
  std::optional<Scope> new_scope;
  std::optional<std::size_t> move_to_block;
  // For DropTimedArcFamily on a multi-command declaration: which source /
  // destination entry to drop. Empty drops the whole declaration.
  std::optional<std::size_t> drop_source;
  std::optional<std::size_t> drop_destination;

  friend bool operator==(const Edit&, const Edit&) = default;
};

struct Mutation {
  MutationKind kind = MutationKind::Composite;
  std::vector<Edit> edits;  // one for primitives, 0-3 for composites
  // Edits act on per-bank/per-rank templates, so every bank gets the same
  // change.
  bool applied_symmetrically = true;
  std::string note;  // operator substitution, if any

  friend bool operator==(const Mutation&, const Mutation&) = default;
};

inline const Statement& statement_at(const ModelDefinition& m, const StmtLocator& at) {
  return m.blocks.at(at.block).stmts.at(at.stmt);
}

inline std::string describe(const ModelDefinition& before, const Edit& e) {
  std::string s = mutation_kind_name(e.kind);
  if (e.stmt) {
    const Block& b = before.blocks.at(e.stmt->block);
    s += " {" + std::string(level_name(b.level)) + "#" + std::to_string(e.stmt->block) + "} " +
         print_statement(statement_at(before, *e.stmt));
  }
  if (e.timing) s += " " + print_timing(before.timing.at(*e.timing));
  if (e.weight_delta) s += e.weight_delta > 0 ? " (weight +1)" : " (weight -1)";
  if (e.new_scope) s += std::string(" (scope -> ") + scope_name(*e.new_scope) + ")";
  if (e.move_to_block)
    s += " (move to " + std::string(level_name(before.blocks.at(*e.move_to_block).level)) + " block #" +
         std::to_string(*e.move_to_block) + ")";
  if (e.drop_source) s += " (drop source " + before.timing.at(*e.timing).sources.at(*e.drop_source) + ")";
  if (e.drop_destination)
    s += " (drop destination " + before.timing.at(*e.timing).destinations.at(*e.drop_destination) + ")";
  return s;
}

using Undo = std::function<void(ModelDefinition&)>;

// Applies one edit in place and returns the edit that undoes it.
inline Undo apply_edit(ModelDefinition& m, const Edit& e) {
  switch (e.kind) {
    case MutationKind::RemoveInhibitorArc:
    case MutationKind::RemoveRegularArc:
    case MutationKind::RemoveResetArc: {
      auto& stmts = m.blocks.at(e.stmt->block).stmts;
      Statement removed = stmts.at(e.stmt->stmt);
      stmts.erase(stmts.begin() + static_cast<std::ptrdiff_t>(e.stmt->stmt));
      return [at = *e.stmt, removed](ModelDefinition& x) {
        auto& s = x.blocks.at(at.block).stmts;
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(at.stmt), removed);
      };
    }
    case MutationKind::PerturbArcWeight: {
      auto& arc = std::get<ArcDecl>(m.blocks.at(e.stmt->block).stmts.at(e.stmt->stmt));
      const auto old = arc.weight;
      if (!arc.weight) arc.weight = Expr::constant(1 + e.weight_delta);
      else if (arc.weight->is_constant()) arc.weight = Expr::constant(arc.weight->value + e.weight_delta);
      else
        arc.weight = Expr::binary(e.weight_delta > 0 ? Expr::Op::Add : Expr::Op::Sub, *arc.weight, Expr::constant(1));
      return [at = *e.stmt, old](ModelDefinition& x) {
        std::get<ArcDecl>(x.blocks.at(at.block).stmts.at(at.stmt)).weight = old;
      };
    }
    case MutationKind::ModifyCoordinatePredicate: {
      if (e.timing) {
        auto& decl = m.timing.at(*e.timing);
        const Scope old = decl.scope;
        decl.scope = *e.new_scope;
        return [i = *e.timing, old](ModelDefinition& x) { x.timing.at(i).scope = old; };
      }
      auto& from = m.blocks.at(e.stmt->block).stmts;
      Statement moved = from.at(e.stmt->stmt);
      from.erase(from.begin() + static_cast<std::ptrdiff_t>(e.stmt->stmt));
      m.blocks.at(*e.move_to_block).stmts.push_back(moved);
      return [at = *e.stmt, to = *e.move_to_block, moved](ModelDefinition& x) {
        x.blocks.at(to).stmts.pop_back();
        auto& s = x.blocks.at(at.block).stmts;
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(at.stmt), moved);
      };
    }
    case MutationKind::DropTimedArcFamily: {
      const TimingDecl old = m.timing.at(*e.timing);
      auto& decl = m.timing.at(*e.timing);
      if (e.drop_source) {
        decl.sources.erase(decl.sources.begin() + static_cast<std::ptrdiff_t>(*e.drop_source));
      } else if (e.drop_destination) {
        decl.destinations.erase(decl.destinations.begin() + static_cast<std::ptrdiff_t>(*e.drop_destination));
      } else {
        m.timing.erase(m.timing.begin() + static_cast<std::ptrdiff_t>(*e.timing));
        return [i = *e.timing, old](ModelDefinition& x) {
          x.timing.insert(x.timing.begin() + static_cast<std::ptrdiff_t>(i), old);
        };
      }
      return [i = *e.timing, old](ModelDefinition& x) { x.timing.at(i) = old; };
    }
    case MutationKind::Composite: break;
  }
  throw ContractError("composite is not a primitive edit");
}

struct AppliedMutation {
  ModelDefinition model;
  std::vector<Undo> undo;
  std::vector<std::string> descriptions;

  ModelDefinition revert() const {
    ModelDefinition m = model;
    for (auto it = undo.rbegin(); it != undo.rend(); ++it) (*it)(m);
    return m;
  }
};

// Edits of a composite apply in order, each addressing the model as left by
// the previous one.
inline AppliedMutation apply_mutation(const ModelDefinition& base, const Mutation& mut) {
  AppliedMutation out{base, {}, {}};
  for (const auto& e : mut.edits) {
    out.descriptions.push_back(describe(out.model, e));
    out.undo.push_back(apply_edit(out.model, e));
  }
  return out;
}

namespace mutate_detail {

// mt19937_64 output is fixed by the standard; distributions are not, so
// draws are taken directly from the engine.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

private:
  std::mt19937_64 eng_;
};

inline std::vector<StmtLocator> arcs_of(const ModelDefinition& m, std::initializer_list<ArcKind> kinds) {
  std::vector<StmtLocator> out;
  for (std::size_t b = 0; b < m.blocks.size(); ++b) {
    for (std::size_t s = 0; s < m.blocks[b].stmts.size(); ++s) {
      const auto* a = std::get_if<ArcDecl>(&m.blocks[b].stmts[s]);
      if (!a) continue;
      for (ArcKind k : kinds)
        if (a->kind == k) out.push_back({b, s});
    }
  }
  return out;
}

inline bool resolves_in(const ModelDefinition& m, const Block& target, const ArcDecl& a) {
  const DeclarationIndex decls(m);
  Block probe{target.level, target.var, {}};
  auto s = resolve_ref(decls, probe, a.source);
  auto d = resolve_ref(decls, probe, a.target);
  if (!std::holds_alternative<DeclaredNode>(s) || !std::holds_alternative<DeclaredNode>(d)) return false;
  const auto& sn = std::get<DeclaredNode>(s);
  const auto& dn = std::get<DeclaredNode>(d);
  return a.kind == ArcKind::Regular ? sn.is_place != dn.is_place : (sn.is_place && !dn.is_place);
}

// Draws one primitive edit of `kind`, or nothing if the model has no target
// for it.
inline std::optional<Edit> draw_edit(const ModelDefinition& m, MutationKind kind, Rng& rng) {
  Edit e;
  e.kind = kind;
  switch (kind) {
    case MutationKind::RemoveInhibitorArc:
    case MutationKind::RemoveRegularArc:
    case MutationKind::RemoveResetArc: {
      const ArcKind ak = kind == MutationKind::RemoveInhibitorArc ? ArcKind::Inhibitor
                         : kind == MutationKind::RemoveRegularArc ? ArcKind::Regular
                                                                  : ArcKind::Reset;
      auto cands = arcs_of(m, {ak});
      if (cands.empty()) return std::nullopt;
      e.stmt = cands[rng.below(cands.size())];
      return e;
    }
    case MutationKind::PerturbArcWeight: {
      auto cands = arcs_of(m, {ArcKind::Regular, ArcKind::Inhibitor});
      if (cands.empty()) return std::nullopt;
      e.stmt = cands[rng.below(cands.size())];
      const auto& arc = std::get<ArcDecl>(statement_at(m, *e.stmt));
      const bool can_lower = arc.weight && arc.weight->is_constant() && arc.weight->value >= 2;
      e.weight_delta = (can_lower && rng.below(2) == 0) ? -1 : +1;
      return e;
    }
    case MutationKind::ModifyCoordinatePredicate: {
      // Scope substitutions on timing declarations, and moves of arc
      // statements between per-bank and per-rank blocks that still resolve.
      std::vector<Edit> cands;
      std::vector<Scope> scopes{Scope::IntraBank};
      if (m.param("bank_groups").value_or(0) > 0) scopes.push_back(Scope::IntraBankGroup);
      scopes.push_back(Scope::IntraRank);
      for (std::size_t t = 0; t < m.timing.size(); ++t) {
        if (m.timing[t].scope == Scope::Global) continue;
        for (Scope s : scopes) {
          if (s == m.timing[t].scope) continue;
          Edit c = e;
          c.timing = t;
          c.new_scope = s;
          cands.push_back(c);
        }
      }
      for (const auto& at : arcs_of(m, {ArcKind::Regular, ArcKind::Inhibitor, ArcKind::Reset})) {
        const Block& from = m.blocks[at.block];
        if (from.level == Level::Global) continue;
        const Level other = from.level == Level::Bank ? Level::Rank : Level::Bank;
        for (std::size_t b = 0; b < m.blocks.size(); ++b) {
          if (m.blocks[b].level != other) continue;
          if (!resolves_in(m, m.blocks[b], std::get<ArcDecl>(statement_at(m, at)))) continue;
          Edit c = e;
          c.stmt = at;
          c.move_to_block = b;
          cands.push_back(c);
          break;
        }
      }
      if (cands.empty()) return std::nullopt;
      return cands[rng.below(cands.size())];
    }
    case MutationKind::DropTimedArcFamily: {
      if (m.timing.empty()) return std::nullopt;
      e.timing = rng.below(m.timing.size());
      const auto& decl = m.timing[*e.timing];
      const std::size_t families = decl.sources.size() * decl.destinations.size();
      if (families > 1) {
        if (decl.sources.size() > 1 && (decl.destinations.size() == 1 || rng.below(2) == 0))
          e.drop_source = rng.below(decl.sources.size());
        else
          e.drop_destination = rng.below(decl.destinations.size());
      }
      return e;
    }
    case MutationKind::Composite: break;
  }
  return std::nullopt;
}

inline constexpr MutationKind kPrimitives[] = {
    MutationKind::RemoveInhibitorArc, MutationKind::PerturbArcWeight,   MutationKind::ModifyCoordinatePredicate,
    MutationKind::RemoveRegularArc,   MutationKind::RemoveResetArc,     MutationKind::DropTimedArcFamily,
};

// Draws an edit of `kind`, falling back to the next primitive kinds in order
// when the model offers no target.
inline std::optional<Edit> draw_with_substitution(const ModelDefinition& m, MutationKind kind, Rng& rng,
                                                  std::string& note) {
  std::size_t start = 0;
  while (kPrimitives[start] != kind) ++start;
  for (std::size_t i = 0; i < std::size(kPrimitives); ++i) {
    const MutationKind k = kPrimitives[(start + i) % std::size(kPrimitives)];
    if (auto e = draw_edit(m, k, rng)) {
      if (i) {
        if (!note.empty()) note += "; ";
        note += std::string(mutation_kind_name(kind)) + " not applicable, substituted " + mutation_kind_name(k);
      }
      return e;
    }
  }
  return std::nullopt;
}

}  // namespace mutate_detail

// Seeded, deterministic list of `count` template-level mutations. Composites
// chain two or three primitive edits.
inline std::vector<Mutation> generate_mutants(const ModelDefinition& model, std::size_t count, std::uint64_t seed) {
  using namespace mutate_detail;
  if (count < 1) throw ContractError("mutant count must be at least 1");
  Rng rng(seed);
  std::vector<Mutation> out;
  out.reserve(count);
  while (out.size() < count) {
    const auto kind = static_cast<MutationKind>(rng.below(kMutationKinds));
    Mutation mut;
    mut.kind = kind;
    if (kind == MutationKind::Composite) {
      const std::size_t n = 2 + rng.below(2);
      ModelDefinition cur = model;
      for (std::size_t i = 0; i < n; ++i) {
        const auto sub = kPrimitives[rng.below(std::size(kPrimitives))];
        auto e = draw_with_substitution(cur, sub, rng, mut.note);
        if (!e) break;
        apply_edit(cur, *e);
        mut.edits.push_back(*e);
      }
    } else if (auto e = draw_with_substitution(model, kind, rng, mut.note)) {
      mut.kind = e->kind;
      mut.edits.push_back(*e);
    }
    if (mut.edits.empty()) throw ContractError("model offers no mutation targets");
    out.push_back(std::move(mut));
  }
  return out;
}

enum class MutantClass : std::uint8_t { Detected, Equivalent, UndetectedNonequivalent, Failed };

inline const char* mutant_class_name(MutantClass c) {
  switch (c) {
    case MutantClass::Detected: return "detected";
    case MutantClass::Equivalent: return "equivalent";
    case MutantClass::UndetectedNonequivalent: return "undetected_nonequivalent";
    case MutantClass::Failed: return "failed";
  }
  return "?";
}

struct MutantRecord {
  std::size_t index = 0;
  std::string model;
  Mutation mutation;
  std::vector<std::string> edits;  // human-readable, one per edit
  MutantClass verdict = MutantClass::Failed;
  std::optional<Witness> witness;
  std::optional<NetConfig> detected_at;
  bool symmetric = true;
  // Present when the mutant was re-checked at the deep configuration.
  std::optional<bool> deep_equivalent;
  std::string error;
};

struct CampaignOptions {
  std::size_t k = 4;
  // Untimed Tr_k by default. With `timed`, minimum firing times are part of
  // each step, so edits to timed arcs become visible too.
  bool timed = false;
  bool deep_check = false;
  std::uint32_t deep_banks = 4;
  std::uint32_t deep_ranks = 2;
  std::size_t deep_k = 5;
  // Fraction of all mutants re-checked deep, in addition to every mutant the
  // minimal configurations could not tell apart.
  double deep_sample = 0.1;
  unsigned workers = 1;
  EnumOptions enumeration;
  BuildOptions build;
};

struct CampaignReport {
  std::size_t total = 0;
  std::size_t detected = 0;
  std::size_t equivalent_mutants = 0;
  std::size_t undetected_nonequivalent = 0;
  std::size_t failed = 0;
  std::size_t deep_checked = 0;
  std::size_t deep_disagreements = 0;  // detected minimally but equivalent deep
  std::map<std::string, std::size_t> kind_histogram;
  std::map<std::size_t, std::size_t> witness_length_histogram;
  std::vector<MutantRecord> records;

  bool conjecture_supported() const { return undetected_nonequivalent == 0; }

  void absorb(MutantRecord r) {
    ++total;
    ++kind_histogram[mutation_kind_name(r.mutation.kind)];
    switch (r.verdict) {
      case MutantClass::Detected:
        ++detected;
        ++witness_length_histogram[r.witness->length];
        break;
      case MutantClass::Equivalent: ++equivalent_mutants; break;
      case MutantClass::UndetectedNonequivalent: ++undetected_nonequivalent; break;
      case MutantClass::Failed: ++failed; break;
    }
    if (r.deep_equivalent) {
      ++deep_checked;
      if (r.verdict == MutantClass::Detected && *r.deep_equivalent) ++deep_disagreements;
    }
    records.push_back(std::move(r));
  }
};

// Trace-equivalence verdict for the mutant at an arbitrary configuration.
inline EquivalenceVerdict deep_check(const ModelDefinition& model, const Mutation& mutation, std::uint32_t banks,
                                     std::uint32_t ranks, std::size_t k, bool timed = true,
                                     const BuildOptions& build = {}, const EnumOptions& enumeration = {}) {
  const auto mutant = apply_mutation(model, mutation);
  return check_trace_equivalence(build_net(model, banks, ranks, build), build_net(mutant.model, banks, ranks, build), k,
                                 timed, enumeration);
}

namespace mutate_detail {

inline bool deep_sampled(std::size_t index, double fraction) {
  if (fraction <= 0) return false;
  if (fraction >= 1) return true;
  const auto stride = static_cast<std::size_t>(1.0 / fraction + 0.5);
  return index % std::max<std::size_t>(stride, 1) == 0;
}

inline MutantRecord run_one(const ModelDefinition& model, const std::string& model_name, const Net& gt11,
                            const Net& gt21, const Mutation& mut, std::size_t index, const CampaignOptions& opts) {
  MutantRecord rec;
  rec.index = index;
  rec.model = model_name;
  rec.mutation = mut;
  try {
    const auto applied = apply_mutation(model, mut);
    rec.edits = applied.descriptions;
    const Net m11 = build_net(applied.model, 1, 1, opts.build);
    const Net m21 = build_net(applied.model, 2, 1, opts.build);
    rec.symmetric = check_bank_symmetry(m21);
    rec.verdict = MutantClass::Equivalent;
    for (const auto* pair : {&gt11, &gt21}) {
      const Net& mutant = pair == &gt11 ? m11 : m21;
      auto v = check_trace_equivalence(*pair, mutant, opts.k, opts.timed, opts.enumeration);
      if (!v.equivalent) {
        rec.verdict = MutantClass::Detected;
        rec.witness = v.witness;
        rec.detected_at = mutant.config();
        break;
      }
    }
    const bool deep = opts.deep_check &&
                      (rec.verdict == MutantClass::Equivalent || deep_sampled(index, opts.deep_sample));
    if (deep) {
      auto v = check_trace_equivalence(build_net(model, opts.deep_banks, opts.deep_ranks, opts.build),
                                       build_net(applied.model, opts.deep_banks, opts.deep_ranks, opts.build),
                                       opts.deep_k, opts.timed, opts.enumeration);
      rec.deep_equivalent = v.equivalent;
      if (rec.verdict == MutantClass::Equivalent && !v.equivalent) {
        rec.verdict = MutantClass::UndetectedNonequivalent;
        rec.witness = v.witness;
      }
    }
  } catch (const Error& e) {
    rec.verdict = MutantClass::Failed;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace mutate_detail

// Classifies each mutant by searching for a shortest trace of length <= k
// admitted by exactly one of ground truth and mutant at (1,1), then (2,1).
inline CampaignReport run_campaign(const ModelDefinition& model, const std::vector<Mutation>& mutations,
                                   const CampaignOptions& opts = {}, const std::string& model_name = "",
                                   std::size_t first_index = 0) {
  const Net gt11 = build_net(model, 1, 1, opts.build);
  const Net gt21 = build_net(model, 2, 1, opts.build);
  std::vector<MutantRecord> recs(mutations.size());
  const unsigned workers = std::max(1u, opts.workers);
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < mutations.size(); i += workers)
      recs[i] = mutate_detail::run_one(model, model_name, gt11, gt21, mutations[i], first_index + i, opts);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  CampaignReport rep;
  for (auto& r : recs) rep.absorb(std::move(r));
  return rep;
}

inline void merge_into(CampaignReport& into, CampaignReport from) {
  for (auto& r : from.records) into.absorb(std::move(r));
}

}  // namespace drampn
