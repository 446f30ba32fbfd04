// drampn: validate, enumerate, compare and mutate DRAM Petri net models.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drampn.hpp"

namespace {

using namespace drampn;

enum Exit { kOk = 0, kInvalid = 1, kInput = 2, kBudget = 3 };

struct RunConfig {
  std::uint32_t banks = 2;
  std::uint32_t ranks = 1;
  std::size_t k = 4;
  std::vector<std::string> sets;
  std::size_t budget = kDefaultBudget;
  unsigned workers = 1;
  std::string format = "human";
  std::string output;
  std::optional<std::uint32_t> groups;

  BuildOptions build() const {
    BuildOptions b;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw ContractError("--set expects name=value, got '" + s + "'");
      try {
        std::size_t used = 0;
        const long long v = std::stoll(s.substr(eq + 1), &used);
        if (used != s.size() - eq - 1 || v < 0) throw std::invalid_argument(s);
        b.overrides[s.substr(0, eq)] = v;
      } catch (const std::logic_error&) {
        throw ContractError("--set value must be a natural number, got '" + s + "'");
      }
    }
    b.groups = groups;
    return b;
  }

  EnumOptions enumeration() const { return {budget, workers}; }
};

std::size_t default_budget() {
  if (const char* env = std::getenv("DRAMPN_BUDGET")) {
    try {
      return std::stoull(env);
    } catch (const std::logic_error&) {
      std::cerr << "ignoring malformed DRAMPN_BUDGET '" << env << "'\n";
    }
  }
  return kDefaultBudget;
}

ModelDefinition load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model(ss.str());
  } catch (const ParseError& e) {
    std::string msg;
    for (const auto& d : e.diagnostics()) msg += path + ":" + d.to_string() + "\n";
    throw ParseError(e.diagnostics(), msg);
  }
}

// Writes machine output to --output or stdout.
void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw ContractError("cannot write " + cfg.output);
  out << text;
}

int cmd_validate(const RunConfig& cfg, const std::vector<std::string>& paths) {
  bool all_ok = true;
  json doc = json::array();
  for (const auto& path : paths) {
    const ModelDefinition model = load(path);
    const BuildOptions opts = cfg.build();
    const Net net = build_net(model, cfg.banks, cfg.ranks, opts);
    const ValidationReport structure = validate_structure(net);
    const auto deadlocks = find_deadlocks(net, cfg.k, cfg.enumeration());
    const bool symmetric = check_bank_symmetry(net);
    const LinearityReport linear = check_weight_linearity(model, opts);
    const bool ok = structure.ok() && deadlocks.empty() && symmetric && linear.linear;
    all_ok = all_ok && ok;
    if (cfg.format == "json") {
      json j;
      j["path"] = path;
      j["config"] = to_json(net.config());
      j["ok"] = ok;
      j["issues"] = to_json(structure);
      json d = json::array();
      for (const auto& x : deadlocks) d.push_back(format_trace(x.witness));
      j["deadlocks"] = d;
      j["bank_symmetric"] = symmetric;
      json fams = json::array();
      for (const auto& f : linear.families)
        fams.push_back({{"family", f.key}, {"weights", f.weights}, {"linear", f.linear}});
      j["weight_linear"] = linear.linear;
      j["weight_families"] = fams;
      doc.push_back(j);
      continue;
    }
    std::cout << path << " at " << net.config().to_string() << ": " << (ok ? "ok" : "FAILED") << "\n";
    for (const auto& i : structure.issues) std::cout << "  " << i.to_string() << "\n";
    for (const auto& x : deadlocks)
      std::cout << "  deadlock after: " << (x.witness.empty() ? "<initial>" : format_trace(x.witness)) << "\n";
    if (!symmetric) std::cout << "  not bank-symmetric\n";
    for (const auto& f : linear.families)
      if (!f.linear)
        std::cout << "  non-linear weights: " << f.key << " at B=1,2,3: " << f.weights[0] << "," << f.weights[1]
                  << "," << f.weights[2] << "\n";
  }
  if (cfg.format == "json") emit(cfg, doc.dump(2) + "\n");
  return all_ok ? kOk : kInvalid;
}

int cmd_enumerate(const RunConfig& cfg, const std::string& path, bool timed) {
  if (cfg.k < 1) throw ContractError("-k must be at least 1");
  const ModelDefinition model = load(path);
  const Net net = build_net(model, cfg.banks, cfg.ranks, cfg.build());
  const TraceSet set = timed ? enumerate_timed_traces(net, cfg.k, cfg.enumeration())
                             : enumerate_traces(net, cfg.k, cfg.enumeration());
  if (cfg.format == "json") {
    emit(cfg, json{{"k", cfg.k}, {"config", to_json(net.config())}, {"timed", timed}, {"traces", set.keys()}}.dump(2) +
                  "\n");
  } else {
    emit(cfg, set.serialize());
  }
  return kOk;
}

int cmd_compare(const RunConfig& cfg, const std::string& gen_path, const std::string& gt_path,
                std::size_t witnesses) {
  const BuildOptions opts = cfg.build();
  const ModelDefinition gen = load(gen_path), gt = load(gt_path);
  const std::uint32_t tb = std::max(cfg.banks, 2u), tr = std::max(cfg.ranks, 2u);
  ComparisonReport rep;
  try {
    rep = compare_nets(build_net(gen, cfg.banks, cfg.ranks, opts), build_net(gt, cfg.banks, cfg.ranks, opts), cfg.k,
                       build_net(gen, tb, tr, opts), build_net(gt, tb, tr, opts), witnesses, cfg.enumeration());
  } catch (const BudgetExceeded& e) {
    if (cfg.format == "json") emit(cfg, json{{"partial", true}, {"error", e.what()}}.dump(2) + "\n");
    throw;
  }
  if (cfg.format == "json") {
    json j = to_json(rep);
    j["partial"] = false;
    emit(cfg, j.dump(2) + "\n");
    return kOk;
  }
  std::cout << "config " << rep.config.to_string() << ", k=" << rep.k << "\n";
  std::cout << "jaccard " << rep.jaccard.to_string() << " = " << rep.jaccard.value() << "  (generated "
            << rep.gen_traces << ", ground truth " << rep.gt_traces << ", common " << rep.common_traces << ")\n";
  if (rep.tc_recall)
    std::cout << "tc_recall " << rep.tc_recall->to_string() << " = " << rep.tc_recall->value() << "\n";
  else
    std::cout << "tc_recall undefined (ground truth has no timing constraints)\n";
  for (const auto& c : rep.missing_constraints) std::cout << "  missing " << c.to_string() << "\n";
  for (const auto& c : rep.extra_constraints) std::cout << "  extra   " << c.to_string() << "\n";
  for (const auto& w : rep.witness_traces) std::cout << "  witness " << w << "\n";
  return kOk;
}

int cmd_timing_recall(const RunConfig& cfg, const std::string& gen_path, const std::string& gt_path) {
  const BuildOptions opts = cfg.build();
  const std::uint32_t tb = std::max(cfg.banks, 2u), tr = std::max(cfg.ranks, 2u);
  const auto gen = extract_timing_constraints(build_net(load(gen_path), tb, tr, opts));
  const auto gt = extract_timing_constraints(build_net(load(gt_path), tb, tr, opts));
  const Rational r = tc_recall(gen, gt);
  json missing = json::array(), extra = json::array();
  for (const auto& c : gt.constraints)
    if (!gen.contains(c)) missing.push_back(to_json(c));
  for (const auto& c : gen.constraints)
    if (!gt.contains(c)) extra.push_back(to_json(c));
  if (cfg.format == "json") {
    emit(cfg, json{{"tc_recall", to_json(r)}, {"missing_constraints", missing}, {"extra_constraints", extra}}.dump(2) +
                  "\n");
    return kOk;
  }
  std::cout << "tc_recall " << r.to_string() << " = " << r.value() << "\n";
  for (const auto& c : missing) std::cout << "  missing " << c["source"].get<std::string>() << " -> "
                                          << c["destination"].get<std::string>() << " ["
                                          << c["scope"].get<std::string>() << "] : " << c["expr"].get<std::string>()
                                          << "\n";
  for (const auto& c : extra) std::cout << "  extra   " << c["source"].get<std::string>() << " -> "
                                        << c["destination"].get<std::string>() << " ["
                                        << c["scope"].get<std::string>() << "] : " << c["expr"].get<std::string>()
                                        << "\n";
  return kOk;
}

int cmd_mutate(const RunConfig& cfg, const std::vector<std::string>& paths, std::size_t count, std::uint64_t seed,
               CampaignOptions copts) {
  if (count < 1) throw ContractError("--count must be at least 1");
  copts.k = cfg.k;
  copts.workers = cfg.workers;
  copts.enumeration = {cfg.budget, 1};
  copts.build = cfg.build();
  CampaignReport pooled;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const ModelDefinition model = load(paths[i]);
    // Each fixture gets its own stream so adding a fixture leaves the others'
    // mutants unchanged.
    const auto mutants = generate_mutants(model, count, seed + i);
    merge_into(pooled, run_campaign(model, mutants, copts, paths[i], pooled.total));
  }
  if (cfg.format == "json") emit(cfg, to_json(pooled).dump(2) + "\n");
  else if (cfg.format == "csv") emit(cfg, to_csv(pooled));
  else {
    for (const auto& [kind, n] : pooled.kind_histogram) std::cout << "  " << kind << ": " << n << "\n";
    for (const auto& r : pooled.records)
      if (r.verdict == MutantClass::UndetectedNonequivalent || r.verdict == MutantClass::Failed)
        std::cout << "  #" << r.index << " " << mutant_class_name(r.verdict) << " "
                  << (r.witness ? r.witness->trace : r.error) << "\n";
  }
  std::cerr << summary_line(pooled) << "\n";
  return pooled.conjecture_supported() ? kOk : kInvalid;
}

int cmd_conjecture(const RunConfig& cfg, const std::string& a, const std::string& b) {
  const auto v = minimal_config_check(load(a), load(b), cfg.build(), cfg.k, cfg.enumeration());
  if (cfg.format == "json") {
    json j;
    j["verdict"] = v.equivalent ? "conjectured-equivalent" : "inequivalent";
    j["witness"] = v.witness ? to_json(*v.witness) : json(nullptr);
    j["witness_config"] = v.witness_config ? json(config_pair(*v.witness_config)) : json(nullptr);
    j["hypotheses"] = {{"first", {{"symmetric", v.first.symmetric}, {"linear", v.first.linear}}},
                       {"second", {{"symmetric", v.second.symmetric}, {"linear", v.second.linear}}},
                       {"met", v.hypotheses_met()}};
    emit(cfg, j.dump(2) + "\n");
  } else {
    std::cout << (v.equivalent ? "conjectured-equivalent" : "inequivalent") << "\n";
    if (!v.hypotheses_met()) std::cout << "  hypotheses unmet\n";
    if (v.witness)
      std::cout << "  witness at " << config_pair(*v.witness_config) << ", only in "
                << (v.witness->present_in == 1 ? a : b) << ": " << v.witness->trace << "\n";
  }
  return v.equivalent ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DRAM Petri net model checker"};
  app.require_subcommand(1);
  RunConfig cfg;
  cfg.budget = default_budget();

  auto common = [&](CLI::App* sub) {
    sub->add_option("-B,--banks", cfg.banks, "banks per rank (per bank group with groups)")->check(CLI::PositiveNumber);
    sub->add_option("-R,--ranks", cfg.ranks, "ranks")->check(CLI::PositiveNumber);
    sub->add_option("-k", cfg.k, "trace length");
    sub->add_option("--set", cfg.sets, "parameter override name=value (repeatable)");
    sub->add_option("--groups", cfg.groups, "bank groups, overriding the model");
    sub->add_option("--budget", cfg.budget, "node-expansion budget (default: DRAMPN_BUDGET or 10000000)");
    sub->add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"human", "json", "csv"}));
    sub->add_option("-o,--output", cfg.output, "write machine output here instead of stdout");
  };

  std::vector<std::string> paths;
  std::string a, b;
  bool timed = false;
  std::size_t witnesses = 10, count = 1000;
  std::uint64_t seed = 1;
  CampaignOptions copts;

  auto* validate = app.add_subcommand("validate", "structural and deadlock checks");
  common(validate);
  validate->add_option("paths", paths, "model files")->required();

  auto* enumerate = app.add_subcommand("enumerate", "write Tr_k, one trace per line");
  common(enumerate);
  enumerate->add_option("path", a, "model file")->required();
  enumerate->add_flag("--timed", timed, "append minimum firing times");

  auto* compare = app.add_subcommand("compare", "jaccard and timing recall of a generated model");
  common(compare);
  compare->add_option("generated", a, "generated model")->required();
  compare->add_option("ground_truth", b, "ground-truth model")->required();
  compare->add_option("--witnesses", witnesses, "maximum witness traces listed");

  auto* recall = app.add_subcommand("timing-recall", "timing-constraint recall only");
  common(recall);
  recall->add_option("generated", a, "generated model")->required();
  recall->add_option("ground_truth", b, "ground-truth model")->required();

  auto* mutate = app.add_subcommand("mutate", "seeded mutation campaign");
  common(mutate);
  mutate->add_option("paths", paths, "model files")->required();
  mutate->add_option("--count", count, "mutants per model");
  mutate->add_option("--seed", seed, "random seed");
  mutate->add_flag("--deep-check", copts.deep_check, "re-check at a larger configuration");
  mutate->add_option("--deep-banks", copts.deep_banks, "deep-check banks")->check(CLI::PositiveNumber);
  mutate->add_option("--deep-ranks", copts.deep_ranks, "deep-check ranks")->check(CLI::PositiveNumber);
  mutate->add_option("--deep-k", copts.deep_k, "deep-check trace length");
  mutate->add_option("--deep-sample", copts.deep_sample, "fraction of mutants deep-checked")
      ->check(CLI::Range(0.0, 1.0));
  mutate->add_flag("--timed", copts.timed, "compare timed traces");

  auto* conj = app.add_subcommand("conjecture-check", "minimal-configuration equivalence of two models");
  common(conj);
  conj->add_option("first", a, "model")->required();
  conj->add_option("second", b, "model")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (*validate) return cmd_validate(cfg, paths);
    if (*enumerate) return cmd_enumerate(cfg, a, timed);
    if (*compare) return cmd_compare(cfg, a, b, witnesses);
    if (*recall) return cmd_timing_recall(cfg, a, b);
    if (*mutate) return cmd_mutate(cfg, paths, count, seed, copts);
    if (*conj) return cmd_conjecture(cfg, a, b);
  } catch (const ParseError& e) {
    std::cerr << e.what();
    return kInput;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kOk;
}
