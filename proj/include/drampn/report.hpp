#pragma once

#include <sstream>
#include <string>

#include <json.hpp>

#include "drampn/metrics.hpp"
#include "drampn/mutate.hpp"
#include "drampn/validate.hpp"

namespace drampn {

using json = nlohmann::json;

inline json to_json(const Rational& r) {
  return {{"numerator", r.num}, {"denominator", r.den}, {"decimal", r.value()}};
}

inline json to_json(const NetConfig& c) {
  json j{{"banks", c.banks}, {"ranks", c.ranks}};
  j["bank_groups"] = c.groups ? json(*c.groups) : json(nullptr);
  return j;
}

inline json to_json(const TimingConstraint& c) {
  return {{"source", c.source}, {"destination", c.destination}, {"scope", scope_name(c.scope)}, {"expr", c.expr}};
}

inline json to_json(const Witness& w) {
  return {{"trace", w.trace}, {"length", w.length}, {"present_in", w.present_in}, {"timing_only", w.timing_only}};
}

inline json to_json(const ComparisonReport& r) {
  json j;
  j["k"] = r.k;
  j["config"] = to_json(r.config);
  j["jaccard"] = to_json(r.jaccard);
  j["tc_recall"] = r.tc_recall ? to_json(*r.tc_recall) : json(nullptr);
  j["traces"] = {{"generated", r.gen_traces}, {"ground_truth", r.gt_traces}, {"common", r.common_traces}};
  auto list = [](const std::vector<TimingConstraint>& cs) {
    json a = json::array();
    for (const auto& c : cs) a.push_back(to_json(c));
    return a;
  };
  j["missing_constraints"] = list(r.missing_constraints);
  j["extra_constraints"] = list(r.extra_constraints);
  j["ambiguous_constraints"] = list(r.ambiguous_constraints);
  j["witnesses"] = r.witness_traces;
  return j;
}

inline std::string config_pair(const NetConfig& c) {
  return "(" + std::to_string(c.banks) + "," + std::to_string(c.ranks) + ")";
}

inline json to_json(const MutantRecord& r) {
  json j;
  j["index"] = r.index;
  j["model"] = r.model;
  j["kind"] = mutation_kind_name(r.mutation.kind);
  j["edits"] = r.edits;
  j["note"] = r.mutation.note;
  j["applied_symmetrically"] = r.mutation.applied_symmetrically;
  j["symmetric"] = r.symmetric;
  j["verdict"] = mutant_class_name(r.verdict);
  j["witness"] = r.witness ? to_json(*r.witness) : json(nullptr);
  j["detection_config"] = r.detected_at ? json(config_pair(*r.detected_at)) : json(nullptr);
  j["deep_equivalent"] = r.deep_equivalent ? json(*r.deep_equivalent) : json(nullptr);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline json to_json(const CampaignReport& r) {
  json j;
  j["total_mutants"] = r.total;
  j["detected"] = r.detected;
  j["equivalent_mutants"] = r.equivalent_mutants;
  j["undetected_nonequivalent"] = r.undetected_nonequivalent;
  j["failed"] = r.failed;
  j["deep_checked"] = r.deep_checked;
  j["deep_disagreements"] = r.deep_disagreements;
  j["conjecture_supported"] = r.conjecture_supported();
  j["kind_histogram"] = r.kind_histogram;
  json lengths = json::object();
  for (const auto& [len, n] : r.witness_length_histogram) lengths[std::to_string(len)] = n;
  j["witness_length_histogram"] = lengths;
  json recs = json::array();
  for (const auto& m : r.records) recs.push_back(to_json(m));
  j["mutants"] = recs;
  return j;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const CampaignReport& r) {
  std::ostringstream os;
  os << "index,model,kind,verdict,detection_config,witness_length,witness,deep_equivalent,edits\n";
  for (const auto& m : r.records) {
    std::string edits;
    for (const auto& e : m.edits) edits += (edits.empty() ? "" : "; ") + e;
    os << m.index << ',' << csv_field(m.model) << ',' << mutation_kind_name(m.mutation.kind) << ','
       << mutant_class_name(m.verdict) << ',' << (m.detected_at ? config_pair(*m.detected_at) : "") << ','
       << (m.witness ? std::to_string(m.witness->length) : "") << ','
       << csv_field(m.witness ? m.witness->trace : "") << ','
       << (m.deep_equivalent ? (*m.deep_equivalent ? "true" : "false") : "") << ',' << csv_field(edits) << '\n';
  }
  return os.str();
}

inline std::string summary_line(const CampaignReport& r) {
  std::ostringstream os;
  os << "mutants " << r.total << ": detected " << r.detected << ", equivalent " << r.equivalent_mutants
     << ", undetected_nonequivalent " << r.undetected_nonequivalent << ", failed " << r.failed;
  if (r.total) os << " (detected rate " << r.detected << "/" << r.total << ")";
  return os.str();
}

inline json to_json(const ValidationReport& r) {
  json a = json::array();
  for (const auto& i : r.issues) a.push_back({{"kind", ValidationIssue::kind_name(i.kind)}, {"subject", i.subject}});
  return a;
}

}  // namespace drampn
