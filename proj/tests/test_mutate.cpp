#include <gtest/gtest.h>

#include "support.hpp"

using namespace drampn;
using namespace testing_support;

TEST(Mutate, SeededGenerationIsDeterministic) {
  const auto m = fixture("mini-ddr");
  EXPECT_EQ(generate_mutants(m, 200, 7), generate_mutants(m, 200, 7));
  EXPECT_NE(generate_mutants(m, 200, 7), generate_mutants(m, 200, 8));
}

TEST(Mutate, ZeroCountRejected) { EXPECT_THROW(generate_mutants(fixture("mini-ddr"), 0, 1), ContractError); }

TEST(Mutate, EveryKindIsDrawn) {
  const auto muts = generate_mutants(fixture("mini-ddr"), 300, 1);
  std::set<MutationKind> kinds;
  for (const auto& m : muts) kinds.insert(m.kind);
  EXPECT_EQ(kinds.size(), kMutationKinds);
  for (const auto& m : muts) {
    if (m.kind == MutationKind::Composite) {
      EXPECT_GE(m.edits.size(), 2u);
      EXPECT_LE(m.edits.size(), 3u);
    } else {
      ASSERT_EQ(m.edits.size(), 1u);
      EXPECT_EQ(m.edits[0].kind, m.kind);
    }
  }
}

TEST(Mutate, InapplicableOperatorIsSubstituted) {
  // No inhibitor and no reset arcs here.
  const auto m = parse_model("device d {\n timing_params { t = 2; }\n"
                             " per bank b { place P init 1; transition X; arc P -> X; arc X -> P; }\n"
                             " timing intra_bank [X] -> [X] : t;\n}\n");
  bool substituted = false;
  for (const auto& mut : generate_mutants(m, 100, 4)) {
    for (const auto& e : mut.edits) {
      EXPECT_NE(e.kind, MutationKind::RemoveInhibitorArc);
      EXPECT_NE(e.kind, MutationKind::RemoveResetArc);
    }
    substituted = substituted || mut.note.find("not applicable") != std::string::npos;
  }
  EXPECT_TRUE(substituted);
}

TEST(Mutate, ApplyRevertIsByteIdentical) {
  for (const auto& name : fixture_names()) {
    const auto m = fixture(name);
    const std::string before = print_model(m);
    for (const auto& mut : generate_mutants(m, 150, 21)) {
      const auto applied = apply_mutation(m, mut);
      EXPECT_NE(applied.model, m);
      const auto back = applied.revert();
      ASSERT_EQ(print_model(back), before) << name;
      ASSERT_EQ(back, m);
    }
  }
}

TEST(Mutate, MutantsStayBankSymmetric) {
  for (const auto& name : fixture_names()) {
    const auto m = fixture(name);
    for (const auto& mut : generate_mutants(m, 200, 5)) {
      EXPECT_TRUE(mut.applied_symmetrically);
      const auto mm = apply_mutation(m, mut).model;
      ASSERT_TRUE(check_bank_symmetry(build_net(mm, 3, 2))) << name;
    }
  }
}

TEST(Mutate, IdentityMutantIsEquivalent) {
  const auto m = fixture("mini-ddr");
  const Mutation identity{MutationKind::Composite, {}, true, ""};
  CampaignOptions o;
  o.deep_check = true;
  const auto rep = run_campaign(m, {identity}, o);
  ASSERT_EQ(rep.total, 1u);
  EXPECT_EQ(rep.equivalent_mutants, 1u);
  EXPECT_EQ(rep.records[0].deep_equivalent, true);
  EXPECT_TRUE(deep_check(m, identity, 3, 2, 4).equivalent);
}

TEST(Mutate, RemovedInhibitorIsDetected) {
  const auto m = fixture("mini-ddr");
  Mutation mut;
  mut.kind = MutationKind::RemoveInhibitorArc;
  for (std::size_t b = 0; b < m.blocks.size(); ++b)
    for (std::size_t s = 0; s < m.blocks[b].stmts.size(); ++s)
      if (const auto* a = std::get_if<ArcDecl>(&m.blocks[b].stmts[s]); a && a->kind == ArcKind::Inhibitor)
        {
          Edit e;
          e.kind = MutationKind::RemoveInhibitorArc;
          e.stmt = StmtLocator{b, s};
          mut.edits.push_back(e);
        }
  ASSERT_EQ(mut.edits.size(), 1u);
  const auto rep = run_campaign(m, {mut});
  EXPECT_EQ(rep.detected, 1u);
  ASSERT_TRUE(rep.records[0].witness);
  EXPECT_LE(rep.records[0].witness->length, 4u);
  EXPECT_FALSE(deep_check(m, mut, 4, 2, 5).equivalent);
}

TEST(Mutate, CrossBankEditSeenOnlyWithTwoBanks) {
  // Narrowing the rank-scoped tRRD to a bank scope leaves every single-bank
  // trace intact; it shows once a second bank exists (timed check).
  const auto m = fixture("mini-ddr");
  std::size_t idx = 0;
  while (m.timing[idx].scope != Scope::IntraRank) ++idx;
  Edit e;
  e.kind = MutationKind::ModifyCoordinatePredicate;
  e.timing = idx;
  e.new_scope = Scope::IntraBank;
  const Mutation mut{MutationKind::ModifyCoordinatePredicate, {e}, true, ""};
  CampaignOptions o;
  o.timed = true;
  const auto rep = run_campaign(m, {mut}, o);
  ASSERT_EQ(rep.detected, 1u);
  EXPECT_EQ(rep.records[0].detected_at->banks, 2u);
  EXPECT_TRUE(deep_check(m, mut, 1, 1, 4, true).equivalent);
  EXPECT_FALSE(deep_check(m, mut, 2, 1, 4, true).equivalent);
}

TEST(Mutate, CampaignCountsAddUp) {
  for (const auto& name : fixture_names()) {
    const auto m = fixture(name);
    CampaignOptions o;
    o.deep_check = true;
    o.deep_banks = 3;
    o.deep_ranks = 2;
    o.deep_k = 4;
    const auto rep = run_campaign(m, generate_mutants(m, 60, 2), o, name);
    EXPECT_EQ(rep.total, 60u);
    EXPECT_EQ(rep.total, rep.detected + rep.equivalent_mutants + rep.undetected_nonequivalent + rep.failed);
    EXPECT_EQ(rep.undetected_nonequivalent, 0u) << name;
    EXPECT_EQ(rep.failed, 0u) << name;
    EXPECT_EQ(rep.deep_disagreements, 0u) << name;
    std::size_t hist = 0;
    for (const auto& [k, n] : rep.kind_histogram) hist += n;
    EXPECT_EQ(hist, rep.total);
    for (const auto& r : rep.records) {
      EXPECT_TRUE(r.symmetric);
      if (r.verdict == MutantClass::Detected) {
        ASSERT_TRUE(r.witness);
        EXPECT_LE(r.witness->length, 4u);
        ASSERT_TRUE(r.detected_at);
        EXPECT_EQ(r.detected_at->ranks, 1u);
      }
    }
  }
}

TEST(Mutate, DetectedMutantsStayInequivalentDeep) {
  const auto m = fixture("mini-ddr-pwr");
  std::size_t checked = 0;
  for (const auto& mut : generate_mutants(m, 40, 13)) {
    const auto rep = run_campaign(m, {mut});
    if (rep.detected != 1) continue;
    EXPECT_FALSE(deep_check(m, mut, 4, 2, 5).equivalent);
    ++checked;
  }
  EXPECT_GT(checked, 10u);
}

TEST(Mutate, WorkersDoNotChangeTheReport) {
  const auto m = fixture("mini-ddr-bg");
  const auto muts = generate_mutants(m, 40, 9);
  CampaignOptions one, many;
  many.workers = 4;
  EXPECT_EQ(to_json(run_campaign(m, muts, one, "bg")).dump(), to_json(run_campaign(m, muts, many, "bg")).dump());
}

TEST(Mutate, ReportSerializations) {
  const auto m = fixture("mini-ddr");
  const auto rep = run_campaign(m, generate_mutants(m, 30, 3), {}, "mini-ddr");
  const json j = to_json(rep);
  EXPECT_EQ(j["total_mutants"], 30);
  EXPECT_EQ(j["mutants"].size(), 30u);
  EXPECT_EQ(j["detected"].get<std::size_t>() + j["equivalent_mutants"].get<std::size_t>(), 30u);
  const std::string csv = to_csv(rep);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 31);
  EXPECT_EQ(csv.rfind("index,model,kind,verdict", 0), 0u);
  const std::string summary = summary_line(rep);
  EXPECT_NE(summary.find("detected " + std::to_string(rep.detected)), std::string::npos);
}

TEST(Mutate, CsvQuotesFields) {
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"x\""), "\"say \"\"x\"\"\"");
  EXPECT_EQ(csv_field("plain"), "plain");
}
