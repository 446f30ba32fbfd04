#include <gtest/gtest.h>

#include "support.hpp"

using namespace drampn;
using namespace testing_support;

namespace {

Net single_shot() {
  return build_net(parse_model("device d {\n per bank b { place P init 1; transition T; arc P -> T; }\n}\n"), 1, 1);
}

std::string permute_key(const std::string& key, const std::vector<std::uint32_t>& perm) {
  // Rewrites every ".bN" coordinate through perm (single rank, no groups).
  std::string out;
  for (std::size_t i = 0; i < key.size();) {
    if (key.compare(i, 2, ".b") == 0) {
      std::size_t j = i + 2;
      while (j < key.size() && std::isdigit(static_cast<unsigned char>(key[j]))) ++j;
      out += ".b" + std::to_string(perm[std::stoul(key.substr(i + 2, j - i - 2))]);
      i = j;
    } else {
      out += key[i++];
    }
  }
  return out;
}

}  // namespace

TEST(Traces, LengthOne) {
  const Net n = build_net(fixture("mini-ddr"), 1, 1);
  EXPECT_EQ(as_set(enumerate_traces(n, 1)), (std::set<std::string>{"ACT@r0.b0", "PREA@r0", "REF@r0"}));
}

TEST(Traces, LengthTwoExtendsPrefixes) {
  const TraceSet t = enumerate_traces(build_net(fixture("mini-ddr"), 1, 1), 2);
  EXPECT_TRUE(t.contains("ACT@r0.b0,RD@r0.b0"));
  EXPECT_FALSE(t.contains("ACT@r0.b0,ACT@r0.b0"));
  EXPECT_FALSE(t.contains("ACT@r0.b0,REF@r0"));
  EXPECT_TRUE(t.contains("REF@r0,ACT@r0.b0"));
}

TEST(Traces, ConsumedTokenLeavesNothingAtLengthTwo) {
  EXPECT_TRUE(enumerate_traces(single_shot(), 2).empty());
  EXPECT_EQ(enumerate_traces(single_shot(), 1).size(), 1u);
}

TEST(Traces, ZeroLengthRejected) {
  EXPECT_THROW(enumerate_traces(single_shot(), 0), ContractError);
  EXPECT_THROW(enumerate_timed_traces(single_shot(), 0), ContractError);
}

TEST(Traces, TimedActivateRead) {
  const TraceSet t = enumerate_timed_traces(build_net(fixture("mini-ddr"), 1, 1), 2);
  EXPECT_TRUE(t.contains("ACT@r0.b0:0,RD@r0.b0:3"));
  EXPECT_TRUE(t.contains("PREA@r0:0,PREA@r0:1"));
  EXPECT_TRUE(t.contains("ACT@r0.b0:0,PRE@r0.b0:5"));
}

TEST(Traces, TimedAndUntimedSetsHaveEqualSize) {
  for (const auto& name : fixture_names()) {
    const Net n = build_net(fixture(name), 2, 1);
    for (std::size_t k = 1; k <= 4; ++k)
      EXPECT_EQ(enumerate_timed_traces(n, k).size(), enumerate_traces(n, k).size()) << name << " k=" << k;
  }
}

TEST(Traces, MatchesBruteForceOracle) {
  for (const auto& name : fixture_names())
    for (auto [b, r] : {std::pair{1u, 1u}, {2u, 1u}, {1u, 2u}}) {
      const Net n = build_net(fixture(name), b, r);
      const Oracle o{n};
      for (std::size_t k = 1; k <= 3; ++k) {
        EXPECT_EQ(as_set(enumerate_traces(n, k)), o.traces(k)) << name << " k=" << k;
        EXPECT_EQ(as_set(enumerate_timed_traces(n, k)), o.timed_traces(k)) << name << " k=" << k;
      }
    }
}

TEST(Traces, PrefixClosure) {
  for (const auto& name : fixture_names()) {
    const Net n = build_net(fixture(name), 2, 1);
    const Oracle o{n};
    const auto shorter = enumerate_traces(n, 3);
    const auto longer = enumerate_traces(n, 4);
    std::set<std::string> expected;
    for (const auto& t : longer) expected.insert(t.substr(0, t.rfind(',')));
    // Length-3 traces that cannot be extended (dead ends) are recomputed
    // directly.
    for (const auto& p : o.paths(3)) {
      std::vector<long> m = o.initial();
      for (auto t : p) m = o.fire(m, t);
      bool extends = false;
      for (TransitionId t = 0; t < n.transitions().size(); ++t) extends = extends || o.enabled(m, t);
      if (!extends) expected.insert(o.key(p));
    }
    EXPECT_EQ(as_set(shorter), expected) << name;
  }
}

TEST(Traces, ParallelEqualsSequential) {
  for (const auto& name : fixture_names()) {
    const Net n = build_net(fixture(name), 2, 1);
    const TraceSet seq = enumerate_traces(n, 4, {kDefaultBudget, 1});
    for (unsigned w : {2u, 3u, 8u}) {
      EXPECT_EQ(enumerate_traces(n, 4, {kDefaultBudget, w}), seq) << name << " workers=" << w;
      EXPECT_EQ(enumerate_timed_traces(n, 3, {kDefaultBudget, w}), enumerate_timed_traces(n, 3)) << name;
    }
  }
}

TEST(Traces, BankPermutationMapsTracesOntoThemselves) {
  for (const auto& name : {"mini-ddr", "mini-ddr-pwr", "guard-token"}) {
    const Net n = build_net(fixture(name), 3, 1);
    const TraceSet t = enumerate_traces(n, 3);
    for (const std::vector<std::uint32_t>& perm :
         {std::vector<std::uint32_t>{1, 0, 2}, {2, 0, 1}, {0, 2, 1}}) {
      std::vector<std::string> mapped;
      for (const auto& key : t) mapped.push_back(permute_key(key, perm));
      EXPECT_EQ(TraceSet(mapped), t) << name;
    }
  }
}

TEST(Traces, BudgetExceededIsReported) {
  const Net n = build_net(fixture("mini-ddr"), 2, 1);
  EXPECT_THROW(enumerate_traces(n, 4, {50, 1}), BudgetExceeded);
  EXPECT_THROW(enumerate_traces(n, 4, {50, 4}), BudgetExceeded);
  EnumStats stats;
  enumerate_traces(n, 4, {}, &stats);
  // Expansions stay within |T|^k.
  std::size_t bound = 1;
  for (int i = 0; i < 4; ++i) bound *= n.transitions().size();
  EXPECT_LE(stats.expansions, bound + stats.states);
}

TEST(Traces, SerializationIsSortedOneTracePerLine) {
  const TraceSet t = enumerate_traces(build_net(fixture("mini-ddr"), 1, 1), 1);
  EXPECT_EQ(t.serialize(), "ACT@r0.b0\nPREA@r0\nREF@r0\n");
}

TEST(Deadlocks, NoneInFixtures) {
  for (const auto& name : fixture_names())
    EXPECT_TRUE(find_deadlocks(build_net(fixture(name), 2, 1), 4).empty()) << name;
}

TEST(Deadlocks, SingleShotDeadlocksAfterOneFiring) {
  const auto d = find_deadlocks(single_shot(), 2);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(format_trace(d[0].witness), "T@r0.b0");
}

TEST(Deadlocks, InitialDeadlockAtDepthZero) {
  const Net n = build_net(parse_model("device d {\n per bank b { place P init 0; transition T; arc P -> T; }\n}\n"),
                          1, 1);
  const auto d = find_deadlocks(n, 0);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_TRUE(d[0].witness.empty());
}
