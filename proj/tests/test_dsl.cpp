#include <gtest/gtest.h>

#include "support.hpp"

using namespace drampn;
using namespace testing_support;

namespace {

std::size_t count_decls(const ModelDefinition& m, Level level, bool places) {
  std::size_t n = 0;
  for (const auto& b : m.blocks) {
    if (b.level != level) continue;
    for (const auto& s : b.stmts)
      n += places ? std::holds_alternative<PlaceDecl>(s) : std::holds_alternative<TransitionDecl>(s);
  }
  return n;
}

Expr random_expr(std::mt19937_64& rng, int depth) {
  const char* names[] = {"tRCD", "tRP", "tCK", "B", "x"};
  const auto pick = rng() % (depth > 0 ? 6 : 2);
  switch (pick) {
    case 0: return Expr::constant(static_cast<std::int64_t>(rng() % 20));
    case 1: return Expr::param(names[rng() % 5]);
    case 2: return Expr::binary(Expr::Op::Add, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 3: return Expr::binary(Expr::Op::Sub, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 4: return Expr::binary(Expr::Op::Mul, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    default: {
      std::vector<Expr> xs;
      const std::size_t n = 2 + rng() % 2;
      for (std::size_t i = 0; i < n; ++i) xs.push_back(random_expr(rng, depth - 1));
      return Expr::max_of(std::move(xs));
    }
  }
}

Diagnostic first_diagnostic(const std::string& src) {
  try {
    parse_model(src);
  } catch (const ParseError& e) {
    return e.diagnostics().at(0);
  }
  ADD_FAILURE() << "expected a parse error";
  return {};
}

}  // namespace

TEST(Dsl, MiniDdrDeclarationCounts) {
  const auto m = fixture("mini-ddr");
  EXPECT_EQ(m.name, "mini_ddr");
  EXPECT_EQ(count_decls(m, Level::Bank, true), 2u);
  EXPECT_EQ(count_decls(m, Level::Bank, false), 6u);
  EXPECT_EQ(count_decls(m, Level::Rank, false), 2u);
  EXPECT_EQ(count_decls(m, Level::Rank, true), 0u);
  EXPECT_EQ(m.timing.size(), 4u);
  ASSERT_NE(m.timing_param("tRAS"), nullptr);
  EXPECT_EQ(m.timing_param("tRAS")->lo, 5);
  EXPECT_EQ(m.timing_param("tRAS")->hi, 7);
}

TEST(Dsl, EmptyInputIsAnEmptyModel) {
  EXPECT_TRUE(parse_model("").empty());
  EXPECT_TRUE(parse_model("  # only a comment\n\n").empty());
}

TEST(Dsl, UnboundTimingParameterIsNamed) {
  const auto d = first_diagnostic(
      "device d {\n  per bank b { place P init 1; transition ACT; transition RD; arc P -> ACT; arc P -> RD; }\n"
      "  timing intra_bank [ACT] -> [RD] : tBAD;\n}\n");
  EXPECT_NE(d.message.find("tBAD"), std::string::npos) << d.message;
  EXPECT_EQ(d.line, 3u);
}

TEST(Dsl, SyntaxErrorsCarryLineAndColumn) {
  const auto d = first_diagnostic("device d {\n  per bank b {\n    place P init ;\n  }\n}\n");
  EXPECT_EQ(d.line, 3u);
  EXPECT_EQ(d.column, 18u);
  EXPECT_NE(d.message.find("syntax error"), std::string::npos);
}

TEST(Dsl, SemanticErrorsAreCollected) {
  try {
    parse_model(
        "device d {\n  per bank b {\n    place P init 1;\n    place P init 0;\n    transition T;\n"
        "    arc Q -> T;\n    arc T -> T;\n  }\n}\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    ASSERT_GE(e.diagnostics().size(), 3u);
    std::string all = e.what();
    EXPECT_NE(all.find("duplicate"), std::string::npos);
    EXPECT_NE(all.find("'Q'"), std::string::npos);
  }
}

TEST(Dsl, UnknownTimingCommandRejected) {
  const auto d = first_diagnostic(
      "device d {\n  timing_params { tX = 1; }\n  per bank b { place P init 1; transition A; arc P -> A; }\n"
      "  timing intra_bank [A] -> [NOPE] : tX;\n}\n");
  EXPECT_NE(d.message.find("NOPE"), std::string::npos);
}

TEST(Dsl, StructuralExpressionsMayNotUseTimingParameters) {
  const auto d = first_diagnostic(
      "device d {\n  timing_params { tX = 1; }\n  per bank b { place P init tX; transition A; arc P -> A; }\n}\n");
  EXPECT_NE(d.message.find("tX"), std::string::npos);
}

TEST(Dsl, ExplicitCoordinateVariable) {
  const auto m = parse_model(
      "device d {\n  per rank r { place Q init 1; transition T; }\n"
      "  per bank b { place Q init 0; transition A; arc Q(rank) -> A; arc A -> Q(b); arc Q(rank) -> T; }\n}\n");
  const Net n = build_net(m, 2, 1);
  const auto q_rank = *n.find_place("Q@r0");
  const auto a0 = *n.find_transition("A@r0.b0");
  bool found = false;
  for (const auto& a : n.arcs())
    if (a.source == NodeRef::place(q_rank) && a.target == NodeRef::transition(a0)) found = true;
  EXPECT_TRUE(found);
}

TEST(Dsl, ExpressionPrecedenceAndMax) {
  const Expr e = parse_expr("a - (b - c) * 2 + max(x, 3, y)");
  EXPECT_EQ(to_string(e), "a - (b - c) * 2 + max(x, 3, y)");
  EXPECT_EQ(evaluate(e, {{"a", 10}, {"b", 4}, {"c", 1}, {"x", 2}, {"y", 1}}), 10 - 6 + 3);
  EXPECT_THROW(parse_expr("max(a)"), ParseError);
  EXPECT_THROW(evaluate(parse_expr("q + 1"), {}), BuildError);
}

TEST(Dsl, CanonicalFormIdentities) {
  auto same = [](const char* a, const char* b) { return canonical(parse_expr(a)) == canonical(parse_expr(b)); };
  EXPECT_TRUE(same("tRCD", "tRCD + 0"));
  EXPECT_TRUE(same("tRP + 2 * tCK", "tCK * 2 + tRP"));
  EXPECT_TRUE(same("max(a, b)", "max(b, a)"));
  EXPECT_TRUE(same("max(a, max(b, a))", "max(b, a)"));
  EXPECT_TRUE(same("max(a, 2, 5)", "max(5, a)"));
  EXPECT_TRUE(same("max(a, a)", "a"));
  EXPECT_TRUE(same("max(3, 4)", "4"));
  EXPECT_TRUE(same("(a + b) * (a - b)", "a * a - b * b"));
  EXPECT_FALSE(same("tRCD", "tRP"));
  EXPECT_FALSE(same("max(a, b)", "a + b"));
  EXPECT_EQ(canonical(parse_expr("1 + tRP + tRCD")), "tRCD + tRP + 1");
}

TEST(Dsl, ExpressionPrintParseRoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Expr e = random_expr(rng, 4);
    const Expr back = parse_expr(to_string(e));
    ASSERT_EQ(back, e) << to_string(e);
  }
}

TEST(Dsl, CanonicalFormAgreesWithEvaluation) {
  // Equal normal forms must evaluate equally under every binding.
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const Expr a = random_expr(rng, 3);
    // The normal form may lead with a unary minus, which the grammar spells
    // as a subtraction from zero.
    std::string text = "0 + " + canonical(a);
    for (std::size_t at = 0; (at = text.find("-", at)) != std::string::npos; at += 4)
      if (at > 0 && text[at + 1] != ' ') text.replace(at, 1, "0 - ");
    const Expr b = parse_expr(text);
    for (int j = 0; j < 5; ++j) {
      Bindings env{{"tRCD", static_cast<std::int64_t>(rng() % 9)}, {"tRP", static_cast<std::int64_t>(rng() % 9)},
                   {"tCK", static_cast<std::int64_t>(rng() % 9)}, {"B", static_cast<std::int64_t>(rng() % 9)},
                   {"x", static_cast<std::int64_t>(rng() % 9)}};
      ASSERT_EQ(evaluate(a, env), evaluate(b, env)) << to_string(a) << " vs " << canonical(a);
    }
  }
}

TEST(Dsl, ModelPrintParseRoundTrip) {
  for (const auto& name : fixture_names()) {
    const auto m = fixture(name);
    const std::string printed = print_model(m);
    const auto back = parse_model(printed);
    EXPECT_EQ(back, m) << name;
    EXPECT_EQ(print_model(back), printed) << name;
  }
}

TEST(Dsl, MutantModelsRoundTrip) {
  for (const auto& name : fixture_names()) {
    const auto m = fixture(name);
    for (const auto& mut : generate_mutants(m, 60, 3)) {
      const auto mm = apply_mutation(m, mut).model;
      ASSERT_EQ(parse_model(print_model(mm)), mm) << print_model(mm);
    }
  }
}
