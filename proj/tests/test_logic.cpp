// Copyright 2026 The entropy-lens Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "elens/errors.hpp"
#include "elens/logic.hpp"
#include "formula_oracle.hpp"
#include "test_support.hpp"

namespace elens {
namespace {

using testing::equivalent;
using testing::make_variables;
using testing::oracle_eval;

std::vector<Variable> named(std::initializer_list<const char*> names) {
  std::vector<Variable> vars;
  std::size_t j = 0;
  for (const char* n : names) vars.push_back({j++, n});
  return vars;
}

DnfFormula parse(const std::string& text, const std::vector<Variable>& vars) {
  return parse_formula(text, vars);
}

TruthTable table_of(const std::vector<Variable>& vars, const std::vector<BoolVector>& rows,
                    const BoolVector& outputs) {
  TruthTable t;
  for (const auto& v : vars) {
    t.kept_concepts.push_back(v.concept_index);
    t.concept_names.push_back(v.name);
  }
  t.rows = BoolMatrix(rows.size(), vars.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < vars.size(); ++j) t.rows(i, j) = rows[i][j];
  }
  t.outputs = outputs;
  return t;
}

TEST(ExtractMinterm, OneLiteralPerKeptConcept) {
  const auto vars = named({"c1", "c2", "c3"});
  const Minterm m = extract_minterm(BoolVector{1, 0, 1}, vars);
  DnfFormula f;
  f.variables = vars;
  f.terms = {m.term};
  EXPECT_EQ(render(f), "c1 ∧ ¬c2 ∧ c3");
  f.terms = {extract_minterm(BoolVector{0, 0, 0}, vars).term};
  EXPECT_EQ(render(f), "¬c1 ∧ ¬c2 ∧ ¬c3");
  const auto one = named({"c1"});
  f.variables = one;
  f.terms = {extract_minterm(BoolVector{1}, one).term};
  EXPECT_EQ(render(f), "c1");
}

TEST(ExtractMinterm, EmptyRowIsAnError) {
  try {
    extract_minterm(BoolVector{}, std::vector<Variable>{});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("no concepts retained"), std::string::npos);
  }
}

TEST(ExtractMinterm, GeneratingRowSatisfiesItsMinterm) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + gen() % 8;
    const auto vars = make_variables(m, 3);
    BoolVector row(m);
    for (auto& b : row) b = gen() & 1;
    DnfFormula f;
    f.variables = vars;
    f.terms = {extract_minterm(row, vars).term};
    EXPECT_TRUE(evaluate(f, row));
  }
}

TEST(RankedMinterms, SupportThenLexicographicOrder) {
  const auto vars = named({"a", "b"});
  const auto t = table_of(vars, {{1, 0}, {0, 1}, {1, 0}, {0, 0}, {1, 1}, {1, 1}, {0, 1}},
                          {1, 1, 1, 0, 1, 1, 0});
  const auto ranked = ranked_minterms(t);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].support, 2u);
  EXPECT_EQ(ranked[1].support, 2u);
  EXPECT_EQ(ranked[2].support, 1u);
  // Equal support: tuple (1,0) sorts before (1,1).
  EXPECT_FALSE(ranked[0].term.literals[0].negated);
  EXPECT_TRUE(ranked[0].term.literals[1].negated);
  EXPECT_FALSE(ranked[1].term.literals[1].negated);
  EXPECT_EQ(count_contradictions(t), 1u);  // (0,1) appears with both outputs
}

TEST(Aggregate, RecoversXor) {
  const auto vars = named({"x1", "x2"});
  const auto t = table_of(vars, {{0, 1}, {1, 0}, {0, 0}, {1, 1}}, {1, 1, 0, 0});
  const DnfFormula f = aggregate_class_formula(t, t.rows, t.outputs);
  EXPECT_EQ(render(simplify(f)), "(¬x1 ∧ x2) ∨ (x1 ∧ ¬x2)");
  EXPECT_TRUE(equivalent(f, parse("(x1 & ~x2) | (~x1 & x2)", vars)));
}

TEST(Aggregate, NoPositiveRowsGivesFalse) {
  const auto vars = named({"a", "b"});
  const auto t = table_of(vars, {{0, 1}, {1, 0}}, {0, 0});
  const DnfFormula f = aggregate_class_formula(t, t.rows, t.outputs);
  EXPECT_TRUE(f.is_false());
  EXPECT_EQ(render(f), "False");
}

TEST(Aggregate, StopsAtTheFirstNonImprovingMinterm) {
  // Validation says only (1,1) is positive; the top-ranked minterm is (1,1),
  // the runner-up (0,0) only adds false positives.
  const auto vars = named({"a", "b"});
  const auto t = table_of(vars, {{1, 1}, {1, 1}, {0, 0}}, {1, 1, 1});
  BoolMatrix val(3, 2);
  val(0, 0) = val(0, 1) = 1;
  const BoolVector labels{1, 0, 0};
  const DnfFormula f = aggregate_class_formula(t, val, labels);
  EXPECT_EQ(render(f, RenderStyle::kAscii), "a & b");
}

double table_accuracy(const DnfFormula& f, const TruthTable& t) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < t.rows.rows(); ++i) hit += evaluate(f, t.rows.row(i)) == (t.outputs[i] != 0);
  return static_cast<double>(hit) / static_cast<double>(t.rows.rows());
}

TEST(Aggregate, NoWorseThanAnySingleMintermOnItsOwnTable) {
  std::mt19937_64 gen(32);
  const auto vars = make_variables(4);
  for (int trial = 0; trial < 50; ++trial) {
    // A noisy majority-like rule so positives cluster on a few tuples.
    std::vector<BoolVector> rows;
    BoolVector outputs;
    for (int i = 0; i < 40; ++i) {
      BoolVector r(4);
      for (auto& b : r) b = gen() & 1;
      const bool label = (r[0] && r[1]) || (gen() % 10 == 0);
      rows.push_back(r);
      outputs.push_back(label);
    }
    const auto t = table_of(vars, rows, outputs);
    const DnfFormula greedy = aggregate_class_formula(t, t.rows, t.outputs);
    const double greedy_acc = table_accuracy(greedy, t);
    for (const auto& m : ranked_minterms(t)) {
      DnfFormula single;
      single.variables = vars;
      single.terms = {m.term};
      EXPECT_GE(greedy_acc, table_accuracy(single, t)) << "trial " << trial;
    }
  }
}

TEST(Aggregate, NoiselessCompleteTableRecoversTheFunction) {
  std::mt19937_64 gen(33);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 2 + trial % 4;
    const DnfFormula target = testing::random_dnf(gen, m, 3);
    std::vector<BoolVector> rows;
    BoolVector outputs;
    for (std::uint32_t bits = 0; bits < (1u << m); ++bits) {
      rows.push_back(testing::assignment(bits, m));
      outputs.push_back(oracle_eval(target, bits));
    }
    const auto t = table_of(target.variables, rows, outputs);
    const DnfFormula found = simplify(aggregate_class_formula(t, t.rows, t.outputs));
    DnfFormula remapped = found;
    remapped.variables = target.variables;
    EXPECT_TRUE(equivalent(remapped, target)) << render(target) << " vs " << render(found);
    EXPECT_LE(literal_count(found), literal_count(simplify(target)));
  }
}

TEST(Simplify, MergesComplementaryLiteral) {
  const auto vars = named({"person", "nose"});
  EXPECT_EQ(render(simplify(parse("(person & nose) | (~person & nose)", vars))), "nose");
}

TEST(Simplify, TautologyBecomesTrue) {
  const auto vars = named({"a"});
  const DnfFormula f = simplify(parse("a | ~a", vars));
  EXPECT_TRUE(f.is_true());
  EXPECT_EQ(render(f), "True");
  EXPECT_EQ(literal_count(f), 0u);
}

TEST(Simplify, XorIsAlreadyMinimal) {
  const auto vars = named({"a", "b"});
  const DnfFormula x = parse("(~a & b) | (a & ~b)", vars);
  const DnfFormula s = simplify(x);
  EXPECT_EQ(s, x);
  // No single literal realises XOR.
  for (const char* lit : {"a", "~a", "b", "~b"}) EXPECT_FALSE(equivalent(parse(lit, vars), x)) << lit;
}

TEST(Simplify, SkipsAboveTheVariableLimit) {
  const auto vars = make_variables(5);
  const DnfFormula f = parse("(v0 & v1) | (v0 & ~v1)", vars);
  const DnfFormula s = simplify(f, 4);
  EXPECT_TRUE(s.minimization_skipped);
  EXPECT_EQ(s, f);
}

TEST(Simplify, PreservesSemanticsAndNeverGrows) {
  std::mt19937_64 gen(34);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + trial % 10;
    const DnfFormula f = testing::random_dnf(gen, m, 6);
    const DnfFormula s = simplify(f);
    ASSERT_TRUE(equivalent(f, s)) << render(f) << " -> " << render(s);
    EXPECT_LE(literal_count(s), literal_count(f));
    EXPECT_LE(term_count(s), term_count(f));
  }
}

TEST(Evaluate, PointCases) {
  const auto vars = named({"nose"});
  EXPECT_TRUE(evaluate(parse("nose", vars), BoolVector{1}));
  const auto xy = named({"a", "b"});
  EXPECT_FALSE(evaluate(parse("(~a & b) | (a & ~b)", xy), BoolVector{1, 1}));
  EXPECT_FALSE(evaluate(parse("False", xy), BoolVector{1, 0}));
  EXPECT_TRUE(evaluate(parse("True", xy), BoolVector{0, 0}));
  EXPECT_THROW(evaluate(parse("a", xy), BoolVector{1}), DimensionError);
}

TEST(Evaluate, MatchesEnumerationOracle) {
  std::mt19937_64 gen(35);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + trial % 6;
    const DnfFormula f = testing::random_dnf(gen, m, 5);
    for (std::uint32_t bits = 0; bits < (1u << m); ++bits) {
      ASSERT_EQ(evaluate(f, testing::assignment(bits, m)), oracle_eval(f, bits));
    }
  }
}

TEST(Evaluate, FullWidthConceptVector) {
  std::vector<Variable> vars{{1, "b"}, {3, "d"}};
  const DnfFormula f = parse("b & ~d", vars);
  EXPECT_TRUE(evaluate_concepts(f, BoolVector{0, 1, 0, 0}));
  EXPECT_FALSE(evaluate_concepts(f, BoolVector{1, 1, 1, 1}));
}

TEST(Render, Styles) {
  const auto vars = named({"x1", "x2"});
  const DnfFormula x = parse("(~x1 & x2) | (x1 & ~x2)", vars);
  EXPECT_EQ(render(x), "(¬x1 ∧ x2) ∨ (x1 ∧ ¬x2)");
  EXPECT_EQ(render(x, RenderStyle::kAscii), "(~x1 & x2) | (x1 & ~x2)");
  EXPECT_EQ(render(x, RenderStyle::kDnfCanonical), "(NOT x1 AND x2) OR (x1 AND NOT x2)");
  EXPECT_EQ(render(parse("x1 | ~x2", vars), RenderStyle::kAscii), "x1 | ~x2");
  EXPECT_EQ(render_style_from_string("dnf-canonical"), RenderStyle::kDnfCanonical);
  EXPECT_THROW(render_style_from_string("latex"), ConfigError);
}

TEST(Parse, RoundTripsRandomFormulas) {
  std::mt19937_64 gen(36);
  for (int trial = 0; trial < 100; ++trial) {
    const DnfFormula f = testing::random_dnf(gen, 1 + trial % 7, 5);
    const std::string text = render(f, RenderStyle::kAscii);
    const DnfFormula back = parse_formula(text, f.variables);
    EXPECT_EQ(back, f) << text;
    EXPECT_EQ(render(back, RenderStyle::kAscii), text);
  }
}

TEST(Parse, GrammarDetails) {
  const auto vars = named({"a", "b"});
  EXPECT_EQ(parse("  a&~b |  ( ~a & b ) ", vars), parse("(a & ~b) | (~a & b)", vars));
  EXPECT_TRUE(parse("False", vars).is_false());
  EXPECT_TRUE(parse("a | True", vars).is_true());
  EXPECT_EQ(render(parse("a & ~a | b", vars), RenderStyle::kAscii), "b");
  EXPECT_THROW(parse("a & c", vars), DataError);
  EXPECT_THROW(parse("(a & b", vars), DataError);
  EXPECT_THROW(parse("a b", vars), DataError);
}

TEST(Formula, CountsAndConceptNames) {
  const auto vars = named({"a", "b", "c"});
  const DnfFormula f = parse("(a & ~b) | c", vars);
  EXPECT_EQ(literal_count(f), 3u);
  EXPECT_EQ(term_count(f), 2u);
  EXPECT_EQ(f.concept_names(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(term_count(parse("True", vars)), 0u);
}

}  // namespace
}  // namespace elens
