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

// DNF formulas over named concepts and the extraction pipeline that turns an
// empirical truth table into a class-level explanation.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elens/core_math.hpp"
#include "elens/dataset.hpp"
#include "elens/entropy_layer.hpp"

namespace elens {

struct Literal {
  std::size_t concept_index = 0;
  std::string name;
  bool negated = false;

  bool operator==(const Literal&) const = default;
};

/// Conjunction of literals sorted by concept_index. An empty term is "True".
struct Term {
  std::vector<Literal> literals;

  bool operator==(const Term&) const = default;
};

/// A concept the formula ranges over.
struct Variable {
  std::size_t concept_index = 0;
  std::string name;

  bool operator==(const Variable&) const = default;
};

struct Minterm {
  Term term;
  std::size_t support = 0;
};

/// Disjunction of terms over `variables` (sorted by concept_index).
/// No terms means "False"; a single empty term means "True".
struct DnfFormula {
  std::size_t class_index = 0;
  std::vector<Variable> variables;
  std::vector<Term> terms;
  /// Set by simplify() when the variable count exceeded the limit.
  bool minimization_skipped = false;

  bool is_false() const noexcept { return terms.empty(); }
  bool is_true() const noexcept;

  /// Concept names appearing in at least one literal, ordered by concept index.
  std::vector<std::string> concept_names() const;

  /// Structural equality of the term lists.
  bool operator==(const DnfFormula& other) const { return terms == other.terms; }
};

/// Conjunction over all kept concepts: positive where row[z] is set.
/// Throws DataError("no concepts retained") for a zero-width row.
Minterm extract_minterm(std::span<const std::uint8_t> row, std::span<const Variable> variables);

std::vector<Variable> variables_of(const TruthTable& table);

/// Masked, binarized concepts of `dataset` restricted to `kept_concepts`.
BoolMatrix masked_rows(const ConceptDataset& dataset, std::span<const std::size_t> kept_concepts,
                       double epsilon);

/// Number of distinct boolean tuples that occur with both output values.
std::size_t count_contradictions(const TruthTable& table);

/// Minterms from positive rows with their support, ranked by support
/// descending and then lexicographically by the boolean tuple.
std::vector<Minterm> ranked_minterms(const TruthTable& table);

/// Greedy OR-aggregation of ranked minterms. A candidate is kept while the
/// class F1 on the validation rows strictly improves; the first
/// non-improving candidate ends the search. validation_rows are already
/// masked to the table's kept concepts; validation_labels are the class
/// memberships.
DnfFormula aggregate_class_formula(const TruthTable& table, const BoolMatrix& validation_rows,
                                   std::span<const std::uint8_t> validation_labels);

inline constexpr std::size_t kDefaultQmVarLimit = 16;

/// Quine-McCluskey minimization: prime implicants, essential implicants,
/// greedy cover of the rest, then removal of redundant terms. Unlisted
/// assignments are off-set. Formulas over more than var_limit variables are
/// returned unchanged with minimization_skipped set.
DnfFormula simplify(const DnfFormula& formula, std::size_t var_limit = kDefaultQmVarLimit);

/// sample holds one value per formula variable. Throws DimensionError on width mismatch.
bool evaluate(const DnfFormula& formula, std::span<const std::uint8_t> sample);

/// Evaluates on a full-width concept vector indexed by concept_index.
bool evaluate_concepts(const DnfFormula& formula, std::span<const std::uint8_t> concepts);

enum class RenderStyle { kUnicode, kAscii, kDnfCanonical };

RenderStyle render_style_from_string(std::string_view s);

std::string render(const DnfFormula& formula, RenderStyle style = RenderStyle::kUnicode);

/// Parses the ascii grammar
///   expr := term ('|' term)* ; term := lit ('&' lit)* ; lit := '~'? NAME | 'True' | 'False'
/// A term may be wrapped in parentheses. Names resolve against `variables`.
/// Throws DataError on syntax errors or unknown names.
DnfFormula parse_formula(std::string_view text, std::span<const Variable> variables,
                         std::size_t class_index = 0);

std::size_t literal_count(const DnfFormula& formula);

/// Number of terms; 0 for the True/False constants.
std::size_t term_count(const DnfFormula& formula);

}  // namespace elens
