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

#include "elens/logic.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "elens/errors.hpp"

namespace elens {

namespace {

using Bits = std::uint32_t;

// A product term as (value, care) over variable positions: a position set
// in `care` holds a literal whose polarity is the matching bit of `value`.
struct Cube {
  Bits value = 0;
  Bits care = 0;

  bool covers(Bits minterm) const noexcept { return (minterm & care) == value; }
  int literals() const noexcept { return __builtin_popcount(care); }
  bool operator==(const Cube&) const = default;
};

struct CubeHash {
  std::size_t operator()(const Cube& c) const noexcept {
    return (static_cast<std::size_t>(c.care) << 32) ^ c.value;
  }
};

std::unordered_map<std::size_t, std::size_t> position_index(std::span<const Variable> variables) {
  std::unordered_map<std::size_t, std::size_t> pos;
  for (std::size_t z = 0; z < variables.size(); ++z) pos.emplace(variables[z].concept_index, z);
  return pos;
}

Cube to_cube(const Term& term, const std::unordered_map<std::size_t, std::size_t>& pos) {
  Cube c;
  for (const auto& lit : term.literals) {
    const Bits bit = Bits{1} << pos.at(lit.concept_index);
    c.care |= bit;
    if (!lit.negated) c.value |= bit;
  }
  return c;
}

Term to_term(const Cube& cube, std::span<const Variable> variables) {
  Term t;
  for (std::size_t z = 0; z < variables.size(); ++z) {
    const Bits bit = Bits{1} << z;
    if (cube.care & bit) {
      t.literals.push_back({variables[z].concept_index, variables[z].name, (cube.value & bit) == 0});
    }
  }
  return t;
}

// Per-position state: negated < positive < absent.
bool cube_less(const Cube& a, const Cube& b, std::size_t width) {
  for (std::size_t z = 0; z < width; ++z) {
    const Bits bit = Bits{1} << z;
    const int sa = (a.care & bit) ? ((a.value & bit) ? 1 : 0) : 2;
    const int sb = (b.care & bit) ? ((b.value & bit) ? 1 : 0) : 2;
    if (sa != sb) return sa < sb;
  }
  return false;
}

double f1_score(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

std::vector<Cube> prime_implicants(const std::vector<Bits>& on_set, std::size_t width) {
  const Bits full = width == 32 ? ~Bits{0} : ((Bits{1} << width) - 1);
  std::vector<Cube> level;
  level.reserve(on_set.size());
  for (Bits m : on_set) level.push_back({m, full});
  std::vector<Cube> primes;
  while (!level.empty()) {
    std::unordered_set<Cube, CubeHash> present(level.begin(), level.end());
    std::unordered_set<Cube, CubeHash> merged_away;
    std::unordered_set<Cube, CubeHash> next;
    for (const Cube& c : level) {
      for (std::size_t z = 0; z < width; ++z) {
        const Bits bit = Bits{1} << z;
        if (!(c.care & bit) || (c.value & bit)) continue;
        const Cube partner{c.value | bit, c.care};
        if (present.count(partner)) {
          next.insert(Cube{c.value, c.care & ~bit});
          merged_away.insert(c);
          merged_away.insert(partner);
        }
      }
    }
    for (const Cube& c : level) {
      if (!merged_away.count(c)) primes.push_back(c);
    }
    level.assign(next.begin(), next.end());
    std::sort(level.begin(), level.end(), [width](const Cube& a, const Cube& b) {
      return cube_less(a, b, width);
    });
  }
  return primes;
}

// Drops cubes whose minterms are all covered by the remaining ones, scanning
// from the back so earlier (preferred) cubes survive.
void remove_redundant(std::vector<Cube>& cover, const std::vector<Bits>& on_set) {
  for (std::size_t i = cover.size(); i-- > 0;) {
    bool redundant = true;
    for (Bits m : on_set) {
      if (!cover[i].covers(m)) continue;
      bool other = false;
      for (std::size_t j = 0; j < cover.size() && !other; ++j) {
        other = j != i && cover[j].covers(m);
      }
      if (!other) {
        redundant = false;
        break;
      }
    }
    if (redundant) cover.erase(cover.begin() + static_cast<std::ptrdiff_t>(i));
  }
}

std::vector<Cube> minimal_cover(const std::vector<Cube>& primes, const std::vector<Bits>& on_set,
                                std::size_t width) {
  std::vector<Cube> chosen;
  std::vector<std::uint8_t> taken(primes.size(), 0);
  std::vector<std::uint8_t> covered(on_set.size(), 0);

  auto take = [&](std::size_t p) {
    taken[p] = 1;
    chosen.push_back(primes[p]);
    for (std::size_t m = 0; m < on_set.size(); ++m) {
      if (primes[p].covers(on_set[m])) covered[m] = 1;
    }
  };

  // Essential prime implicants.
  for (std::size_t m = 0; m < on_set.size(); ++m) {
    if (covered[m]) continue;
    std::size_t count = 0;
    std::size_t only = 0;
    for (std::size_t p = 0; p < primes.size(); ++p) {
      if (primes[p].covers(on_set[m])) {
        ++count;
        only = p;
      }
    }
    if (count == 1 && !taken[only]) take(only);
  }

  // Greedy set cover over what is left.
  while (std::find(covered.begin(), covered.end(), std::uint8_t{0}) != covered.end()) {
    std::size_t best = primes.size();
    std::size_t best_gain = 0;
    for (std::size_t p = 0; p < primes.size(); ++p) {
      if (taken[p]) continue;
      std::size_t gain = 0;
      for (std::size_t m = 0; m < on_set.size(); ++m) {
        if (!covered[m] && primes[p].covers(on_set[m])) ++gain;
      }
      if (gain == 0) continue;
      const bool better =
          best == primes.size() || gain > best_gain ||
          (gain == best_gain && (primes[p].literals() < primes[best].literals() ||
                                 (primes[p].literals() == primes[best].literals() &&
                                  cube_less(primes[p], primes[best], width))));
      if (better) {
        best = p;
        best_gain = gain;
      }
    }
    take(best);
  }
  remove_redundant(chosen, on_set);
  return chosen;
}

// Positive-output tuples with their support, by support descending. std::map
// orders tuples lexicographically and the stable sort keeps that order among
// equal supports.
std::vector<std::pair<BoolVector, std::size_t>> ranked_patterns(const TruthTable& table) {
  std::map<BoolVector, std::size_t> support;
  for (std::size_t i = 0; i < table.rows.rows(); ++i) {
    if (!table.outputs[i]) continue;
    const auto r = table.rows.row(i);
    ++support[BoolVector(r.begin(), r.end())];
  }
  std::vector<std::pair<BoolVector, std::size_t>> ranked(support.begin(), support.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranked;
}

std::size_t cover_literals(const std::vector<Cube>& cover) {
  std::size_t n = 0;
  for (const auto& c : cover) n += static_cast<std::size_t>(c.literals());
  return n;
}

}  // namespace

bool DnfFormula::is_true() const noexcept {
  return std::any_of(terms.begin(), terms.end(), [](const Term& t) { return t.literals.empty(); });
}

std::vector<std::string> DnfFormula::concept_names() const {
  std::map<std::size_t, std::string> seen;
  for (const auto& t : terms) {
    for (const auto& l : t.literals) seen.emplace(l.concept_index, l.name);
  }
  std::vector<std::string> out;
  for (auto& [idx, name] : seen) out.push_back(name);
  return out;
}

Minterm extract_minterm(std::span<const std::uint8_t> row, std::span<const Variable> variables) {
  if (row.empty() || variables.empty()) throw DataError("no concepts retained");
  if (row.size() != variables.size()) {
    throw DimensionError("extract_minterm: row width " + std::to_string(row.size()) + " != " +
                         std::to_string(variables.size()) + " variables");
  }
  Minterm m;
  m.support = 1;
  for (std::size_t z = 0; z < row.size(); ++z) {
    m.term.literals.push_back({variables[z].concept_index, variables[z].name, row[z] == 0});
  }
  return m;
}

std::vector<Variable> variables_of(const TruthTable& table) {
  std::vector<Variable> vars;
  for (std::size_t z = 0; z < table.kept_concepts.size(); ++z) {
    vars.push_back({table.kept_concepts[z], table.concept_names[z]});
  }
  return vars;
}

BoolMatrix masked_rows(const ConceptDataset& dataset, std::span<const std::size_t> kept_concepts,
                       double epsilon) {
  BoolMatrix out(dataset.num_samples(), kept_concepts.size());
  for (std::size_t i = 0; i < dataset.num_samples(); ++i) {
    for (std::size_t z = 0; z < kept_concepts.size(); ++z) {
      out(i, z) = dataset.concepts(i, kept_concepts[z]) >= epsilon ? 1 : 0;
    }
  }
  return out;
}

std::size_t count_contradictions(const TruthTable& table) {
  std::map<BoolVector, std::uint8_t> seen;  // bit 0: output 0 seen, bit 1: output 1 seen
  for (std::size_t i = 0; i < table.rows.rows(); ++i) {
    const auto r = table.rows.row(i);
    seen[BoolVector(r.begin(), r.end())] |= table.outputs[i] ? 2 : 1;
  }
  return static_cast<std::size_t>(
      std::count_if(seen.begin(), seen.end(), [](const auto& kv) { return kv.second == 3; }));
}

std::vector<Minterm> ranked_minterms(const TruthTable& table) {
  const auto ranked = ranked_patterns(table);
  const auto vars = variables_of(table);
  std::vector<Minterm> out;
  for (const auto& [pattern, count] : ranked) {
    Minterm m = extract_minterm(pattern, vars);
    m.support = count;
    out.push_back(std::move(m));
  }
  return out;
}

DnfFormula aggregate_class_formula(const TruthTable& table, const BoolMatrix& validation_rows,
                                   std::span<const std::uint8_t> validation_labels) {
  if (validation_rows.rows() != validation_labels.size()) {
    throw DimensionError("aggregate_class_formula: validation rows and labels differ in length");
  }
  if (validation_rows.rows() > 0 && validation_rows.cols() != table.kept_concepts.size()) {
    throw DimensionError("aggregate_class_formula: validation rows are not masked like the table");
  }
  DnfFormula formula;
  formula.class_index = table.class_index;
  formula.variables = variables_of(table);

  const std::size_t n = validation_rows.rows();
  BoolVector predicted(n, 0);
  double best_f1 = 0.0;

  const auto ranked = ranked_patterns(table);
  for (const auto& [pattern, count] : ranked) {
    BoolVector trial = predicted;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = validation_rows.row(i);
      if (!trial[i] && std::equal(r.begin(), r.end(), pattern.begin())) trial[i] = 1;
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (trial[i] && validation_labels[i]) ++tp;
      else if (trial[i]) ++fp;
      else if (validation_labels[i]) ++fn;
    }
    const double f1 = f1_score(tp, fp, fn);
    if (!(f1 > best_f1)) break;
    best_f1 = f1;
    predicted = std::move(trial);
    formula.terms.push_back(extract_minterm(pattern, formula.variables).term);
  }
  return formula;
}

DnfFormula simplify(const DnfFormula& formula, std::size_t var_limit) {
  DnfFormula out = formula;
  out.minimization_skipped = false;
  const std::size_t width = formula.variables.size();
  if (width > var_limit || width > 24) {
    out.minimization_skipped = true;
    return out;
  }
  if (formula.is_false()) return out;

  const auto pos = position_index(formula.variables);
  std::vector<Cube> input;
  for (const auto& t : formula.terms) {
    const Cube c = to_cube(t, pos);
    if (std::find(input.begin(), input.end(), c) == input.end()) input.push_back(c);
  }

  std::vector<Bits> on_set;
  const Bits limit = Bits{1} << width;
  for (Bits m = 0; m < limit; ++m) {
    if (std::any_of(input.begin(), input.end(), [m](const Cube& c) { return c.covers(m); })) {
      on_set.push_back(m);
    }
  }
  out.terms.clear();
  if (on_set.size() == static_cast<std::size_t>(limit)) {
    out.terms.push_back(Term{});
    return out;
  }

  const auto primes = prime_implicants(on_set, width);
  std::vector<Cube> cover = minimal_cover(primes, on_set, width);

  // Fallback: widen each input term to its smallest containing prime. It can
  // never exceed the input, so the result never grows in either measure.
  std::vector<Cube> widened;
  for (const Cube& c : input) {
    const Cube* best = nullptr;
    for (const Cube& p : primes) {
      const bool contains = (p.care & c.care) == p.care && (c.value & p.care) == p.value;
      if (contains && (!best || p.literals() < best->literals())) best = &p;
    }
    if (std::find(widened.begin(), widened.end(), *best) == widened.end()) widened.push_back(*best);
  }
  remove_redundant(widened, on_set);
  if (cover_literals(widened) < cover_literals(cover) || widened.size() < cover.size()) {
    cover = std::move(widened);
  }

  std::sort(cover.begin(), cover.end(),
            [width](const Cube& a, const Cube& b) { return cube_less(a, b, width); });
  for (const Cube& c : cover) out.terms.push_back(to_term(c, formula.variables));
  return out;
}

bool evaluate(const DnfFormula& formula, std::span<const std::uint8_t> sample) {
  if (sample.size() != formula.variables.size()) {
    throw DimensionError("evaluate: sample width " + std::to_string(sample.size()) + " != " +
                         std::to_string(formula.variables.size()) + " formula variables");
  }
  const auto pos = position_index(formula.variables);
  for (const auto& t : formula.terms) {
    bool ok = true;
    for (const auto& l : t.literals) {
      const bool v = sample[pos.at(l.concept_index)] != 0;
      if (v == l.negated) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

bool evaluate_concepts(const DnfFormula& formula, std::span<const std::uint8_t> concepts) {
  for (const auto& t : formula.terms) {
    bool ok = true;
    for (const auto& l : t.literals) {
      if (l.concept_index >= concepts.size()) {
        throw DimensionError("evaluate_concepts: concept index " + std::to_string(l.concept_index) +
                             " out of range");
      }
      if ((concepts[l.concept_index] != 0) == l.negated) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

RenderStyle render_style_from_string(std::string_view s) {
  if (s == "unicode") return RenderStyle::kUnicode;
  if (s == "ascii") return RenderStyle::kAscii;
  if (s == "dnf-canonical") return RenderStyle::kDnfCanonical;
  throw ConfigError("unknown style '" + std::string(s) + "' (expected unicode, ascii, dnf-canonical)");
}

std::string render(const DnfFormula& formula, RenderStyle style) {
  if (formula.is_false()) return "False";
  if (formula.is_true()) return "True";
  const char* and_op = " ∧ ";
  const char* or_op = " ∨ ";
  const char* not_op = "¬";
  if (style == RenderStyle::kAscii) {
    and_op = " & ";
    or_op = " | ";
    not_op = "~";
  } else if (style == RenderStyle::kDnfCanonical) {
    and_op = " AND ";
    or_op = " OR ";
    not_op = "NOT ";
  }
  std::string out;
  const bool wrap = formula.terms.size() > 1;
  for (std::size_t t = 0; t < formula.terms.size(); ++t) {
    if (t > 0) out += or_op;
    auto lits = formula.terms[t].literals;
    std::stable_sort(lits.begin(), lits.end(),
                     [](const Literal& a, const Literal& b) { return a.concept_index < b.concept_index; });
    const bool paren = wrap && lits.size() > 1;
    if (paren) out += '(';
    for (std::size_t i = 0; i < lits.size(); ++i) {
      if (i > 0) out += and_op;
      if (lits[i].negated) out += not_op;
      out += lits[i].name;
    }
    if (paren) out += ')';
  }
  return out;
}

namespace {

class FormulaParser {
 public:
  FormulaParser(std::string_view text, std::span<const Variable> variables)
      : text_(text), variables_(variables) {}

  std::vector<Term> parse() {
    std::vector<Term> terms;
    bool any_true = false;
    do {
      auto term = parse_term();
      if (term.has_value()) {
        if (term->literals.empty()) any_true = true;
        if (std::find(terms.begin(), terms.end(), *term) == terms.end()) {
          terms.push_back(std::move(*term));
        }
      }
    } while (consume('|'));
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    if (any_true) return {Term{}};
    return terms;
  }

 private:
  // nullopt when the term contains False or a complementary pair.
  std::optional<Term> parse_term() {
    const bool paren = consume('(');
    Term term;
    bool dead = false;
    do {
      skip_ws();
      const bool negated = consume('~');
      const std::string name = read_name();
      if (name == "True" || name == "False") {
        if ((name == "True") == negated) dead = true;
        continue;
      }
      const Variable& v = lookup(name);
      auto it = std::find_if(term.literals.begin(), term.literals.end(),
                             [&](const Literal& l) { return l.concept_index == v.concept_index; });
      if (it == term.literals.end()) {
        term.literals.push_back({v.concept_index, v.name, negated});
      } else if (it->negated != negated) {
        dead = true;
      }
    } while (consume('&'));
    if (paren && !consume(')')) fail("missing ')'");
    if (dead) return std::nullopt;
    std::stable_sort(term.literals.begin(), term.literals.end(),
                     [](const Literal& a, const Literal& b) { return a.concept_index < b.concept_index; });
    return term;
  }

  const Variable& lookup(const std::string& name) const {
    for (const auto& v : variables_) {
      if (v.name == name) return v;
    }
    throw DataError("unknown concept '" + name + "' in formula");
  }

  std::string read_name() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '&' || c == '|' || c == '~' ||
          c == '(' || c == ')') {
        break;
      }
      ++pos_;
    }
    if (pos_ == start) fail("expected a concept name");
    return std::string(text_.substr(start, pos_ - start));
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("formula parse error at offset " + std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  std::span<const Variable> variables_;
  std::size_t pos_ = 0;
};

}  // namespace

DnfFormula parse_formula(std::string_view text, std::span<const Variable> variables,
                         std::size_t class_index) {
  DnfFormula f;
  f.class_index = class_index;
  f.variables.assign(variables.begin(), variables.end());
  std::sort(f.variables.begin(), f.variables.end(),
            [](const Variable& a, const Variable& b) { return a.concept_index < b.concept_index; });
  f.terms = FormulaParser(text, variables).parse();
  return f;
}

std::size_t literal_count(const DnfFormula& formula) {
  if (formula.is_true()) return 0;
  std::size_t n = 0;
  for (const auto& t : formula.terms) n += t.literals.size();
  return n;
}

std::size_t term_count(const DnfFormula& formula) {
  return formula.is_true() ? 0 : formula.terms.size();
}

}  // namespace elens
