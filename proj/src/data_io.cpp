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

#include "elens/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "elens/errors.hpp"
#include "elens/random.hpp"

namespace elens {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double quantile(std::vector<double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

ConceptDataset parse_csv(std::istream& in, std::span<const std::string> target_columns,
                         bool discretize_columns, const std::string& provenance) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw DataError("no samples: empty file");
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  // Strip a UTF-8 byte order mark.
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0] = header[0].substr(3);

  std::set<std::string> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) throw DataError("column " + std::to_string(c + 1) + " has an empty name");
    if (!seen.insert(header[c]).second) {
      throw DataError("duplicate column name '" + header[c] + "' at column " + std::to_string(c + 1));
    }
  }
  std::vector<std::size_t> target_pos;
  for (const auto& t : target_columns) {
    auto it = std::find(header.begin(), header.end(), t);
    if (it == header.end()) throw DataError("target column '" + t + "' not found in header");
    target_pos.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  std::vector<std::size_t> concept_pos;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (std::find(target_pos.begin(), target_pos.end(), c) == target_pos.end()) {
      concept_pos.push_back(c);
    }
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError("row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(header.size()));
    }
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
          !std::isfinite(v)) {
        throw DataError("non-numeric cell '" + cell + "' at row " + std::to_string(line_no) +
                        ", column '" + header[c] + "'");
      }
      values[c] = v;
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw DataError("no samples");

  ConceptDataset ds;
  ds.provenance = provenance;
  ds.class_names.assign(target_columns.begin(), target_columns.end());
  ds.targets = BoolMatrix(rows.size(), target_pos.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t t = 0; t < target_pos.size(); ++t) {
      const double v = rows[r][target_pos[t]];
      if (v != 0.0 && v != 1.0) {
        throw DataError("target '" + header[target_pos[t]] + "' at row " + std::to_string(r + 2) +
                        " is not 0/1: " + format_number(v));
      }
      ds.targets(r, t) = v == 1.0 ? 1 : 0;
    }
  }

  // Assemble concept columns, discretizing where requested.
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  for (std::size_t c : concept_pos) {
    std::vector<double> col(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) col[r] = rows[r][c];
    const bool binary =
        std::all_of(col.begin(), col.end(), [](double v) { return v == 0.0 || v == 1.0; });
    if (discretize_columns && !binary) {
      auto d = discretize(header[c], col);
      if (d.constant) {
        std::cerr << "warning: column '" << header[c] << "' is constant; emitted "
                  << d.names.front() << " only\n";
      }
      for (std::size_t k = 0; k < d.names.size(); ++k) {
        names.push_back(d.names[k]);
        columns.emplace_back(d.columns[k].begin(), d.columns[k].end());
      }
      continue;
    }
    if (!discretize_columns) {
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (col[r] < 0.0 || col[r] > 1.0) {
          throw DataError("value " + format_number(col[r]) + " out of range [0,1] at row " +
                          std::to_string(r + 2) + ", column '" + header[c] + "'");
        }
      }
    }
    names.push_back(header[c]);
    columns.push_back(std::move(col));
  }
  std::set<std::string> unique_names;
  for (const auto& n : names) {
    if (!unique_names.insert(n).second) throw DataError("duplicate concept name '" + n + "'");
  }
  ds.concept_names = std::move(names);
  ds.concepts = RealMatrix(rows.size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    for (std::size_t r = 0; r < rows.size(); ++r) ds.concepts(r, j) = columns[j][r];
  }
  ds.validate();
  return ds;
}

ConceptDataset load_csv(const std::filesystem::path& path,
                        std::span<const std::string> target_columns, bool discretize_columns) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  return parse_csv(in, target_columns, discretize_columns, "csv:" + path.string());
}

void write_csv(const ConceptDataset& dataset, std::ostream& out) {
  bool first = true;
  for (const auto& n : dataset.concept_names) {
    out << (first ? "" : ",") << n;
    first = false;
  }
  for (const auto& n : dataset.class_names) {
    out << (first ? "" : ",") << n;
    first = false;
  }
  out << '\n';
  for (std::size_t i = 0; i < dataset.num_samples(); ++i) {
    first = true;
    for (double v : dataset.concepts.row(i)) {
      out << (first ? "" : ",") << format_number(v);
      first = false;
    }
    for (auto t : dataset.targets.row(i)) {
      out << (first ? "" : ",") << (t ? '1' : '0');
      first = false;
    }
    out << '\n';
  }
}

void save_csv(const ConceptDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(dataset, out);
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

DiscretizedColumns discretize(const std::string& feature, std::span<const double> values) {
  DiscretizedColumns out;
  if (values.empty()) throw DataError("discretize: column '" + feature + "' is empty");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    out.constant = true;
    out.names = {feature + "_NORMAL"};
    out.columns = {BoolVector(values.size(), 1)};
    return out;
  }
  const double low_cut = quantile(sorted, 1.0 / 3.0);
  const double high_cut = quantile(sorted, 2.0 / 3.0);
  out.names = {feature + "_LOW", feature + "_NORMAL", feature + "_HIGH"};
  out.columns.assign(3, BoolVector(values.size(), 0));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t bin = values[i] <= low_cut ? 0 : (values[i] <= high_cut ? 1 : 2);
    out.columns[bin][i] = 1;
  }
  return out;
}

ConceptDataset synth_toy(std::size_t n_pad) {
  static constexpr int kRows[8][4] = {{0, 0, 0, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}, {1, 1, 0, 0},
                                      {0, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}, {0, 0, 1, 1}};
  ConceptDataset ds;
  ds.provenance = "synth:toy:pad=" + std::to_string(n_pad);
  ds.concept_names = {"x1", "x2", "x3", "x4"};
  for (std::size_t p = 0; p < n_pad; ++p) ds.concept_names.push_back("pad" + std::to_string(p + 1));
  ds.class_names = {"y", "not_y", "z", "not_z"};
  ds.concepts = RealMatrix(8, 4 + n_pad);
  ds.targets = BoolMatrix(8, 4);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 4; ++j) ds.concepts(i, j) = kRows[i][j];
    const bool y = (kRows[i][0] != 0) != (kRows[i][1] != 0);
    const bool z = kRows[i][2] != 0 || kRows[i][3] != 0;
    ds.targets(i, 0) = y;
    ds.targets(i, 1) = !y;
    ds.targets(i, 2) = z;
    ds.targets(i, 3) = !z;
  }
  return ds;
}

std::vector<std::string> parity_concept_names() {
  return {"zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine"};
}

ConceptDataset synth_parity(std::size_t n, double noise, std::uint64_t seed) {
  if (n < 10) throw ConfigError("synth_parity needs at least 10 samples");
  if (!(noise >= 0.0 && noise < 0.5)) throw ConfigError("synth_parity noise must lie in [0, 0.5)");
  Rng rng(seed);
  ConceptDataset ds;
  ds.provenance = "synth:parity:n=" + std::to_string(n) + ":noise=" + format_number(noise) +
                  ":seed=" + std::to_string(seed);
  ds.concept_names = parity_concept_names();
  ds.class_names = {"even", "odd"};
  ds.concepts = RealMatrix(n, 10);
  ds.targets = BoolMatrix(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t digit = rng.below(10);
    for (std::size_t j = 0; j < 10; ++j) {
      bool bit = j == digit;
      if (noise > 0.0 && rng.bernoulli(noise)) bit = !bit;
      ds.concepts(i, j) = bit ? 1.0 : 0.0;
    }
    ds.targets(i, digit % 2) = 1;
  }
  return ds;
}

}  // namespace elens
