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

// Dataset ingestion, discretization and synthetic generators.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "elens/core_math.hpp"
#include "elens/dataset.hpp"

namespace elens {

/// Reads a CSV with a header row: concept columns and the target columns
/// named in `target_columns` (in the order given). With `discretize`, every
/// concept column that is not already 0/1 is replaced by LOW/NORMAL/HIGH
/// one-hot columns; otherwise values must lie in [0,1].
/// Throws DataError naming the row/column for non-numeric cells, values
/// out of range, duplicate names, missing targets, or an empty file.
ConceptDataset load_csv(const std::filesystem::path& path,
                        std::span<const std::string> target_columns, bool discretize = false);
ConceptDataset parse_csv(std::istream& in, std::span<const std::string> target_columns,
                         bool discretize = false, const std::string& provenance = "stream");

/// Concept columns followed by target columns, shortest round-trip numbers.
void write_csv(const ConceptDataset& dataset, std::ostream& out);
void save_csv(const ConceptDataset& dataset, const std::filesystem::path& path);

struct DiscretizedColumns {
  std::vector<std::string> names;
  std::vector<BoolVector> columns;
  bool constant = false;  // single NORMAL column emitted
};

/// Tercile binning at the 1/3 and 2/3 empirical percentiles (linear
/// interpolation between order statistics). A value equal to a cut point
/// falls into the lower bin.
DiscretizedColumns discretize(const std::string& feature, std::span<const double> values);

/// The 8-row XOR/OR toy table with targets (y, not_y, z, not_z), concepts
/// x1..x4 followed by n_pad all-zero concepts.
ConceptDataset synth_toy(std::size_t n_pad = 100);

/// Uniform digits 0-9 as one-hot concepts ("zero".."nine"), each bit flipped
/// independently with probability `noise`; targets (even, odd).
/// Throws ConfigError unless n >= 10 and 0 <= noise < 0.5.
ConceptDataset synth_parity(std::size_t n, double noise, std::uint64_t seed);

/// Concept names used by synth_parity; position == digit.
std::vector<std::string> parity_concept_names();

}  // namespace elens
