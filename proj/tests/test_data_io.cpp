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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "elens/data_io.hpp"
#include "elens/errors.hpp"

namespace elens {
namespace {

const std::vector<std::string> kToyTargets{"y", "not_y", "z", "not_z"};

ConceptDataset parse(const std::string& text, const std::vector<std::string>& targets,
                     bool discretize = false) {
  std::istringstream in(text);
  return parse_csv(in, targets, discretize);
}

std::string error_of(const std::string& text, const std::vector<std::string>& targets,
                     bool discretize = false) {
  try {
    parse(text, targets, discretize);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

TEST(SynthToy, MatchesTheTable) {
  const ConceptDataset ds = synth_toy(0);
  ASSERT_EQ(ds.num_samples(), 8u);
  ASSERT_EQ(ds.num_concepts(), 4u);
  ASSERT_EQ(ds.num_classes(), 4u);
  // Row (0,1,0,0): y=1, z=0.
  EXPECT_EQ(ds.concepts.row(1)[1], 1.0);
  EXPECT_EQ(ds.targets(1, 0), 1);
  EXPECT_EQ(ds.targets(1, 2), 0);
  // Row (0,0,1,1): y=0, z=1.
  EXPECT_EQ(ds.concepts(7, 2), 1.0);
  EXPECT_EQ(ds.concepts(7, 3), 1.0);
  EXPECT_EQ(ds.targets(7, 0), 0);
  EXPECT_EQ(ds.targets(7, 2), 1);
  for (std::size_t i = 0; i < 8; ++i) {
    const bool x1 = ds.concepts(i, 0), x2 = ds.concepts(i, 1);
    const bool x3 = ds.concepts(i, 2), x4 = ds.concepts(i, 3);
    EXPECT_EQ(ds.targets(i, 0), x1 != x2);
    EXPECT_EQ(ds.targets(i, 1), x1 == x2);
    EXPECT_EQ(ds.targets(i, 2), x3 || x4);
    EXPECT_EQ(ds.targets(i, 3), !(x3 || x4));
  }
}

TEST(SynthToy, UnpaddedCsvMatchesFixture) {
  static constexpr char kFixture[] =
      "x1,x2,x3,x4,y,not_y,z,not_z\n"
      "0,0,0,0,0,1,0,1\n"
      "0,1,0,0,1,0,0,1\n"
      "1,0,0,0,1,0,0,1\n"
      "1,1,0,0,0,1,0,1\n"
      "0,0,0,0,0,1,0,1\n"
      "0,0,0,1,0,1,1,0\n"
      "0,0,1,0,0,1,1,0\n"
      "0,0,1,1,0,1,1,0\n";
  std::ostringstream out;
  write_csv(synth_toy(0), out);
  EXPECT_EQ(out.str(), kFixture);
}

TEST(SynthToy, PaddingIsZero) {
  const ConceptDataset ds = synth_toy(100);
  ASSERT_EQ(ds.num_concepts(), 104u);
  EXPECT_EQ(ds.concept_names[4], "pad1");
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 4; j < 104; ++j) EXPECT_EQ(ds.concepts(i, j), 0.0);
  }
}

TEST(SynthToy, CsvRoundTripIsExact) {
  const ConceptDataset ds = synth_toy(100);
  std::ostringstream out;
  write_csv(ds, out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 9);
  EXPECT_EQ(text.substr(0, 12), "x1,x2,x3,x4,");
  EXPECT_NE(text.find("pad100,y,not_y,z,not_z\n"), std::string::npos);
  const ConceptDataset back = parse(text, kToyTargets);
  EXPECT_EQ(back.concepts, ds.concepts);
  EXPECT_EQ(back.targets, ds.targets);
  EXPECT_EQ(back.concept_names, ds.concept_names);
  EXPECT_EQ(back.class_names, ds.class_names);
  std::ostringstream again;
  write_csv(back, again);
  EXPECT_EQ(again.str(), text);
}

TEST(SynthParity, CleanSamplesAreOneHot) {
  const ConceptDataset ds = synth_parity(500, 0.0, 3);
  ASSERT_EQ(ds.num_concepts(), 10u);
  EXPECT_EQ(ds.concept_names[7], "seven");
  EXPECT_EQ(ds.class_names, (std::vector<std::string>{"even", "odd"}));
  std::vector<int> seen(10, 0);
  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    int hot = -1, count = 0;
    for (int j = 0; j < 10; ++j) {
      if (ds.concepts(i, j) == 1.0) {
        hot = j;
        ++count;
      }
    }
    ASSERT_EQ(count, 1);
    seen[hot] = 1;
    EXPECT_EQ(ds.targets(i, 1), hot % 2);
    EXPECT_EQ(ds.targets(i, 0), 1 - hot % 2);
  }
  EXPECT_EQ(std::count(seen.begin(), seen.end(), 1), 10);
}

TEST(SynthParity, NoiseRateWithinThreeSigma) {
  const double p = 0.05;
  const ConceptDataset ds = synth_parity(10000, p, 11);
  // The clean digit is not stored, so count set bits instead: the hot bit
  // survives with 1-p and each of the nine cold bits turns on with p.
  double ones = 0;
  for (double v : ds.concepts.data()) ones += v;
  const double n = 10000;
  const double expected = n * (1.0 - p + 9.0 * p);
  const double sigma = std::sqrt(n * 10.0 * p * (1.0 - p));
  EXPECT_NEAR(ones, expected, 3.0 * sigma);
}

TEST(SynthParity, ArgumentChecks) {
  EXPECT_THROW(synth_parity(9, 0.0, 0), ConfigError);
  EXPECT_THROW(synth_parity(100, 0.5, 0), ConfigError);
  EXPECT_THROW(synth_parity(100, -0.1, 0), ConfigError);
  EXPECT_EQ(synth_parity(50, 0.1, 9).concepts, synth_parity(50, 0.1, 9).concepts);
}

TEST(Csv, ErrorsNameRowAndColumn) {
  const std::string bad_range = "a,b,t\n0,1,1\n1.2,0,0\n";
  const std::string msg = error_of(bad_range, {"t"});
  EXPECT_NE(msg.find("out of range"), std::string::npos);
  EXPECT_NE(msg.find("row 3"), std::string::npos);
  EXPECT_NE(msg.find("'a'"), std::string::npos);

  const std::string non_numeric = error_of("a,b,t\n0,x,1\n", {"t"});
  EXPECT_NE(non_numeric.find("non-numeric"), std::string::npos);
  EXPECT_NE(non_numeric.find("row 2"), std::string::npos);
  EXPECT_NE(non_numeric.find("'b'"), std::string::npos);

  EXPECT_NE(error_of("a,a,t\n0,1,1\n", {"t"}).find("duplicate"), std::string::npos);
  EXPECT_NE(error_of("", {"t"}).find("no samples"), std::string::npos);
  EXPECT_NE(error_of("a,t\n", {"t"}).find("no samples"), std::string::npos);
  EXPECT_NE(error_of("a,t\n0,1\n", {"u"}).find("'u'"), std::string::npos);
  EXPECT_NE(error_of("a,t\n0,2\n", {"t"}).find("not 0/1"), std::string::npos);
  EXPECT_NE(error_of("a,t\n0\n", {"t"}).find("row 2"), std::string::npos);
}

TEST(Csv, TargetOrderFollowsRequest) {
  const ConceptDataset ds = parse("b,t2,a,t1\n0.5,0,1,1\n0.25,1,0,0\n", {"t1", "t2"});
  EXPECT_EQ(ds.concept_names, (std::vector<std::string>{"b", "a"}));
  EXPECT_EQ(ds.class_names, (std::vector<std::string>{"t1", "t2"}));
  EXPECT_EQ(ds.concepts(0, 0), 0.5);
  EXPECT_EQ(ds.targets(0, 0), 1);
  EXPECT_EQ(ds.targets(1, 1), 1);
}

TEST(Csv, LoadsFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "elens_io_test.csv";
  save_csv(synth_toy(2), path);
  const ConceptDataset ds = load_csv(path, kToyTargets);
  EXPECT_EQ(ds.num_concepts(), 6u);
  EXPECT_NE(ds.provenance.find("elens_io_test.csv"), std::string::npos);
  std::filesystem::remove(path);
  EXPECT_THROW(load_csv(path, kToyTargets), DataError);
}

TEST(Discretize, TercilesOfOneToNine) {
  const std::vector<double> v{5, 1, 9, 3, 7, 2, 8, 4, 6};
  const DiscretizedColumns d = discretize("hr", v);
  ASSERT_EQ(d.names, (std::vector<std::string>{"hr_LOW", "hr_NORMAL", "hr_HIGH"}));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t want = v[i] <= 3 ? 0 : (v[i] <= 6 ? 1 : 2);
    for (std::size_t b = 0; b < 3; ++b) EXPECT_EQ(d.columns[b][i], b == want) << v[i];
  }
}

TEST(Discretize, BoundaryGoesToLowerBin) {
  // Sorted {1,2,3,4}: the 1/3 percentile falls exactly on 2.
  const DiscretizedColumns d = discretize("f", std::vector<double>{4, 3, 2, 1});
  EXPECT_EQ(d.columns[0], (BoolVector{0, 0, 1, 1}));
}

TEST(Discretize, ConstantColumnIsAllNormal) {
  const DiscretizedColumns d = discretize("f", std::vector<double>{2, 2, 2});
  EXPECT_TRUE(d.constant);
  EXPECT_EQ(d.names, (std::vector<std::string>{"f_NORMAL"}));
  EXPECT_EQ(d.columns[0], (BoolVector{1, 1, 1}));
}

TEST(Discretize, CsvExpandsOnlyNonBinaryColumns) {
  const ConceptDataset ds =
      parse("age,flag,t\n10,1,0\n20,0,1\n30,1,0\n40,0,1\n50,1,0\n60,0,1\n", {"t"}, true);
  EXPECT_EQ(ds.concept_names,
            (std::vector<std::string>{"age_LOW", "age_NORMAL", "age_HIGH", "flag"}));
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(ds.concepts(i, 0) + ds.concepts(i, 1) + ds.concepts(i, 2), 1.0);
  }
}

}  // namespace
}  // namespace elens
