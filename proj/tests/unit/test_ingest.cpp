// Copyright 2026 The TreeDOX Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "treedox/errors.hpp"
#include "treedox/ingest.hpp"
#include "treedox/random.hpp"

namespace treedox::ingest {
namespace {

MonthlySeries synthetic(YearMonth start, YearMonth end, std::uint64_t seed) {
  Rng rng(seed);
  MonthlySeries s{start, {}, "synthetic"};
  for (long i = start.index(); i <= end.index(); ++i) s.values.push_back(rng.normal());
  return s;
}

TEST(YearMonth, ParseFormatAndArithmetic) {
  const auto ym = YearMonth::parse("1984-01");
  EXPECT_EQ(ym.year, 1984);
  EXPECT_EQ(ym.month, 1);
  EXPECT_EQ(ym.to_string(), "1984-01");
  EXPECT_EQ(ym.plus(-1).to_string(), "1983-12");
  EXPECT_EQ(ym.plus(25).to_string(), "1986-02");
  EXPECT_LT(ym, ym.plus(1));
  EXPECT_THROW(YearMonth::parse("1984-13"), std::invalid_argument);
  EXPECT_THROW(YearMonth::parse("84-1"), std::invalid_argument);
}

TEST(ParseSoi, WideTwoRows) {
  std::istringstream in(
      "1866 -0.6 0.1 0.2 -1.1 0.3 0.5 0.2 -0.1 0.0 1.2 0.4 -0.3\n"
      "1867,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0,1.1,1.2\n");
  const auto s = parse_soi(in, SoiFormat::kWide);
  EXPECT_EQ(s.size(), 24u);
  EXPECT_EQ(s.start.to_string(), "1866-01");
  EXPECT_EQ(s.last().to_string(), "1867-12");
  EXPECT_DOUBLE_EQ(s.values[0], -0.6);
  EXPECT_DOUBLE_EQ(s.values[23], 1.2);
}

TEST(ParseSoi, WideTrailingMissingTrimmed) {
  std::istringstream in(
      "year jan feb mar apr may jun jul aug sep oct nov dec\n"
      "2023 1 2 3 4 5 6 7 -99.99 -99.99 -99.99 -99.99 -99.99\n");
  const auto s = parse_soi(in, SoiFormat::kWide);
  EXPECT_EQ(s.size(), 7u);
  EXPECT_EQ(s.last().to_string(), "2023-07");
}

TEST(ParseSoi, LongInteriorBlankIsDataError) {
  std::istringstream in("date,value\n2000-01,1.0\n2000-02,\n2000-03,0.5\n");
  try {
    parse_soi(in, SoiFormat::kLong);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParseSoi, LongGapIsParseError) {
  std::istringstream in("date,value\n2000-01,1.0\n2000-03,0.5\n");
  EXPECT_THROW(parse_soi(in, SoiFormat::kLong), ParseError);
}

TEST(ParseSoi, FormatNamesAreExplicit) {
  EXPECT_EQ(soi_format_from_string("wide"), SoiFormat::kWide);
  EXPECT_EQ(soi_format_from_string("long"), SoiFormat::kLong);
  EXPECT_THROW(soi_format_from_string("auto"), std::invalid_argument);
}

TEST(ParseSoi, MissingFileIsIoError) {
  EXPECT_THROW(load_soi("/nonexistent/soi.csv", SoiFormat::kLong), IoError);
}

TEST(SplitAt, HistoricalRecordSplit) {
  const auto s = synthetic({1866, 1}, {2023, 7}, 1);
  ASSERT_EQ(s.size(), 1891u);
  const auto [train, test] = split_at(s, {1984, 1});
  EXPECT_EQ(train.t_len(), 1416u);
  EXPECT_EQ(test.t_len(), 475u);
  EXPECT_EQ(train.data()(1415, 0), s.values[1415]);
  EXPECT_EQ(test.data()(0, 0), s.values[1416]);
}

TEST(SplitAt, Boundaries) {
  const auto s = synthetic({2000, 1}, {2001, 12}, 2);
  const auto [empty, all] = split_at(s, s.start);
  EXPECT_EQ(empty.t_len(), 0u);
  EXPECT_EQ(all.t_len(), 24u);
  const auto [most, one] = split_at(s, s.last());
  EXPECT_EQ(most.t_len(), 23u);
  EXPECT_EQ(one.t_len(), 1u);
  EXPECT_THROW(split_at(s, s.last().plus(1)), std::invalid_argument);
  for (long m = 0; m < 24; ++m) {
    const auto [a, b] = split_at(s, s.start.plus(m));
    EXPECT_EQ(a.t_len() + b.t_len(), 24u);
  }
}

TEST(LongCsv, RoundTripIsLossless) {
  auto s = synthetic({1950, 6}, {1960, 5}, 3);
  s.values[4] = 0.1 + 0.2;
  s.values[5] = std::nextafter(1.0, 2.0);
  std::stringstream buf;
  write_long_csv(buf, s);
  const auto back = parse_soi(buf, SoiFormat::kLong);
  EXPECT_EQ(back.start, s.start);
  EXPECT_EQ(back.values, s.values);
}

TEST(Numbers, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(0.1 + 0.2), "0.30000000000000004");
  EXPECT_EQ(parse_double("-1.25e-3"), -1.25e-3);
  EXPECT_THROW(parse_double("1,5"), std::invalid_argument);
  EXPECT_THROW(parse_double(""), std::invalid_argument);
}

TEST(SeriesCsv, RoundTripWithDt) {
  Matrix m(6, 2);
  Rng rng(4);
  for (double& v : m.data()) v = rng.normal();
  const TimeSeries s(m, 0.25);
  std::stringstream buf;
  write_series_csv(buf, s);
  EXPECT_EQ(buf.str().substr(0, 10), "time,x0,x1");
  const auto back = read_series_csv(buf);
  EXPECT_EQ(back.data(), m);
  ASSERT_TRUE(back.dt().has_value());
  EXPECT_DOUBLE_EQ(*back.dt(), 0.25);
}

TEST(SeriesCsv, MalformedRowReportsLine) {
  std::istringstream in("time,x0\n0,1.0\n1,abc\n");
  try {
    read_series_csv(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

}  // namespace
}  // namespace treedox::ingest
