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

// Text input and output: monthly index files (Southern Oscillation Index
// layouts) and the canonical time-series CSV.

#ifndef TREEDOX_INGEST_HPP_
#define TREEDOX_INGEST_HPP_

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "treedox/embedding.hpp"

namespace treedox::ingest {

struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12

  [[nodiscard]] long index() const noexcept { return 12L * year + (month - 1); }
  static YearMonth from_index(long index) noexcept;
  [[nodiscard]] YearMonth plus(long months) const noexcept {
    return from_index(index() + months);
  }
  // "YYYY-MM"
  [[nodiscard]] std::string to_string() const;
  // Parses "YYYY-MM"; throws std::invalid_argument.
  static YearMonth parse(std::string_view text);

  friend auto operator<=>(const YearMonth& a, const YearMonth& b) noexcept {
    return a.index() <=> b.index();
  }
  friend bool operator==(const YearMonth&, const YearMonth&) noexcept = default;
};

struct MonthlySeries {
  YearMonth start;
  std::vector<double> values;  // contiguous months, all finite
  std::string source;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  // Month of the last value; start.plus(-1) when empty.
  [[nodiscard]] YearMonth last() const noexcept {
    return start.plus(static_cast<long>(values.size()) - 1);
  }
};

// kWide: rows "year v1 .. v12" (whitespace or comma separated).
// kLong: CSV "YYYY-MM,value" with a header row.
enum class SoiFormat { kWide, kLong };
SoiFormat soi_format_from_string(const std::string& name);

// Missing markers (-99.99, -999, -999.9, NaN or a blank field) at the end of
// the record are trimmed. Throws IoError if the file cannot be read,
// ParseError (with line number) on malformed or non-contiguous rows and
// DataError on a missing value before the last valid month.
MonthlySeries load_soi(const std::filesystem::path& path, SoiFormat format);
MonthlySeries parse_soi(std::istream& in, SoiFormat format,
                        const std::string& source = "");

// train = months strictly before `boundary`, test = boundary onward. The
// boundary may equal the first month (empty train) or the last month; beyond
// that throws std::invalid_argument. An empty side is a default TimeSeries.
std::pair<TimeSeries, TimeSeries> split_at(const MonthlySeries& series,
                                           YearMonth boundary);

// Canonical long CSV: header "date,value", one "YYYY-MM,value" row per month,
// values in shortest round-trip form.
void write_long_csv(std::ostream& out, const MonthlySeries& series);
void write_long_csv(const std::filesystem::path& path, const MonthlySeries& series);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
// Locale-independent parse of the whole field; throws std::invalid_argument.
double parse_double(std::string_view text);

// Time-series CSV with header "time,x0,..,x{D-1}". The time column is
// i * dt when the series has a dt, else the row index.
void write_series_csv(std::ostream& out, const TimeSeries& series);
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series);

// Reads a series CSV. A leading "time" or "date" column is dropped; a
// uniform numeric time column sets dt. Throws IoError / ParseError.
TimeSeries read_series_csv(const std::filesystem::path& path);
TimeSeries read_series_csv(std::istream& in);

}  // namespace treedox::ingest

#endif  // TREEDOX_INGEST_HPP_
