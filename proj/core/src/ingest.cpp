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

#include "treedox/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>

#include "treedox/errors.hpp"

namespace treedox::ingest {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line, bool whitespace) {
  std::vector<std::string_view> out;
  if (!whitespace) {
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      out.push_back(trim(line.substr(pos, comma - pos)));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' ||
                                 line[pos] == ',' || line[pos] == '\r')) {
      ++pos;
    }
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' &&
           line[end] != ',' && line[end] != '\r') {
      ++end;
    }
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

bool is_missing_marker(std::string_view field) {
  field = trim(field);
  if (field.empty() || field == "NaN" || field == "nan" || field == "NA") return true;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) return false;
  return v == -99.99 || v == -999.0 || v == -999.9 || v == -9999.0;
}

struct RawMonth {
  YearMonth month;
  std::optional<double> value;
  std::size_t line;
};

MonthlySeries finish(std::vector<RawMonth> raw, const std::string& source) {
  MonthlySeries s;
  s.source = source;
  std::size_t end = raw.size();
  while (end > 0 && !raw[end - 1].value) --end;
  if (end == 0) throw DataError("no valid values in " + source, 0);
  for (std::size_t i = 0; i < end; ++i) {
    if (!raw[i].value) {
      throw DataError("missing value for " + raw[i].month.to_string() +
                          " before the end of the record",
                      raw[i].line);
    }
  }
  s.start = raw.front().month;
  s.values.reserve(end);
  for (std::size_t i = 0; i < end; ++i) s.values.push_back(*raw[i].value);
  return s;
}

void check_next(const std::vector<RawMonth>& raw, YearMonth ym, std::size_t line) {
  if (!raw.empty() && ym.index() != raw.back().month.index() + 1) {
    throw ParseError("month " + ym.to_string() + " does not follow " +
                         raw.back().month.to_string(),
                     line);
  }
}

}  // namespace

YearMonth YearMonth::from_index(long index) noexcept {
  long y = index / 12;
  long m = index % 12;
  if (m < 0) {
    m += 12;
    --y;
  }
  return {static_cast<int>(y), static_cast<int>(m + 1)};
}

std::string YearMonth::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

YearMonth YearMonth::parse(std::string_view text) {
  text = trim(text);
  constexpr std::size_t dash = 4;
  if (text.size() != 7 || text[dash] != '-') {
    throw std::invalid_argument("expected YYYY-MM, got '" + std::string(text) + "'");
  }
  YearMonth ym;
  const auto y = text.substr(0, dash);
  const auto m = text.substr(dash + 1);
  const auto ry = std::from_chars(y.data(), y.data() + y.size(), ym.year);
  const auto rm = std::from_chars(m.data(), m.data() + m.size(), ym.month);
  if (ry.ec != std::errc() || ry.ptr != y.data() + y.size() || rm.ec != std::errc() ||
      rm.ptr != m.data() + m.size() || ym.month < 1 || ym.month > 12) {
    throw std::invalid_argument("expected YYYY-MM, got '" + std::string(text) + "'");
  }
  return ym;
}

SoiFormat soi_format_from_string(const std::string& name) {
  if (name == "wide") return SoiFormat::kWide;
  if (name == "long") return SoiFormat::kLong;
  throw std::invalid_argument("unknown SOI format '" + name + "' (expected wide or long)");
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

MonthlySeries parse_soi(std::istream& in, SoiFormat format, const std::string& source) {
  std::vector<RawMonth> raw;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;

    if (format == SoiFormat::kLong) {
      const auto fields = split_fields(t, false);
      YearMonth ym;
      try {
        ym = YearMonth::parse(fields[0]);
      } catch (const std::invalid_argument&) {
        if (!header_seen && raw.empty()) {
          header_seen = true;
          continue;
        }
        throw ParseError("bad date field '" + std::string(fields[0]) + "'", line_no);
      }
      if (fields.size() > 2) throw ParseError("expected 2 fields", line_no);
      check_next(raw, ym, line_no);
      RawMonth r{ym, std::nullopt, line_no};
      if (fields.size() == 2 && !is_missing_marker(fields[1])) {
        try {
          r.value = parse_double(fields[1]);
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), line_no);
        }
        if (!std::isfinite(*r.value)) r.value.reset();
      }
      raw.push_back(r);
      continue;
    }

    const auto fields = split_fields(t, true);
    int year = 0;
    const auto f0 = fields[0];
    const auto ry = std::from_chars(f0.data(), f0.data() + f0.size(), year);
    if (ry.ec != std::errc() || ry.ptr != f0.data() + f0.size()) {
      if (!header_seen && raw.empty()) {
        header_seen = true;
        continue;
      }
      throw ParseError("bad year field '" + std::string(f0) + "'", line_no);
    }
    if (fields.size() > 13) throw ParseError("more than 12 monthly values", line_no);
    for (int m = 1; m <= 12; ++m) {
      const YearMonth ym{year, m};
      if (m == 1) check_next(raw, ym, line_no);
      RawMonth r{ym, std::nullopt, line_no};
      if (static_cast<std::size_t>(m) < fields.size() && !is_missing_marker(fields[m])) {
        try {
          r.value = parse_double(fields[m]);
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), line_no);
        }
        if (!std::isfinite(*r.value)) r.value.reset();
      }
      raw.push_back(r);
    }
  }
  if (raw.empty()) throw ParseError("no data rows in " + source, 0);
  return finish(std::move(raw), source);
}

MonthlySeries load_soi(const std::filesystem::path& path, SoiFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_soi(in, format, path.string());
}

std::pair<TimeSeries, TimeSeries> split_at(const MonthlySeries& series,
                                           YearMonth boundary) {
  const long offset = boundary.index() - series.start.index();
  if (offset < 0 || offset >= static_cast<long>(series.size())) {
    throw std::invalid_argument("split_at: boundary " + boundary.to_string() +
                                " outside " + series.start.to_string() + ".." +
                                series.last().to_string());
  }
  const auto cut = series.values.begin() + offset;
  std::vector<double> train(series.values.begin(), cut);
  std::vector<double> test(cut, series.values.end());
  return {train.empty() ? TimeSeries() : TimeSeries::scalar(train),
          TimeSeries::scalar(test)};
}

void write_long_csv(std::ostream& out, const MonthlySeries& series) {
  out << "date,value\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.start.plus(static_cast<long>(i)).to_string() << ','
        << format_double(series.values[i]) << '\n';
  }
}

void write_long_csv(const std::filesystem::path& path, const MonthlySeries& series) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_long_csv(out, series);
  if (!out) throw IoError("write to " + path.string() + " failed");
}

void write_series_csv(std::ostream& out, const TimeSeries& series) {
  out << "time";
  for (std::size_t d = 0; d < series.dim(); ++d) out << ",x" << d;
  out << '\n';
  const auto dt = series.dt();
  for (std::size_t i = 0; i < series.t_len(); ++i) {
    const double t = dt ? static_cast<double>(i) * *dt : static_cast<double>(i);
    out << format_double(t);
    for (double v : series.state(i)) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_series_csv(out, series);
  if (!out) throw IoError("write to " + path.string() + " failed");
}

TimeSeries read_series_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool time_col = false;
  bool date_col = false;
  std::size_t width = 0;
  std::vector<double> values;
  std::vector<double> times;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_fields(t, false);
    if (first) {
      first = false;
      bool numeric = true;
      try {
        parse_double(fields[0]);
      } catch (const std::invalid_argument&) {
        numeric = false;
      }
      if (!numeric) {
        time_col = fields[0] == "time" || fields[0] == "t";
        date_col = fields[0] == "date";
        width = fields.size() - ((time_col || date_col) ? 1 : 0);
        if (width == 0) throw ParseError("header has no value columns", line_no);
        continue;
      }
      width = fields.size();
    }
    const std::size_t skip = (time_col || date_col) ? 1 : 0;
    if (fields.size() != width + skip) {
      throw ParseError("expected " + std::to_string(width + skip) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    try {
      if (time_col) times.push_back(parse_double(fields[0]));
      for (std::size_t c = skip; c < fields.size(); ++c) {
        const double v = parse_double(fields[c]);
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite value");
        values.push_back(v);
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (values.empty()) throw ParseError("no data rows", 0);
  std::optional<double> dt;
  if (times.size() >= 2) {
    const double step = times[1] - times[0];
    bool uniform = step > 0.0;
    for (std::size_t i = 1; uniform && i < times.size(); ++i) {
      const double expect = times[0] + static_cast<double>(i) * step;
      uniform = std::abs(times[i] - expect) <= 1e-9 * std::max(1.0, std::abs(expect));
    }
    if (uniform) dt = step;
  }
  const std::size_t rows = values.size() / width;
  return TimeSeries(Matrix(rows, width, std::move(values)), dt);
}

TimeSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_series_csv(in);
}

}  // namespace treedox::ingest
