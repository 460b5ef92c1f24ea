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

// Model files: an envelope with the overembedding spec, prescription report
// and training tail around a serialized stage-2 ensemble.

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "binary_io.hpp"
#include "json.hpp"
#include "treedox/errors.hpp"
#include "treedox/forecast.hpp"

namespace treedox::forecast {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'T', 'D', 'X', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kVersion = 1;

json envelope(const OverembeddingSpec& spec,
              const hyperparams::PrescriptionReport& report,
              const Matrix& tail) {
  std::vector<double> tail_values(tail.data().begin(), tail.data().end());
  return {{"format", "treedox.model"},
          {"version", kVersion},
          {"spec",
           {{"k", spec.k},
            {"xi", spec.xi},
            {"lead", spec.lead},
            {"selected_columns", *spec.selected_columns}}},
          {"report", json::parse(report.to_json(-1))},
          {"dim", tail.cols()},
          {"training_tail", std::move(tail_values)}};
}

struct Envelope {
  OverembeddingSpec spec;
  hyperparams::PrescriptionReport report;
  Matrix tail;
};

Envelope parse_envelope(const json& j) {
  if (j.value("format", "") != "treedox.model") {
    throw std::invalid_argument("model: not a treedox.model document");
  }
  if (j.at("version").get<std::uint32_t>() != kVersion) {
    throw std::invalid_argument("model: unsupported version " + j.at("version").dump());
  }
  Envelope e;
  const auto& s = j.at("spec");
  e.spec.k = s.at("k").get<std::size_t>();
  e.spec.xi = s.at("xi").get<std::size_t>();
  e.spec.lead = s.at("lead").get<std::size_t>();
  e.spec.selected_columns = s.at("selected_columns").get<std::vector<std::size_t>>();
  e.report = hyperparams::PrescriptionReport::from_json(j.at("report").dump());
  const auto dim = j.at("dim").get<std::size_t>();
  auto values = j.at("training_tail").get<std::vector<double>>();
  if (dim == 0 || values.size() % dim != 0) {
    throw std::invalid_argument("model: malformed training tail");
  }
  const std::size_t rows = values.size() / dim;
  e.tail = Matrix(rows, dim, std::move(values));
  return e;
}

}  // namespace

void TreeDoxModel::write(std::ostream& out) const {
  BinaryWriter w(out);
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.str(envelope(spec_, report_, tail_).dump());
  stage2_.write_binary(out);
  if (!out) throw std::runtime_error("model: write failed");
}

TreeDoxModel TreeDoxModel::read(std::istream& in) {
  BinaryReader r(in);
  char magic[sizeof kMagic];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw std::invalid_argument("model: bad magic (not a treedox model file)");
  }
  if (const auto v = r.u32(); v != kVersion) {
    throw std::invalid_argument("model: unsupported version " + std::to_string(v));
  }
  auto env = parse_envelope(json::parse(r.str()));
  auto stage2 = etr::EtrEnsemble::read_binary(in);
  return TreeDoxModel(std::move(env.spec), std::move(stage2), std::move(env.report),
                      std::move(env.tail));
}

std::string TreeDoxModel::to_json() const {
  json doc = envelope(spec_, report_, tail_);
  doc["stage2"] = json::parse(stage2_.to_json());
  return doc.dump();
}

TreeDoxModel TreeDoxModel::from_json(const std::string& text) {
  const json doc = json::parse(text);
  auto env = parse_envelope(doc);
  auto stage2 = etr::EtrEnsemble::from_json(doc.at("stage2").dump());
  return TreeDoxModel(std::move(env.spec), std::move(stage2), std::move(env.report),
                      std::move(env.tail));
}

void TreeDoxModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  if (path.extension() == ".json") {
    out << to_json();
  } else {
    write(out);
  }
  if (!out) throw IoError("write to " + path.string() + " failed");
}

TreeDoxModel TreeDoxModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (path.extension() == ".json") {
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
  }
  return read(in);
}

}  // namespace treedox::forecast
