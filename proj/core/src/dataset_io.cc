// Copyright 2026 The maskdl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maskdl/dataset_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "maskdl/error.h"

namespace maskdl {
namespace {

static_assert(std::endian::native == std::endian::little,
              "dataset payload encoding assumes a little-endian host");

constexpr const char* kMagic = "MASKDL-DATASET";

class PayloadWriter {
 public:
  void f64(double v) { append(&v, sizeof v); }
  void u64(std::uint64_t v) { append(&v, sizeof v); }
  void vec(const Vector& v) { append(v.data(), sizeof(double) * v.size()); }
  const std::string& bytes() const { return buf_; }

 private:
  void append(const void* p, std::size_t n) {
    buf_.append(static_cast<const char*>(p), n);
  }
  std::string buf_;
};

class PayloadReader {
 public:
  explicit PayloadReader(const std::string& buf) : buf_(buf) {}
  double f64() {
    double v;
    take(&v, sizeof v);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    take(&v, sizeof v);
    return v;
  }
  void vec(Vector& v) { take(v.data(), sizeof(double) * v.size()); }
  bool exhausted() const { return pos_ == buf_.size(); }

 private:
  void take(void* dst, std::size_t n) {
    if (buf_.size() - pos_ < n) throw ParseError("dataset payload is truncated");
    std::memcpy(dst, buf_.data() + pos_, n);
    pos_ += n;
  }
  const std::string& buf_;
  std::size_t pos_ = 0;
};

void write_sample(PayloadWriter& w, const Sample& s) {
  w.vec(s.y);
  w.vec(s.eps_true);
  w.u64(s.z_true.nnz());
  for (std::size_t i = 0; i < s.z_true.nnz(); ++i) {
    w.u64(s.z_true.support()[i]);
    w.f64(s.z_true.values()[i]);
  }
}

Sample read_sample(PayloadReader& r, std::size_t d, std::size_t p) {
  Sample s;
  s.y.resize(static_cast<Index>(d));
  s.eps_true.resize(static_cast<Index>(d));
  r.vec(s.y);
  r.vec(s.eps_true);
  const std::uint64_t nnz = r.u64();
  if (nnz > p) throw ParseError("sample code has more nonzeros than atoms");
  std::vector<std::size_t> support(nnz);
  std::vector<double> values(nnz);
  for (std::uint64_t i = 0; i < nnz; ++i) {
    support[i] = static_cast<std::size_t>(r.u64());
    values[i] = r.f64();
  }
  try {
    s.z_true = SparseVector(p, std::move(support), std::move(values));
  } catch (const ContractError& e) {
    throw ParseError(std::string("invalid sample code: ") + e.what());
  }
  return s;
}

template <typename T>
T header_field(const nlohmann::json& header, const char* key) {
  if (!header.contains(key)) {
    throw ParseError(std::string("dataset header is missing '") + key + "'");
  }
  try {
    return header.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("dataset header field '") + key +
                     "' has the wrong type");
  }
}

}  // namespace

void write_dataset(const Dataset& ds, std::ostream& out) {
  const GroundTruthModel& m = ds.model;
  PayloadWriter w;
  for (Index j = 0; j < m.A.cols(); ++j) {
    for (Index i = 0; i < m.A.rows(); ++i) w.f64(m.A(i, j));
  }
  for (const Sample& s : ds.samples) write_sample(w, s);
  for (const Sample& s : ds.holdout) write_sample(w, s);

  nlohmann::json header = {
      {"schema_version", kDatasetSchemaVersion},
      {"d", m.d()},
      {"p", m.p()},
      {"k", m.k},
      {"sigma_z", m.sigma_z},
      {"normalize_codes", m.normalize_codes},
      {"noise_var", m.noise_var},
      {"seed", ds.seed},
      {"stream_id", ds.stream_id},
      {"n", ds.samples.size()},
      {"n_holdout", ds.holdout.size()},
      {"support_dist", to_string(m.support_dist)},
      {"encoding", "f64le"},
      {"payload_bytes", w.bytes().size()},
  };
  out << kMagic << '\n' << header.dump() << '\n';
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw IoError("failed writing dataset");
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_dataset(ds, out);
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Dataset read_dataset(std::istream& in) {
  std::string magic;
  if (!std::getline(in, magic) || magic != kMagic) {
    throw ParseError("not a maskdl dataset (bad magic line)");
  }
  std::string header_line;
  if (!std::getline(in, header_line)) throw ParseError("dataset header missing");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("dataset header is not valid JSON: ") + e.what());
  }
  if (!header.is_object()) throw ParseError("dataset header must be an object");

  const int version = header_field<int>(header, "schema_version");
  if (version != kDatasetSchemaVersion) {
    throw SchemaVersionError(version, kDatasetSchemaVersion);
  }
  if (header_field<std::string>(header, "encoding") != "f64le") {
    throw ParseError("unsupported payload encoding");
  }
  const auto d = header_field<std::size_t>(header, "d");
  const auto p = header_field<std::size_t>(header, "p");
  const auto n = header_field<std::size_t>(header, "n");
  const auto n_holdout = header_field<std::size_t>(header, "n_holdout");
  const auto payload_bytes = header_field<std::size_t>(header, "payload_bytes");

  std::string payload(std::istreambuf_iterator<char>(in), {});
  if (payload.size() != payload_bytes) {
    throw ParseError("dataset payload has " + std::to_string(payload.size()) +
                     " bytes, header declares " + std::to_string(payload_bytes));
  }

  Dataset ds;
  GroundTruthModel& m = ds.model;
  m.k = header_field<std::size_t>(header, "k");
  m.sigma_z = header_field<double>(header, "sigma_z");
  m.normalize_codes = header_field<bool>(header, "normalize_codes");
  m.noise_var = header_field<double>(header, "noise_var");
  try {
    m.support_dist = support_distribution_from_string(
        header_field<std::string>(header, "support_dist"));
  } catch (const ContractError& e) {
    throw ParseError(e.what());
  }
  ds.seed = header_field<std::uint64_t>(header, "seed");
  ds.stream_id = header_field<std::uint64_t>(header, "stream_id");

  PayloadReader r(payload);
  m.A.resize(static_cast<Index>(d), static_cast<Index>(p));
  for (Index j = 0; j < m.A.cols(); ++j) {
    for (Index i = 0; i < m.A.rows(); ++i) m.A(i, j) = r.f64();
  }
  ds.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ds.samples.push_back(read_sample(r, d, p));
  ds.holdout.reserve(n_holdout);
  for (std::size_t i = 0; i < n_holdout; ++i) ds.holdout.push_back(read_sample(r, d, p));
  if (!r.exhausted()) throw ParseError("dataset payload has trailing bytes");

  try {
    m.validate();
  } catch (const ContractError& e) {
    throw ParseError(std::string("dataset model is invalid: ") + e.what());
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_dataset(in);
}

}  // namespace maskdl
