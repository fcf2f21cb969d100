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

// Dataset container, schema version 1:
//
//   MASKDL-DATASET\n
//   {"schema_version":1,"d":..,"p":..,"k":..,"sigma_z":..,
//    "normalize_codes":..,"noise_var":..,"seed":..,"stream_id":..,
//    "n":..,"n_holdout":..,"support_dist":"uniform",
//    "encoding":"f64le","payload_bytes":..}\n
//   <payload>
//
// The payload is little-endian: A as d*p float64 in column-major order, then
// n + n_holdout sample records, each
//   y[d] float64, eps[d] float64, nnz uint64, nnz x (index uint64, value float64).
// Values are stored bit-for-bit, so a round trip is exact.

#ifndef MASKDL_DATASET_IO_H_
#define MASKDL_DATASET_IO_H_

#include <filesystem>
#include <iosfwd>

#include "maskdl/data_model.h"

namespace maskdl {

inline constexpr int kDatasetSchemaVersion = 1;

void save_dataset(const Dataset& ds, const std::filesystem::path& path);
void write_dataset(const Dataset& ds, std::ostream& out);

/// Throws IoError when the file cannot be opened, SchemaVersionError on a
/// version mismatch and ParseError on any malformed or truncated content.
/// Never returns a partially filled Dataset.
Dataset load_dataset(const std::filesystem::path& path);
Dataset read_dataset(std::istream& in);

}  // namespace maskdl

#endif  // MASKDL_DATASET_IO_H_
