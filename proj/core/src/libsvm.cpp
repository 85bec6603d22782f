// Copyright 2026 The ecopt Authors. All Rights Reserved.
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
// =============================================================================

#include "ecopt/libsvm.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

#include <zlib.h>

#include "ecopt/errors.hpp"

namespace ecopt {

namespace {

bool parse_real(std::string_view token, double& out) {
  if (token.empty()) return false;
  std::string copy(token);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(copy.c_str(), &end);
  return end == copy.c_str() + copy.size() && errno != ERANGE && std::isfinite(out);
}

bool parse_index(std::string_view token, long long& out) {
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace

Dataset parse_libsvm(std::istream& in, std::optional<int> dim) {
  Dataset data;
  int max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream tokens(line);
    std::string token;
    if (!(tokens >> token)) continue;

    double label = 0.0;
    if (!parse_real(token, label)) throw ParseError(line_no, "bad label '" + token + "'");
    SparseRow row;
    long long last = 0;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos)
        throw ParseError(line_no, "expected index:value, got '" + token + "'");
      long long index = 0;
      double value = 0.0;
      if (!parse_index(std::string_view(token).substr(0, colon), index))
        throw ParseError(line_no, "bad index in '" + token + "'");
      if (index < 1) throw ParseError(line_no, "indices are 1-based, got " + std::to_string(index));
      if (index <= last)
        throw ParseError(line_no, "indices must be strictly increasing at " + std::to_string(index));
      if (index > std::numeric_limits<std::int32_t>::max())
        throw ParseError(line_no, "index too large");
      if (!parse_real(std::string_view(token).substr(colon + 1), value))
        throw ParseError(line_no, "bad value in '" + token + "'");
      last = index;
      if (value == 0.0) continue;
      row.indices.push_back(static_cast<std::int32_t>(index - 1));
      row.values.push_back(value);
    }
    max_index = std::max(max_index, static_cast<int>(last));
    data.rows.push_back(std::move(row));
    data.labels.push_back(label > 0.0 ? 1.0 : -1.0);
  }
  if (dim) {
    if (*dim < max_index)
      throw DimensionMismatch("dimension " + std::to_string(*dim) +
                              " is smaller than the largest index " + std::to_string(max_index));
    data.dim = *dim;
  } else {
    data.dim = max_index;
  }
  return data;
}

Dataset load_libsvm(const std::filesystem::path& path, std::optional<int> dim) {
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (!file) throw ConfigError("cannot open dataset " + path.string());
  std::string text;
  char buffer[1 << 16];
  int got = 0;
  while ((got = gzread(file, buffer, sizeof buffer)) > 0) text.append(buffer, got);
  int errnum = 0;
  const char* message = gzerror(file, &errnum);
  const bool failed = got < 0 || (errnum != Z_OK && errnum != Z_STREAM_END);
  const std::string reason = failed && message ? message : "";
  gzclose(file);
  if (failed) throw ConfigError("cannot read dataset " + path.string() + ": " + reason);

  std::istringstream in(std::move(text));
  Dataset data = parse_libsvm(in, dim);
  data.fold_labels();
  return data;
}

}  // namespace ecopt
