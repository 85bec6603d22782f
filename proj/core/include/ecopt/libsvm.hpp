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

#ifndef ECOPT_LIBSVM_HPP
#define ECOPT_LIBSVM_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "ecopt/dataset.hpp"

namespace ecopt {

/// Parse LIBSVM text: "<label> idx:val idx:val ..." with 1-based, strictly
/// increasing indices. Labels {0, 1} map to {-1, +1}; any positive label is
/// +1 and any other is -1. Blank lines and '#' comments are skipped.
/// `dim` overrides the observed maximum index (must not be smaller).
/// Labels are not folded. Throws ParseError.
Dataset parse_libsvm(std::istream& in, std::optional<int> dim = std::nullopt);

/// Reads a plain or gzip-compressed LIBSVM file and folds labels.
Dataset load_libsvm(const std::filesystem::path& path,
                    std::optional<int> dim = std::nullopt);

}  // namespace ecopt

#endif  // ECOPT_LIBSVM_HPP
