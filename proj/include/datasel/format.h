// Copyright 2026 The Authors.
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

#ifndef DATASEL_FORMAT_H_
#define DATASEL_FORMAT_H_

#include <string>

namespace datasel {

// "%.17g"; enough digits to round-trip any double.
std::string FormatDouble(double value);

// Writes to a sibling temporary file and renames it over `path`.
void WriteFileAtomic(const std::string& path, const std::string& content);

std::string ReadFile(const std::string& path);

}  // namespace datasel

#endif  // DATASEL_FORMAT_H_
