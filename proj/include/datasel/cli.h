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

// Batch front end: `datasel {select,diagnose,sweep,gram} [flags]`.
// Flags may also come from a flat key=value file passed with --config;
// explicit flags win over the file.

#ifndef DATASEL_CLI_H_
#define DATASEL_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace datasel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// `args` excludes the program name. Diagnostics go to `err`; a short
// confirmation of the files written goes to `out`.
int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err);

}  // namespace datasel::cli

#endif  // DATASEL_CLI_H_
