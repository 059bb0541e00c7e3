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
//
// Copyright 2026 The pivotsmith Authors.
//
// Entry point of the pivotsmith command line tool, kept separate from main()
// so tests can drive it in-process.

#ifndef PIVOTSMITH_CLI_HPP_
#define PIVOTSMITH_CLI_HPP_

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace pivotsmith::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name. "-" (or an omitted file flag) reads
// `in` / writes `out`.
int run(const std::vector<std::string> &args, std::istream &in, std::ostream &out,
        std::ostream &err);

}  // namespace pivotsmith::cli

#endif  // PIVOTSMITH_CLI_HPP_
