/*
 * Copyright 2026 The ldpembed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef LDPEMBED_CLI_HPP_
#define LDPEMBED_CLI_HPP_

#include <ostream>

namespace ldpembed {

// Exit statuses of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitConfig = 2;

// Entry point of the `ldpembed` tool. Subcommands: embed, eval-node,
// eval-link, verify, sbm-gen. Results go to `out`, diagnostics to `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ldpembed

#endif  // LDPEMBED_CLI_HPP_
