// Copyright 2026 The WaveTrunk Authors
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


// The `wavetrunk` command line: train, pretrain, finetune, evaluate, synth
// and verify.
//
// Exit codes: 0 success, 1 runtime failure or failed checks, 2 invalid
// arguments or configuration, 3 unreadable or malformed data.

#ifndef WAVETRUNK_TOOLS_CLI_COMMANDS_H_
#define WAVETRUNK_TOOLS_CLI_COMMANDS_H_

#include <ostream>
#include <string>
#include <vector>

namespace wavetrunk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

// `args` excludes the program name. Results go to `out`, diagnostics to
// `err` and the log.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Applies WAVETRUNK_LOG (trace, debug, info, warn, error, off) to the
// process-wide logger, which writes to stderr.
void configure_logging();

}  // namespace wavetrunk::cli

#endif  // WAVETRUNK_TOOLS_CLI_COMMANDS_H_
