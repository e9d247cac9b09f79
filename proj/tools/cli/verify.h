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


// Self-checks behind `wavetrunk verify`: finite-difference gradient checks,
// DSP invariants and model/metric properties. Each check prints one
// machine-readable line.

#ifndef WAVETRUNK_TOOLS_CLI_VERIFY_H_
#define WAVETRUNK_TOOLS_CLI_VERIFY_H_

#include <cstdint>
#include <string>
#include <vector>

namespace wavetrunk::cli {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  // Test hook: perturbs the analytic gradient of this gradcheck op.
  std::string corrupt_op;
};

// gradcheck, dsp, props.
const std::vector<std::string>& verify_suites();

// Runs one suite, or every suite for "all". Throws ConfigError for an
// unknown suite name.
std::vector<CheckResult> run_verify(const std::string& suite,
                                    const VerifyOptions& options);

// `check suite=<s> name=<n> result=pass|fail seconds=<t> <detail>`
std::string format_check(const CheckResult& r);

}  // namespace wavetrunk::cli

#endif  // WAVETRUNK_TOOLS_CLI_VERIFY_H_
