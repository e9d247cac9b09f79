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


#ifndef WAVETRUNK_SRC_TRAIN_STREAMS_H_
#define WAVETRUNK_SRC_TRAIN_STREAMS_H_

#include <cstdint>

namespace wavetrunk::train {

// First coordinate of derive_seed() for each independent random stream.
enum Stream : std::uint64_t {
  kStreamTrunkInit = 1,
  kStreamHeadInit = 2,
  kStreamShuffle = 3,
  kStreamSample = 4,
  kStreamDropout = 5,
  kStreamEval = 6,
};

}  // namespace wavetrunk::train

#endif  // WAVETRUNK_SRC_TRAIN_STREAMS_H_
