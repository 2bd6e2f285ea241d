// Copyright 2026 The rrsgld Authors
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

#include "rrsgld/ensemble.hpp"

namespace rrsgld {
namespace {
std::atomic<unsigned> g_threads{0};
}

unsigned default_threads() {
  const unsigned t = g_threads.load();
  if (t != 0) return t;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_threads(unsigned threads) { g_threads.store(threads); }

}  // namespace rrsgld
