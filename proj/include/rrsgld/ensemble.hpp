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

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rrsgld {

/// Worker count used by parallel_reduce when none is given: the hardware
/// concurrency, overridable with set_default_threads (0 restores the default).
unsigned default_threads();
void set_default_threads(unsigned threads);

/// Runs body(j, acc) for j in [0, count) on a worker pool and merges the
/// partial accumulators.
///
/// The index range is cut into a fixed number of contiguous chunks that does
/// not depend on the thread count; each chunk fills its own accumulator in
/// index order and the chunks are merged in chunk order. The result is
/// therefore bitwise identical for any number of threads.
template <class Acc, class MakeAcc, class Body>
Acc parallel_reduce(std::size_t count, MakeAcc make_acc, Body body, unsigned threads = 0) {
  constexpr std::size_t kMaxChunks = 64;
  const std::size_t chunks = std::max<std::size_t>(1, std::min(count, kMaxChunks));
  std::vector<Acc> partial;
  partial.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) partial.push_back(make_acc());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      const std::size_t begin = count * c / chunks;
      const std::size_t end = count * (c + 1) / chunks;
      try {
        for (std::size_t j = begin; j < end; ++j) body(j, partial[c]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };

  if (threads == 0) threads = default_threads();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  Acc result = std::move(partial.front());
  for (std::size_t c = 1; c < chunks; ++c) result.merge(partial[c]);
  return result;
}

}  // namespace rrsgld
