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

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace rrsgld {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a child seed from a root seed and a path of stream labels, so
/// that e.g. (seed, kNoise, realization 17) and (seed, kBatch, 17) give
/// unrelated generators.
constexpr std::uint64_t derive_seed(std::uint64_t root,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(root);
  for (std::uint64_t p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

namespace stream {
inline constexpr std::uint64_t kBatch = 1;
inline constexpr std::uint64_t kNoise = 2;
inline constexpr std::uint64_t kData = 3;
inline constexpr std::uint64_t kInit = 4;
inline constexpr std::uint64_t kHmc = 5;
inline constexpr std::uint64_t kProbe = 6;
}  // namespace stream

/// Source of i.i.d. standard normal vectors for the Langevin noise.
/// Copyable: two copies replay identical noise, which is how synchronously
/// coupled chains share it.
class NoiseStream {
 public:
  NoiseStream() : NoiseStream(0) {}
  explicit NoiseStream(std::uint64_t seed) : engine_(seed) {}

  void fill(std::span<double> out) {
    for (double& v : out) v = normal_(engine_);
  }

  double next() { return normal_(engine_); }

 private:
  Engine engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace rrsgld
