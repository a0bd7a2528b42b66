// Copyright 2026 The Offspan Authors
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

#ifndef OFFSPAN_RNG_H_
#define OFFSPAN_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace offspan {

// Derives a child seed from a parent seed and a stage name, so every stage
// of a run can be replayed in isolation.
std::uint64_t DeriveSeed(std::uint64_t parent, std::string_view name);
std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t index);

// std::mt19937_64 with draws whose results do not depend on the standard
// library's distribution implementations (those are unspecified).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform();
  // Uniform integer in [0, n). n must be > 0.
  std::size_t Below(std::size_t n);
  bool Bernoulli(double p) { return Uniform() < p; }
  // k distinct indices of [0, n), uniformly chosen, in selection order.
  std::vector<std::size_t> Choose(std::size_t n, std::size_t k);
  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[Below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace offspan

#endif  // OFFSPAN_RNG_H_
