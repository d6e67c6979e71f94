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
#ifndef LDPEMBED_RNG_HPP_
#define LDPEMBED_RNG_HPP_

#include <cstdint>
#include <limits>

namespace ldpembed {

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a child seed from a parent seed and a tag; used to give every run,
// split and trial its own independent master seed.
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t tag) {
  return Mix64(Mix64(seed ^ 0x6a09e667f3bcc908ULL) + Mix64(tag + 0x9e3779b97f4a7c15ULL));
}

// Counter-based random stream keyed by (master seed, substream id).
//
// Draw i of a stream is Mix64(key + (i + 1) * golden_gamma), so the value
// depends only on (seed, substream, i) and never on thread scheduling.
// Satisfies UniformRandomBitGenerator, but the library draws through
// Uniform() and friends below so outputs are identical across standard
// library implementations.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t substream)
      : seed_(seed), substream_(substream), key_(DeriveSeed(seed, substream)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return Mix64(key_ + (++counter_) * kGamma); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
  std::uint64_t UniformInt(std::uint64_t bound);

  // Zero-mean Laplace with the given scale, by inverse CDF.
  double Laplace(double scale);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t substream() const { return substream_; }
  std::uint64_t draws() const { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t seed_;
  std::uint64_t substream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ldpembed

#endif  // LDPEMBED_RNG_HPP_
