// vivet/common.hpp
//
// Copyright 2026  The vivet authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef VIVET_COMMON_HPP_
#define VIVET_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <exception>
#include <initializer_list>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vivet {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

inline void Require(bool cond, const std::string &msg) {
  if (!cond) throw Error(msg);
}

// SplitMix64 finalizer; used both as a hash mixer and to expand seeds.
inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t Fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Order-sensitive combination of seed components.
inline uint64_t MixSeed(std::initializer_list<uint64_t> parts) {
  uint64_t h = 0x243f6a8885a308d3ULL;
  for (uint64_t p : parts) h = SplitMix64(h ^ p);
  return h;
}

// Deterministic random stream.  The engine is std::mt19937_64 (bit-exact by
// the standard); all distributions are hand-rolled on top of it so draws are
// identical across compilers and platforms.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : engine_(SplitMix64(seed)) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1).
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n).
  uint64_t UniformInt(uint64_t n) {
    Require(n > 0, "RandomStream::UniformInt: n must be positive");
    // Rejection sampling to avoid modulo bias.
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform integer in [lo, hi] inclusive.
  int64_t UniformIntRange(int64_t lo, int64_t hi) {
    Require(lo <= hi, "RandomStream::UniformIntRange: empty range");
    return lo + static_cast<int64_t>(UniformInt(static_cast<uint64_t>(hi - lo + 1)));
  }

  // Standard normal via Box-Muller (no cached spare; deterministic).
  double Normal() {
    double u1 = Uniform();
    double u2 = Uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<size_t> SampleDistinct(size_t n, size_t k) {
    Require(k <= n, "RandomStream::SampleDistinct: k exceeds population");
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<size_t> out;
    out.reserve(k);
    for (size_t i = 0; i < k; ++i) {
      size_t j = i + static_cast<size_t>(UniformInt(n - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

  template <typename T>
  void Shuffle(std::vector<T> *v) {
    for (size_t i = v->size(); i > 1; --i) {
      size_t j = static_cast<size_t>(UniformInt(i));
      std::swap((*v)[i - 1], (*v)[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Number of worker threads for the parallel kernels.  0 means "library
// default" (whatever OpenMP picks).  Set from the CLI --threads flag.
void SetNumThreads(int n);
int GetNumThreads();

// Runs fn(i) for i in [begin, end).  Iterations must be independent; each
// index is handled by exactly one thread so floating-point results do not
// depend on the thread count.  An exception thrown by any iteration is
// rethrown after the loop (the first one by index wins); letting it escape
// the parallel region directly would terminate the process.
template <typename Fn>
void ParallelFor(int64_t begin, int64_t end, Fn &&fn) {
#ifdef _OPENMP
  std::exception_ptr first_error = nullptr;
  int64_t first_error_index = end;
#pragma omp parallel for schedule(static)
  for (int64_t i = begin; i < end; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(vivet_parallel_for_error)
      if (i < first_error_index) {
        first_error_index = i;
        first_error = std::current_exception();
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
#else
  for (int64_t i = begin; i < end; ++i) fn(i);
#endif
}

template <typename T>
std::string ToString(const T &v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace vivet

#endif  // VIVET_COMMON_HPP_
