// bench_kernels.cpp
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
//
// Parallel kernels against their serial reference implementations, at the
// shapes the desk-profile network actually runs.

#include <benchmark/benchmark.h>

#include "vivet/common.hpp"
#include "vivet/kernels.hpp"
#include "vivet/reference_kernels.hpp"
#include "vivet/tensor.hpp"

namespace {

using vivet::RandomStream;

std::vector<float> RandomVec(size_t n, uint64_t seed) {
  RandomStream rng(seed);
  std::vector<float> v(n);
  for (auto &x : v) x = static_cast<float>(rng.Normal());
  return v;
}

// Desk stem shape: [32, 1, 64, 98] -> [32, 4, 64, 98] with 3x3 kernels.
constexpr int kN = 32, kCin = 4, kCout = 8, kH = 32, kW = 49, kK = 3;

void BenchConv2dForward(benchmark::State &state) {
  vivet::SetNumThreads(static_cast<int>(state.range(0)));
  auto in = RandomVec(static_cast<size_t>(kN) * kCin * kH * kW, 1);
  auto wt = RandomVec(static_cast<size_t>(kCout) * kCin * kK * kK, 2);
  int ho = vivet::ConvOutSize(kH, kK, 1, 1), wo = vivet::ConvOutSize(kW, kK, 1, 1);
  std::vector<float> out(static_cast<size_t>(kN) * kCout * ho * wo);
  for (auto _ : state) {
    vivet::kern::Conv2dForward(in.data(), kN, kCin, kH, kW, wt.data(), kCout,
                               kK, kK, 1, 1, out.data(), ho, wo);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BenchConv2dForward)->Arg(1)->Arg(2)->Arg(4);

void BenchConv2dForwardReference(benchmark::State &state) {
  auto in = RandomVec(static_cast<size_t>(kN) * kCin * kH * kW, 1);
  auto wt = RandomVec(static_cast<size_t>(kCout) * kCin * kK * kK, 2);
  int ho = vivet::ConvOutSize(kH, kK, 1, 1), wo = vivet::ConvOutSize(kW, kK, 1, 1);
  std::vector<float> out(static_cast<size_t>(kN) * kCout * ho * wo);
  for (auto _ : state) {
    vivet::refkern::Conv2dForward(in.data(), kN, kCin, kH, kW, wt.data(),
                                  kCout, kK, kK, 1, 1, out.data(), ho, wo);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BenchConv2dForwardReference);

void BenchBatchNormForward(benchmark::State &state) {
  vivet::SetNumThreads(static_cast<int>(state.range(0)));
  auto in = RandomVec(static_cast<size_t>(kN) * kCout * kH * kW, 3);
  std::vector<float> gamma(kCout, 1.0f), beta(kCout, 0.0f);
  std::vector<float> out(in.size()), mean(kCout), var(kCout), xhat(in.size());
  for (auto _ : state) {
    vivet::kern::BatchNormForwardTrain(in.data(), kN, kCout, kH, kW,
                                       gamma.data(), beta.data(), 1e-5,
                                       out.data(), mean.data(), var.data(),
                                       xhat.data());
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BenchBatchNormForward)->Arg(1)->Arg(2)->Arg(4);

void BenchBatchNormForwardReference(benchmark::State &state) {
  auto in = RandomVec(static_cast<size_t>(kN) * kCout * kH * kW, 3);
  std::vector<float> gamma(kCout, 1.0f), beta(kCout, 0.0f);
  std::vector<float> out(in.size()), mean(kCout), var(kCout), xhat(in.size());
  for (auto _ : state) {
    vivet::refkern::BatchNormForwardTrain(in.data(), kN, kCout, kH, kW,
                                          gamma.data(), beta.data(), 1e-5,
                                          out.data(), mean.data(), var.data(),
                                          xhat.data());
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BenchBatchNormForwardReference);

void BenchGspForward(benchmark::State &state) {
  vivet::SetNumThreads(static_cast<int>(state.range(0)));
  auto in = RandomVec(static_cast<size_t>(kN) * kCout * kH * kW, 4);
  std::vector<float> out(static_cast<size_t>(kN) * 2 * kCout);
  std::vector<float> mu(static_cast<size_t>(kN) * kCout), sg(mu.size());
  for (auto _ : state) {
    vivet::kern::GspForward(in.data(), kN, kCout, kH, kW, out.data(),
                            mu.data(), sg.data());
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BenchGspForward)->Arg(1)->Arg(2)->Arg(4);

void BenchGspForwardReference(benchmark::State &state) {
  auto in = RandomVec(static_cast<size_t>(kN) * kCout * kH * kW, 4);
  std::vector<float> out(static_cast<size_t>(kN) * 2 * kCout);
  std::vector<float> mu(static_cast<size_t>(kN) * kCout), sg(mu.size());
  for (auto _ : state) {
    vivet::refkern::GspForward(in.data(), kN, kCout, kH, kW, out.data(),
                               mu.data(), sg.data());
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BenchGspForwardReference);

}  // namespace

BENCHMARK_MAIN();
