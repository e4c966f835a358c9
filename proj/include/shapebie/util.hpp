// Copyright (c) 2026 the shapebie authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace shapebie {

// xorshift64* generator (documented in docs/config.md). Used wherever a run
// must be reproducible across platforms; never use std:: engines for outputs
// that land in reports.
class XorShift64Star {
  public:
    explicit XorShift64Star(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {}

    std::uint64_t next() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1Dull;
    }

    // uniform in [0,1), 53 mantissa bits
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  private:
    std::uint64_t state_;
};

// Number of worker threads: min(hardware, 8), capped by SHAPEBIE_THREADS.
int thread_budget();

// Runs fn(i) for i in [0,n). Work items must be independent and must write
// only to their own slots, so results are identical for any thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace shapebie
