// Copyright 2026 The rffdq Authors
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

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "rffdq/errors.hpp"

namespace rffdq {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for an independent stream identified by (master seed, indices...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = mix64(seed);
    for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys = {}) {
    return Rng(derive_seed(seed, keys));
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Standard normal via Box-Muller on uniform01, so streams stay portable.
inline double standard_normal(Rng& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Inverse-CDF sampler over a finite probability vector.
class DiscreteSampler {
public:
    DiscreteSampler() = default;

    explicit DiscreteSampler(std::span<const double> weights) {
        cdf_.reserve(weights.size());
        double acc = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("sampler weights must be finite and nonnegative");
            acc += w;
            cdf_.push_back(acc);
        }
        if (!(acc > 0.0)) throw InputError("sampler weights sum to zero");
        for (auto& c : cdf_) c /= acc;
        cdf_.back() = 1.0;
    }

    std::size_t operator()(Rng& rng) const {
        const double u = uniform01(rng);
        std::size_t lo = 0, hi = cdf_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (u < cdf_[mid]) hi = mid;
            else lo = mid + 1;
        }
        return lo;
    }

    std::size_t size() const { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

/// Binomial(t, p) by summing Bernoulli draws; t is small (shot counts).
inline std::uint64_t binomial(Rng& rng, std::uint64_t trials, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < trials; ++i) hits += uniform01(rng) < p ? 1 : 0;
    return hits;
}

}  // namespace rffdq
