// SPDX-License-Identifier: Apache-2.0
//
// Shared plumbing: error types, the splittable RNG used by every sampler,
// and log-spaced evaluation grids.

#ifndef RWT_COMMON_HPP
#define RWT_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rwt {

// ---------------------------------------------------------------------------
// Errors

/// Input outside an operation's stated domain (bad alpha, x < 1, ...).
class domain_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A law/spec is missing a component the requested operation needs.
class config_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative numeric routine failed to converge within its budget.
class convergence_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A requested moment/integral diverges (outside the declared finite strip).
class strip_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// RNG
//
// splitmix64 (Vigna 2015): 64-bit state, passes BigCrush, and cheap enough to
// construct one generator per replication.  Replication streams derive from
// the master seed by the fixed mixing rule in derive_seed(), so results do
// not depend on scheduling or worker count.

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform draw on the open interval (0,1); never returns 0 or 1, so it
    /// is safe to feed through unbounded quantile functions.
    double next_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

/// Stream seed for replication `index` under `master`.  Two finalizer rounds
/// of splitmix64 over master + (index+1)*golden-gamma; documented so runs can
/// be reproduced outside this library.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 g(master + (index + 1) * 0x9E3779B97F4A7C15ull);
    g.next_u64();
    return g.next_u64();
}

// ---------------------------------------------------------------------------
// Grids

/// n points log-spaced over [lo, hi], endpoints included.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw domain_error("log_grid: need 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                  static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

// ---------------------------------------------------------------------------
// Deterministic parallel fill
//
// Runs body(i) for i in [0, n) across threads.  Each index writes only its
// own slots, so the result is identical for any worker count; reductions are
// done by the caller in index order.

template <typename Body>
void parallel_for_indexed(std::size_t n, const Body& body,
                          unsigned max_threads = 0) {
    unsigned hw = max_threads ? max_threads : std::thread::hardware_concurrency();
    if (hw <= 1 || n < 4096) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(hw, (n + 4095) / 4096));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace rwt

#endif
