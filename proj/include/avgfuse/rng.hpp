#pragma once

#include <array>
#include <cstdint>

namespace avgfuse {

/// Philox4x32-10 counter-based generator. A (seed, stream, counter) triple
/// maps to four 32-bit words, so any sample can be regenerated independently
/// of every other one; parallel consumers just partition the stream space.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t stream,
                                              std::uint64_t counter);
};

/// Two uniform doubles in the open interval (0,1) from one Philox block.
std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t counter);

/// Single uniform double in (0,1).
double uniform_double(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

/// Standard normal quantile (inverse CDF), Wichura's AS 241 double-precision
/// rational approximation. Accurate to ~1e-15 over p in (0,1).
double normal_quantile(double p);

/// Standard normal CDF via erfc.
double normal_cdf(double x);

/// Poisson quantile: smallest k with CDF(k) >= u, by stable forward scan of
/// the probability mass. Intended for moderate rates (the scan is O(lambda)).
long poisson_quantile(double u, double lambda);

/// Mix a base seed with an index to derive a decorrelated child seed
/// (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace avgfuse
