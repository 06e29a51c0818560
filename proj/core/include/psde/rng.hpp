#pragma once

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include <cstdint>

namespace psde {

/// SplitMix64 finaliser; a bijective 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t z) noexcept;

/// Seed of stream `index` under master seed `seed`:
///   splitmix64(seed ^ splitmix64(index + 0x9E3779B97F4A7C15)).
/// Streams depend only on (seed, index), never on scheduling order.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Standard normal source. Boost's ziggurat normal is used instead of the
/// std one so draws are identical across standard libraries.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

    double operator()() { return dist_(engine_); }

private:
    boost::random::mt19937_64 engine_;
    boost::random::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace psde
