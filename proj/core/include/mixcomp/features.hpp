#ifndef MIXCOMP_FEATURES_HPP
#define MIXCOMP_FEATURES_HPP

#include <span>
#include <vector>

#include "mixcomp/sources.hpp"

namespace mixcomp {

/// Empirical symbol distribution of one packet. Proportional symbol counts
/// map to the same feature, so downstream classification is length-invariant.
struct FeatureVector {
    std::vector<double> pdf;
    std::uint32_t n = 0;
};

enum class Gate : std::uint8_t { Compressible = 0, Incompressible = 1 };

FeatureVector feature_of(const Packet& packet, std::uint32_t alphabet);

/// Order-0 empirical entropy in bits per symbol.
double empirical_entropy_bits(const Packet& packet, std::uint32_t alphabet);

/// Entropy filter: packets whose empirical entropy exceeds the threshold are
/// treated as already compressed and kept out of memory and coding.
Gate compressibility_gate(const Packet& packet, std::uint32_t alphabet,
                          double threshold_bits_per_byte = 7.5);

/// (1/2)*sqrt(sum_x (sqrt p - sqrt q)^2), range [0, sqrt(2)/2].
double hellinger(std::span<const double> p, std::span<const double> q);
double hellinger(const FeatureVector& p, const FeatureVector& q);

} // namespace mixcomp

#endif
