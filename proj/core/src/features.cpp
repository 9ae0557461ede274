#include "mixcomp/features.hpp"

#include <cmath>
#include <stdexcept>

namespace mixcomp {

FeatureVector feature_of(const Packet& packet, std::uint32_t alphabet) {
    if (packet.symbols.empty()) throw std::invalid_argument("feature_of: empty packet");
    FeatureVector f;
    f.n = packet.length();
    f.pdf.assign(alphabet, 0.0);
    for (std::uint8_t x : packet.symbols) {
        if (x >= alphabet) throw std::invalid_argument("feature_of: symbol out of alphabet");
        f.pdf[x] += 1.0;
    }
    for (auto& p : f.pdf) p /= f.n;
    return f;
}

double empirical_entropy_bits(const Packet& packet, std::uint32_t alphabet) {
    const FeatureVector f = feature_of(packet, alphabet);
    return shannon_entropy_bits(f.pdf);
}

Gate compressibility_gate(const Packet& packet, std::uint32_t alphabet,
                          double threshold_bits_per_byte) {
    return empirical_entropy_bits(packet, alphabet) > threshold_bits_per_byte
               ? Gate::Incompressible
               : Gate::Compressible;
}

double hellinger(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("hellinger: alphabet mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
        sum += d * d;
    }
    return 0.5 * std::sqrt(sum);
}

double hellinger(const FeatureVector& p, const FeatureVector& q) {
    return hellinger(std::span<const double>(p.pdf), std::span<const double>(q.pdf));
}

} // namespace mixcomp
