#ifndef MIXCOMP_SOURCES_HPP
#define MIXCOMP_SOURCES_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace mixcomp {

/// Finite symbol alphabet. Symbols are stored as bytes, so size is capped at 256.
struct Alphabet {
    std::uint32_t size = 256;
};

enum class SourceKind : std::uint8_t {
    Memoryless = 0,
    MarkovOrder1 = 1,
};

/// One packet-sized symbol sequence. source_index carries the generating
/// source when known (-1 otherwise); it exists for evaluation only and is
/// never visible to the compressor.
struct Packet {
    std::vector<std::uint8_t> symbols;
    std::int32_t source_index = -1;

    std::uint32_t length() const { return static_cast<std::uint32_t>(symbols.size()); }
};

/// A single parametric source over a finite alphabet.
///
/// Memoryless sources hold one symbol distribution; first-order Markov
/// sources hold one conditional row per state plus an initial distribution
/// (the stationary one, for sampled sources). Free parameter count is
/// A-1 respectively A*(A-1).
struct ParamSource {
    SourceKind kind = SourceKind::Memoryless;
    std::uint32_t alphabet = 256;
    std::vector<double> symbol_probs;            // memoryless, length A
    std::vector<std::vector<double>> rows;       // markov, A rows of length A
    std::vector<double> initial;                 // markov, length A

    std::uint32_t dim() const;
    /// Checks row sums (1 within 1e-12), nonnegativity and shape; throws
    /// std::invalid_argument on violation.
    void validate() const;
};

/// Deterministic stream splitting for parallel generation.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Shannon entropy of a distribution in bits; 0*log 0 := 0.
double shannon_entropy_bits(std::span<const double> p);

/// Stationary distribution of a row-stochastic matrix by damped power
/// iteration to 1e-12. Throws std::invalid_argument when the chain has no
/// unique stationary distribution (more than one closed class).
std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& rows);

/// Draws source parameters from the Jeffreys prior of the family:
/// Dirichlet(1/2,...,1/2) for the memoryless simplex, independently per
/// conditional row for Markov sources (initial = stationary distribution).
ParamSource sample_jeffreys(SourceKind kind, Alphabet alphabet, std::uint64_t seed);

/// Generates n symbols from the source; bit-identical for a fixed seed.
Packet generate(const ParamSource& source, std::uint32_t n, std::uint64_t seed);

/// H(X^n) in bits: n*H(theta) for memoryless sources,
/// H(initial) + (n-1)*sum_s pi(s)*H(row_s) for Markov sources.
double entropy_per_packet(const ParamSource& source, std::uint64_t n);

/// Ideal codelength -log2 mu_theta(packet) in bits; infinity if the packet
/// has zero probability under the source.
double ideal_codelength_bits(const ParamSource& source, const Packet& packet);

} // namespace mixcomp

#endif
