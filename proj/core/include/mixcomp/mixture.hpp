#ifndef MIXCOMP_MIXTURE_HPP
#define MIXCOMP_MIXTURE_HPP

#include <vector>

#include "mixcomp/sources.hpp"

namespace mixcomp {

/// A mixture of K parametric sources with selection weights. Immutable once
/// built; validate() checks the weight simplex and per-source invariants.
struct MixtureSpec {
    std::vector<ParamSource> sources;
    std::vector<double> weights;

    std::size_t size() const { return sources.size(); }
    std::uint32_t alphabet() const;
    std::uint32_t max_dim() const;
    void validate() const;
};

/// Shared side information: T packets with their generating indices retained
/// for oracle-assisted evaluation. m is the aggregate symbol count n*T.
struct SideInfo {
    std::vector<Packet> packets;
    std::vector<std::int32_t> true_indices;
    std::uint32_t n = 0;
    std::uint64_t m = 0;
};

/// Weights regrouped by parameter dimension: v is the aggregate weight of a
/// dimension group and w_hat the renormalized in-group weights.
struct WeightDecomposition {
    struct Group {
        std::uint32_t d = 0;
        SourceKind family = SourceKind::Memoryless;
        std::uint32_t alphabet = 0;
        double v = 0.0;
        std::vector<double> w_hat;
        std::vector<std::size_t> source_ids;
    };
    std::vector<Group> groups;  // ascending d

    std::vector<double> v() const;
};

/// Samples a 0-based source index with P[i] = w_i.
std::size_t draw_index(const MixtureSpec& spec, std::uint64_t seed);

/// Generates T packets of length n; packet t is produced from a seed derived
/// as (seed, t), so generation order does not matter.
SideInfo generate_side_info(const MixtureSpec& spec, std::uint32_t n, std::uint32_t T,
                            std::uint64_t seed);

/// H(w) in bits.
double mixture_weight_entropy(const MixtureSpec& spec);

/// Splits weights into dimension groups; satisfies
/// H(w) = H(v) + sum_d v_d * H(w_hat_d).
WeightDecomposition decompose_weights(const MixtureSpec& spec);

} // namespace mixcomp

#endif
