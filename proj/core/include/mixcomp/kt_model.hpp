#ifndef MIXCOMP_KT_MODEL_HPP
#define MIXCOMP_KT_MODEL_HPP

#include <span>
#include <vector>

#include "mixcomp/sources.hpp"

namespace mixcomp {

/// Add-1/2 sequential estimator over byte contexts. Order 0 keeps one count
/// row; order 1 keeps one row per previous symbol plus a start row used for
/// the first symbol of every packet, so priming never invents a cross-packet
/// context. Counts are reals to admit fractional priming weights.
class KTModel {
public:
    KTModel(int order, std::uint32_t alphabet);

    int order() const { return order_; }
    std::uint32_t alphabet() const { return alphabet_; }
    std::uint32_t context_count() const { return contexts_; }

    /// Context index for the symbol at position t given the previous symbol.
    std::uint32_t context(std::size_t t, std::uint8_t prev) const {
        return order_ == 0 ? 0u : (t == 0 ? alphabet_ : prev);
    }

    double count(std::uint32_t ctx, std::uint32_t symbol) const {
        return counts_[std::size_t(ctx) * alphabet_ + symbol];
    }
    double total(std::uint32_t ctx) const { return totals_[ctx]; }
    std::span<const double> row(std::uint32_t ctx) const {
        return {counts_.data() + std::size_t(ctx) * alphabet_, alphabet_};
    }

    /// (count + 1/2) / (total + A/2)
    double probability(std::uint32_t ctx, std::uint32_t symbol) const {
        return (count(ctx, symbol) + 0.5) / (total(ctx) + 0.5 * alphabet_);
    }

    void add(std::uint32_t ctx, std::uint32_t symbol, double weight);

    /// Accumulates the packet's empirical (transition) counts scaled by
    /// weight, as in prime().
    void observe_packet(const Packet& packet, double weight);

private:
    int order_;
    std::uint32_t alphabet_;
    std::uint32_t contexts_;
    std::vector<double> counts_;
    std::vector<double> totals_;
};

/// Functional priming: returns a copy of the model whose counts additionally
/// carry weight * (empirical counts of the packets). The input model is left
/// untouched. Throws std::invalid_argument on alphabet mismatch or
/// non-positive weight.
KTModel prime(const KTModel& model, std::span<const Packet> packets, double weight);

} // namespace mixcomp

#endif
