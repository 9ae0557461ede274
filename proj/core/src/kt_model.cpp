#include "mixcomp/kt_model.hpp"

#include <stdexcept>

namespace mixcomp {

KTModel::KTModel(int order, std::uint32_t alphabet)
    : order_(order), alphabet_(alphabet) {
    if (order != 0 && order != 1) throw std::invalid_argument("KTModel: order must be 0 or 1");
    if (alphabet < 2 || alphabet > 256)
        throw std::invalid_argument("KTModel: alphabet size must be in [2, 256]");
    contexts_ = order == 0 ? 1 : alphabet + 1;
    counts_.assign(std::size_t(contexts_) * alphabet_, 0.0);
    totals_.assign(contexts_, 0.0);
}

void KTModel::add(std::uint32_t ctx, std::uint32_t symbol, double weight) {
    counts_[std::size_t(ctx) * alphabet_ + symbol] += weight;
    totals_[ctx] += weight;
}

void KTModel::observe_packet(const Packet& packet, double weight) {
    std::uint8_t prev = 0;
    for (std::size_t t = 0; t < packet.symbols.size(); ++t) {
        const std::uint8_t x = packet.symbols[t];
        if (x >= alphabet_)
            throw std::invalid_argument("KTModel: packet symbol outside the model alphabet");
        add(context(t, prev), x, weight);
        prev = x;
    }
}

KTModel prime(const KTModel& model, std::span<const Packet> packets, double weight) {
    if (!(weight > 0.0)) throw std::invalid_argument("prime: weight must be positive");
    KTModel primed = model;
    for (const Packet& p : packets) primed.observe_packet(p, weight);
    return primed;
}

} // namespace mixcomp
