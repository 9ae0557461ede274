#include "mixcomp/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace mixcomp {

std::uint32_t MixtureSpec::alphabet() const {
    if (sources.empty()) throw std::invalid_argument("MixtureSpec: no sources");
    return sources.front().alphabet;
}

std::uint32_t MixtureSpec::max_dim() const {
    std::uint32_t d = 0;
    for (const auto& s : sources) d = std::max(d, s.dim());
    return d;
}

void MixtureSpec::validate() const {
    if (sources.empty()) throw std::invalid_argument("MixtureSpec: no sources");
    if (weights.size() != sources.size())
        throw std::invalid_argument("MixtureSpec: weight count != source count");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("MixtureSpec: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("MixtureSpec: weights sum to " + std::to_string(sum));
    const std::uint32_t a = sources.front().alphabet;
    for (const auto& s : sources) {
        s.validate();
        if (s.alphabet != a)
            throw std::invalid_argument("MixtureSpec: sources must share one alphabet");
    }
}

std::size_t draw_index(const MixtureSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.weights.size(); ++i) {
        acc += spec.weights[i];
        if (u < acc) return i;
    }
    return spec.weights.size() - 1;
}

SideInfo generate_side_info(const MixtureSpec& spec, std::uint32_t n, std::uint32_t T,
                            std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw std::invalid_argument("generate_side_info: n must be >= 1");
    SideInfo si;
    si.n = n;
    si.m = static_cast<std::uint64_t>(n) * T;
    si.packets.reserve(T);
    si.true_indices.reserve(T);
    for (std::uint32_t t = 0; t < T; ++t) {
        const std::uint64_t pick_seed = derive_seed(seed, 2 * std::uint64_t(t));
        const std::uint64_t gen_seed = derive_seed(seed, 2 * std::uint64_t(t) + 1);
        const std::size_t z = draw_index(spec, pick_seed);
        Packet p = generate(spec.sources[z], n, gen_seed);
        p.source_index = static_cast<std::int32_t>(z);
        si.true_indices.push_back(p.source_index);
        si.packets.push_back(std::move(p));
    }
    return si;
}

double mixture_weight_entropy(const MixtureSpec& spec) {
    return shannon_entropy_bits(spec.weights);
}

WeightDecomposition decompose_weights(const MixtureSpec& spec) {
    spec.validate();
    std::map<std::uint32_t, WeightDecomposition::Group> by_dim;
    for (std::size_t i = 0; i < spec.sources.size(); ++i) {
        const auto& src = spec.sources[i];
        const std::uint32_t d = src.dim();
        auto [it, inserted] = by_dim.try_emplace(d);
        auto& g = it->second;
        if (inserted) {
            g.d = d;
            g.family = src.kind;
            g.alphabet = src.alphabet;
        } else if (g.family != src.kind || g.alphabet != src.alphabet) {
            // same d from different families cannot share one Jeffreys integral
            throw std::invalid_argument(
                "decompose_weights: dimension group mixes source families");
        }
        g.v += spec.weights[i];
        g.w_hat.push_back(spec.weights[i]);
        g.source_ids.push_back(i);
    }
    WeightDecomposition dec;
    for (auto& [d, g] : by_dim) {
        if (g.v > 0.0)
            for (auto& w : g.w_hat) w /= g.v;
        else
            std::fill(g.w_hat.begin(), g.w_hat.end(), 1.0 / g.w_hat.size());
        dec.groups.push_back(std::move(g));
    }
    return dec;
}

std::vector<double> WeightDecomposition::v() const {
    std::vector<double> out;
    out.reserve(groups.size());
    for (const auto& g : groups) out.push_back(g.v);
    return out;
}

} // namespace mixcomp
