#include "mixcomp/limits.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace mixcomp {

namespace {

constexpr double kLog2E = std::numbers::log2e;

double log2_pi() { return std::log2(std::numbers::pi); }

double regime_threshold(std::uint32_t n, std::uint32_t d) {
    return 0.5 * d * std::log2(double(n));
}

} // namespace

LimitInputs LimitInputs::from_mixture(const MixtureSpec& spec, std::uint32_t n, std::uint64_t m) {
    LimitInputs in;
    in.n = n;
    in.m = m;
    in.decomposition = decompose_weights(spec);
    in.validate();
    return in;
}

void LimitInputs::validate() const {
    if (n < 2) throw std::invalid_argument("LimitInputs: n must be >= 2");
    if (decomposition.groups.empty()) throw std::invalid_argument("LimitInputs: no groups");
}

double log2_jeffreys_integral(SourceKind family, std::uint32_t alphabet) {
    if (alphabet < 2) throw std::invalid_argument("log2_jeffreys_integral: alphabet < 2");
    const double a = alphabet;
    const double per_row = 0.5 * a * log2_pi() - std::lgamma(0.5 * a) * kLog2E;
    return family == SourceKind::Memoryless ? per_row : a * per_row;
}

RedundancyValue minimax_redundancy_value(std::uint32_t n, SourceKind family,
                                         std::uint32_t alphabet) {
    if (n < 2) throw std::invalid_argument("minimax_redundancy: n must be >= 2");
    const double d = family == SourceKind::Memoryless ? alphabet - 1.0
                                                      : double(alphabet) * (alphabet - 1.0);
    const double leading = 0.5 * d * std::log2(n / (2.0 * std::numbers::pi * std::numbers::e));
    const double bits = leading + log2_jeffreys_integral(family, alphabet);
    RedundancyValue v;
    if (bits < 0.0) {
        v.bits = 0.0;
        v.notes.push_back("minimax redundancy clamped to 0 at n=" + std::to_string(n) +
                          " (dropped o(1) terms dominate)");
    } else {
        v.bits = bits;
    }
    return v;
}

double minimax_redundancy(std::uint32_t n, SourceKind family, std::uint32_t alphabet) {
    return minimax_redundancy_value(n, family, alphabet).bits;
}

HdBranches entropy_term(std::uint32_t n, const WeightDecomposition::Group& group,
                        double hysteresis) {
    HdBranches h;
    h.weight_entropy = shannon_entropy_bits(group.w_hat);
    h.minimax = minimax_redundancy(n, group.family, group.alphabet);
    h.selected = h.weight_entropy <= hysteresis * regime_threshold(n, group.d)
                     ? HdRegime::WeightEntropy
                     : HdRegime::Minimax;
    return h;
}

MixtureEntropyResult mixture_entropy(const LimitInputs& inputs,
                                     std::span<const double> base_entropies,
                                     double hysteresis) {
    inputs.validate();
    const auto& dec = inputs.decomposition;
    std::size_t source_count = 0;
    for (const auto& g : dec.groups) source_count += g.source_ids.size();
    if (base_entropies.size() != source_count)
        throw std::invalid_argument("mixture_entropy: base entropy count != source count");

    MixtureEntropyResult res;
    for (const auto& g : dec.groups)
        for (std::size_t i = 0; i < g.source_ids.size(); ++i)
            res.base_entropy += g.v * g.w_hat[i] * base_entropies[g.source_ids[i]];
    res.h_v = shannon_entropy_bits(dec.v());
    res.total_bits = res.base_entropy + res.h_v;
    for (const auto& g : dec.groups) {
        const HdBranches h = entropy_term(inputs.n, g, hysteresis);
        res.h_d.emplace(g.d, h);
        res.total_bits += g.v * h.value();
    }
    return res;
}

RedundancyValue redundancy_ucomp(const LimitInputs& inputs, double hysteresis) {
    inputs.validate();
    RedundancyValue v;
    double sum = 0.0;
    for (const auto& g : inputs.decomposition.groups) {
        const HdBranches h = entropy_term(inputs.n, g, hysteresis);
        sum += g.v * (h.minimax - h.value());
    }
    if (sum < 0.0) {
        v.notes.push_back("Ucomp redundancy clamped to 0 (weight entropy exceeds the "
                          "minimax term inside the low-entropy regime)");
        sum = 0.0;
    }
    v.bits = sum;
    return v;
}

RedundancyValue redundancy_ucompm(const LimitInputs& inputs, double delta, double hysteresis) {
    inputs.validate();
    RedundancyValue v;
    if (inputs.m < inputs.n) {
        // memory below one packet buys at most a constant
        RedundancyValue base = redundancy_ucomp(inputs, hysteresis);
        v.bits = base.bits;
        v.notes = std::move(base.notes);
        v.notes.push_back("m < n: side information improves the redundancy by at most O(1); "
                          "reporting the no-memory value");
        return v;
    }
    double sum = 0.0;
    for (const auto& g : inputs.decomposition.groups) {
        const HdBranches h = entropy_term(inputs.n, g, hysteresis);
        if (h.selected == HdRegime::Minimax) continue;  // high-entropy regime contributes 0
        for (double w_hat : g.w_hat) {
            if (w_hat <= 0.0) continue;
            const double r_hat =
                0.5 * g.d * std::log2(1.0 + double(inputs.n) / (w_hat * double(inputs.m))) + delta;
            sum += g.v * w_hat * r_hat;
        }
    }
    v.bits = std::max(sum, 0.0);
    return v;
}

RedundancyValue redundancy_ucompms(const LimitInputs& inputs, double delta, double hysteresis) {
    // the two schemes share one redundancy expression; kept separate so
    // reports carry all three named values
    return redundancy_ucompm(inputs, delta, hysteresis);
}

RedundancyReport build_report(const LimitInputs& inputs, double delta, double hysteresis) {
    inputs.validate();
    RedundancyReport rep;
    rep.n = inputs.n;
    rep.m = inputs.m;
    rep.delta_slack = delta;

    for (const auto& g : inputs.decomposition.groups) {
        RedundancyValue r = minimax_redundancy_value(inputs.n, g.family, g.alphabet);
        rep.r_minimax_per_dim.emplace(g.d, r.bits);
        for (auto& note : r.notes) rep.validity_notes.push_back(std::move(note));
        rep.h_d.emplace(g.d, entropy_term(inputs.n, g, hysteresis));
    }

    RedundancyValue ucomp = redundancy_ucomp(inputs, hysteresis);
    RedundancyValue ucompm = redundancy_ucompm(inputs, delta, hysteresis);
    RedundancyValue ucompms = redundancy_ucompms(inputs, delta, hysteresis);
    rep.r_ucomp = ucomp.bits;
    rep.r_ucompm = ucompm.bits;
    rep.r_ucompms = ucompms.bits;
    for (auto& n1 : ucomp.notes) rep.validity_notes.push_back(std::move(n1));
    for (auto& n2 : ucompm.notes) rep.validity_notes.push_back(std::move(n2));

    // the dropped o(1) terms can push the finite-n memory formulas above the
    // no-memory one near the regime boundary; the underlying quantities obey
    // the ordering, so the report does too
    if (rep.r_ucompm > rep.r_ucomp) {
        rep.r_ucompm = rep.r_ucomp;
        rep.validity_notes.push_back(
            "UcompM formula exceeded Ucomp at this (n,m,w,d); clamped to the Ucomp value "
            "(dropped o(1) terms)");
    }
    if (rep.r_ucompms > rep.r_ucompm) rep.r_ucompms = rep.r_ucompm;

    rep.validity_notes.push_back("all values omit the o(1) terms of the asymptotic formulas");
    return rep;
}

bool ordering_check(const RedundancyReport& report) {
    return report.r_ucompms <= report.r_ucompm && report.r_ucompm <= report.r_ucomp;
}

std::string report_to_json(const RedundancyReport& report) {
    nlohmann::json j;
    j["n"] = report.n;
    j["m"] = report.m;
    j["delta_slack"] = report.delta_slack;
    auto& per_dim = j["r_minimax_per_dim"] = nlohmann::json::object();
    for (const auto& [d, bits] : report.r_minimax_per_dim) per_dim[std::to_string(d)] = bits;
    auto& hd = j["h_d"] = nlohmann::json::object();
    for (const auto& [d, h] : report.h_d)
        hd[std::to_string(d)] = {
            {"weight_entropy", h.weight_entropy},
            {"minimax", h.minimax},
            {"selected", h.selected == HdRegime::WeightEntropy ? "weight_entropy" : "minimax"},
            {"value", h.value()},
        };
    j["r_ucomp"] = report.r_ucomp;
    j["r_ucompm"] = report.r_ucompm;
    j["r_ucompms"] = report.r_ucompms;
    j["validity_notes"] = report.validity_notes;
    return j.dump(2);
}

} // namespace mixcomp
