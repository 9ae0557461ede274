#ifndef MIXCOMP_LIMITS_HPP
#define MIXCOMP_LIMITS_HPP

#include <map>
#include <string>
#include <vector>

#include "mixcomp/mixture.hpp"

namespace mixcomp {

/// Everything the closed-form calculators need: packet length, aggregate
/// memory size, and the weight decomposition by parameter dimension.
struct LimitInputs {
    std::uint32_t n = 0;
    std::uint64_t m = 0;
    WeightDecomposition decomposition;

    static LimitInputs from_mixture(const MixtureSpec& spec, std::uint32_t n, std::uint64_t m);
    void validate() const;
};

enum class HdRegime : std::uint8_t { WeightEntropy = 0, Minimax = 1 };

/// Both branches of the per-dimension entropy term, plus which one the
/// regime comparison selected. Exposed so callers can inspect behaviour near
/// the switch instead of trusting a single number.
struct HdBranches {
    double weight_entropy = 0.0;
    double minimax = 0.0;
    HdRegime selected = HdRegime::WeightEntropy;

    double value() const {
        return selected == HdRegime::WeightEntropy ? weight_entropy : minimax;
    }
};

struct RedundancyValue {
    double bits = 0.0;
    std::vector<std::string> notes;
};

struct MixtureEntropyResult {
    double total_bits = 0.0;
    double base_entropy = 0.0;   // sum_i w_i H_n(theta_i)
    double h_v = 0.0;
    std::map<std::uint32_t, HdBranches> h_d;
    std::vector<std::string> notes;
};

/// Theoretical limits and the scheme redundancies for one (n, m, w, d)
/// configuration. Values are clamped to the ordering no-memory >= memory >= 0
/// that the underlying quantities satisfy; every clamp leaves a note.
struct RedundancyReport {
    std::uint32_t n = 0;
    std::uint64_t m = 0;
    std::map<std::uint32_t, double> r_minimax_per_dim;
    std::map<std::uint32_t, HdBranches> h_d;
    double r_ucomp = 0.0;
    double r_ucompm = 0.0;
    double r_ucompms = 0.0;
    double delta_slack = 0.0;
    std::vector<std::string> validity_notes;
};

/// log2 of the Jeffreys integral over the parameter space:
/// pi^(A/2)/Gamma(A/2) for the memoryless simplex, one such factor per
/// conditional row for first-order Markov sources.
double log2_jeffreys_integral(SourceKind family, std::uint32_t alphabet);

/// Leading-terms minimax redundancy (d/2)*log2(n/(2*pi*e)) + log2 integral,
/// clamped at zero (note via the *_value overload) for n small enough that
/// the dropped o(1) terms dominate.
double minimax_redundancy(std::uint32_t n, SourceKind family, std::uint32_t alphabet);
RedundancyValue minimax_redundancy_value(std::uint32_t n, SourceKind family,
                                         std::uint32_t alphabet);

/// Per-dimension regime comparison: the weight-entropy branch applies while
/// H(w_hat_d) <= hysteresis * (d/2) log2 n, the minimax branch otherwise.
HdBranches entropy_term(std::uint32_t n, const WeightDecomposition::Group& group,
                        double hysteresis = 1.0);

/// Mixture entropy H_n(Delta) = sum_i w_i H_n(theta_i) + H(v) + sum_d v_d H_d.
/// base_entropies[i] must be H_n for source i of the decomposed mixture.
MixtureEntropyResult mixture_entropy(const LimitInputs& inputs,
                                     std::span<const double> base_entropies,
                                     double hysteresis = 1.0);

RedundancyValue redundancy_ucomp(const LimitInputs& inputs, double hysteresis = 1.0);
RedundancyValue redundancy_ucompm(const LimitInputs& inputs, double delta = 0.0,
                                  double hysteresis = 1.0);
RedundancyValue redundancy_ucompms(const LimitInputs& inputs, double delta = 0.0,
                                   double hysteresis = 1.0);

RedundancyReport build_report(const LimitInputs& inputs, double delta = 0.0,
                              double hysteresis = 1.0);

/// True iff r_ucompms <= r_ucompm <= r_ucomp.
bool ordering_check(const RedundancyReport& report);

std::string report_to_json(const RedundancyReport& report);

} // namespace mixcomp

#endif
