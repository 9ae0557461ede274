#ifndef MIXCOMP_HARNESS_HPP
#define MIXCOMP_HARNESS_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mixcomp/codec.hpp"
#include "mixcomp/limits.hpp"
#include "mixcomp/memory_store.hpp"
#include "mixcomp/mixture.hpp"

namespace mixcomp {

/// One source recipe inside a mixture description. Beyond plain Jeffreys
/// draws, sources can live on a byte range, blend a shared base with a
/// per-source perturbation, and (Markov) restrict conditional rows to sparse
/// supports concentrated on the source's own subrange. These recipes build
/// desk-scale analogs of traffic mixtures where pooled memory interferes
/// across sources but histograms still separate them.
struct SourceConfig {
    SourceKind kind = SourceKind::Memoryless;
    std::uint32_t range_lo = 0;           // symbol range [lo, hi); hi = 0 means the whole alphabet
    std::uint32_t range_hi = 0;
    std::optional<double> blend_beta;     // theta = (1-beta)*base + beta*perturbation
    std::uint32_t blend_base = 0;         // id of the shared base draw
    std::uint32_t region_lo = 0;          // markov rows: support atoms come from this region
    std::uint32_t region_hi = 0;
    std::uint32_t support_in = 0;         // atoms drawn from [range_lo, range_hi)
    std::uint32_t support_out = 0;        // atoms drawn from [region_lo, region_hi)
};

struct MixtureConfig {
    std::uint32_t alphabet = 256;
    std::uint64_t seed = 1;
    std::vector<SourceConfig> sources;
    std::vector<double> weights;          // empty = uniform
};

struct ExperimentConfig {
    std::optional<MixtureConfig> mixture;
    std::optional<std::filesystem::path> trace;   // packet file instead of a mixture
    std::uint32_t n = 1500;
    std::uint32_t memory_packets = 0;
    std::uint32_t test_packets = 0;
    std::vector<Scheme> schemes;
    SchemeConfig codec;
    std::uint32_t cluster_k = 8;
    double gate_threshold = 7.5;
    KMeansConfig kmeans;
    double limits_delta = 0.0;
    double limits_hysteresis = 1.0;
    std::uint64_t memory_seed = 1;
    std::uint64_t test_seed = 2;
    std::uint32_t workers = 0;            // 0 = hardware concurrency

    void validate() const;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

/// Realizes the mixture description as concrete sources (deterministic in
/// the seed) and validates it.
MixtureSpec build_mixture(const MixtureConfig& config);

struct SchemeStats {
    std::uint64_t packets = 0;
    double mean_bits_per_byte = 0.0;
    double stddev_bits_per_byte = 0.0;
    double mean_model_bits = 0.0;
};

struct ExperimentReport {
    RedundancyReport limits;
    std::map<std::string, SchemeStats> overall;                       // by scheme name
    std::map<std::string, std::map<std::int32_t, SchemeStats>> per_source;
    std::uint32_t memory_rejected = 0;   // gate-rejected memory packets
    std::uint32_t test_rejected = 0;     // gate-rejected test packets (sent raw)
    std::optional<double> clustering_ari;
    std::uint32_t nonempty_clusters = 0;
    std::string config_json;
};

/// Full pipeline: generate (or load) memory, gate, cluster, compress every
/// compressible test packet under every configured scheme, and report
/// measured bits/byte next to the theoretical limits. Deterministic given
/// the config seeds.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Loads an external packet trace as a memory store. Source indices are
/// typically unknown there, which disables UcompMS.
MemoryStore ingest_trace(const std::filesystem::path& path, double gate_threshold = 7.5);

/// Theoretical limits for the config's (n, m, w, d) without running anything.
RedundancyReport limits_report(const ExperimentConfig& config);

std::string experiment_report_to_json(const ExperimentReport& report);
std::string experiment_report_to_csv(const ExperimentReport& report, std::uint32_t n,
                                     std::uint32_t memory_packets, std::uint32_t cluster_k);

} // namespace mixcomp

#endif
