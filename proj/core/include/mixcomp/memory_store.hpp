#ifndef MIXCOMP_MEMORY_STORE_HPP
#define MIXCOMP_MEMORY_STORE_HPP

#include <filesystem>
#include <optional>
#include <vector>

#include "mixcomp/clustering.hpp"
#include "mixcomp/features.hpp"
#include "mixcomp/sources.hpp"

namespace mixcomp {

/// The shared side information: every stored packet with its gate verdict,
/// features for the compressible subset, and (once built) the clustering
/// snapshot over those features. Encoder and decoder must hold identical
/// stores for memory-assisted schemes to be decodable.
struct MemoryStore {
    std::uint32_t alphabet = 256;
    double gate_threshold = 7.5;
    std::vector<Packet> packets;
    std::vector<Gate> gate;                        // parallel to packets
    std::vector<std::uint32_t> compressible_ids;   // indices into packets
    std::vector<FeatureVector> features;           // parallel to compressible_ids
    std::optional<Clustering> clustering;          // over features

    static MemoryStore build(std::vector<Packet> packets, std::uint32_t alphabet,
                             double gate_threshold = 7.5);

    std::size_t size() const { return packets.size(); }
    std::size_t compressible_count() const { return compressible_ids.size(); }
    std::size_t rejected_count() const { return packets.size() - compressible_ids.size(); }
    std::uint64_t compressible_symbols() const;
    bool has_true_indices() const;

    /// Runs kmeans over the compressible features and keeps the snapshot.
    void cluster(std::uint32_t k, const KMeansConfig& config = {});

    /// Compressible packets assigned to the given cluster id.
    std::vector<Packet> cluster_packets(std::uint32_t cluster_id) const;
    /// Compressible packets whose true source index matches.
    std::vector<Packet> source_packets(std::int32_t source_index) const;
    /// All compressible packets.
    std::vector<Packet> all_compressible() const;

    /// Directory persistence: packets.pkts plus JSON sidecars for the gate
    /// verdicts, features, and the optional clustering snapshot.
    void save(const std::filesystem::path& dir) const;
    static MemoryStore load(const std::filesystem::path& dir);
};

} // namespace mixcomp

#endif
