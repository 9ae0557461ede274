#ifndef MIXCOMP_CODEC_HPP
#define MIXCOMP_CODEC_HPP

#include <map>
#include <optional>

#include "mixcomp/kt_model.hpp"
#include "mixcomp/memory_store.hpp"
#include "mixcomp/range_coder.hpp"
#include "mixcomp/sources.hpp"

namespace mixcomp {

struct CodecOutput {
    std::vector<std::uint8_t> payload;
    std::uint64_t codelength_bits = 0;   // exact emitted bits, headers included
    double model_bits = 0.0;             // -log2 of the modeled probability
};

/// Arithmetic-codes the packet under the sequentially updated model (the
/// model also learns the packet's own symbols). The starting model fully
/// determines decodability.
CodecOutput encode(const Packet& packet, const KTModel& start_model);

/// Inverse of encode given the identical starting model and the original
/// length. Throws DecodeError instead of returning garbage.
Packet decode(std::span<const std::uint8_t> payload, std::uint32_t n, const KTModel& start_model);

enum class Scheme : std::uint8_t {
    Ucomp = 0,     // fresh model
    UcompM1 = 1,   // primed with all compressible memory
    UcompMc = 2,   // primed with the classified cluster
    UcompMS = 3,   // primed with the true-index slice (oracle)
};

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct SchemeConfig {
    int order = 0;
    double priming_weight = 1.0;
};

/// One compressed packet. cluster_id carries the encoder's classification
/// for UcompMc (charged ceil(log2 k) bits in codelength_bits) and the oracle
/// source index for UcompMS (free, per that scheme's premise).
struct CompressedPacket {
    Scheme scheme = Scheme::Ucomp;
    std::uint8_t order = 0;
    std::optional<std::uint16_t> cluster_id;
    std::uint32_t n = 0;
    CodecOutput body;
};

/// Builds the starting models the schemes share; encoder and decoder sides
/// construct identical models from the identical store.
class SchemePrimer {
public:
    SchemePrimer(const MemoryStore& memory, const SchemeConfig& config);

    /// Starting model for the packet under the scheme; for UcompMc assigns
    /// and reports the cluster, for UcompMS resolves the oracle index.
    const KTModel& model_for(Scheme scheme, const Packet& packet,
                             std::optional<std::uint16_t>& cluster_out);
    /// Decoder path: the cluster/source id comes from the container.
    const KTModel& model_for_id(Scheme scheme, std::optional<std::uint16_t> cluster_id);

    std::uint32_t cluster_header_bits() const;

private:
    const MemoryStore& memory_;
    SchemeConfig config_;
    KTModel fresh_;
    std::optional<KTModel> pooled_;
    std::map<std::int32_t, KTModel> per_cluster_;   // node-based: stable references
    std::map<std::int32_t, KTModel> per_source_;

    const KTModel& pooled();
    const KTModel& cluster_model(std::uint32_t cluster_id);
    const KTModel& source_model(std::int32_t source_index);
};

CompressedPacket compress_scheme(const Packet& packet, const MemoryStore& memory, Scheme scheme,
                                 const SchemeConfig& config);
Packet decompress_scheme(const CompressedPacket& cp, const MemoryStore& memory,
                         const SchemeConfig& config);

/// Compressed-packet container (little-endian):
///   u8 scheme, u8 model order, u16 cluster id (UcompMc / UcompMS only),
///   u32 original length, u32 payload bit count, u32 FNV-1a checksum of the
///   original symbols, payload bytes (ceil(bits/8)).
std::vector<std::uint8_t> serialize_container(const CompressedPacket& cp,
                                              std::uint32_t packet_checksum);
struct ParsedContainer {
    CompressedPacket packet;
    std::uint32_t checksum = 0;
    std::size_t bytes_consumed = 0;
};
ParsedContainer parse_container(std::span<const std::uint8_t> bytes);

std::uint32_t packet_checksum(const Packet& packet);

/// compress_scheme + serialize_container in one step.
std::vector<std::uint8_t> compress_to_container(const Packet& packet, const MemoryStore& memory,
                                                Scheme scheme, const SchemeConfig& config);

/// parse_container + decompress_scheme + checksum verification. Reports the
/// container size through bytes_consumed when given.
Packet decompress_container(std::span<const std::uint8_t> bytes, const MemoryStore& memory,
                            const SchemeConfig& config, std::size_t* bytes_consumed = nullptr);

} // namespace mixcomp

#endif
