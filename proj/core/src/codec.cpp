#include "mixcomp/codec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mixcomp {

namespace {

constexpr std::uint32_t kTotal = RangeEncoder::kMaxTotal;
constexpr double kLog2Total = 30.0;

// Maps the KT row to integer frequencies summing exactly to kTotal. Every
// symbol keeps freq >= 1; the rounding leftover lands on the most probable
// symbol (lowest index on ties). Encoder and decoder run this on identical
// counts, so both sides see the same table.
void quantize_row(const KTModel& model, std::uint32_t ctx, std::vector<std::uint32_t>& freq,
                  std::vector<std::uint32_t>& cum) {
    const std::uint32_t a = model.alphabet();
    const double scale = double(kTotal - a);
    const auto row = model.row(ctx);
    const double denom = model.total(ctx) + 0.5 * a;

    std::uint64_t used = 0;
    std::size_t argmax = 0;
    double pmax = -1.0;
    for (std::uint32_t s = 0; s < a; ++s) {
        const double p = (row[s] + 0.5) / denom;
        freq[s] = 1 + static_cast<std::uint32_t>(p * scale);
        used += freq[s];
        if (p > pmax) {
            pmax = p;
            argmax = s;
        }
    }
    freq[argmax] += static_cast<std::uint32_t>(kTotal - used);

    cum[0] = 0;
    for (std::uint32_t s = 0; s < a; ++s) cum[s + 1] = cum[s] + freq[s];
}

std::uint32_t find_symbol(const std::vector<std::uint32_t>& cum, std::uint32_t target) {
    // smallest s with cum[s+1] > target
    std::uint32_t lo = 0, hi = static_cast<std::uint32_t>(cum.size() - 2);
    while (lo < hi) {
        const std::uint32_t mid = (lo + hi) / 2;
        if (cum[mid + 1] > target)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

std::uint32_t header_bits_for(std::uint32_t k) {
    std::uint32_t bits = 0;
    while ((1u << bits) < k) ++bits;
    return bits;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(std::uint8_t(v & 0xff));
    out.push_back(std::uint8_t(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t((v >> (8 * i)) & 0xff));
}

struct ByteCursor {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    void need(std::size_t count, const char* what) const {
        if (pos + count > bytes.size())
            throw DecodeError(std::string("container truncated reading ") + what + " at byte " +
                              std::to_string(pos));
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return bytes[pos++];
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = std::uint16_t(bytes[pos]) | (std::uint16_t(bytes[pos + 1]) << 8);
        pos += 2;
        return v;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
};

} // namespace

CodecOutput encode(const Packet& packet, const KTModel& start_model) {
    KTModel model = start_model;
    const std::uint32_t a = model.alphabet();
    BitWriter bw;
    RangeEncoder enc(bw);
    std::vector<std::uint32_t> freq(a), cum(a + 1);

    CodecOutput out;
    std::uint8_t prev = 0;
    for (std::size_t t = 0; t < packet.symbols.size(); ++t) {
        const std::uint8_t x = packet.symbols[t];
        if (x >= a) throw std::invalid_argument("encode: symbol outside the model alphabet");
        const std::uint32_t ctx = model.context(t, prev);
        quantize_row(model, ctx, freq, cum);
        enc.encode(cum[x], freq[x], kTotal);
        out.model_bits += kLog2Total - std::log2(double(freq[x]));
        model.add(ctx, x, 1.0);
        prev = x;
    }
    enc.finish();
    out.codelength_bits = bw.bit_count();
    out.payload = bw.take();
    return out;
}

Packet decode(std::span<const std::uint8_t> payload, std::uint32_t n, const KTModel& start_model) {
    KTModel model = start_model;
    const std::uint32_t a = model.alphabet();
    BitReader br(payload);
    RangeDecoder dec(br);
    std::vector<std::uint32_t> freq(a), cum(a + 1);

    Packet pkt;
    pkt.symbols.resize(n);
    std::uint8_t prev = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const std::uint32_t ctx = model.context(t, prev);
        quantize_row(model, ctx, freq, cum);
        const std::uint32_t target = dec.decode_target(kTotal);
        const std::uint32_t x = find_symbol(cum, target);
        dec.consume(cum[x], freq[x], kTotal);
        pkt.symbols[t] = static_cast<std::uint8_t>(x);
        model.add(ctx, x, 1.0);
        prev = pkt.symbols[t];
    }
    return pkt;
}

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Ucomp: return "Ucomp";
        case Scheme::UcompM1: return "UcompM1";
        case Scheme::UcompMc: return "UcompMc";
        case Scheme::UcompMS: return "UcompMS";
    }
    return "?";
}

Scheme scheme_from_name(const std::string& name) {
    for (Scheme s : {Scheme::Ucomp, Scheme::UcompM1, Scheme::UcompMc, Scheme::UcompMS})
        if (name == scheme_name(s)) return s;
    throw std::invalid_argument("unknown scheme: " + name);
}

SchemePrimer::SchemePrimer(const MemoryStore& memory, const SchemeConfig& config)
    : memory_(memory), config_(config), fresh_(config.order, memory.alphabet) {}

const KTModel& SchemePrimer::pooled() {
    if (!pooled_) {
        const auto packets = memory_.all_compressible();
        pooled_ = prime(fresh_, packets, config_.priming_weight);
    }
    return *pooled_;
}

const KTModel& SchemePrimer::cluster_model(std::uint32_t cluster_id) {
    if (!memory_.clustering || cluster_id >= memory_.clustering->k)
        throw std::invalid_argument("cluster id out of range");
    auto it = per_cluster_.find(std::int32_t(cluster_id));
    if (it == per_cluster_.end()) {
        const auto packets = memory_.cluster_packets(cluster_id);
        it = per_cluster_.emplace(std::int32_t(cluster_id),
                                  prime(fresh_, packets, config_.priming_weight)).first;
    }
    return it->second;
}

const KTModel& SchemePrimer::source_model(std::int32_t source_index) {
    if (source_index < 0 || source_index > 0xffff)
        throw std::invalid_argument("UcompMS: source index must be known and fit u16");
    if (!memory_.has_true_indices())
        throw std::invalid_argument("UcompMS requires memory with true source indices");
    auto it = per_source_.find(source_index);
    if (it == per_source_.end()) {
        const auto packets = memory_.source_packets(source_index);
        it = per_source_.emplace(source_index,
                                 prime(fresh_, packets, config_.priming_weight)).first;
    }
    return it->second;
}

std::uint32_t SchemePrimer::cluster_header_bits() const {
    return memory_.clustering ? header_bits_for(memory_.clustering->k) : 0;
}

const KTModel& SchemePrimer::model_for(Scheme scheme, const Packet& packet,
                                       std::optional<std::uint16_t>& cluster_out) {
    cluster_out.reset();
    if (memory_.compressible_count() == 0) return fresh_;  // nothing to prime with
    switch (scheme) {
        case Scheme::Ucomp:
            return fresh_;
        case Scheme::UcompM1:
            return pooled();
        case Scheme::UcompMc: {
            if (!memory_.clustering)
                throw std::invalid_argument("UcompMc requires a clustered memory");
            const std::uint32_t id = classify(feature_of(packet, memory_.alphabet),
                                              *memory_.clustering);
            cluster_out = static_cast<std::uint16_t>(id);
            return cluster_model(id);
        }
        case Scheme::UcompMS: {
            if (packet.source_index < 0)
                throw std::invalid_argument("UcompMS requires the packet's true source index");
            cluster_out = static_cast<std::uint16_t>(packet.source_index);
            return source_model(packet.source_index);
        }
    }
    throw std::invalid_argument("unknown scheme");
}

const KTModel& SchemePrimer::model_for_id(Scheme scheme, std::optional<std::uint16_t> cluster_id) {
    if (memory_.compressible_count() == 0) return fresh_;
    switch (scheme) {
        case Scheme::Ucomp:
            return fresh_;
        case Scheme::UcompM1:
            return pooled();
        case Scheme::UcompMc:
            if (!cluster_id) throw DecodeError("UcompMc container lacks a cluster id");
            return cluster_model(*cluster_id);
        case Scheme::UcompMS:
            if (!cluster_id) throw DecodeError("UcompMS container lacks a source id");
            return source_model(*cluster_id);
    }
    throw std::invalid_argument("unknown scheme");
}

CompressedPacket compress_scheme(const Packet& packet, const MemoryStore& memory, Scheme scheme,
                                 const SchemeConfig& config) {
    SchemePrimer primer(memory, config);
    std::optional<std::uint16_t> id;
    const KTModel& model = primer.model_for(scheme, packet, id);

    CompressedPacket cp;
    cp.scheme = scheme;
    cp.order = static_cast<std::uint8_t>(config.order);
    cp.cluster_id = id;
    cp.n = packet.length();
    cp.body = encode(packet, model);
    if (scheme == Scheme::UcompMc && id)
        cp.body.codelength_bits += primer.cluster_header_bits();
    return cp;
}

Packet decompress_scheme(const CompressedPacket& cp, const MemoryStore& memory,
                         const SchemeConfig& config) {
    if (cp.order != config.order)
        throw DecodeError("container model order does not match the codec configuration");
    SchemePrimer primer(memory, config);
    const KTModel& model = primer.model_for_id(cp.scheme, cp.cluster_id);
    Packet pkt = decode(cp.body.payload, cp.n, model);
    if (cp.scheme == Scheme::UcompMS && cp.cluster_id)
        pkt.source_index = static_cast<std::int32_t>(*cp.cluster_id);
    return pkt;
}

std::uint32_t packet_checksum(const Packet& packet) {
    // FNV-1a
    std::uint32_t h = 2166136261u;
    for (std::uint8_t b : packet.symbols) {
        h ^= b;
        h *= 16777619u;
    }
    return h;
}

std::vector<std::uint8_t> serialize_container(const CompressedPacket& cp,
                                              std::uint32_t checksum) {
    const bool carries_id = cp.scheme == Scheme::UcompMc || cp.scheme == Scheme::UcompMS;
    std::vector<std::uint8_t> out;
    out.reserve(16 + cp.body.payload.size());
    out.push_back(static_cast<std::uint8_t>(cp.scheme));
    out.push_back(cp.order);
    if (carries_id) put_u16(out, cp.cluster_id.value_or(0xffff));
    put_u32(out, cp.n);
    put_u32(out, static_cast<std::uint32_t>(cp.body.codelength_bits));
    put_u32(out, checksum);
    const std::size_t payload_bytes = (cp.body.codelength_bits + 7) / 8;
    if (cp.body.payload.size() < payload_bytes)
        throw std::invalid_argument("serialize_container: payload shorter than bit count");
    out.insert(out.end(), cp.body.payload.begin(), cp.body.payload.begin() + payload_bytes);
    return out;
}

ParsedContainer parse_container(std::span<const std::uint8_t> bytes) {
    ByteCursor cur{bytes};
    ParsedContainer pc;
    const std::uint8_t scheme_tag = cur.u8("scheme tag");
    if (scheme_tag > 3)
        throw DecodeError("bad scheme tag " + std::to_string(int(scheme_tag)) + " at byte 0");
    pc.packet.scheme = static_cast<Scheme>(scheme_tag);
    pc.packet.order = cur.u8("model order");
    if (pc.packet.order > 1) throw DecodeError("bad model order at byte 1");
    if (pc.packet.scheme == Scheme::UcompMc || pc.packet.scheme == Scheme::UcompMS) {
        const std::uint16_t id = cur.u16("cluster id");
        if (id != 0xffff) pc.packet.cluster_id = id;
    }
    pc.packet.n = cur.u32("original length");
    pc.packet.body.codelength_bits = cur.u32("payload bit count");
    pc.checksum = cur.u32("checksum");
    const std::size_t payload_bytes = (pc.packet.body.codelength_bits + 7) / 8;
    cur.need(payload_bytes, "payload");
    pc.packet.body.payload.assign(bytes.begin() + cur.pos, bytes.begin() + cur.pos + payload_bytes);
    cur.pos += payload_bytes;
    pc.bytes_consumed = cur.pos;
    return pc;
}

std::vector<std::uint8_t> compress_to_container(const Packet& packet, const MemoryStore& memory,
                                                Scheme scheme, const SchemeConfig& config) {
    const CompressedPacket cp = compress_scheme(packet, memory, scheme, config);
    return serialize_container(cp, packet_checksum(packet));
}

Packet decompress_container(std::span<const std::uint8_t> bytes, const MemoryStore& memory,
                            const SchemeConfig& config, std::size_t* bytes_consumed) {
    ParsedContainer pc = parse_container(bytes);
    Packet pkt = decompress_scheme(pc.packet, memory, config);
    if (packet_checksum(pkt) != pc.checksum)
        throw DecodeError("checksum mismatch after decoding: payload corrupt");
    if (bytes_consumed) *bytes_consumed = pc.bytes_consumed;
    return pkt;
}

} // namespace mixcomp
