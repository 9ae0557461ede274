#include "mixcomp/memory_store.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mixcomp/packet_io.hpp"

namespace mixcomp {

MemoryStore MemoryStore::build(std::vector<Packet> packets, std::uint32_t alphabet,
                               double gate_threshold) {
    MemoryStore store;
    store.alphabet = alphabet;
    store.gate_threshold = gate_threshold;
    store.packets = std::move(packets);
    store.gate.reserve(store.packets.size());
    for (std::size_t i = 0; i < store.packets.size(); ++i) {
        const Gate g = compressibility_gate(store.packets[i], alphabet, gate_threshold);
        store.gate.push_back(g);
        if (g == Gate::Compressible) {
            store.compressible_ids.push_back(static_cast<std::uint32_t>(i));
            store.features.push_back(feature_of(store.packets[i], alphabet));
        }
    }
    return store;
}

std::uint64_t MemoryStore::compressible_symbols() const {
    std::uint64_t m = 0;
    for (std::uint32_t id : compressible_ids) m += packets[id].length();
    return m;
}

bool MemoryStore::has_true_indices() const {
    for (const auto& p : packets)
        if (p.source_index < 0) return false;
    return !packets.empty();
}

void MemoryStore::cluster(std::uint32_t k, const KMeansConfig& config) {
    if (features.empty())
        throw std::invalid_argument("MemoryStore::cluster: no compressible packets");
    clustering = kmeans(features, k, config);
}

std::vector<Packet> MemoryStore::cluster_packets(std::uint32_t cluster_id) const {
    if (!clustering) throw std::invalid_argument("MemoryStore: memory is not clustered");
    std::vector<Packet> out;
    for (std::size_t i = 0; i < compressible_ids.size(); ++i)
        if (clustering->assignments[i] == cluster_id) out.push_back(packets[compressible_ids[i]]);
    return out;
}

std::vector<Packet> MemoryStore::source_packets(std::int32_t source_index) const {
    std::vector<Packet> out;
    for (std::uint32_t id : compressible_ids)
        if (packets[id].source_index == source_index) out.push_back(packets[id]);
    return out;
}

std::vector<Packet> MemoryStore::all_compressible() const {
    std::vector<Packet> out;
    out.reserve(compressible_ids.size());
    for (std::uint32_t id : compressible_ids) out.push_back(packets[id]);
    return out;
}

void MemoryStore::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    write_packets(dir / "packets.pkts", packets, alphabet);

    nlohmann::json meta;
    meta["alphabet"] = alphabet;
    meta["gate_threshold"] = gate_threshold;
    std::vector<int> verdicts;
    verdicts.reserve(gate.size());
    for (Gate g : gate) verdicts.push_back(g == Gate::Compressible ? 0 : 1);
    meta["gate"] = verdicts;
    std::ofstream(dir / "store.json") << meta.dump(2) << '\n';

    nlohmann::json feats = nlohmann::json::array();
    for (std::size_t i = 0; i < compressible_ids.size(); ++i)
        feats.push_back({{"packet", compressible_ids[i]},
                         {"n", features[i].n},
                         {"pdf", features[i].pdf}});
    std::ofstream(dir / "features.json") << feats.dump() << '\n';

    if (clustering)
        std::ofstream(dir / "clustering.json") << clustering_to_json(*clustering) << '\n';
}

MemoryStore MemoryStore::load(const std::filesystem::path& dir) {
    std::ifstream meta_in(dir / "store.json");
    if (!meta_in) throw std::runtime_error("memory store: missing " + (dir / "store.json").string());
    nlohmann::json meta = nlohmann::json::parse(meta_in);

    PacketFile pf = read_packets(dir / "packets.pkts");
    MemoryStore store = build(std::move(pf.packets), meta.at("alphabet").get<std::uint32_t>(),
                              meta.at("gate_threshold").get<double>());

    const auto verdicts = meta.at("gate").get<std::vector<int>>();
    if (verdicts.size() != store.gate.size())
        throw std::runtime_error("memory store: gate sidecar does not match packet file");
    for (std::size_t i = 0; i < verdicts.size(); ++i)
        if ((verdicts[i] != 0) != (store.gate[i] == Gate::Incompressible))
            throw std::runtime_error("memory store: gate sidecar disagrees with recomputed gate");

    std::ifstream cl_in(dir / "clustering.json");
    if (cl_in) {
        std::string text((std::istreambuf_iterator<char>(cl_in)), std::istreambuf_iterator<char>());
        store.clustering = clustering_from_json(text);
        if (store.clustering->assignments.size() != store.features.size())
            throw std::runtime_error("memory store: clustering does not cover the memory");
    }
    return store;
}

} // namespace mixcomp
