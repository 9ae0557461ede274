#include <cstring>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mixcomp/codec.hpp"
#include "mixcomp/harness.hpp"
#include "mixcomp/packet_io.hpp"

namespace {

using namespace mixcomp;

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

// compressed stream file:
//   magic "MXC1", u8 version, u8 alphabet flag, u8 order,
//   f64 priming weight, f64 gate threshold, u32 container count, containers
constexpr char kMagic[4] = {'M', 'X', 'C', '1'};

std::uint8_t alphabet_flag_of(std::uint32_t a) {
    if (a == 256) return 0;
    for (std::uint8_t e = 1; e <= 8; ++e)
        if ((1u << e) == a) return e;
    throw std::runtime_error("alphabet size must be a power of two in [2, 256]");
}

std::uint32_t alphabet_of_flag(std::uint8_t flag) {
    if (flag == 0) return 256;
    if (flag <= 8) return 1u << flag;
    throw std::runtime_error("bad alphabet flag in compressed file");
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t((v >> (8 * i)) & 0xff));
}

void append_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t((bits >> (8 * i)) & 0xff));
}

struct StreamHeader {
    std::uint32_t alphabet = 256;
    std::uint8_t order = 0;
    double priming_weight = 1.0;
    double gate_threshold = 7.5;
    std::uint32_t count = 0;
    std::size_t header_bytes = 0;
};

StreamHeader parse_stream_header(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 27 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw std::runtime_error("not a mixcomp compressed file");
    if (bytes[4] != 1) throw std::runtime_error("unsupported compressed file version");
    StreamHeader h;
    h.alphabet = alphabet_of_flag(bytes[5]);
    h.order = bytes[6];
    std::uint64_t w = 0, g = 0;
    for (int i = 0; i < 8; ++i) w |= std::uint64_t(bytes[7 + i]) << (8 * i);
    for (int i = 0; i < 8; ++i) g |= std::uint64_t(bytes[15 + i]) << (8 * i);
    std::memcpy(&h.priming_weight, &w, 8);
    std::memcpy(&h.gate_threshold, &g, 8);
    h.count = std::uint32_t(bytes[23]) | (std::uint32_t(bytes[24]) << 8) |
              (std::uint32_t(bytes[25]) << 16) | (std::uint32_t(bytes[26]) << 24);
    h.header_bytes = 27;
    return h;
}

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

MemoryStore load_memory(const std::string& path, double gate, const std::string& clustering_path) {
    MemoryStore store = ingest_trace(path, gate);
    if (!clustering_path.empty())
        store.clustering = clustering_from_json(slurp(clustering_path));
    return store;
}

int cmd_generate(const std::string& config_path, const std::string& out,
                 const std::string& test_out) {
    const ExperimentConfig cfg = config_from_json(slurp(config_path));
    if (!cfg.mixture) throw std::runtime_error("generate needs a mixture in the config");
    const MixtureSpec spec = build_mixture(*cfg.mixture);
    const SideInfo side = generate_side_info(spec, cfg.n, cfg.memory_packets, cfg.memory_seed);
    write_packets(out, side.packets, spec.alphabet());
    std::cout << "wrote " << side.packets.size() << " memory packets (n=" << cfg.n << ") to "
              << out << '\n';
    if (!test_out.empty()) {
        std::vector<Packet> test;
        for (std::uint32_t t = 0; t < cfg.test_packets; ++t) {
            const std::size_t z = draw_index(spec, derive_seed(cfg.test_seed, 2 * std::uint64_t(t)));
            Packet p = generate(spec.sources[z], cfg.n, derive_seed(cfg.test_seed, 2 * std::uint64_t(t) + 1));
            p.source_index = static_cast<std::int32_t>(z);
            test.push_back(std::move(p));
        }
        write_packets(test_out, test, spec.alphabet());
        std::cout << "wrote " << test.size() << " test packets to " << test_out << '\n';
    }
    return 0;
}

int cmd_cluster(const std::string& memory_path, std::uint32_t k, double gate, std::uint64_t seed,
                double gap_ratio, const std::string& out) {
    MemoryStore store = ingest_trace(memory_path, gate);
    KMeansConfig kc;
    kc.seed = seed;
    kc.seed_gap_ratio = gap_ratio;
    store.cluster(k, kc);
    spit(out, clustering_to_json(*store.clustering));
    std::cout << "clustered " << store.compressible_count() << " compressible packets ("
              << store.rejected_count() << " gate-rejected) into "
              << store.clustering->nonempty_count << " nonempty of " << k << " clusters; J="
              << store.clustering->objective << '\n';
    return 0;
}

int cmd_compress(const std::string& input, const std::string& memory_path,
                 const std::string& clustering_path, const std::string& scheme_name_arg,
                 int order, double weight, double gate, const std::string& out) {
    const Scheme scheme = scheme_from_name(scheme_name_arg);
    const PacketFile in = read_packets(input);
    MemoryStore store =
        memory_path.empty()
            ? MemoryStore::build({}, in.alphabet, gate)
            : load_memory(memory_path, gate, clustering_path);
    if (store.alphabet != in.alphabet)
        throw std::runtime_error("input and memory alphabets differ");

    SchemeConfig cc{order, weight};
    std::vector<std::uint8_t> blob;
    blob.insert(blob.end(), kMagic, kMagic + 4);
    blob.push_back(1);
    blob.push_back(alphabet_flag_of(in.alphabet));
    blob.push_back(std::uint8_t(order));
    append_f64(blob, weight);
    append_f64(blob, gate);
    append_u32(blob, std::uint32_t(in.packets.size()));

    double total_bits = 0, total_syms = 0;
    for (const Packet& p : in.packets) {
        const auto container = compress_to_container(p, store, scheme, cc);
        const auto parsed = parse_container(container);
        total_bits += double(parsed.packet.body.codelength_bits);
        total_syms += p.length();
        blob.insert(blob.end(), container.begin(), container.end());
    }
    std::ofstream of(out, std::ios::binary);
    of.write(reinterpret_cast<const char*>(blob.data()), std::streamsize(blob.size()));
    if (!of) throw std::runtime_error("write failed: " + out);
    std::cout << scheme_name(scheme) << ": " << in.packets.size() << " packets, "
              << (total_syms > 0 ? total_bits / total_syms : 0.0) << " bits/byte, "
              << blob.size() << " bytes total\n";
    return 0;
}

int cmd_decompress(const std::string& input, const std::string& memory_path,
                   const std::string& clustering_path, const std::string& out) {
    const auto blob = read_binary(input);
    const StreamHeader h = parse_stream_header(blob);
    MemoryStore store = memory_path.empty()
                            ? MemoryStore::build({}, h.alphabet, h.gate_threshold)
                            : load_memory(memory_path, h.gate_threshold, clustering_path);
    SchemeConfig cc{int(h.order), h.priming_weight};

    std::vector<Packet> packets;
    std::size_t pos = h.header_bytes;
    for (std::uint32_t i = 0; i < h.count; ++i) {
        std::size_t consumed = 0;
        packets.push_back(decompress_container(
            std::span<const std::uint8_t>(blob).subspan(pos), store, cc, &consumed));
        pos += consumed;
    }
    write_packets(out, packets, h.alphabet);
    std::cout << "decoded " << packets.size() << " packets to " << out << '\n';
    return 0;
}

int cmd_limits(const std::string& config_path, const std::string& out) {
    const ExperimentConfig cfg = config_from_json(slurp(config_path));
    const std::string text = report_to_json(limits_report(cfg));
    if (out.empty())
        std::cout << text << '\n';
    else
        spit(out, text);
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const ExperimentConfig cfg = config_from_json(slurp(config_path));
    const ExperimentReport report = run_experiment(cfg);
    std::filesystem::create_directories(out_dir);
    spit(std::filesystem::path(out_dir) / "report.json", experiment_report_to_json(report));
    spit(std::filesystem::path(out_dir) / "results.csv",
         experiment_report_to_csv(report, cfg.n, cfg.memory_packets, cfg.cluster_k));
    for (const auto& [name, st] : report.overall)
        std::cout << name << ": mean " << st.mean_bits_per_byte << " bits/byte over "
                  << st.packets << " packets\n";
    if (report.clustering_ari)
        std::cout << "clustering ARI vs true indices: " << *report.clustering_ari << '\n';
    std::cout << "gate-rejected: " << report.memory_rejected << " memory, "
              << report.test_rejected << " test\n";
    std::cout << "report written to " << out_dir << "/report.json\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"memory-assisted universal compression toolkit"};
    app.require_subcommand(1);

    std::string config_path, out, test_out, memory_path, clustering_path, input, scheme = "Ucomp";
    std::uint32_t k = 8;
    std::uint64_t seed = 0;
    double gate = 7.5, weight = 1.0, gap_ratio = 2.0;
    int order = 0;

    auto* generate = app.add_subcommand("generate", "generate memory/test packets from a mixture");
    generate->add_option("--config", config_path)->required();
    generate->add_option("--out", out)->required();
    generate->add_option("--test-out", test_out);

    auto* cluster = app.add_subcommand("cluster", "gate and cluster a packet file");
    cluster->add_option("--memory", memory_path)->required();
    cluster->add_option("--k", k);
    cluster->add_option("--gate", gate);
    cluster->add_option("--seed", seed);
    cluster->add_option("--gap-ratio", gap_ratio);
    cluster->add_option("--out", out)->required();

    auto* compress = app.add_subcommand("compress", "compress a packet file under one scheme");
    compress->add_option("--input", input)->required();
    compress->add_option("--memory", memory_path);
    compress->add_option("--clustering", clustering_path);
    compress->add_option("--scheme", scheme);
    compress->add_option("--order", order);
    compress->add_option("--priming-weight", weight);
    compress->add_option("--gate", gate);
    compress->add_option("--out", out)->required();

    auto* decompress = app.add_subcommand("decompress", "decode a compressed stream");
    decompress->add_option("--input", input)->required();
    decompress->add_option("--memory", memory_path);
    decompress->add_option("--clustering", clustering_path);
    decompress->add_option("--out", out)->required();

    auto* limits = app.add_subcommand("limits", "theoretical redundancy report for a config");
    limits->add_option("--config", config_path)->required();
    limits->add_option("--out", out);

    auto* run = app.add_subcommand("run", "full experiment: generate, cluster, compress, report");
    run->add_option("--config", config_path)->required();
    run->add_option("--out-dir", out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(config_path, out, test_out);
        if (cluster->parsed()) return cmd_cluster(memory_path, k, gate, seed, gap_ratio, out);
        if (compress->parsed())
            return cmd_compress(input, memory_path, clustering_path, scheme, order, weight, gate, out);
        if (decompress->parsed()) return cmd_decompress(input, memory_path, clustering_path, out);
        if (limits->parsed()) return cmd_limits(config_path, out);
        if (run->parsed()) return cmd_run(config_path, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
