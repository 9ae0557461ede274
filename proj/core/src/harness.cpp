#include "mixcomp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mixcomp/packet_io.hpp"

namespace mixcomp {

namespace {

using nlohmann::json;

std::vector<double> dirichlet_half_on(std::uint32_t alphabet, std::uint32_t lo, std::uint32_t hi,
                                      std::mt19937_64& rng) {
    std::gamma_distribution<double> gamma(0.5, 1.0);
    std::vector<double> v(alphabet, 0.0);
    double sum = 0.0;
    for (std::uint32_t s = lo; s < hi; ++s) {
        v[s] = gamma(rng);
        sum += v[s];
    }
    if (sum <= 0.0) {
        for (std::uint32_t s = lo; s < hi; ++s) v[s] = 1.0 / (hi - lo);
        return v;
    }
    for (auto& x : v) x /= sum;
    return v;
}

std::vector<double> sparse_row(std::uint32_t alphabet, const SourceConfig& sc,
                               std::mt19937_64& rng) {
    std::vector<std::uint32_t> atoms;
    auto draw_from = [&](std::uint32_t lo, std::uint32_t hi, std::uint32_t count) {
        std::uniform_int_distribution<std::uint32_t> pick(lo, hi - 1);
        for (std::uint32_t i = 0; i < count; ++i) {
            std::uint32_t a = pick(rng);
            if (std::find(atoms.begin(), atoms.end(), a) == atoms.end()) atoms.push_back(a);
        }
    };
    draw_from(sc.range_lo, sc.range_hi, sc.support_in);
    draw_from(sc.region_lo, sc.region_hi, sc.support_out);

    std::gamma_distribution<double> gamma(0.5, 1.0);
    std::vector<double> row(alphabet, 0.0);
    double sum = 0.0;
    for (std::uint32_t a : atoms) {
        row[a] = gamma(rng);
        sum += row[a];
    }
    if (sum <= 0.0) {
        for (std::uint32_t a : atoms) row[a] = 1.0 / atoms.size();
        return row;
    }
    for (auto& x : row) x /= sum;
    return row;
}

// deterministic worker pool writing results by index
template <typename Fn>
void parallel_for(std::size_t count, std::uint32_t workers, Fn&& fn) {
    std::uint32_t n_threads = workers ? workers : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<std::uint32_t>(n_threads, std::max<std::size_t>(count, 1));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n_threads);
    for (std::uint32_t t = 0; t < n_threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

SchemeStats stats_of(const std::vector<double>& bits_per_byte,
                     const std::vector<double>& model_bits) {
    SchemeStats st;
    st.packets = bits_per_byte.size();
    if (bits_per_byte.empty()) return st;
    double sum = 0.0, sum_model = 0.0;
    for (double v : bits_per_byte) sum += v;
    for (double v : model_bits) sum_model += v;
    st.mean_bits_per_byte = sum / st.packets;
    st.mean_model_bits = sum_model / st.packets;
    double var = 0.0;
    for (double v : bits_per_byte) var += (v - st.mean_bits_per_byte) * (v - st.mean_bits_per_byte);
    st.stddev_bits_per_byte = st.packets > 1 ? std::sqrt(var / (st.packets - 1)) : 0.0;
    return st;
}

json stats_json(const SchemeStats& st) {
    return {{"packets", st.packets},
            {"mean_bits_per_byte", st.mean_bits_per_byte},
            {"stddev_bits_per_byte", st.stddev_bits_per_byte},
            {"mean_model_bits", st.mean_model_bits}};
}

} // namespace

void ExperimentConfig::validate() const {
    if (!mixture && !trace)
        throw std::invalid_argument("config: either a mixture or a trace is required");
    if (mixture && trace)
        throw std::invalid_argument("config: mixture and trace are mutually exclusive");
    if (n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (schemes.empty()) throw std::invalid_argument("config: no schemes selected");
    if (codec.order != 0 && codec.order != 1)
        throw std::invalid_argument("config: codec order must be 0 or 1");
    if (!(codec.priming_weight > 0.0))
        throw std::invalid_argument("config: priming weight must be positive");
    if (cluster_k < 1) throw std::invalid_argument("config: cluster k must be >= 1");
    const bool wants_ms =
        std::find(schemes.begin(), schemes.end(), Scheme::UcompMS) != schemes.end();
    if (wants_ms && trace)
        throw std::invalid_argument("config: UcompMS needs true source indices, which traces lack");
}

MixtureSpec build_mixture(const MixtureConfig& config) {
    if (config.sources.empty()) throw std::invalid_argument("mixture: no sources");
    const std::uint32_t a = config.alphabet;

    // shared bases, one Dirichlet(1/2) draw per base id
    std::map<std::uint32_t, std::vector<double>> bases;
    for (std::size_t i = 0; i < config.sources.size(); ++i) {
        const auto& sc = config.sources[i];
        if (!sc.blend_beta) continue;
        if (bases.count(sc.blend_base)) continue;
        std::mt19937_64 rng(derive_seed(config.seed, 0x42a5e000ULL + sc.blend_base));
        const std::uint32_t lo = sc.range_lo;
        const std::uint32_t hi = sc.range_hi ? sc.range_hi : a;
        bases[sc.blend_base] = dirichlet_half_on(a, lo, hi, rng);
    }

    MixtureSpec spec;
    for (std::size_t i = 0; i < config.sources.size(); ++i) {
        const auto& sc = config.sources[i];
        const std::uint32_t lo = sc.range_lo;
        const std::uint32_t hi = sc.range_hi ? sc.range_hi : a;
        if (lo >= hi || hi > a) throw std::invalid_argument("mixture: bad symbol range");
        std::mt19937_64 rng(derive_seed(config.seed, i + 1));

        ParamSource src;
        src.alphabet = a;
        src.kind = sc.kind;
        if (sc.kind == SourceKind::Memoryless) {
            std::vector<double> theta = dirichlet_half_on(a, lo, hi, rng);
            if (sc.blend_beta) {
                const auto& base = bases.at(sc.blend_base);
                const double beta = *sc.blend_beta;
                for (std::uint32_t s = 0; s < a; ++s)
                    theta[s] = (1.0 - beta) * base[s] + beta * theta[s];
            }
            src.symbol_probs = std::move(theta);
        } else {
            src.rows.reserve(a);
            const bool sparse = sc.support_in > 0 || sc.support_out > 0;
            for (std::uint32_t s = 0; s < a; ++s) {
                if (sparse) {
                    SourceConfig sr = sc;
                    sr.range_hi = hi;
                    if (sr.region_hi == 0) {
                        sr.region_lo = lo;
                        sr.region_hi = hi;
                    }
                    src.rows.push_back(sparse_row(a, sr, rng));
                } else {
                    src.rows.push_back(dirichlet_half_on(a, lo, hi, rng));
                }
            }
            src.initial = stationary_distribution(src.rows);
        }
        src.validate();
        spec.sources.push_back(std::move(src));
    }
    if (config.weights.empty())
        spec.weights.assign(spec.sources.size(), 1.0 / spec.sources.size());
    else
        spec.weights = config.weights;
    spec.validate();
    return spec;
}

MemoryStore ingest_trace(const std::filesystem::path& path, double gate_threshold) {
    PacketFile file = read_packets(path);
    return MemoryStore::build(std::move(file.packets), file.alphabet, gate_threshold);
}

RedundancyReport limits_report(const ExperimentConfig& config) {
    config.validate();
    if (!config.mixture)
        throw std::invalid_argument("limits: a mixture description is required");
    const MixtureSpec spec = build_mixture(*config.mixture);
    const std::uint64_t m = std::uint64_t(config.n) * config.memory_packets;
    const LimitInputs inputs = LimitInputs::from_mixture(spec, config.n, m);
    return build_report(inputs, config.limits_delta, config.limits_hysteresis);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();

    MixtureSpec spec;
    MemoryStore memory;
    std::vector<Packet> test;
    if (config.mixture) {
        spec = build_mixture(*config.mixture);
        SideInfo side = generate_side_info(spec, config.n, config.memory_packets,
                                           config.memory_seed);
        memory = MemoryStore::build(std::move(side.packets), spec.alphabet(),
                                    config.gate_threshold);
        for (std::uint32_t t = 0; t < config.test_packets; ++t) {
            const std::uint64_t pick = derive_seed(config.test_seed, 2 * std::uint64_t(t));
            const std::uint64_t gen = derive_seed(config.test_seed, 2 * std::uint64_t(t) + 1);
            const std::size_t z = draw_index(spec, pick);
            Packet p = generate(spec.sources[z], config.n, gen);
            p.source_index = static_cast<std::int32_t>(z);
            test.push_back(std::move(p));
        }
    } else {
        MemoryStore full = ingest_trace(*config.trace, config.gate_threshold);
        // later packets of the trace become the test set
        if (config.test_packets >= full.size())
            throw std::invalid_argument("config: trace too small for the requested test set");
        std::vector<Packet> mem_packets(full.packets.begin(),
                                        full.packets.end() - config.test_packets);
        test.assign(full.packets.end() - config.test_packets, full.packets.end());
        memory = MemoryStore::build(std::move(mem_packets), full.alphabet,
                                    config.gate_threshold);
    }

    ExperimentReport report;
    report.memory_rejected = static_cast<std::uint32_t>(memory.rejected_count());
    report.config_json = config_to_json(config);

    const bool wants_mc =
        std::find(config.schemes.begin(), config.schemes.end(), Scheme::UcompMc) !=
        config.schemes.end();
    if (wants_mc && memory.compressible_count() > 0) {
        memory.cluster(config.cluster_k, config.kmeans);
        report.nonempty_clusters = memory.clustering->nonempty_count;
        if (memory.has_true_indices()) {
            std::vector<std::int32_t> truth;
            for (std::uint32_t id : memory.compressible_ids)
                truth.push_back(memory.packets[id].source_index);
            report.clustering_ari =
                adjusted_rand_index(truth, memory.clustering->assignments);
        }
    }

    // gate test packets; rejected ones are sent raw at 8 bits/byte
    std::vector<const Packet*> coded;
    for (const Packet& p : test) {
        if (compressibility_gate(p, memory.alphabet, config.gate_threshold) ==
            Gate::Compressible)
            coded.push_back(&p);
        else
            ++report.test_rejected;
    }

    SchemePrimer primer(memory, config.codec);
    for (Scheme scheme : config.schemes) {
        std::vector<double> bpb(coded.size());
        std::vector<double> model_bits(coded.size());
        std::vector<std::int32_t> sources(coded.size());
        const std::uint32_t header_bits =
            scheme == Scheme::UcompMc ? primer.cluster_header_bits() : 0;

        // classification and lazy priming happen sequentially; the encode
        // pass then only reads the materialized models
        std::vector<const KTModel*> models(coded.size());
        for (std::size_t i = 0; i < coded.size(); ++i) {
            std::optional<std::uint16_t> id;
            models[i] = &primer.model_for(scheme, *coded[i], id);
        }
        parallel_for(coded.size(), config.workers, [&](std::size_t i) {
            const Packet& p = *coded[i];
            CodecOutput out = encode(p, *models[i]);
            bpb[i] = double(out.codelength_bits + header_bits) / p.length();
            model_bits[i] = out.model_bits;
            sources[i] = p.source_index;
        });

        report.overall[scheme_name(scheme)] = stats_of(bpb, model_bits);
        std::map<std::int32_t, std::vector<double>> by_src_bpb, by_src_model;
        for (std::size_t i = 0; i < coded.size(); ++i) {
            by_src_bpb[sources[i]].push_back(bpb[i]);
            by_src_model[sources[i]].push_back(model_bits[i]);
        }
        for (const auto& [src, vals] : by_src_bpb)
            report.per_source[scheme_name(scheme)][src] = stats_of(vals, by_src_model[src]);
    }

    if (config.mixture) {
        const LimitInputs inputs = LimitInputs::from_mixture(
            spec, config.n, memory.compressible_symbols());
        report.limits = build_report(inputs, config.limits_delta, config.limits_hysteresis);
    }
    return report;
}

// --- JSON wiring -----------------------------------------------------------

ExperimentConfig config_from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig cfg;
    if (j.contains("mixture")) {
        const json& jm = j.at("mixture");
        MixtureConfig mc;
        mc.alphabet = jm.value("alphabet", 256u);
        mc.seed = jm.value("seed", 1ull);
        if (jm.contains("weights")) mc.weights = jm.at("weights").get<std::vector<double>>();
        for (const json& js : jm.at("sources")) {
            SourceConfig sc;
            const std::string kind = js.value("kind", "memoryless");
            if (kind == "memoryless")
                sc.kind = SourceKind::Memoryless;
            else if (kind == "markov1")
                sc.kind = SourceKind::MarkovOrder1;
            else
                throw std::invalid_argument("mixture: unknown source kind " + kind);
            if (js.contains("range")) {
                sc.range_lo = js.at("range").at(0).get<std::uint32_t>();
                sc.range_hi = js.at("range").at(1).get<std::uint32_t>();
            }
            if (js.contains("blend")) {
                sc.blend_beta = js.at("blend").at("beta").get<double>();
                sc.blend_base = js.at("blend").value("base", 0u);
            }
            if (js.contains("region")) {
                sc.region_lo = js.at("region").at(0).get<std::uint32_t>();
                sc.region_hi = js.at("region").at(1).get<std::uint32_t>();
            }
            sc.support_in = js.value("support_in", 0u);
            sc.support_out = js.value("support_out", 0u);
            mc.sources.push_back(sc);
        }
        cfg.mixture = std::move(mc);
    }
    if (j.contains("trace")) cfg.trace = j.at("trace").get<std::string>();
    cfg.n = j.value("n", 1500u);
    cfg.memory_packets = j.value("memory_packets", 0u);
    cfg.test_packets = j.value("test_packets", 0u);
    if (j.contains("schemes"))
        for (const auto& s : j.at("schemes")) cfg.schemes.push_back(scheme_from_name(s));
    if (j.contains("codec")) {
        cfg.codec.order = j.at("codec").value("order", 0);
        cfg.codec.priming_weight = j.at("codec").value("priming_weight", 1.0);
    }
    if (j.contains("clustering")) {
        const json& jc = j.at("clustering");
        cfg.cluster_k = jc.value("k", 8u);
        cfg.gate_threshold = jc.value("gate_threshold", 7.5);
        cfg.kmeans.max_iters = jc.value("max_iters", 100u);
        cfg.kmeans.tol = jc.value("tol", 1e-9);
        cfg.kmeans.seed = jc.value("seed", 0ull);
        cfg.kmeans.seed_gap_ratio = jc.value("seed_gap_ratio", 2.0);
    }
    if (j.contains("limits")) {
        cfg.limits_delta = j.at("limits").value("delta", 0.0);
        cfg.limits_hysteresis = j.at("limits").value("hysteresis", 1.0);
    }
    if (j.contains("seeds")) {
        cfg.memory_seed = j.at("seeds").value("memory", 1ull);
        cfg.test_seed = j.at("seeds").value("test", 2ull);
    }
    cfg.workers = j.value("workers", 0u);
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    if (cfg.mixture) {
        json jm;
        jm["alphabet"] = cfg.mixture->alphabet;
        jm["seed"] = cfg.mixture->seed;
        if (!cfg.mixture->weights.empty()) jm["weights"] = cfg.mixture->weights;
        auto& arr = jm["sources"] = json::array();
        for (const auto& sc : cfg.mixture->sources) {
            json js;
            js["kind"] = sc.kind == SourceKind::Memoryless ? "memoryless" : "markov1";
            if (sc.range_hi) js["range"] = {sc.range_lo, sc.range_hi};
            if (sc.blend_beta) js["blend"] = {{"beta", *sc.blend_beta}, {"base", sc.blend_base}};
            if (sc.region_hi) js["region"] = {sc.region_lo, sc.region_hi};
            if (sc.support_in) js["support_in"] = sc.support_in;
            if (sc.support_out) js["support_out"] = sc.support_out;
            arr.push_back(std::move(js));
        }
        j["mixture"] = std::move(jm);
    }
    if (cfg.trace) j["trace"] = cfg.trace->string();
    j["n"] = cfg.n;
    j["memory_packets"] = cfg.memory_packets;
    j["test_packets"] = cfg.test_packets;
    auto& schemes = j["schemes"] = json::array();
    for (Scheme s : cfg.schemes) schemes.push_back(scheme_name(s));
    j["codec"] = {{"order", cfg.codec.order}, {"priming_weight", cfg.codec.priming_weight}};
    j["clustering"] = {{"k", cfg.cluster_k},
                       {"gate_threshold", cfg.gate_threshold},
                       {"max_iters", cfg.kmeans.max_iters},
                       {"tol", cfg.kmeans.tol},
                       {"seed", cfg.kmeans.seed},
                       {"seed_gap_ratio", cfg.kmeans.seed_gap_ratio}};
    j["limits"] = {{"delta", cfg.limits_delta}, {"hysteresis", cfg.limits_hysteresis}};
    j["seeds"] = {{"memory", cfg.memory_seed}, {"test", cfg.test_seed}};
    j["workers"] = cfg.workers;
    return j.dump(2);
}

std::string experiment_report_to_json(const ExperimentReport& report) {
    json j;
    j["limits"] = json::parse(report_to_json(report.limits));
    auto& overall = j["measured"] = json::object();
    for (const auto& [name, st] : report.overall) overall[name] = stats_json(st);
    auto& per_source = j["per_source"] = json::object();
    for (const auto& [name, by_src] : report.per_source) {
        json& js = per_source[name] = json::object();
        for (const auto& [src, st] : by_src) js[std::to_string(src)] = stats_json(st);
    }
    j["memory_rejected"] = report.memory_rejected;
    j["test_rejected"] = report.test_rejected;
    if (report.clustering_ari) j["clustering_ari"] = *report.clustering_ari;
    j["nonempty_clusters"] = report.nonempty_clusters;
    j["config"] = json::parse(report.config_json);
    return j.dump(2);
}

std::string experiment_report_to_csv(const ExperimentReport& report, std::uint32_t n,
                                     std::uint32_t memory_packets, std::uint32_t cluster_k) {
    std::ostringstream csv;
    csv << "scheme,source,mean_bits_per_byte,stddev,n,T,k\n";
    csv.precision(10);
    for (const auto& [name, st] : report.overall)
        csv << name << ",all," << st.mean_bits_per_byte << ',' << st.stddev_bits_per_byte << ','
            << n << ',' << memory_packets << ',' << cluster_k << '\n';
    for (const auto& [name, by_src] : report.per_source)
        for (const auto& [src, st] : by_src)
            csv << name << ',' << src << ',' << st.mean_bits_per_byte << ','
                << st.stddev_bits_per_byte << ',' << n << ',' << memory_packets << ','
                << cluster_k << '\n';
    return csv.str();
}

} // namespace mixcomp
