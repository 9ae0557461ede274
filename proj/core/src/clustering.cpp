#include "mixcomp/clustering.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace mixcomp {

namespace {

// seeds chosen by farthest-point traversal; a sharp scale gap in the maximin
// sequence marks where genuine modes end, surplus seeds duplicate earlier
// centers and die on the first assignment pass
std::vector<std::size_t> seed_centers(std::span<const FeatureVector> features, std::uint32_t k,
                                      const KMeansConfig& cfg) {
    const std::size_t t_count = features.size();
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> picks;
    picks.reserve(k);
    picks.push_back(std::uniform_int_distribution<std::size_t>(0, t_count - 1)(rng));

    std::vector<double> dmin(t_count);
    for (std::size_t t = 0; t < t_count; ++t)
        dmin[t] = hellinger(features[t], features[picks[0]]);

    std::vector<double> maximins;
    for (std::uint32_t j = 1; j < k; ++j) {
        std::size_t best = 0;
        for (std::size_t t = 1; t < t_count; ++t)
            if (dmin[t] > dmin[best]) best = t;
        maximins.push_back(dmin[best]);
        picks.push_back(best);
        for (std::size_t t = 0; t < t_count; ++t)
            dmin[t] = std::min(dmin[t], hellinger(features[t], features[best]));
    }

    if (cfg.seed_gap_ratio > 0.0 && maximins.size() >= 2) {
        double best_ratio = 0.0;
        std::size_t cut = maximins.size();
        for (std::size_t i = 0; i + 1 < maximins.size(); ++i) {
            const double ratio = maximins[i + 1] > 0.0
                                     ? maximins[i] / maximins[i + 1]
                                     : (maximins[i] > 0.0 ? std::numeric_limits<double>::infinity()
                                                          : 0.0);
            if (ratio > best_ratio) {
                best_ratio = ratio;
                cut = i + 1;
            }
        }
        if (best_ratio >= cfg.seed_gap_ratio) {
            const std::size_t distinct = 1 + cut;  // first pick + accepted maximin picks
            for (std::size_t j = distinct; j < picks.size(); ++j)
                picks[j] = picks[j % distinct];
        }
    }
    return picks;
}

FeatureVector pooled_center(std::span<const FeatureVector> features,
                            std::span<const std::uint32_t> assignments, std::uint32_t cluster,
                            std::size_t alphabet) {
    FeatureVector c;
    c.pdf.assign(alphabet, 0.0);
    double total = 0.0;
    for (std::size_t t = 0; t < features.size(); ++t) {
        if (assignments[t] != cluster) continue;
        const auto& f = features[t];
        for (std::size_t a = 0; a < alphabet; ++a) c.pdf[a] += f.pdf[a] * f.n;
        total += f.n;
    }
    if (total > 0.0)
        for (auto& p : c.pdf) p /= total;
    c.n = static_cast<std::uint32_t>(total);
    return c;
}

} // namespace

Clustering kmeans(std::span<const FeatureVector> features, std::uint32_t k,
                  const KMeansConfig& config) {
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (features.empty()) throw std::invalid_argument("kmeans: no features");
    const std::size_t alphabet = features.front().pdf.size();
    const std::size_t t_count = features.size();

    Clustering cl;
    cl.k = k;
    cl.centers.reserve(k);
    for (std::size_t pick : seed_centers(features, k, config)) cl.centers.push_back(features[pick]);
    cl.assignments.assign(t_count, 0);
    std::vector<bool> live(k, true);

    double prev_j = std::numeric_limits<double>::infinity();
    for (std::uint32_t iter = 0; iter < config.max_iters; ++iter) {
        // assignment: nearest live center, ties to the lowest id
        double j_value = 0.0;
        for (std::size_t t = 0; t < t_count; ++t) {
            double best = std::numeric_limits<double>::infinity();
            std::uint32_t arg = 0;
            for (std::uint32_t c = 0; c < k; ++c) {
                if (!live[c]) continue;
                const double d = hellinger(features[t], cl.centers[c]);
                if (d < best) {
                    best = d;
                    arg = c;
                }
            }
            cl.assignments[t] = arg;
            j_value += best;
        }
        std::vector<std::uint32_t> occupancy(k, 0);
        for (auto a : cl.assignments) ++occupancy[a];
        for (std::uint32_t c = 0; c < k; ++c)
            if (occupancy[c] == 0) live[c] = false;

        // center update: pooled counts, kept only when it does not worsen the
        // members' distance sum, so the objective cannot increase
        for (std::uint32_t c = 0; c < k; ++c) {
            if (occupancy[c] == 0) continue;
            FeatureVector pooled = pooled_center(features, cl.assignments, c, alphabet);
            double old_sum = 0.0, new_sum = 0.0;
            for (std::size_t t = 0; t < t_count; ++t) {
                if (cl.assignments[t] != c) continue;
                old_sum += hellinger(features[t], cl.centers[c]);
                new_sum += hellinger(features[t], pooled);
            }
            if (new_sum <= old_sum) {
                cl.centers[c] = std::move(pooled);
                j_value += new_sum - old_sum;
            }
        }

        if (j_value > prev_j + 1e-9)
            throw std::logic_error("kmeans: objective increased across an iteration");
        cl.objective_trace.push_back(j_value);
        cl.objective = j_value;
        if (prev_j - j_value < config.tol) break;
        prev_j = j_value;
    }

    cl.nonempty.assign(k, false);
    for (auto a : cl.assignments) cl.nonempty[a] = true;
    cl.nonempty_count = static_cast<std::uint32_t>(
        std::count(cl.nonempty.begin(), cl.nonempty.end(), true));
    return cl;
}

SubClusterIndex build_subclusters(std::span<const FeatureVector> features, std::uint32_t m,
                                  const KMeansConfig& config) {
    if (m > features.size())
        throw std::invalid_argument("build_subclusters: m exceeds packet count");
    KMeansConfig cfg = config;
    cfg.seed_gap_ratio = 0.0;  // fine-grained splitting is the point here
    Clustering cl = kmeans(features, m, cfg);
    SubClusterIndex index;
    index.requested = m;
    for (std::uint32_t c = 0; c < cl.k; ++c) {
        if (!cl.nonempty[c]) continue;
        index.centers.push_back(cl.centers[c]);
        index.members.emplace_back();
        for (std::size_t t = 0; t < features.size(); ++t)
            if (cl.assignments[t] == c)
                index.members.back().push_back(static_cast<std::uint32_t>(t));
    }
    return index;
}

TrainingSelection knearest_training_set(const FeatureVector& x, const SubClusterIndex& index,
                                        std::uint32_t min_training_num) {
    if (min_training_num < 1)
        throw std::invalid_argument("knearest_training_set: min_training_num must be >= 1");
    std::vector<std::pair<double, std::uint32_t>> order;
    order.reserve(index.centers.size());
    for (std::uint32_t i = 0; i < index.centers.size(); ++i)
        order.emplace_back(hellinger(x, index.centers[i]), i);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    TrainingSelection sel;
    for (const auto& [dist, i] : order) {
        if (sel.packet_ids.size() >= min_training_num) break;
        sel.merged_subclusters.push_back(i);
        const auto& mem = index.members[i];
        sel.packet_ids.insert(sel.packet_ids.end(), mem.begin(), mem.end());
    }
    return sel;
}

std::uint32_t classify(const FeatureVector& x, const Clustering& clustering) {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t arg = 0;
    bool found = false;
    for (std::uint32_t c = 0; c < clustering.k; ++c) {
        if (!clustering.nonempty[c]) continue;
        const double d = hellinger(x, clustering.centers[c]);
        if (d < best) {
            best = d;
            arg = c;
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("classify: all clusters are empty");
    return arg;
}

double adjusted_rand_index(std::span<const std::int32_t> truth,
                           std::span<const std::uint32_t> labels) {
    if (truth.size() != labels.size())
        throw std::invalid_argument("adjusted_rand_index: length mismatch");
    const auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
    std::map<std::pair<std::int32_t, std::uint32_t>, std::uint64_t> cells;
    std::map<std::int32_t, std::uint64_t> rows;
    std::map<std::uint32_t, std::uint64_t> cols;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++cells[{truth[i], labels[i]}];
        ++rows[truth[i]];
        ++cols[labels[i]];
    }
    double sij = 0.0, sa = 0.0, sb = 0.0;
    for (const auto& [key, v] : cells) sij += c2(double(v));
    for (const auto& [key, v] : rows) sa += c2(double(v));
    for (const auto& [key, v] : cols) sb += c2(double(v));
    const double expected = sa * sb / c2(double(truth.size()));
    const double max_index = 0.5 * (sa + sb);
    if (max_index == expected) return 1.0;
    return (sij - expected) / (max_index - expected);
}

std::string clustering_to_json(const Clustering& c) {
    nlohmann::json j;
    j["k"] = c.k;
    j["objective"] = c.objective;
    j["objective_trace"] = c.objective_trace;
    j["nonempty_count"] = c.nonempty_count;
    j["assignments"] = c.assignments;
    j["nonempty"] = std::vector<int>(c.nonempty.begin(), c.nonempty.end());
    auto& centers = j["centers"] = nlohmann::json::array();
    for (const auto& u : c.centers) centers.push_back({{"n", u.n}, {"pdf", u.pdf}});
    return j.dump(2);
}

Clustering clustering_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Clustering c;
    c.k = j.at("k").get<std::uint32_t>();
    c.objective = j.at("objective").get<double>();
    c.objective_trace = j.at("objective_trace").get<std::vector<double>>();
    c.nonempty_count = j.at("nonempty_count").get<std::uint32_t>();
    c.assignments = j.at("assignments").get<std::vector<std::uint32_t>>();
    for (int b : j.at("nonempty").get<std::vector<int>>()) c.nonempty.push_back(b != 0);
    for (const auto& u : j.at("centers")) {
        FeatureVector f;
        f.n = u.at("n").get<std::uint32_t>();
        f.pdf = u.at("pdf").get<std::vector<double>>();
        c.centers.push_back(std::move(f));
    }
    if (c.centers.size() != c.k || c.nonempty.size() != c.k)
        throw std::runtime_error("clustering snapshot: inconsistent sizes");
    return c;
}

} // namespace mixcomp
