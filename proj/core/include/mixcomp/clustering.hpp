#ifndef MIXCOMP_CLUSTERING_HPP
#define MIXCOMP_CLUSTERING_HPP

#include <span>
#include <string>
#include <vector>

#include "mixcomp/features.hpp"

namespace mixcomp {

struct KMeansConfig {
    std::uint32_t max_iters = 100;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    /// Farthest-point seeding stops planting distinct seeds at the largest
    /// ratio gap of the maximin-distance sequence when that ratio reaches
    /// this value; surplus seeds duplicate earlier ones and empty out on the
    /// first assignment. 0 disables the rule (all seeds distinct).
    double seed_gap_ratio = 2.0;
};

struct Clustering {
    std::uint32_t k = 0;
    std::vector<FeatureVector> centers;
    std::vector<std::uint32_t> assignments;   // packet -> cluster id
    std::vector<bool> nonempty;
    double objective = 0.0;                   // J = sum_t d_H(q_t, u_{c(t)})
    std::vector<double> objective_trace;      // J after each iteration
    std::uint32_t nonempty_count = 0;
};

struct SubClusterIndex {
    std::uint32_t requested = 0;
    std::vector<FeatureVector> centers;                 // nonempty sub-clusters only
    std::vector<std::vector<std::uint32_t>> members;    // parallel to centers
};

struct TrainingSelection {
    std::vector<std::uint32_t> packet_ids;
    std::vector<std::uint32_t> merged_subclusters;      // in merge (distance) order
};

/// Lloyd iteration under the Hellinger metric: nearest-center assignment
/// (ties to the lowest id) alternating with pooled-count center updates.
/// The objective is non-increasing on every iteration; clusters that lose
/// all members stay empty for the rest of the run.
Clustering kmeans(std::span<const FeatureVector> features, std::uint32_t k,
                  const KMeansConfig& config = {});

/// Fine-grained partition of the memory used for nearest-neighbour training
/// set selection; m may not exceed the number of features.
SubClusterIndex build_subclusters(std::span<const FeatureVector> features, std::uint32_t m,
                                  const KMeansConfig& config = {});

/// Greedily merges nearest sub-clusters until at least min_training_num
/// packets are collected or the memory is exhausted.
TrainingSelection knearest_training_set(const FeatureVector& x, const SubClusterIndex& index,
                                        std::uint32_t min_training_num);

/// Nearest nonempty cluster by Hellinger distance; ties go to the lowest id.
/// Throws std::invalid_argument when every cluster is empty.
std::uint32_t classify(const FeatureVector& x, const Clustering& clustering);

double adjusted_rand_index(std::span<const std::int32_t> truth,
                           std::span<const std::uint32_t> labels);

std::string clustering_to_json(const Clustering& c);
Clustering clustering_from_json(const std::string& text);

} // namespace mixcomp

#endif
