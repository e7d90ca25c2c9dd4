#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "devstyle/model.hpp"

namespace devstyle {

/// One developer's style vector in one time bucket for one training run:
/// the attention-weighted sum of the developer's change vectors.
struct DeveloperEmbeddingSnapshot {
    int run_id = 0;
    int bucket_id = 0;
    std::int64_t entity_id = -1;
    Eigen::VectorXd vector;      // in d_b
    std::vector<double> weights; // per change, sums to 1
    std::size_t change_count = 0;
};

/// Weighted sum over the entity's changes in one bucket; the weights are the
/// softmax of the change attention logits over exactly this group.
DeveloperEmbeddingSnapshot embed_developer(std::span<const EncodedChange> changes,
                                           const ModelParameters& params, int run_id,
                                           int bucket_id, std::int64_t entity_id);

/// All (bucket, entity) groups with at least min_bucket_changes changes.
/// Group membership depends only on the data, never on the model.
std::vector<DeveloperEmbeddingSnapshot> embed_run(const std::vector<EncodedChange>& changes,
                                                  const ModelParameters& params, int run_id,
                                                  std::size_t min_bucket_changes = 1);

enum class DistanceMetric { Euclidean, Cosine };

/// Symmetric pairwise distances within one bucket, divided by their
/// off-diagonal mean (which is therefore exactly 1 afterwards).
struct NormalizedDistanceMatrix {
    int bucket_id = 0;
    int run_id = 0;
    std::vector<std::int64_t> entities; // sorted
    Eigen::MatrixXd distances;
};

/// Requires >= 2 entities in the bucket; callers exclude smaller buckets.
NormalizedDistanceMatrix normalize_bucket(
    const std::vector<DeveloperEmbeddingSnapshot>& bucket_snapshots,
    DistanceMetric metric = DistanceMetric::Euclidean);

/// Buckets with >= 2 entities, normalized; bucket ids in ascending order.
std::vector<NormalizedDistanceMatrix> normalize_run(
    const std::vector<DeveloperEmbeddingSnapshot>& snapshots,
    DistanceMetric metric, std::vector<std::string>* warnings = nullptr);

using EntityPair = std::pair<std::int64_t, std::int64_t>;

struct AveragedDistances {
    std::map<int, std::map<EntityPair, double>> buckets;
    int run_count = 0;
};

/// Entry-wise mean across runs. Every run must contribute the same
/// bucket/entity structure; a mismatch names the offending bucket or pair.
AveragedDistances average_runs(
    const std::vector<std::vector<NormalizedDistanceMatrix>>& per_run);

// File formats. Vector coordinates and distances are written with 17
// significant digits so values round-trip exactly.
void save_snapshots_jsonl(const std::vector<DeveloperEmbeddingSnapshot>& snapshots,
                          const std::string& path);
std::vector<DeveloperEmbeddingSnapshot> load_snapshots_jsonl(const std::string& path);

void save_normalized_csv(const std::vector<NormalizedDistanceMatrix>& matrices,
                         const std::string& path);
std::vector<NormalizedDistanceMatrix> load_normalized_csv(const std::string& path,
                                                          int run_id);

void save_averaged_csv(const AveragedDistances& averaged, const std::string& path);
AveragedDistances load_averaged_csv(const std::string& path);

} // namespace devstyle
