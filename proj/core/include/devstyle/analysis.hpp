#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "devstyle/embeddings.hpp"

namespace devstyle {

enum class PairLabel { Positive, Negative };

/// Unordered developer pair with a reported-learning label. Canonicalized so
/// entity_a < entity_b; duplicates and contradictory labels are rejected.
struct LabeledPair {
    std::int64_t entity_a = -1;
    std::int64_t entity_b = -1;
    PairLabel label = PairLabel::Positive;
};

/// CSV `entity_a,entity_b,label` with a required header row;
/// label is `positive` or `negative`.
std::vector<LabeledPair> load_pairs_csv(const std::string& path);
std::vector<LabeledPair> parse_pairs_csv(const std::string& content);

struct SampleValue {
    std::int64_t entity_a;
    std::int64_t entity_b;
    int bucket_id; // for movements: the later bucket of the consecutive pair
    double value;
};

struct GroupSamples {
    std::vector<SampleValue> positive;
    std::vector<SampleValue> negative;
    std::vector<LabeledPair> never_coactive; // pairs contributing zero values
};

/// One distance value per (pair, bucket) where the pair is present in the
/// averaged data, pooled per label group.
GroupSamples collect_pair_distances(const std::vector<LabeledPair>& pairs,
                                    const AveragedDistances& averaged);

/// distance(bucket t) - distance(bucket t-1) for every t where both are defined.
GroupSamples collect_movements(const std::vector<LabeledPair>& pairs,
                               const AveragedDistances& averaged);

struct KsResult {
    double d_statistic = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

/// Two-sample Kolmogorov-Smirnov test. D is the exact sup-difference of the
/// two ECDFs; p comes from the asymptotic Kolmogorov series with the usual
/// small-sample correction, truncated at 1e-12 and clamped to [0, 1].
KsResult ks_two_sample(const std::vector<double>& x, const std::vector<double>& y);

/// Exact permutation p-value (full enumeration over label reassignments);
/// only feasible for tiny samples (n1 + n2 <= 22).
double ks_permutation_p_value(const std::vector<double>& x, const std::vector<double>& y);

struct GroupStats {
    std::size_t count = 0;
    double mean = 0.0;
    double sample_variance = 0.0; // n-1 denominator
    bool small_sample = false;    // n < 2: variance reported as 0 with a flag
};

GroupStats summarize_sample(const std::vector<double>& values);

struct AnalysisReport {
    std::string token_mode;
    GroupStats distance_positive, distance_negative;
    GroupStats movement_positive, movement_negative;
    KsResult distances_ks;
    KsResult movements_ks;
    std::vector<LabeledPair> never_coactive;
};

AnalysisReport summarize(const GroupSamples& distances, const GroupSamples& movements,
                         const std::string& token_mode, bool exact_p = false);

/// Markdown report with the per-group statistics tables and KS rows.
std::string render_report_markdown(const AnalysisReport& report);

/// `entity_a,entity_b,bucket_id,value` rows in deterministic order.
void save_samples_csv(const std::vector<SampleValue>& values, const std::string& path);

} // namespace devstyle
