#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "devstyle/dataset.hpp"
#include "devstyle/identity.hpp"

namespace devstyle {

enum class SyntheticMode { TokenSeparable, StructureSeparable, Inseparable };

SyntheticMode synthetic_mode_from_string(const std::string& text);
std::string to_string(SyntheticMode mode);

/// Controllable corpus of pre-extracted method-change diffs with known
/// per-developer style signatures. Token-separable mode draws tokens from
/// per-developer pools over shared structures; structure-separable mode draws
/// path motifs from per-developer sets over a shared token pool; inseparable
/// mode shares everything.
struct SyntheticCorpusConfig {
    int developer_count = 8;
    int changes_per_developer = 300;
    int buckets = 4;
    std::uint64_t seed = 0;
    double overlap = 0.0; // share of each pool drawn from the common base pool
    SyntheticMode mode = SyntheticMode::TokenSeparable;
    /// Developers d with the same d / cluster_size share one style pool;
    /// 1 = fully individual styles.
    int cluster_size = 1;

    void validate() const;
};

/// Deterministic in the seed; diffs come out canonically oriented with
/// introduced and removed disjoint, exactly changes_per_developer per entity.
std::vector<ChangeDiffRecord> generate_synthetic_corpus(const SyntheticCorpusConfig& config);

/// Synthetic identities matching the generated entity ids, for the entity map.
std::vector<MergedEntity> synthetic_entities(const SyntheticCorpusConfig& config);

} // namespace devstyle
