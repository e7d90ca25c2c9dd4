#include "devstyle/synthetic.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "devstyle/rng.hpp"

namespace devstyle {

namespace {

constexpr int kTokenPoolSize = 40;
constexpr int kPathPoolSize = 24;

// Inner node kinds shared by every motif; the apex kind carries the style.
const char* kInnerKinds[] = {"B", "IE", "MI", "ES", "RS", "IF"};

std::string token_name(int style, int slot, int base_cut) {
    if (slot < base_cut) return "basetok" + std::to_string(slot);
    return "s" + std::to_string(style) + "tok" + std::to_string(slot);
}

/// Symmetric serialized path (palindromic kinds, ups == downs), so reversing
/// it for canonical orientation is the identity.
std::string path_motif(int style, int slot, int base_cut, Rng& rng) {
    const std::string apex = (slot < base_cut ? "KB" : "KS" + std::to_string(style)) + "n" +
                             std::to_string(slot);
    const int depth = 1 + static_cast<int>(rng.next_below(3)); // 1..3 edges per side
    std::vector<std::string> up = {"SN"};
    for (int i = 1; i < depth; ++i) {
        up.push_back(kInnerKinds[rng.next_below(std::size(kInnerKinds))]);
    }
    std::string out;
    for (const auto& k : up) {
        out += k;
        out += '^';
    }
    out += apex;
    for (auto it = up.rbegin(); it != up.rend(); ++it) {
        out += '_';
        out += *it;
    }
    return out;
}

} // namespace

SyntheticMode synthetic_mode_from_string(const std::string& text) {
    if (text == "token-separable") return SyntheticMode::TokenSeparable;
    if (text == "structure-separable") return SyntheticMode::StructureSeparable;
    if (text == "inseparable") return SyntheticMode::Inseparable;
    throw std::invalid_argument("unknown synthetic mode: " + text);
}

std::string to_string(SyntheticMode mode) {
    switch (mode) {
        case SyntheticMode::TokenSeparable: return "token-separable";
        case SyntheticMode::StructureSeparable: return "structure-separable";
        case SyntheticMode::Inseparable: return "inseparable";
    }
    return "?";
}

void SyntheticCorpusConfig::validate() const {
    if (developer_count < 1 || changes_per_developer < 1 || buckets < 1) {
        throw std::invalid_argument("synthetic corpus counts must be >= 1");
    }
    if (!(overlap >= 0.0 && overlap <= 1.0)) {
        throw std::invalid_argument("overlap must be in [0, 1]");
    }
    if (cluster_size < 1) throw std::invalid_argument("cluster_size must be >= 1");
}

std::vector<ChangeDiffRecord> generate_synthetic_corpus(const SyntheticCorpusConfig& config) {
    config.validate();

    const int token_base_cut = config.mode == SyntheticMode::TokenSeparable
                                   ? static_cast<int>(std::llround(config.overlap * kTokenPoolSize))
                                   : kTokenPoolSize; // fully shared
    const int path_base_cut = config.mode == SyntheticMode::StructureSeparable
                                  ? static_cast<int>(std::llround(config.overlap * kPathPoolSize))
                                  : kPathPoolSize;

    std::vector<ChangeDiffRecord> out;
    out.reserve(static_cast<std::size_t>(config.developer_count) *
                static_cast<std::size_t>(config.changes_per_developer));

    for (int dev = 0; dev < config.developer_count; ++dev) {
        const int style = dev / config.cluster_size;

        std::vector<std::string> tokens;
        for (int k = 0; k < kTokenPoolSize; ++k) {
            tokens.push_back(token_name(style, k, token_base_cut));
        }
        std::vector<std::string> paths;
        Rng motif_rng(derive_seed(config.seed, "motifs", static_cast<std::uint64_t>(style)));
        for (int k = 0; k < kPathPoolSize; ++k) {
            paths.push_back(path_motif(style, k, path_base_cut, motif_rng));
        }

        Rng rng(derive_seed(config.seed, "dev", static_cast<std::uint64_t>(dev)));
        for (int i = 0; i < config.changes_per_developer; ++i) {
            ChangeDiffRecord record;
            record.entity_id = dev;
            record.bucket_id = static_cast<int>(
                static_cast<std::int64_t>(i) * config.buckets / config.changes_per_developer);

            const std::size_t n_contexts = 8 + rng.next_below(17); // 8..24
            std::set<std::string> introduced, removed, used;
            for (std::size_t c = 0; c < n_contexts; ++c) {
                std::string a = tokens[rng.next_below(tokens.size())];
                std::string b = tokens[rng.next_below(tokens.size())];
                if (b < a) std::swap(a, b); // canonical orientation
                const std::string& p = paths[rng.next_below(paths.size())];
                std::string serialized = a + ',' + p + ',' + b; // tokens never need escaping
                if (!used.insert(serialized).second) continue;  // keep the sides disjoint
                (rng.next_below(2) == 0 ? introduced : removed).insert(std::move(serialized));
            }
            record.introduced.assign(introduced.begin(), introduced.end());
            record.removed.assign(removed.begin(), removed.end());
            out.push_back(std::move(record));
        }
    }
    return out;
}

std::vector<MergedEntity> synthetic_entities(const SyntheticCorpusConfig& config) {
    std::vector<MergedEntity> entities;
    for (int dev = 0; dev < config.developer_count; ++dev) {
        MergedEntity e;
        e.entity_id = dev;
        e.names.insert("dev" + std::to_string(dev));
        e.emails.insert("dev" + std::to_string(dev) + "@synthetic");
        entities.push_back(std::move(e));
    }
    return entities;
}

} // namespace devstyle
