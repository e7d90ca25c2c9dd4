#include "devstyle/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "devstyle/rng.hpp"

namespace devstyle {

namespace {

using nlohmann::json;

std::vector<std::pair<std::string, std::int64_t>> ranked_entries(
    const std::map<std::string, std::int64_t>& counts, std::size_t min_count) {
    std::vector<std::pair<std::string, std::int64_t>> entries;
    for (const auto& [s, c] : counts) {
        if (c >= static_cast<std::int64_t>(min_count)) entries.emplace_back(s, c);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return entries;
}

} // namespace

void save_diffs_jsonl(const std::vector<ChangeDiffRecord>& diffs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write diffs: " + path);
    for (const auto& d : diffs) {
        json j;
        j["entity_id"] = d.entity_id;
        j["bucket_id"] = d.bucket_id;
        j["introduced"] = d.introduced;
        j["removed"] = d.removed;
        out << j.dump() << '\n';
    }
}

std::vector<ChangeDiffRecord> load_diffs_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read diffs: " + path);
    std::vector<ChangeDiffRecord> diffs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        ChangeDiffRecord d;
        d.entity_id = j.at("entity_id").get<std::int64_t>();
        d.bucket_id = j.at("bucket_id").get<int>();
        d.introduced = j.at("introduced").get<std::vector<std::string>>();
        d.removed = j.at("removed").get<std::vector<std::string>>();
        diffs.push_back(std::move(d));
    }
    return diffs;
}

Vocabulary Vocabulary::build(const std::vector<ChangeDiffRecord>& diffs,
                             std::size_t min_count) {
    std::map<std::string, std::int64_t> token_freq;
    std::map<std::string, std::int64_t> path_freq;
    for (const auto& diff : diffs) {
        for (const auto* side : {&diff.introduced, &diff.removed}) {
            for (const auto& serialized : *side) {
                const PathContext ctx = parse_path_context(serialized);
                ++token_freq[ctx.start_token];
                ++token_freq[ctx.end_token];
                ++path_freq[serialize_path(ctx.path)];
            }
        }
    }

    Vocabulary vocab;
    for (const auto& [s, c] : ranked_entries(token_freq, min_count)) {
        const std::int64_t id = vocab.next_token_id_++;
        vocab.token_to_id_[s] = id;
        vocab.id_to_token_[id] = s;
        vocab.token_counts_[id] = c;
    }
    for (const auto& [s, c] : ranked_entries(path_freq, min_count)) {
        const std::int64_t id = vocab.next_path_id_++;
        vocab.path_to_id_[s] = id;
        vocab.id_to_path_[id] = s;
        vocab.path_counts_[id] = c;
    }
    return vocab;
}

std::int64_t Vocabulary::token_id(const std::string& token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kOovId : it->second;
}

std::int64_t Vocabulary::path_id(const std::string& path) const {
    auto it = path_to_id_.find(path);
    return it == path_to_id_.end() ? kOovId : it->second;
}

namespace {
const std::string kOovString = "<OOV>";
const std::string kPadString = "<PAD>";
} // namespace

const std::string& Vocabulary::token_string(std::int64_t id) const {
    if (id == kOovId) return kOovString;
    if (id == kPaddingId) return kPadString;
    auto it = id_to_token_.find(id);
    if (it == id_to_token_.end()) throw std::out_of_range("unknown token id");
    return it->second;
}

const std::string& Vocabulary::path_string(std::int64_t id) const {
    if (id == kOovId) return kOovString;
    if (id == kPaddingId) return kPadString;
    auto it = id_to_path_.find(id);
    if (it == id_to_path_.end()) throw std::out_of_range("unknown path id");
    return it->second;
}

namespace {

void save_vocab_side(const std::map<std::int64_t, std::string>& id_to_string,
                     const std::map<std::int64_t, std::int64_t>& counts,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write vocabulary: " + path);
    out << kOovId << "\t" << kOovString << "\t0\n";
    out << kPaddingId << "\t" << kPadString << "\t0\n";
    for (const auto& [id, s] : id_to_string) {
        out << id << '\t' << s << '\t' << counts.at(id) << '\n';
    }
}

void load_vocab_side(const std::string& path, std::map<std::string, std::int64_t>& to_id,
                     std::map<std::int64_t, std::string>& to_string,
                     std::map<std::int64_t, std::int64_t>& counts, std::int64_t& next_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read vocabulary: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string id_text, text, count_text;
        if (!std::getline(fields, id_text, '\t') || !std::getline(fields, text, '\t') ||
            !std::getline(fields, count_text, '\t')) {
            throw std::runtime_error("malformed vocabulary line: " + line);
        }
        const std::int64_t id = std::stoll(id_text);
        if (id < kFirstRealId) continue;
        to_id[text] = id;
        to_string[id] = text;
        counts[id] = std::stoll(count_text);
        next_id = std::max(next_id, id + 1);
    }
}

} // namespace

void Vocabulary::save(const std::string& tokens_path, const std::string& paths_path) const {
    save_vocab_side(id_to_token_, token_counts_, tokens_path);
    save_vocab_side(id_to_path_, path_counts_, paths_path);
}

Vocabulary Vocabulary::load(const std::string& tokens_path, const std::string& paths_path) {
    Vocabulary vocab;
    load_vocab_side(tokens_path, vocab.token_to_id_, vocab.id_to_token_,
                    vocab.token_counts_, vocab.next_token_id_);
    load_vocab_side(paths_path, vocab.path_to_id_, vocab.id_to_path_, vocab.path_counts_,
                    vocab.next_path_id_);
    return vocab;
}

EncodedChange encode_change(const ChangeDiffRecord& diff, const Vocabulary& vocab,
                            const EncodeOptions& options, std::size_t record_index) {
    if (diff.empty()) {
        throw std::invalid_argument("encode_change: empty change (no diff contexts)");
    }
    EncodedChange encoded;
    encoded.entity_id = diff.entity_id;
    encoded.bucket_id = diff.bucket_id;

    std::vector<ContextIds> all;
    auto encode_side = [&](const std::vector<std::string>& side, const char* direction) {
        for (const auto& serialized : side) {
            const PathContext ctx = parse_path_context(serialized);
            std::string path_str = serialize_path(ctx.path);
            if (options.direction_feature) path_str = direction + path_str;
            all.push_back({vocab.token_id(ctx.start_token), vocab.path_id(path_str),
                           vocab.token_id(ctx.end_token)});
        }
    };
    encode_side(diff.introduced, "+");
    encode_side(diff.removed, "-");

    if (all.size() <= options.max_contexts) {
        encoded.contexts = std::move(all);
        return encoded;
    }
    // Uniform subsample, never a positional truncation.
    Rng rng(derive_seed(options.seed, "subsample", record_index));
    std::vector<std::size_t> picks = rng.sample_indices(all.size(), options.max_contexts);
    std::sort(picks.begin(), picks.end());
    encoded.contexts.reserve(picks.size());
    for (std::size_t i : picks) encoded.contexts.push_back(all[i]);
    return encoded;
}

std::vector<EncodedChange> strip_tokens(std::vector<EncodedChange> changes) {
    for (auto& c : changes) {
        for (auto& ctx : c.contexts) {
            ctx.start = kPaddingId;
            ctx.end = kPaddingId;
        }
    }
    return changes;
}

void save_encoded_jsonl(const std::vector<EncodedChange>& changes, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write encoded changes: " + path);
    for (const auto& c : changes) {
        json contexts = json::array();
        for (const auto& ctx : c.contexts) {
            contexts.push_back({ctx.start, ctx.path, ctx.end});
        }
        json j;
        j["entity_id"] = c.entity_id;
        j["bucket_id"] = c.bucket_id;
        j["contexts"] = std::move(contexts);
        out << j.dump() << '\n';
    }
}

std::vector<EncodedChange> load_encoded_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read encoded changes: " + path);
    std::vector<EncodedChange> changes;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        EncodedChange c;
        c.entity_id = j.at("entity_id").get<std::int64_t>();
        c.bucket_id = j.at("bucket_id").get<int>();
        for (const auto& ctx : j.at("contexts")) {
            c.contexts.push_back({ctx.at(0).get<std::int64_t>(),
                                  ctx.at(1).get<std::int64_t>(),
                                  ctx.at(2).get<std::int64_t>()});
        }
        changes.push_back(std::move(c));
    }
    return changes;
}

std::vector<ChangeBatch> make_batches(const std::vector<EncodedChange>& changes,
                                      std::size_t batch_size, std::uint64_t seed) {
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");

    std::map<std::int64_t, std::vector<const EncodedChange*>> by_entity;
    for (const auto& c : changes) by_entity[c.entity_id].push_back(&c);

    std::vector<ChangeBatch> batches;
    for (auto& [entity, list] : by_entity) {
        Rng rng(derive_seed(seed, "batches", static_cast<std::uint64_t>(entity)));
        rng.shuffle(list);
        const std::size_t full = list.size() / batch_size;
        for (std::size_t b = 0; b < full; ++b) {
            ChangeBatch batch;
            batch.entity_id = entity;
            for (std::size_t i = 0; i < batch_size; ++i) {
                batch.changes.push_back(*list[b * batch_size + i]);
            }
            batches.push_back(std::move(batch));
        }
    }
    return batches;
}

SplitResult split_train_validation(const std::vector<ChangeBatch>& batches, double fraction,
                                   std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("train fraction must be in (0, 1)");
    }
    std::map<std::int64_t, std::vector<std::size_t>> by_entity;
    for (std::size_t i = 0; i < batches.size(); ++i) {
        by_entity[batches[i].entity_id].push_back(i);
    }

    SplitResult result;
    for (auto& [entity, indices] : by_entity) {
        if (indices.size() < 2) {
            result.warnings.push_back("entity " + std::to_string(entity) +
                                      " has a single batch; assigned to train only");
            result.train.push_back(batches[indices[0]]);
            continue;
        }
        Rng rng(derive_seed(seed, "split", static_cast<std::uint64_t>(entity)));
        rng.shuffle(indices);
        const std::size_t n = indices.size();
        std::size_t n_val = static_cast<std::size_t>(
            std::llround(static_cast<double>(n) * (1.0 - fraction)));
        n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            (i < n - n_val ? result.train : result.validation).push_back(batches[indices[i]]);
        }
    }
    return result;
}

} // namespace devstyle
