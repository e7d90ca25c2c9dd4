#include "devstyle/embeddings.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace devstyle {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double pair_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                     DistanceMetric metric) {
    if (metric == DistanceMetric::Euclidean) return (a - b).norm();
    const double denom = a.norm() * b.norm();
    if (denom == 0.0) return 1.0;
    return 1.0 - a.dot(b) / denom;
}

} // namespace

DeveloperEmbeddingSnapshot embed_developer(std::span<const EncodedChange> changes,
                                           const ModelParameters& params, int run_id,
                                           int bucket_id, std::int64_t entity_id) {
    if (changes.empty()) {
        throw std::invalid_argument("embed_developer: no changes in this bucket");
    }
    std::vector<Eigen::VectorXd> vectors;
    Eigen::VectorXd logits(static_cast<Eigen::Index>(changes.size()));
    for (std::size_t j = 0; j < changes.size(); ++j) {
        ChangeForward f = forward_change(changes[j], params);
        logits(static_cast<Eigen::Index>(j)) = f.attention_logit;
        vectors.push_back(std::move(f.change_vector));
    }
    const BatchCombine combined = combine_change_vectors(vectors, logits);

    DeveloperEmbeddingSnapshot snap;
    snap.run_id = run_id;
    snap.bucket_id = bucket_id;
    snap.entity_id = entity_id;
    snap.vector = combined.combined;
    snap.weights.assign(combined.weights.data(),
                        combined.weights.data() + combined.weights.size());
    snap.change_count = changes.size();
    return snap;
}

std::vector<DeveloperEmbeddingSnapshot> embed_run(const std::vector<EncodedChange>& changes,
                                                  const ModelParameters& params, int run_id,
                                                  std::size_t min_bucket_changes) {
    std::map<std::pair<int, std::int64_t>, std::vector<EncodedChange>> groups;
    for (const auto& c : changes) {
        groups[{c.bucket_id, c.entity_id}].push_back(c);
    }
    std::vector<DeveloperEmbeddingSnapshot> out;
    for (const auto& [key, group] : groups) {
        if (group.size() < min_bucket_changes) continue;
        out.push_back(embed_developer(group, params, run_id, key.first, key.second));
    }
    return out;
}

NormalizedDistanceMatrix normalize_bucket(
    const std::vector<DeveloperEmbeddingSnapshot>& bucket_snapshots, DistanceMetric metric) {
    if (bucket_snapshots.size() < 2) {
        throw std::invalid_argument("normalize_bucket requires at least 2 entities");
    }
    std::vector<const DeveloperEmbeddingSnapshot*> sorted;
    for (const auto& s : bucket_snapshots) sorted.push_back(&s);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto* a, const auto* b) { return a->entity_id < b->entity_id; });

    NormalizedDistanceMatrix out;
    out.bucket_id = bucket_snapshots.front().bucket_id;
    out.run_id = bucket_snapshots.front().run_id;
    const Eigen::Index n = static_cast<Eigen::Index>(sorted.size());
    out.distances.setZero(n, n);
    for (const auto* s : sorted) out.entities.push_back(s->entity_id);

    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = pair_distance(sorted[static_cast<std::size_t>(i)]->vector,
                                           sorted[static_cast<std::size_t>(j)]->vector, metric);
            out.distances(i, j) = d;
            out.distances(j, i) = d;
            sum += d;
        }
    }
    const double mean = sum / static_cast<double>(n * (n - 1) / 2);
    if (mean > 0.0) out.distances /= mean;
    return out;
}

std::vector<NormalizedDistanceMatrix> normalize_run(
    const std::vector<DeveloperEmbeddingSnapshot>& snapshots, DistanceMetric metric,
    std::vector<std::string>* warnings) {
    std::map<int, std::vector<DeveloperEmbeddingSnapshot>> by_bucket;
    for (const auto& s : snapshots) by_bucket[s.bucket_id].push_back(s);

    std::vector<NormalizedDistanceMatrix> out;
    for (const auto& [bucket, group] : by_bucket) {
        if (group.size() < 2) {
            if (warnings) {
                warnings->push_back("bucket " + std::to_string(bucket) +
                                    " has fewer than 2 active developers; excluded");
            }
            continue;
        }
        out.push_back(normalize_bucket(group, metric));
    }
    return out;
}

AveragedDistances average_runs(
    const std::vector<std::vector<NormalizedDistanceMatrix>>& per_run) {
    if (per_run.empty()) throw std::invalid_argument("average_runs: no runs");

    AveragedDistances out;
    out.run_count = static_cast<int>(per_run.size());

    for (std::size_t run = 0; run < per_run.size(); ++run) {
        std::map<int, const NormalizedDistanceMatrix*> buckets;
        for (const auto& m : per_run[run]) buckets[m.bucket_id] = &m;
        if (run == 0) {
            for (const auto& [bucket_id, m] : buckets) {
                auto& pairs = out.buckets[bucket_id];
                for (std::size_t i = 0; i < m->entities.size(); ++i) {
                    for (std::size_t j = i + 1; j < m->entities.size(); ++j) {
                        pairs[{m->entities[i], m->entities[j]}] = 0.0;
                    }
                }
            }
        } else {
            if (buckets.size() != out.buckets.size()) {
                throw std::runtime_error("run " + std::to_string(run) +
                                         ": bucket set differs from run 0");
            }
        }
        for (auto& [bucket_id, pairs] : out.buckets) {
            auto it = buckets.find(bucket_id);
            if (it == buckets.end()) {
                throw std::runtime_error("run " + std::to_string(run) + ": bucket " +
                                         std::to_string(bucket_id) + " missing");
            }
            const NormalizedDistanceMatrix& m = *it->second;
            std::size_t seen = 0;
            for (std::size_t i = 0; i < m.entities.size(); ++i) {
                for (std::size_t j = i + 1; j < m.entities.size(); ++j) {
                    const EntityPair key{m.entities[i], m.entities[j]};
                    auto pair_it = pairs.find(key);
                    if (pair_it == pairs.end()) {
                        throw std::runtime_error(
                            "run " + std::to_string(run) + ": bucket " +
                            std::to_string(bucket_id) + " pair (" +
                            std::to_string(key.first) + "," + std::to_string(key.second) +
                            ") not present in run 0");
                    }
                    pair_it->second +=
                        m.distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    ++seen;
                }
            }
            if (seen != pairs.size()) {
                throw std::runtime_error("run " + std::to_string(run) + ": bucket " +
                                         std::to_string(bucket_id) +
                                         " entity set differs from run 0");
            }
        }
    }
    for (auto& [bucket_id, pairs] : out.buckets) {
        for (auto& [pair, value] : pairs) value /= static_cast<double>(out.run_count);
    }
    return out;
}

void save_snapshots_jsonl(const std::vector<DeveloperEmbeddingSnapshot>& snapshots,
                          const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snapshots: " + path);
    for (const auto& s : snapshots) {
        // Built by hand to pin the 17-significant-digit decimal format.
        out << "{\"run_id\":" << s.run_id << ",\"bucket_id\":" << s.bucket_id
            << ",\"entity_id\":" << s.entity_id << ",\"change_count\":" << s.change_count
            << ",\"vector\":[";
        for (Eigen::Index i = 0; i < s.vector.size(); ++i) {
            if (i > 0) out << ',';
            out << fmt17(s.vector(i));
        }
        out << "],\"weights\":[";
        for (std::size_t i = 0; i < s.weights.size(); ++i) {
            if (i > 0) out << ',';
            out << fmt17(s.weights[i]);
        }
        out << "]}\n";
    }
}

std::vector<DeveloperEmbeddingSnapshot> load_snapshots_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read snapshots: " + path);
    std::vector<DeveloperEmbeddingSnapshot> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        DeveloperEmbeddingSnapshot s;
        s.run_id = j.at("run_id").get<int>();
        s.bucket_id = j.at("bucket_id").get<int>();
        s.entity_id = j.at("entity_id").get<std::int64_t>();
        s.change_count = j.at("change_count").get<std::size_t>();
        const auto vec = j.at("vector").get<std::vector<double>>();
        s.vector = Eigen::Map<const Eigen::VectorXd>(vec.data(),
                                                     static_cast<Eigen::Index>(vec.size()));
        s.weights = j.at("weights").get<std::vector<double>>();
        out.push_back(std::move(s));
    }
    return out;
}

void save_normalized_csv(const std::vector<NormalizedDistanceMatrix>& matrices,
                         const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write distances: " + path);
    out << "bucket_id,entity_a,entity_b,normalized_distance\n";
    for (const auto& m : matrices) {
        for (std::size_t i = 0; i < m.entities.size(); ++i) {
            for (std::size_t j = i + 1; j < m.entities.size(); ++j) {
                out << m.bucket_id << ',' << m.entities[i] << ',' << m.entities[j] << ','
                    << fmt17(m.distances(static_cast<Eigen::Index>(i),
                                         static_cast<Eigen::Index>(j)))
                    << '\n';
            }
        }
    }
}

std::vector<NormalizedDistanceMatrix> load_normalized_csv(const std::string& path,
                                                          int run_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read distances: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("bucket_id,", 0) != 0) {
        throw std::runtime_error("missing header in " + path);
    }
    std::map<int, std::map<EntityPair, double>> buckets;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string b, a, e, d;
        if (!std::getline(fields, b, ',') || !std::getline(fields, a, ',') ||
            !std::getline(fields, e, ',') || !std::getline(fields, d, ',')) {
            throw std::runtime_error("malformed distance row: " + line);
        }
        buckets[std::stoi(b)][{std::stoll(a), std::stoll(e)}] = std::stod(d);
    }
    std::vector<NormalizedDistanceMatrix> out;
    for (const auto& [bucket_id, pairs] : buckets) {
        std::set<std::int64_t> entity_set;
        for (const auto& [pair, value] : pairs) {
            entity_set.insert(pair.first);
            entity_set.insert(pair.second);
        }
        NormalizedDistanceMatrix m;
        m.bucket_id = bucket_id;
        m.run_id = run_id;
        m.entities.assign(entity_set.begin(), entity_set.end());
        const Eigen::Index n = static_cast<Eigen::Index>(m.entities.size());
        m.distances.setZero(n, n);
        std::map<std::int64_t, Eigen::Index> index;
        for (Eigen::Index i = 0; i < n; ++i) index[m.entities[static_cast<std::size_t>(i)]] = i;
        for (const auto& [pair, value] : pairs) {
            const Eigen::Index i = index.at(pair.first);
            const Eigen::Index j = index.at(pair.second);
            m.distances(i, j) = value;
            m.distances(j, i) = value;
        }
        out.push_back(std::move(m));
    }
    return out;
}

void save_averaged_csv(const AveragedDistances& averaged, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write averaged distances: " + path);
    out << "bucket_id,entity_a,entity_b,mean_normalized_distance,run_count\n";
    for (const auto& [bucket_id, pairs] : averaged.buckets) {
        for (const auto& [pair, value] : pairs) {
            out << bucket_id << ',' << pair.first << ',' << pair.second << ','
                << fmt17(value) << ',' << averaged.run_count << '\n';
        }
    }
}

AveragedDistances load_averaged_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read averaged distances: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("bucket_id,", 0) != 0) {
        throw std::runtime_error("missing header in " + path);
    }
    AveragedDistances out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string b, a, e, d, r;
        if (!std::getline(fields, b, ',') || !std::getline(fields, a, ',') ||
            !std::getline(fields, e, ',') || !std::getline(fields, d, ',') ||
            !std::getline(fields, r, ',')) {
            throw std::runtime_error("malformed averaged row: " + line);
        }
        out.buckets[std::stoi(b)][{std::stoll(a), std::stoll(e)}] = std::stod(d);
        out.run_count = std::stoi(r);
    }
    return out;
}

} // namespace devstyle
