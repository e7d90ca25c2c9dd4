#include "devstyle/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace devstyle {

namespace {

std::string fmt(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

std::vector<double> values_of(const std::vector<SampleValue>& sample) {
    std::vector<double> out;
    out.reserve(sample.size());
    for (const auto& s : sample) out.push_back(s.value);
    return out;
}

/// Kolmogorov asymptotic survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1;; ++k) {
        const double term = std::exp(-2.0 * static_cast<double>(k) * k * lambda * lambda);
        if (term < 1e-12) break;
        sum += sign * term;
        sign = -sign;
        if (k > 100000) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::vector<double> x, std::vector<double> y) {
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double n1 = static_cast<double>(x.size());
    const double n2 = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
    }
    return d;
}

} // namespace

std::vector<LabeledPair> parse_pairs_csv(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty pairs file");
    // Tolerate a UTF-8 BOM and trailing CR.
    if (line.size() >= 3 && line.compare(0, 3, "\xef\xbb\xbf") == 0) line.erase(0, 3);
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line != "entity_a,entity_b,label") {
        throw std::runtime_error("pairs file must start with header entity_a,entity_b,label");
    }

    std::vector<LabeledPair> pairs;
    std::set<EntityPair> seen;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string a, b, label;
        if (!std::getline(fields, a, ',') || !std::getline(fields, b, ',') ||
            !std::getline(fields, label, ',')) {
            throw std::runtime_error("malformed pairs row: " + line);
        }
        LabeledPair p;
        p.entity_a = std::stoll(a);
        p.entity_b = std::stoll(b);
        if (p.entity_a == p.entity_b) {
            throw std::runtime_error("pair references the same entity twice: " + line);
        }
        if (p.entity_a > p.entity_b) std::swap(p.entity_a, p.entity_b);
        if (label == "positive") {
            p.label = PairLabel::Positive;
        } else if (label == "negative") {
            p.label = PairLabel::Negative;
        } else {
            throw std::runtime_error("pair label must be positive or negative: " + line);
        }
        // The same pair twice is rejected, with both equal and contradictory
        // labels: the survey mapping must be unambiguous.
        if (!seen.insert({p.entity_a, p.entity_b}).second) {
            throw std::runtime_error("duplicate pair (" + std::to_string(p.entity_a) + "," +
                                     std::to_string(p.entity_b) + ") in pairs file");
        }
        pairs.push_back(p);
    }
    return pairs;
}

std::vector<LabeledPair> load_pairs_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read pairs file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_pairs_csv(buffer.str());
}

GroupSamples collect_pair_distances(const std::vector<LabeledPair>& pairs,
                                    const AveragedDistances& averaged) {
    GroupSamples out;
    for (const LabeledPair& p : pairs) {
        bool found = false;
        for (const auto& [bucket_id, values] : averaged.buckets) {
            auto it = values.find({p.entity_a, p.entity_b});
            if (it == values.end()) continue;
            found = true;
            (p.label == PairLabel::Positive ? out.positive : out.negative)
                .push_back({p.entity_a, p.entity_b, bucket_id, it->second});
        }
        if (!found) out.never_coactive.push_back(p);
    }
    return out;
}

GroupSamples collect_movements(const std::vector<LabeledPair>& pairs,
                               const AveragedDistances& averaged) {
    GroupSamples out;
    for (const LabeledPair& p : pairs) {
        const EntityPair key{p.entity_a, p.entity_b};
        int prev_bucket = 0;
        double prev_value = 0.0;
        bool has_prev = false;
        for (const auto& [bucket_id, values] : averaged.buckets) {
            auto it = values.find(key);
            if (it == values.end()) {
                has_prev = false;
                continue;
            }
            if (has_prev && bucket_id == prev_bucket + 1) {
                (p.label == PairLabel::Positive ? out.positive : out.negative)
                    .push_back({p.entity_a, p.entity_b, bucket_id, it->second - prev_value});
            }
            prev_bucket = bucket_id;
            prev_value = it->second;
            has_prev = true;
        }
    }
    return out;
}

KsResult ks_two_sample(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) {
        throw std::invalid_argument("ks_two_sample: both samples must be non-empty");
    }
    KsResult r;
    r.n1 = x.size();
    r.n2 = y.size();
    r.d_statistic = ks_statistic(x, y);
    const double n1 = static_cast<double>(r.n1);
    const double n2 = static_cast<double>(r.n2);
    const double ne = n1 * n2 / (n1 + n2);
    const double sqrt_ne = std::sqrt(ne);
    const double lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * r.d_statistic;
    r.p_value = kolmogorov_q(lambda);
    return r;
}

double ks_permutation_p_value(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n1 = x.size();
    const std::size_t n = n1 + y.size();
    if (n == 0 || n1 == 0 || n1 == n) {
        throw std::invalid_argument("ks_permutation_p_value: both samples must be non-empty");
    }
    if (n > 22) {
        throw std::invalid_argument(
            "exact permutation p-value is limited to n1 + n2 <= 22 values");
    }
    std::vector<double> pooled(x);
    pooled.insert(pooled.end(), y.begin(), y.end());
    const double observed = ks_statistic(x, y);

    // Walk every subset of size n1 via a selection mask.
    std::vector<bool> mask(n, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n1), true);
    std::sort(mask.begin(), mask.end()); // lowest lexicographic arrangement
    std::uint64_t total = 0, at_least = 0;
    do {
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n; ++i) {
            (mask[i] ? a : b).push_back(pooled[i]);
        }
        ++total;
        if (ks_statistic(a, b) >= observed - 1e-15) ++at_least;
    } while (std::next_permutation(mask.begin(), mask.end()));
    return static_cast<double>(at_least) / static_cast<double>(total);
}

GroupStats summarize_sample(const std::vector<double>& values) {
    GroupStats s;
    s.count = values.size();
    if (values.empty()) {
        s.small_sample = true;
        return s;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) {
        s.small_sample = true;
        return s;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sample_variance = ss / static_cast<double>(values.size() - 1);
    return s;
}

AnalysisReport summarize(const GroupSamples& distances, const GroupSamples& movements,
                         const std::string& token_mode, bool exact_p) {
    AnalysisReport report;
    report.token_mode = token_mode;
    report.distance_positive = summarize_sample(values_of(distances.positive));
    report.distance_negative = summarize_sample(values_of(distances.negative));
    report.movement_positive = summarize_sample(values_of(movements.positive));
    report.movement_negative = summarize_sample(values_of(movements.negative));
    report.never_coactive = distances.never_coactive;

    auto run_ks = [exact_p](const GroupSamples& g) {
        KsResult r;
        if (g.positive.empty() || g.negative.empty()) return r; // left at D=0, p=1
        r = ks_two_sample(values_of(g.positive), values_of(g.negative));
        if (exact_p) {
            r.p_value = ks_permutation_p_value(values_of(g.positive), values_of(g.negative));
        }
        return r;
    };
    report.distances_ks = run_ks(distances);
    report.movements_ks = run_ks(movements);
    return report;
}

std::string render_report_markdown(const AnalysisReport& report) {
    std::ostringstream out;
    out << "# Developer style distance analysis\n\n";
    out << "token mode: `" << report.token_mode << "`\n\n";

    auto stats_row = [&out](const char* group, const GroupStats& s) {
        out << "| " << group << " | " << s.count << " | " << fmt(s.mean) << " | "
            << fmt(s.sample_variance) << (s.small_sample ? " (n<2)" : "") << " |\n";
    };

    out << "## Pair distances\n\n";
    out << "| group | count | mean | sample variance |\n";
    out << "|---|---|---|---|\n";
    stats_row("positive", report.distance_positive);
    stats_row("negative", report.distance_negative);

    out << "\n## Pair movements (consecutive-bucket distance differences)\n\n";
    out << "| group | count | mean | sample variance |\n";
    out << "|---|---|---|---|\n";
    stats_row("positive", report.movement_positive);
    stats_row("negative", report.movement_negative);

    out << "\n## Two-sample Kolmogorov-Smirnov tests (positive vs negative)\n\n";
    out << "| comparison | token mode | n_pos | n_neg | D | p |\n";
    out << "|---|---|---|---|---|---|\n";
    out << "| distances | " << report.token_mode << " | " << report.distances_ks.n1 << " | "
        << report.distances_ks.n2 << " | " << fmt(report.distances_ks.d_statistic) << " | "
        << fmt(report.distances_ks.p_value) << " |\n";
    out << "| movements | " << report.token_mode << " | " << report.movements_ks.n1 << " | "
        << report.movements_ks.n2 << " | " << fmt(report.movements_ks.d_statistic) << " | "
        << fmt(report.movements_ks.p_value) << " |\n";

    if (!report.never_coactive.empty()) {
        out << "\n## Appendix: pairs with no shared activity\n\n";
        for (const auto& p : report.never_coactive) {
            out << "- (" << p.entity_a << ", " << p.entity_b << ") "
                << (p.label == PairLabel::Positive ? "positive" : "negative") << "\n";
        }
    }
    return out.str();
}

void save_samples_csv(const std::vector<SampleValue>& values, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write samples: " + path);
    out << "entity_a,entity_b,bucket_id,value\n";
    char buf[32];
    for (const auto& v : values) {
        std::snprintf(buf, sizeof(buf), "%.17g", v.value);
        out << v.entity_a << ',' << v.entity_b << ',' << v.bucket_id << ',' << buf << '\n';
    }
}

} // namespace devstyle
