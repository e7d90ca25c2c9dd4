#include <doctest.h>

#include <cmath>

#include "devstyle/analysis.hpp"
#include "devstyle/rng.hpp"
#include "helpers.hpp"

using namespace devstyle;

namespace {

/// Threshold-scan oracle for the KS statistic: evaluates both ECDFs at every
/// sample point and takes the largest gap. Independent of the merge-walk in
/// the implementation.
double oracle_ks_d(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> thresholds;
    thresholds.insert(thresholds.end(), x.begin(), x.end());
    thresholds.insert(thresholds.end(), y.begin(), y.end());
    double d = 0.0;
    for (double t : thresholds) {
        double fx = 0.0, fy = 0.0;
        for (double v : x) {
            if (v <= t) fx += 1.0;
        }
        for (double v : y) {
            if (v <= t) fy += 1.0;
        }
        fx /= static_cast<double>(x.size());
        fy /= static_cast<double>(y.size());
        d = std::max(d, std::abs(fx - fy));
    }
    return d;
}

/// Independent evaluation of the truncated Kolmogorov series.
double oracle_ks_p(double d, std::size_t n1, std::size_t n2) {
    if (d <= 0.0) return 1.0;
    const double ne = static_cast<double>(n1) * static_cast<double>(n2) /
                      (static_cast<double>(n1) + static_cast<double>(n2));
    const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    double sum = 0.0;
    for (int k = 1; k <= 100000; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        if (term < 1e-12) break;
        sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

AveragedDistances averaged_from(
    std::initializer_list<std::tuple<int, std::int64_t, std::int64_t, double>> entries,
    int run_count = 1) {
    AveragedDistances avg;
    avg.run_count = run_count;
    for (const auto& [bucket, a, b, value] : entries) {
        avg.buckets[bucket][{a, b}] = value;
    }
    return avg;
}

} // namespace

TEST_CASE("pairs CSV parsing canonicalizes and validates") {
    const auto pairs = parse_pairs_csv(
        "entity_a,entity_b,label\n5,2,positive\n3,4,negative\n");
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].entity_a == 2);
    CHECK(pairs[0].entity_b == 5);
    CHECK(pairs[0].label == PairLabel::Positive);
    CHECK(pairs[1].label == PairLabel::Negative);

    CHECK_THROWS(parse_pairs_csv("1,2,positive\n"));                   // header missing
    CHECK_THROWS(parse_pairs_csv("entity_a,entity_b,label\n1,1,positive\n"));
    CHECK_THROWS(parse_pairs_csv("entity_a,entity_b,label\n1,2,maybe\n"));
    // Duplicates are rejected, both with equal and contradictory labels.
    CHECK_THROWS(parse_pairs_csv(
        "entity_a,entity_b,label\n1,2,positive\n2,1,positive\n"));
    CHECK_THROWS(parse_pairs_csv(
        "entity_a,entity_b,label\n1,2,positive\n2,1,negative\n"));
}

TEST_CASE("collect_pair_distances pools one value per co-active bucket") {
    const auto averaged = averaged_from({
        {1, 0, 1, 0.8},
        {2, 0, 1, 0.9},
        {4, 0, 1, 1.1},
        {1, 2, 3, 1.4},
    });
    const std::vector<LabeledPair> pairs = {
        {0, 1, PairLabel::Positive},
        {2, 3, PairLabel::Negative},
        {0, 3, PairLabel::Positive}, // never co-active
    };
    const GroupSamples s = collect_pair_distances(pairs, averaged);
    REQUIRE(s.positive.size() == 3); // buckets 1, 2, 4
    CHECK(s.positive[0].bucket_id == 1);
    CHECK(s.positive[2].bucket_id == 4);
    CHECK(s.negative.size() == 1);
    REQUIRE(s.never_coactive.size() == 1);
    CHECK(s.never_coactive[0].entity_a == 0);
    CHECK(s.never_coactive[0].entity_b == 3);

    CHECK(collect_pair_distances({}, averaged).positive.empty());
}

TEST_CASE("collect_movements uses consecutive defined buckets only") {
    const auto averaged = averaged_from({
        {1, 0, 1, 0.8},
        {2, 0, 1, 0.9},
        {4, 0, 1, 1.1},
    });
    const std::vector<LabeledPair> pairs = {{0, 1, PairLabel::Positive}};

    SUBCASE("presence in buckets 1,2,4 yields exactly one movement") {
        const GroupSamples s = collect_movements(pairs, averaged);
        REQUIRE(s.positive.size() == 1);
        CHECK(s.positive[0].bucket_id == 2);
        CHECK(s.positive[0].value == doctest::Approx(0.9 - 0.8).epsilon(1e-15));
    }
    SUBCASE("single-bucket presence yields no movements") {
        const auto single = averaged_from({{3, 0, 1, 1.0}});
        CHECK(collect_movements(pairs, single).positive.empty());
    }
    SUBCASE("constant distances give all-zero movements") {
        const auto constant = averaged_from({
            {0, 0, 1, 1.0},
            {1, 0, 1, 1.0},
            {2, 0, 1, 1.0},
        });
        const GroupSamples s = collect_movements(pairs, constant);
        REQUIRE(s.positive.size() == 2);
        for (const auto& v : s.positive) CHECK(v.value == 0.0);
    }
}

TEST_CASE("movement samples never outnumber distances minus distinct pairs") {
    // Contiguous presence: movements = distances - pairs, per group.
    const auto averaged = averaged_from({
        {0, 0, 1, 1.0},
        {1, 0, 1, 1.2},
        {2, 0, 1, 0.9},
        {0, 2, 3, 1.1},
        {1, 2, 3, 1.0},
    });
    const std::vector<LabeledPair> pairs = {
        {0, 1, PairLabel::Positive},
        {2, 3, PairLabel::Positive},
    };
    const auto distances = collect_pair_distances(pairs, averaged);
    const auto movements = collect_movements(pairs, averaged);
    CHECK(movements.positive.size() == distances.positive.size() - pairs.size());
}

TEST_CASE("KS statistic matches the brute-force oracle exactly on the worked example") {
    const std::vector<double> x = {1, 2, 3, 4};
    const std::vector<double> y = {1.5, 2.5, 3.5};
    const KsResult r = ks_two_sample(x, y);
    CHECK(r.d_statistic == doctest::Approx(oracle_ks_d(x, y)).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(oracle_ks_p(r.d_statistic, 4, 3)).epsilon(1e-6));
    CHECK(r.n1 == 4);
    CHECK(r.n2 == 3);
}

TEST_CASE("identical samples give D=0 p=1; disjoint supports give D=1") {
    const std::vector<double> s = {0.0, 0.5, 1.0, 2.0};
    const KsResult same = ks_two_sample(s, s);
    CHECK(same.d_statistic == 0.0);
    CHECK(same.p_value == 1.0);

    const KsResult disjoint = ks_two_sample({0.0, 1.0}, {10.0, 11.0});
    CHECK(disjoint.d_statistic == 1.0);
}

TEST_CASE("empty samples are rejected") {
    CHECK_THROWS_AS(ks_two_sample({}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ks_two_sample({1.0}, {}), std::invalid_argument);
}

TEST_CASE("KS agrees with both oracles on 200 random sample pairs") {
    Rng rng(515);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n1 = 1 + rng.next_below(50);
        const std::size_t n2 = 1 + rng.next_below(50);
        std::vector<double> x, y;
        for (std::size_t i = 0; i < n1; ++i) x.push_back(rng.uniform(-2.0, 2.0));
        for (std::size_t i = 0; i < n2; ++i) {
            // Mix in ties with the x sample now and then.
            y.push_back(rng.next_below(4) == 0 && !x.empty()
                            ? x[rng.next_below(x.size())]
                            : rng.uniform(-1.0, 3.0));
        }
        const KsResult r = ks_two_sample(x, y);
        CAPTURE(trial);
        CHECK(std::abs(r.d_statistic - oracle_ks_d(x, y)) < 1e-12);
        CHECK(std::abs(r.p_value - oracle_ks_p(r.d_statistic, n1, n2)) < 1e-6);
        CHECK(r.p_value >= 0.0);
        CHECK(r.p_value <= 1.0);
    }
}

TEST_CASE("KS is symmetric and invariant under increasing transforms") {
    Rng rng(616);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> x, y;
        for (int i = 0; i < 12; ++i) x.push_back(rng.uniform(0.0, 1.0));
        for (int i = 0; i < 9; ++i) y.push_back(rng.uniform(0.2, 1.4));
        const KsResult fwd = ks_two_sample(x, y);
        const KsResult rev = ks_two_sample(y, x);
        CHECK(fwd.d_statistic == doctest::Approx(rev.d_statistic).epsilon(1e-15));
        CHECK(fwd.p_value == doctest::Approx(rev.p_value).epsilon(1e-12));

        auto transform = [](std::vector<double> v) {
            for (double& t : v) t = std::exp(3.0 * t) + t;
            return v;
        };
        const KsResult mapped = ks_two_sample(transform(x), transform(y));
        CHECK(mapped.d_statistic == doctest::Approx(fwd.d_statistic).epsilon(1e-15));
    }
}

TEST_CASE("exact permutation p-value matches full enumeration behavior") {
    // Disjoint tiny samples: the observed D=1 split is one of C(5,2)=10
    // arrangements on each side... enumeration gives the exact tail mass.
    const std::vector<double> x = {0.0, 0.1};
    const std::vector<double> y = {1.0, 1.1, 1.2};
    const double p = ks_permutation_p_value(x, y);
    // D=1 happens only when the two smallest values form one group: exactly
    // one subset of size 2 out of C(5,2)=10.
    CHECK(p == doctest::Approx(0.1).epsilon(1e-12));

    CHECK(ks_permutation_p_value({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
    CHECK_THROWS(ks_permutation_p_value(std::vector<double>(12, 0.0),
                                        std::vector<double>(12, 1.0)));
}

TEST_CASE("summarize_sample reports n-1 variance and flags tiny samples") {
    const GroupStats s = summarize_sample({1.0, 2.0, 3.0});
    CHECK(s.count == 3);
    CHECK(s.mean == doctest::Approx(2.0));
    CHECK(s.sample_variance == doctest::Approx(1.0));
    CHECK(!s.small_sample);

    const GroupStats single = summarize_sample({4.2});
    CHECK(single.count == 1);
    CHECK(single.mean == doctest::Approx(4.2));
    CHECK(single.sample_variance == 0.0);
    CHECK(single.small_sample);
}

TEST_CASE("summarize builds the full report and markdown renders it") {
    const auto averaged = averaged_from({
        {0, 0, 1, 0.7},
        {1, 0, 1, 0.8},
        {0, 2, 3, 1.2},
        {1, 2, 3, 1.3},
    });
    const std::vector<LabeledPair> pairs = {
        {0, 1, PairLabel::Positive},
        {2, 3, PairLabel::Negative},
        {0, 3, PairLabel::Positive},
    };
    const GroupSamples distances = collect_pair_distances(pairs, averaged);
    const GroupSamples movements = collect_movements(pairs, averaged);
    const AnalysisReport report = summarize(distances, movements, "with-tokens");

    CHECK(report.distance_positive.count == 2);
    CHECK(report.distance_negative.count == 2);
    CHECK(report.distances_ks.n1 == 2);
    CHECK(report.movement_positive.count == 1);
    CHECK(report.never_coactive.size() == 1);

    const std::string md = render_report_markdown(report);
    CHECK(md.find("with-tokens") != std::string::npos);
    CHECK(md.find("Kolmogorov-Smirnov") != std::string::npos);
    CHECK(md.find("(n<2)") != std::string::npos); // single movement value
    CHECK(md.find("no shared activity") != std::string::npos);

    testutil::TempDir dir;
    save_samples_csv(distances.positive, dir.file("p.csv"));
    const std::string csv = testutil::read_file(dir.file("p.csv"));
    CHECK(csv.rfind("entity_a,entity_b,bucket_id,value\n", 0) == 0);
    CHECK(csv.find("0,1,0,") != std::string::npos);
}
