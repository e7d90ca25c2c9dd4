#include <doctest.h>

#include <algorithm>

#include "devstyle/dataset.hpp"
#include "devstyle/rng.hpp"
#include "helpers.hpp"

using namespace devstyle;

namespace {

ChangeDiffRecord diff_of(std::int64_t entity, int bucket,
                         std::vector<std::string> introduced,
                         std::vector<std::string> removed = {}) {
    ChangeDiffRecord d;
    d.entity_id = entity;
    d.bucket_id = bucket;
    d.introduced = std::move(introduced);
    d.removed = std::move(removed);
    return d;
}

std::string ctx(const std::string& a, const std::string& path, const std::string& b) {
    return a + "," + path + "," + b;
}

EncodedChange simple_change(std::int64_t entity, std::size_t contexts) {
    EncodedChange c;
    c.entity_id = entity;
    for (std::size_t i = 0; i < contexts; ++i) {
        c.contexts.push_back({2, 2, 3});
    }
    return c;
}

} // namespace

TEST_CASE("empty corpus vocabulary holds only the reserved ids") {
    const Vocabulary v = Vocabulary::build({}, 1);
    CHECK(v.token_count() == kFirstRealId);
    CHECK(v.path_count() == kFirstRealId);
    CHECK(v.token_id("anything") == kOovId);
}

TEST_CASE("min_count thresholds rare entries into OOV") {
    // x appears 3 times as a token; y once.
    const std::vector<ChangeDiffRecord> diffs = {
        diff_of(0, 0, {ctx("x", "SN^B_SN", "x")}),
        diff_of(0, 0, {ctx("x", "SN^B_SN", "y")}),
    };
    const Vocabulary v = Vocabulary::build(diffs, 2);
    CHECK(v.token_id("x") >= kFirstRealId);
    CHECK(v.token_id("y") == kOovId);
    CHECK(v.path_id("SN^B_SN") >= kFirstRealId);
    CHECK(v.token_string(v.token_id("x")) == "x");
}

TEST_CASE("ids are ordered by descending frequency then lexicographically") {
    const std::vector<ChangeDiffRecord> diffs = {
        diff_of(0, 0, {ctx("bb", "P1", "bb")}), // bb x2
        diff_of(0, 0, {ctx("aa", "P1", "bb")}), // aa x1, bb x3
        diff_of(0, 0, {ctx("ab", "P2", "aa")}), // ab x1, aa x2
    };
    const Vocabulary v = Vocabulary::build(diffs, 1);
    CHECK(v.token_id("bb") == 2); // 3 occurrences
    CHECK(v.token_id("aa") == 3); // 2 occurrences
    CHECK(v.token_id("ab") == 4); // 1 occurrence
    CHECK(v.path_id("P1") == 2);  // 2 vs 1
    CHECK(v.path_id("P2") == 3);
}

TEST_CASE("permuted corpus builds byte-identical vocabulary files") {
    std::vector<ChangeDiffRecord> diffs;
    Rng rng(42);
    for (int i = 0; i < 60; ++i) {
        diffs.push_back(diff_of(
            i % 4, 0,
            {ctx("t" + std::to_string(rng.next_below(9)),
                 "P" + std::to_string(rng.next_below(5)),
                 "t" + std::to_string(rng.next_below(9)))},
            {ctx("t" + std::to_string(rng.next_below(9)),
                 "P" + std::to_string(rng.next_below(5)),
                 "t" + std::to_string(rng.next_below(9)))}));
    }
    testutil::TempDir dir;
    Vocabulary::build(diffs, 2).save(dir.file("t1.tsv"), dir.file("p1.tsv"));

    std::vector<ChangeDiffRecord> shuffled = diffs;
    Rng shuffle_rng(7);
    shuffle_rng.shuffle(shuffled);
    Vocabulary::build(shuffled, 2).save(dir.file("t2.tsv"), dir.file("p2.tsv"));

    CHECK(testutil::read_file(dir.file("t1.tsv")) == testutil::read_file(dir.file("t2.tsv")));
    CHECK(testutil::read_file(dir.file("p1.tsv")) == testutil::read_file(dir.file("p2.tsv")));
    CHECK(testutil::read_file(dir.file("t1.tsv")).rfind("0\t<OOV>\t0\n1\t<PAD>\t0\n", 0) == 0);
}

TEST_CASE("vocabulary files round-trip") {
    const std::vector<ChangeDiffRecord> diffs = {
        diff_of(0, 0, {ctx("alpha", "SN^IE_SN", "beta")},
                {ctx("alpha", "SN^B_SN", "alpha")}),
    };
    const Vocabulary v = Vocabulary::build(diffs, 1);
    testutil::TempDir dir;
    v.save(dir.file("tok.tsv"), dir.file("path.tsv"));
    const Vocabulary loaded = Vocabulary::load(dir.file("tok.tsv"), dir.file("path.tsv"));
    CHECK(loaded.token_count() == v.token_count());
    CHECK(loaded.path_count() == v.path_count());
    CHECK(loaded.token_id("alpha") == v.token_id("alpha"));
    CHECK(loaded.path_id("SN^IE_SN") == v.path_id("SN^IE_SN"));
}

TEST_CASE("encode_change pools both diff sides and maps unknowns to OOV") {
    const Vocabulary v = Vocabulary::build(
        {diff_of(0, 0, {ctx("x", "P", "y")}, {ctx("y", "Q", "y")})}, 1);

    const ChangeDiffRecord d =
        diff_of(7, 3, {ctx("x", "P", "y")}, {ctx("mystery", "Q", "y")});
    const EncodedChange e = encode_change(d, v, {}, 0);
    CHECK(e.entity_id == 7);
    CHECK(e.bucket_id == 3);
    REQUIRE(e.contexts.size() == 2);
    CHECK(e.contexts[0].start == v.token_id("x"));
    CHECK(e.contexts[0].path == v.path_id("P"));
    CHECK(e.contexts[0].end == v.token_id("y"));
    CHECK(e.contexts[1].start == kOovId); // "mystery"
    CHECK(e.contexts[1].end == v.token_id("y"));
}

TEST_CASE("encode_change rejects empty diffs") {
    const Vocabulary v = Vocabulary::build({}, 1);
    CHECK_THROWS_AS(encode_change(diff_of(0, 0, {}), v, {}, 0), std::invalid_argument);
}

TEST_CASE("three contexts under a cap of 200 stay intact") {
    const auto d = diff_of(0, 0, {ctx("a", "P", "b"), ctx("a", "P", "c"), ctx("b", "P", "c")});
    const Vocabulary v = Vocabulary::build({d}, 1);
    EncodeOptions options;
    options.max_contexts = 200;
    CHECK(encode_change(d, v, options, 0).contexts.size() == 3);
}

TEST_CASE("oversized changes subsample deterministically") {
    std::vector<std::string> many;
    for (int i = 0; i < 500; ++i) {
        many.push_back(ctx("t" + std::to_string(i), "P", "u" + std::to_string(i)));
    }
    const auto d = diff_of(0, 0, many);
    const Vocabulary v = Vocabulary::build({d}, 1);
    EncodeOptions options;
    options.max_contexts = 200;
    options.seed = 99;

    const EncodedChange first = encode_change(d, v, options, 17);
    const EncodedChange second = encode_change(d, v, options, 17);
    REQUIRE(first.contexts.size() == 200);
    CHECK(first.contexts == second.contexts);

    // A different record index draws a different subset.
    const EncodedChange other = encode_change(d, v, options, 18);
    CHECK(other.contexts.size() == 200);
    CHECK(other.contexts != first.contexts);
}

TEST_CASE("direction feature splits the path vocabulary by diff side") {
    const auto d = diff_of(0, 0, {ctx("a", "P", "b")}, {ctx("a", "Q", "b")});
    EncodeOptions options;
    options.direction_feature = true;
    // Vocabulary must be built consistently: direction-prefixed paths appear
    // only through encode, so count both plain and prefixed spellings.
    const std::vector<ChangeDiffRecord> corpus = {
        diff_of(0, 0, {ctx("a", "+P", "b")}, {ctx("a", "-Q", "b")}),
    };
    const Vocabulary v = Vocabulary::build(corpus, 1);
    const EncodedChange e = encode_change(d, v, options, 0);
    REQUIRE(e.contexts.size() == 2);
    CHECK(e.contexts[0].path == v.path_id("+P"));
    CHECK(e.contexts[1].path == v.path_id("-Q"));
}

TEST_CASE("strip_tokens replaces token ids with the placeholder and keeps paths") {
    std::vector<EncodedChange> changes = {simple_change(1, 4), simple_change(2, 2)};
    changes[0].contexts[1] = {9, 5, 11};
    const auto stripped = strip_tokens(changes);
    REQUIRE(stripped.size() == 2);
    REQUIRE(stripped[0].contexts.size() == 4);
    for (std::size_t c = 0; c < stripped.size(); ++c) {
        for (std::size_t i = 0; i < stripped[c].contexts.size(); ++i) {
            CHECK(stripped[c].contexts[i].start == kPaddingId);
            CHECK(stripped[c].contexts[i].end == kPaddingId);
            CHECK(stripped[c].contexts[i].path == changes[c].contexts[i].path);
        }
    }
}

TEST_CASE("encoded changes round-trip through JSONL") {
    std::vector<EncodedChange> changes = {simple_change(1, 3), simple_change(5, 1)};
    changes[0].bucket_id = 2;
    testutil::TempDir dir;
    save_encoded_jsonl(changes, dir.file("enc.jsonl"));
    const auto loaded = load_encoded_jsonl(dir.file("enc.jsonl"));
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].entity_id == 1);
    CHECK(loaded[0].bucket_id == 2);
    CHECK(loaded[0].contexts == changes[0].contexts);
}

TEST_CASE("make_batches shuffles per entity and drops the partial tail") {
    SUBCASE("35 changes in batches of 16 give 2 batches") {
        std::vector<EncodedChange> changes;
        for (int i = 0; i < 35; ++i) changes.push_back(simple_change(1, 1));
        const auto batches = make_batches(changes, 16, 7);
        REQUIRE(batches.size() == 2);
        for (const auto& b : batches) {
            CHECK(b.entity_id == 1);
            CHECK(b.changes.size() == 16);
        }
    }
    SUBCASE("exactly one batch") {
        std::vector<EncodedChange> changes;
        for (int i = 0; i < 16; ++i) changes.push_back(simple_change(3, 1));
        CHECK(make_batches(changes, 16, 7).size() == 1);
    }
    SUBCASE("same seed reproduces the same composition") {
        std::vector<EncodedChange> changes;
        for (int i = 0; i < 40; ++i) {
            EncodedChange c = simple_change(i % 2, 1);
            c.bucket_id = i; // marker to compare compositions
            changes.push_back(c);
        }
        const auto a = make_batches(changes, 8, 123);
        const auto b = make_batches(changes, 8, 123);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].entity_id == b[i].entity_id);
            for (std::size_t j = 0; j < a[i].changes.size(); ++j) {
                CHECK(a[i].changes[j].bucket_id == b[i].changes[j].bucket_id);
            }
        }
        const auto c = make_batches(changes, 8, 124);
        bool any_difference = false;
        for (std::size_t i = 0; i < a.size() && !any_difference; ++i) {
            for (std::size_t j = 0; j < a[i].changes.size(); ++j) {
                if (a[i].changes[j].bucket_id != c[i].changes[j].bucket_id) {
                    any_difference = true;
                    break;
                }
            }
        }
        CHECK(any_difference);
    }
    SUBCASE("every batch is single-author") {
        std::vector<EncodedChange> changes;
        for (int i = 0; i < 100; ++i) changes.push_back(simple_change(i % 3, 1));
        for (const auto& b : make_batches(changes, 4, 9)) {
            for (const auto& c : b.changes) CHECK(c.entity_id == b.entity_id);
        }
    }
}

TEST_CASE("split_train_validation is stratified per entity") {
    auto batches_for = [](std::int64_t entity, int n) {
        std::vector<ChangeBatch> out;
        for (int i = 0; i < n; ++i) {
            ChangeBatch b;
            b.entity_id = entity;
            b.changes.push_back(simple_change(entity, 1));
            out.push_back(std::move(b));
        }
        return out;
    };

    SUBCASE("10 batches at fraction 0.8 split 8/2") {
        const auto batches = batches_for(1, 10);
        const SplitResult s = split_train_validation(batches, 0.8, 5);
        CHECK(s.train.size() == 8);
        CHECK(s.validation.size() == 2);
        CHECK(s.warnings.empty());
    }
    SUBCASE("single batch goes to train with a warning") {
        const SplitResult s = split_train_validation(batches_for(4, 1), 0.8, 5);
        CHECK(s.train.size() == 1);
        CHECK(s.validation.empty());
        REQUIRE(s.warnings.size() == 1);
        CHECK(s.warnings[0].find("entity 4") != std::string::npos);
    }
    SUBCASE("validation label set is a subset of the train label set") {
        std::vector<ChangeBatch> batches;
        for (auto [entity, n] : {std::pair<std::int64_t, int>{0, 9},
                                 {1, 2},
                                 {2, 1},
                                 {3, 5}}) {
            const auto more = batches_for(entity, n);
            batches.insert(batches.end(), more.begin(), more.end());
        }
        const SplitResult s = split_train_validation(batches, 0.8, 5);
        std::set<std::int64_t> train_labels, val_labels;
        for (const auto& b : s.train) train_labels.insert(b.entity_id);
        for (const auto& b : s.validation) val_labels.insert(b.entity_id);
        CHECK(std::includes(train_labels.begin(), train_labels.end(), val_labels.begin(),
                            val_labels.end()));
        // Entities with >= 2 batches appear on both sides.
        CHECK(val_labels == std::set<std::int64_t>{0, 1, 3});
        CHECK(s.train.size() + s.validation.size() == batches.size());
    }
    SUBCASE("invalid fraction") {
        CHECK_THROWS(split_train_validation(batches_for(0, 4), 0.0, 1));
        CHECK_THROWS(split_train_validation(batches_for(0, 4), 1.0, 1));
    }
}

TEST_CASE("diff records round-trip through JSONL") {
    const std::vector<ChangeDiffRecord> diffs = {
        diff_of(3, 1, {ctx("a", "P", "b")}, {ctx("c", "Q", "d")}),
    };
    testutil::TempDir dir;
    save_diffs_jsonl(diffs, dir.file("d.jsonl"));
    const auto loaded = load_diffs_jsonl(dir.file("d.jsonl"));
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].entity_id == 3);
    CHECK(loaded[0].bucket_id == 1);
    CHECK(loaded[0].introduced == diffs[0].introduced);
    CHECK(loaded[0].removed == diffs[0].removed);
}
