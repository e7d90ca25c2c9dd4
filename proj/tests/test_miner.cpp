#include <doctest.h>

#include <map>

#include "devstyle/miner.hpp"
#include "git_fixture.hpp"
#include "helpers.hpp"

using namespace devstyle;
using testutil::GitFixture;
using testutil::TempDir;

namespace {

std::string calc_class(const std::string& add_body, const std::string& scale_body) {
    return "public class Calc {\n"
           "    int add(int a, int b) { " + add_body + " }\n"
           "    int scale(int a) { " + scale_body + " }\n"
           "}\n";
}

/// Ten scripted commits with known expected record counts. The oracle column
/// is what `git diff --name-status` reports per commit, restricted to .java
/// files; the expectation column encodes which of those file edits carry a
/// real (non-formatting) method change.
struct FixtureCommit {
    std::string hash;
    int expected_records;
};

struct Fixture {
    std::vector<FixtureCommit> commits;
    std::string merge_hash;
};

Fixture build_fixture(GitFixture& repo) {
    Fixture fx;
    auto record = [&](const std::string& hash, int expected) {
        fx.commits.push_back({hash, expected});
    };

    // 1: two methods created (two records, before_source empty).
    repo.write("src/Calc.java", calc_class("return a + b;", "return a * 2;"));
    record(repo.commit("add calc", "Ann", "ann@x", 1000), 2);

    // 2: edit one method body.
    repo.write("src/Calc.java", calc_class("return b + a;", "return a * 2;"));
    record(repo.commit("swap operands", "Ann", "ann@x", 1010), 1);

    // 3: formatting-only change (same AST).
    repo.write("src/Calc.java",
               "public class Calc {\n"
               "    int add(int a, int b)   {\n        return b + a;\n    }\n"
               "    int scale(int a) { return a * 2; }\n"
               "}\n");
    record(repo.commit("reformat", "Bob", "bob@y", 1020), 0);

    // 4: new method added in a second file.
    repo.write("src/Util.java",
               "class Util {\n    static int clamp(int v) { return v < 0 ? 0 : v; }\n}\n");
    record(repo.commit("add util", "Bob", "bob@y", 1030), 1);

    // 5: comment-only change (same AST).
    repo.write("src/Util.java",
               "class Util {\n    // clamps to zero\n"
               "    static int clamp(int v) { return v < 0 ? 0 : v; }\n}\n");
    record(repo.commit("document util", "Ann", "ann2@x", 1040), 0);

    // 6: method removed.
    repo.write("src/Calc.java",
               "public class Calc {\n"
               "    int add(int a, int b)   {\n        return b + a;\n    }\n"
               "}\n");
    record(repo.commit("drop scale", "Ann", "ann@x", 1050), 1);

    // 7: non-Java file change only.
    repo.write("README.md", "calculator\n");
    record(repo.commit("docs", "Bob", "bob@y", 1060), 0);

    // 8: edit method in one file, add method in another (two records).
    repo.write("src/Calc.java",
               "public class Calc {\n"
               "    int add(int a, int b)   {\n        return a + b + 0;\n    }\n"
               "}\n");
    repo.write("src/Util.java",
               "class Util {\n    // clamps to zero\n"
               "    static int clamp(int v) { return v < 0 ? 0 : v; }\n"
               "    static int wrap(int v) { return v % 10; }\n}\n");
    record(repo.commit("two files", "Cara", "cara@z", 1070), 2);

    // 9: delete a whole file (one removal record).
    repo.remove("src/Util.java");
    record(repo.commit("drop util", "Cara", "cara@z", 1080), 2);

    // 10: whitespace-only edit again (zero records).
    repo.write("src/Calc.java",
               "public class Calc {\n"
               "    int add(int a, int b) { return a + b + 0; }\n"
               "}\n");
    record(repo.commit("tidy", "Ann", "ann@x", 1090), 0);

    return fx;
}

} // namespace

TEST_CASE("mining a scripted 10-commit repository matches the per-commit oracle") {
    TempDir dir;
    GitFixture repo(dir);
    const Fixture fx = build_fixture(repo);

    const MiningResult result = mine_method_changes(repo.root(), {});
    REQUIRE(result.mined_commits.size() == 10);

    std::map<std::string, int> per_commit;
    for (const auto& r : result.records) ++per_commit[r.commit.hash];

    for (std::size_t i = 0; i < fx.commits.size(); ++i) {
        CAPTURE(i);
        CHECK(per_commit[fx.commits[i].hash] == fx.commits[i].expected_records);
    }

    // Commit 9 removed Util.java with two methods: both are removal records.
    int removals = 0;
    for (const auto& r : result.records) {
        if (r.commit.hash == fx.commits[8].hash) {
            CHECK(r.after_source.empty());
            CHECK(!r.before_source.empty());
            ++removals;
        }
    }
    CHECK(removals == 2);

    // Commit 1 added methods: before side empty.
    for (const auto& r : result.records) {
        if (r.commit.hash == fx.commits[0].hash) {
            CHECK(r.before_source.empty());
            CHECK(!r.after_source.empty());
        }
        CHECK(r.before_source != r.after_source);
        CHECK(!r.method_key.empty());
    }

    // Identity merging: ann@x and ann2@x share the name Ann.
    std::set<std::int64_t> ann_entities;
    for (const auto& r : result.records) {
        if (r.commit.author.name == "Ann") ann_entities.insert(r.entity_id);
    }
    CHECK(ann_entities.size() == 1);
    CHECK(result.entities.size() == 3); // Ann (merged), Bob, Cara
}

TEST_CASE("mining is deterministic and ordered") {
    TempDir dir;
    GitFixture repo(dir);
    build_fixture(repo);

    const MiningResult first = mine_method_changes(repo.root(), {});
    const MiningResult second = mine_method_changes(repo.root(), {});

    TempDir out;
    save_records_jsonl(first.records, out.file("a.jsonl"));
    save_records_jsonl(second.records, out.file("b.jsonl"));
    CHECK(testutil::read_file(out.file("a.jsonl")) ==
          testutil::read_file(out.file("b.jsonl")));
    CHECK(first.skip_report == second.skip_report);

    // Ordering: history position, then file path, then ordinal.
    std::map<std::string, std::size_t> commit_position;
    for (std::size_t i = 0; i < first.mined_commits.size(); ++i) {
        commit_position[first.mined_commits[i].hash] = i;
    }
    for (std::size_t i = 1; i < first.records.size(); ++i) {
        const auto& prev = first.records[i - 1];
        const auto& cur = first.records[i];
        const auto prev_key = std::tuple(commit_position.at(prev.commit.hash),
                                         prev.file_path, prev.ordinal);
        const auto cur_key =
            std::tuple(commit_position.at(cur.commit.hash), cur.file_path, cur.ordinal);
        CHECK(prev_key < cur_key);
    }

    // Round-trip through the JSONL format.
    const auto loaded = load_records_jsonl(out.file("a.jsonl"));
    REQUIRE(loaded.size() == first.records.size());
    CHECK(loaded[0].method_key == first.records[0].method_key);
    CHECK(loaded[0].commit.hash == first.records[0].commit.hash);
}

TEST_CASE("merge commits are skipped") {
    TempDir dir;
    GitFixture repo(dir);
    repo.write("A.java", "class A { void f() { } }\n");
    repo.commit("base", "Ann", "ann@x", 100);
    repo.git({"checkout", "-q", "-b", "feature"});
    repo.write("A.java", "class A { void f() { g(); } void g() { } }\n");
    repo.commit("feature work", "Bob", "bob@y", 110);
    repo.git({"checkout", "-q", "main"});
    repo.write("B.java", "class B { int h() { return 1; } }\n");
    repo.commit("main work", "Ann", "ann@x", 120);
    repo.git({"merge", "-q", "--no-ff", "-m", "merge feature", "feature"});

    const MiningResult result = mine_method_changes(repo.root(), {});
    CHECK(result.mined_commits.size() == 3); // merge commit not mined
    for (const auto& c : result.mined_commits) CHECK(c.parent_count <= 1);
    for (const auto& r : result.records) CHECK(r.commit.parent_count <= 1);
}

TEST_CASE("bulk commits and unparseable files go to the skip report") {
    TempDir dir;
    GitFixture repo(dir);
    repo.write("Good.java", "class Good { void f() { } }\n");
    repo.write("Bad.java", "class Bad { void broken( { }\n"); // unbalanced
    repo.commit("mixed", "Ann", "ann@x", 100);

    for (int i = 0; i < 4; ++i) {
        repo.write("bulk/F" + std::to_string(i) + ".java",
                   "class F" + std::to_string(i) + " { void f() { } }\n");
    }
    repo.commit("bulk import", "Bob", "bob@y", 110);

    MinerConfig config;
    config.max_files_per_commit = 3;
    const MiningResult result = mine_method_changes(repo.root(), config);

    CHECK(result.skip_report.find("Bad.java") != std::string::npos);
    CHECK(result.skip_report.find("bulk commit") != std::string::npos);
    for (const auto& r : result.records) {
        CHECK(r.file_path != "Bad.java");
        CHECK(r.file_path.rfind("bulk/", 0) != 0);
    }
}

TEST_CASE("unreadable repository is fatal") {
    TempDir dir;
    CHECK_THROWS(mine_method_changes(dir.str() + "/nope", {}));
}

TEST_CASE("bucket_commits partitions with the remainder in the earliest buckets") {
    auto hashes = [](int n) {
        std::vector<std::string> out;
        for (int i = 0; i < n; ++i) out.push_back("c" + std::to_string(i));
        return out;
    };

    SUBCASE("100 commits, 20 buckets of 5") {
        const auto buckets = bucket_commits(hashes(100), 20);
        REQUIRE(buckets.size() == 20);
        for (const auto& b : buckets) CHECK(b.commit_hashes.size() == 5);
    }
    SUBCASE("101 commits: first bucket gets 6") {
        const auto buckets = bucket_commits(hashes(101), 20);
        REQUIRE(buckets.size() == 20);
        CHECK(buckets[0].commit_hashes.size() == 6);
        for (std::size_t i = 1; i < buckets.size(); ++i) {
            CHECK(buckets[i].commit_hashes.size() == 5);
        }
    }
    SUBCASE("single commit single bucket") {
        const auto buckets = bucket_commits(hashes(1), 1);
        REQUIRE(buckets.size() == 1);
        CHECK(buckets[0].commit_hashes == std::vector<std::string>{"c0"});
    }
    SUBCASE("size and order invariants on odd splits") {
        for (int n : {7, 23, 57}) {
            for (int k : {1, 2, 3, 5, 7}) {
                const auto buckets = bucket_commits(hashes(n), k);
                std::size_t total = 0, min_size = SIZE_MAX, max_size = 0;
                std::vector<std::string> flattened;
                for (const auto& b : buckets) {
                    total += b.commit_hashes.size();
                    min_size = std::min(min_size, b.commit_hashes.size());
                    max_size = std::max(max_size, b.commit_hashes.size());
                    flattened.insert(flattened.end(), b.commit_hashes.begin(),
                                     b.commit_hashes.end());
                }
                CHECK(total == static_cast<std::size_t>(n));
                CHECK(max_size - min_size <= 1);
                CHECK(flattened == hashes(n));
            }
        }
    }
    SUBCASE("out-of-range bucket counts") {
        CHECK_THROWS(bucket_commits(hashes(5), 0));
        CHECK_THROWS(bucket_commits(hashes(5), 6));
    }
}

TEST_CASE("filter_developers keeps entities at or above the threshold") {
    auto record_for = [](std::int64_t entity) {
        MethodChangeRecord r;
        r.entity_id = entity;
        r.after_source = "x";
        return r;
    };

    SUBCASE("999 changes with threshold 1000 is excluded") {
        std::vector<MethodChangeRecord> records;
        for (int i = 0; i < 999; ++i) records.push_back(record_for(1));
        for (int i = 0; i < 1000; ++i) records.push_back(record_for(2));
        const FilterResult f = filter_developers(records, 1000);
        CHECK(f.excluded_entities == std::set<std::int64_t>{1});
        CHECK(f.kept.size() == 1000);
    }
    SUBCASE("threshold 0 keeps everything") {
        const std::vector<MethodChangeRecord> records = {record_for(1), record_for(2)};
        const FilterResult f = filter_developers(records, 0);
        CHECK(f.excluded_entities.empty());
        CHECK(f.kept.size() == 2);
    }
    SUBCASE("counts A:5 B:2 with threshold 3 keeps A") {
        std::vector<MethodChangeRecord> records;
        for (int i = 0; i < 5; ++i) records.push_back(record_for(10));
        for (int i = 0; i < 2; ++i) records.push_back(record_for(20));
        const FilterResult f = filter_developers(records, 3);
        CHECK(f.excluded_entities == std::set<std::int64_t>{20});
        REQUIRE(f.kept.size() == 5);
        for (const auto& r : f.kept) CHECK(r.entity_id == 10);
    }
}
