#include <doctest.h>

#include <functional>
#include <limits>

#include "devstyle/java_parser.hpp"
#include "devstyle/path_contexts.hpp"
#include "devstyle/rng.hpp"
#include "path_oracle.hpp"

using namespace devstyle;

namespace {

constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

AstNode leaf_node(const char* kind, const char* token) {
    AstNode n;
    n.kind = kind;
    n.token = token;
    return n;
}

std::size_t choose2(std::size_t n) { return n * (n - 1) / 2; }

} // namespace

TEST_CASE("single-leaf tree has no path-contexts") {
    CHECK(enumerate_path_contexts(leaf_node("SN", "x"), 8, 2).empty());
    CHECK(enumerate_path_contexts(empty_method_tree(), 8, 2).empty());
}

TEST_CASE("limits are validated") {
    CHECK_THROWS(enumerate_path_contexts(leaf_node("SN", "x"), 2, 2));
    CHECK_THROWS(enumerate_path_contexts(leaf_node("SN", "x"), 8, 0));
}

TEST_CASE("square fixture yields the expected method-name-to-parameter context") {
    JavaGrammar grammar;
    const AstNode ast = grammar.parse_method("int square(int x) { return x * x; }");
    const auto contexts = enumerate_path_contexts(ast, 8, 2);

    PathContext expected;
    expected.start_token = "square";
    expected.path = parse_path("SN^MD_SVD_SN");
    expected.end_token = "x";
    CHECK(contexts.count(expected) == 1);
}

TEST_CASE("hand-built two-level tree enumerates exactly the in-limit pairs") {
    // IE(SN(a), B(SN(b), SN(c)))
    AstNode root;
    root.kind = "IE";
    root.children.push_back(leaf_node("SN", "a"));
    AstNode block;
    block.kind = "B";
    block.children.push_back(leaf_node("SN", "b"));
    block.children.push_back(leaf_node("SN", "c"));
    root.children.push_back(std::move(block));

    const auto contexts = enumerate_path_contexts(root, 8, 2);
    REQUIRE(contexts.size() == 3);
    CHECK(contexts.count({"a", parse_path("SN^IE_B_SN"), "b"}) == 1);
    CHECK(contexts.count({"a", parse_path("SN^IE_B_SN"), "c"}) == 1);
    CHECK(contexts.count({"b", parse_path("SN^B_SN"), "c"}) == 1);

    // Tight length limit cuts the deep pairs.
    const auto short_only = enumerate_path_contexts(root, 3, 2);
    REQUIRE(short_only.size() == 1);
    CHECK(short_only.count({"b", parse_path("SN^B_SN"), "c"}) == 1);
}

TEST_CASE("width limit uses child-index distance at the top node") {
    AstNode root;
    root.kind = "B";
    root.children.push_back(leaf_node("SN", "a"));
    root.children.push_back(leaf_node("SN", "b"));
    root.children.push_back(leaf_node("SN", "c"));
    root.children.push_back(leaf_node("SN", "d"));

    CHECK(enumerate_path_contexts(root, 8, 1).size() == 3);  // adjacent only
    CHECK(enumerate_path_contexts(root, 8, 2).size() == 5);
    CHECK(enumerate_path_contexts(root, 8, 3).size() == 6);  // all pairs
}

TEST_CASE("matches the brute-force oracle on 50 seeded random trees") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(derive_seed(4242, "ast", seed));
        const AstNode tree = testutil::random_ast(rng, 12);
        CAPTURE(seed);
        CHECK(enumerate_path_contexts(tree, 8, 2) == testutil::oracle_enumerate(tree, 8, 2));
        CHECK(enumerate_path_contexts(tree, kUnlimited, kUnlimited) ==
              testutil::oracle_enumerate(tree, kUnlimited, kUnlimited));
    }
}

TEST_CASE("unlimited enumeration covers every leaf pair") {
    Rng rng(777);
    for (int trial = 0; trial < 20; ++trial) {
        AstNode tree = testutil::random_ast(rng, 12);
        // With unique leaf tokens no two pairs can collapse into one set
        // member, so the C(L,2) bound is met exactly at unlimited settings.
        int counter = 0;
        const std::function<void(AstNode&)> relabel = [&](AstNode& n) {
            if (n.is_leaf()) {
                n.token = "u" + std::to_string(counter++);
                return;
            }
            for (auto& c : n.children) relabel(c);
        };
        relabel(tree);

        const std::size_t leaves = count_leaves(tree);
        const auto limited = enumerate_path_contexts(tree, 8, 2);
        const auto unlimited = enumerate_path_contexts(tree, kUnlimited, kUnlimited);
        CHECK(limited.size() <= choose2(leaves));
        CHECK(unlimited.size() == choose2(leaves));
        CHECK(limited.size() <= unlimited.size());
    }
}

TEST_CASE("every enumerated path starts and ends at a leaf kind and round-trips") {
    Rng rng(31);
    const AstNode tree = testutil::random_ast(rng, 12);
    for (const PathContext& ctx : enumerate_path_contexts(tree, kUnlimited, kUnlimited)) {
        CHECK(!ctx.start_token.empty());
        CHECK(!ctx.end_token.empty());
        CHECK(ctx.path.node_kinds.size() >= 2);
        CHECK(ctx.path.directions.size() == ctx.path.node_kinds.size() - 1);
        CHECK(ctx.path.directions.front() == PathStep::Up);
        CHECK(ctx.path.directions.back() == PathStep::Down);
        const std::string serialized = serialize_path(ctx.path);
        CHECK(parse_path(serialized) == ctx.path);
        CHECK(parse_path_context(serialize_path_context(ctx)) == ctx);
    }
}

TEST_CASE("canonical orientation always has start <= end") {
    Rng rng(55);
    for (int trial = 0; trial < 10; ++trial) {
        const AstNode tree = testutil::random_ast(rng, 12);
        for (const PathContext& ctx : enumerate_path_contexts(tree, 8, 2)) {
            CHECK(ctx.start_token <= ctx.end_token);
        }
    }
}

TEST_CASE("context serialization escapes commas and backslashes") {
    PathContext ctx{"a,b", parse_path("SN^IE_SN"), "c\\d"};
    const std::string serialized = serialize_path_context(ctx);
    CHECK(serialized == "a\\,b,SN^IE_SN,c\\\\d");
    CHECK(parse_path_context(serialized) == ctx);
}

TEST_CASE("diff_path_contexts computes the two set differences") {
    const PathContext a{"a", parse_path("SN^B_SN"), "b"};
    const PathContext b{"b", parse_path("SN^B_SN"), "c"};
    const PathContext c{"c", parse_path("SN^B_SN"), "d"};

    SUBCASE("identical sets") {
        const auto d = diff_path_contexts({a, b}, {a, b});
        CHECK(d.introduced.empty());
        CHECK(d.removed.empty());
        CHECK(d.empty());
    }
    SUBCASE("added method: empty before") {
        const auto d = diff_path_contexts({}, {a, b});
        CHECK(d.introduced == std::set<PathContext>{a, b});
        CHECK(d.removed.empty());
    }
    SUBCASE("mixed") {
        const auto d = diff_path_contexts({a, b}, {b, c});
        CHECK(d.introduced == std::set<PathContext>{c});
        CHECK(d.removed == std::set<PathContext>{a});
    }
}

TEST_CASE("diff is antisymmetric and self-diff is empty (property)") {
    Rng rng(808);
    for (int trial = 0; trial < 15; ++trial) {
        const auto s1 =
            enumerate_path_contexts(testutil::random_ast(rng, 10), kUnlimited, kUnlimited);
        const auto s2 =
            enumerate_path_contexts(testutil::random_ast(rng, 10), kUnlimited, kUnlimited);
        CHECK(diff_path_contexts(s1, s1).empty());
        const auto fwd = diff_path_contexts(s1, s2);
        const auto rev = diff_path_contexts(s2, s1);
        CHECK(fwd.introduced == rev.removed);
        CHECK(fwd.removed == rev.introduced);
        std::set<PathContext> overlap;
        std::set_intersection(fwd.introduced.begin(), fwd.introduced.end(),
                              fwd.removed.begin(), fwd.removed.end(),
                              std::inserter(overlap, overlap.end()));
        CHECK(overlap.empty());
    }
}
