#include <benchmark/benchmark.h>

#include "devstyle/analysis.hpp"
#include "devstyle/java_parser.hpp"
#include "devstyle/model.hpp"
#include "devstyle/path_contexts.hpp"
#include "devstyle/rng.hpp"
#include "devstyle/synthetic.hpp"

namespace {

using namespace devstyle;

AstNode random_tree(Rng& rng, int depth, int max_depth) {
    AstNode node;
    if (depth >= max_depth || rng.next_below(4) == 0) {
        node.kind = "SN";
        node.token = "tok" + std::to_string(rng.next_below(50));
        return node;
    }
    node.kind = depth % 2 == 0 ? "B" : "IE";
    const std::size_t arity = 2 + rng.next_below(3);
    for (std::size_t i = 0; i < arity; ++i) {
        node.children.push_back(random_tree(rng, depth + 1, max_depth));
    }
    return node;
}

void BM_ParseMethod(benchmark::State& state) {
    const std::string source = R"(
        public int hash(String key, int seed) {
            int h = seed;
            for (int i = 0; i < key.length(); i++) {
                h = h * 31 + key.charAt(i);
            }
            if (h < 0) {
                h = -h;
            }
            return h % 1024;
        }
    )";
    JavaGrammar grammar;
    for (auto _ : state) {
        benchmark::DoNotOptimize(grammar.parse_method(source));
    }
}
BENCHMARK(BM_ParseMethod);

void BM_EnumeratePathContexts(benchmark::State& state) {
    Rng rng(7);
    const AstNode tree = random_tree(rng, 0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(enumerate_path_contexts(tree, 8, 2));
    }
    state.SetLabel(std::to_string(count_leaves(tree)) + " leaves");
}
BENCHMARK(BM_EnumeratePathContexts)->Arg(6)->Arg(8);

void BM_TrainStep(benchmark::State& state) {
    SyntheticCorpusConfig config;
    config.developer_count = 4;
    config.changes_per_developer = 32;
    config.buckets = 2;
    config.seed = 11;
    const auto diffs = generate_synthetic_corpus(config);
    const Vocabulary vocab = Vocabulary::build(diffs, 1);
    EncodeOptions options;
    std::vector<EncodedChange> encoded;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        encoded.push_back(encode_change(diffs[i], vocab, options, i));
    }
    const auto batches = make_batches(encoded, 16, 3);

    Hyperparams hp;
    hp.token_dim = 16;
    hp.path_dim = 16;
    hp.change_dim = 32;
    hp.batch_vector_dim = 8;
    hp.seed = 5;
    std::vector<std::int64_t> labels = {0, 1, 2, 3};
    ModelParameters params =
        ModelParameters::initialize(hp, vocab.token_count(), vocab.path_count(), labels);

    std::size_t i = 0;
    for (auto _ : state) {
        const ChangeBatch& batch = batches[i++ % batches.size()];
        benchmark::DoNotOptimize(
            loss_and_gradients(batch, static_cast<int>(batch.entity_id), params));
    }
}
BENCHMARK(BM_TrainStep);

void BM_KsTwoSample(benchmark::State& state) {
    Rng rng(23);
    std::vector<double> x, y;
    for (int i = 0; i < state.range(0); ++i) {
        x.push_back(rng.next_double());
        y.push_back(rng.next_double() * 1.1);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(ks_two_sample(x, y));
    }
}
BENCHMARK(BM_KsTwoSample)->Arg(100)->Arg(1000);

} // namespace

BENCHMARK_MAIN();
