#include <cstdint>
#include <cstdio>
#include <exception>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "devstyle/pipeline.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = -1;
};

void add_common(CLI::App* cmd, CommonOptions& options) {
    cmd->add_option("--config", options.config_path, "pipeline config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", options.out_override, "output directory (overrides config)");
    cmd->add_option("--seed", options.seed_override, "seed (overrides config)");
}

devstyle::PipelineConfig load_config(const CommonOptions& options) {
    auto config = devstyle::PipelineConfig::from_file(options.config_path);
    if (!options.out_override.empty()) config.out = options.out_override;
    if (options.seed_override >= 0) {
        config.seed = static_cast<std::uint64_t>(options.seed_override);
    }
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"devstyle: developer coding-style embeddings from method-change history"};
    app.require_subcommand(1);

    struct Cmd {
        CLI::App* sub;
        CommonOptions options;
        int run = 0;
    };
    std::map<std::string, Cmd> cmds;
    for (const char* name : {"mine", "extract", "encode", "train", "embed", "analyze",
                             "pipeline", "synth"}) {
        Cmd c;
        c.sub = app.add_subcommand(name);
        add_common(c.sub, cmds.emplace(name, std::move(c)).first->second.options);
    }
    cmds["mine"].sub->description("walk a git repository and emit method-change records");
    cmds["extract"].sub->description("turn method changes into path-context diffs");
    cmds["encode"].sub->description("build vocabularies and encode diffs");
    cmds["train"].sub->description("train the authorship attribution model for one run");
    cmds["embed"].sub->description("extract per-developer bucket embeddings for one run");
    cmds["analyze"].sub->description("average runs, map labeled pairs, run the KS tests");
    cmds["pipeline"].sub->description("run every stage end to end, all runs");
    cmds["synth"].sub->description("generate a synthetic corpus of change diffs");
    cmds["train"].sub->add_option("--run", cmds["train"].run, "run index (default 0)");
    cmds["embed"].sub->add_option("--run", cmds["embed"].run, "run index (default 0)");

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    const Cmd& cmd = cmds.at(name);
    try {
        devstyle::PipelineConfig config = load_config(cmd.options);
        // `pipeline` always starts from a clean manifest; single stages resume.
        devstyle::Manifest manifest = devstyle::Manifest::open(config, name == "pipeline");
        if (name == "mine") {
            devstyle::cmd_mine(config, manifest);
        } else if (name == "extract") {
            devstyle::cmd_extract(config, manifest);
        } else if (name == "encode") {
            devstyle::cmd_encode(config, manifest);
        } else if (name == "train") {
            devstyle::cmd_train(config, manifest, cmd.run);
        } else if (name == "embed") {
            devstyle::cmd_embed(config, manifest, cmd.run);
        } else if (name == "analyze") {
            devstyle::cmd_analyze(config, manifest);
        } else if (name == "synth") {
            devstyle::cmd_synth(config, manifest);
        } else {
            devstyle::cmd_pipeline(config, manifest);
        }
    } catch (const devstyle::StageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
