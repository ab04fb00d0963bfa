#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "clickcast/embedding.hpp"
#include "clickcast/evalkit.hpp"
#include "clickcast/forecaster.hpp"
#include "clickcast/grpo.hpp"
#include "clickcast/prompt.hpp"
#include "clickcast/reward.hpp"
#include "clickcast/synth.hpp"

namespace clickcast {

struct RewardSettings {
    std::string sentiment = "lexicon";  // lexicon | external
    std::string positive_lexicon;       // empty: built-in list
    std::string negative_lexicon;
    std::string sentiment_model = "default";
    bool sentiment_alignment = true;
};

struct SummarizerSettings {
    std::string mode = "mock";  // mock | external
    std::string endpoint;       // external only; falls back to CLICKCAST_LLM_ENDPOINT
    std::string model = "default";
    int max_concurrency = 4;
    bool external_reformat = true;
};

struct EmbedderSettings {
    std::string kind = "hashing";  // hashing | external
    std::uint64_t seed = 0x5eedULL;
    std::string endpoint;          // external only; falls back to CLICKCAST_EMBED_ENDPOINT
    std::string model = "default";
};

struct EvalSettings {
    int seeds = 3;                              // seeds are run_seed, run_seed + 1, ...
    int test_campaigns = 2;                     // last N campaigns, unless test_ids is set
    std::vector<std::string> test_ids;
    std::vector<std::string> methods{"Copy", "Uni", "Multi+Changelog", "Multi+Summary"};
    double scale = 100.0;
};

/**
 * Everything that determines a run. JSON schema: the member names below, with
 * nested objects "generator", "prompt", "reward", "summarizer", "embedder",
 * "grpo", "forecaster" and "eval". Missing keys keep defaults; unknown keys are errors.
 */
struct RunConfig {
    std::uint64_t seed = 0;
    std::string output_dir = "clickcast-run";
    std::string data_path;  // empty: generate synthetic data
    GeneratorConfig generator;
    PromptSpec prompt;
    RewardSettings reward;
    SummarizerSettings summarizer;
    EmbedderSettings embedder;
    GrpoConfig grpo;
    int grpo_prompts = 20;
    TSFConfig forecaster;
    EvalSettings eval;

    /// Checks cross-module consistency (lookback/horizon agree, methods known, ...).
    void validate() const;

    /// Canonical JSON. output_dir is excluded: it says where a run goes, not what it computes.
    std::string canonical_json() const;
    std::string fingerprint() const;
    std::string to_json_string() const;

    /// Applies `seed` to the generator, GRPO and forecaster seeds before nested overrides.
    static RunConfig from_json(const std::string& text);
    static RunConfig from_file(const std::string& path);
    /// Sets the run seed and the derived component seeds.
    void set_seed(std::uint64_t s);
};

struct StageError : std::runtime_error {
    StageError(std::string stage_name, const std::string& what)
        : std::runtime_error("stage '" + stage_name + "' failed: " + what), stage(std::move(stage_name)) {}
    std::string stage;
};

struct ArtifactEntry {
    std::string path;    // relative to the output directory
    std::string sha256;  // of the file contents
};

struct StageRecord {
    std::string name;
    std::string fingerprint;
    std::vector<ArtifactEntry> artifacts;
    bool complete = false;
    bool executed = false;  // this run, as opposed to a cache hit; not persisted
};

struct Manifest {
    std::string config_fingerprint;
    std::vector<StageRecord> stages;

    const StageRecord* find(const std::string& name) const;
    std::string to_json_string() const;
    static Manifest from_json_string(const std::string& text);
};

/// Stage names in execution order; the first is "ingest" when data_path is set.
inline constexpr const char* kStageNames[] = {"generate", "prompts", "summaries", "score", "grpo", "train", "evaluate"};

/// Builds the hermetic or external components a config asks for.
/// `cache_dir` backs the external encoder's on-disk cache.
std::unique_ptr<Embedder> make_embedder(const EmbedderSettings& settings, const std::string& cache_dir = {});
std::unique_ptr<SentimentScorer> make_sentiment_scorer(const RewardSettings& settings);

/**
 * Runs the stage DAG data -> prompts -> summaries -> {score, grpo}; data + summaries
 * -> train -> evaluate. A stage whose fingerprint and on-disk artifacts match the
 * manifest is skipped. Writes <output_dir>/manifest.json after every stage.
 */
Manifest pipeline_run(const RunConfig& config, std::ostream* log = nullptr);

}  // namespace clickcast
