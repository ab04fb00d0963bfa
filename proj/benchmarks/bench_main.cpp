#include <benchmark/benchmark.h>

#include "clickcast/data.hpp"
#include "clickcast/embedding.hpp"
#include "clickcast/forecaster.hpp"
#include "clickcast/grpo.hpp"
#include "clickcast/prompt.hpp"
#include "clickcast/reward.hpp"
#include "clickcast/synth.hpp"

using namespace clickcast;

namespace {

void BM_ComputeReward(benchmark::State& state) {
    LexiconSentimentScorer scorer;
    const std::string raw =
        "<Reasoning> Keywords were removed two days ago and budget dropped, so clicks should decline. </Reasoning>"
        "<Prediction> Decrease </Prediction>";
    for (auto _ : state) benchmark::DoNotOptimize(compute_reward(raw, TrendLabel::Decrease, scorer));
}
BENCHMARK(BM_ComputeReward);

void BM_GroupAdvantages(benchmark::State& state) {
    std::vector<double> r(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<double>(i % 5) * 0.5 - 0.5;
    for (auto _ : state) benchmark::DoNotOptimize(group_advantages(r));
}
BENCHMARK(BM_GroupAdvantages)->Arg(8)->Arg(64);

void BM_HashingEmbed(benchmark::State& state) {
    HashingEmbedder embedder;
    const std::string text = "Budget cut on day 3; keywords paused on day 5; bids raised on day 9.";
    for (auto _ : state) benchmark::DoNotOptimize(embedder.embed(text));
}
BENCHMARK(BM_HashingEmbed);

void BM_BuildPrompt(benchmark::State& state) {
    GeneratorConfig g;
    g.num_campaigns = 1;
    const auto samples = make_samples(generate_dataset(g), 14, 5).samples;
    for (auto _ : state) benchmark::DoNotOptimize(build_prompt(samples.front(), PromptSpec{}));
}
BENCHMARK(BM_BuildPrompt);

void BM_ForecasterStep(benchmark::State& state) {
    TSFConfig cfg;
    const auto mode = state.range(0) ? ForecastMode::Multi : ForecastMode::Uni;
    FusionForecaster model(cfg, mode, "bench");
    model.initialize(1);
    const nn::Matrix x = nn::Matrix::Random(cfg.batch_size, cfg.lookback);
    const nn::Matrix e = nn::Matrix::Random(cfg.batch_size, cfg.embedding_dim);
    const nn::Matrix y = nn::Matrix::Random(cfg.batch_size, cfg.horizon);
    if (mode == ForecastMode::Multi) model.fit_text_standardization(e);
    for (auto _ : state) benchmark::DoNotOptimize(model.loss_and_gradients(x, state.range(0) ? &e : nullptr, y));
}
BENCHMARK(BM_ForecasterStep)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
