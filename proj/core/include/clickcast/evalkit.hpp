#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clickcast/data.hpp"
#include "clickcast/embedding.hpp"
#include "clickcast/forecaster.hpp"
#include "clickcast/reward.hpp"

namespace clickcast {

double mae(std::span<const double> pred, std::span<const double> truth);
double rmse(std::span<const double> pred, std::span<const double> truth);

/// Element-level metrics over every predicted horizon entry of every sample.
struct ForecastMetrics {
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t count = 0;  // number of predicted elements
};

ForecastMetrics forecast_metrics(const nn::Matrix& pred, const nn::Matrix& truth);

ForecastMetrics evaluate_copy(std::span<const ForecastSample> samples, int h);

/// `embeddings` rows align with samples; required iff the model is multimodal.
ForecastMetrics evaluate_model(const FusionForecaster& model, std::span<const ForecastSample> samples,
                               const nn::Matrix* embeddings);

enum class Method { Copy, Uni, MultiChangelog, MultiSummary };
inline constexpr Method kAllMethods[] = {Method::Copy, Method::Uni, Method::MultiChangelog, Method::MultiSummary};

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

struct SeedMetrics {
    std::uint64_t seed = 0;
    double mae = 0.0;
    double rmse = 0.0;
};

/// One row of the comparison table. Values are raw; `scale` applies at presentation only.
struct RunReport {
    std::string method;
    std::vector<SeedMetrics> per_seed;
    double mae_mean = 0.0;
    double rmse_mean = 0.0;
    std::optional<double> mae_std;   // sample std, present with >= 2 seeds
    std::optional<double> rmse_std;
    double scale = 100.0;
    std::size_t sample_count = 0;
    std::string sample_manifest;     // hash of the evaluated sample ids
    std::string config_fingerprint;
};

RunReport make_report(std::string method, std::vector<SeedMetrics> per_seed, std::size_t sample_count,
                      std::string sample_manifest, std::string config_fingerprint, double scale = 100.0);

/// Hash over the ordered sample ids; equal manifests mean identical evaluation sets.
std::string sample_manifest(std::span<const ForecastSample> samples);

/// Per-sample texts for the text branch. Summary mode falls back to the raw change log
/// for samples without a summary; it is an error if no sample has one.
std::map<std::string, std::string> text_inputs(std::span<const ForecastSample> samples, Method method,
                                               const std::map<std::string, std::string>& summaries);

struct CompareConfig {
    TSFConfig tsf;
    std::vector<std::uint64_t> seeds{0, 1, 2};
    std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
    double scale = 100.0;
    std::string config_fingerprint;
    /// When set, trained models are written as <dir>/<method>-seed<N>.bin.
    std::string model_dir;
};

/// Trains and evaluates every method on the same train/test samples, once per seed.
std::vector<RunReport> compare_baselines(std::span<const ForecastSample> train, std::span<const ForecastSample> test,
                                         const std::map<std::string, std::string>& summaries, Embedder& embedder,
                                         const CompareConfig& config);

/// File name used for a saved model: "<method-stem>-seed<N>.bin".
std::string model_file_name(Method method, std::uint64_t seed);

/**
 * Trains one model per seed for a forecaster method and saves them into
 * config.model_dir, embedding `model_fingerprint`. Returns the written paths.
 */
std::vector<std::string> train_method_models(Method method, std::span<const ForecastSample> train,
                                             const std::map<std::string, std::string>& summaries, Embedder& embedder,
                                             const CompareConfig& config, const std::string& model_fingerprint);

/**
 * Evaluates saved models (one per seed) of the given method; Copy ignores the paths.
 * When `expected_model_fingerprint` is given, a model carrying a different one is rejected.
 */
RunReport evaluate_method(Method method, std::span<const std::string> model_paths,
                          std::span<const ForecastSample> test, const std::map<std::string, std::string>& summaries,
                          Embedder& embedder, const std::string& config_fingerprint, double scale = 100.0,
                          const std::string* expected_model_fingerprint = nullptr);

/// Evaluates saved models (one per seed); the method is inferred as Uni or Multi+Summary.
RunReport evaluate_forecaster(std::span<const std::string> model_paths, std::span<const ForecastSample> test,
                              const std::map<std::string, std::string>& summaries, Embedder& embedder,
                              const std::string& config_fingerprint, double scale = 100.0);

struct LlmEvaluation {
    std::size_t count = 0;
    double mean_prediction_match = 0.0;
    double mean_reward = 0.0;
};

LlmEvaluation evaluate_llm_responses(std::span<const std::string> responses, std::span<const TrendLabel> truths,
                                     const SentimentScorer& scorer);

/// Columns: method,seed,mae,rmse,samples,scale,sample_manifest,config_fingerprint. Seed rows, then mean and std.
void write_report_csv(const std::string& path, std::span<const RunReport> reports);
std::string report_csv(std::span<const RunReport> reports);
/// Human-readable table with values multiplied by each report's scale.
std::string format_report_table(std::span<const RunReport> reports);

}  // namespace clickcast
