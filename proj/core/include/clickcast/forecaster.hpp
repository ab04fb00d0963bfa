#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clickcast/data.hpp"
#include "clickcast/embedding.hpp"
#include "clickcast/nn.hpp"

namespace clickcast {

struct TSFConfig {
    int layers = 3;
    int heads = 4;
    int hidden = 64;
    int ff_dim = 256;
    int lookback = 14;
    int horizon = 5;
    int embedding_dim = static_cast<int>(kEmbeddingDim);
    std::vector<int> text_hidden{512, 256, 128};
    double alpha = 0.5;
    double dropout = 0.0;
    double learning_rate = 2e-3;
    /// "cosine" anneals the step size to zero over training; "constant" keeps it fixed.
    std::string lr_schedule = "cosine";
    double grad_clip = 1.0;
    int epochs = 15;
    int batch_size = 32;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class ForecastMode { Uni, Multi };

std::string_view to_string(ForecastMode m);
ForecastMode parse_forecast_mode(std::string_view s);

/**
 * Numeric transformer branch plus optional text projection branch, fused as
 * prediction = numeric + alpha * text.
 *
 * Numeric: value -> Linear(1, hidden) + sinusoidal positions -> encoder layers ->
 * flatten all positions -> Linear(lookback * hidden, horizon).
 * Text: pooled embedding -> fixed per-feature standardization -> [Linear + ReLU] per
 * text_hidden size -> Linear(., horizon). The standardization is fitted on the training
 * embeddings and is not trained; pooled embeddings share a large common component.
 */
class FusionForecaster {
public:
    using Matrix = nn::Matrix;

    FusionForecaster(const TSFConfig& config, ForecastMode mode, std::string embedder_identity = {});

    const TSFConfig& config() const { return config_; }
    ForecastMode mode() const { return mode_; }
    bool multimodal() const { return mode_ == ForecastMode::Multi; }
    double alpha() const { return config_.alpha; }
    void set_alpha(double alpha);
    const std::string& embedder_identity() const { return embedder_identity_; }
    const std::string& fingerprint() const { return fingerprint_; }
    void set_fingerprint(std::string fp) { fingerprint_ = std::move(fp); }

    /// Re-initializes all weights from the seed (numeric branch first).
    void initialize(std::uint64_t seed);

    /// Sets the text-input standardization to the column mean / std of `embeddings`.
    void fit_text_standardization(const Matrix& embeddings);

    // Batched inference: x is n x lookback, embeddings n x embedding_dim; result n x horizon.
    Matrix numeric_output(const Matrix& x) const;
    Matrix text_output(const Matrix& embeddings) const;
    Matrix predict_batch(const Matrix& x, const Matrix* embeddings) const;

    /// Single-sample prediction; the embedding must be present iff the model is multimodal.
    std::vector<double> predict(std::span<const double> x, const TextEmbedding* embedding) const;

    /// Mean squared error over all n * horizon entries.
    double loss(const Matrix& x, const Matrix* embeddings, const Matrix& y) const;
    /// Zeroes and fills parameter gradients of the MSE loss; returns the loss.
    double loss_and_gradients(const Matrix& x, const Matrix* embeddings, const Matrix& y,
                              Xoshiro256* dropout_rng = nullptr);

    nn::ParameterList parameters();
    nn::ParameterList numeric_parameters();
    nn::ParameterList text_parameters();
    std::size_t parameter_count();

    void save(const std::string& path);
    /// Throws when the file is malformed or (for multimodal models) the embedder identity differs.
    static FusionForecaster load(const std::string& path, const std::string* expected_embedder = nullptr);

private:
    struct NumericCache;
    Matrix numeric_forward(const Matrix& x, NumericCache* cache, Xoshiro256* dropout_rng) const;
    void numeric_backward(const Matrix& dout, const NumericCache& cache);

    struct TextCache;
    Matrix text_forward(const Matrix& e, TextCache* cache) const;
    void text_backward(const Matrix& dout, const TextCache& cache);

    void check_inputs(const Matrix& x, const Matrix* embeddings) const;
    /// Trainable parameters followed by fixed buffers; this is the on-disk order.
    nn::ParameterList stored_tensors();

    TSFConfig config_;
    ForecastMode mode_;
    std::string embedder_identity_;
    std::string fingerprint_;

    nn::Linear input_proj_;
    Matrix positions_;
    std::vector<nn::EncoderLayer> encoder_;
    nn::Linear head_;
    std::vector<nn::Linear> text_layers_;
    nn::Parameter text_shift_;  // 1 x embedding_dim
    nn::Parameter text_scale_;
};

struct TrainingHistory {
    std::vector<double> epoch_loss;
};

struct TrainedForecaster {
    FusionForecaster model;
    TrainingHistory history;
};

/// Stacks sample lookbacks/targets into matrices.
nn::Matrix lookback_matrix(std::span<const ForecastSample> samples);
nn::Matrix target_matrix(std::span<const ForecastSample> samples);

/**
 * Embeds one text per sample. `texts` maps sample_id -> text; a missing id is an
 * invalid-argument error.
 */
nn::Matrix embedding_matrix(std::span<const ForecastSample> samples,
                            const std::map<std::string, std::string>& texts, Embedder& embedder);

/**
 * Minimizes MSE with Adam. In Multi mode both branches train jointly; the
 * embedder stays frozen.
 */
TrainedForecaster train_forecaster(std::span<const ForecastSample> samples,
                                   const std::map<std::string, std::string>& texts, ForecastMode mode,
                                   const TSFConfig& config, Embedder* embedder);

/// Same, with embeddings precomputed (rows aligned with samples).
TrainedForecaster train_forecaster(std::span<const ForecastSample> samples, const nn::Matrix* embeddings,
                                   ForecastMode mode, const TSFConfig& config,
                                   const std::string& embedder_identity);

/// Repeats mean(last h of x) h times.
std::vector<double> copy_baseline(std::span<const double> x, int h);

}  // namespace clickcast
