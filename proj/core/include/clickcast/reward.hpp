#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clickcast/data.hpp"
#include "clickcast/transport.hpp"

namespace clickcast {

inline constexpr double kBlockPenalty = -0.25;

struct ParsedResponse {
    std::optional<std::string> reasoning;
    std::optional<TrendLabel> prediction;
    double format_penalty = 0.0;  // one of 0, -0.25, -0.5

    bool compliant() const { return format_penalty == 0.0; }
};

/**
 * Scans for the first <Reasoning>...</Reasoning> and <Prediction>...</Prediction>
 * blocks (tag names case-insensitive). Each block that is missing, unclosed or
 * has invalid content costs kBlockPenalty. Reasoning must be non-blank;
 * prediction must be exactly Increase or Decrease after trimming.
 */
ParsedResponse parse_response(std::string_view raw);

enum class Sentiment { Positive, Negative, Neutral };

std::string_view to_string(Sentiment s);

struct SentimentResult {
    Sentiment label = Sentiment::Neutral;
    double confidence = 0.0;
};

class SentimentScorer {
public:
    virtual ~SentimentScorer() = default;
    virtual SentimentResult score(std::string_view text) const = 0;
    virtual std::string identity() const = 0;
};

/// Word-list sentiment: confidence = |pos - neg| / (pos + neg), NEUTRAL on no hits or a tie.
class LexiconSentimentScorer final : public SentimentScorer {
public:
    /// Uses the built-in word lists.
    LexiconSentimentScorer();
    LexiconSentimentScorer(std::vector<std::string> positive, std::vector<std::string> negative);

    /// Plain-text lists, one word per line; blank lines and '#' comments ignored.
    static LexiconSentimentScorer from_files(const std::string& positive_path,
                                             const std::string& negative_path);

    SentimentResult score(std::string_view text) const override;
    std::string identity() const override;

    const std::vector<std::string>& positive() const { return positive_; }
    const std::vector<std::string>& negative() const { return negative_; }

    static const std::vector<std::string>& default_positive();
    static const std::vector<std::string>& default_negative();

private:
    std::vector<std::string> positive_;
    std::vector<std::string> negative_;
};

SentimentResult lexicon_sentiment(std::string_view text);

/**
 * Adapter for an external sentiment service: POST /sentiment {"text"} returning
 * {"label": "POSITIVE"|"NEGATIVE"|"NEUTRAL", "score": c}. Transport failures fall
 * back to the lexicon scorer so reward computation never fails.
 */
class ExternalSentimentScorer final : public SentimentScorer {
public:
    ExternalSentimentScorer(std::shared_ptr<Transport> transport, std::string model_name);

    SentimentResult score(std::string_view text) const override;
    std::string identity() const override { return "external:" + model_name_; }
    std::size_t fallbacks() const { return fallbacks_.load(); }

private:
    std::shared_ptr<Transport> transport_;
    std::string model_name_;
    LexiconSentimentScorer fallback_;
    mutable std::atomic<std::size_t> fallbacks_{0};
};

struct RewardBreakdown {
    double format_score = 0.0;
    double prediction_indicator = 0.0;
    double alignment_term = 0.0;
    double total = 0.0;

    /// Format compliance + prediction accuracy.
    double prediction_match() const { return format_score + prediction_indicator; }
};

struct RewardOptions {
    bool sentiment_alignment = true;
};

RewardBreakdown compute_reward(std::string_view raw, TrendLabel truth, const SentimentScorer& scorer,
                               const RewardOptions& options = {});

/// External reformatting service. Implementations must see only the raw response.
class ResponseFormatter {
public:
    virtual ~ResponseFormatter() = default;
    virtual std::string reformat(std::string_view raw_response) = 0;
};

struct ReformatResult {
    std::string text;
    bool used_external = false;
    std::vector<std::string> warnings;
};

/// Deterministic rule-based rewrite into the canonical two-tag structure. Never invents a prediction.
std::string rule_based_reformat(std::string_view raw);

/**
 * Returns compliant input unchanged. Otherwise asks `external` (when given) and
 * accepts its answer if compliant; any failure falls back to rule_based_reformat
 * with a warning.
 */
ReformatResult reformat_response(std::string_view raw, ResponseFormatter* external = nullptr);

struct ScoredResponse {
    std::string sample_id;
    RewardBreakdown reward;
};

struct ResponseAggregate {
    std::size_t count = 0;
    double mean_total = 0.0;
    double mean_prediction_match = 0.0;
};

ResponseAggregate aggregate_rewards(std::span<const RewardBreakdown> rewards);

}  // namespace clickcast
