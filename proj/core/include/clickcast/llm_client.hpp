#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "clickcast/data.hpp"
#include "clickcast/reward.hpp"
#include "clickcast/transport.hpp"

namespace clickcast {

/// One generated textual counterpart for a sample.
struct SummaryRecord {
    std::string sample_id;
    std::string prompt_hash;
    std::string response_text;
    std::string generator;
    std::string created_at;
    bool compliant = false;
    /// Empty when compliant; otherwise "noncompliant" or "failed: <reason>".
    std::string flag;
};

class Summarizer {
public:
    virtual ~Summarizer() = default;
    /// Must be safe to call concurrently.
    virtual SummaryRecord summarize(const ForecastSample& sample, const std::string& prompt) = 0;
    virtual std::string identity() const = 0;
};

/**
 * Deterministic stand-in for a fine-tuned LLM. It reads the sample's change log,
 * names the change with the largest estimated remaining effect, and predicts
 * from lookback momentum (second-half vs first-half mean). Correlated with the
 * ground truth, never derived from it.
 */
class MockSummarizer final : public Summarizer {
public:
    SummaryRecord summarize(const ForecastSample& sample, const std::string& prompt) override;
    std::string identity() const override { return "mock-v1"; }
};

/// Tagged mock response for a sample (the text MockSummarizer stores).
std::string mock_summary(const ForecastSample& sample);

/// OpenAI-compatible chat completion client (POST /v1/chat/completions).
class ChatClient {
public:
    ChatClient(std::shared_ptr<Transport> transport, std::string model);

    std::string complete(const std::string& user_message, double temperature = 0.0);
    const std::string& model() const { return model_; }
    std::size_t calls() const { return calls_.load(); }

private:
    std::shared_ptr<Transport> transport_;
    std::string model_;
    std::atomic<std::size_t> calls_{0};
};

/// External reformatter: the chat model sees an instruction plus the raw response, nothing else.
class ChatFormatter final : public ResponseFormatter {
public:
    explicit ChatFormatter(std::shared_ptr<ChatClient> client);
    std::string reformat(std::string_view raw_response) override;

    static std::string instruction();

private:
    std::shared_ptr<ChatClient> client_;
};

/// Sends prompts to a chat model, reformats answers and caches them on disk by prompt hash.
class ExternalSummarizer final : public Summarizer {
public:
    ExternalSummarizer(std::shared_ptr<ChatClient> client, std::shared_ptr<ResponseFormatter> formatter,
                       std::filesystem::path cache_dir);

    SummaryRecord summarize(const ForecastSample& sample, const std::string& prompt) override;
    std::string identity() const override { return "external:" + client_->model(); }

private:
    std::shared_ptr<ChatClient> client_;
    std::shared_ptr<ResponseFormatter> formatter_;
    std::filesystem::path cache_dir_;
    std::mutex cache_mu_;
};

/// Runs the summarizer over aligned samples/prompts with up to `max_concurrency` workers.
std::vector<SummaryRecord> generate_summaries(std::span<const ForecastSample> samples,
                                              std::span<const std::string> prompts, Summarizer& summarizer,
                                              int max_concurrency = 1);

/// sample_id -> response text, for records usable as forecaster input.
std::map<std::string, std::string> summary_texts(std::span<const SummaryRecord> records);

void write_summaries(const std::string& path, std::span<const SummaryRecord> records);
std::vector<SummaryRecord> read_summaries(const std::string& path);

}  // namespace clickcast
