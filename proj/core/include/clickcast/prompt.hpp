#pragma once

#include <string>
#include <vector>

#include "clickcast/data.hpp"

namespace clickcast {

struct PromptSpec {
    int lookback = 14;
    int horizon = 5;
    int decimals = 3;
    std::string template_version = "v1";

    void validate() const;
};

/// Renders one sample into the forecasting prompt (preamble, inputs, task, format instruction).
std::string build_prompt(const ForecastSample& sample, const PromptSpec& spec);

struct PromptRecord {
    std::string sample_id;
    std::string prompt;
    TrendLabel label = TrendLabel::Decrease;
};

std::vector<PromptRecord> build_prompts(const std::vector<ForecastSample>& samples, const PromptSpec& spec);

// JSONL of {sample_id, prompt, label}.
void write_prompts(const std::string& path, const std::vector<PromptRecord>& prompts);
std::vector<PromptRecord> read_prompts(const std::string& path);

}  // namespace clickcast
