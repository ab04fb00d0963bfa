#include "clickcast/prompt.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "text_util.hpp"

namespace clickcast {

namespace {

std::string format_value(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

}  // namespace

void PromptSpec::validate() const {
    if (lookback < 1 || horizon < 1) throw std::invalid_argument("prompt settings: l and h must be >= 1");
    if (decimals < 1) throw std::invalid_argument("prompt settings: decimals must be >= 1");
}

std::string build_prompt(const ForecastSample& sample, const PromptSpec& spec) {
    spec.validate();
    const auto l = static_cast<std::size_t>(spec.lookback);
    if (sample.x.size() != l || sample.c.size() != l)
        throw std::invalid_argument("build_prompt: sample lookback length does not match prompt settings (l=" +
                                    std::to_string(l) + ")");

    const std::string days = std::to_string(spec.lookback);
    std::string p;
    p.reserve(1024 + 64 * l);
    p += "You are an expert in data analysis and forecasting. I will provide you with a time series of "
         "rolling averages of daily clicks for a campaign, recent change logs, the type of ad being "
         "delivered, and the bidding strategy.\n\n";
    p += "Inputs:\n";
    p += "1. Rolling average of clicks (past " + days + " days): ";
    for (std::size_t i = 0; i < l; ++i) {
        if (i) p += ", ";
        p += "Day " + std::to_string(i) + ": " + format_value(sample.x[i], spec.decimals);
    }
    p += "\n2. Change logs (past " + days + " days):\n";
    for (std::size_t i = 0; i < l; ++i) {
        p += "Day " + std::to_string(i) + ": " + sample.c[i] + "\n";
    }
    p += "3. Ad type: ";
    p += to_string(sample.ad_type);
    p += "\n4. Bidding strategy: ";
    p += to_string(sample.bidding_strategy);
    p += "\n\n";
    p += "Task: Analyze the data and provide a **concise** two-sentence reasoning. Provide **exactly "
         "one-word** as the prediction (Increase/Decrease) for click trend on average over next " +
         std::to_string(spec.horizon) + " days. Format your response strictly as follows:\n";
    p += "<Reasoning> Your reasoning sentence </Reasoning>\n";
    p += "<Prediction> Increase/Decrease </Prediction>";
    return p;
}

std::vector<PromptRecord> build_prompts(const std::vector<ForecastSample>& samples, const PromptSpec& spec) {
    std::vector<PromptRecord> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back({s.sample_id, build_prompt(s, spec), s.label});
    return out;
}

void write_prompts(const std::string& path, const std::vector<PromptRecord>& prompts) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& r : prompts) {
        nlohmann::json j = {{"sample_id", r.sample_id}, {"prompt", r.prompt}, {"label", to_string(r.label)}};
        out << j.dump() << '\n';
    }
}

std::vector<PromptRecord> read_prompts(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open prompts file: " + path);
    std::vector<PromptRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            out.push_back({j.at("sample_id").get<std::string>(), j.at("prompt").get<std::string>(),
                           parse_trend_label(j.at("label").get<std::string>())});
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("prompts: bad record: " + std::string(e.what()));
        }
    }
    return out;
}

}  // namespace clickcast
