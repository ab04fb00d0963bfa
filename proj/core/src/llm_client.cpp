#include "clickcast/llm_client.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "clickcast/hash.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace clickcast {

namespace {

using nlohmann::json;

constexpr std::string_view kFixedTimestamp = "1970-01-01T00:00:00Z";

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ReadEvent {
    int day = 0;
    std::string action;  // category-level description, e.g. "cut the budget"
    int direction = 0;
    double impact = 0.0;  // signed estimated remaining effect at the anchor day
};

bool has(std::string_view text, std::string_view word) { return detail::ifind(text, word) != std::string_view::npos; }

double first_number(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
            double v = 0.0;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) v = v * 10 + (text[i++] - '0');
            return v;
        }
    }
    return 1.0;
}

/// Domain reading of one change-log entry: direction and a rough per-unit effect size.
ReadEvent read_change(int day, std::string_view text, int lookback) {
    ReadEvent ev;
    ev.day = day;
    double per_unit = 0.0;
    if (has(text, "target cpa")) {
        ev.direction = has(text, "increased") || has(text, "raised") ? -1 : +1;
        ev.action = ev.direction < 0 ? "raised the CPA target" : "lowered the CPA target";
        per_unit = 0.006;
    } else if (has(text, "budget")) {
        ev.direction = has(text, "reduced") || has(text, "decreased") || has(text, "cut") ? -1 : +1;
        ev.action = ev.direction < 0 ? "cut the budget" : "raised the budget";
        per_unit = 0.006;
    } else if (has(text, "bid strategy")) {
        ev.direction = -1;
        ev.action = "switched bid strategy";
        per_unit = 0.08;
    } else if (has(text, "bid")) {
        ev.direction = has(text, "lowered") || has(text, "reduced") ? -1 : +1;
        ev.action = ev.direction < 0 ? "lowered bids" : "raised bids";
        per_unit = 0.006;
    } else if (has(text, "keyword")) {
        const bool paused = has(text, "paused");
        ev.direction = has(text, "removed") || paused || has(text, "deleted") ? -1 : +1;
        ev.action = paused ? "paused keywords" : ev.direction < 0 ? "removed keywords" : "added keywords";
        per_unit = paused ? 0.003 : 0.002;
    } else if (has(text, "headline") || has(text, "ad text") || has(text, "asset")) {
        ev.direction = +1;
        ev.action = has(text, "asset") ? "created new assets" : "refreshed its ad copy";
        per_unit = 0.025;
    } else {
        return ev;
    }
    const double age = static_cast<double>(lookback - 1 - day);
    ev.impact = ev.direction * per_unit * first_number(text) * std::exp2(-age / 3.0);
    return ev;
}

std::string strength_word(double impact) {
    const double a = std::abs(impact);
    if (a > 0.15) return "strongly";
    if (a > 0.05) return "noticeably";
    return "slightly";
}

std::string recency(int age) {
    if (age == 0) return "today";
    if (age == 1) return "yesterday";
    return std::to_string(age) + " days ago";
}

json record_to_json(const SummaryRecord& r) {
    return {{"sample_id", r.sample_id},   {"prompt_hash", r.prompt_hash}, {"response_text", r.response_text},
            {"generator", r.generator},   {"created_at", r.created_at},   {"compliant", r.compliant},
            {"flag", r.flag}};
}

}  // namespace

std::string mock_summary(const ForecastSample& sample) {
    const int l = static_cast<int>(sample.x.size());
    if (l < 2) throw std::invalid_argument("mock_summary: lookback too short");
    const int half = l / 2;
    const std::span<const double> x(sample.x);
    const auto first = x.subspan(0, static_cast<std::size_t>(half));
    const auto second = x.subspan(static_cast<std::size_t>(l - half));
    const TrendLabel momentum = label_trend(first, second, half);
    const bool up = momentum == TrendLabel::Increase;

    std::optional<ReadEvent> best;
    for (int day = 0; day < static_cast<int>(sample.c.size()); ++day) {
        const std::string& text = sample.c[static_cast<std::size_t>(day)];
        if (text == kNoChanges) continue;
        std::size_t start = 0;
        while (start <= text.size()) {
            const auto end = std::min(text.find("; ", start), text.size());
            auto ev = read_change(day, std::string_view(text).substr(start, end - start), l);
            if (ev.direction != 0 && (!best || std::abs(ev.impact) >= std::abs(best->impact))) best = std::move(ev);
            start = end + 2;
        }
    }

    std::string reasoning = std::string("The rolling average of clicks shows ") + (up ? "an upward" : "a downward") +
                            " trend over the past " + std::to_string(l) + " days.";
    if (best && std::abs(best->impact) > 0.005) {
        reasoning += " The most impactful change was " + recency(l - 1 - best->day) + ", when the campaign " +
                     best->action + ", which " + strength_word(best->impact) +
                     (best->direction < 0 ? " reduced" : " boosted") + " clicks.";
    } else {
        reasoning += " No impactful campaign changes were logged recently.";
    }
    return "<Reasoning> " + reasoning + " </Reasoning><Prediction> " + std::string(to_string(momentum)) +
           " </Prediction>";
}

SummaryRecord MockSummarizer::summarize(const ForecastSample& sample, const std::string& prompt) {
    SummaryRecord r;
    r.sample_id = sample.sample_id;
    r.prompt_hash = sha256_hex(prompt);
    r.response_text = mock_summary(sample);
    r.generator = identity();
    r.created_at = std::string(kFixedTimestamp);
    r.compliant = parse_response(r.response_text).compliant();
    if (!r.compliant) r.flag = "noncompliant";
    return r;
}

ChatClient::ChatClient(std::shared_ptr<Transport> transport, std::string model)
    : transport_(std::move(transport)), model_(std::move(model)) {
    if (!transport_) throw std::invalid_argument("ChatClient: null transport");
}

std::string ChatClient::complete(const std::string& user_message, double temperature) {
    ++calls_;
    const json req = {{"model", model_},
                      {"temperature", temperature},
                      {"messages", json::array({{{"role", "user"}, {"content", user_message}}})}};
    const auto body = transport_->post_json("/v1/chat/completions", req.dump());
    try {
        return json::parse(body).at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw TransportError(std::string("chat endpoint returned an unexpected payload: ") + e.what());
    }
}

ChatFormatter::ChatFormatter(std::shared_ptr<ChatClient> client) : client_(std::move(client)) {
    if (!client_) throw std::invalid_argument("ChatFormatter: null client");
}

std::string ChatFormatter::instruction() {
    return "Rewrite the following model response into exactly this structure, keeping its reasoning and its "
           "predicted direction, and adding nothing else:\n"
           "<Reasoning> reasoning sentences </Reasoning><Prediction> Increase or Decrease </Prediction>\n"
           "If the response states no direction, omit the Prediction block.\n\nResponse:\n";
}

std::string ChatFormatter::reformat(std::string_view raw_response) {
    return client_->complete(instruction() + std::string(raw_response));
}

ExternalSummarizer::ExternalSummarizer(std::shared_ptr<ChatClient> client, std::shared_ptr<ResponseFormatter> formatter,
                                       std::filesystem::path cache_dir)
    : client_(std::move(client)), formatter_(std::move(formatter)), cache_dir_(std::move(cache_dir)) {
    if (!client_) throw std::invalid_argument("ExternalSummarizer: null client");
    std::filesystem::create_directories(cache_dir_);
}

SummaryRecord ExternalSummarizer::summarize(const ForecastSample& sample, const std::string& prompt) {
    SummaryRecord r;
    r.sample_id = sample.sample_id;
    r.prompt_hash = sha256_hex(prompt);
    r.generator = identity();
    const auto cache_file = cache_dir_ / (r.prompt_hash + ".json");
    {
        std::lock_guard lock(cache_mu_);
        std::ifstream in(cache_file);
        if (in) {
            const auto j = json::parse(in);
            r.response_text = j.at("response_text").get<std::string>();
            r.created_at = j.at("created_at").get<std::string>();
            r.compliant = parse_response(r.response_text).compliant();
            if (!r.compliant) r.flag = "noncompliant";
            return r;
        }
    }
    try {
        const auto raw = client_->complete(prompt);
        auto formatted = reformat_response(raw, formatter_.get());
        r.response_text = std::move(formatted.text);
    } catch (const std::exception& e) {
        r.flag = std::string("failed: ") + e.what();
        r.compliant = false;
        return r;
    }
    r.created_at = utc_now();
    r.compliant = parse_response(r.response_text).compliant();
    if (!r.compliant) r.flag = "noncompliant";
    std::lock_guard lock(cache_mu_);
    std::ofstream out(cache_file, std::ios::trunc);
    out << json{{"response_text", r.response_text}, {"created_at", r.created_at}}.dump();
    return r;
}

std::vector<SummaryRecord> generate_summaries(std::span<const ForecastSample> samples,
                                              std::span<const std::string> prompts, Summarizer& summarizer,
                                              int max_concurrency) {
    if (samples.size() != prompts.size()) throw std::invalid_argument("generate_summaries: need one prompt per sample");
    std::vector<SummaryRecord> out(samples.size());
    const auto workers = static_cast<std::size_t>(std::max(1, max_concurrency));
    if (workers == 1 || samples.size() < 2) {
        for (std::size_t i = 0; i < samples.size(); ++i) out[i] = summarizer.summarize(samples[i], prompts[i]);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, samples.size()); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < samples.size(); i = next++) out[i] = summarizer.summarize(samples[i], prompts[i]);
        });
    }
    pool.clear();
    return out;
}

std::map<std::string, std::string> summary_texts(std::span<const SummaryRecord> records) {
    std::map<std::string, std::string> out;
    for (const auto& r : records) {
        if (!r.response_text.empty()) out[r.sample_id] = r.response_text;
    }
    return out;
}

void write_summaries(const std::string& path, std::span<const SummaryRecord> records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

std::vector<SummaryRecord> read_summaries(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open summaries file: " + path);
    std::vector<SummaryRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        try {
            const auto j = json::parse(line);
            SummaryRecord r;
            r.sample_id = j.at("sample_id").get<std::string>();
            r.prompt_hash = j.value("prompt_hash", "");
            r.response_text = j.at("response_text").get<std::string>();
            r.generator = j.value("generator", "");
            r.created_at = j.value("created_at", "");
            r.compliant = j.value("compliant", parse_response(r.response_text).compliant());
            r.flag = j.value("flag", "");
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("summaries: bad record: ") + e.what());
        }
    }
    return out;
}

}  // namespace clickcast
