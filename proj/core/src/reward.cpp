#include "clickcast/reward.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "clickcast/hash.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace clickcast {

namespace {

using detail::ifind;
using detail::trim;

struct Block {
    enum class State { Missing, Unclosed, Closed } state = State::Missing;
    std::size_t open = std::string_view::npos;   // position of '<' of the open tag
    std::size_t end = std::string_view::npos;    // one past the close tag
    std::string_view content;
};

Block find_block(std::string_view raw, std::string_view name) {
    const std::string open_tag = "<" + std::string(name) + ">";
    const std::string close_tag = "</" + std::string(name) + ">";
    Block b;
    b.open = ifind(raw, open_tag);
    if (b.open == std::string_view::npos) return b;
    const auto body = b.open + open_tag.size();
    const auto close = ifind(raw, close_tag, body);
    if (close == std::string_view::npos) {
        b.state = Block::State::Unclosed;
        b.end = body;
        return b;
    }
    b.state = Block::State::Closed;
    b.content = trim(raw.substr(body, close - body));
    b.end = close + close_tag.size();
    return b;
}

std::optional<TrendLabel> exact_label(std::string_view content) {
    const auto v = detail::to_lower(content);
    if (v == "increase") return TrendLabel::Increase;
    if (v == "decrease") return TrendLabel::Decrease;
    return std::nullopt;
}

const std::unordered_set<std::string>& increase_words() {
    static const std::unordered_set<std::string> words = {
        "increase", "increased", "increases", "increasing", "rise",    "rises",    "rising",
        "rose",     "grow",      "grows",     "growing",    "grew",    "growth",   "up",
        "upward",   "upwards",   "higher",    "improve",    "improved", "improves", "improving",
        "recover",  "recovers",  "recovered", "recovering", "gain",    "gains",    "boost",
        "boosted",  "surge"};
    return words;
}

const std::unordered_set<std::string>& decrease_words() {
    static const std::unordered_set<std::string> words = {
        "decrease", "decreased", "decreases", "decreasing", "drop",    "drops",    "dropped",
        "dropping", "decline",   "declined",  "declines",   "declining", "fall",   "falls",
        "falling",  "fell",      "down",      "downward",   "downwards", "lower",  "reduce",
        "reduced",  "reduces",   "dip",       "dips",       "shrink",  "slump"};
    return words;
}

std::optional<TrendLabel> majority_trend(std::string_view text) {
    int up = 0;
    int down = 0;
    for (const auto& tok : detail::word_tokens(text)) {
        if (increase_words().contains(tok)) ++up;
        if (decrease_words().contains(tok)) ++down;
    }
    if (up > down) return TrendLabel::Increase;
    if (down > up) return TrendLabel::Decrease;
    return std::nullopt;
}

/// Removes the prediction block (tags and content) and any stray tag markers.
std::string strip_tags(std::string_view raw) {
    std::string text(raw);
    const Block pred = find_block(text, "prediction");
    if (pred.state != Block::State::Missing) text.erase(pred.open, pred.end - pred.open);
    for (std::string_view tag : {"<reasoning>", "</reasoning>", "<prediction>", "</prediction>"}) {
        for (auto pos = ifind(text, tag); pos != std::string_view::npos; pos = ifind(text, tag, pos)) {
            text.replace(pos, tag.size(), " ");
        }
    }
    return text;
}

std::string longest_declarative_sentence(std::string_view text) {
    std::string best;
    std::size_t start = 0;
    auto consider = [&](std::size_t from, std::size_t to, char terminator) {
        if (terminator == '?' || terminator == '!') return;
        auto s = trim(text.substr(from, to - from));
        if (s.size() > best.size()) best = std::string(s);
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        const bool at_end = i + 1 == text.size();
        if ((ch == '.' || ch == '!' || ch == '?') &&
            (at_end || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
            consider(start, i + 1, ch);
            start = i + 1;
        } else if (ch == '\n') {
            consider(start, i, '\n');
            start = i + 1;
        }
    }
    if (start < text.size()) consider(start, text.size(), '\0');
    return best;
}

std::vector<std::string> read_word_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon: " + path);
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        const auto w = trim(line);
        if (w.empty() || w.front() == '#') continue;
        words.push_back(detail::to_lower(w));
    }
    return words;
}

}  // namespace

ParsedResponse parse_response(std::string_view raw) {
    ParsedResponse out;
    const Block reasoning = find_block(raw, "reasoning");
    if (reasoning.state == Block::State::Closed && !reasoning.content.empty()) {
        out.reasoning = std::string(reasoning.content);
    } else {
        out.format_penalty += kBlockPenalty;
    }
    const Block prediction = find_block(raw, "prediction");
    if (prediction.state == Block::State::Closed) out.prediction = exact_label(prediction.content);
    if (!out.prediction) out.format_penalty += kBlockPenalty;
    return out;
}

std::string_view to_string(Sentiment s) {
    switch (s) {
        case Sentiment::Positive: return "POSITIVE";
        case Sentiment::Negative: return "NEGATIVE";
        case Sentiment::Neutral: return "NEUTRAL";
    }
    return "NEUTRAL";
}

const std::vector<std::string>& LexiconSentimentScorer::default_positive() {
    static const std::vector<std::string> words = {
        "increase", "increased", "increases",  "increasing", "growth",    "grow",     "grows",
        "growing",  "grew",      "recovery",   "recover",    "recovered", "recovering",
        "improvement", "improve", "improved",  "improves",   "improving", "upward",   "gain",
        "gains",    "rise",      "rises",      "rising",     "rose",      "higher",   "boost",
        "boosted",  "boosts",    "surge",      "uptick",     "stronger"};
    return words;
}

const std::vector<std::string>& LexiconSentimentScorer::default_negative() {
    static const std::vector<std::string> words = {
        "decrease", "decreased", "decreases", "decreasing", "decline",  "declined",  "declines",
        "declining", "drop",     "drops",     "dropped",    "dropping", "removal",   "removals",
        "removed",  "downward",  "paused",    "fall",       "falls",    "falling",   "fell",
        "lower",    "loss",      "losses",    "reduce",     "reduced",  "reduction", "degradation",
        "weaker",   "dip"};
    return words;
}

LexiconSentimentScorer::LexiconSentimentScorer()
    : positive_(default_positive()), negative_(default_negative()) {}

LexiconSentimentScorer::LexiconSentimentScorer(std::vector<std::string> positive,
                                               std::vector<std::string> negative)
    : positive_(std::move(positive)), negative_(std::move(negative)) {
    for (auto& w : positive_) w = detail::to_lower(w);
    for (auto& w : negative_) w = detail::to_lower(w);
}

LexiconSentimentScorer LexiconSentimentScorer::from_files(const std::string& positive_path,
                                                          const std::string& negative_path) {
    return LexiconSentimentScorer(read_word_list(positive_path), read_word_list(negative_path));
}

SentimentResult LexiconSentimentScorer::score(std::string_view text) const {
    int pos = 0;
    int neg = 0;
    for (const auto& tok : detail::word_tokens(text)) {
        if (std::find(positive_.begin(), positive_.end(), tok) != positive_.end()) ++pos;
        if (std::find(negative_.begin(), negative_.end(), tok) != negative_.end()) ++neg;
    }
    if (pos == neg) return {Sentiment::Neutral, 0.0};
    const double confidence = static_cast<double>(std::abs(pos - neg)) / static_cast<double>(pos + neg);
    return {pos > neg ? Sentiment::Positive : Sentiment::Negative, confidence};
}

std::string LexiconSentimentScorer::identity() const {
    std::string all;
    for (const auto& w : positive_) all += "+" + w;
    for (const auto& w : negative_) all += "-" + w;
    return "lexicon:" + short_hash(all);
}

SentimentResult lexicon_sentiment(std::string_view text) {
    static const LexiconSentimentScorer scorer;
    return scorer.score(text);
}

ExternalSentimentScorer::ExternalSentimentScorer(std::shared_ptr<Transport> transport, std::string model_name)
    : transport_(std::move(transport)), model_name_(std::move(model_name)) {
    if (!transport_) throw std::invalid_argument("ExternalSentimentScorer: null transport");
}

SentimentResult ExternalSentimentScorer::score(std::string_view text) const {
    try {
        const nlohmann::json req = {{"text", std::string(text)}, {"model", model_name_}};
        const auto res = nlohmann::json::parse(transport_->post_json("/sentiment", req.dump()));
        const auto label = detail::to_lower(res.at("label").get<std::string>());
        const double c = std::clamp(res.at("score").get<double>(), 0.0, 1.0);
        if (label == "positive") return {Sentiment::Positive, c};
        if (label == "negative") return {Sentiment::Negative, c};
        return {Sentiment::Neutral, 0.0};
    } catch (const std::exception&) {
        ++fallbacks_;
        return fallback_.score(text);
    }
}

RewardBreakdown compute_reward(std::string_view raw, TrendLabel truth, const SentimentScorer& scorer,
                               const RewardOptions& options) {
    const ParsedResponse parsed = parse_response(raw);
    RewardBreakdown r;
    r.format_score = parsed.format_penalty;
    r.prediction_indicator = parsed.prediction && *parsed.prediction == truth ? 1.0 : 0.0;
    if (options.sentiment_alignment && parsed.reasoning) {
        const SentimentResult s = scorer.score(*parsed.reasoning);
        const bool aligned = (s.label == Sentiment::Positive && truth == TrendLabel::Increase) ||
                             (s.label == Sentiment::Negative && truth == TrendLabel::Decrease);
        if (aligned) r.alignment_term = std::clamp(s.confidence, 0.0, 1.0);
    }
    r.total = r.format_score + r.prediction_indicator + r.alignment_term;
    return r;
}

std::string rule_based_reformat(std::string_view raw) {
    const ParsedResponse parsed = parse_response(raw);
    const std::string stripped = strip_tags(raw);

    const std::string reasoning = parsed.reasoning ? *parsed.reasoning : longest_declarative_sentence(stripped);

    std::optional<TrendLabel> trend = parsed.prediction;
    if (!trend) trend = majority_trend(stripped);
    if (!trend && !reasoning.empty()) trend = majority_trend(reasoning);

    std::string out;
    if (!reasoning.empty()) out += "<Reasoning> " + reasoning + " </Reasoning>";
    if (trend) out += "<Prediction> " + std::string(to_string(*trend)) + " </Prediction>";
    return out;
}

ReformatResult reformat_response(std::string_view raw, ResponseFormatter* external) {
    ReformatResult result;
    if (parse_response(raw).compliant()) {
        result.text = std::string(raw);
        return result;
    }
    if (external != nullptr) {
        try {
            std::string candidate = external->reformat(raw);
            if (parse_response(candidate).compliant()) {
                result.text = std::move(candidate);
                result.used_external = true;
                return result;
            }
            result.warnings.push_back("external formatter returned non-compliant text; using rule-based result");
        } catch (const std::exception& e) {
            result.warnings.push_back(std::string("external formatter failed: ") + e.what() +
                                      "; using rule-based result");
        }
    }
    result.text = rule_based_reformat(raw);
    return result;
}

ResponseAggregate aggregate_rewards(std::span<const RewardBreakdown> rewards) {
    ResponseAggregate agg;
    agg.count = rewards.size();
    if (rewards.empty()) return agg;
    for (const auto& r : rewards) {
        agg.mean_total += r.total;
        agg.mean_prediction_match += r.prediction_match();
    }
    agg.mean_total /= static_cast<double>(rewards.size());
    agg.mean_prediction_match /= static_cast<double>(rewards.size());
    return agg;
}

}  // namespace clickcast
