#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "clickcast/random.hpp"
#include "clickcast/reward.hpp"
#include "test_util.hpp"

using namespace clickcast;

namespace {

class FixedScorer final : public SentimentScorer {
public:
    FixedScorer(Sentiment label, double confidence) : result_{label, confidence} {}
    SentimentResult score(std::string_view) const override { return result_; }
    std::string identity() const override { return "fixed"; }

private:
    SentimentResult result_;
};

Sentiment mirror(Sentiment s) {
    if (s == Sentiment::Positive) return Sentiment::Negative;
    if (s == Sentiment::Negative) return Sentiment::Positive;
    return s;
}

std::string tagged(const std::string& reasoning, const std::string& prediction) {
    return "<Reasoning> " + reasoning + " </Reasoning><Prediction> " + prediction + " </Prediction>";
}

}  // namespace

TEST(ParseResponse, Examples) {
    auto p = parse_response("<Reasoning> clicks fell </Reasoning><Prediction> Decrease </Prediction>");
    EXPECT_EQ(p.reasoning, "clicks fell");
    EXPECT_EQ(p.prediction, TrendLabel::Decrease);
    EXPECT_EQ(p.format_penalty, 0.0);

    p = parse_response("<Prediction> Increase </Prediction>");
    EXPECT_FALSE(p.reasoning);
    EXPECT_EQ(p.prediction, TrendLabel::Increase);
    EXPECT_EQ(p.format_penalty, -0.25);

    p = parse_response("clicks will go up");
    EXPECT_FALSE(p.reasoning);
    EXPECT_FALSE(p.prediction);
    EXPECT_EQ(p.format_penalty, -0.5);

    p = parse_response("<Reasoning> hmm </Reasoning><Prediction> maybe up </Prediction>");
    EXPECT_FALSE(p.prediction);
    EXPECT_EQ(p.format_penalty, -0.25);
}

TEST(ParseResponse, CaseInsensitiveFirstBlockWinsAndUnclosed) {
    auto p = parse_response("<REASONING>a</reasoning><prediction> increase </PREDICTION><Prediction>Decrease</Prediction>");
    EXPECT_EQ(p.reasoning, "a");
    EXPECT_EQ(p.prediction, TrendLabel::Increase);
    EXPECT_TRUE(p.compliant());

    p = parse_response("<Reasoning> never closed <Prediction> Decrease </Prediction>");
    EXPECT_FALSE(p.reasoning);
    EXPECT_EQ(p.format_penalty, -0.25);

    p = parse_response("<Reasoning>   </Reasoning><Prediction> Decrease </Prediction>");
    EXPECT_FALSE(p.reasoning);
    EXPECT_EQ(p.format_penalty, -0.25);
}

TEST(ComputeReward, Examples) {
    const std::string ok_inc = tagged("clicks should recover", "Increase");
    auto r = compute_reward(ok_inc, TrendLabel::Increase, FixedScorer(Sentiment::Positive, 0.8));
    EXPECT_DOUBLE_EQ(r.total, 1.8);
    EXPECT_DOUBLE_EQ(r.format_score, 0.0);
    EXPECT_DOUBLE_EQ(r.prediction_indicator, 1.0);
    EXPECT_DOUBLE_EQ(r.alignment_term, 0.8);

    const std::string ok_dec = tagged("clicks fell", "Decrease");
    r = compute_reward(ok_dec, TrendLabel::Increase, FixedScorer(Sentiment::Negative, 0.6));
    EXPECT_DOUBLE_EQ(r.total, 0.0);

    r = compute_reward("<Prediction> Increase </Prediction>", TrendLabel::Increase,
                       FixedScorer(Sentiment::Positive, 0.9));
    EXPECT_DOUBLE_EQ(r.total, 0.75);
    EXPECT_DOUBLE_EQ(r.alignment_term, 0.0);

    for (auto truth : {TrendLabel::Increase, TrendLabel::Decrease}) {
        r = compute_reward(ok_inc, truth, FixedScorer(Sentiment::Neutral, 0.7));
        EXPECT_DOUBLE_EQ(r.alignment_term, 0.0);
    }
}

TEST(ComputeReward, AlignmentDisabledEqualsPredictionMatch) {
    RewardOptions off;
    off.sentiment_alignment = false;
    const auto r = compute_reward(tagged("growth", "Increase"), TrendLabel::Increase,
                                  FixedScorer(Sentiment::Positive, 1.0), off);
    EXPECT_DOUBLE_EQ(r.total, 1.0);
    EXPECT_DOUBLE_EQ(r.total, r.prediction_match());
}

TEST(ComputeReward, SentimentSeesOnlyReasoning) {
    // The negative word lives outside the reasoning block and must not count.
    const auto r = compute_reward("decline decline <Reasoning> strong growth </Reasoning><Prediction> Increase </Prediction>",
                                  TrendLabel::Increase, LexiconSentimentScorer());
    EXPECT_DOUBLE_EQ(r.alignment_term, 1.0);
}

TEST(ComputeReward, FuzzedProperties) {
    Xoshiro256 rng(2024);
    const std::vector<std::string> reasons{"clicks fell", "steady growth", "no idea", "", "   "};
    const std::vector<std::string> preds{"Increase", "Decrease", "increase", "maybe", ""};
    const std::vector<std::string> noise{"", "blah ", "<Reasoning>", "</Prediction>", "<prediction>"};
    for (int i = 0; i < 3000; ++i) {
        const auto& reason = reasons[static_cast<std::size_t>(rng.uniform_int(0, 4))];
        const auto& pred = preds[static_cast<std::size_t>(rng.uniform_int(0, 4))];
        const int shape = static_cast<int>(rng.uniform_int(0, 3));
        std::string raw = noise[static_cast<std::size_t>(rng.uniform_int(0, 4))];
        if (shape != 1) raw += "<Reasoning>" + reason + "</Reasoning>";
        if (shape != 2) raw += "<Prediction>" + pred + "</Prediction>";
        raw += noise[static_cast<std::size_t>(rng.uniform_int(0, 4))];
        const auto label = static_cast<Sentiment>(rng.uniform_int(0, 2));
        const double conf = rng.uniform();
        const auto truth = rng.bernoulli(0.5) ? TrendLabel::Increase : TrendLabel::Decrease;
        FixedScorer scorer(label, conf);
        const auto r = compute_reward(raw, truth, scorer);
        EXPECT_GE(r.total, -0.5);
        EXPECT_LE(r.total, 2.0);
        EXPECT_TRUE(r.format_score == 0.0 || r.format_score == -0.25 || r.format_score == -0.5);
        EXPECT_GE(r.alignment_term, 0.0);
        EXPECT_LE(r.alignment_term, 1.0);
        EXPECT_EQ(r.total, r.format_score + r.prediction_indicator + r.alignment_term);

        // Mirror truth, the written prediction and the sentiment.
        std::string mirrored = raw;
        for (auto [from, to] : {std::pair<std::string, std::string>{"Increase", "\x01"}, {"Decrease", "Increase"},
                                {"\x01", "Decrease"}, {"increase", "\x02"}, {"decrease", "increase"},
                                {"\x02", "decrease"}}) {
            for (auto pos = mirrored.find(from); pos != std::string::npos; pos = mirrored.find(from, pos + to.size()))
                mirrored.replace(pos, from.size(), to);
        }
        const auto rm = compute_reward(mirrored, flip(truth), FixedScorer(mirror(label), conf));
        EXPECT_EQ(rm.total, r.total) << raw;
    }
}

TEST(ComputeReward, RemovingAWellFormedBlockNeverHelps) {
    for (auto label : {Sentiment::Positive, Sentiment::Negative, Sentiment::Neutral}) {
        for (auto truth : {TrendLabel::Increase, TrendLabel::Decrease}) {
            for (const char* pred : {"Increase", "Decrease"}) {
                FixedScorer scorer(label, 0.7);
                const double full = compute_reward(tagged("x", pred), truth, scorer).total;
                const double no_reason =
                    compute_reward(std::string("<Prediction> ") + pred + " </Prediction>", truth, scorer).total;
                const double no_pred = compute_reward("<Reasoning> x </Reasoning>", truth, scorer).total;
                EXPECT_LE(no_reason, full);
                EXPECT_LE(no_pred, full);
                EXPECT_LE(compute_reward("", truth, scorer).total, std::min(no_reason, no_pred));
            }
        }
    }
}

TEST(Lexicon, Examples) {
    auto s = lexicon_sentiment("steady upward growth and recovery");
    EXPECT_EQ(s.label, Sentiment::Positive);
    EXPECT_DOUBLE_EQ(s.confidence, 1.0);
    s = lexicon_sentiment("decline due to keyword removal");
    EXPECT_EQ(s.label, Sentiment::Negative);
    EXPECT_DOUBLE_EQ(s.confidence, 1.0);
    s = lexicon_sentiment("the campaign runs search ads");
    EXPECT_EQ(s.label, Sentiment::Neutral);
    EXPECT_DOUBLE_EQ(s.confidence, 0.0);
    s = lexicon_sentiment("Growth, growth, then a DECLINE.");
    EXPECT_EQ(s.label, Sentiment::Positive);
    EXPECT_NEAR(s.confidence, 1.0 / 3.0, 1e-15);
    s = lexicon_sentiment("growth then decline");
    EXPECT_EQ(s.label, Sentiment::Neutral);
    // Word boundaries: "dropdown" is not "drop".
    EXPECT_EQ(lexicon_sentiment("dropdown menu").label, Sentiment::Neutral);
}

TEST(Lexicon, ShippedFilesMatchBuiltInLists) {
    const std::string dir = CLICKCAST_LEXICON_DIR;
    const auto scorer = LexiconSentimentScorer::from_files(dir + "/positive.txt", dir + "/negative.txt");
    EXPECT_EQ(scorer.positive(), LexiconSentimentScorer::default_positive());
    EXPECT_EQ(scorer.negative(), LexiconSentimentScorer::default_negative());
}

TEST(Lexicon, CustomFilesOverrideDefaults) {
    test_util::TempDir dir;
    {
        std::ofstream(dir.path() / "p.txt") << "# comment\nsunny\n\n";
        std::ofstream(dir.path() / "n.txt") << "rainy\n";
    }
    const auto scorer =
        LexiconSentimentScorer::from_files((dir.path() / "p.txt").string(), (dir.path() / "n.txt").string());
    EXPECT_EQ(scorer.score("Sunny days").label, Sentiment::Positive);
    EXPECT_EQ(scorer.score("growth").label, Sentiment::Neutral);
    EXPECT_THROW(LexiconSentimentScorer::from_files("/nonexistent/p", "/nonexistent/n"), std::exception);
}

TEST(Reformat, ExtractsTrendAndSentence) {
    EXPECT_EQ(rule_based_reformat("Clicks will likely drop because many keywords were removed."),
              "<Reasoning> Clicks will likely drop because many keywords were removed. </Reasoning>"
              "<Prediction> Decrease </Prediction>");
}

TEST(Reformat, CompliantTextIsUnchanged) {
    const std::string ok = tagged("anything", "Increase");
    const auto r = reformat_response(ok);
    EXPECT_EQ(r.text, ok);
    EXPECT_FALSE(r.used_external);
}

TEST(Reformat, NeverInventsAPrediction) {
    const auto out = rule_based_reformat("The campaign uses search ads with a CPA target.");
    EXPECT_FALSE(parse_response(out).prediction);
}

TEST(Reformat, Idempotent) {
    for (const char* raw : {"Clicks will likely drop because many keywords were removed.",
                            "We expect growth. Budget raised.", "<Prediction> Increase </Prediction>",
                            "no signal here at all", "", "<Reasoning> x </Reasoning> clicks will rise"}) {
        const auto once = reformat_response(raw).text;
        EXPECT_EQ(reformat_response(once).text, once) << raw;
    }
}

namespace {

class ScriptedFormatter final : public ResponseFormatter {
public:
    explicit ScriptedFormatter(std::string reply, bool fail = false) : reply_(std::move(reply)), fail_(fail) {}
    std::string reformat(std::string_view raw) override {
        seen.emplace_back(raw);
        if (fail_) throw TransportError("down");
        return reply_;
    }
    std::vector<std::string> seen;

private:
    std::string reply_;
    bool fail_;
};

}  // namespace

TEST(Reformat, ExternalSeesOnlyRawAndFallsBack) {
    ScriptedFormatter good(tagged("rise expected", "Increase"));
    auto r = reformat_response("clicks will rise", &good);
    EXPECT_TRUE(r.used_external);
    EXPECT_EQ(r.text, tagged("rise expected", "Increase"));
    ASSERT_EQ(good.seen.size(), 1u);
    EXPECT_EQ(good.seen[0], "clicks will rise");

    ScriptedFormatter broken("", true);
    r = reformat_response("clicks will rise", &broken);
    EXPECT_FALSE(r.used_external);
    EXPECT_FALSE(r.warnings.empty());
    EXPECT_EQ(r.text, rule_based_reformat("clicks will rise"));

    ScriptedFormatter sloppy("still untagged");
    r = reformat_response("clicks will rise", &sloppy);
    EXPECT_FALSE(r.used_external);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(ExternalSentiment, ParsesAndFallsBack) {
    auto ok = std::make_shared<test_util::FakeTransport>(
        [](const std::string&, const std::string&) { return std::string(R"({"label":"NEGATIVE","score":0.9})"); });
    ExternalSentimentScorer scorer(ok, "m");
    const auto s = scorer.score("whatever");
    EXPECT_EQ(s.label, Sentiment::Negative);
    EXPECT_DOUBLE_EQ(s.confidence, 0.9);
    EXPECT_EQ(ok->requests().at(0).first, "/sentiment");

    auto down = std::make_shared<test_util::FakeTransport>(
        [](const std::string&, const std::string&) -> std::string { throw TransportError("down"); });
    ExternalSentimentScorer fallback(down, "m");
    EXPECT_EQ(fallback.score("strong growth").label, Sentiment::Positive);
    EXPECT_EQ(fallback.fallbacks(), 1u);
}

TEST(AggregateRewards, Means) {
    std::vector<RewardBreakdown> rs(2);
    rs[0].format_score = 0; rs[0].prediction_indicator = 1; rs[0].alignment_term = 0.5; rs[0].total = 1.5;
    rs[1].format_score = -0.5; rs[1].total = -0.5;
    const auto agg = aggregate_rewards(rs);
    EXPECT_EQ(agg.count, 2u);
    EXPECT_DOUBLE_EQ(agg.mean_total, 0.5);
    EXPECT_DOUBLE_EQ(agg.mean_prediction_match, 0.25);
}
