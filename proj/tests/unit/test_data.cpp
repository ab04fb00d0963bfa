#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "clickcast/data.hpp"
#include "clickcast/random.hpp"
#include "test_util.hpp"

#include "json.hpp"
#include <set>

using namespace clickcast;

TEST(RollingAverage, TrailingPartialWindow) {
    const std::vector<double> raw{1, 2, 3, 4};
    const auto out = rolling_average(raw, 3);
    ASSERT_EQ(out.size(), 4u);
    EXPECT_DOUBLE_EQ(out[0], 1.0);
    EXPECT_DOUBLE_EQ(out[1], 1.5);
    EXPECT_DOUBLE_EQ(out[2], 2.0);
    EXPECT_DOUBLE_EQ(out[3], 3.0);
}

TEST(RollingAverage, ConstantAndSingleton) {
    EXPECT_EQ(rolling_average(std::vector<double>{5, 5, 5}, 2), (std::vector<double>{5, 5, 5}));
    EXPECT_EQ(rolling_average(std::vector<double>{2}, 7), (std::vector<double>{2}));
}

TEST(RollingAverage, Errors) {
    EXPECT_THROW(rolling_average(std::vector<double>{}, 3), std::invalid_argument);
    EXPECT_THROW(rolling_average(std::vector<double>{1}, 0), std::invalid_argument);
}

TEST(RollingAverage, ConstantSeriesIsFixedPointForEveryWindow) {
    Xoshiro256 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const double c = rng.uniform(0.0, 1000.0);
        const std::vector<double> raw(static_cast<std::size_t>(rng.uniform_int(1, 60)), c);
        const int window = static_cast<int>(rng.uniform_int(1, 30));
        for (double v : rolling_average(raw, window)) EXPECT_NEAR(v, c, 1e-9 * (1 + c));
    }
}

TEST(RollingAverage, MatchesBruteForce) {
    Xoshiro256 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> raw(static_cast<std::size_t>(rng.uniform_int(1, 40)));
        for (auto& v : raw) v = rng.uniform(0.0, 100.0);
        const int w = static_cast<int>(rng.uniform_int(1, 10));
        const auto out = rolling_average(raw, w);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const std::size_t lo = i + 1 >= static_cast<std::size_t>(w) ? i + 1 - static_cast<std::size_t>(w) : 0;
            double s = 0;
            for (std::size_t j = lo; j <= i; ++j) s += raw[j];
            EXPECT_NEAR(out[i], s / static_cast<double>(i - lo + 1), 1e-9);
        }
    }
}

TEST(Normalize, MinMax) {
    EXPECT_EQ(normalize_campaign(std::vector<double>{0, 5, 10}), (std::vector<double>{0.0, 0.5, 1.0}));
    EXPECT_EQ(normalize_campaign(std::vector<double>{3, 3, 3}), (std::vector<double>{0.5, 0.5, 0.5}));
    const auto out = normalize_campaign(std::vector<double>{2, 4, 8});
    EXPECT_DOUBLE_EQ(out[0], 0.0);
    EXPECT_NEAR(out[1], 1.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(out[2], 1.0);
    EXPECT_THROW(normalize_campaign(std::vector<double>{1, -1}), std::invalid_argument);
    EXPECT_THROW(normalize_campaign(std::vector<double>{}), std::invalid_argument);
}

TEST(AlignLogs, MarksEmptyDaysAndJoins) {
    std::vector<ChangeEvent> one{{1, EventType::KeywordPaused, "Keyword Paused", std::nullopt}};
    EXPECT_EQ(align_logs(one, 3), (std::vector<std::string>{"no changes", "Keyword Paused", "no changes"}));
    EXPECT_EQ(align_logs({}, 2), (std::vector<std::string>{"no changes", "no changes"}));
    std::vector<ChangeEvent> two{{0, EventType::KeywordAdded, "A", std::nullopt},
                                 {0, EventType::KeywordRemoved, "B", std::nullopt}};
    EXPECT_EQ(align_logs(two, 1), (std::vector<std::string>{"A; B"}));
    std::vector<ChangeEvent> late{{3, EventType::KeywordAdded, "A", std::nullopt}};
    EXPECT_THROW(align_logs(late, 3), std::invalid_argument);
}

TEST(ChangeEvent, Validation) {
    ChangeEvent ev{0, EventType::KeywordAdded, "added 3 keywords", 3.0};
    EXPECT_NO_THROW(ev.validate());
    ev.day_index = -1;
    EXPECT_THROW(ev.validate(), std::invalid_argument);
    ev.day_index = 0;
    ev.description = "";
    EXPECT_THROW(ev.validate(), std::invalid_argument);
    ev.description = "x";
    ev.magnitude = -2.0;
    EXPECT_THROW(ev.validate(), std::invalid_argument);
}

TEST(MakeCampaign, AlignmentTotality) {
    Xoshiro256 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int days = static_cast<int>(rng.uniform_int(1, 50));
        std::vector<double> raw(static_cast<std::size_t>(days));
        for (auto& v : raw) v = rng.uniform(0, 500);
        std::vector<ChangeEvent> events;
        for (int d = 0; d < days; ++d) {
            if (rng.bernoulli(0.3)) events.push_back({d, EventType::BudgetAdjusted, "ev" + std::to_string(d), 1.0});
        }
        const auto c = make_campaign("c", AdType::Search, BiddingStrategy::Cpc, raw, events);
        ASSERT_EQ(c.day_texts.size(), c.clicks.size());
        ASSERT_EQ(c.clicks.size(), raw.size());
        for (double v : c.clicks) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
        std::vector<bool> has_event(static_cast<std::size_t>(days), false);
        for (const auto& e : events) has_event[static_cast<std::size_t>(e.day_index)] = true;
        for (int d = 0; d < days; ++d) {
            const auto& text = c.day_texts[static_cast<std::size_t>(d)];
            if (has_event[static_cast<std::size_t>(d)]) EXPECT_NE(text.find("ev" + std::to_string(d)), std::string::npos);
            else EXPECT_EQ(text, "no changes");
        }
    }
}

TEST(LabelTrend, Examples) {
    EXPECT_EQ(label_trend(std::vector<double>{0.4, 0.6}, std::vector<double>{0.6, 0.8}, 2), TrendLabel::Increase);
    EXPECT_EQ(label_trend(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}, 2), TrendLabel::Decrease);
    EXPECT_THROW(label_trend(std::vector<double>{0.5}, std::vector<double>{0.5, 0.5}, 2), std::invalid_argument);
}

TEST(LabelTrend, DeclineWithPartialRecoveryIsDecrease) {
    // 14 days falling from 0.787 to 0.444, then recovering to 0.509; the next days stay below the recent mean.
    std::vector<double> x{0.787, 0.74, 0.70, 0.66, 0.62, 0.58, 0.54, 0.50, 0.47, 0.444, 0.46, 0.48, 0.50, 0.509};
    std::vector<double> y{0.47, 0.46, 0.45, 0.45, 0.44};
    EXPECT_EQ(label_trend(x, y, 5), TrendLabel::Decrease);
}

TEST(LabelTrend, InvariantUnderPositiveAffineMaps) {
    Xoshiro256 rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const int h = static_cast<int>(rng.uniform_int(1, 6));
        const int l = h + static_cast<int>(rng.uniform_int(0, 8));
        std::vector<double> x(static_cast<std::size_t>(l)), y(static_cast<std::size_t>(h));
        for (auto& v : x) v = rng.uniform();
        for (auto& v : y) v = rng.uniform();
        // Power-of-two scale and small shifts; ties are vanishingly rare with continuous draws.
        const double a = std::ldexp(1.0, static_cast<int>(rng.uniform_int(-3, 3)));
        const double b = static_cast<double>(rng.uniform_int(-4, 4)) / 4.0;
        auto xs = x, ys = y;
        for (auto& v : xs) v = a * v + b;
        for (auto& v : ys) v = a * v + b;
        EXPECT_EQ(label_trend(x, y, h), label_trend(xs, ys, h));
    }
}

TEST(MakeSamples, CountsAtBoundary) {
    for (auto [days, expected] : {std::pair{20, 2}, std::pair{19, 1}, std::pair{18, 0}}) {
        const auto c = make_campaign("c", AdType::Search, BiddingStrategy::Cpa, std::vector<double>(days, 1.0), {});
        const auto ws = make_samples(c, 14, 5);
        EXPECT_EQ(ws.samples.size(), static_cast<std::size_t>(expected)) << days;
        EXPECT_EQ(ws.short_series, expected == 0 ? 1u : 0u);
    }
}

TEST(MakeSamples, WindowingCountProperty) {
    Xoshiro256 rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const int h = static_cast<int>(rng.uniform_int(1, 8));
        const int l = h + static_cast<int>(rng.uniform_int(0, 12));
        const int T = static_cast<int>(rng.uniform_int(1, 60));
        std::vector<double> raw(static_cast<std::size_t>(T));
        for (auto& v : raw) v = rng.uniform(0, 10);
        const auto c = make_campaign("c", AdType::Video, BiddingStrategy::MaximizeClicks, raw, {});
        const auto ws = make_samples(c, l, h);
        const int expected = T >= l + h ? T - l - h + 1 : 0;
        ASSERT_EQ(static_cast<int>(ws.samples.size()), expected);
        for (std::size_t i = 0; i < ws.samples.size(); ++i) {
            const auto& s = ws.samples[i];
            const int t = l - 1 + static_cast<int>(i);
            EXPECT_EQ(s.t, t);
            ASSERT_EQ(s.x.size(), static_cast<std::size_t>(l));
            ASSERT_EQ(s.c.size(), static_cast<std::size_t>(l));
            ASSERT_EQ(s.y.size(), static_cast<std::size_t>(h));
            EXPECT_EQ(s.x.back(), c.clicks[static_cast<std::size_t>(t)]);
            EXPECT_EQ(s.y.front(), c.clicks[static_cast<std::size_t>(t + 1)]);
            EXPECT_EQ(s.label, label_trend(s.x, s.y, h));
            EXPECT_EQ(s.sample_id, "c:" + std::to_string(t));
        }
    }
}

TEST(Split, PartitionProperty) {
    Xoshiro256 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(2, 12));
        std::vector<CampaignRecord> cs;
        for (int i = 0; i < n; ++i)
            cs.push_back(make_campaign("c" + std::to_string(i), AdType::Search, BiddingStrategy::Cpa, {1, 2, 3}, {}));
        std::vector<std::string> test;
        for (int i = 0; i < n; ++i) {
            if (rng.bernoulli(0.3)) test.push_back(cs[static_cast<std::size_t>(i)].campaign_id);
        }
        if (test.empty()) test.push_back(cs.back().campaign_id);
        if (static_cast<int>(test.size()) == n) test.pop_back();
        const auto split = split_by_campaign(cs, test);
        std::set<std::string> tr, te;
        for (const auto& c : split.train) tr.insert(c.campaign_id);
        for (const auto& c : split.test) te.insert(c.campaign_id);
        for (const auto& id : tr) EXPECT_FALSE(te.contains(id));
        EXPECT_EQ(tr.size() + te.size(), static_cast<std::size_t>(n));
        EXPECT_EQ(te, std::set<std::string>(test.begin(), test.end()));
    }
}

TEST(Split, Examples) {
    std::vector<CampaignRecord> cs;
    for (const char* id : {"c1", "c2", "c3"})
        cs.push_back(make_campaign(id, AdType::Search, BiddingStrategy::Cpa, {1, 2, 3}, {}));
    const auto split = split_by_campaign(cs, std::vector<std::string>{"c3"});
    ASSERT_EQ(split.train.size(), 2u);
    ASSERT_EQ(split.test.size(), 1u);
    EXPECT_EQ(split.test[0].campaign_id, "c3");
    EXPECT_THROW(split_by_campaign(cs, std::vector<std::string>{"c1", "c2", "c3"}), std::invalid_argument);
    EXPECT_THROW(split_by_campaign(cs, std::vector<std::string>{"zz"}), std::invalid_argument);
    EXPECT_THROW(split_by_campaign(cs, std::vector<std::string>{}), std::invalid_argument);
}

TEST(Split, FortySixCampaignsTwoHeldOut) {
    std::vector<CampaignRecord> cs;
    for (int i = 0; i < 46; ++i)
        cs.push_back(make_campaign("c" + std::to_string(i), AdType::Search, BiddingStrategy::Cpa, {1, 2}, {}));
    const auto split = split_by_campaign(cs, std::vector<std::string>{"c3", "c40"});
    EXPECT_EQ(split.train.size(), 44u);
    EXPECT_EQ(split.test.size(), 2u);
}

TEST(DatasetIo, RoundTripAndExactFields) {
    test_util::TempDir dir;
    std::vector<CampaignRecord> cs;
    cs.push_back(make_campaign("c000", AdType::Display, BiddingStrategy::MaximizeConversions, {10, 20.5, 0, 7},
                               {{1, EventType::KeywordRemoved, "removed 113 phrase match keywords", 113.0},
                                {1, EventType::BudgetAdjusted, "reduced daily budget by 10%", std::nullopt}}));
    cs.push_back(make_campaign("c001", AdType::Video, BiddingStrategy::Cpc, {1, 1, 1}, {}));
    const auto path = (dir.path() / "ds.jsonl").string();
    write_dataset(path, cs);
    const auto back = read_dataset(path);
    EXPECT_EQ(back, cs);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    const auto j = nlohmann::json::parse(line);
    std::set<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.insert(it.key());
    EXPECT_EQ(keys, (std::set<std::string>{"campaign_id", "ad_type", "bidding_strategy", "raw_clicks", "events"}));
    std::set<std::string> ev_keys;
    for (auto it = j["events"][0].begin(); it != j["events"][0].end(); ++it) ev_keys.insert(it.key());
    EXPECT_EQ(ev_keys, (std::set<std::string>{"day", "type", "description", "magnitude"}));
    EXPECT_TRUE(j["events"][1]["magnitude"].is_null());
}

TEST(DatasetIo, RejectsMalformedLines) {
    test_util::TempDir dir;
    const auto path = (dir.path() / "bad.jsonl").string();
    for (const char* bad : {
             R"({"campaign_id":"c","ad_type":"SEARCH","bidding_strategy":"CPA","raw_clicks":[1,-2],"events":[]})",
             R"({"campaign_id":"c","ad_type":"TV","bidding_strategy":"CPA","raw_clicks":[1],"events":[]})",
             R"({"campaign_id":"c","ad_type":"SEARCH","bidding_strategy":"CPA","raw_clicks":[1],"events":[{"day":4,"type":"keyword_added","description":"x","magnitude":null}]})",
             "not json"}) {
        {
            std::ofstream out(path, std::ios::trunc);
            out << bad << "\n";
        }
        EXPECT_ANY_THROW(read_dataset(path)) << bad;
    }
    EXPECT_ANY_THROW(read_dataset((dir.path() / "missing.jsonl").string()));
}

TEST(Enums, RoundTrip) {
    for (auto t : kAllEventTypes) EXPECT_EQ(parse_event_type(to_string(t)), t);
    for (auto t : kAllAdTypes) EXPECT_EQ(parse_ad_type(to_string(t)), t);
    for (auto b : kAllBiddingStrategies) EXPECT_EQ(parse_bidding_strategy(to_string(b)), b);
    EXPECT_EQ(parse_trend_label("Increase"), TrendLabel::Increase);
    EXPECT_EQ(parse_trend_label("Decrease"), TrendLabel::Decrease);
    EXPECT_THROW(parse_trend_label("Flat"), std::invalid_argument);
}

TEST(MakeSamples, HorizonLongerThanLookbackRejected) {
    const auto c = make_campaign("c", AdType::Search, BiddingStrategy::Cpa, std::vector<double>(30, 1.0), {});
    EXPECT_THROW(make_samples(c, 3, 4), std::invalid_argument);
}
