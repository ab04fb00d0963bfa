#include "clickcast/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "text_util.hpp"

namespace clickcast {

namespace {

using nlohmann::json;

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<Enum, N>& all, const char* what) {
    for (Enum e : all) {
        if (to_string(e) == s) return e;
    }
    throw std::invalid_argument(std::string("unknown ") + what + ": '" + std::string(s) + "'");
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::string_view to_string(EventType t) {
    switch (t) {
        case EventType::KeywordAdded: return "keyword_added";
        case EventType::KeywordRemoved: return "keyword_removed";
        case EventType::KeywordPaused: return "keyword_paused";
        case EventType::AdTextChanged: return "ad_text_changed";
        case EventType::HeadlineModified: return "headline_modified";
        case EventType::BudgetAdjusted: return "budget_adjusted";
        case EventType::BidStrategyChanged: return "bid_strategy_changed";
        case EventType::BidValueUpdated: return "bid_value_updated";
        case EventType::CpaTargetChanged: return "cpa_target_changed";
        case EventType::AssetCreated: return "asset_created";
    }
    return "?";
}

std::string_view to_string(AdType t) {
    switch (t) {
        case AdType::Search: return "SEARCH";
        case AdType::Display: return "DISPLAY";
        case AdType::Discovery: return "DISCOVERY";
        case AdType::Video: return "VIDEO";
    }
    return "?";
}

std::string_view to_string(BiddingStrategy b) {
    switch (b) {
        case BiddingStrategy::Cpa: return "CPA";
        case BiddingStrategy::Cpc: return "CPC";
        case BiddingStrategy::MaximizeConversions: return "MAXIMIZE_CONVERSIONS";
        case BiddingStrategy::MaximizeClicks: return "MAXIMIZE_CLICKS";
    }
    return "?";
}

std::string_view to_string(TrendLabel l) {
    return l == TrendLabel::Increase ? "Increase" : "Decrease";
}

EventType parse_event_type(std::string_view s) { return parse_enum(s, kAllEventTypes, "event type"); }
AdType parse_ad_type(std::string_view s) { return parse_enum(s, kAllAdTypes, "ad type"); }
BiddingStrategy parse_bidding_strategy(std::string_view s) {
    return parse_enum(s, kAllBiddingStrategies, "bidding strategy");
}

TrendLabel parse_trend_label(std::string_view s) {
    const auto v = detail::to_lower(detail::trim(s));
    if (v == "increase") return TrendLabel::Increase;
    if (v == "decrease") return TrendLabel::Decrease;
    throw std::invalid_argument("unknown trend label: '" + std::string(s) + "'");
}

void ChangeEvent::validate() const {
    if (day_index < 0) throw std::invalid_argument("change event: negative day_index");
    if (detail::trim(description).empty())
        throw std::invalid_argument("change event: empty description");
    if (magnitude && (!std::isfinite(*magnitude) || *magnitude < 0.0))
        throw std::invalid_argument("change event: magnitude must be finite and non-negative");
}

std::vector<double> rolling_average(std::span<const double> raw, int window) {
    if (raw.empty()) throw std::invalid_argument("rolling_average: empty input");
    if (window < 1) throw std::invalid_argument("rolling_average: window must be >= 1");
    std::vector<double> out(raw.size());
    const auto w = static_cast<std::size_t>(window);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const std::size_t first = i + 1 >= w ? i + 1 - w : 0;
        double sum = 0.0;
        for (std::size_t k = first; k <= i; ++k) sum += raw[k];
        out[i] = sum / static_cast<double>(i - first + 1);
    }
    return out;
}

std::vector<double> normalize_campaign(std::span<const double> raw) {
    if (raw.empty()) throw std::invalid_argument("normalize_campaign: empty input");
    for (double v : raw) {
        if (!(v >= 0.0)) throw std::invalid_argument("normalize_campaign: negative or NaN value");
    }
    const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    std::vector<double> out(raw.size(), 0.5);
    if (range > 0.0) {
        for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - lo) / range;
    }
    return out;
}

std::vector<std::string> align_logs(std::span<const ChangeEvent> events, int num_days) {
    if (num_days < 0) throw std::invalid_argument("align_logs: negative num_days");
    std::vector<std::string> texts(static_cast<std::size_t>(num_days));
    for (const auto& ev : events) {
        ev.validate();
        if (ev.day_index >= num_days)
            throw std::invalid_argument("align_logs: event day " + std::to_string(ev.day_index) +
                                        " outside [0, " + std::to_string(num_days) + ")");
        auto& slot = texts[static_cast<std::size_t>(ev.day_index)];
        if (!slot.empty()) slot += "; ";
        slot += ev.description;
    }
    for (auto& t : texts) {
        if (t.empty()) t = kNoChanges;
    }
    return texts;
}

CampaignRecord make_campaign(std::string campaign_id, AdType ad_type, BiddingStrategy bidding,
                             std::vector<double> raw_clicks, std::vector<ChangeEvent> events,
                             int rolling_window) {
    if (campaign_id.empty()) throw std::invalid_argument("campaign: empty campaign_id");
    CampaignRecord rec;
    rec.campaign_id = std::move(campaign_id);
    rec.ad_type = ad_type;
    rec.bidding_strategy = bidding;
    rec.raw_clicks = std::move(raw_clicks);
    // Stable sort keeps same-day events in input order.
    std::stable_sort(events.begin(), events.end(),
                     [](const ChangeEvent& a, const ChangeEvent& b) { return a.day_index < b.day_index; });
    rec.events = std::move(events);
    rec.clicks = normalize_campaign(rolling_average(rec.raw_clicks, rolling_window));
    rec.day_texts = align_logs(rec.events, static_cast<int>(rec.raw_clicks.size()));
    return rec;
}

TrendLabel label_trend(std::span<const double> x, std::span<const double> y, int h) {
    if (h < 1) throw std::invalid_argument("label_trend: h must be >= 1");
    const auto hh = static_cast<std::size_t>(h);
    if (hh > x.size()) throw std::invalid_argument("label_trend: h exceeds lookback length");
    if (y.size() != hh) throw std::invalid_argument("label_trend: len(y) != h");
    const double recent = mean_of(x.subspan(x.size() - hh));
    const double future = mean_of(y);
    return future > recent ? TrendLabel::Increase : TrendLabel::Decrease;
}

WindowedSamples make_samples(const CampaignRecord& campaign, int l, int h) {
    if (l < 1 || h < 1) throw std::invalid_argument("make_samples: l and h must be >= 1");
    if (h > l) throw std::invalid_argument("make_samples: h must not exceed l");
    if (campaign.clicks.size() != campaign.num_days() || campaign.day_texts.size() != campaign.num_days())
        throw std::invalid_argument("make_samples: campaign derived series are not populated");

    WindowedSamples out;
    const int T = static_cast<int>(campaign.num_days());
    if (T < l + h) {
        out.short_series = 1;
        return out;
    }
    out.samples.reserve(static_cast<std::size_t>(T - l - h + 1));
    for (int t = l - 1; t <= T - h - 1; ++t) {
        ForecastSample s;
        s.campaign_id = campaign.campaign_id;
        s.sample_id = campaign.campaign_id + ":" + std::to_string(t);
        s.t = t;
        s.ad_type = campaign.ad_type;
        s.bidding_strategy = campaign.bidding_strategy;
        const auto first = static_cast<std::size_t>(t - l + 1);
        s.x.assign(campaign.clicks.begin() + first, campaign.clicks.begin() + t + 1);
        s.c.assign(campaign.day_texts.begin() + first, campaign.day_texts.begin() + t + 1);
        s.y.assign(campaign.clicks.begin() + t + 1, campaign.clicks.begin() + t + 1 + h);
        s.label = label_trend(s.x, s.y, h);
        out.samples.push_back(std::move(s));
    }
    return out;
}

WindowedSamples make_samples(std::span<const CampaignRecord> campaigns, int l, int h) {
    WindowedSamples out;
    for (const auto& c : campaigns) {
        auto part = make_samples(c, l, h);
        out.short_series += part.short_series;
        std::move(part.samples.begin(), part.samples.end(), std::back_inserter(out.samples));
    }
    return out;
}

std::string changelog_text(const ForecastSample& sample) {
    std::string out;
    for (std::size_t i = 0; i < sample.c.size(); ++i) {
        if (i) out += " | ";
        out += "Day " + std::to_string(i) + ": " + sample.c[i];
    }
    return out;
}

CampaignSplit split_by_campaign(std::span<const CampaignRecord> campaigns,
                                std::span<const std::string> test_ids) {
    if (test_ids.empty()) throw std::invalid_argument("split_by_campaign: no test ids");
    std::set<std::string> known;
    for (const auto& c : campaigns) {
        if (!known.insert(c.campaign_id).second)
            throw std::invalid_argument("split_by_campaign: duplicate campaign id " + c.campaign_id);
    }
    const std::set<std::string> wanted(test_ids.begin(), test_ids.end());
    for (const auto& id : wanted) {
        if (!known.contains(id)) throw std::invalid_argument("split_by_campaign: unknown id " + id);
    }
    CampaignSplit split;
    for (const auto& c : campaigns) {
        (wanted.contains(c.campaign_id) ? split.test : split.train).push_back(c);
    }
    if (split.train.empty()) throw std::invalid_argument("split_by_campaign: train side is empty");
    return split;
}

std::string campaign_to_json_line(const CampaignRecord& c) {
    json events = json::array();
    for (const auto& ev : c.events) {
        events.push_back({{"day", ev.day_index},
                          {"type", to_string(ev.type)},
                          {"description", ev.description},
                          {"magnitude", ev.magnitude ? json(*ev.magnitude) : json(nullptr)}});
    }
    json j = {{"campaign_id", c.campaign_id},
              {"ad_type", to_string(c.ad_type)},
              {"bidding_strategy", to_string(c.bidding_strategy)},
              {"raw_clicks", c.raw_clicks},
              {"events", std::move(events)}};
    return j.dump();
}

CampaignRecord campaign_from_json_line(std::string_view line, int rolling_window) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("dataset: malformed JSON line: ") + e.what());
    }
    try {
        std::vector<ChangeEvent> events;
        for (const auto& e : j.at("events")) {
            ChangeEvent ev;
            ev.day_index = e.at("day").get<int>();
            ev.type = parse_event_type(e.at("type").get<std::string>());
            ev.description = e.at("description").get<std::string>();
            if (e.contains("magnitude") && !e.at("magnitude").is_null())
                ev.magnitude = e.at("magnitude").get<double>();
            ev.validate();
            events.push_back(std::move(ev));
        }
        return make_campaign(j.at("campaign_id").get<std::string>(),
                             parse_ad_type(j.at("ad_type").get<std::string>()),
                             parse_bidding_strategy(j.at("bidding_strategy").get<std::string>()),
                             j.at("raw_clicks").get<std::vector<double>>(), std::move(events),
                             rolling_window);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("dataset: bad campaign record: ") + e.what());
    }
}

void write_dataset(const std::string& path, std::span<const CampaignRecord> campaigns) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& c : campaigns) out << campaign_to_json_line(c) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<CampaignRecord> read_dataset(const std::string& path, int rolling_window) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    std::vector<CampaignRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        out.push_back(campaign_from_json_line(line, rolling_window));
    }
    return out;
}

}  // namespace clickcast
