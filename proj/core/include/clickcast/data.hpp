#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace clickcast {

inline constexpr std::string_view kNoChanges = "no changes";
inline constexpr int kDefaultRollingWindow = 7;

enum class EventType {
    KeywordAdded,
    KeywordRemoved,
    KeywordPaused,
    AdTextChanged,
    HeadlineModified,
    BudgetAdjusted,
    BidStrategyChanged,
    BidValueUpdated,
    CpaTargetChanged,
    AssetCreated,
};
inline constexpr std::size_t kNumEventTypes = 10;
inline constexpr std::array<EventType, kNumEventTypes> kAllEventTypes = {
    EventType::KeywordAdded,     EventType::KeywordRemoved,  EventType::KeywordPaused,
    EventType::AdTextChanged,    EventType::HeadlineModified, EventType::BudgetAdjusted,
    EventType::BidStrategyChanged, EventType::BidValueUpdated, EventType::CpaTargetChanged,
    EventType::AssetCreated,
};

enum class AdType { Search, Display, Discovery, Video };
inline constexpr std::array<AdType, 4> kAllAdTypes = {AdType::Search, AdType::Display,
                                                      AdType::Discovery, AdType::Video};

enum class BiddingStrategy { Cpa, Cpc, MaximizeConversions, MaximizeClicks };
inline constexpr std::array<BiddingStrategy, 4> kAllBiddingStrategies = {
    BiddingStrategy::Cpa, BiddingStrategy::Cpc, BiddingStrategy::MaximizeConversions,
    BiddingStrategy::MaximizeClicks};

enum class TrendLabel { Increase, Decrease };

// Wire names ("keyword_removed", "SEARCH", "MAXIMIZE_CONVERSIONS", "Increase").
std::string_view to_string(EventType t);
std::string_view to_string(AdType t);
std::string_view to_string(BiddingStrategy b);
std::string_view to_string(TrendLabel l);

// Throw std::invalid_argument on unknown names. Trend labels parse case-insensitively.
EventType parse_event_type(std::string_view s);
AdType parse_ad_type(std::string_view s);
BiddingStrategy parse_bidding_strategy(std::string_view s);
TrendLabel parse_trend_label(std::string_view s);

inline TrendLabel flip(TrendLabel l) {
    return l == TrendLabel::Increase ? TrendLabel::Decrease : TrendLabel::Increase;
}

struct ChangeEvent {
    int day_index = 0;
    EventType type = EventType::KeywordAdded;
    std::string description;
    std::optional<double> magnitude;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    bool operator==(const ChangeEvent&) const = default;
};

/**
 * One campaign: the stored fields (id, attributes, raw clicks, events) plus
 * the derived per-day series. `clicks` and `day_texts` are always recomputed
 * from the stored fields by make_campaign(); they are never serialized.
 */
struct CampaignRecord {
    std::string campaign_id;
    AdType ad_type = AdType::Search;
    BiddingStrategy bidding_strategy = BiddingStrategy::Cpa;
    std::vector<double> raw_clicks;
    std::vector<ChangeEvent> events;

    std::vector<double> clicks;
    std::vector<std::string> day_texts;

    std::size_t num_days() const { return raw_clicks.size(); }

    bool operator==(const CampaignRecord&) const = default;
};

struct ForecastSample {
    std::string sample_id;
    std::string campaign_id;
    std::vector<double> x;               // lookback, length l
    std::vector<std::string> c;          // per-day change-log text, length l
    std::vector<double> y;               // horizon, length h
    AdType ad_type = AdType::Search;
    BiddingStrategy bidding_strategy = BiddingStrategy::Cpa;
    int t = 0;                           // anchor day (last lookback day)
    TrendLabel label = TrendLabel::Decrease;
};

struct WindowedSamples {
    std::vector<ForecastSample> samples;
    /// Campaigns too short to yield a single window.
    std::size_t short_series = 0;
};

/// Trailing mean with a partial window at the start.
std::vector<double> rolling_average(std::span<const double> raw, int window);

/// Per-series min-max scaling into [0,1]; a constant series maps to 0.5.
std::vector<double> normalize_campaign(std::span<const double> raw);

/// One text per day; empty days read "no changes", multi-event days join with "; ".
std::vector<std::string> align_logs(std::span<const ChangeEvent> events, int num_days);

/// Builds a CampaignRecord, computing clicks = normalize(rolling_average(raw)) and day_texts.
CampaignRecord make_campaign(std::string campaign_id, AdType ad_type, BiddingStrategy bidding,
                             std::vector<double> raw_clicks, std::vector<ChangeEvent> events,
                             int rolling_window = kDefaultRollingWindow);

/// Increase iff mean(y) > mean(last h of x); ties go to Decrease.
TrendLabel label_trend(std::span<const double> x, std::span<const double> y, int h);

WindowedSamples make_samples(const CampaignRecord& campaign, int l, int h);
WindowedSamples make_samples(std::span<const CampaignRecord> campaigns, int l, int h);

/// Raw change log of a sample as one text: "Day i: <text>" entries joined by " | ".
std::string changelog_text(const ForecastSample& sample);

struct CampaignSplit {
    std::vector<CampaignRecord> train;
    std::vector<CampaignRecord> test;
};

CampaignSplit split_by_campaign(std::span<const CampaignRecord> campaigns,
                                std::span<const std::string> test_ids);

// JSON-lines dataset IO. Only the stored fields are written; derived series are
// recomputed on load with the given rolling window.
std::string campaign_to_json_line(const CampaignRecord& campaign);
CampaignRecord campaign_from_json_line(std::string_view line,
                                       int rolling_window = kDefaultRollingWindow);
void write_dataset(const std::string& path, std::span<const CampaignRecord> campaigns);
std::vector<CampaignRecord> read_dataset(const std::string& path,
                                         int rolling_window = kDefaultRollingWindow);

}  // namespace clickcast
