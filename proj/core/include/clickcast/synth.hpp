#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "clickcast/data.hpp"

namespace clickcast {

struct EventEffect {
    int direction = -1;            // +1 or -1
    double base_amplitude = 0.0;   // fractional click change per unit magnitude
    double half_life_days = 3.0;
};

/// Per-event-type causal effect of a change on clicks.
struct EffectKernel {
    std::array<EventEffect, kNumEventTypes> effects{};

    const EventEffect& operator[](EventType t) const { return effects[static_cast<std::size_t>(t)]; }
    EventEffect& operator[](EventType t) { return effects[static_cast<std::size_t>(t)]; }

    static EffectKernel defaults();
    void validate() const;
};

struct GeneratorConfig {
    int num_campaigns = 20;
    int days_per_campaign = 200;
    double event_rate = 0.1;
    std::array<double, kNumEventTypes> event_type_weights = default_event_weights();
    double effect_scale = 1.0;
    double noise_std = 0.05;   // relative to campaign click level
    std::uint64_t base_seed = 0;
    std::array<double, 4> campaign_type_weights{0.55, 0.2, 0.15, 0.1};
    std::array<double, 4> bidding_weights{0.35, 0.2, 0.3, 0.15};
    EffectKernel kernel = EffectKernel::defaults();
    int rolling_window = kDefaultRollingWindow;
    // Minimum usable campaign length is lookback + horizon.
    int lookback = 14;
    int horizon = 5;

    static std::array<double, kNumEventTypes> default_event_weights();
    void validate() const;
};

/// Smooth trend + weekly sinusoid + gaussian noise, clipped at zero. Uses only the base stream.
std::vector<double> generate_base_series(const GeneratorConfig& config, int index);

/// Sampled change events for one campaign. Uses only the event stream.
std::vector<ChangeEvent> generate_events(const GeneratorConfig& config, int index);

/// Applies multiplicative, exponentially decaying event effects to a base series.
std::vector<double> apply_event_effects(std::span<const double> base, std::span<const ChangeEvent> events,
                                        const EffectKernel& kernel, double effect_scale);

/// Deterministic in (base_seed, index).
CampaignRecord generate_campaign(const GeneratorConfig& config, int index);

std::vector<CampaignRecord> generate_dataset(const GeneratorConfig& config);

/**
 * Share of rolling-click variance attributable to change events: per campaign,
 * Var(rolling(raw) - rolling(base)) / Var(rolling(raw)), averaged over campaigns.
 */
double event_variance_share(const GeneratorConfig& config);

struct DatasetStatistics {
    std::size_t campaigns = 0;
    std::size_t total_days = 0;
    std::size_t change_days = 0;
    std::size_t no_change_days = 0;
    std::size_t total_events = 0;
    std::map<std::string, std::size_t> event_type_histogram;
    std::map<std::string, std::size_t> campaign_type_histogram;
    std::map<std::string, std::size_t> bidding_histogram;

    double change_fraction() const {
        return total_days ? static_cast<double>(change_days) / static_cast<double>(total_days) : 0.0;
    }
};

DatasetStatistics dataset_statistics(std::span<const CampaignRecord> campaigns);

}  // namespace clickcast
