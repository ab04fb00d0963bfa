#include "clickcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "clickcast/random.hpp"

namespace clickcast {

namespace {

constexpr std::uint64_t kBaseStream = 1;
constexpr std::uint64_t kEventStream = 2;
constexpr std::uint64_t kAttributeStream = 3;

template <std::size_t N>
void check_weights(const std::array<double, N>& w, const char* what) {
    double total = 0.0;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(what) + ": weights must be finite and non-negative");
        total += v;
    }
    if (total <= 0.0) throw std::invalid_argument(std::string(what) + ": weights are all zero");
}

template <std::size_t N>
std::size_t draw_categorical(Xoshiro256& rng, const std::array<double, N>& w) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < N; ++i) {
        if (u < w[i]) return i;
        u -= w[i];
    }
    // Rounding can leave u just past the last bucket; pick the last non-zero weight.
    for (std::size_t i = N; i-- > 0;) {
        if (w[i] > 0.0) return i;
    }
    return N - 1;
}

struct Drawn {
    double magnitude;
    std::string description;
};

Drawn describe_event(EventType type, Xoshiro256& rng) {
    auto count = [&](int lo, int hi) { return static_cast<double>(rng.uniform_int(lo, hi)); };
    auto n = [](double v) { return std::to_string(static_cast<long long>(v)); };
    switch (type) {
        case EventType::KeywordAdded: {
            const double m = count(5, 150);
            return {m, "added " + n(m) + " broad match keywords"};
        }
        case EventType::KeywordRemoved: {
            const double m = count(5, 150);
            return {m, "removed " + n(m) + " phrase match keywords"};
        }
        case EventType::KeywordPaused: {
            const double m = count(1, 60);
            return {m, "paused " + n(m) + " keywords"};
        }
        case EventType::AdTextChanged: {
            const double m = count(1, 5);
            return {m, "updated ad text on " + n(m) + " ads"};
        }
        case EventType::HeadlineModified: {
            const double m = count(1, 5);
            return {m, "modified " + n(m) + " ad headlines"};
        }
        case EventType::BudgetAdjusted: {
            const double m = count(5, 50);
            return {m, "reduced daily budget by " + n(m) + "%"};
        }
        case EventType::BidStrategyChanged: {
            static constexpr std::array<const char*, 3> kTargets = {"TARGET_CPA", "MAXIMIZE_CLICKS",
                                                                    "MAXIMIZE_CONVERSIONS"};
            const auto pick = static_cast<std::size_t>(rng.uniform_int(0, 2));
            return {1.0, std::string("switched bid strategy to ") + kTargets[pick]};
        }
        case EventType::BidValueUpdated: {
            const double m = count(5, 40);
            return {m, "raised max CPC bid by " + n(m) + "%"};
        }
        case EventType::CpaTargetChanged: {
            const double m = count(5, 40);
            return {m, "increased target CPA by " + n(m) + "%"};
        }
        case EventType::AssetCreated: {
            const double m = count(1, 6);
            return {m, "created " + n(m) + " new campaign assets"};
        }
    }
    return {0.0, "unknown change"};
}

}  // namespace

EffectKernel EffectKernel::defaults() {
    EffectKernel k;
    auto set = [&](EventType t, int dir, double amp) { k[t] = EventEffect{dir, amp, 3.0}; };
    set(EventType::KeywordAdded, +1, 0.0015);
    set(EventType::KeywordRemoved, -1, 0.002);
    set(EventType::KeywordPaused, -1, 0.003);
    set(EventType::AdTextChanged, +1, 0.03);
    set(EventType::HeadlineModified, +1, 0.02);
    set(EventType::BudgetAdjusted, -1, 0.006);
    set(EventType::BidStrategyChanged, -1, 0.08);
    set(EventType::BidValueUpdated, +1, 0.006);
    set(EventType::CpaTargetChanged, -1, 0.006);
    set(EventType::AssetCreated, +1, 0.025);
    return k;
}

void EffectKernel::validate() const {
    for (const auto& e : effects) {
        if (e.direction != 1 && e.direction != -1)
            throw std::invalid_argument("effect kernel: direction must be +1 or -1");
        if (!std::isfinite(e.base_amplitude))
            throw std::invalid_argument("effect kernel: amplitude must be finite");
        if (!(e.half_life_days > 0.0) || !std::isfinite(e.half_life_days))
            throw std::invalid_argument("effect kernel: half_life_days must be > 0");
    }
}

std::array<double, kNumEventTypes> GeneratorConfig::default_event_weights() {
    // Index order follows kAllEventTypes; keyword changes dominate.
    return {0.20, 0.20, 0.12, 0.10, 0.06, 0.08, 0.04, 0.08, 0.06, 0.06};
}

void GeneratorConfig::validate() const {
    if (num_campaigns < 1) throw std::invalid_argument("generator: num_campaigns must be >= 1");
    if (lookback < 1 || horizon < 1) throw std::invalid_argument("generator: lookback/horizon must be >= 1");
    if (days_per_campaign < lookback + horizon)
        throw std::invalid_argument("generator: days_per_campaign must be >= lookback + horizon");
    if (!(event_rate >= 0.0 && event_rate <= 1.0))
        throw std::invalid_argument("generator: event_rate must be in [0,1]");
    if (!(effect_scale >= 0.0) || !std::isfinite(effect_scale))
        throw std::invalid_argument("generator: effect_scale must be finite and >= 0");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
        throw std::invalid_argument("generator: noise_std must be finite and >= 0");
    if (rolling_window < 1) throw std::invalid_argument("generator: rolling_window must be >= 1");
    check_weights(event_type_weights, "event_type_weights");
    check_weights(campaign_type_weights, "campaign_type_weights");
    check_weights(bidding_weights, "bidding_weights");
    kernel.validate();
}

std::vector<double> generate_base_series(const GeneratorConfig& config, int index) {
    Xoshiro256 rng(mix_seed(config.base_seed, static_cast<std::uint64_t>(index), kBaseStream));
    const double level = rng.uniform(300.0, 3000.0);
    const double slope = rng.normal(0.0, 0.0015);
    const double season_amp = rng.uniform(0.05, 0.2);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

    std::vector<double> base(static_cast<std::size_t>(config.days_per_campaign));
    for (std::size_t t = 0; t < base.size(); ++t) {
        const double td = static_cast<double>(t);
        const double rel = 1.0 + slope * td +
                           season_amp * std::sin(2.0 * std::numbers::pi * td / 7.0 + phase) +
                           config.noise_std * rng.normal();
        base[t] = std::max(0.0, level * rel);
    }
    return base;
}

std::vector<ChangeEvent> generate_events(const GeneratorConfig& config, int index) {
    Xoshiro256 rng(mix_seed(config.base_seed, static_cast<std::uint64_t>(index), kEventStream));
    std::vector<ChangeEvent> events;
    for (int day = 0; day < config.days_per_campaign; ++day) {
        if (!rng.bernoulli(config.event_rate)) continue;
        const auto type = kAllEventTypes[draw_categorical(rng, config.event_type_weights)];
        auto drawn = describe_event(type, rng);
        events.push_back(ChangeEvent{day, type, std::move(drawn.description), drawn.magnitude});
    }
    return events;
}

std::vector<double> apply_event_effects(std::span<const double> base, std::span<const ChangeEvent> events,
                                        const EffectKernel& kernel, double effect_scale) {
    std::vector<double> factor(base.size(), 1.0);
    for (const auto& ev : events) {
        const auto& eff = kernel[ev.type];
        const double amplitude = eff.direction * eff.base_amplitude * ev.magnitude.value_or(1.0) * effect_scale;
        if (amplitude == 0.0) continue;
        for (std::size_t t = static_cast<std::size_t>(std::max(ev.day_index, 0)); t < base.size(); ++t) {
            const double age = static_cast<double>(t) - ev.day_index;
            factor[t] += amplitude * std::exp2(-age / eff.half_life_days);
        }
    }
    std::vector<double> out(base.size());
    for (std::size_t t = 0; t < base.size(); ++t) out[t] = base[t] * std::max(0.0, factor[t]);
    return out;
}

CampaignRecord generate_campaign(const GeneratorConfig& config, int index) {
    config.validate();
    if (index < 0) throw std::invalid_argument("generate_campaign: negative index");

    Xoshiro256 attr(mix_seed(config.base_seed, static_cast<std::uint64_t>(index), kAttributeStream));
    const auto ad_type = kAllAdTypes[draw_categorical(attr, config.campaign_type_weights)];
    const auto bidding = kAllBiddingStrategies[draw_categorical(attr, config.bidding_weights)];

    const auto base = generate_base_series(config, index);
    auto events = generate_events(config, index);
    auto raw = apply_event_effects(base, events, config.kernel, config.effect_scale);

    char id[32];
    std::snprintf(id, sizeof id, "c%03d", index);
    return make_campaign(id, ad_type, bidding, std::move(raw), std::move(events), config.rolling_window);
}

std::vector<CampaignRecord> generate_dataset(const GeneratorConfig& config) {
    config.validate();
    std::vector<CampaignRecord> out;
    out.reserve(static_cast<std::size_t>(config.num_campaigns));
    for (int i = 0; i < config.num_campaigns; ++i) out.push_back(generate_campaign(config, i));
    return out;
}

double event_variance_share(const GeneratorConfig& config) {
    config.validate();
    auto variance = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return s / static_cast<double>(v.size());
    };
    double total = 0.0;
    for (int i = 0; i < config.num_campaigns; ++i) {
        const auto base = generate_base_series(config, i);
        const auto events = generate_events(config, i);
        const auto raw = apply_event_effects(base, events, config.kernel, config.effect_scale);
        const auto r_raw = rolling_average(raw, config.rolling_window);
        const auto r_base = rolling_average(base, config.rolling_window);
        std::vector<double> diff(r_raw.size());
        for (std::size_t t = 0; t < diff.size(); ++t) diff[t] = r_raw[t] - r_base[t];
        const double denom = variance(r_raw);
        total += denom > 0.0 ? variance(diff) / denom : 0.0;
    }
    return total / static_cast<double>(config.num_campaigns);
}

DatasetStatistics dataset_statistics(std::span<const CampaignRecord> campaigns) {
    DatasetStatistics st;
    st.campaigns = campaigns.size();
    for (const auto& c : campaigns) {
        st.total_days += c.num_days();
        for (const auto& text : c.day_texts) {
            if (text == kNoChanges) ++st.no_change_days;
            else ++st.change_days;
        }
        st.total_events += c.events.size();
        for (const auto& ev : c.events) ++st.event_type_histogram[std::string(to_string(ev.type))];
        ++st.campaign_type_histogram[std::string(to_string(c.ad_type))];
        ++st.bidding_histogram[std::string(to_string(c.bidding_strategy))];
    }
    return st;
}

}  // namespace clickcast
