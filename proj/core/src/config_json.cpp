#include "config_json.hpp"

#include <set>
#include <stdexcept>

namespace clickcast::detail {

using nlohmann::json;

namespace {

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

template <std::size_t N, typename E>
json weights_to_json(const std::array<double, N>& w, const std::array<E, N>& keys) {
    json j = json::object();
    for (std::size_t i = 0; i < N; ++i) j[std::string(to_string(keys[i]))] = w[i];
    return j;
}

template <std::size_t N, typename E>
void weights_from_json(const json& j, std::array<double, N>& w, const std::array<E, N>& keys, const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool found = false;
        for (std::size_t i = 0; i < N; ++i) {
            if (to_string(keys[i]) == it.key()) {
                w[i] = it.value().template get<double>();
                found = true;
            }
        }
        if (!found) throw std::invalid_argument(std::string(where) + ": unknown key '" + it.key() + "'");
    }
}

}  // namespace

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known, const char* where) {
    if (!j.is_object()) throw std::invalid_argument(std::string(where) + ": expected a JSON object");
    const std::set<std::string> allowed(known.begin(), known.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.contains(it.key()))
            throw std::invalid_argument(std::string(where) + ": unknown key '" + it.key() + "'");
    }
}

json to_json(const TSFConfig& c) {
    return {{"layers", c.layers},
            {"heads", c.heads},
            {"hidden", c.hidden},
            {"ff_dim", c.ff_dim},
            {"lookback", c.lookback},
            {"horizon", c.horizon},
            {"embedding_dim", c.embedding_dim},
            {"text_hidden", c.text_hidden},
            {"alpha", c.alpha},
            {"dropout", c.dropout},
            {"learning_rate", c.learning_rate},
            {"lr_schedule", c.lr_schedule},
            {"grad_clip", c.grad_clip},
            {"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"seed", c.seed}};
}

TSFConfig tsf_config_from_json(const json& j, TSFConfig c) {
    reject_unknown_keys(j,
                        {"layers", "heads", "hidden", "ff_dim", "lookback", "horizon", "embedding_dim",
                         "text_hidden", "alpha", "dropout", "learning_rate", "lr_schedule", "grad_clip", "epochs", "batch_size",
                         "seed"},
                        "forecaster config");
    get_if(j, "layers", c.layers);
    get_if(j, "heads", c.heads);
    get_if(j, "hidden", c.hidden);
    get_if(j, "ff_dim", c.ff_dim);
    get_if(j, "lookback", c.lookback);
    get_if(j, "horizon", c.horizon);
    get_if(j, "embedding_dim", c.embedding_dim);
    get_if(j, "text_hidden", c.text_hidden);
    get_if(j, "alpha", c.alpha);
    get_if(j, "dropout", c.dropout);
    get_if(j, "learning_rate", c.learning_rate);
    get_if(j, "lr_schedule", c.lr_schedule);
    get_if(j, "grad_clip", c.grad_clip);
    get_if(j, "epochs", c.epochs);
    get_if(j, "batch_size", c.batch_size);
    get_if(j, "seed", c.seed);
    c.validate();
    return c;
}

json to_json(const GeneratorConfig& c) {
    json kernel = json::object();
    for (auto t : kAllEventTypes) {
        const auto& e = c.kernel[t];
        kernel[std::string(to_string(t))] = {
            {"direction", e.direction}, {"base_amplitude", e.base_amplitude}, {"half_life_days", e.half_life_days}};
    }
    return {{"num_campaigns", c.num_campaigns},
            {"days_per_campaign", c.days_per_campaign},
            {"event_rate", c.event_rate},
            {"event_type_weights", weights_to_json(c.event_type_weights, kAllEventTypes)},
            {"effect_scale", c.effect_scale},
            {"noise_std", c.noise_std},
            {"base_seed", c.base_seed},
            {"campaign_type_weights", weights_to_json(c.campaign_type_weights, kAllAdTypes)},
            {"bidding_weights", weights_to_json(c.bidding_weights, kAllBiddingStrategies)},
            {"kernel", kernel},
            {"rolling_window", c.rolling_window},
            {"lookback", c.lookback},
            {"horizon", c.horizon}};
}

GeneratorConfig generator_config_from_json(const json& j, GeneratorConfig c) {
    reject_unknown_keys(j,
                        {"num_campaigns", "days_per_campaign", "event_rate", "event_type_weights", "effect_scale",
                         "noise_std", "base_seed", "campaign_type_weights", "bidding_weights", "kernel",
                         "rolling_window", "lookback", "horizon"},
                        "generator config");
    get_if(j, "num_campaigns", c.num_campaigns);
    get_if(j, "days_per_campaign", c.days_per_campaign);
    get_if(j, "event_rate", c.event_rate);
    get_if(j, "effect_scale", c.effect_scale);
    get_if(j, "noise_std", c.noise_std);
    get_if(j, "base_seed", c.base_seed);
    get_if(j, "rolling_window", c.rolling_window);
    get_if(j, "lookback", c.lookback);
    get_if(j, "horizon", c.horizon);
    if (j.contains("event_type_weights"))
        weights_from_json(j.at("event_type_weights"), c.event_type_weights, kAllEventTypes, "event_type_weights");
    if (j.contains("campaign_type_weights"))
        weights_from_json(j.at("campaign_type_weights"), c.campaign_type_weights, kAllAdTypes, "campaign_type_weights");
    if (j.contains("bidding_weights"))
        weights_from_json(j.at("bidding_weights"), c.bidding_weights, kAllBiddingStrategies, "bidding_weights");
    if (j.contains("kernel")) {
        for (auto it = j.at("kernel").begin(); it != j.at("kernel").end(); ++it) {
            auto& e = c.kernel[parse_event_type(it.key())];
            reject_unknown_keys(it.value(), {"direction", "base_amplitude", "half_life_days"}, "kernel entry");
            get_if(it.value(), "direction", e.direction);
            get_if(it.value(), "base_amplitude", e.base_amplitude);
            get_if(it.value(), "half_life_days", e.half_life_days);
        }
    }
    c.validate();
    return c;
}

json to_json(const GrpoConfig& c) {
    return {{"group_size", c.group_size}, {"iterations", c.iterations},   {"learning_rate", c.learning_rate},
            {"kl_coefficient", c.kl_coefficient}, {"epsilon", c.epsilon}, {"seed", c.seed}};
}

GrpoConfig grpo_config_from_json(const json& j, GrpoConfig c) {
    reject_unknown_keys(j, {"group_size", "iterations", "learning_rate", "kl_coefficient", "epsilon", "seed"},
                        "grpo config");
    get_if(j, "group_size", c.group_size);
    get_if(j, "iterations", c.iterations);
    get_if(j, "learning_rate", c.learning_rate);
    get_if(j, "kl_coefficient", c.kl_coefficient);
    get_if(j, "epsilon", c.epsilon);
    get_if(j, "seed", c.seed);
    c.validate();
    return c;
}

json to_json(const PromptSpec& c) {
    return {{"lookback", c.lookback}, {"horizon", c.horizon}, {"decimals", c.decimals},
            {"template_version", c.template_version}};
}

PromptSpec prompt_spec_from_json(const json& j, PromptSpec c) {
    reject_unknown_keys(j, {"lookback", "horizon", "decimals", "template_version"}, "prompt");
    get_if(j, "lookback", c.lookback);
    get_if(j, "horizon", c.horizon);
    get_if(j, "decimals", c.decimals);
    get_if(j, "template_version", c.template_version);
    c.validate();
    return c;
}

}  // namespace clickcast::detail
