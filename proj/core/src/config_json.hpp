#pragma once

#include "clickcast/forecaster.hpp"
#include "clickcast/grpo.hpp"
#include "clickcast/prompt.hpp"
#include "clickcast/synth.hpp"
#include "json.hpp"

namespace clickcast::detail {

// Missing keys keep their defaults; unknown keys are rejected so typos fail loudly.
nlohmann::json to_json(const TSFConfig& c);
TSFConfig tsf_config_from_json(const nlohmann::json& j, TSFConfig base = {});

nlohmann::json to_json(const GeneratorConfig& c);
GeneratorConfig generator_config_from_json(const nlohmann::json& j, GeneratorConfig base = {});

nlohmann::json to_json(const GrpoConfig& c);
GrpoConfig grpo_config_from_json(const nlohmann::json& j, GrpoConfig base = {});

nlohmann::json to_json(const PromptSpec& c);
PromptSpec prompt_spec_from_json(const nlohmann::json& j, PromptSpec base = {});

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known, const char* where);

}  // namespace clickcast::detail
