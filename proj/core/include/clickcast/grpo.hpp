#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "clickcast/data.hpp"
#include "clickcast/random.hpp"
#include "clickcast/reward.hpp"

namespace clickcast {

/// k sampled completions for one prompt, their rewards and group-relative advantages.
struct RolloutGroup {
    std::string prompt_id;
    std::string prompt;
    std::vector<std::string> completions;
    std::vector<double> rewards;
    std::vector<double> advantages;
};

/// a_i = (r_i - mean) / (population_std + epsilon); a zero-variance group yields all zeros.
std::vector<double> group_advantages(std::span<const double> rewards, double epsilon = 1e-8);

struct PolicyUpdateOptions {
    double learning_rate = 0.5;
    double kl_coefficient = 0.0;  // reserved for policies with a reference model
};

/**
 * The extension point for a real fine-tuning backend. The loop only ever samples,
 * hands back scored groups and checkpoints; update() is always called from a
 * single thread.
 */
class Policy {
public:
    virtual ~Policy() = default;
    virtual void reseed(std::uint64_t seed) = 0;
    virtual std::vector<std::string> sample(const std::string& prompt, int k) = 0;
    /// Returns a scalar diagnostic (the surrogate objective before the step).
    virtual double update(std::span<const RolloutGroup> groups, const PolicyUpdateOptions& options) = 0;
    virtual std::string snapshot() const = 0;
    virtual void restore(const std::string& snapshot) = 0;
};

/**
 * Desk-scale policy: an independent softmax over a fixed set of canned
 * completions per prompt, trained by advantage-weighted log-likelihood ascent.
 */
class ToyTagPolicy final : public Policy {
public:
    ToyTagPolicy(std::vector<std::string> templates, std::uint64_t seed);

    void reseed(std::uint64_t seed) override;
    std::vector<std::string> sample(const std::string& prompt, int k) override;
    double update(std::span<const RolloutGroup> groups, const PolicyUpdateOptions& options) override;
    std::string snapshot() const override;
    void restore(const std::string& snapshot) override;

    std::vector<double> probabilities(const std::string& prompt) const;
    std::vector<double> logits(const std::string& prompt) const;
    const std::vector<std::string>& templates() const { return templates_; }

    /// The six default templates: compliant/aligned for each trend, compliant neutral,
    /// missing reasoning, malformed prediction, untagged.
    static std::vector<std::string> default_templates();

private:
    std::size_t template_index(const std::string& completion) const;

    std::vector<std::string> templates_;
    std::map<std::string, std::vector<double>> logits_;
    Xoshiro256 rng_;
};

struct GrpoConfig {
    int group_size = 8;
    int iterations = 200;
    double learning_rate = 0.5;
    double kl_coefficient = 0.0;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GrpoIteration {
    int iteration = 0;
    double mean_reward = 0.0;
    double max_reward = 0.0;
    double diagnostic = 0.0;
};

struct GrpoHistory {
    std::vector<GrpoIteration> iterations;
};

GrpoHistory run_grpo(Policy& policy, std::span<const std::string> prompts, std::span<const TrendLabel> truths,
                     const SentimentScorer& scorer, const GrpoConfig& config);

/// CSV with header iteration,mean_reward,max_reward.
void write_grpo_history(const std::string& path, const GrpoHistory& history);

}  // namespace clickcast
