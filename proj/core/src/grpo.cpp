#include "clickcast/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace clickcast {

std::vector<double> group_advantages(std::span<const double> rewards, double epsilon) {
    if (rewards.size() < 2) throw std::invalid_argument("group_advantages: need at least 2 rewards");
    for (double r : rewards) {
        if (!std::isfinite(r)) throw std::invalid_argument("group_advantages: non-finite reward");
    }
    std::vector<double> adv(rewards.size(), 0.0);
    // Identical rewards carry no signal; testing equality avoids a rounding-noise mean.
    const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
    if (*lo == *hi) return adv;
    const double n = static_cast<double>(rewards.size());
    const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= n;
    const double denom = std::sqrt(var) + epsilon;
    for (std::size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / denom;
    return adv;
}

ToyTagPolicy::ToyTagPolicy(std::vector<std::string> templates, std::uint64_t seed)
    : templates_(std::move(templates)), rng_(seed) {
    if (templates_.size() < 2) throw std::invalid_argument("ToyTagPolicy: need at least 2 templates");
    if (std::set<std::string>(templates_.begin(), templates_.end()).size() != templates_.size())
        throw std::invalid_argument("ToyTagPolicy: templates must be distinct");
}

std::vector<std::string> ToyTagPolicy::default_templates() {
    return {
        "<Reasoning> Clicks show upward growth and a steady recovery after recent improvements. "
        "</Reasoning><Prediction> Increase </Prediction>",
        "<Reasoning> Clicks decline after the keyword removal and the downward drop continues. "
        "</Reasoning><Prediction> Decrease </Prediction>",
        "<Reasoning> The campaign runs search ads with a fixed bidding strategy. "
        "</Reasoning><Prediction> Increase </Prediction>",
        "<Prediction> Decrease </Prediction>",
        "<Reasoning> Clicks may go either way. </Reasoning><Prediction> Unclear </Prediction>",
        "Clicks will probably rise next week.",
    };
}

void ToyTagPolicy::reseed(std::uint64_t seed) { rng_ = Xoshiro256(seed); }

std::vector<double> ToyTagPolicy::logits(const std::string& prompt) const {
    if (auto it = logits_.find(prompt); it != logits_.end()) return it->second;
    return std::vector<double>(templates_.size(), 0.0);
}

std::vector<double> ToyTagPolicy::probabilities(const std::string& prompt) const {
    auto z = logits(prompt);
    const double mx = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (auto& v : z) {
        v = std::exp(v - mx);
        total += v;
    }
    for (auto& v : z) v /= total;
    return z;
}

std::vector<std::string> ToyTagPolicy::sample(const std::string& prompt, int k) {
    if (k < 1) throw std::invalid_argument("ToyTagPolicy::sample: k must be >= 1");
    const auto p = probabilities(prompt);
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        double u = rng_.uniform();
        std::size_t j = 0;
        for (; j + 1 < p.size(); ++j) {
            if (u < p[j]) break;
            u -= p[j];
        }
        out.push_back(templates_[j]);
    }
    return out;
}

std::size_t ToyTagPolicy::template_index(const std::string& completion) const {
    const auto it = std::find(templates_.begin(), templates_.end(), completion);
    if (it == templates_.end()) throw std::invalid_argument("ToyTagPolicy: completion is not one of its templates");
    return static_cast<std::size_t>(it - templates_.begin());
}

double ToyTagPolicy::update(std::span<const RolloutGroup> groups, const PolicyUpdateOptions& options) {
    double objective = 0.0;
    std::size_t terms = 0;
    for (const auto& g : groups) {
        if (g.completions.size() != g.advantages.size())
            throw std::invalid_argument("ToyTagPolicy::update: advantages not filled");
        const auto p = probabilities(g.prompt);
        std::vector<double> grad(templates_.size(), 0.0);
        const double k = static_cast<double>(g.completions.size());
        for (std::size_t i = 0; i < g.completions.size(); ++i) {
            const auto j = template_index(g.completions[i]);
            const double a = g.advantages[i];
            objective += a * std::log(p[j]);
            ++terms;
            // d/dz log softmax(z)_j = e_j - p
            for (std::size_t m = 0; m < grad.size(); ++m) grad[m] -= a * p[m] / k;
            grad[j] += a / k;
        }
        if (options.learning_rate == 0.0) continue;
        auto& z = logits_.try_emplace(g.prompt, templates_.size(), 0.0).first->second;
        for (std::size_t m = 0; m < z.size(); ++m) z[m] += options.learning_rate * grad[m];
    }
    return terms ? objective / static_cast<double>(terms) : 0.0;
}

std::string ToyTagPolicy::snapshot() const {
    nlohmann::json j;
    j["templates"] = templates_;
    j["logits"] = logits_;
    j["rng"] = rng_.state();
    return j.dump();
}

void ToyTagPolicy::restore(const std::string& snapshot) {
    const auto j = nlohmann::json::parse(snapshot);
    if (j.at("templates").get<std::vector<std::string>>() != templates_)
        throw std::invalid_argument("ToyTagPolicy::restore: snapshot has different templates");
    logits_ = j.at("logits").get<std::map<std::string, std::vector<double>>>();
    rng_.set_state(j.at("rng").get<std::array<std::uint64_t, 4>>());
}

void GrpoConfig::validate() const {
    if (group_size < 2) throw std::invalid_argument("grpo: group size must be >= 2");
    if (iterations < 0) throw std::invalid_argument("grpo: iterations must be >= 0");
    if (!(learning_rate >= 0.0)) throw std::invalid_argument("grpo: learning rate must be >= 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("grpo: epsilon must be > 0");
}

GrpoHistory run_grpo(Policy& policy, std::span<const std::string> prompts, std::span<const TrendLabel> truths,
                     const SentimentScorer& scorer, const GrpoConfig& config) {
    config.validate();
    if (prompts.empty()) throw std::invalid_argument("run_grpo: no prompts");
    if (prompts.size() != truths.size()) throw std::invalid_argument("run_grpo: prompts/truths length mismatch");

    policy.reseed(config.seed);
    const PolicyUpdateOptions opts{config.learning_rate, config.kl_coefficient};
    GrpoHistory history;
    history.iterations.reserve(static_cast<std::size_t>(config.iterations));

    for (int it = 0; it < config.iterations; ++it) {
        std::vector<RolloutGroup> groups;
        groups.reserve(prompts.size());
        double sum = 0.0;
        double best = -std::numeric_limits<double>::infinity();
        std::size_t count = 0;
        for (std::size_t p = 0; p < prompts.size(); ++p) {
            RolloutGroup g;
            g.prompt_id = std::to_string(p);
            g.prompt = prompts[p];
            g.completions = policy.sample(prompts[p], config.group_size);
            g.rewards.reserve(g.completions.size());
            for (const auto& c : g.completions) {
                const double r = compute_reward(c, truths[p], scorer).total;
                g.rewards.push_back(r);
                sum += r;
                best = std::max(best, r);
                ++count;
            }
            g.advantages = group_advantages(g.rewards, config.epsilon);
            groups.push_back(std::move(g));
        }
        const double diag = policy.update(groups, opts);
        history.iterations.push_back({it, sum / static_cast<double>(count), best, diag});
    }
    return history;
}

void write_grpo_history(const std::string& path, const GrpoHistory& history) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "iteration,mean_reward,max_reward\n";
    char buf[128];
    for (const auto& h : history.iterations) {
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g\n", h.iteration, h.mean_reward, h.max_reward);
        out << buf;
    }
}

}  // namespace clickcast
