// Acceptance gate: one PASS/FAIL line per criterion; exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clickcast/data.hpp"
#include "clickcast/embedding.hpp"
#include "clickcast/evalkit.hpp"
#include "clickcast/forecaster.hpp"
#include "clickcast/grpo.hpp"
#include "clickcast/llm_client.hpp"
#include "clickcast/pipeline.hpp"
#include "clickcast/prompt.hpp"
#include "clickcast/random.hpp"
#include "clickcast/reward.hpp"
#include "clickcast/synth.hpp"

using namespace clickcast;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

class FixedScorer final : public SentimentScorer {
public:
    FixedScorer(Sentiment label, double confidence) : result_{label, confidence} {}
    SentimentResult score(std::string_view) const override { return result_; }
    std::string identity() const override { return "fixed"; }

private:
    SentimentResult result_;
};

class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        path_ = fs::temp_directory_path() / ("clickcast-acceptance-" + tag + "-" + std::to_string(std::random_device{}()));
        fs::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

constexpr auto Inc = TrendLabel::Increase;
constexpr auto Dec = TrendLabel::Decrease;
constexpr auto Pos = Sentiment::Positive;
constexpr auto Neg = Sentiment::Negative;
constexpr auto Neu = Sentiment::Neutral;

// ---------------------------------------------------------------------------
// 1. Hand-derived reward cases. Expected totals are worked out by hand from
// format penalty (0 / -0.25 per bad block) + correct-prediction indicator +
// confidence when sentiment agrees with the truth and reasoning is present.

struct GoldenCase {
    const char* raw;
    TrendLabel truth;
    Sentiment sentiment;
    double confidence;
    double expected;
};

const std::string kUp = "<Reasoning> r </Reasoning><Prediction> Increase </Prediction>";
const std::string kDown = "<Reasoning> r </Reasoning><Prediction> Decrease </Prediction>";

const std::vector<GoldenCase>& golden_cases() {
    static const std::vector<GoldenCase> cases = {
        {kUp.c_str(), Inc, Pos, 1.0, 2.0},
        {kUp.c_str(), Inc, Pos, 0.6, 1.6},
        {kUp.c_str(), Inc, Pos, 0.0, 1.0},
        {kUp.c_str(), Inc, Neg, 0.6, 1.0},
        {kUp.c_str(), Inc, Neu, 1.0, 1.0},
        {kUp.c_str(), Inc, Neu, 0.0, 1.0},
        {kUp.c_str(), Dec, Pos, 1.0, 0.0},
        {kUp.c_str(), Dec, Neg, 0.6, 0.6},
        {kUp.c_str(), Dec, Neu, 0.6, 0.0},
        {kDown.c_str(), Dec, Neg, 1.0, 2.0},
        {kDown.c_str(), Dec, Neg, 0.6, 1.6},
        {kDown.c_str(), Dec, Pos, 0.6, 1.0},
        {kDown.c_str(), Inc, Neg, 0.6, 0.0},
        {kDown.c_str(), Inc, Pos, 0.6, 0.6},
        {"<Prediction> Increase </Prediction>", Inc, Pos, 1.0, 0.75},
        {"<Prediction> Decrease </Prediction>", Inc, Neg, 0.6, -0.25},
        {"<Reasoning> r </Reasoning>", Inc, Pos, 0.6, 0.35},
        {"<Reasoning> r </Reasoning>", Dec, Neg, 1.0, 0.75},
        {"<Reasoning> r </Reasoning><Prediction> maybe </Prediction>", Dec, Neg, 0.6, 0.35},
        {"<Reasoning> r </Reasoning><Prediction> maybe </Prediction>", Inc, Neu, 1.0, -0.25},
        {"no tags at all", Inc, Pos, 1.0, -0.5},
        {"no tags at all", Dec, Neg, 0.6, -0.5},
        {"<Prediction> sideways </Prediction>", Dec, Neg, 1.0, -0.5},
        {"<Reasoning> r <Prediction> Decrease </Prediction>", Dec, Neg, 1.0, 0.75},
        {"<reasoning>r</reasoning><prediction>DECREASE</prediction>", Dec, Neg, 0.6, 1.6},
        {"<Reasoning> r </Reasoning><Prediction> Increase", Inc, Pos, 0.6, 0.35},
    };
    return cases;
}

Outcome reward_golden_suite() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    int mismatches = 0;
    for (const auto& c : golden_cases()) {
        const auto r = compute_reward(c.raw, c.truth, FixedScorer(c.sentiment, c.confidence));
        const double err = std::abs(r.total - c.expected);
        worst = std::max(worst, err);
        if (err > 1e-9) ++mismatches;
    }
    const double secs = seconds_since(t0);
    const bool pass = golden_cases().size() >= 20 && mismatches == 0 && secs < 1.0;
    return {pass, fmt("%zu cases, %d mismatches, max |err| %.2e, %.3f s", golden_cases().size(), mismatches, worst, secs)};
}

// ---------------------------------------------------------------------------
// 2. Random response strings built from tag fragments, trend words and noise.

Outcome reward_bounds_fuzz() {
    const auto t0 = Clock::now();
    const std::vector<std::string> pieces = {
        "<Reasoning>", "</Reasoning>", "<Prediction>", "</Prediction>", "<reasoning>", "</PREDICTION>",
        " Increase ", " Decrease ", "increase", "growth", "decline", "drop", "recovery", "removal",
        "clicks", ".", " ", "\n", "<", ">", "/", "maybe", "paused", "upward", "Reasoning", "Prediction"};
    LexiconSentimentScorer lexicon;
    Xoshiro256 rng(20240601);
    int violations = 0;
    double lo = 1e9, hi = -1e9;
    for (int i = 0; i < 10000; ++i) {
        auto noise = [&](int max_pieces) {
            std::string out;
            const int n = static_cast<int>(rng.uniform_int(0, max_pieces));
            for (int j = 0; j < n; ++j) {
                if (rng.bernoulli(0.15)) out += static_cast<char>(rng.uniform_int(32, 126));
                else out += pieces[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pieces.size()) - 1))];
            }
            return out;
        };
        std::string raw;
        if (rng.bernoulli(0.5)) {
            raw = noise(14);
        } else {
            // Mostly well-formed responses with occasional dropped or damaged tags.
            const char* verdicts[] = {"Increase", "Decrease", "increase", "flat"};
            if (!rng.bernoulli(0.1)) raw += "<Reasoning>" + noise(6) + (rng.bernoulli(0.9) ? "</Reasoning>" : "");
            raw += noise(2);
            if (!rng.bernoulli(0.1))
                raw += std::string("<Prediction> ") + verdicts[rng.uniform_int(0, 3)] +
                       (rng.bernoulli(0.9) ? " </Prediction>" : "");
        }
        const auto truth = rng.bernoulli(0.5) ? Inc : Dec;
        const auto r = compute_reward(raw, truth, lexicon);
        lo = std::min(lo, r.total);
        hi = std::max(hi, r.total);
        const bool ok = r.total >= -0.5 && r.total <= 2.0 &&
                        (r.format_score == 0.0 || r.format_score == -0.25 || r.format_score == -0.5) &&
                        r.alignment_term >= 0.0 && r.alignment_term <= 1.0 &&
                        (r.prediction_indicator == 0.0 || r.prediction_indicator == 1.0) &&
                        r.total == r.format_score + r.prediction_indicator + r.alignment_term;
        if (!ok) ++violations;
    }
    const double secs = seconds_since(t0);
    return {violations == 0 && secs < 10.0,
            fmt("10000 strings, %d violations, totals in [%.3f, %.3f], %.2f s", violations, lo, hi, secs)};
}

// ---------------------------------------------------------------------------
// 3. Standardization oracle: long double two-pass mean / population std.

std::vector<double> oracle_advantages(const std::vector<double>& r, double eps) {
    long double mean = 0;
    for (double v : r) mean += v;
    mean /= static_cast<long double>(r.size());
    long double var = 0;
    for (double v : r) var += (v - mean) * (v - mean);
    var /= static_cast<long double>(r.size());
    std::vector<double> out(r.size(), 0.0);
    if (std::all_of(r.begin(), r.end(), [&](double v) { return v == r[0]; })) return out;
    const long double denom = std::sqrt(var) + eps;
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = static_cast<double>((r[i] - mean) / denom);
    return out;
}

Outcome advantage_oracle() {
    const double eps = 1e-8;
    const std::vector<double> lattice = {-0.5, -0.25, 0.0, 0.35, 0.6, 0.75, 1.0, 1.6, 2.0};
    Xoshiro256 rng(77);
    double worst_oracle = 0, worst_mean = 0, worst_scale = 0;
    int scale_checked = 0, degenerate = 0;
    for (int g = 0; g < 1000; ++g) {
        const auto k = static_cast<std::size_t>(rng.uniform_int(2, 16));
        std::vector<double> r(k);
        const bool discrete = rng.bernoulli(0.5);
        for (auto& v : r) {
            v = discrete ? lattice[static_cast<std::size_t>(rng.uniform_int(0, 8))] : rng.uniform(-0.5, 2.0);
        }
        if (g % 50 == 0) std::fill(r.begin(), r.end(), r[0]);
        const auto a = group_advantages(r, eps);
        const auto o = oracle_advantages(r, eps);
        double mean = 0;
        for (std::size_t i = 0; i < k; ++i) {
            worst_oracle = std::max(worst_oracle, std::abs(a[i] - o[i]));
            mean += a[i];
        }
        worst_mean = std::max(worst_mean, std::abs(mean / static_cast<double>(k)));
        if (std::all_of(r.begin(), r.end(), [&](double v) { return v == r[0]; })) ++degenerate;

        auto scaled = r;
        for (auto& v : scaled) v = 2.0 * v + 5.0;
        const auto b = group_advantages(scaled, eps);
        const auto ob = oracle_advantages(scaled, eps);
        for (std::size_t i = 0; i < k; ++i) worst_oracle = std::max(worst_oracle, std::abs(b[i] - ob[i]));
        // Invariance holds up to a relative epsilon / (2 std) effect; compare where that is below 1e-7.
        long double m = 0, s = 0;
        for (double v : r) m += v;
        m /= static_cast<long double>(k);
        for (double v : r) s += (v - m) * (v - m);
        const double sd = static_cast<double>(std::sqrt(s / static_cast<long double>(k)));
        if (sd >= 0.05) {
            ++scale_checked;
            for (std::size_t i = 0; i < k; ++i) worst_scale = std::max(worst_scale, std::abs(a[i] - b[i]));
        }
    }
    const bool pass = worst_oracle <= 1e-9 && worst_mean <= 1e-9 && worst_scale <= 1e-6;
    return {pass, fmt("1000 groups (%d constant), max |a - oracle| %.2e, max |mean| %.2e, "
                      "scale invariance on %d groups max diff %.2e",
                      degenerate, worst_oracle, worst_mean, scale_checked, worst_scale)};
}

// ---------------------------------------------------------------------------
// 4. Toy GRPO on 20 prompts from a generated dataset.

Outcome grpo_toy_improvement() {
    const auto t0 = Clock::now();
    GeneratorConfig g;
    g.base_seed = 11;
    const auto samples = make_samples(generate_dataset(g), 14, 5).samples;
    std::vector<std::string> prompts;
    std::vector<TrendLabel> truths;
    const std::size_t stride = samples.size() / 20;
    for (std::size_t i = 0; i < 20; ++i) {
        const auto& s = samples[i * stride];
        prompts.push_back(build_prompt(s, PromptSpec{}));
        truths.push_back(s.label);
    }
    LexiconSentimentScorer scorer;
    const auto templates = ToyTagPolicy::default_templates();

    // Uniform policy value and best achievable value, by enumerating the templates.
    double initial = 0, best = 0;
    for (auto truth : truths) {
        double sum = 0, mx = -1e9;
        for (const auto& t : templates) {
            const double r = compute_reward(t, truth, scorer).total;
            sum += r;
            mx = std::max(mx, r);
        }
        initial += sum / static_cast<double>(templates.size());
        best += mx;
    }
    initial /= static_cast<double>(truths.size());
    best /= static_cast<double>(truths.size());
    const double target = initial + 0.5 * (best - initial);

    std::string finals;
    bool pass = true;
    for (std::uint64_t seed : {0, 1, 2}) {
        ToyTagPolicy policy(templates, seed);
        GrpoConfig cfg;
        cfg.seed = seed;
        cfg.iterations = 200;
        const auto h = run_grpo(policy, prompts, truths, scorer, cfg);
        double last = 0;
        for (std::size_t i = h.iterations.size() - 10; i < h.iterations.size(); ++i) last += h.iterations[i].mean_reward;
        last /= 10.0;
        pass = pass && last >= target && last > initial;
        finals += fmt("%s%.3f", finals.empty() ? "" : ", ", last);
    }
    const double secs = seconds_since(t0);
    pass = pass && secs < 60.0;
    return {pass, fmt("initial %.4f, max %.4f, target %.4f, final (last-10 mean) per seed [%s], %.2f s", initial, best,
                      target, finals.c_str(), secs)};
}

// ---------------------------------------------------------------------------
// 5. Fusion identity on 100 random inputs with the default architecture.

Outcome fusion_identity() {
    TSFConfig cfg;
    FusionForecaster model(cfg, ForecastMode::Multi, "hashing");
    model.initialize(5);
    HashingEmbedder embedder;
    Xoshiro256 rng(8);
    const std::vector<std::string> words = {"budget", "cut", "keywords", "paused", "bids", "raised", "growth", "assets"};
    std::vector<std::vector<double>> xs;
    std::vector<TextEmbedding> es;
    nn::Matrix fit(100, cfg.embedding_dim);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x(static_cast<std::size_t>(cfg.lookback));
        for (auto& v : x) v = rng.uniform();
        std::string text;
        for (int w = 0; w < 4; ++w) text += words[static_cast<std::size_t>(rng.uniform_int(0, 7))] + " ";
        text += std::to_string(i);
        xs.push_back(std::move(x));
        es.push_back(embedder.embed(text));
        for (int j = 0; j < cfg.embedding_dim; ++j) fit(i, j) = es.back().vector[static_cast<std::size_t>(j)];
    }
    model.fit_text_standardization(fit);

    int exact_failures = 0;
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const auto& x = xs[static_cast<std::size_t>(i)];
        const nn::Matrix xm = Eigen::Map<const nn::Matrix>(x.data(), 1, cfg.lookback);
        const nn::Matrix em = fit.row(i);
        const nn::Matrix numeric = model.numeric_output(xm);
        const nn::Matrix text = model.text_output(em);

        model.set_alpha(0.0);
        const auto p0 = model.predict(x, &es[static_cast<std::size_t>(i)]);
        for (int j = 0; j < cfg.horizon; ++j)
            if (p0[static_cast<std::size_t>(j)] != numeric(0, j)) ++exact_failures;

        model.set_alpha(0.5);
        const auto p5 = model.predict(x, &es[static_cast<std::size_t>(i)]);
        for (int j = 0; j < cfg.horizon; ++j)
            worst = std::max(worst, std::abs(p5[static_cast<std::size_t>(j)] - (numeric(0, j) + 0.5 * text(0, j))));
    }
    return {exact_failures == 0 && worst <= 1e-6,
            fmt("100 inputs, alpha=0 inexact entries %d, alpha=0.5 max |err| %.2e", exact_failures, worst)};
}

// ---------------------------------------------------------------------------
// 6. Central finite differences on a 94-parameter model covering both branches.

Outcome gradient_check() {
    const auto t0 = Clock::now();
    TSFConfig cfg;
    cfg.layers = 1;
    cfg.heads = 1;
    cfg.hidden = 3;
    cfg.ff_dim = 1;
    cfg.lookback = 2;
    cfg.horizon = 1;
    cfg.embedding_dim = 3;
    cfg.text_hidden = {2};
    FusionForecaster model(cfg, ForecastMode::Multi, "test");
    model.initialize(21);
    Xoshiro256 rng(4);
    auto random = [&](Eigen::Index r, Eigen::Index c, double lo, double hi) {
        nn::Matrix m(r, c);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
        return m;
    };
    const nn::Matrix x = random(6, cfg.lookback, 0, 1);
    const nn::Matrix e = random(6, cfg.embedding_dim, -1, 1);
    const nn::Matrix y = random(6, cfg.horizon, 0, 1);
    model.fit_text_standardization(random(10, cfg.embedding_dim, -1, 1));
    // Biases start at zero, which parks ReLU inputs on the kink; evaluate at a generic point instead.
    for (auto* p : model.parameters())
        for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] += rng.uniform(-0.3, 0.3);

    const std::size_t count = model.parameter_count();
    model.loss_and_gradients(x, &e, y);
    const double step = 1e-6;
    const auto text_params = model.text_parameters();
    double worst_numeric = 0, worst_text = 0;
    for (auto* p : model.parameters()) {
        const bool text = std::find(text_params.begin(), text_params.end(), p) != text_params.end();
        for (Eigen::Index i = 0; i < p->value.size(); ++i) {
            double& w = p->value.data()[i];
            const double saved = w;
            w = saved + step;
            const double up = model.loss(x, &e, y);
            w = saved - step;
            const double down = model.loss(x, &e, y);
            w = saved;
            const double fd = (up - down) / (2 * step);
            const double an = p->grad.data()[i];
            const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
            double& worst = text ? worst_text : worst_numeric;
            worst = std::max(worst, rel);
        }
    }
    const double secs = seconds_since(t0);
    const bool pass = count < 100 && worst_numeric < 1e-4 && worst_text < 1e-4 && secs < 30.0;
    return {pass, fmt("%zu parameters, max rel err numeric %.2e, text %.2e, %.2f s", count, worst_numeric, worst_text,
                      secs)};
}

// ---------------------------------------------------------------------------
// Shared data for 7, 8 and 10: the default 20 x 200 synthetic dataset, last two campaigns held out.

struct ComparisonData {
    GeneratorConfig generator;
    std::vector<CampaignRecord> campaigns;
    CampaignSplit split;
    std::vector<ForecastSample> train, test;
};

const ComparisonData& comparison_data() {
    static const ComparisonData data = [] {
        ComparisonData d;
        d.generator.base_seed = 0;
        d.campaigns = generate_dataset(d.generator);
        const std::vector<std::string> test_ids{d.campaigns[18].campaign_id, d.campaigns[19].campaign_id};
        d.split = split_by_campaign(d.campaigns, test_ids);
        d.train = make_samples(d.split.train, 14, 5).samples;
        d.test = make_samples(d.split.test, 14, 5).samples;
        return d;
    }();
    return data;
}

std::vector<RunReport> g_comparison_reports;

// 7. Copy vs Uni vs Multi with mock summaries.

Outcome method_ordering() {
    const auto t0 = Clock::now();
    const auto& d = comparison_data();
    const double share = event_variance_share(d.generator);

    std::vector<ForecastSample> all = d.train;
    all.insert(all.end(), d.test.begin(), d.test.end());
    std::vector<std::string> prompts;
    for (const auto& s : all) prompts.push_back(build_prompt(s, PromptSpec{}));
    MockSummarizer mock;
    const auto summaries = summary_texts(generate_summaries(all, prompts, mock, 1));

    MemoizingEmbedder embedder(std::make_shared<HashingEmbedder>());
    CompareConfig cfg;
    cfg.seeds = {0, 1, 2};
    cfg.methods = {Method::Copy, Method::Uni, Method::MultiSummary};
    cfg.config_fingerprint = "acceptance";
    g_comparison_reports = compare_baselines(d.train, d.test, summaries, embedder, cfg);

    double copy = 0, uni = 0, multi = 0;
    for (const auto& r : g_comparison_reports) {
        if (r.method == "Copy") copy = r.mae_mean;
        if (r.method == "Uni") uni = r.mae_mean;
        if (r.method == "Multi+Summary") multi = r.mae_mean;
    }
    const double gain = (uni - multi) / uni;
    const double secs = seconds_since(t0);
    const bool pass = share >= 0.15 && multi < uni && uni < copy && gain >= 0.02 && secs < 900.0;
    return {pass, fmt("event variance share %.3f, %zu train / %zu test windows, MAE x100 Copy %.3f, Uni %.3f, "
                      "Multi+Summary %.3f, gain %.2f%%, %.0f s",
                      share, d.train.size(), d.test.size(), 100 * copy, 100 * uni, 100 * multi, 100 * gain, secs)};
}

// 8. Copy baseline against windows rebuilt straight from the campaign click series.

Outcome copy_oracle() {
    const auto& d = comparison_data();
    const int l = 14, h = 5;
    long double abs_sum = 0, sq_sum = 0;
    std::size_t n = 0;
    for (const auto& c : d.split.test) {
        const auto& v = c.clicks;
        const int T = static_cast<int>(v.size());
        for (int t = l - 1; t + h < T; ++t) {
            long double m = 0;
            for (int i = t - h + 1; i <= t; ++i) m += v[static_cast<std::size_t>(i)];
            m /= h;
            for (int i = t + 1; i <= t + h; ++i) {
                const long double err = m - v[static_cast<std::size_t>(i)];
                abs_sum += std::abs(err);
                sq_sum += err * err;
                ++n;
            }
        }
    }
    const double oracle_mae = static_cast<double>(abs_sum / n);
    const double oracle_rmse = static_cast<double>(std::sqrt(sq_sum / n));
    const auto m = evaluate_copy(d.test, h);
    const double e1 = std::abs(m.mae - oracle_mae), e2 = std::abs(m.rmse - oracle_rmse);
    return {m.count == n && e1 <= 1e-12 && e2 <= 1e-12,
            fmt("%zu forecast points, |dMAE| %.2e, |dRMSE| %.2e", n, e1, e2)};
}

// 9. Two full pipeline runs with one config into different directories.

RunConfig determinism_config(const fs::path& out) {
    RunConfig c;
    c.output_dir = out.string();
    c.generator.num_campaigns = 6;
    c.generator.days_per_campaign = 60;
    c.grpo.iterations = 20;
    c.grpo_prompts = 6;
    c.forecaster.layers = 1;
    c.forecaster.hidden = 16;
    c.forecaster.ff_dim = 32;
    c.forecaster.text_hidden = {32};
    c.forecaster.epochs = 2;
    c.eval.seeds = 2;
    c.set_seed(3);
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> g_pipeline_reports;

Outcome pipeline_determinism() {
    ScratchDir a("det-a"), b("det-b");
    pipeline_run(determinism_config(a.path()));
    pipeline_run(determinism_config(b.path()));
    const auto ra = slurp(a.path() / "eval" / "report.csv");
    const auto rb = slurp(b.path() / "eval" / "report.csv");
    g_pipeline_reports = {ra, rb};
    const bool same = !ra.empty() && ra == rb;
    return {same, fmt("report.csv %zu bytes each, byte-identical: %s", ra.size(), same ? "yes" : "no")};
}

// 10. MAE <= RMSE for every evaluation run, and zero error on a self-forecast dataset.

Outcome metric_sanity() {
    std::size_t runs = 0, violations = 0;
    auto check = [&](double mae_v, double rmse_v) {
        ++runs;
        if (!(mae_v <= rmse_v)) ++violations;
    };
    for (const auto& r : g_comparison_reports) {
        for (const auto& s : r.per_seed) check(s.mae, s.rmse);
        check(r.mae_mean, r.rmse_mean);
    }
    for (const auto& csv : g_pipeline_reports) {
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::vector<std::string> f;
            std::stringstream ls(line);
            for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
            if (f.size() >= 4 && f[1] != "std") check(std::stod(f[2]), std::stod(f[3]));
        }
    }

    // Constant campaigns: every future equals the recent mean, and a perfect forecast scores zero.
    std::vector<CampaignRecord> flat;
    for (int i = 0; i < 3; ++i)
        flat.push_back(make_campaign("flat" + std::to_string(i), AdType::Search, BiddingStrategy::Cpa,
                                     std::vector<double>(40, 10.0 * (i + 1)), {}));
    const auto samples = make_samples(flat, 14, 5).samples;
    const auto copy = evaluate_copy(samples, 5);
    const auto y = target_matrix(samples);
    const auto self = forecast_metrics(y, y);
    check(copy.mae, copy.rmse);
    check(self.mae, self.rmse);
    const bool zeros = copy.mae == 0.0 && copy.rmse == 0.0 && self.mae == 0.0 && self.rmse == 0.0;
    return {violations == 0 && runs > 10 && zeros,
            fmt("%zu evaluation runs, %zu with MAE > RMSE, self-forecast MAE %g RMSE %g, Copy on constant series "
                "MAE %g RMSE %g",
                runs, violations, self.mae, self.rmse, copy.mae, copy.rmse)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"reward golden suite", reward_golden_suite},
        {"reward bounds fuzz", reward_bounds_fuzz},
        {"GRPO advantage oracle", advantage_oracle},
        {"GRPO toy improvement", grpo_toy_improvement},
        {"fusion identity", fusion_identity},
        {"gradient check", gradient_check},
        {"method ordering Multi < Uni < Copy", method_ordering},
        {"Copy baseline oracle", copy_oracle},
        {"pipeline determinism", pipeline_determinism},
        {"metric sanity", metric_sanity},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures;
}
