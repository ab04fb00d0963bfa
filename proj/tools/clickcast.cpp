// clickcast command-line tool.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clickcast/data.hpp"
#include "clickcast/evalkit.hpp"
#include "clickcast/forecaster.hpp"
#include "clickcast/grpo.hpp"
#include "clickcast/llm_client.hpp"
#include "clickcast/pipeline.hpp"
#include "clickcast/prompt.hpp"
#include "clickcast/reward.hpp"
#include "clickcast/synth.hpp"
#include "clickcast/transport.hpp"

namespace fs = std::filesystem;
using namespace clickcast;

namespace {

// Optional flag values; only flags the user actually passed override the config.
template <typename T>
void override_with(const std::optional<T>& flag, T& target) {
    if (flag) target = *flag;
}

struct Split {
    std::vector<ForecastSample> all, train, test;
};

Split load_split(const RunConfig& cfg, const std::string& data_path) {
    const auto campaigns = read_dataset(data_path, cfg.generator.rolling_window);
    const int l = cfg.forecaster.lookback;
    const int h = cfg.forecaster.horizon;
    std::vector<std::string> test_ids = cfg.eval.test_ids;
    if (test_ids.empty()) {
        const int n = static_cast<int>(campaigns.size());
        if (cfg.eval.test_campaigns < 1 || cfg.eval.test_campaigns >= n)
            throw std::invalid_argument("--test-campaigns must leave at least one training campaign");
        for (int i = n - cfg.eval.test_campaigns; i < n; ++i) test_ids.push_back(campaigns[static_cast<std::size_t>(i)].campaign_id);
    }
    const auto split = split_by_campaign(campaigns, test_ids);
    return {make_samples(campaigns, l, h).samples, make_samples(split.train, l, h).samples,
            make_samples(split.test, l, h).samples};
}

std::map<std::string, std::string> load_summaries(const std::string& path) {
    if (path.empty()) return {};
    const auto records = read_summaries(path);
    return summary_texts(records);
}

std::vector<std::uint64_t> seed_list(std::uint64_t base, int n) {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < n; ++i) out.push_back(base + static_cast<std::uint64_t>(i));
    return out;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clickcast: click forecasting with change-log summaries"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    std::string config_path;
    app.add_option("--config", config_path, "Run configuration JSON; flags override its keys")->check(CLI::ExistingFile);

    // Shared overrides.
    std::optional<std::uint64_t> seed;
    std::optional<int> campaigns, days, lookback, horizon, epochs, batch, eval_seeds, test_campaigns;
    std::optional<double> event_rate, effect_scale, noise, alpha, lr;
    std::string data_path, summaries_path, prompts_path, out_path;

    auto add_data_flags = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "Global seed");
        sub->add_option("--lookback", lookback, "Lookback window l");
        sub->add_option("--horizon", horizon, "Forecast horizon h");
    };
    auto add_gen_flags = [&](CLI::App* sub) {
        sub->add_option("--campaigns", campaigns, "Number of campaigns");
        sub->add_option("--days", days, "Days per campaign");
        sub->add_option("--event-rate", event_rate, "Expected change events per day");
        sub->add_option("--effect-scale", effect_scale, "Multiplier on change-event effects");
        sub->add_option("--noise", noise, "Relative daily noise");
    };
    auto add_train_flags = [&](CLI::App* sub) {
        sub->add_option("--alpha", alpha, "Fusion weight of the text branch");
        sub->add_option("--epochs", epochs, "Training epochs");
        sub->add_option("--batch-size", batch, "Minibatch size");
        sub->add_option("--lr", lr, "Adam learning rate");
        sub->add_option("--test-campaigns", test_campaigns, "Hold out the last N campaigns");
    };

    auto* gen = app.add_subcommand("generate-data", "Generate a synthetic campaign dataset (JSONL)");
    add_data_flags(gen);
    add_gen_flags(gen);
    gen->add_option("--out", out_path, "Output dataset path")->required();

    auto* prompts_cmd = app.add_subcommand("build-prompts", "Render forecasting prompts for every window");
    add_data_flags(prompts_cmd);
    prompts_cmd->add_option("--data", data_path, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    prompts_cmd->add_option("--out", out_path, "Output prompts JSONL")->required();

    bool mock = false;
    std::string endpoint, llm_model = "default", cache_dir;
    int concurrency = 4;
    auto* summarize = app.add_subcommand("summarize", "Produce textual summaries (mock or external LLM)");
    add_data_flags(summarize);
    summarize->add_option("--data", data_path, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    summarize->add_option("--prompts", prompts_path, "Prompts JSONL (rebuilt from the data when omitted)");
    summarize->add_option("--out", out_path, "Output summaries JSONL")->required();
    auto* mock_flag = summarize->add_flag("--mock", mock, "Use the deterministic mock summarizer");
    auto* endpoint_opt = summarize->add_option("--endpoint", endpoint,
                                               "Chat-completions base URL (default: $CLICKCAST_LLM_ENDPOINT)");
    mock_flag->excludes(endpoint_opt);
    summarize->add_option("--model", llm_model, "Model name sent to the endpoint");
    summarize->add_option("--concurrency", concurrency, "Parallel requests")->check(CLI::PositiveNumber);
    summarize->add_option("--cache", cache_dir, "Response cache directory");

    std::string positive_lex, negative_lex;
    bool no_alignment = false;
    auto* score = app.add_subcommand("score", "Score summaries with the reward function");
    add_data_flags(score);
    score->add_option("--data", data_path, "Dataset JSONL (ground-truth labels)")->required()->check(CLI::ExistingFile);
    score->add_option("--summaries", summaries_path, "Summaries JSONL")->required()->check(CLI::ExistingFile);
    score->add_option("--out", out_path, "Per-sample reward CSV");
    score->add_option("--positive-lexicon", positive_lex, "Positive word list")->check(CLI::ExistingFile);
    score->add_option("--negative-lexicon", negative_lex, "Negative word list")->check(CLI::ExistingFile);
    score->add_flag("--no-alignment", no_alignment, "Drop the sentiment alignment term");

    std::optional<int> group_size, iterations, num_prompts;
    std::optional<double> grpo_lr;
    auto* grpo = app.add_subcommand("train-grpo-toy", "Run group-relative policy optimization on the toy policy");
    grpo->add_option("--seed", seed, "Seed");
    grpo->add_option("--prompts", prompts_path, "Prompts JSONL")->required()->check(CLI::ExistingFile);
    grpo->add_option("--num-prompts", num_prompts, "Prompts used for training");
    grpo->add_option("--group-size", group_size, "Completions per prompt");
    grpo->add_option("--iterations", iterations, "Training iterations");
    grpo->add_option("--lr", grpo_lr, "Policy learning rate");
    grpo->add_option("--out", out_path, "History CSV")->required();

    std::string mode = "uni", text_kind = "summary";
    auto* train = app.add_subcommand("train-forecaster", "Train a numeric-only or fused forecaster");
    add_data_flags(train);
    add_train_flags(train);
    train->add_option("--data", data_path, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    train->add_option("--summaries", summaries_path, "Summaries JSONL (multi mode)");
    train->add_option("--mode", mode, "uni | multi")->check(CLI::IsMember({"uni", "multi"}));
    train->add_option("--text", text_kind, "Text input for multi mode: summary | changelog")
        ->check(CLI::IsMember({"summary", "changelog"}));
    train->add_option("--out", out_path, "Model file")->required();

    std::vector<std::string> model_paths;
    std::string method_name;
    auto* evaluate = app.add_subcommand("evaluate", "Evaluate saved models on the held-out campaigns");
    add_data_flags(evaluate);
    evaluate->add_option("--test-campaigns", test_campaigns, "Hold out the last N campaigns");
    evaluate->add_option("--model", model_paths, "Model file; repeat per seed or use {seed} in the path");
    evaluate->add_option("--method", method_name, "Copy | Uni | Multi+Changelog | Multi+Summary (default: inferred)");
    evaluate->add_option("--data", data_path, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--summaries", summaries_path, "Summaries JSONL");
    evaluate->add_option("--seeds", eval_seeds, "Number of seeds for {seed} expansion");
    evaluate->add_option("--out", out_path, "Report CSV");

    auto* compare = app.add_subcommand("compare-baselines", "Train and evaluate Copy, Uni and both Multi variants");
    add_data_flags(compare);
    add_train_flags(compare);
    compare->add_option("--data", data_path, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    compare->add_option("--summaries", summaries_path, "Summaries JSONL (default: mock summaries)");
    compare->add_option("--seeds", eval_seeds, "Number of training seeds");
    compare->add_option("--out", out_path, "Report CSV")->required();

    bool print_config = false;
    auto* pipe = app.add_subcommand("pipeline", "Run the full cached stage pipeline");
    add_data_flags(pipe);
    add_gen_flags(pipe);
    add_train_flags(pipe);
    pipe->add_option("--data", data_path, "Ingest this dataset instead of generating one")->check(CLI::ExistingFile);
    pipe->add_option("--seeds", eval_seeds, "Number of evaluation seeds");
    pipe->add_option("--out", out_path, "Output directory");
    pipe->add_flag("--print-config", print_config, "Print the resolved configuration and exit");

    CLI11_PARSE(app, argc, argv);

    std::string stage = app.get_subcommands().front()->get_name();
    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
        if (seed) cfg.set_seed(*seed);
        override_with(campaigns, cfg.generator.num_campaigns);
        override_with(days, cfg.generator.days_per_campaign);
        override_with(event_rate, cfg.generator.event_rate);
        override_with(effect_scale, cfg.generator.effect_scale);
        override_with(noise, cfg.generator.noise_std);
        if (lookback) cfg.generator.lookback = cfg.prompt.lookback = cfg.forecaster.lookback = *lookback;
        if (horizon) cfg.generator.horizon = cfg.prompt.horizon = cfg.forecaster.horizon = *horizon;
        override_with(alpha, cfg.forecaster.alpha);
        override_with(epochs, cfg.forecaster.epochs);
        override_with(batch, cfg.forecaster.batch_size);
        override_with(lr, cfg.forecaster.learning_rate);
        override_with(eval_seeds, cfg.eval.seeds);
        override_with(test_campaigns, cfg.eval.test_campaigns);
        override_with(group_size, cfg.grpo.group_size);
        override_with(iterations, cfg.grpo.iterations);
        override_with(grpo_lr, cfg.grpo.learning_rate);
        override_with(num_prompts, cfg.grpo_prompts);
        if (!positive_lex.empty() || !negative_lex.empty()) {
            cfg.reward.positive_lexicon = positive_lex;
            cfg.reward.negative_lexicon = negative_lex;
        }
        if (no_alignment) cfg.reward.sentiment_alignment = false;
        cfg.validate();

        if (*gen) {
            const auto ds = generate_dataset(cfg.generator);
            write_dataset(out_path, ds);
            const auto st = dataset_statistics(ds);
            std::printf("wrote %zu campaigns, %zu days (%.1f%% with changes, %zu events) to %s\n", st.campaigns,
                        st.total_days, 100.0 * st.change_fraction(), st.total_events, out_path.c_str());
            std::printf("event variance share: %.3f\n", event_variance_share(cfg.generator));
        } else if (*prompts_cmd) {
            const auto split = load_split(cfg, data_path);
            write_prompts(out_path, build_prompts(split.all, cfg.prompt));
            std::printf("wrote %zu prompts to %s\n", split.all.size(), out_path.c_str());
        } else if (*summarize) {
            const auto split = load_split(cfg, data_path);
            std::vector<std::string> texts;
            if (prompts_path.empty()) {
                for (const auto& p : build_prompts(split.all, cfg.prompt)) texts.push_back(p.prompt);
            } else {
                std::map<std::string, std::string> by_id;
                for (const auto& p : read_prompts(prompts_path)) by_id[p.sample_id] = p.prompt;
                for (const auto& s : split.all) {
                    auto it = by_id.find(s.sample_id);
                    if (it == by_id.end()) throw std::runtime_error("no prompt for sample " + s.sample_id);
                    texts.push_back(it->second);
                }
            }
            std::unique_ptr<Summarizer> summarizer;
            if (mock || (endpoint.empty() && !env_value("CLICKCAST_LLM_ENDPOINT"))) {
                if (!mock) std::fprintf(stderr, "no endpoint configured; using the mock summarizer\n");
                summarizer = std::make_unique<MockSummarizer>();
            } else {
                std::shared_ptr<Transport> transport;
                if (!endpoint.empty()) {
                    std::map<std::string, std::string> headers;
                    if (auto key = env_value("CLICKCAST_LLM_API_KEY")) headers["Authorization"] = "Bearer " + *key;
                    transport = std::make_shared<HttpTransport>(endpoint, headers, RetryPolicy{}, concurrency);
                } else {
                    transport = transport_from_env("CLICKCAST_LLM");
                }
                auto client = std::make_shared<ChatClient>(transport, llm_model);
                summarizer = std::make_unique<ExternalSummarizer>(
                    client, std::make_shared<ChatFormatter>(client),
                    cache_dir.empty() ? fs::path(out_path).parent_path() / "llm-cache" : fs::path(cache_dir));
            }
            const auto records = generate_summaries(split.all, texts, *summarizer, concurrency);
            write_summaries(out_path, records);
            std::size_t flagged = 0;
            for (const auto& r : records) flagged += r.flag.empty() ? 0 : 1;
            std::printf("wrote %zu summaries (%zu flagged) to %s\n", records.size(), flagged, out_path.c_str());
        } else if (*score) {
            const auto split = load_split(cfg, data_path);
            std::map<std::string, TrendLabel> labels;
            for (const auto& s : split.all) labels[s.sample_id] = s.label;
            const auto scorer = make_sentiment_scorer(cfg.reward);
            RewardOptions opts;
            opts.sentiment_alignment = cfg.reward.sentiment_alignment;
            std::vector<RewardBreakdown> rewards;
            std::ofstream csv;
            if (!out_path.empty()) {
                csv.open(out_path, std::ios::binary | std::ios::trunc);
                if (!csv) throw std::runtime_error("cannot write " + out_path);
                csv << "sample_id,format_score,prediction_indicator,alignment_term,total\n";
            }
            for (const auto& r : read_summaries(summaries_path)) {
                auto it = labels.find(r.sample_id);
                if (it == labels.end()) throw std::runtime_error("summary for unknown sample " + r.sample_id);
                rewards.push_back(compute_reward(r.response_text, it->second, *scorer, opts));
                const auto& b = rewards.back();
                if (csv.is_open())
                    csv << r.sample_id << ',' << b.format_score << ',' << b.prediction_indicator << ','
                        << b.alignment_term << ',' << b.total << '\n';
            }
            const auto agg = aggregate_rewards(rewards);
            std::printf("responses: %zu\nmean prediction match: %.4f\nmean reward: %.4f\n", agg.count,
                        agg.mean_prediction_match, agg.mean_total);
        } else if (*grpo) {
            const auto prompts = read_prompts(prompts_path);
            if (prompts.empty()) throw std::invalid_argument("prompt file is empty");
            const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg.grpo_prompts), prompts.size());
            std::vector<std::string> texts;
            std::vector<TrendLabel> truths;
            for (std::size_t i = 0; i < k; ++i) {
                const auto& p = prompts[i * prompts.size() / k];
                texts.push_back(p.prompt);
                truths.push_back(p.label);
            }
            const auto scorer = make_sentiment_scorer(cfg.reward);
            ToyTagPolicy policy(ToyTagPolicy::default_templates(), cfg.grpo.seed);
            const auto history = run_grpo(policy, texts, truths, *scorer, cfg.grpo);
            write_grpo_history(out_path, history);
            if (!history.iterations.empty())
                std::printf("mean reward: first %.4f, last %.4f over %zu iterations\n",
                            history.iterations.front().mean_reward, history.iterations.back().mean_reward,
                            history.iterations.size());
        } else if (*train) {
            const auto split = load_split(cfg, data_path);
            const bool multi = mode == "multi";
            auto embedder = make_embedder(cfg.embedder);
            std::map<std::string, std::string> texts;
            if (multi) {
                const auto method = text_kind == "summary" ? Method::MultiSummary : Method::MultiChangelog;
                texts = text_inputs(split.train, method, load_summaries(summaries_path));
            }
            auto trained = train_forecaster(split.train, texts, multi ? ForecastMode::Multi : ForecastMode::Uni,
                                            cfg.forecaster, embedder.get());
            trained.model.set_fingerprint(cfg.fingerprint());
            trained.model.save(out_path);
            std::printf("trained %s model on %zu windows; final loss %.6f; saved %s\n", mode.c_str(),
                        split.train.size(),
                        trained.history.epoch_loss.empty() ? 0.0 : trained.history.epoch_loss.back(),
                        out_path.c_str());
        } else if (*evaluate) {
            const auto split = load_split(cfg, data_path);
            auto embedder = make_embedder(cfg.embedder);
            std::vector<std::string> paths;
            for (const auto& p : model_paths) {
                if (p.find("{seed}") == std::string::npos) {
                    paths.push_back(p);
                    continue;
                }
                for (auto s : seed_list(cfg.seed, cfg.eval.seeds)) paths.push_back(replace_all(p, "{seed}", std::to_string(s)));
            }
            const auto summaries = load_summaries(summaries_path);
            RunReport report;
            if (!method_name.empty()) {
                report = evaluate_method(parse_method(method_name), paths, split.test, summaries, *embedder,
                                         cfg.fingerprint(), cfg.eval.scale);
            } else if (paths.empty()) {
                report = evaluate_method(Method::Copy, paths, split.test, summaries, *embedder, cfg.fingerprint(),
                                         cfg.eval.scale);
            } else {
                report = evaluate_forecaster(paths, split.test, summaries, *embedder, cfg.fingerprint(), cfg.eval.scale);
            }
            const std::vector<RunReport> reports{report};
            if (!out_path.empty()) write_report_csv(out_path, reports);
            std::printf("%s", format_report_table(reports).c_str());
        } else if (*compare) {
            const auto split = load_split(cfg, data_path);
            auto summaries = load_summaries(summaries_path);
            if (summaries.empty()) {
                for (const auto& s : split.all) summaries[s.sample_id] = mock_summary(s);
            }
            auto embedder = make_embedder(cfg.embedder);
            CompareConfig cc;
            cc.tsf = cfg.forecaster;
            cc.seeds = seed_list(cfg.seed, cfg.eval.seeds);
            cc.methods.clear();
            for (const auto& m : cfg.eval.methods) cc.methods.push_back(parse_method(m));
            cc.scale = cfg.eval.scale;
            cc.config_fingerprint = cfg.fingerprint();
            const auto reports = compare_baselines(split.train, split.test, summaries, *embedder, cc);
            write_report_csv(out_path, reports);
            std::printf("%s", format_report_table(reports).c_str());
        } else if (*pipe) {
            if (!out_path.empty()) cfg.output_dir = out_path;
            if (!data_path.empty()) cfg.data_path = data_path;
            cfg.validate();
            if (print_config) {
                std::printf("%s\nfingerprint: %s\n", cfg.to_json_string().c_str(), cfg.fingerprint().c_str());
                return 0;
            }
            const auto manifest = pipeline_run(cfg, &std::cout);
            std::printf("manifest: %s (config %s)\n", (fs::path(cfg.output_dir) / "manifest.json").string().c_str(),
                        manifest.config_fingerprint.c_str());
            const fs::path table = fs::path(cfg.output_dir) / "eval/table.txt";
            if (fs::exists(table)) {
                std::ifstream in(table);
                std::cout << in.rdbuf();
            }
        }
    } catch (const StageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error [%s]: %s\n", stage.c_str(), e.what());
        return 1;
    }
    return 0;
}
