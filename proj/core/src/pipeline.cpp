#include "clickcast/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "clickcast/data.hpp"
#include "clickcast/hash.hpp"
#include "clickcast/llm_client.hpp"
#include "clickcast/transport.hpp"
#include "config_json.hpp"
#include "json.hpp"

namespace clickcast {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

json to_json(const RewardSettings& r) {
    return {{"sentiment", r.sentiment},
            {"positive_lexicon", r.positive_lexicon},
            {"negative_lexicon", r.negative_lexicon},
            {"sentiment_model", r.sentiment_model},
            {"sentiment_alignment", r.sentiment_alignment}};
}

RewardSettings reward_from_json(const json& j, RewardSettings r) {
    detail::reject_unknown_keys(
        j, {"sentiment", "positive_lexicon", "negative_lexicon", "sentiment_model", "sentiment_alignment"}, "reward");
    get_if(j, "sentiment", r.sentiment);
    get_if(j, "positive_lexicon", r.positive_lexicon);
    get_if(j, "negative_lexicon", r.negative_lexicon);
    get_if(j, "sentiment_model", r.sentiment_model);
    get_if(j, "sentiment_alignment", r.sentiment_alignment);
    return r;
}

json to_json(const SummarizerSettings& s) {
    return {{"mode", s.mode},
            {"endpoint", s.endpoint},
            {"model", s.model},
            {"max_concurrency", s.max_concurrency},
            {"external_reformat", s.external_reformat}};
}

SummarizerSettings summarizer_from_json(const json& j, SummarizerSettings s) {
    detail::reject_unknown_keys(j, {"mode", "endpoint", "model", "max_concurrency", "external_reformat"},
                                "summarizer");
    get_if(j, "mode", s.mode);
    get_if(j, "endpoint", s.endpoint);
    get_if(j, "model", s.model);
    get_if(j, "max_concurrency", s.max_concurrency);
    get_if(j, "external_reformat", s.external_reformat);
    return s;
}

json to_json(const EmbedderSettings& e) {
    return {{"kind", e.kind}, {"seed", e.seed}, {"endpoint", e.endpoint}, {"model", e.model}};
}

EmbedderSettings embedder_from_json(const json& j, EmbedderSettings e) {
    detail::reject_unknown_keys(j, {"kind", "seed", "endpoint", "model"}, "embedder");
    get_if(j, "kind", e.kind);
    get_if(j, "seed", e.seed);
    get_if(j, "endpoint", e.endpoint);
    get_if(j, "model", e.model);
    return e;
}

json to_json(const EvalSettings& e) {
    return {{"seeds", e.seeds},
            {"test_campaigns", e.test_campaigns},
            {"test_ids", e.test_ids},
            {"methods", e.methods},
            {"scale", e.scale}};
}

EvalSettings eval_from_json(const json& j, EvalSettings e) {
    detail::reject_unknown_keys(j, {"seeds", "test_campaigns", "test_ids", "methods", "scale"}, "eval");
    get_if(j, "seeds", e.seeds);
    get_if(j, "test_campaigns", e.test_campaigns);
    get_if(j, "test_ids", e.test_ids);
    get_if(j, "methods", e.methods);
    get_if(j, "scale", e.scale);
    return e;
}

json config_json(const RunConfig& c, bool with_output_dir) {
    json j = {{"seed", c.seed},
              {"data_path", c.data_path},
              {"generator", detail::to_json(c.generator)},
              {"prompt", detail::to_json(c.prompt)},
              {"reward", to_json(c.reward)},
              {"summarizer", to_json(c.summarizer)},
              {"embedder", to_json(c.embedder)},
              {"grpo", detail::to_json(c.grpo)},
              {"grpo_prompts", c.grpo_prompts},
              {"forecaster", detail::to_json(c.forecaster)},
              {"eval", to_json(c.eval)}};
    if (with_output_dir) j["output_dir"] = c.output_dir;
    return j;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, p);
}

std::string stage_fingerprint(const std::string& name, std::initializer_list<std::string> parts) {
    std::string s = name;
    for (const auto& p : parts) s += "\n" + p;
    return short_hash(s);
}

std::shared_ptr<Transport> make_transport(const std::string& endpoint, const std::string& env_prefix,
                                          const char* what) {
    if (!endpoint.empty()) {
        std::map<std::string, std::string> headers;
        if (auto key = env_value(env_prefix + "_API_KEY")) headers["Authorization"] = "Bearer " + *key;
        return std::make_shared<HttpTransport>(endpoint, std::move(headers));
    }
    auto t = transport_from_env(env_prefix);
    if (!t) throw std::invalid_argument(std::string(what) + ": no endpoint configured (set " + env_prefix + "_ENDPOINT)");
    return std::shared_ptr<Transport>(std::move(t));
}

/// Executes or skips stages and keeps manifest.json current.
class StageRunner {
public:
    StageRunner(fs::path out, std::string config_fp, std::ostream* log) : out_(std::move(out)), log_(log) {
        manifest_.config_fingerprint = std::move(config_fp);
        const fs::path mp = out_ / "manifest.json";
        if (fs::exists(mp)) {
            try {
                previous_ = Manifest::from_json_string(read_file(mp));
            } catch (const std::exception&) {
                previous_.reset();  // unreadable manifest: recompute everything
            }
        }
    }

    template <typename Body>
    const StageRecord& run(const std::string& name, const std::string& fingerprint, Body&& body) {
        if (const StageRecord* prev = cached(name, fingerprint)) {
            manifest_.stages.push_back(*prev);
            manifest_.stages.back().executed = false;
            say(name + ": cached (" + fingerprint + ")");
            return manifest_.stages.back();
        }
        StageRecord rec;
        rec.name = name;
        rec.fingerprint = fingerprint;
        rec.executed = true;
        manifest_.stages.push_back(rec);
        say(name + ": running (" + fingerprint + ")");
        std::vector<std::string> paths;
        try {
            paths = body();
            for (const auto& p : paths) manifest_.stages.back().artifacts.push_back({p, sha256_hex(read_file(out_ / p))});
        } catch (const StageError&) {
            save();
            throw;
        } catch (const std::exception& e) {
            save();
            throw StageError(name, e.what());
        }
        manifest_.stages.back().complete = true;
        save();
        return manifest_.stages.back();
    }

    const fs::path& out() const { return out_; }
    Manifest take() { return std::move(manifest_); }

private:
    const StageRecord* cached(const std::string& name, const std::string& fingerprint) const {
        if (!previous_) return nullptr;
        const StageRecord* prev = previous_->find(name);
        if (!prev || !prev->complete || prev->fingerprint != fingerprint) return nullptr;
        for (const auto& a : prev->artifacts) {
            const fs::path p = out_ / a.path;
            if (!fs::exists(p) || sha256_hex(read_file(p)) != a.sha256) return nullptr;
        }
        return prev;
    }

    void save() const { write_file(out_ / "manifest.json", manifest_.to_json_string()); }

    void say(const std::string& msg) const {
        if (log_) *log_ << msg << '\n';
    }

    fs::path out_;
    std::ostream* log_;
    Manifest manifest_;
    std::optional<Manifest> previous_;
};

std::vector<std::string> test_campaign_ids(const RunConfig& c, std::span<const CampaignRecord> campaigns) {
    if (!c.eval.test_ids.empty()) return c.eval.test_ids;
    const auto n = static_cast<int>(campaigns.size());
    if (c.eval.test_campaigns < 1 || c.eval.test_campaigns >= n)
        throw std::invalid_argument("eval.test_campaigns must leave at least one training campaign");
    std::vector<std::string> ids;
    for (int i = n - c.eval.test_campaigns; i < n; ++i) ids.push_back(campaigns[static_cast<std::size_t>(i)].campaign_id);
    return ids;
}

}  // namespace

void RunConfig::validate() const {
    generator.validate();
    prompt.validate();
    grpo.validate();
    forecaster.validate();
    if (generator.lookback != forecaster.lookback || prompt.lookback != forecaster.lookback)
        throw std::invalid_argument("run config: generator, prompt and forecaster lookback must agree");
    if (generator.horizon != forecaster.horizon || prompt.horizon != forecaster.horizon)
        throw std::invalid_argument("run config: generator, prompt and forecaster horizon must agree");
    if (reward.sentiment != "lexicon" && reward.sentiment != "external")
        throw std::invalid_argument("run config: reward.sentiment must be lexicon or external");
    if (reward.positive_lexicon.empty() != reward.negative_lexicon.empty())
        throw std::invalid_argument("run config: give both lexicon files or neither");
    if (summarizer.mode != "mock" && summarizer.mode != "external")
        throw std::invalid_argument("run config: summarizer.mode must be mock or external");
    if (summarizer.max_concurrency < 1) throw std::invalid_argument("run config: summarizer.max_concurrency must be >= 1");
    if (embedder.kind != "hashing" && embedder.kind != "external")
        throw std::invalid_argument("run config: embedder.kind must be hashing or external");
    if (eval.seeds < 1) throw std::invalid_argument("run config: eval.seeds must be >= 1");
    if (!(eval.scale > 0.0)) throw std::invalid_argument("run config: eval.scale must be > 0");
    if (eval.methods.empty()) throw std::invalid_argument("run config: eval.methods is empty");
    for (const auto& m : eval.methods) parse_method(m);
    if (grpo_prompts < 1) throw std::invalid_argument("run config: grpo_prompts must be >= 1");
    if (output_dir.empty()) throw std::invalid_argument("run config: output_dir is empty");
}

std::string RunConfig::canonical_json() const { return config_json(*this, false).dump(); }

std::string RunConfig::fingerprint() const { return short_hash(canonical_json()); }

std::string RunConfig::to_json_string() const { return config_json(*this, true).dump(2); }

void RunConfig::set_seed(std::uint64_t s) {
    seed = s;
    generator.base_seed = s;
    grpo.seed = s;
    forecaster.seed = s;
}

RunConfig RunConfig::from_json(const std::string& text) {
    const json j = json::parse(text);
    detail::reject_unknown_keys(j,
                                {"seed", "output_dir", "data_path", "generator", "prompt", "reward", "summarizer",
                                 "embedder", "grpo", "grpo_prompts", "forecaster", "eval"},
                                "run config");
    RunConfig c;
    if (j.contains("seed")) c.set_seed(j.at("seed").get<std::uint64_t>());
    get_if(j, "output_dir", c.output_dir);
    get_if(j, "data_path", c.data_path);
    get_if(j, "grpo_prompts", c.grpo_prompts);
    if (j.contains("generator")) c.generator = detail::generator_config_from_json(j.at("generator"), c.generator);
    if (j.contains("prompt")) c.prompt = detail::prompt_spec_from_json(j.at("prompt"), c.prompt);
    if (j.contains("reward")) c.reward = reward_from_json(j.at("reward"), c.reward);
    if (j.contains("summarizer")) c.summarizer = summarizer_from_json(j.at("summarizer"), c.summarizer);
    if (j.contains("embedder")) c.embedder = embedder_from_json(j.at("embedder"), c.embedder);
    if (j.contains("grpo")) c.grpo = detail::grpo_config_from_json(j.at("grpo"), c.grpo);
    if (j.contains("forecaster")) c.forecaster = detail::tsf_config_from_json(j.at("forecaster"), c.forecaster);
    if (j.contains("eval")) c.eval = eval_from_json(j.at("eval"), c.eval);
    c.validate();
    return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
    try {
        return from_json(read_file(path));
    } catch (const json::exception& e) {
        throw std::invalid_argument("config " + path + ": " + e.what());
    }
}

const StageRecord* Manifest::find(const std::string& name) const {
    for (const auto& s : stages) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::string Manifest::to_json_string() const {
    json stages_j = json::array();
    for (const auto& s : stages) {
        json arts = json::array();
        for (const auto& a : s.artifacts) arts.push_back({{"path", a.path}, {"sha256", a.sha256}});
        stages_j.push_back({{"name", s.name}, {"fingerprint", s.fingerprint}, {"complete", s.complete}, {"artifacts", arts}});
    }
    return json{{"config_fingerprint", config_fingerprint}, {"stages", stages_j}}.dump(2) + "\n";
}

Manifest Manifest::from_json_string(const std::string& text) {
    const json j = json::parse(text);
    Manifest m;
    m.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    for (const auto& s : j.at("stages")) {
        StageRecord r;
        r.name = s.at("name").get<std::string>();
        r.fingerprint = s.at("fingerprint").get<std::string>();
        r.complete = s.at("complete").get<bool>();
        for (const auto& a : s.at("artifacts"))
            r.artifacts.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>()});
        m.stages.push_back(std::move(r));
    }
    return m;
}

std::unique_ptr<Embedder> make_embedder(const EmbedderSettings& settings, const std::string& cache_dir) {
    if (settings.kind == "hashing") return std::make_unique<HashingEmbedder>(settings.seed);
    if (settings.kind == "external") {
        auto inner = std::make_shared<ExternalEmbedder>(
            make_transport(settings.endpoint, "CLICKCAST_EMBED", "embedder"), settings.model,
            cache_dir.empty() ? fs::path("clickcast-embedding-cache") : fs::path(cache_dir));
        return std::make_unique<MemoizingEmbedder>(std::move(inner));
    }
    throw std::invalid_argument("unknown embedder kind: '" + settings.kind + "'");
}

std::unique_ptr<SentimentScorer> make_sentiment_scorer(const RewardSettings& settings) {
    if (settings.sentiment == "external")
        return std::make_unique<ExternalSentimentScorer>(make_transport("", "CLICKCAST_SENTIMENT", "sentiment scorer"),
                                                         settings.sentiment_model);
    if (settings.sentiment != "lexicon")
        throw std::invalid_argument("unknown sentiment scorer: '" + settings.sentiment + "'");
    if (settings.positive_lexicon.empty()) return std::make_unique<LexiconSentimentScorer>();
    return std::make_unique<LexiconSentimentScorer>(
        LexiconSentimentScorer::from_files(settings.positive_lexicon, settings.negative_lexicon));
}

Manifest pipeline_run(const RunConfig& config, std::ostream* log) {
    config.validate();
    const fs::path out = config.output_dir;
    fs::create_directories(out);
    const std::string config_fp = config.fingerprint();
    write_file(out / "config.json", config.to_json_string() + "\n");
    StageRunner runner(out, config_fp, log);

    const int l = config.forecaster.lookback;
    const int h = config.forecaster.horizon;
    const std::string dataset_rel = "data/dataset.jsonl";

    // Inputs loaded lazily so cached stages cost nothing.
    std::optional<std::vector<CampaignRecord>> campaigns;
    auto get_campaigns = [&]() -> const std::vector<CampaignRecord>& {
        if (!campaigns) campaigns = read_dataset((out / dataset_rel).string(), config.generator.rolling_window);
        return *campaigns;
    };
    std::optional<std::vector<ForecastSample>> all_samples, train_samples, test_samples;
    auto load_samples = [&] {
        if (all_samples) return;
        const auto& cs = get_campaigns();
        all_samples = make_samples(cs, l, h).samples;
        const auto split = split_by_campaign(cs, test_campaign_ids(config, cs));
        train_samples = make_samples(split.train, l, h).samples;
        test_samples = make_samples(split.test, l, h).samples;
        if (train_samples->empty() || test_samples->empty())
            throw std::invalid_argument("campaign split leaves no train or no test windows");
    };

    // 1. generate | ingest
    std::string data_fp;
    if (config.data_path.empty()) {
        const std::string gen = detail::to_json(config.generator).dump();
        data_fp = runner
                      .run("generate", stage_fingerprint("generate", {gen}),
                           [&] {
                               campaigns = generate_dataset(config.generator);
                               fs::create_directories((out / dataset_rel).parent_path());
                               write_dataset((out / dataset_rel).string(), *campaigns);
                               return std::vector<std::string>{dataset_rel};
                           })
                      .fingerprint;
    } else {
        if (!fs::exists(config.data_path)) throw StageError("ingest", "data file not found: " + config.data_path);
        const std::string content_hash = sha256_hex(read_file(config.data_path));
        data_fp = runner
                      .run("ingest",
                           stage_fingerprint("ingest",
                                             {content_hash, std::to_string(config.generator.rolling_window)}),
                           [&] {
                               campaigns = read_dataset(config.data_path, config.generator.rolling_window);
                               fs::create_directories((out / dataset_rel).parent_path());
                               write_dataset((out / dataset_rel).string(), *campaigns);
                               return std::vector<std::string>{dataset_rel};
                           })
                      .fingerprint;
    }

    // 2. prompts
    const std::string prompts_rel = "prompts/prompts.jsonl";
    const std::string prompts_fp =
        runner
            .run("prompts", stage_fingerprint("prompts", {data_fp, detail::to_json(config.prompt).dump()}),
                 [&] {
                     load_samples();
                     fs::create_directories((out / prompts_rel).parent_path());
                     write_prompts((out / prompts_rel).string(), build_prompts(*all_samples, config.prompt));
                     return std::vector<std::string>{prompts_rel};
                 })
            .fingerprint;

    // 3. summaries
    const std::string summaries_rel = "summaries/summaries.jsonl";
    json summarizer_key = to_json(config.summarizer);
    summarizer_key.erase("max_concurrency");
    const std::string summaries_fp =
        runner
            .run("summaries", stage_fingerprint("summaries", {prompts_fp, summarizer_key.dump()}),
                 [&] {
                     load_samples();
                     const auto prompts = read_prompts((out / prompts_rel).string());
                     if (prompts.size() != all_samples->size())
                         throw std::runtime_error("prompt file does not match the dataset windows");
                     std::vector<std::string> texts;
                     texts.reserve(prompts.size());
                     for (std::size_t i = 0; i < prompts.size(); ++i) {
                         if (prompts[i].sample_id != (*all_samples)[i].sample_id)
                             throw std::runtime_error("prompt file order does not match the dataset windows");
                         texts.push_back(prompts[i].prompt);
                     }
                     std::unique_ptr<Summarizer> summarizer;
                     if (config.summarizer.mode == "mock") {
                         summarizer = std::make_unique<MockSummarizer>();
                     } else {
                         auto client = std::make_shared<ChatClient>(
                             make_transport(config.summarizer.endpoint, "CLICKCAST_LLM", "summarizer"),
                             config.summarizer.model);
                         std::shared_ptr<ResponseFormatter> formatter;
                         if (config.summarizer.external_reformat) formatter = std::make_shared<ChatFormatter>(client);
                         summarizer = std::make_unique<ExternalSummarizer>(client, formatter, out / "cache" / "llm");
                     }
                     const auto records =
                         generate_summaries(*all_samples, texts, *summarizer, config.summarizer.max_concurrency);
                     fs::create_directories((out / summaries_rel).parent_path());
                     write_summaries((out / summaries_rel).string(), records);
                     return std::vector<std::string>{summaries_rel};
                 })
            .fingerprint;

    const auto scorer = make_sentiment_scorer(config.reward);
    const std::string reward_key = to_json(config.reward).dump() + "|" + scorer->identity();

    // 4. score
    runner.run("score", stage_fingerprint("score", {summaries_fp, reward_key}), [&] {
        load_samples();
        std::map<std::string, TrendLabel> labels;
        for (const auto& s : *all_samples) labels[s.sample_id] = s.label;
        const auto records = read_summaries((out / summaries_rel).string());
        RewardOptions opts;
        opts.sentiment_alignment = config.reward.sentiment_alignment;
        std::ostringstream csv;
        csv << "sample_id,format_score,prediction_indicator,alignment_term,total\n";
        std::vector<RewardBreakdown> rewards;
        for (const auto& r : records) {
            const auto it = labels.find(r.sample_id);
            if (it == labels.end()) throw std::runtime_error("summary for unknown sample " + r.sample_id);
            const auto b = compute_reward(r.response_text, it->second, *scorer, opts);
            rewards.push_back(b);
            char row[160];
            std::snprintf(row, sizeof row, ",%.17g,%.17g,%.17g,%.17g\n", b.format_score, b.prediction_indicator,
                          b.alignment_term, b.total);
            csv << r.sample_id << row;
        }
        const auto agg = aggregate_rewards(rewards);
        write_file(out / "scores/scores.csv", csv.str());
        write_file(out / "scores/aggregate.json",
                   json{{"count", agg.count},
                        {"mean_prediction_match", agg.mean_prediction_match},
                        {"mean_reward", agg.mean_total},
                        {"config_fingerprint", config_fp}}
                           .dump(2) +
                       "\n");
        return std::vector<std::string>{"scores/scores.csv", "scores/aggregate.json"};
    });

    // 5. grpo (toy policy)
    runner.run("grpo",
               stage_fingerprint("grpo", {prompts_fp, detail::to_json(config.grpo).dump(),
                                          std::to_string(config.grpo_prompts), reward_key}),
               [&] {
                   load_samples();
                   const auto prompts = read_prompts((out / prompts_rel).string());
                   std::map<std::string, const PromptRecord*> by_id;
                   for (const auto& p : prompts) by_id[p.sample_id] = &p;
                   std::vector<std::string> texts;
                   std::vector<TrendLabel> truths;
                   const std::size_t n = train_samples->size();
                   const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(config.grpo_prompts), n);
                   for (std::size_t i = 0; i < k; ++i) {
                       const auto& s = (*train_samples)[i * n / k];
                       const auto it = by_id.find(s.sample_id);
                       if (it == by_id.end()) throw std::runtime_error("no prompt for sample " + s.sample_id);
                       texts.push_back(it->second->prompt);
                       truths.push_back(it->second->label);
                   }
                   ToyTagPolicy policy(ToyTagPolicy::default_templates(), config.grpo.seed);
                   const auto history = run_grpo(policy, texts, truths, *scorer, config.grpo);
                   fs::create_directories(out / "grpo");
                   write_grpo_history((out / "grpo/history.csv").string(), history);
                   write_file(out / "grpo/policy.json", policy.snapshot() + "\n");
                   return std::vector<std::string>{"grpo/history.csv", "grpo/policy.json"};
               });

    // 6. train
    auto embedder = make_embedder(config.embedder, (out / "cache" / "embeddings").string());
    CompareConfig cc;
    cc.tsf = config.forecaster;
    cc.seeds.clear();
    for (int i = 0; i < config.eval.seeds; ++i) cc.seeds.push_back(config.seed + static_cast<std::uint64_t>(i));
    cc.methods.clear();
    for (const auto& m : config.eval.methods) cc.methods.push_back(parse_method(m));
    cc.scale = config.eval.scale;
    cc.config_fingerprint = config_fp;
    cc.model_dir = (out / "models").string();

    std::optional<std::map<std::string, std::string>> summaries;
    auto get_summaries = [&]() -> const std::map<std::string, std::string>& {
        if (!summaries) {
            const auto records = read_summaries((out / summaries_rel).string());
            summaries = summary_texts(records);
        }
        return *summaries;
    };

    json train_key = {{"forecaster", detail::to_json(config.forecaster)},
                      {"seeds", cc.seeds},
                      {"methods", config.eval.methods},
                      {"test_ids", config.eval.test_ids},
                      {"test_campaigns", config.eval.test_campaigns},
                      {"embedder", embedder->identity()}};
    const std::string train_fp =
        runner
            .run("train", stage_fingerprint("train", {data_fp, summaries_fp, train_key.dump()}),
                 [&] {
                     load_samples();
                     std::vector<std::string> rel;
                     const std::string fp = stage_fingerprint("train", {data_fp, summaries_fp, train_key.dump()});
                     for (Method m : cc.methods) {
                         for (const auto& p :
                              train_method_models(m, *train_samples, get_summaries(), *embedder, cc, fp))
                             rel.push_back(fs::relative(p, out).generic_string());
                     }
                     return rel;
                 })
            .fingerprint;

    // 7. evaluate
    runner.run("evaluate", stage_fingerprint("evaluate", {train_fp, config_fp}), [&] {
        load_samples();
        std::vector<RunReport> reports;
        for (Method m : cc.methods) {
            std::vector<std::string> paths;
            if (m != Method::Copy) {
                for (auto s : cc.seeds) paths.push_back((out / "models" / model_file_name(m, s)).string());
            }
            reports.push_back(evaluate_method(m, paths, *test_samples, get_summaries(), *embedder, config_fp,
                                              config.eval.scale, &train_fp));
        }
        fs::create_directories(out / "eval");
        write_report_csv((out / "eval/report.csv").string(), reports);
        write_file(out / "eval/table.txt", format_report_table(reports));
        return std::vector<std::string>{"eval/report.csv", "eval/table.txt"};
    });

    return runner.take();
}

}  // namespace clickcast
