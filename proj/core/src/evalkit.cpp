#include "clickcast/evalkit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "clickcast/hash.hpp"

namespace clickcast {

using nn::Matrix;

namespace {

void check_lengths(std::span<const double> pred, std::span<const double> truth, const char* what) {
    if (pred.size() != truth.size())
        throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(pred.size()) + " vs " +
                                    std::to_string(truth.size()) + ")");
    if (pred.empty()) throw std::invalid_argument(std::string(what) + ": empty input");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string file_stem(Method m) {
    switch (m) {
        case Method::Copy: return "copy";
        case Method::Uni: return "uni";
        case Method::MultiChangelog: return "multi-changelog";
        case Method::MultiSummary: return "multi-summary";
    }
    return "unknown";
}

}  // namespace

double mae(std::span<const double> pred, std::span<const double> truth) {
    check_lengths(pred, truth, "mae");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - truth[i]);
    return s / static_cast<double>(pred.size());
}

double rmse(std::span<const double> pred, std::span<const double> truth) {
    check_lengths(pred, truth, "rmse");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    return std::sqrt(s / static_cast<double>(pred.size()));
}

ForecastMetrics forecast_metrics(const Matrix& pred, const Matrix& truth) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
        throw std::invalid_argument("forecast_metrics: shape mismatch");
    const std::span<const double> p(pred.data(), static_cast<std::size_t>(pred.size()));
    const std::span<const double> t(truth.data(), static_cast<std::size_t>(truth.size()));
    return {mae(p, t), rmse(p, t), p.size()};
}

ForecastMetrics evaluate_copy(std::span<const ForecastSample> samples, int h) {
    if (samples.empty()) throw std::invalid_argument("evaluate_copy: empty test set");
    Matrix pred(static_cast<nn::Index>(samples.size()), h);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto row = copy_baseline(samples[i].x, h);
        for (int j = 0; j < h; ++j) pred(static_cast<nn::Index>(i), j) = row[static_cast<std::size_t>(j)];
    }
    return forecast_metrics(pred, target_matrix(samples));
}

ForecastMetrics evaluate_model(const FusionForecaster& model, std::span<const ForecastSample> samples,
                               const Matrix* embeddings) {
    if (samples.empty()) throw std::invalid_argument("evaluate_model: empty test set");
    if (model.multimodal() && embeddings == nullptr)
        throw std::invalid_argument("evaluate_model: multimodal model evaluated without summaries");
    const Matrix x = lookback_matrix(samples);
    const Matrix pred = model.predict_batch(x, model.multimodal() ? embeddings : nullptr);
    return forecast_metrics(pred, target_matrix(samples));
}

std::string_view to_string(Method m) {
    switch (m) {
        case Method::Copy: return "Copy";
        case Method::Uni: return "Uni";
        case Method::MultiChangelog: return "Multi+Changelog";
        case Method::MultiSummary: return "Multi+Summary";
    }
    return "?";
}

Method parse_method(std::string_view s) {
    for (Method m : kAllMethods) {
        if (to_string(m) == s || file_stem(m) == s) return m;
    }
    throw std::invalid_argument("unknown method: '" + std::string(s) + "'");
}

RunReport make_report(std::string method, std::vector<SeedMetrics> per_seed, std::size_t sample_count,
                      std::string manifest, std::string config_fingerprint, double scale) {
    if (per_seed.empty()) throw std::invalid_argument("make_report: no runs");
    RunReport r;
    r.method = std::move(method);
    r.scale = scale;
    r.sample_count = sample_count;
    r.sample_manifest = std::move(manifest);
    r.config_fingerprint = std::move(config_fingerprint);
    const double n = static_cast<double>(per_seed.size());
    for (const auto& s : per_seed) {
        r.mae_mean += s.mae;
        r.rmse_mean += s.rmse;
    }
    r.mae_mean /= n;
    r.rmse_mean /= n;
    if (per_seed.size() >= 2) {
        double vm = 0.0, vr = 0.0;
        for (const auto& s : per_seed) {
            vm += (s.mae - r.mae_mean) * (s.mae - r.mae_mean);
            vr += (s.rmse - r.rmse_mean) * (s.rmse - r.rmse_mean);
        }
        r.mae_std = std::sqrt(vm / (n - 1.0));
        r.rmse_std = std::sqrt(vr / (n - 1.0));
    }
    r.per_seed = std::move(per_seed);
    return r;
}

std::string sample_manifest(std::span<const ForecastSample> samples) {
    std::string ids;
    for (const auto& s : samples) ids += s.sample_id + "\n";
    return short_hash(ids);
}

std::map<std::string, std::string> text_inputs(std::span<const ForecastSample> samples, Method method,
                                               const std::map<std::string, std::string>& summaries) {
    std::map<std::string, std::string> out;
    if (method == Method::MultiChangelog) {
        for (const auto& s : samples) out[s.sample_id] = changelog_text(s);
        return out;
    }
    if (method != Method::MultiSummary) return out;
    bool any = false;
    for (const auto& s : samples) {
        if (auto it = summaries.find(s.sample_id); it != summaries.end() && !it->second.empty()) {
            out[s.sample_id] = it->second;
            any = true;
        } else {
            out[s.sample_id] = changelog_text(s);
        }
    }
    if (!any && !samples.empty())
        throw std::invalid_argument("Multi+Summary requires summaries, but none match the evaluated samples");
    return out;
}

std::vector<RunReport> compare_baselines(std::span<const ForecastSample> train, std::span<const ForecastSample> test,
                                         const std::map<std::string, std::string>& summaries, Embedder& embedder,
                                         const CompareConfig& config) {
    if (train.empty() || test.empty()) throw std::invalid_argument("compare_baselines: empty train or test set");
    if (config.seeds.empty()) throw std::invalid_argument("compare_baselines: no seeds");
    config.tsf.validate();
    if (!config.model_dir.empty()) std::filesystem::create_directories(config.model_dir);

    const std::string manifest = sample_manifest(test);
    std::vector<RunReport> reports;
    for (Method method : config.methods) {
        std::vector<SeedMetrics> runs;
        if (method == Method::Copy) {
            const auto m = evaluate_copy(test, config.tsf.horizon);
            runs.push_back({0, m.mae, m.rmse});
            reports.push_back(make_report(std::string(to_string(method)), std::move(runs), test.size(), manifest,
                                          config.config_fingerprint, config.scale));
            continue;
        }
        const bool multi = method != Method::Uni;
        Matrix train_e, test_e;
        if (multi) {
            train_e = embedding_matrix(train, text_inputs(train, method, summaries), embedder);
            test_e = embedding_matrix(test, text_inputs(test, method, summaries), embedder);
        }
        for (std::uint64_t seed : config.seeds) {
            TSFConfig cfg = config.tsf;
            cfg.seed = seed;
            auto trained = train_forecaster(train, multi ? &train_e : nullptr,
                                            multi ? ForecastMode::Multi : ForecastMode::Uni, cfg, embedder.identity());
            trained.model.set_fingerprint(config.config_fingerprint);
            const auto m = evaluate_model(trained.model, test, multi ? &test_e : nullptr);
            runs.push_back({seed, m.mae, m.rmse});
            if (!config.model_dir.empty()) {
                trained.model.save((std::filesystem::path(config.model_dir) /
                                    model_file_name(method, seed))
                                       .string());
            }
        }
        reports.push_back(make_report(std::string(to_string(method)), std::move(runs), test.size(), manifest,
                                      config.config_fingerprint, config.scale));
    }
    return reports;
}

std::string model_file_name(Method method, std::uint64_t seed) {
    return file_stem(method) + "-seed" + std::to_string(seed) + ".bin";
}

std::vector<std::string> train_method_models(Method method, std::span<const ForecastSample> train,
                                             const std::map<std::string, std::string>& summaries, Embedder& embedder,
                                             const CompareConfig& config, const std::string& model_fingerprint) {
    if (method == Method::Copy) return {};
    if (train.empty()) throw std::invalid_argument("train_method_models: empty training set");
    if (config.model_dir.empty()) throw std::invalid_argument("train_method_models: no model directory");
    std::filesystem::create_directories(config.model_dir);
    const bool multi = method != Method::Uni;
    Matrix train_e;
    if (multi) train_e = embedding_matrix(train, text_inputs(train, method, summaries), embedder);
    std::vector<std::string> paths;
    for (std::uint64_t seed : config.seeds) {
        TSFConfig cfg = config.tsf;
        cfg.seed = seed;
        auto trained = train_forecaster(train, multi ? &train_e : nullptr,
                                        multi ? ForecastMode::Multi : ForecastMode::Uni, cfg, embedder.identity());
        trained.model.set_fingerprint(model_fingerprint);
        paths.push_back((std::filesystem::path(config.model_dir) / model_file_name(method, seed)).string());
        trained.model.save(paths.back());
    }
    return paths;
}

RunReport evaluate_method(Method method, std::span<const std::string> model_paths,
                          std::span<const ForecastSample> test, const std::map<std::string, std::string>& summaries,
                          Embedder& embedder, const std::string& config_fingerprint, double scale,
                          const std::string* expected_model_fingerprint) {
    if (test.empty()) throw std::invalid_argument("evaluate_method: empty test set");
    const std::string manifest = sample_manifest(test);
    if (method == Method::Copy) {
        const int h = static_cast<int>(test.front().y.size());
        const auto m = evaluate_copy(test, h);
        return make_report("Copy", {{0, m.mae, m.rmse}}, test.size(), manifest, config_fingerprint, scale);
    }
    if (model_paths.empty()) throw std::invalid_argument("evaluate_method: no models");
    const bool multi = method != Method::Uni;
    const std::string identity = embedder.identity();
    Matrix test_e;
    if (multi) test_e = embedding_matrix(test, text_inputs(test, method, summaries), embedder);
    std::vector<SeedMetrics> runs;
    for (const auto& path : model_paths) {
        auto model = FusionForecaster::load(path, &identity);
        if (model.multimodal() != multi)
            throw std::invalid_argument("evaluate_method: " + path + " is not a " + std::string(to_string(method)) +
                                        " model");
        if (expected_model_fingerprint && model.fingerprint() != *expected_model_fingerprint)
            throw std::runtime_error("model " + path + " has fingerprint '" + model.fingerprint() + "', expected '" +
                                     *expected_model_fingerprint + "'");
        const auto m = evaluate_model(model, test, multi ? &test_e : nullptr);
        runs.push_back({model.config().seed, m.mae, m.rmse});
    }
    return make_report(std::string(to_string(method)), std::move(runs), test.size(), manifest, config_fingerprint,
                       scale);
}

RunReport evaluate_forecaster(std::span<const std::string> model_paths, std::span<const ForecastSample> test,
                              const std::map<std::string, std::string>& summaries, Embedder& embedder,
                              const std::string& config_fingerprint, double scale) {
    if (model_paths.empty()) throw std::invalid_argument("evaluate_forecaster: no models");
    if (test.empty()) throw std::invalid_argument("evaluate_forecaster: empty test set");
    const bool multi = FusionForecaster::load(model_paths.front()).multimodal();
    if (multi && summaries.empty()) throw std::invalid_argument("evaluate_forecaster: multimodal model needs summaries");
    return evaluate_method(multi ? Method::MultiSummary : Method::Uni, model_paths, test, summaries, embedder,
                           config_fingerprint, scale);
}

LlmEvaluation evaluate_llm_responses(std::span<const std::string> responses, std::span<const TrendLabel> truths,
                                     const SentimentScorer& scorer) {
    if (responses.size() != truths.size())
        throw std::invalid_argument("evaluate_llm_responses: responses and truths are not aligned");
    std::vector<RewardBreakdown> rewards;
    rewards.reserve(responses.size());
    for (std::size_t i = 0; i < responses.size(); ++i) rewards.push_back(compute_reward(responses[i], truths[i], scorer));
    const auto agg = aggregate_rewards(rewards);
    return {agg.count, agg.mean_prediction_match, agg.mean_total};
}

std::string report_csv(std::span<const RunReport> reports) {
    std::ostringstream out;
    out << "method,seed,mae,rmse,samples,scale,sample_manifest,config_fingerprint\n";
    auto row = [&](const RunReport& r, const std::string& seed, double m, double s) {
        out << r.method << ',' << seed << ',' << fmt(m) << ',' << fmt(s) << ',' << r.sample_count << ','
            << fmt(r.scale) << ',' << r.sample_manifest << ',' << r.config_fingerprint << '\n';
    };
    for (const auto& r : reports) {
        for (const auto& s : r.per_seed) row(r, std::to_string(s.seed), s.mae, s.rmse);
        row(r, "mean", r.mae_mean, r.rmse_mean);
        if (r.mae_std) row(r, "std", *r.mae_std, *r.rmse_std);
    }
    return out.str();
}

void write_report_csv(const std::string& path, std::span<const RunReport> reports) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << report_csv(reports);
}

std::string format_report_table(std::span<const RunReport> reports) {
    std::ostringstream out;
    const double scale = reports.empty() ? 100.0 : reports.front().scale;
    char buf[160];
    char mae_head[32], rmse_head[32];
    std::snprintf(mae_head, sizeof mae_head, "MAE (x%g)", scale);
    std::snprintf(rmse_head, sizeof rmse_head, "RMSE (x%g)", scale);
    std::snprintf(buf, sizeof buf, "%-18s %-20s %s\n", "Method", mae_head, rmse_head);
    out << buf;
    for (const auto& r : reports) {
        auto cell = [&](double mean, const std::optional<double>& sd) {
            char c[64];
            if (sd) std::snprintf(c, sizeof c, "%.3f +- %.3f", mean * r.scale, *sd * r.scale);
            else std::snprintf(c, sizeof c, "%.3f", mean * r.scale);
            return std::string(c);
        };
        std::snprintf(buf, sizeof buf, "%-18s %-20s %s\n", r.method.c_str(), cell(r.mae_mean, r.mae_std).c_str(),
                      cell(r.rmse_mean, r.rmse_std).c_str());
        out << buf;
    }
    out << "(" << (reports.empty() ? 0 : reports.front().sample_count)
        << " test samples; element-level errors over all horizon steps)\n";
    return out.str();
}

}  // namespace clickcast
