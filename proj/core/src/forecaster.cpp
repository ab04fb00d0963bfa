#include "clickcast/forecaster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "config_json.hpp"
#include "json.hpp"

namespace clickcast {

using nn::Index;
using nn::Matrix;

namespace {

constexpr char kMagic[8] = {'C', 'L', 'K', 'C', 'A', 'S', 'T', '1'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little, "model format assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("model file truncated");
    return v;
}

}  // namespace

struct FusionForecaster::NumericCache {
    Matrix tokens;  // (n*l) x 1 raw values
    std::vector<nn::EncoderLayer::Cache> layers;
    Matrix flat;    // n x (l*hidden)
};

struct FusionForecaster::TextCache {
    std::vector<Matrix> inputs;  // input to each linear layer
    std::vector<Matrix> pre;     // pre-activation of each hidden layer
};

void TSFConfig::validate() const {
    if (layers < 1) throw std::invalid_argument("tsf config: layers must be >= 1");
    if (heads < 1 || hidden < 1 || hidden % heads != 0)
        throw std::invalid_argument("tsf config: hidden must be divisible by heads");
    if (ff_dim < 1) throw std::invalid_argument("tsf config: ff_dim must be >= 1");
    if (lookback < 1 || horizon < 1) throw std::invalid_argument("tsf config: lookback and horizon must be >= 1");
    if (embedding_dim < 1) throw std::invalid_argument("tsf config: embedding_dim must be >= 1");
    for (int h : text_hidden) {
        if (h < 1) throw std::invalid_argument("tsf config: text hidden sizes must be >= 1");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("tsf config: alpha must be in [0,1]");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("tsf config: dropout must be in [0,1)");
    if (lr_schedule != "cosine" && lr_schedule != "constant")
        throw std::invalid_argument("tsf config: lr_schedule must be cosine or constant");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("tsf config: learning rate must be > 0");
    if (epochs < 0 || batch_size < 1) throw std::invalid_argument("tsf config: bad epochs/batch size");
}

std::string_view to_string(ForecastMode m) { return m == ForecastMode::Uni ? "uni" : "multi"; }

ForecastMode parse_forecast_mode(std::string_view s) {
    if (s == "uni") return ForecastMode::Uni;
    if (s == "multi") return ForecastMode::Multi;
    throw std::invalid_argument("unknown forecaster mode: '" + std::string(s) + "' (expected uni|multi)");
}

FusionForecaster::FusionForecaster(const TSFConfig& config, ForecastMode mode, std::string embedder_identity)
    : config_(config), mode_(mode), embedder_identity_(std::move(embedder_identity)) {
    config_.validate();
    const Index d = config_.hidden;
    input_proj_ = nn::Linear("numeric.input", 1, d);
    positions_ = nn::sinusoidal_encoding(config_.lookback, d);
    for (int i = 0; i < config_.layers; ++i) {
        encoder_.emplace_back("numeric.encoder" + std::to_string(i), d, config_.heads, config_.ff_dim);
    }
    head_ = nn::Linear("numeric.head", static_cast<Index>(config_.lookback) * d, config_.horizon);
    if (multimodal()) {
        Index in = config_.embedding_dim;
        for (std::size_t i = 0; i < config_.text_hidden.size(); ++i) {
            text_layers_.emplace_back("text.fc" + std::to_string(i), in, config_.text_hidden[i]);
            in = config_.text_hidden[i];
        }
        text_layers_.emplace_back("text.out", in, config_.horizon);
        text_shift_ = {"text.input_shift", Matrix::Zero(1, config_.embedding_dim), Matrix::Zero(1, config_.embedding_dim)};
        text_scale_ = {"text.input_scale", Matrix::Ones(1, config_.embedding_dim), Matrix::Zero(1, config_.embedding_dim)};
    }
    initialize(config_.seed);
}

void FusionForecaster::set_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");
    config_.alpha = alpha;
}

void FusionForecaster::initialize(std::uint64_t seed) {
    Xoshiro256 rng(mix_seed(seed, 0xF0CA57ULL));
    input_proj_.init(rng);
    for (auto& layer : encoder_) layer.init(rng);
    head_.init(rng);
    for (auto& layer : text_layers_) layer.init(rng);
}

void FusionForecaster::fit_text_standardization(const Matrix& embeddings) {
    if (!multimodal()) throw std::invalid_argument("forecaster: numeric-only model has no text branch");
    if (embeddings.rows() < 1 || embeddings.cols() != config_.embedding_dim)
        throw std::invalid_argument("forecaster: embedding matrix has wrong shape");
    const Eigen::RowVectorXd mean = embeddings.colwise().mean();
    const Eigen::RowVectorXd sd =
        ((embeddings.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(embeddings.rows())).sqrt();
    text_shift_.value = mean;
    text_scale_.value = sd.unaryExpr([](double s) { return s > 1e-8 ? 1.0 / s : 1.0; });
}

void FusionForecaster::check_inputs(const Matrix& x, const Matrix* embeddings) const {
    if (x.cols() != config_.lookback)
        throw std::invalid_argument("forecaster: input has " + std::to_string(x.cols()) +
                                    " columns, expected lookback " + std::to_string(config_.lookback));
    if (multimodal()) {
        if (embeddings == nullptr) throw std::invalid_argument("forecaster: multimodal model needs embeddings");
        if (embeddings->rows() != x.rows() || embeddings->cols() != config_.embedding_dim)
            throw std::invalid_argument("forecaster: embedding matrix has wrong shape");
    }
}

Matrix FusionForecaster::numeric_forward(const Matrix& x, NumericCache* cache, Xoshiro256* dropout_rng) const {
    const Index n = x.rows();
    const Index l = config_.lookback;
    const Index d = config_.hidden;
    // Row-major n x l is laid out exactly like (n*l) x 1.
    Matrix tokens = Eigen::Map<const Matrix>(x.data(), n * l, 1);
    Matrix h = input_proj_.forward(tokens);
    for (Index b = 0; b < n; ++b) h.block(b * l, 0, l, d) += positions_;
    if (cache) cache->layers.resize(encoder_.size());
    for (std::size_t i = 0; i < encoder_.size(); ++i) {
        h = encoder_[i].forward(h, n, l, config_.dropout, dropout_rng, cache ? &cache->layers[i] : nullptr);
    }
    Matrix flat = Eigen::Map<const Matrix>(h.data(), n, l * d);
    Matrix out = head_.forward(flat);
    if (cache) {
        cache->tokens = std::move(tokens);
        cache->flat = std::move(flat);
    }
    return out;
}

void FusionForecaster::numeric_backward(const Matrix& dout, const NumericCache& cache) {
    const Index n = dout.rows();
    const Index l = config_.lookback;
    const Index d = config_.hidden;
    const Matrix dflat = head_.backward(cache.flat, dout);
    Matrix dh = Eigen::Map<const Matrix>(dflat.data(), n * l, d);
    for (std::size_t i = encoder_.size(); i-- > 0;) dh = encoder_[i].backward(dh, n, l, cache.layers[i]);
    input_proj_.backward(cache.tokens, dh);
}

Matrix FusionForecaster::text_forward(const Matrix& e, TextCache* cache) const {
    Matrix h = (e.rowwise() - text_shift_.value.row(0)).array().rowwise() * text_scale_.value.row(0).array();
    for (std::size_t i = 0; i < text_layers_.size(); ++i) {
        if (cache) cache->inputs.push_back(h);
        Matrix z = text_layers_[i].forward(h);
        if (i + 1 < text_layers_.size()) {
            h = nn::relu(z);
            if (cache) cache->pre.push_back(std::move(z));
        } else {
            h = std::move(z);
        }
    }
    return h;
}

void FusionForecaster::text_backward(const Matrix& dout, const TextCache& cache) {
    Matrix d = dout;
    for (std::size_t i = text_layers_.size(); i-- > 0;) {
        if (i + 1 < text_layers_.size()) d.array() *= (cache.pre[i].array() > 0.0).cast<double>();
        d = text_layers_[i].backward(cache.inputs[i], d);
    }
}

Matrix FusionForecaster::numeric_output(const Matrix& x) const {
    if (x.cols() != config_.lookback) throw std::invalid_argument("forecaster: input width != lookback");
    return numeric_forward(x, nullptr, nullptr);
}

Matrix FusionForecaster::text_output(const Matrix& embeddings) const {
    if (!multimodal()) throw std::invalid_argument("forecaster: numeric-only model has no text branch");
    if (embeddings.cols() != config_.embedding_dim)
        throw std::invalid_argument("forecaster: embedding matrix has wrong width");
    return text_forward(embeddings, nullptr);
}

Matrix FusionForecaster::predict_batch(const Matrix& x, const Matrix* embeddings) const {
    check_inputs(x, embeddings);
    Matrix out = numeric_forward(x, nullptr, nullptr);
    if (multimodal() && config_.alpha != 0.0) out += config_.alpha * text_forward(*embeddings, nullptr);
    return out;
}

std::vector<double> FusionForecaster::predict(std::span<const double> x, const TextEmbedding* embedding) const {
    if (x.size() != static_cast<std::size_t>(config_.lookback))
        throw std::invalid_argument("predict: input length " + std::to_string(x.size()) + " != lookback " +
                                    std::to_string(config_.lookback));
    if (multimodal() != (embedding != nullptr))
        throw std::invalid_argument(multimodal() ? "predict: multimodal model needs a summary embedding"
                                                 : "predict: numeric-only model takes no embedding");
    Matrix xm = Eigen::Map<const Matrix>(x.data(), 1, config_.lookback);
    Matrix em;
    if (embedding) {
        if (embedding->vector.size() != static_cast<std::size_t>(config_.embedding_dim))
            throw std::invalid_argument("predict: embedding has wrong dimension");
        em.resize(1, config_.embedding_dim);
        for (Index i = 0; i < em.cols(); ++i) em(0, i) = embedding->vector[static_cast<std::size_t>(i)];
    }
    const Matrix out = predict_batch(xm, embedding ? &em : nullptr);
    return {out.data(), out.data() + out.size()};
}

double FusionForecaster::loss(const Matrix& x, const Matrix* embeddings, const Matrix& y) const {
    const Matrix pred = predict_batch(x, embeddings);
    if (pred.rows() != y.rows() || pred.cols() != y.cols()) throw std::invalid_argument("loss: target shape mismatch");
    return (pred - y).squaredNorm() / static_cast<double>(y.size());
}

double FusionForecaster::loss_and_gradients(const Matrix& x, const Matrix* embeddings, const Matrix& y,
                                            Xoshiro256* dropout_rng) {
    check_inputs(x, embeddings);
    if (y.rows() != x.rows() || y.cols() != config_.horizon) throw std::invalid_argument("loss: target shape mismatch");
    for (auto* p : parameters()) p->zero_grad();

    NumericCache ncache;
    Matrix pred = numeric_forward(x, &ncache, dropout_rng);
    TextCache tcache;
    const bool use_text = multimodal();
    if (use_text) pred += config_.alpha * text_forward(*embeddings, &tcache);

    const Matrix diff = pred - y;
    const double count = static_cast<double>(y.size());
    const Matrix dpred = (2.0 / count) * diff;
    numeric_backward(dpred, ncache);
    if (use_text) text_backward(config_.alpha * dpred, tcache);
    return diff.squaredNorm() / count;
}

nn::ParameterList FusionForecaster::numeric_parameters() {
    nn::ParameterList out;
    input_proj_.collect(out);
    for (auto& layer : encoder_) layer.collect(out);
    head_.collect(out);
    return out;
}

nn::ParameterList FusionForecaster::text_parameters() {
    nn::ParameterList out;
    for (auto& layer : text_layers_) layer.collect(out);
    return out;
}

nn::ParameterList FusionForecaster::stored_tensors() {
    auto out = parameters();
    if (multimodal()) {
        out.push_back(&text_shift_);
        out.push_back(&text_scale_);
    }
    return out;
}

nn::ParameterList FusionForecaster::parameters() {
    auto out = numeric_parameters();
    auto text = text_parameters();
    out.insert(out.end(), text.begin(), text.end());
    return out;
}

std::size_t FusionForecaster::parameter_count() {
    std::size_t n = 0;
    for (auto* p : parameters()) n += static_cast<std::size_t>(p->value.size());
    return n;
}

void FusionForecaster::save(const std::string& path) {
    nlohmann::json header;
    header["format"] = "clickcast-forecaster";
    header["version"] = kFormatVersion;
    header["mode"] = to_string(mode_);
    header["config"] = detail::to_json(config_);
    header["embedder"] = embedder_identity_;
    header["fingerprint"] = fingerprint_;
    nlohmann::json shapes = nlohmann::json::array();
    const auto params = stored_tensors();
    for (auto* p : params) shapes.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
    header["parameters"] = shapes;
    const std::string text = header.dump();

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out.write(kMagic, sizeof kMagic);
        write_pod(out, kFormatVersion);
        write_pod(out, static_cast<std::uint64_t>(text.size()));
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        for (auto* p : params) {
            out.write(reinterpret_cast<const char*>(p->value.data()),
                      static_cast<std::streamsize>(p->value.size() * sizeof(double)));
        }
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::rename(tmp.c_str(), path.c_str());
}

FusionForecaster FusionForecaster::load(const std::string& path, const std::string* expected_embedder) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model: " + path);
    char magic[sizeof kMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw std::runtime_error("not a clickcast model: " + path);
    const auto version = read_pod<std::uint32_t>(in);
    if (version != kFormatVersion)
        throw std::runtime_error("unsupported model format version " + std::to_string(version));
    const auto header_len = read_pod<std::uint64_t>(in);
    if (header_len > (1u << 26)) throw std::runtime_error("model header too large");
    std::string text(header_len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw std::runtime_error("model file truncated");
    const auto header = nlohmann::json::parse(text);

    FusionForecaster model(detail::tsf_config_from_json(header.at("config")),
                           parse_forecast_mode(header.at("mode").get<std::string>()),
                           header.at("embedder").get<std::string>());
    model.fingerprint_ = header.value("fingerprint", "");
    if (model.multimodal() && expected_embedder && *expected_embedder != model.embedder_identity_)
        throw std::runtime_error("model was trained with embedder '" + model.embedder_identity_ +
                                 "' but '" + *expected_embedder + "' was supplied");

    const auto params = model.stored_tensors();
    const auto& shapes = header.at("parameters");
    if (shapes.size() != params.size()) throw std::runtime_error("model parameter table does not match config");
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto* p = params[i];
        if (shapes[i].at("name").get<std::string>() != p->name || shapes[i].at("rows").get<Index>() != p->value.rows() ||
            shapes[i].at("cols").get<Index>() != p->value.cols())
            throw std::runtime_error("model parameter '" + p->name + "' has unexpected shape");
        in.read(reinterpret_cast<char*>(p->value.data()), static_cast<std::streamsize>(p->value.size() * sizeof(double)));
        if (!in) throw std::runtime_error("model file truncated");
    }
    return model;
}

Matrix lookback_matrix(std::span<const ForecastSample> samples) {
    if (samples.empty()) return {};
    const auto l = static_cast<Index>(samples.front().x.size());
    Matrix x(static_cast<Index>(samples.size()), l);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (static_cast<Index>(samples[i].x.size()) != l) throw std::invalid_argument("samples have mixed lookbacks");
        x.row(static_cast<Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(samples[i].x.data(), l);
    }
    return x;
}

Matrix target_matrix(std::span<const ForecastSample> samples) {
    if (samples.empty()) return {};
    const auto h = static_cast<Index>(samples.front().y.size());
    Matrix y(static_cast<Index>(samples.size()), h);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (static_cast<Index>(samples[i].y.size()) != h) throw std::invalid_argument("samples have mixed horizons");
        y.row(static_cast<Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(samples[i].y.data(), h);
    }
    return y;
}

Matrix embedding_matrix(std::span<const ForecastSample> samples, const std::map<std::string, std::string>& texts,
                        Embedder& embedder) {
    Matrix e(static_cast<Index>(samples.size()), static_cast<Index>(kEmbeddingDim));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto it = texts.find(samples[i].sample_id);
        if (it == texts.end()) throw std::invalid_argument("no text for sample " + samples[i].sample_id);
        const auto emb = embedder.embed(it->second);
        if (emb.vector.size() != kEmbeddingDim) throw std::runtime_error("embedder returned wrong dimension");
        for (Index j = 0; j < e.cols(); ++j) e(static_cast<Index>(i), j) = emb.vector[static_cast<std::size_t>(j)];
    }
    return e;
}

TrainedForecaster train_forecaster(std::span<const ForecastSample> samples, const Matrix* embeddings,
                                   ForecastMode mode, const TSFConfig& config, const std::string& embedder_identity) {
    config.validate();
    if (samples.empty()) throw std::invalid_argument("train_forecaster: empty training set");
    if (mode == ForecastMode::Multi && embeddings == nullptr)
        throw std::invalid_argument("train_forecaster: multi mode needs summary embeddings");

    const Matrix x = lookback_matrix(samples);
    const Matrix y = target_matrix(samples);
    if (x.cols() != config.lookback || y.cols() != config.horizon)
        throw std::invalid_argument("train_forecaster: sample shapes do not match config");
    if (embeddings && (embeddings->rows() != x.rows() || embeddings->cols() != config.embedding_dim))
        throw std::invalid_argument("train_forecaster: embedding matrix shape mismatch");

    TrainedForecaster result{FusionForecaster(config, mode, mode == ForecastMode::Multi ? embedder_identity : ""), {}};
    auto& model = result.model;
    if (mode == ForecastMode::Multi) model.fit_text_standardization(*embeddings);
    nn::Adam optimizer(model.parameters(), config.learning_rate);
    Xoshiro256 shuffle_rng(mix_seed(config.seed, 0x5AFF1EULL));
    Xoshiro256 dropout_rng(mix_seed(config.seed, 0xD80Bu));
    Xoshiro256* drop = config.dropout > 0.0 ? &dropout_rng : nullptr;

    const Index n = x.rows();
    const Index bs = std::min<Index>(config.batch_size, n);
    std::vector<Index> order(static_cast<std::size_t>(n));
    Matrix xb, yb, eb;
    const Index batches_per_epoch = (n + bs - 1) / bs;
    const double total_steps = static_cast<double>(batches_per_epoch) * config.epochs;
    long step = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), Index{0});
        for (std::size_t i = order.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(order[i - 1], order[j]);
        }
        double total = 0.0;
        for (Index start = 0; start < n; start += bs) {
            const Index m = std::min(bs, n - start);
            xb.resize(m, x.cols());
            yb.resize(m, y.cols());
            if (embeddings) eb.resize(m, embeddings->cols());
            for (Index r = 0; r < m; ++r) {
                const Index src = order[static_cast<std::size_t>(start + r)];
                xb.row(r) = x.row(src);
                yb.row(r) = y.row(src);
                if (embeddings) eb.row(r) = embeddings->row(src);
            }
            const double batch_loss = model.loss_and_gradients(xb, mode == ForecastMode::Multi ? &eb : nullptr, yb, drop);
            optimizer.clip_grad_norm(config.grad_clip);
            if (config.lr_schedule == "cosine") {
                const double progress = static_cast<double>(step) / total_steps;
                optimizer.set_learning_rate(config.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * progress)));
            }
            ++step;
            optimizer.step();
            total += batch_loss * static_cast<double>(m);
        }
        result.history.epoch_loss.push_back(total / static_cast<double>(n));
    }
    return result;
}

TrainedForecaster train_forecaster(std::span<const ForecastSample> samples,
                                   const std::map<std::string, std::string>& texts, ForecastMode mode,
                                   const TSFConfig& config, Embedder* embedder) {
    if (mode == ForecastMode::Uni) return train_forecaster(samples, nullptr, mode, config, "");
    if (embedder == nullptr) throw std::invalid_argument("train_forecaster: multi mode needs an embedder");
    if (samples.empty()) throw std::invalid_argument("train_forecaster: empty training set");
    const Matrix e = embedding_matrix(samples, texts, *embedder);
    return train_forecaster(samples, &e, mode, config, embedder->identity());
}

std::vector<double> copy_baseline(std::span<const double> x, int h) {
    if (h < 1) throw std::invalid_argument("copy_baseline: h must be >= 1");
    if (static_cast<std::size_t>(h) > x.size()) throw std::invalid_argument("copy_baseline: h exceeds lookback");
    const auto tail = x.subspan(x.size() - static_cast<std::size_t>(h));
    const double mean = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(h);
    return std::vector<double>(static_cast<std::size_t>(h), mean);
}

}  // namespace clickcast
