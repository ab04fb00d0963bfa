#include "clickcast/embedding.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

#include "clickcast/hash.hpp"
#include "clickcast/random.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace clickcast {

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void require_text(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("embed_text: empty text");
}

void check_dim(const std::vector<float>& v) {
    if (v.size() != kEmbeddingDim)
        throw std::runtime_error("embedding has dimension " + std::to_string(v.size()) + ", expected " +
                                 std::to_string(kEmbeddingDim));
    for (float x : v) {
        if (!std::isfinite(x)) throw std::runtime_error("embedding has non-finite entries");
    }
}

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");

}  // namespace

HashingEmbedder::HashingEmbedder(std::uint64_t seed, std::size_t dim) : seed_(seed), dim_(dim) {
    if (dim_ == 0) throw std::invalid_argument("HashingEmbedder: zero dimension");
}

std::string HashingEmbedder::identity() const {
    return "hashing-maxpool-v1:dim=" + std::to_string(dim_) + ":seed=" + std::to_string(seed_);
}

TextEmbedding HashingEmbedder::embed(std::string_view text) {
    require_text(text);
    auto tokens = detail::word_tokens(text);
    if (tokens.empty()) tokens.emplace_back(text);  // punctuation-only text is one opaque token

    std::map<std::string, int> counts;
    for (auto& t : tokens) ++counts[t];

    std::vector<double> pooled(dim_, -std::numeric_limits<double>::infinity());
    for (const auto& [token, count] : counts) {
        Xoshiro256 rng(mix_seed(seed_, fnv1a(token)));
        const double weight = 1.0 + std::log(static_cast<double>(count));
        for (std::size_t d = 0; d < dim_; ++d) pooled[d] = std::max(pooled[d], weight * rng.normal());
    }
    double norm = 0.0;
    for (double v : pooled) norm += v * v;
    norm = std::sqrt(norm);

    TextEmbedding e;
    e.vector.resize(dim_);
    for (std::size_t d = 0; d < dim_; ++d) e.vector[d] = static_cast<float>(pooled[d] / norm);
    e.source_text_hash = sha256_hex(text);
    return e;
}

EmbeddingDiskCache::EmbeddingDiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path EmbeddingDiskCache::path_for(const std::string& text_hash) const {
    return dir_ / (text_hash + ".f32");
}

bool EmbeddingDiskCache::load(const std::string& text_hash, std::vector<float>& out) const {
    std::lock_guard lock(mu_);
    std::ifstream in(path_for(text_hash), std::ios::binary);
    if (!in) return false;
    out.assign(kEmbeddingDim, 0.0f);
    in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(kEmbeddingDim * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(kEmbeddingDim * sizeof(float))) return false;
    return true;
}

void EmbeddingDiskCache::store(const std::string& text_hash, const std::vector<float>& v) {
    check_dim(v);
    std::lock_guard lock(mu_);
    const auto final_path = path_for(text_hash);
    const auto tmp = final_path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(float)));
        if (!out) throw std::runtime_error("embedding cache: write failed: " + tmp);
    }
    std::filesystem::rename(tmp, final_path);
}

ExternalEmbedder::ExternalEmbedder(std::shared_ptr<Transport> transport, std::string model_name,
                                   std::filesystem::path cache_dir)
    : transport_(std::move(transport)), model_name_(std::move(model_name)), cache_(std::move(cache_dir)) {
    if (!transport_) throw std::invalid_argument("ExternalEmbedder: null transport");
}

std::size_t ExternalEmbedder::remote_calls() const {
    std::lock_guard lock(mu_);
    return remote_calls_;
}

TextEmbedding ExternalEmbedder::embed(std::string_view text) {
    require_text(text);
    TextEmbedding e;
    e.source_text_hash = sha256_hex(text);
    if (cache_.load(e.source_text_hash, e.vector)) return e;

    const nlohmann::json req = {{"text", std::string(text)}, {"model", model_name_}, {"pooling", "max"}};
    {
        std::lock_guard lock(mu_);
        ++remote_calls_;
    }
    const std::string body = transport_->post_json("/embed", req.dump());
    try {
        e.vector = nlohmann::json::parse(body).at("embedding").get<std::vector<float>>();
    } catch (const nlohmann::json::exception& ex) {
        throw TransportError(std::string("embedding service returned malformed JSON: ") + ex.what());
    }
    check_dim(e.vector);
    cache_.store(e.source_text_hash, e.vector);
    return e;
}

MemoizingEmbedder::MemoizingEmbedder(std::shared_ptr<Embedder> inner) : inner_(std::move(inner)) {
    if (!inner_) throw std::invalid_argument("MemoizingEmbedder: null inner embedder");
}

TextEmbedding MemoizingEmbedder::embed(std::string_view text) {
    const std::string key(text);
    {
        std::lock_guard lock(mu_);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    auto e = inner_->embed(text);
    std::lock_guard lock(mu_);
    return memo_.try_emplace(key, std::move(e)).first->second;
}

double cosine_similarity(const TextEmbedding& a, const TextEmbedding& b) {
    if (a.vector.size() != b.vector.size()) throw std::invalid_argument("cosine_similarity: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.vector.size(); ++i) {
        dot += static_cast<double>(a.vector[i]) * b.vector[i];
        na += static_cast<double>(a.vector[i]) * a.vector[i];
        nb += static_cast<double>(b.vector[i]) * b.vector[i];
    }
    return dot / std::sqrt(na * nb);
}

}  // namespace clickcast
