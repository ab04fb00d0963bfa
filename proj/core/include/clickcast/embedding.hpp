#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clickcast/transport.hpp"

namespace clickcast {

inline constexpr std::size_t kEmbeddingDim = 768;

struct TextEmbedding {
    std::vector<float> vector;     // kEmbeddingDim entries
    std::string source_text_hash;  // sha256 of the source text
};

class Embedder {
public:
    virtual ~Embedder() = default;
    /// Throws std::invalid_argument for empty text.
    virtual TextEmbedding embed(std::string_view text) = 0;
    /// Name, version and seed; stored with every trained model.
    virtual std::string identity() const = 0;
};

/**
 * Hermetic default encoder. Each distinct word token is hashed to a feature id,
 * projected through a seeded gaussian matrix (scaled by 1 + log(count)), max
 * pooled per dimension across tokens and L2-normalized.
 */
class HashingEmbedder final : public Embedder {
public:
    explicit HashingEmbedder(std::uint64_t seed = 0x5eedULL, std::size_t dim = kEmbeddingDim);

    TextEmbedding embed(std::string_view text) override;
    std::string identity() const override;
    std::size_t dim() const { return dim_; }

private:
    std::uint64_t seed_;
    std::size_t dim_;
};

/// Raw little-endian float32 vectors, one file per text hash.
class EmbeddingDiskCache {
public:
    explicit EmbeddingDiskCache(std::filesystem::path dir);

    bool load(const std::string& text_hash, std::vector<float>& out) const;
    void store(const std::string& text_hash, const std::vector<float>& v);
    std::filesystem::path path_for(const std::string& text_hash) const;

private:
    std::filesystem::path dir_;
    mutable std::mutex mu_;
};

/**
 * Frozen external encoder behind POST /embed {"text","model"} -> {"embedding":[768]}.
 * Failures propagate; a run must not silently mix embedders.
 */
class ExternalEmbedder final : public Embedder {
public:
    ExternalEmbedder(std::shared_ptr<Transport> transport, std::string model_name,
                     std::filesystem::path cache_dir);

    TextEmbedding embed(std::string_view text) override;
    std::string identity() const override { return "external:" + model_name_ + ":maxpool"; }
    std::size_t remote_calls() const;

private:
    std::shared_ptr<Transport> transport_;
    std::string model_name_;
    EmbeddingDiskCache cache_;
    mutable std::mutex mu_;
    std::size_t remote_calls_ = 0;
};

/// In-memory memoization in front of another embedder; thread-safe.
class MemoizingEmbedder final : public Embedder {
public:
    explicit MemoizingEmbedder(std::shared_ptr<Embedder> inner);

    TextEmbedding embed(std::string_view text) override;
    std::string identity() const override { return inner_->identity(); }

private:
    std::shared_ptr<Embedder> inner_;
    std::mutex mu_;
    std::unordered_map<std::string, TextEmbedding> memo_;
};

double cosine_similarity(const TextEmbedding& a, const TextEmbedding& b);

}  // namespace clickcast
