#pragma once

// Small dense layers with explicit forward caches and hand-written backward
// passes. Activations are row-major (rows = tokens or samples).

#include <string>
#include <vector>

#include <Eigen/Core>

#include "clickcast/random.hpp"

namespace clickcast::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;

    void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

using ParameterList = std::vector<Parameter*>;

class Linear {
public:
    Linear() = default;
    Linear(const std::string& name, Index in, Index out);

    /// Xavier-uniform weights scaled by `gain`, zero bias.
    void init(Xoshiro256& rng, double gain = 1.0);
    Matrix forward(const Matrix& x) const;
    /// Accumulates parameter gradients; returns dL/dx.
    Matrix backward(const Matrix& x, const Matrix& dy);
    void collect(ParameterList& out);

    Index in_features() const { return weight.value.rows(); }
    Index out_features() const { return weight.value.cols(); }

    Parameter weight;  // in x out
    Parameter bias;    // 1 x out
};

class LayerNorm {
public:
    struct Cache {
        Matrix xhat;
        Eigen::VectorXd inv_std;
    };

    LayerNorm() = default;
    LayerNorm(const std::string& name, Index dim, double eps = 1e-5);

    Matrix forward(const Matrix& x, Cache* cache) const;
    Matrix backward(const Matrix& dy, const Cache& cache);
    void collect(ParameterList& out);

    Parameter gain;
    Parameter shift;

private:
    double eps_ = 1e-5;
};

/// Multi-head self attention over `batch` independent sequences of `len` rows each.
class SelfAttention {
public:
    struct Cache {
        Matrix x;
        Matrix q, k, v;
        Matrix context;
        std::vector<Matrix> probs;  // batch * heads blocks of len x len
    };

    SelfAttention() = default;
    SelfAttention(const std::string& name, Index dim, int heads);

    void init(Xoshiro256& rng);
    Matrix forward(const Matrix& x, Index batch, Index len, Cache* cache) const;
    Matrix backward(const Matrix& dy, Index batch, Index len, const Cache& cache);
    void collect(ParameterList& out);

private:
    int heads_ = 1;
    Linear wq_, wk_, wv_, wo_;
};

/// Post-norm transformer encoder block: LN(x + Attn(x)), then LN(y + FFN(y)).
class EncoderLayer {
public:
    struct Cache {
        SelfAttention::Cache attn;
        Matrix attn_mask;  // empty when dropout is off
        LayerNorm::Cache ln1;
        Matrix y1;
        Matrix hidden_pre;
        Matrix hidden;
        Matrix ffn_mask;
        LayerNorm::Cache ln2;
    };

    EncoderLayer() = default;
    EncoderLayer(const std::string& name, Index dim, int heads, Index ff_dim);

    void init(Xoshiro256& rng);
    /// `dropout_rng` null disables dropout.
    Matrix forward(const Matrix& x, Index batch, Index len, double dropout, Xoshiro256* dropout_rng,
                   Cache* cache) const;
    Matrix backward(const Matrix& dy, Index batch, Index len, const Cache& cache);
    void collect(ParameterList& out);

private:
    SelfAttention attn_;
    LayerNorm ln1_, ln2_;
    Linear ff1_, ff2_;
};

Matrix relu(const Matrix& x);
/// Inverted-dropout mask (entries 0 or 1/(1-p)).
Matrix dropout_mask(Index rows, Index cols, double p, Xoshiro256& rng);
/// Fixed sinusoidal positional encoding, len x dim.
Matrix sinusoidal_encoding(Index len, Index dim);

/// Adam with bias correction; moments are keyed by parameter order.
class Adam {
public:
    Adam(ParameterList params, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    void step();
    void zero_grad();
    /// Rescales gradients so their global L2 norm is at most `max_norm`; returns the pre-clip norm.
    double clip_grad_norm(double max_norm);
    void set_learning_rate(double lr) { lr_ = lr; }
    double learning_rate() const { return lr_; }

private:
    ParameterList params_;
    std::vector<Matrix> m_, v_;
    double lr_, beta1_, beta2_, eps_;
    long step_ = 0;
};

}  // namespace clickcast::nn
