#include "clickcast/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace clickcast::nn {

namespace {

Parameter make_param(const std::string& name, Index rows, Index cols) {
    Parameter p;
    p.name = name;
    p.value = Matrix::Zero(rows, cols);
    p.grad = Matrix::Zero(rows, cols);
    return p;
}

}  // namespace

Linear::Linear(const std::string& name, Index in, Index out)
    : weight(make_param(name + ".weight", in, out)), bias(make_param(name + ".bias", 1, out)) {}

void Linear::init(Xoshiro256& rng, double gain) {
    const double limit = gain * std::sqrt(6.0 / static_cast<double>(in_features() + out_features()));
    for (Index i = 0; i < weight.value.size(); ++i) weight.value.data()[i] = rng.uniform(-limit, limit);
    bias.value.setZero();
}

Matrix Linear::forward(const Matrix& x) const {
    Matrix y = x * weight.value;
    y.rowwise() += bias.value.row(0);
    return y;
}

Matrix Linear::backward(const Matrix& x, const Matrix& dy) {
    weight.grad.noalias() += x.transpose() * dy;
    bias.grad.row(0) += dy.colwise().sum();
    return dy * weight.value.transpose();
}

void Linear::collect(ParameterList& out) {
    out.push_back(&weight);
    out.push_back(&bias);
}

LayerNorm::LayerNorm(const std::string& name, Index dim, double eps)
    : gain(make_param(name + ".gain", 1, dim)), shift(make_param(name + ".shift", 1, dim)), eps_(eps) {
    gain.value.setOnes();
}

Matrix LayerNorm::forward(const Matrix& x, Cache* cache) const {
    const Index n = x.rows();
    const double d = static_cast<double>(x.cols());
    Matrix xhat(n, x.cols());
    Eigen::VectorXd inv_std(n);
    for (Index r = 0; r < n; ++r) {
        const double mean = x.row(r).sum() / d;
        const double var = (x.row(r).array() - mean).square().sum() / d;
        inv_std(r) = 1.0 / std::sqrt(var + eps_);
        xhat.row(r) = (x.row(r).array() - mean) * inv_std(r);
    }
    Matrix y = xhat.array().rowwise() * gain.value.row(0).array();
    y.rowwise() += shift.value.row(0);
    if (cache) {
        cache->xhat = std::move(xhat);
        cache->inv_std = std::move(inv_std);
    }
    return y;
}

Matrix LayerNorm::backward(const Matrix& dy, const Cache& cache) {
    gain.grad.row(0) += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
    shift.grad.row(0) += dy.colwise().sum();
    const double d = static_cast<double>(dy.cols());
    Matrix dxhat = dy.array().rowwise() * gain.value.row(0).array();
    Matrix dx(dy.rows(), dy.cols());
    for (Index r = 0; r < dy.rows(); ++r) {
        const double mean_dxhat = dxhat.row(r).sum() / d;
        const double mean_dxhat_xhat = dxhat.row(r).dot(cache.xhat.row(r)) / d;
        dx.row(r) = cache.inv_std(r) *
                    (dxhat.row(r).array() - mean_dxhat - cache.xhat.row(r).array() * mean_dxhat_xhat);
    }
    return dx;
}

void LayerNorm::collect(ParameterList& out) {
    out.push_back(&gain);
    out.push_back(&shift);
}

SelfAttention::SelfAttention(const std::string& name, Index dim, int heads)
    : heads_(heads),
      wq_(name + ".q", dim, dim),
      wk_(name + ".k", dim, dim),
      wv_(name + ".v", dim, dim),
      wo_(name + ".out", dim, dim) {
    if (heads < 1 || dim % heads != 0) throw std::invalid_argument("SelfAttention: dim must be divisible by heads");
}

void SelfAttention::init(Xoshiro256& rng) {
    wq_.init(rng);
    wk_.init(rng);
    wv_.init(rng);
    wo_.init(rng);
}

Matrix SelfAttention::forward(const Matrix& x, Index batch, Index len, Cache* cache) const {
    const Index dim = x.cols();
    const Index dk = dim / heads_;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    Matrix q = wq_.forward(x);
    Matrix k = wk_.forward(x);
    Matrix v = wv_.forward(x);
    Matrix context(x.rows(), dim);
    std::vector<Matrix> probs;
    if (cache) probs.reserve(static_cast<std::size_t>(batch * heads_));

    for (Index b = 0; b < batch; ++b) {
        for (int h = 0; h < heads_; ++h) {
            const auto qb = q.block(b * len, h * dk, len, dk);
            const auto kb = k.block(b * len, h * dk, len, dk);
            const auto vb = v.block(b * len, h * dk, len, dk);
            Matrix s = (qb * kb.transpose()) * scale;
            for (Index r = 0; r < len; ++r) {
                const double mx = s.row(r).maxCoeff();
                s.row(r) = (s.row(r).array() - mx).exp();
                s.row(r) /= s.row(r).sum();
            }
            context.block(b * len, h * dk, len, dk).noalias() = s * vb;
            if (cache) probs.push_back(std::move(s));
        }
    }
    Matrix out = wo_.forward(context);
    if (cache) {
        cache->x = x;
        cache->q = std::move(q);
        cache->k = std::move(k);
        cache->v = std::move(v);
        cache->context = std::move(context);
        cache->probs = std::move(probs);
    }
    return out;
}

Matrix SelfAttention::backward(const Matrix& dy, Index batch, Index len, const Cache& cache) {
    const Index dim = dy.cols();
    const Index dk = dim / heads_;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    const Matrix dcontext = wo_.backward(cache.context, dy);
    Matrix dq(dy.rows(), dim), dk_m(dy.rows(), dim), dv(dy.rows(), dim);

    for (Index b = 0; b < batch; ++b) {
        for (int h = 0; h < heads_; ++h) {
            const Matrix& p = cache.probs[static_cast<std::size_t>(b * heads_ + h)];
            const auto qb = cache.q.block(b * len, h * dk, len, dk);
            const auto kb = cache.k.block(b * len, h * dk, len, dk);
            const auto vb = cache.v.block(b * len, h * dk, len, dk);
            const auto dctx = dcontext.block(b * len, h * dk, len, dk);

            dv.block(b * len, h * dk, len, dk).noalias() = p.transpose() * dctx;
            const Matrix dp = dctx * vb.transpose();
            // softmax backward, row-wise: ds = p * (dp - sum(dp * p))
            Matrix ds = p.array() * (dp.array().colwise() - (dp.array() * p.array()).rowwise().sum());
            ds *= scale;
            dq.block(b * len, h * dk, len, dk).noalias() = ds * kb;
            dk_m.block(b * len, h * dk, len, dk).noalias() = ds.transpose() * qb;
        }
    }
    Matrix dx = wq_.backward(cache.x, dq);
    dx += wk_.backward(cache.x, dk_m);
    dx += wv_.backward(cache.x, dv);
    return dx;
}

void SelfAttention::collect(ParameterList& out) {
    wq_.collect(out);
    wk_.collect(out);
    wv_.collect(out);
    wo_.collect(out);
}

EncoderLayer::EncoderLayer(const std::string& name, Index dim, int heads, Index ff_dim)
    : attn_(name + ".attn", dim, heads),
      ln1_(name + ".ln1", dim),
      ln2_(name + ".ln2", dim),
      ff1_(name + ".ff1", dim, ff_dim),
      ff2_(name + ".ff2", ff_dim, dim) {}

void EncoderLayer::init(Xoshiro256& rng) {
    attn_.init(rng);
    ff1_.init(rng);
    ff2_.init(rng);
}

Matrix EncoderLayer::forward(const Matrix& x, Index batch, Index len, double dropout, Xoshiro256* dropout_rng,
                             Cache* cache) const {
    const bool drop = dropout_rng != nullptr && dropout > 0.0;
    Matrix a = attn_.forward(x, batch, len, cache ? &cache->attn : nullptr);
    if (drop) {
        Matrix mask = dropout_mask(a.rows(), a.cols(), dropout, *dropout_rng);
        a.array() *= mask.array();
        if (cache) cache->attn_mask = std::move(mask);
    } else if (cache) {
        cache->attn_mask.resize(0, 0);
    }
    Matrix y1 = ln1_.forward(x + a, cache ? &cache->ln1 : nullptr);
    Matrix hidden_pre = ff1_.forward(y1);
    Matrix hidden = relu(hidden_pre);
    Matrix f = ff2_.forward(hidden);
    if (drop) {
        Matrix mask = dropout_mask(f.rows(), f.cols(), dropout, *dropout_rng);
        f.array() *= mask.array();
        if (cache) cache->ffn_mask = std::move(mask);
    } else if (cache) {
        cache->ffn_mask.resize(0, 0);
    }
    Matrix y2 = ln2_.forward(y1 + f, cache ? &cache->ln2 : nullptr);
    if (cache) {
        cache->y1 = std::move(y1);
        cache->hidden_pre = std::move(hidden_pre);
        cache->hidden = std::move(hidden);
    }
    return y2;
}

Matrix EncoderLayer::backward(const Matrix& dy, Index batch, Index len, const Cache& cache) {
    const Matrix dr2 = ln2_.backward(dy, cache.ln2);
    Matrix df = dr2;
    if (cache.ffn_mask.size() > 0) df.array() *= cache.ffn_mask.array();
    Matrix dhidden = ff2_.backward(cache.hidden, df);
    dhidden.array() *= (cache.hidden_pre.array() > 0.0).cast<double>();
    Matrix dy1 = dr2 + ff1_.backward(cache.y1, dhidden);
    const Matrix dr1 = ln1_.backward(dy1, cache.ln1);
    Matrix da = dr1;
    if (cache.attn_mask.size() > 0) da.array() *= cache.attn_mask.array();
    return dr1 + attn_.backward(da, batch, len, cache.attn);
}

void EncoderLayer::collect(ParameterList& out) {
    attn_.collect(out);
    ln1_.collect(out);
    ff1_.collect(out);
    ff2_.collect(out);
    ln2_.collect(out);
}

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix dropout_mask(Index rows, Index cols, double p, Xoshiro256& rng) {
    Matrix m(rows, cols);
    const double keep = 1.0 - p;
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform() < keep ? 1.0 / keep : 0.0;
    return m;
}

Matrix sinusoidal_encoding(Index len, Index dim) {
    Matrix pe(len, dim);
    for (Index pos = 0; pos < len; ++pos) {
        for (Index i = 0; i < dim; ++i) {
            const double rate = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(dim));
            const double angle = static_cast<double>(pos) * rate;
            pe(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    }
    return pe;
}

Adam::Adam(ParameterList params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (auto* p : params_) {
        m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
        v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
}

void Adam::step() {
    ++step_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto& p = *params_[i];
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
        p.value.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
    }
}

void Adam::zero_grad() {
    for (auto* p : params_) p->grad.setZero();
}

double Adam::clip_grad_norm(double max_norm) {
    double sq = 0.0;
    for (auto* p : params_) sq += p->grad.squaredNorm();
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double s = max_norm / norm;
        for (auto* p : params_) p->grad *= s;
    }
    return norm;
}

}  // namespace clickcast::nn
