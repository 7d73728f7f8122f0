#pragma once

// Minimal feed-forward network with exact input gradients. Layers operate on
// flattened activations (shape metadata carried alongside); parameters live in
// one flat buffer owned by Network so trained models are immutable and cheap
// to share across attack workers.

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "advkit/errors.hpp"
#include "advkit/rng.hpp"
#include "advkit/tensor.hpp"

namespace advkit {

using Vec = Eigen::VectorXf;
using Mat = Eigen::MatrixXf;

class Layer {
public:
    virtual ~Layer() = default;
    virtual std::string spec() const = 0;
    virtual Shape out_shape() const = 0;
    virtual std::size_t param_count() const { return 0; }
    virtual void init_params(float* params, Rng& rng) const { (void)params; (void)rng; }
    virtual void forward(const float* params, const Vec& in, Vec& out) const = 0;
    // grad_in is resized and overwritten; param_grads (if non-null) is accumulated into.
    virtual void backward(const float* params, const Vec& in, const Vec& out,
                          const Vec& grad_out, Vec& grad_in, float* param_grads) const = 0;
};

// 3x3-style convolution, stride 1, zero padding to preserve spatial size.
class Conv2d final : public Layer {
public:
    Conv2d(Shape in, int out_channels, int kernel)
        : in_(in), out_channels_(out_channels), k_(kernel) {
        if (kernel % 2 == 0) throw ConfigError("conv kernel must be odd");
    }

    std::string spec() const override {
        return "conv:" + std::to_string(out_channels_) + "x" + std::to_string(k_);
    }
    Shape out_shape() const override { return {in_.h, in_.w, out_channels_}; }
    std::size_t param_count() const override {
        return static_cast<std::size_t>(out_channels_) * in_.c * k_ * k_ + out_channels_;
    }

    void init_params(float* params, Rng& rng) const override {
        const std::size_t nw = param_count() - out_channels_;
        // std sqrt(1/(3*fan_in)): small enough that early steps cannot kill
        // the relus on tiny datasets
        const float bound = std::sqrt(1.0f / (3.0f * in_.c * k_ * k_));
        for (std::size_t i = 0; i < nw; ++i) params[i] = gaussian(rng, 0.0f, bound);
        for (int i = 0; i < out_channels_; ++i) params[nw + i] = 0.0f;
    }

    void forward(const float* params, const Vec& in, Vec& out) const override {
        const int cols_n = in_.h * in_.w;
        Mat cols = im2col(in);
        Eigen::Map<const Mat> W(params, out_channels_, in_.c * k_ * k_);
        Eigen::Map<const Vec> b(params + W.size(), out_channels_);
        Mat o = W * cols;  // out_channels x (h*w)
        o.colwise() += b;
        out.resize(static_cast<Eigen::Index>(cols_n) * out_channels_);
        // layout: (y, x, channel)
        for (int p = 0; p < cols_n; ++p)
            for (int oc = 0; oc < out_channels_; ++oc)
                out[static_cast<Eigen::Index>(p) * out_channels_ + oc] = o(oc, p);
    }

    void backward(const float* params, const Vec& in, const Vec& /*out*/,
                  const Vec& grad_out, Vec& grad_in, float* param_grads) const override {
        const int cols_n = in_.h * in_.w;
        Mat go(out_channels_, cols_n);
        for (int p = 0; p < cols_n; ++p)
            for (int oc = 0; oc < out_channels_; ++oc)
                go(oc, p) = grad_out[static_cast<Eigen::Index>(p) * out_channels_ + oc];
        Eigen::Map<const Mat> W(params, out_channels_, in_.c * k_ * k_);
        if (param_grads != nullptr) {
            Mat cols = im2col(in);
            Eigen::Map<Mat> gW(param_grads, out_channels_, in_.c * k_ * k_);
            gW.noalias() += go * cols.transpose();
            Eigen::Map<Vec> gb(param_grads + W.size(), out_channels_);
            gb += go.rowwise().sum();
        }
        Mat gcols = W.transpose() * go;  // (c*k*k) x (h*w)
        col2im(gcols, grad_in);
    }

private:
    Mat im2col(const Vec& in) const {
        const int half = k_ / 2;
        Mat cols = Mat::Zero(static_cast<Eigen::Index>(in_.c) * k_ * k_, static_cast<Eigen::Index>(in_.h) * in_.w);
        for (int y = 0; y < in_.h; ++y)
            for (int x = 0; x < in_.w; ++x) {
                const int p = y * in_.w + x;
                int r = 0;
                for (int ky = -half; ky <= half; ++ky)
                    for (int kx = -half; kx <= half; ++kx) {
                        const int sy = y + ky, sx = x + kx;
                        if (sy >= 0 && sy < in_.h && sx >= 0 && sx < in_.w) {
                            const std::size_t base = (static_cast<std::size_t>(sy) * in_.w + sx) * in_.c;
                            for (int ic = 0; ic < in_.c; ++ic)
                                cols(r + ic, p) = in[base + ic];
                        }
                        r += in_.c;
                    }
            }
        return cols;
    }

    void col2im(const Mat& gcols, Vec& grad_in) const {
        const int half = k_ / 2;
        grad_in = Vec::Zero(static_cast<Eigen::Index>(in_.h) * in_.w * in_.c);
        for (int y = 0; y < in_.h; ++y)
            for (int x = 0; x < in_.w; ++x) {
                const int p = y * in_.w + x;
                int r = 0;
                for (int ky = -half; ky <= half; ++ky)
                    for (int kx = -half; kx <= half; ++kx) {
                        const int sy = y + ky, sx = x + kx;
                        if (sy >= 0 && sy < in_.h && sx >= 0 && sx < in_.w) {
                            const std::size_t base = (static_cast<std::size_t>(sy) * in_.w + sx) * in_.c;
                            for (int ic = 0; ic < in_.c; ++ic)
                                grad_in[base + ic] += gcols(r + ic, p);
                        }
                        r += in_.c;
                    }
            }
    }

    Shape in_;
    int out_channels_;
    int k_;
};

class Relu final : public Layer {
public:
    explicit Relu(Shape in) : in_(in) {}
    std::string spec() const override { return "relu"; }
    Shape out_shape() const override { return in_; }
    void forward(const float* /*params*/, const Vec& in, Vec& out) const override {
        out = in.cwiseMax(0.0f);
    }
    void backward(const float* /*params*/, const Vec& in, const Vec& /*out*/,
                  const Vec& grad_out, Vec& grad_in, float* /*param_grads*/) const override {
        grad_in = (in.array() > 0.0f).select(grad_out, Vec::Zero(in.size()));
    }

private:
    Shape in_;
};

class AvgPool final : public Layer {
public:
    AvgPool(Shape in, int n) : in_(in), n_(n) {
        if (in.h % n != 0 || in.w % n != 0)
            throw ConfigError("avgpool: input not divisible by pool size");
    }
    std::string spec() const override { return "avgpool:" + std::to_string(n_); }
    Shape out_shape() const override { return {in_.h / n_, in_.w / n_, in_.c}; }

    void forward(const float* /*params*/, const Vec& in, Vec& out) const override {
        const Shape o = out_shape();
        out = Vec::Zero(static_cast<Eigen::Index>(o.size()));
        const float inv = 1.0f / (n_ * n_);
        for (int y = 0; y < in_.h; ++y)
            for (int x = 0; x < in_.w; ++x) {
                const std::size_t src = (static_cast<std::size_t>(y) * in_.w + x) * in_.c;
                const std::size_t dst = (static_cast<std::size_t>(y / n_) * o.w + x / n_) * o.c;
                for (int c = 0; c < in_.c; ++c) out[dst + c] += in[src + c] * inv;
            }
    }

    void backward(const float* /*params*/, const Vec& /*in*/, const Vec& /*out*/,
                  const Vec& grad_out, Vec& grad_in, float* /*param_grads*/) const override {
        const Shape o = out_shape();
        grad_in = Vec::Zero(static_cast<Eigen::Index>(in_.size()));
        const float inv = 1.0f / (n_ * n_);
        for (int y = 0; y < in_.h; ++y)
            for (int x = 0; x < in_.w; ++x) {
                const std::size_t src = (static_cast<std::size_t>(y) * in_.w + x) * in_.c;
                const std::size_t dst = (static_cast<std::size_t>(y / n_) * o.w + x / n_) * o.c;
                for (int c = 0; c < in_.c; ++c) grad_in[src + c] = grad_out[dst + c] * inv;
            }
    }

private:
    Shape in_;
    int n_;
};

class Dense final : public Layer {
public:
    Dense(Shape in, int out) : in_(in), out_(out) {}
    std::string spec() const override { return "dense:" + std::to_string(out_); }
    Shape out_shape() const override { return {1, 1, out_}; }
    std::size_t param_count() const override { return in_.size() * out_ + out_; }

    void init_params(float* params, Rng& rng) const override {
        const std::size_t nw = in_.size() * out_;
        const float bound = std::sqrt(1.0f / (3.0f * static_cast<float>(in_.size())));
        for (std::size_t i = 0; i < nw; ++i) params[i] = gaussian(rng, 0.0f, bound);
        for (int i = 0; i < out_; ++i) params[nw + i] = 0.0f;
    }

    void forward(const float* params, const Vec& in, Vec& out) const override {
        Eigen::Map<const Mat> W(params, out_, static_cast<Eigen::Index>(in_.size()));
        Eigen::Map<const Vec> b(params + W.size(), out_);
        out.noalias() = W * in;
        out += b;
    }

    void backward(const float* params, const Vec& in, const Vec& /*out*/,
                  const Vec& grad_out, Vec& grad_in, float* param_grads) const override {
        Eigen::Map<const Mat> W(params, out_, static_cast<Eigen::Index>(in_.size()));
        if (param_grads != nullptr) {
            Eigen::Map<Mat> gW(param_grads, out_, static_cast<Eigen::Index>(in_.size()));
            gW.noalias() += grad_out * in.transpose();
            Eigen::Map<Vec> gb(param_grads + W.size(), out_);
            gb += grad_out;
        }
        grad_in.noalias() = W.transpose() * grad_out;
    }

private:
    Shape in_;
    int out_;
};

// Per-sample activation record for backward passes.
struct Tape {
    std::vector<Vec> acts;  // acts[0] = input, acts[i+1] = output of layer i
};

class Network {
public:
    Network() = default;

    // Descriptor grammar: comma-separated "conv:<out>x<k>", "relu",
    // "avgpool:<n>", "dense:<out>".
    Network(Shape input, const std::string& descriptor) : input_(input) {
        Shape cur = input;
        std::stringstream ss(descriptor);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            layers_.push_back(make_layer(cur, tok));
            offsets_.push_back(n_params_);
            n_params_ += layers_.back()->param_count();
            cur = layers_.back()->out_shape();
        }
        if (layers_.empty()) throw ConfigError("empty architecture descriptor");
        params_.assign(n_params_, 0.0f);
        output_ = cur;
    }

    void init(Rng& rng) {
        for (std::size_t i = 0; i < layers_.size(); ++i)
            layers_[i]->init_params(params_.data() + offsets_[i], rng);
    }

    Shape input_shape() const { return input_; }
    Shape output_shape() const { return output_; }
    std::size_t param_count() const { return n_params_; }
    std::vector<float>& params() { return params_; }
    const std::vector<float>& params() const { return params_; }
    std::size_t layer_count() const { return layers_.size(); }

    std::string descriptor() const {
        std::string d;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            if (i > 0) d += ",";
            d += layers_[i]->spec();
        }
        return d;
    }

    Vec forward(const Vec& x, Tape* tape = nullptr) const {
        if (x.size() != static_cast<Eigen::Index>(input_.size()))
            throw DataError("network input size mismatch: got " + std::to_string(x.size()) +
                            ", expected " + std::to_string(input_.size()));
        Vec cur = x;
        if (tape != nullptr) {
            tape->acts.clear();
            tape->acts.push_back(cur);
        }
        Vec next;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            layers_[i]->forward(params_.data() + offsets_[i], cur, next);
            cur.swap(next);
            if (tape != nullptr) tape->acts.push_back(cur);
        }
        return cur;
    }

    // Backprop from the gradient at the output of layer `from_layer` (defaults
    // to the last). Returns dLoss/dInput; accumulates parameter gradients into
    // param_grads when provided (must be zero-initialized by the caller).
    Vec backward(const Tape& tape, const Vec& grad_at_output, float* param_grads = nullptr,
                 std::size_t from_layer = static_cast<std::size_t>(-1)) const {
        std::size_t top = (from_layer == static_cast<std::size_t>(-1)) ? layers_.size() - 1 : from_layer;
        Vec grad = grad_at_output;
        Vec grad_in;
        for (std::size_t i = top + 1; i-- > 0;) {
            float* pg = (param_grads != nullptr) ? param_grads + offsets_[i] : nullptr;
            layers_[i]->backward(params_.data() + offsets_[i], tape.acts[i], tape.acts[i + 1],
                                 grad, grad_in, pg);
            grad.swap(grad_in);
        }
        return grad;
    }

    Shape layer_output_shape(std::size_t layer) const { return layers_[layer]->out_shape(); }

private:
    static std::unique_ptr<Layer> make_layer(Shape in, const std::string& tok) {
        const auto colon = tok.find(':');
        const std::string name = tok.substr(0, colon);
        const std::string arg = (colon == std::string::npos) ? "" : tok.substr(colon + 1);
        if (name == "relu") return std::make_unique<Relu>(in);
        if (name == "avgpool") return std::make_unique<AvgPool>(in, std::stoi(arg));
        if (name == "dense") return std::make_unique<Dense>(in, std::stoi(arg));
        if (name == "conv") {
            const auto xpos = arg.find('x');
            if (xpos == std::string::npos) throw ConfigError("conv spec needs <out>x<k>: " + tok);
            return std::make_unique<Conv2d>(in, std::stoi(arg.substr(0, xpos)),
                                            std::stoi(arg.substr(xpos + 1)));
        }
        throw ConfigError("unknown layer: " + tok);
    }

    Shape input_{};
    Shape output_{};
    std::vector<std::unique_ptr<Layer>> layers_;
    std::vector<std::size_t> offsets_;
    std::size_t n_params_ = 0;
    std::vector<float> params_;
};

// Softmax + cross-entropy helpers shared by training and attacks.
inline Vec softmax(const Vec& logits) {
    const float m = logits.maxCoeff();
    Vec e = (logits.array() - m).exp();
    return e / e.sum();
}

inline double cross_entropy(const Vec& logits, int label) {
    const float m = logits.maxCoeff();
    const double lse = std::log((logits.array() - m).exp().sum()) + m;
    return lse - logits[label];
}

// d(cross_entropy)/d(logits) = softmax - onehot
inline Vec cross_entropy_grad(const Vec& logits, int label) {
    Vec g = softmax(logits);
    g[label] -= 1.0f;
    return g;
}

class Adam {
public:
    Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps), m_(n, 0.0f), v_(n, 0.0f) {}

    void step(std::vector<float>& params, const std::vector<float>& grads) {
        ++t_;
        const double bc1 = 1.0 - std::pow(b1_, t_);
        const double bc2 = 1.0 - std::pow(b2_, t_);
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = static_cast<float>(b1_ * m_[i] + (1.0 - b1_) * grads[i]);
            v_[i] = static_cast<float>(b2_ * v_[i] + (1.0 - b2_) * grads[i] * grads[i]);
            const double mh = m_[i] / bc1;
            const double vh = v_[i] / bc2;
            params[i] -= static_cast<float>(lr_ * mh / (std::sqrt(vh) + eps_));
        }
    }

private:
    double lr_, b1_, b2_, eps_;
    long t_ = 0;
    std::vector<float> m_, v_;
};

}  // namespace advkit
