#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gluconet/tensor.hpp"

namespace gluconet::nn {

/// y = x W + b on [N, in] rows.
template <class T>
class Linear {
public:
    Linear(ParamStoreT<T>& store, const std::string& prefix, std::size_t in, std::size_t out,
           std::mt19937_64& rng)
        : in_(in), out_(out),
          w_(&store.add(prefix + ".weight", {in, out})),
          b_(&store.add(prefix + ".bias", {out})) {
        init_uniform_fanin(*w_, in, rng);
        init_uniform_fanin(*b_, in, rng);
    }

    TensorT<T> forward(const TensorT<T>& x) {
        if (x.shape.size() != 2 || x.shape[1] != in_)
            throw std::invalid_argument("linear: expected [N," + std::to_string(in_) + "] input");
        x_ = x.values;
        rows_ = x.shape[0];
        TensorT<T> y({rows_, out_});
        detail::gemm_nn(x.values.data(), w_->values.data(), y.values.data(), rows_, in_, out_, false);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < out_; ++j) y.values[i * out_ + j] += b_->values[j];
        return y;
    }

    TensorT<T> backward(const TensorT<T>& dy) {
        if (dy.shape.size() != 2 || dy.shape[0] != rows_ || dy.shape[1] != out_)
            throw std::invalid_argument("linear: gradient shape mismatch");
        w_->ensure_grad();
        b_->ensure_grad();
        detail::gemm_tn(x_.data(), dy.values.data(), w_->grad.data(), rows_, in_, out_, true);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < out_; ++j) b_->grad[j] += dy.values[i * out_ + j];
        TensorT<T> dx({rows_, in_});
        detail::gemm_nt(dy.values.data(), w_->values.data(), dx.values.data(), rows_, out_, in_, false);
        return dx;
    }

    std::size_t in_features() const { return in_; }
    std::size_t out_features() const { return out_; }

private:
    std::size_t in_, out_, rows_ = 0;
    TensorT<T>* w_;
    TensorT<T>* b_;
    std::vector<T> x_;
};

/// Elementwise max(0, x). When kink tracking is on, pattern_hash() identifies
/// the active-set so finite-difference checks can skip nondifferentiable points.
template <class T>
class Relu {
public:
    TensorT<T> forward(const TensorT<T>& x) {
        mask_.assign(x.numel(), 0);
        TensorT<T> y(x.shape);
        for (std::size_t i = 0; i < x.numel(); ++i) {
            if (x.values[i] > T(0)) {
                y.values[i] = x.values[i];
                mask_[i] = 1;
            }
        }
        if (track_pattern) {
            std::uint64_t h = 1469598103934665603ull;
            for (unsigned char m : mask_) h = (h ^ m) * 1099511628211ull;
            pattern_ = h;
        }
        return y;
    }

    TensorT<T> backward(const TensorT<T>& dy) {
        TensorT<T> dx(dy.shape);
        for (std::size_t i = 0; i < dy.numel(); ++i)
            dx.values[i] = mask_[i] ? dy.values[i] : T(0);
        return dx;
    }

    bool track_pattern = false;
    std::uint64_t pattern_hash() const { return pattern_; }

private:
    std::vector<unsigned char> mask_;
    std::uint64_t pattern_ = 0;
};

/// Valid cross-correlation, stride 1: [B, C_in, L] -> [B, C_out, L - K + 1].
template <class T>
class Conv1d {
public:
    Conv1d(ParamStoreT<T>& store, const std::string& prefix, std::size_t c_in, std::size_t c_out,
           std::size_t kernel, std::mt19937_64& rng)
        : c_in_(c_in), c_out_(c_out), k_(kernel),
          w_(&store.add(prefix + ".kernel", {c_out, c_in, kernel})),
          b_(&store.add(prefix + ".bias", {c_out})) {
        init_uniform_fanin(*w_, c_in * kernel, rng);
        init_uniform_fanin(*b_, c_in * kernel, rng);
    }

    TensorT<T> forward(const TensorT<T>& x) {
        if (x.shape.size() != 3 || x.shape[1] != c_in_ || x.shape[2] < k_)
            throw std::invalid_argument("conv1d: expected [B," + std::to_string(c_in_) + ",L>=K]");
        batch_ = x.shape[0];
        len_ = x.shape[2];
        x_ = x.values;
        const std::size_t lo = len_ - k_ + 1;
        TensorT<T> y({batch_, c_out_, lo});
        for (std::size_t b = 0; b < batch_; ++b) {
            for (std::size_t co = 0; co < c_out_; ++co) {
                T* yrow = &y.values[(b * c_out_ + co) * lo];
                for (std::size_t i = 0; i < lo; ++i) yrow[i] = b_->values[co];
                for (std::size_t ci = 0; ci < c_in_; ++ci) {
                    const T* xrow = &x.values[(b * c_in_ + ci) * len_];
                    const T* krow = &w_->values[(co * c_in_ + ci) * k_];
                    for (std::size_t t = 0; t < k_; ++t) {
                        const T kv = krow[t];
                        for (std::size_t i = 0; i < lo; ++i) yrow[i] += kv * xrow[i + t];
                    }
                }
            }
        }
        return y;
    }

    TensorT<T> backward(const TensorT<T>& dy) {
        const std::size_t lo = len_ - k_ + 1;
        if (dy.shape.size() != 3 || dy.shape[0] != batch_ || dy.shape[1] != c_out_ || dy.shape[2] != lo)
            throw std::invalid_argument("conv1d: gradient shape mismatch");
        w_->ensure_grad();
        b_->ensure_grad();
        TensorT<T> dx({batch_, c_in_, len_});
        for (std::size_t b = 0; b < batch_; ++b) {
            for (std::size_t co = 0; co < c_out_; ++co) {
                const T* dyrow = &dy.values[(b * c_out_ + co) * lo];
                for (std::size_t i = 0; i < lo; ++i) b_->grad[co] += dyrow[i];
                for (std::size_t ci = 0; ci < c_in_; ++ci) {
                    const T* xrow = &x_[(b * c_in_ + ci) * len_];
                    const T* krow = &w_->values[(co * c_in_ + ci) * k_];
                    T* kgrad = &w_->grad[(co * c_in_ + ci) * k_];
                    T* dxrow = &dx.values[(b * c_in_ + ci) * len_];
                    for (std::size_t t = 0; t < k_; ++t) {
                        kgrad[t] += detail::dot(dyrow, xrow + t, lo);
                        const T kv = krow[t];
                        for (std::size_t i = 0; i < lo; ++i) dxrow[i + t] += kv * dyrow[i];
                    }
                }
            }
        }
        return dx;
    }

    std::size_t out_channels() const { return c_out_; }

private:
    std::size_t c_in_, c_out_, k_, batch_ = 0, len_ = 0;
    TensorT<T>* w_;
    TensorT<T>* b_;
    std::vector<T> x_;
};

/// Single LSTM layer, zero initial state: [B, T, in] -> hidden sequence
/// [B, T, hidden]. Gate order in the fused weight matrices is i, f, g, o.
template <class T>
class Lstm {
public:
    Lstm(ParamStoreT<T>& store, const std::string& prefix, std::size_t in, std::size_t hidden,
         std::mt19937_64& rng)
        : in_(in), h_(hidden),
          wx_(&store.add(prefix + ".wx", {in, 4 * hidden})),
          wh_(&store.add(prefix + ".wh", {hidden, 4 * hidden})),
          b_(&store.add(prefix + ".bias", {4 * hidden})) {
        init_uniform_fanin(*wx_, in, rng);
        init_uniform_fanin(*wh_, hidden, rng);
        init_uniform_fanin(*b_, hidden, rng);
    }

    TensorT<T> forward(const TensorT<T>& x) {
        if (x.shape.size() != 3 || x.shape[2] != in_)
            throw std::invalid_argument("lstm: expected [B,T," + std::to_string(in_) + "] input");
        batch_ = x.shape[0];
        steps_ = x.shape[1];
        x_ = x.values;
        gates_.assign(steps_, std::vector<T>(batch_ * 4 * h_));
        cells_.assign(steps_, std::vector<T>(batch_ * h_));
        tanh_c_.assign(steps_, std::vector<T>(batch_ * h_));
        hidden_.assign(steps_, std::vector<T>(batch_ * h_));

        // the input contribution x W is step-independent: one big product
        std::vector<T> xw(batch_ * steps_ * 4 * h_);
        detail::gemm_nn(x.values.data(), wx_->values.data(), xw.data(), batch_ * steps_, in_,
                        4 * h_, false);

        TensorT<T> out({batch_, steps_, h_});
        for (std::size_t t = 0; t < steps_; ++t) {
            auto& pre = gates_[t];
            for (std::size_t b = 0; b < batch_; ++b) {
                const T* src = &xw[(b * steps_ + t) * 4 * h_];
                T* dst = &pre[b * 4 * h_];
                for (std::size_t j = 0; j < 4 * h_; ++j) dst[j] = src[j] + b_->values[j];
            }
            if (t > 0)
                detail::gemm_nn(hidden_[t - 1].data(), wh_->values.data(), pre.data(), batch_, h_,
                                4 * h_, true);
            auto& c = cells_[t];
            auto& tc = tanh_c_[t];
            auto& h = hidden_[t];
            for (std::size_t b = 0; b < batch_; ++b) {
                T* g = &pre[b * 4 * h_];
                const T* cprev = t > 0 ? &cells_[t - 1][b * h_] : nullptr;
                for (std::size_t j = 0; j < h_; ++j) {
                    const T gi = detail::sigmoid_act(g[j]);
                    const T gf = detail::sigmoid_act(g[h_ + j]);
                    const T gg = detail::tanh_act(g[2 * h_ + j]);
                    const T go = detail::sigmoid_act(g[3 * h_ + j]);
                    g[j] = gi;
                    g[h_ + j] = gf;
                    g[2 * h_ + j] = gg;
                    g[3 * h_ + j] = go;
                    const T cv = gf * (cprev ? cprev[j] : T(0)) + gi * gg;
                    c[b * h_ + j] = cv;
                    const T tcv = detail::tanh_act(cv);
                    tc[b * h_ + j] = tcv;
                    const T hv = go * tcv;
                    h[b * h_ + j] = hv;
                    out.values[(b * steps_ + t) * h_ + j] = hv;
                }
            }
        }
        return out;
    }

    TensorT<T> backward(const TensorT<T>& dout) {
        if (dout.shape.size() != 3 || dout.shape[0] != batch_ || dout.shape[1] != steps_ ||
            dout.shape[2] != h_)
            throw std::invalid_argument("lstm: gradient shape mismatch");
        wx_->ensure_grad();
        wh_->ensure_grad();
        b_->ensure_grad();
        std::vector<T> dh(batch_ * h_, T(0)), dc(batch_ * h_, T(0));
        std::vector<T> dpre(batch_ * 4 * h_), dhprev(batch_ * h_);
        std::vector<T> dpre_flat(batch_ * steps_ * 4 * h_);  // rows ordered like x
        for (std::size_t t = steps_; t-- > 0;) {
            for (std::size_t b = 0; b < batch_; ++b)
                for (std::size_t j = 0; j < h_; ++j)
                    dh[b * h_ + j] += dout.values[(b * steps_ + t) * h_ + j];
            const auto& g = gates_[t];
            const auto& tc = tanh_c_[t];
            for (std::size_t b = 0; b < batch_; ++b) {
                const T* gb = &g[b * 4 * h_];
                const T* cprev = t > 0 ? &cells_[t - 1][b * h_] : nullptr;
                T* dp = &dpre[b * 4 * h_];
                for (std::size_t j = 0; j < h_; ++j) {
                    const T gi = gb[j], gf = gb[h_ + j], gg = gb[2 * h_ + j], go = gb[3 * h_ + j];
                    const T tcv = tc[b * h_ + j];
                    const T dhv = dh[b * h_ + j];
                    const T dcv = dhv * go * (T(1) - tcv * tcv) + dc[b * h_ + j];
                    dp[j] = dcv * gg * gi * (T(1) - gi);
                    dp[h_ + j] = dcv * (cprev ? cprev[j] : T(0)) * gf * (T(1) - gf);
                    dp[2 * h_ + j] = dcv * gi * (T(1) - gg * gg);
                    dp[3 * h_ + j] = dhv * tcv * go * (T(1) - go);
                    dc[b * h_ + j] = dcv * gf;
                }
            }
            for (std::size_t b = 0; b < batch_; ++b) {
                std::copy(&dpre[b * 4 * h_], &dpre[b * 4 * h_] + 4 * h_,
                          &dpre_flat[(b * steps_ + t) * 4 * h_]);
                for (std::size_t j = 0; j < 4 * h_; ++j) b_->grad[j] += dpre[b * 4 * h_ + j];
            }
            if (t > 0) {
                detail::gemm_tn(hidden_[t - 1].data(), dpre.data(), wh_->grad.data(), batch_, h_,
                                4 * h_, true);
                detail::gemm_nt(dpre.data(), wh_->values.data(), dhprev.data(), batch_, 4 * h_, h_,
                                false);
                dh = dhprev;
            }
        }
        // step-independent products collapse into two large ones
        detail::gemm_tn(x_.data(), dpre_flat.data(), wx_->grad.data(), batch_ * steps_, in_, 4 * h_,
                        true);
        TensorT<T> dx({batch_, steps_, in_});
        detail::gemm_nt(dpre_flat.data(), wx_->values.data(), dx.values.data(), batch_ * steps_,
                        4 * h_, in_, false);
        return dx;
    }

    std::size_t hidden_size() const { return h_; }

private:
    std::size_t in_, h_, batch_ = 0, steps_ = 0;
    TensorT<T>* wx_;
    TensorT<T>* wh_;
    TensorT<T>* b_;
    std::vector<T> x_;
    std::vector<std::vector<T>> gates_, cells_, tanh_c_, hidden_;
};

/// Layer normalization over the last dimension; leading dimensions are
/// treated as rows.
template <class T>
class LayerNorm {
public:
    LayerNorm(ParamStoreT<T>& store, const std::string& prefix, std::size_t dim)
        : d_(dim),
          gamma_(&store.add(prefix + ".gamma", {dim})),
          beta_(&store.add(prefix + ".beta", {dim})) {
        std::fill(gamma_->values.begin(), gamma_->values.end(), T(1));
    }

    TensorT<T> forward(const TensorT<T>& x) {
        if (x.shape.empty() || x.shape.back() != d_)
            throw std::invalid_argument("layer_norm: last dim mismatch");
        rows_ = x.numel() / d_;
        xhat_.resize(x.numel());
        inv_std_.resize(rows_);
        TensorT<T> y(x.shape);
        for (std::size_t r = 0; r < rows_; ++r) {
            const T* xi = &x.values[r * d_];
            T mu = T(0);
            for (std::size_t j = 0; j < d_; ++j) mu += xi[j];
            mu /= static_cast<T>(d_);
            T var = T(0);
            for (std::size_t j = 0; j < d_; ++j) var += (xi[j] - mu) * (xi[j] - mu);
            var /= static_cast<T>(d_);
            const T inv = T(1) / std::sqrt(var + T(1e-5));
            inv_std_[r] = inv;
            for (std::size_t j = 0; j < d_; ++j) {
                const T xh = (xi[j] - mu) * inv;
                xhat_[r * d_ + j] = xh;
                y.values[r * d_ + j] = gamma_->values[j] * xh + beta_->values[j];
            }
        }
        return y;
    }

    TensorT<T> backward(const TensorT<T>& dy) {
        gamma_->ensure_grad();
        beta_->ensure_grad();
        TensorT<T> dx(dy.shape);
        for (std::size_t r = 0; r < rows_; ++r) {
            const T* dyi = &dy.values[r * d_];
            const T* xh = &xhat_[r * d_];
            T sum_dxh = T(0), sum_dxh_xh = T(0);
            for (std::size_t j = 0; j < d_; ++j) {
                const T dxh = dyi[j] * gamma_->values[j];
                sum_dxh += dxh;
                sum_dxh_xh += dxh * xh[j];
                gamma_->grad[j] += dyi[j] * xh[j];
                beta_->grad[j] += dyi[j];
            }
            const T inv_d = T(1) / static_cast<T>(d_);
            for (std::size_t j = 0; j < d_; ++j) {
                const T dxh = dyi[j] * gamma_->values[j];
                dx.values[r * d_ + j] =
                    inv_std_[r] * (dxh - sum_dxh * inv_d - xh[j] * sum_dxh_xh * inv_d);
            }
        }
        return dx;
    }

private:
    std::size_t d_, rows_ = 0;
    TensorT<T>* gamma_;
    TensorT<T>* beta_;
    std::vector<T> xhat_;
    std::vector<T> inv_std_;
};

/// Multi-head scaled dot-product self-attention with learned Q, K, V, O
/// projections: [B, T, d] -> [B, T, d]. Attention rows sum to 1. Heads are
/// repacked into contiguous [T, dh] tiles so the score and context products
/// run through the dense kernels.
template <class T>
class SelfAttention {
public:
    SelfAttention(ParamStoreT<T>& store, const std::string& prefix, std::size_t d, std::size_t heads,
                  std::mt19937_64& rng)
        : d_(d), heads_(heads),
          q_(store, prefix + ".q", d, d, rng),
          k_(store, prefix + ".k", d, d, rng),
          v_(store, prefix + ".v", d, d, rng),
          o_(store, prefix + ".o", d, d, rng) {
        if (heads == 0 || d % heads != 0)
            throw std::invalid_argument("attention: d_model must be divisible by heads");
        dh_ = d / heads;
    }

    TensorT<T> forward(const TensorT<T>& x) {
        if (x.shape.size() != 3 || x.shape[2] != d_)
            throw std::invalid_argument("attention: expected [B,T,d] input");
        batch_ = x.shape[0];
        steps_ = x.shape[1];
        const std::size_t rows = batch_ * steps_;
        const std::size_t tiles = batch_ * heads_;
        TensorT<T> flat({rows, d_}, x.values);
        pack_heads(q_.forward(flat).values, q_heads_);
        pack_heads(k_.forward(flat).values, k_heads_);
        pack_heads(v_.forward(flat).values, v_heads_);

        probs_.resize(tiles * steps_ * steps_);
        ctx_heads_.resize(tiles * steps_ * dh_);
        const T scale = T(1) / std::sqrt(static_cast<T>(dh_));
        std::vector<T> scores(steps_ * steps_);
        for (std::size_t tile = 0; tile < tiles; ++tile) {
            const T* qh = &q_heads_[tile * steps_ * dh_];
            const T* kh = &k_heads_[tile * steps_ * dh_];
            const T* vh = &v_heads_[tile * steps_ * dh_];
            detail::gemm_nt(qh, kh, scores.data(), steps_, dh_, steps_, false);
            T* prow_base = &probs_[tile * steps_ * steps_];
            for (std::size_t t = 0; t < steps_; ++t) {
                const T* srow = &scores[t * steps_];
                T mx = srow[0] * scale;
                for (std::size_t s = 1; s < steps_; ++s) mx = std::max(mx, srow[s] * scale);
                T* prow = prow_base + t * steps_;
                T denom = T(0);
                for (std::size_t s = 0; s < steps_; ++s) {
                    prow[s] = detail::exp_act(srow[s] * scale - mx);
                    denom += prow[s];
                }
                const T inv = T(1) / denom;
                for (std::size_t s = 0; s < steps_; ++s) prow[s] *= inv;
            }
            detail::gemm_nn(prow_base, vh, &ctx_heads_[tile * steps_ * dh_], steps_, steps_, dh_,
                            false);
        }
        TensorT<T> ctx({rows, d_});
        unpack_heads(ctx_heads_, ctx.values);
        TensorT<T> out = o_.forward(ctx);
        out.shape = {batch_, steps_, d_};
        return out;
    }

    TensorT<T> backward(const TensorT<T>& dout) {
        const std::size_t rows = batch_ * steps_;
        const std::size_t tiles = batch_ * heads_;
        TensorT<T> dflat({rows, d_}, dout.values);
        TensorT<T> dctx = o_.backward(dflat);
        std::vector<T> dctx_heads;
        pack_heads(dctx.values, dctx_heads);

        std::vector<T> dq_heads(tiles * steps_ * dh_), dk_heads(tiles * steps_ * dh_),
            dv_heads(tiles * steps_ * dh_);
        const T scale = T(1) / std::sqrt(static_cast<T>(dh_));
        std::vector<T> da(steps_ * steps_), dscores(steps_ * steps_);
        for (std::size_t tile = 0; tile < tiles; ++tile) {
            const T* dch = &dctx_heads[tile * steps_ * dh_];
            const T* vh = &v_heads_[tile * steps_ * dh_];
            const T* qh = &q_heads_[tile * steps_ * dh_];
            const T* kh = &k_heads_[tile * steps_ * dh_];
            const T* prow_base = &probs_[tile * steps_ * steps_];
            // dA = dctx V^T; dV = A^T dctx
            detail::gemm_nt(dch, vh, da.data(), steps_, dh_, steps_, false);
            detail::gemm_tn(prow_base, dch, &dv_heads[tile * steps_ * dh_], steps_, steps_, dh_,
                            false);
            // softmax rows: dS = A o (dA - sum(dA o A)) * scale
            for (std::size_t t = 0; t < steps_; ++t) {
                const T* prow = prow_base + t * steps_;
                const T* darow = &da[t * steps_];
                const T inner = detail::dot(prow, darow, steps_);
                T* dsrow = &dscores[t * steps_];
                for (std::size_t s = 0; s < steps_; ++s)
                    dsrow[s] = prow[s] * (darow[s] - inner) * scale;
            }
            // dQ = dS K; dK = dS^T Q
            detail::gemm_nn(dscores.data(), kh, &dq_heads[tile * steps_ * dh_], steps_, steps_, dh_,
                            false);
            detail::gemm_tn(dscores.data(), qh, &dk_heads[tile * steps_ * dh_], steps_, steps_, dh_,
                            false);
        }
        TensorT<T> dq({rows, d_}), dk({rows, d_}), dv({rows, d_});
        unpack_heads(dq_heads, dq.values);
        unpack_heads(dk_heads, dk.values);
        unpack_heads(dv_heads, dv.values);
        TensorT<T> dx = q_.backward(dq);
        const TensorT<T> dxk = k_.backward(dk);
        const TensorT<T> dxv = v_.backward(dv);
        for (std::size_t i = 0; i < dx.numel(); ++i) dx.values[i] += dxk.values[i] + dxv.values[i];
        dx.shape = {batch_, steps_, d_};
        return dx;
    }

private:
    // [B*T, d] -> per-(batch, head) contiguous [T, dh] tiles
    void pack_heads(const std::vector<T>& flat, std::vector<T>& heads) const {
        heads.resize(batch_ * heads_ * steps_ * dh_);
        for (std::size_t b = 0; b < batch_; ++b)
            for (std::size_t h = 0; h < heads_; ++h)
                for (std::size_t t = 0; t < steps_; ++t)
                    std::copy(&flat[(b * steps_ + t) * d_ + h * dh_],
                              &flat[(b * steps_ + t) * d_ + h * dh_] + dh_,
                              &heads[((b * heads_ + h) * steps_ + t) * dh_]);
    }

    void unpack_heads(const std::vector<T>& heads, std::vector<T>& flat) const {
        for (std::size_t b = 0; b < batch_; ++b)
            for (std::size_t h = 0; h < heads_; ++h)
                for (std::size_t t = 0; t < steps_; ++t)
                    std::copy(&heads[((b * heads_ + h) * steps_ + t) * dh_],
                              &heads[((b * heads_ + h) * steps_ + t) * dh_] + dh_,
                              &flat[(b * steps_ + t) * d_ + h * dh_]);
    }

    std::size_t d_, heads_, dh_ = 0, batch_ = 0, steps_ = 0;
    Linear<T> q_, k_, v_, o_;
    std::vector<T> q_heads_, k_heads_, v_heads_, ctx_heads_;
    std::vector<T> probs_;
};

/// Sinusoidal position table [T, d]; deterministic, no parameters.
template <class T>
TensorT<T> positional_encoding(std::size_t steps, std::size_t d) {
    if (steps == 0 || d == 0) throw std::invalid_argument("positional_encoding: T and d must be >= 1");
    TensorT<T> pe({steps, d});
    for (std::size_t pos = 0; pos < steps; ++pos) {
        for (std::size_t j = 0; j + 1 < d; j += 2) {
            const double freq = std::pow(10000.0, -static_cast<double>(j) / static_cast<double>(d));
            pe.values[pos * d + j] = static_cast<T>(std::sin(static_cast<double>(pos) * freq));
            pe.values[pos * d + j + 1] = static_cast<T>(std::cos(static_cast<double>(pos) * freq));
        }
        if (d % 2 == 1) {
            const double freq = std::pow(10000.0, -static_cast<double>(d - 1) / static_cast<double>(d));
            pe.values[pos * d + d - 1] = static_cast<T>(std::sin(static_cast<double>(pos) * freq));
        }
    }
    return pe;
}

/// p_i = exp(z_i / tau) / sum_j exp(z_j / tau), computed with max subtraction.
template <class T>
std::vector<T> tempered_softmax(const std::vector<T>& z, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("tempered_softmax: tau must be > 0");
    if (z.empty()) throw std::invalid_argument("tempered_softmax: empty input");
    for (T v : z)
        if (!std::isfinite(static_cast<double>(v)))
            throw std::invalid_argument("tempered_softmax: non-finite logit");
    T mx = z[0];
    for (T v : z) mx = std::max(mx, v);
    std::vector<T> p(z.size());
    T denom = T(0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = detail::exp_act((z[i] - mx) / static_cast<T>(tau));
        denom += p[i];
    }
    for (auto& v : p) v /= denom;
    return p;
}

/// Mean of squared differences over all elements; optionally writes
/// d loss / d pred = 2 (pred - target) / N.
template <class T>
double mse_loss(const TensorT<T>& pred, const TensorT<T>& target, TensorT<T>* dpred = nullptr) {
    if (!pred.same_shape(target)) throw std::invalid_argument("mse_loss: shape mismatch");
    if (pred.numel() == 0) throw std::invalid_argument("mse_loss: empty tensors");
    const double n = static_cast<double>(pred.numel());
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.numel(); ++i) {
        const double d = static_cast<double>(pred.values[i]) - static_cast<double>(target.values[i]);
        acc += d * d;
    }
    if (dpred) {
        *dpred = TensorT<T>(pred.shape);
        for (std::size_t i = 0; i < pred.numel(); ++i)
            dpred->values[i] =
                static_cast<T>(2.0 * (static_cast<double>(pred.values[i]) -
                                      static_cast<double>(target.values[i])) / n);
    }
    return acc / n;
}

}  // namespace gluconet::nn
