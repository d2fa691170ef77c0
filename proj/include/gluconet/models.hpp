#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gluconet/layers.hpp"
#include "gluconet/tensor.hpp"

namespace gluconet::nn {

/// Two groups of two back-to-back convolutional layers, an LSTM stack per
/// lstm_vec, then a two-layer head. The convolution output sequence (length
/// shrinks by 2 per valid conv) feeds the LSTM as [time, channels]; with
/// flatten_single_step the literal flatten-to-one-step wiring is used instead
/// and the first LSTM input must equal channels * remaining length.
struct LowFreqConfig {
    std::size_t input_channels = 3;
    std::size_t window = 36;
    std::size_t horizon = 6;
    std::size_t conv_g1 = 32;  // width of both group-1 convs
    std::size_t conv_g2 = 64;  // width of both group-2 convs
    std::size_t kernel = 3;
    std::vector<std::pair<std::size_t, std::size_t>> lstm_vec{{64, 32}};
    std::size_t fc_hidden = 32;
    bool flatten_single_step = false;

    /// Config named by its LSTM stack, e.g. {(128,64)}: group-2 conv width is
    /// sized to the first LSTM input so the stack is consistent by construction.
    static LowFreqConfig for_lstm_vec(std::vector<std::pair<std::size_t, std::size_t>> lstm_vec,
                                      std::size_t horizon);
    void validate() const;
    std::string describe() const;
};

/// Single-encoder-layer transformer: input projection to d_model, sinusoidal
/// positions, self-attention and feed-forward blocks with residual + layer
/// norm, final-step pooling, linear head.
struct TransformerConfig {
    std::size_t input_channels = 3;
    std::size_t window = 36;
    std::size_t horizon = 6;
    std::size_t d_model = 64;
    std::size_t heads = 4;
    std::size_t ff_dim = 128;

    static TransformerConfig teacher(std::size_t horizon);  // 64 dims, 4 heads, 128 ff
    static TransformerConfig student(std::size_t horizon);  // 32 dims, 2 heads, 64 ff
    void validate() const;
    std::string describe() const;
};

/// Reference 1D-CNN + LSTM: two convs (-> 64 -> 128, kernel 3), LSTM(128, 64),
/// three fully connected layers down to the horizon.
struct BaselineConfig {
    std::size_t input_channels = 3;
    std::size_t window = 36;
    std::size_t horizon = 6;
    std::size_t conv1 = 64;
    std::size_t conv2 = 128;
    std::size_t kernel = 3;
    std::size_t lstm_hidden = 64;
    std::size_t fc1 = 32;
    std::size_t fc2 = 16;

    void validate() const;
    std::string describe() const;
};

struct LayerCount {
    std::string name;
    std::size_t params;
};

template <class T>
class LowFreqModel {
public:
    LowFreqModel(const LowFreqConfig& cfg, std::uint64_t seed);

    TensorT<T> forward(const TensorT<T>& x);  // [B, W, C] -> [B, h]
    void backward(const TensorT<T>& dy);
    ParamStoreT<T>& params() { return params_; }
    const ParamStoreT<T>& params() const { return params_; }
    const LowFreqConfig& config() const { return cfg_; }
    void set_kink_tracking(bool on);
    std::uint64_t kink_signature() const;

private:
    LowFreqConfig cfg_;
    ParamStoreT<T> params_;
    std::unique_ptr<Conv1d<T>> conv_[4];
    Relu<T> relu_[4];
    std::vector<std::unique_ptr<Lstm<T>>> lstm_;
    std::unique_ptr<Linear<T>> fc1_, fc2_;
    Relu<T> fc_relu_;
    std::size_t batch_ = 0, seq_len_ = 0;
};

template <class T>
class TransformerModel {
public:
    TransformerModel(const TransformerConfig& cfg, std::uint64_t seed);

    TensorT<T> forward(const TensorT<T>& x);  // [B, W, C] -> [B, h]
    void backward(const TensorT<T>& dy);
    ParamStoreT<T>& params() { return params_; }
    const ParamStoreT<T>& params() const { return params_; }
    const TransformerConfig& config() const { return cfg_; }
    void set_kink_tracking(bool on) { ff_relu_.track_pattern = on; }
    std::uint64_t kink_signature() const { return ff_relu_.pattern_hash(); }

private:
    TransformerConfig cfg_;
    ParamStoreT<T> params_;
    std::unique_ptr<Linear<T>> in_proj_;
    TensorT<T> pe_;
    std::unique_ptr<SelfAttention<T>> attn_;
    std::unique_ptr<LayerNorm<T>> ln1_, ln2_;
    std::unique_ptr<Linear<T>> ff1_, ff2_;
    Relu<T> ff_relu_;
    std::unique_ptr<Linear<T>> head_;
    TensorT<T> attn_in_, ff_in_;
    std::size_t batch_ = 0;
};

template <class T>
class BaselineModel {
public:
    BaselineModel(const BaselineConfig& cfg, std::uint64_t seed);

    TensorT<T> forward(const TensorT<T>& x);  // [B, W, C] -> [B, h]
    void backward(const TensorT<T>& dy);
    ParamStoreT<T>& params() { return params_; }
    const ParamStoreT<T>& params() const { return params_; }
    const BaselineConfig& config() const { return cfg_; }
    void set_kink_tracking(bool on);
    std::uint64_t kink_signature() const;

private:
    BaselineConfig cfg_;
    ParamStoreT<T> params_;
    std::unique_ptr<Conv1d<T>> conv1_, conv2_;
    Relu<T> relu1_, relu2_, fc_relu1_, fc_relu2_;
    std::unique_ptr<Lstm<T>> lstm_;
    std::unique_ptr<Linear<T>> fc1_, fc2_, fc3_;
    std::size_t batch_ = 0, seq_len_ = 0;
};

/// Exact trainable scalar count.
template <class T>
std::size_t count_params(const ParamStoreT<T>& params) {
    return params.total_params();
}

/// Per-tensor breakdown in insertion order.
template <class T>
std::vector<LayerCount> param_breakdown(const ParamStoreT<T>& params) {
    std::vector<LayerCount> out;
    out.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i)
        out.push_back({params.name(i), params.tensor(i).numel()});
    return out;
}

}  // namespace gluconet::nn
