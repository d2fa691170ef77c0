#include "gluconet/models.hpp"

#include <sstream>
#include <stdexcept>

namespace gluconet::nn {

namespace {

// [B, W, C] -> [B, C, W]
template <class T>
TensorT<T> to_channel_major(const TensorT<T>& x) {
    const std::size_t b = x.shape[0], w = x.shape[1], c = x.shape[2];
    TensorT<T> y({b, c, w});
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t r = 0; r < w; ++r)
            for (std::size_t j = 0; j < c; ++j)
                y.values[(i * c + j) * w + r] = x.values[(i * w + r) * c + j];
    return y;
}

// [B, C, L] -> [B, L, C]
template <class T>
TensorT<T> to_time_major(const TensorT<T>& x) {
    const std::size_t b = x.shape[0], c = x.shape[1], l = x.shape[2];
    TensorT<T> y({b, l, c});
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < c; ++j)
            for (std::size_t r = 0; r < l; ++r)
                y.values[(i * l + r) * c + j] = x.values[(i * c + j) * l + r];
    return y;
}

template <class T>
TensorT<T> rows_at_last_step(const TensorT<T>& seq) {
    const std::size_t b = seq.shape[0], t = seq.shape[1], d = seq.shape[2];
    TensorT<T> y({b, d});
    for (std::size_t i = 0; i < b; ++i)
        std::copy(&seq.values[(i * t + t - 1) * d], &seq.values[(i * t + t - 1) * d] + d,
                  &y.values[i * d]);
    return y;
}

template <class T>
TensorT<T> scatter_to_last_step(const TensorT<T>& dy, std::size_t steps) {
    const std::size_t b = dy.shape[0], d = dy.shape[1];
    TensorT<T> out({b, steps, d});
    for (std::size_t i = 0; i < b; ++i)
        std::copy(&dy.values[i * d], &dy.values[i * d] + d,
                  &out.values[(i * steps + steps - 1) * d]);
    return out;
}

std::uint64_t combine_hash(std::uint64_t a, std::uint64_t b) {
    return (a ^ b) * 1099511628211ull + 0x9e3779b97f4a7c15ull;
}

}  // namespace

// --- configs ---------------------------------------------------------------

LowFreqConfig LowFreqConfig::for_lstm_vec(std::vector<std::pair<std::size_t, std::size_t>> lstm_vec,
                                          std::size_t horizon) {
    LowFreqConfig cfg;
    if (lstm_vec.empty()) throw std::invalid_argument("low-freq config: lstm_vec must not be empty");
    cfg.conv_g2 = lstm_vec.front().first;
    cfg.lstm_vec = std::move(lstm_vec);
    cfg.horizon = horizon;
    cfg.validate();
    return cfg;
}

void LowFreqConfig::validate() const {
    if (input_channels == 0 || horizon == 0) throw std::invalid_argument("low-freq config: empty dims");
    if (lstm_vec.empty()) throw std::invalid_argument("low-freq config: lstm_vec must not be empty");
    const std::size_t shrink = 4 * (kernel - 1);
    if (window <= shrink)
        throw std::invalid_argument("low-freq config: window too small for the conv stack");
    const std::size_t conv_out_len = window - shrink;
    const std::size_t lstm_in = flatten_single_step ? conv_g2 * conv_out_len : conv_g2;
    if (lstm_vec.front().first != lstm_in)
        throw std::invalid_argument("low-freq config: first LSTM input (" +
                                    std::to_string(lstm_vec.front().first) +
                                    ") must equal conv output width (" + std::to_string(lstm_in) + ")");
    for (std::size_t i = 1; i < lstm_vec.size(); ++i)
        if (lstm_vec[i].first != lstm_vec[i - 1].second)
            throw std::invalid_argument("low-freq config: LSTM layer dims do not chain");
    if (lstm_vec.back().second == 0 || fc_hidden == 0)
        throw std::invalid_argument("low-freq config: zero-width layer");
}

std::string LowFreqConfig::describe() const {
    std::ostringstream os;
    os << "low-freq CNN-LSTM {conv (" << input_channels << "->" << conv_g1 << "->" << conv_g1
       << "), (" << conv_g1 << "->" << conv_g2 << "->" << conv_g2 << "), lstm [";
    for (std::size_t i = 0; i < lstm_vec.size(); ++i)
        os << (i ? "," : "") << "(" << lstm_vec[i].first << "," << lstm_vec[i].second << ")";
    os << "], fc " << lstm_vec.back().second << "->" << fc_hidden << "->" << horizon << "}";
    return os.str();
}

TransformerConfig TransformerConfig::teacher(std::size_t horizon) {
    TransformerConfig cfg;
    cfg.d_model = 64;
    cfg.heads = 4;
    cfg.ff_dim = 128;
    cfg.horizon = horizon;
    return cfg;
}

TransformerConfig TransformerConfig::student(std::size_t horizon) {
    TransformerConfig cfg;
    cfg.d_model = 32;
    cfg.heads = 2;
    cfg.ff_dim = 64;
    cfg.horizon = horizon;
    return cfg;
}

void TransformerConfig::validate() const {
    if (input_channels == 0 || horizon == 0 || window == 0 || d_model == 0 || ff_dim == 0)
        throw std::invalid_argument("transformer config: empty dims");
    if (heads == 0 || d_model % heads != 0)
        throw std::invalid_argument("transformer config: d_model must be divisible by heads");
}

std::string TransformerConfig::describe() const {
    std::ostringstream os;
    os << "transformer encoder {d=" << d_model << ", heads=" << heads << ", ff=" << ff_dim
       << ", horizon=" << horizon << "}";
    return os.str();
}

void BaselineConfig::validate() const {
    if (input_channels == 0 || horizon == 0) throw std::invalid_argument("baseline config: empty dims");
    if (window <= 2 * (kernel - 1))
        throw std::invalid_argument("baseline config: window too small for the conv stack");
}

std::string BaselineConfig::describe() const {
    std::ostringstream os;
    os << "baseline 1D-CNN+LSTM {conv " << input_channels << "->" << conv1 << "->" << conv2
       << ", lstm (" << conv2 << "," << lstm_hidden << "), fc " << lstm_hidden << "->" << fc1 << "->"
       << fc2 << "->" << horizon << "}";
    return os.str();
}

// --- low-frequency model ----------------------------------------------------

template <class T>
LowFreqModel<T>::LowFreqModel(const LowFreqConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    std::mt19937_64 rng(seed);
    const std::size_t widths[5] = {cfg.input_channels, cfg.conv_g1, cfg.conv_g1, cfg.conv_g2,
                                   cfg.conv_g2};
    for (int i = 0; i < 4; ++i)
        conv_[i] = std::make_unique<Conv1d<T>>(params_, "conv" + std::to_string(i + 1), widths[i],
                                               widths[i + 1], cfg.kernel, rng);
    for (std::size_t i = 0; i < cfg.lstm_vec.size(); ++i)
        lstm_.push_back(std::make_unique<Lstm<T>>(params_, "lstm" + std::to_string(i + 1),
                                                  cfg.lstm_vec[i].first, cfg.lstm_vec[i].second, rng));
    fc1_ = std::make_unique<Linear<T>>(params_, "fc1", cfg.lstm_vec.back().second, cfg.fc_hidden, rng);
    fc2_ = std::make_unique<Linear<T>>(params_, "fc2", cfg.fc_hidden, cfg.horizon, rng);
}

template <class T>
TensorT<T> LowFreqModel<T>::forward(const TensorT<T>& x) {
    if (x.shape.size() != 3 || x.shape[1] != cfg_.window || x.shape[2] != cfg_.input_channels)
        throw std::invalid_argument("low-freq model: expected [B," + std::to_string(cfg_.window) +
                                    "," + std::to_string(cfg_.input_channels) + "] input");
    batch_ = x.shape[0];
    TensorT<T> h = to_channel_major(x);
    for (int i = 0; i < 4; ++i) h = relu_[i].forward(conv_[i]->forward(h));
    if (cfg_.flatten_single_step) {
        seq_len_ = 1;
        h.shape = {batch_, 1, h.shape[1] * h.shape[2]};
    } else {
        h = to_time_major(h);
        seq_len_ = h.shape[1];
    }
    for (auto& l : lstm_) h = l->forward(h);
    TensorT<T> pooled = rows_at_last_step(h);
    return fc2_->forward(fc_relu_.forward(fc1_->forward(pooled)));
}

template <class T>
void LowFreqModel<T>::backward(const TensorT<T>& dy) {
    TensorT<T> d = fc1_->backward(fc_relu_.backward(fc2_->backward(dy)));
    d = scatter_to_last_step(d, seq_len_);
    for (auto it = lstm_.rbegin(); it != lstm_.rend(); ++it) d = (*it)->backward(d);
    if (cfg_.flatten_single_step) {
        const std::size_t len = cfg_.window - 4 * (cfg_.kernel - 1);
        d.shape = {batch_, cfg_.conv_g2, len};
    } else {
        d = to_channel_major(d);  // [B, L, C] -> [B, C, L]
    }
    for (int i = 3; i >= 0; --i) d = conv_[i]->backward(relu_[i].backward(d));
}

template <class T>
void LowFreqModel<T>::set_kink_tracking(bool on) {
    for (auto& r : relu_) r.track_pattern = on;
    fc_relu_.track_pattern = on;
}

template <class T>
std::uint64_t LowFreqModel<T>::kink_signature() const {
    std::uint64_t h = 0;
    for (const auto& r : relu_) h = combine_hash(h, r.pattern_hash());
    return combine_hash(h, fc_relu_.pattern_hash());
}

// --- transformer ------------------------------------------------------------

template <class T>
TransformerModel<T>::TransformerModel(const TransformerConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    std::mt19937_64 rng(seed);
    in_proj_ = std::make_unique<Linear<T>>(params_, "in_proj", cfg.input_channels, cfg.d_model, rng);
    attn_ = std::make_unique<SelfAttention<T>>(params_, "attn", cfg.d_model, cfg.heads, rng);
    ln1_ = std::make_unique<LayerNorm<T>>(params_, "ln1", cfg.d_model);
    ff1_ = std::make_unique<Linear<T>>(params_, "ff1", cfg.d_model, cfg.ff_dim, rng);
    ff2_ = std::make_unique<Linear<T>>(params_, "ff2", cfg.ff_dim, cfg.d_model, rng);
    ln2_ = std::make_unique<LayerNorm<T>>(params_, "ln2", cfg.d_model);
    head_ = std::make_unique<Linear<T>>(params_, "head", cfg.d_model, cfg.horizon, rng);
    pe_ = positional_encoding<T>(cfg.window, cfg.d_model);
}

template <class T>
TensorT<T> TransformerModel<T>::forward(const TensorT<T>& x) {
    if (x.shape.size() != 3 || x.shape[1] != cfg_.window || x.shape[2] != cfg_.input_channels)
        throw std::invalid_argument("transformer: expected [B," + std::to_string(cfg_.window) + "," +
                                    std::to_string(cfg_.input_channels) + "] input");
    batch_ = x.shape[0];
    const std::size_t w = cfg_.window, d = cfg_.d_model;
    TensorT<T> flat({batch_ * w, cfg_.input_channels}, x.values);
    TensorT<T> a0 = in_proj_->forward(flat);
    for (std::size_t i = 0; i < batch_; ++i)
        for (std::size_t t = 0; t < w; ++t)
            for (std::size_t j = 0; j < d; ++j)
                a0.values[(i * w + t) * d + j] += pe_.values[t * d + j];
    attn_in_ = a0;
    attn_in_.shape = {batch_, w, d};
    TensorT<T> a1 = attn_->forward(attn_in_);
    TensorT<T> sum1({batch_ * w, d});
    for (std::size_t i = 0; i < sum1.numel(); ++i) sum1.values[i] = a0.values[i] + a1.values[i];
    TensorT<T> a2 = ln1_->forward(sum1);
    ff_in_ = a2;
    TensorT<T> a3 = ff2_->forward(ff_relu_.forward(ff1_->forward(a2)));
    TensorT<T> sum2({batch_ * w, d});
    for (std::size_t i = 0; i < sum2.numel(); ++i) sum2.values[i] = a2.values[i] + a3.values[i];
    TensorT<T> a4 = ln2_->forward(sum2);
    a4.shape = {batch_, w, d};
    return head_->forward(rows_at_last_step(a4));
}

template <class T>
void TransformerModel<T>::backward(const TensorT<T>& dy) {
    const std::size_t w = cfg_.window, d = cfg_.d_model;
    TensorT<T> dpooled = head_->backward(dy);
    TensorT<T> da4 = scatter_to_last_step(dpooled, w);
    da4.shape = {batch_ * w, d};
    TensorT<T> dsum2 = ln2_->backward(da4);
    TensorT<T> da2 = ff1_->backward(ff_relu_.backward(ff2_->backward(dsum2)));
    for (std::size_t i = 0; i < da2.numel(); ++i) da2.values[i] += dsum2.values[i];
    TensorT<T> dsum1 = ln1_->backward(da2);
    TensorT<T> da1 = dsum1;
    da1.shape = {batch_, w, d};
    TensorT<T> da0 = attn_->backward(da1);
    da0.shape = {batch_ * w, d};
    for (std::size_t i = 0; i < da0.numel(); ++i) da0.values[i] += dsum1.values[i];
    in_proj_->backward(da0);
}

// --- baseline ----------------------------------------------------------------

template <class T>
BaselineModel<T>::BaselineModel(const BaselineConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    std::mt19937_64 rng(seed);
    conv1_ = std::make_unique<Conv1d<T>>(params_, "conv1", cfg.input_channels, cfg.conv1, cfg.kernel, rng);
    conv2_ = std::make_unique<Conv1d<T>>(params_, "conv2", cfg.conv1, cfg.conv2, cfg.kernel, rng);
    lstm_ = std::make_unique<Lstm<T>>(params_, "lstm", cfg.conv2, cfg.lstm_hidden, rng);
    fc1_ = std::make_unique<Linear<T>>(params_, "fc1", cfg.lstm_hidden, cfg.fc1, rng);
    fc2_ = std::make_unique<Linear<T>>(params_, "fc2", cfg.fc1, cfg.fc2, rng);
    fc3_ = std::make_unique<Linear<T>>(params_, "fc3", cfg.fc2, cfg.horizon, rng);
}

template <class T>
TensorT<T> BaselineModel<T>::forward(const TensorT<T>& x) {
    if (x.shape.size() != 3 || x.shape[1] != cfg_.window || x.shape[2] != cfg_.input_channels)
        throw std::invalid_argument("baseline: expected [B," + std::to_string(cfg_.window) + "," +
                                    std::to_string(cfg_.input_channels) + "] input");
    batch_ = x.shape[0];
    TensorT<T> h = to_channel_major(x);
    h = relu1_.forward(conv1_->forward(h));
    h = relu2_.forward(conv2_->forward(h));
    h = to_time_major(h);
    seq_len_ = h.shape[1];
    h = lstm_->forward(h);
    TensorT<T> pooled = rows_at_last_step(h);
    TensorT<T> f = fc_relu1_.forward(fc1_->forward(pooled));
    f = fc_relu2_.forward(fc2_->forward(f));
    return fc3_->forward(f);
}

template <class T>
void BaselineModel<T>::backward(const TensorT<T>& dy) {
    TensorT<T> d = fc2_->backward(fc_relu2_.backward(fc3_->backward(dy)));
    d = fc1_->backward(fc_relu1_.backward(d));
    d = scatter_to_last_step(d, seq_len_);
    d = lstm_->backward(d);
    d = to_channel_major(d);
    d = conv2_->backward(relu2_.backward(d));
    conv1_->backward(relu1_.backward(d));
}

template <class T>
void BaselineModel<T>::set_kink_tracking(bool on) {
    relu1_.track_pattern = on;
    relu2_.track_pattern = on;
    fc_relu1_.track_pattern = on;
    fc_relu2_.track_pattern = on;
}

template <class T>
std::uint64_t BaselineModel<T>::kink_signature() const {
    std::uint64_t h = combine_hash(relu1_.pattern_hash(), relu2_.pattern_hash());
    h = combine_hash(h, fc_relu1_.pattern_hash());
    return combine_hash(h, fc_relu2_.pattern_hash());
}

template class LowFreqModel<float>;
template class LowFreqModel<double>;
template class TransformerModel<float>;
template class TransformerModel<double>;
template class BaselineModel<float>;
template class BaselineModel<double>;

}  // namespace gluconet::nn
