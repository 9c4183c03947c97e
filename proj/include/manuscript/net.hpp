// Copyright 2026 the manuscriptor authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// File: net.hpp
// Purpose: differentiable-network kernel: tensors, conv, pooling, BiLSTM,
//          linear, log-softmax, dropout, AdamW, finite-difference checks

#ifndef MANUSCRIPT_NET_HPP
#define MANUSCRIPT_NET_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace manuscript::net {

struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data; // row-major

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s, double fill = 0.0);

    std::size_t size() const { return data.size(); }
    std::size_t dim(std::size_t i) const { return shape[i]; }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    // rank-specific accessors
    double& at2(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
    double at2(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }
    double& at3(std::size_t c, std::size_t h, std::size_t w) {
        return data[(c * shape[1] + h) * shape[2] + w];
    }
    double at3(std::size_t c, std::size_t h, std::size_t w) const {
        return data[(c * shape[1] + h) * shape[2] + w];
    }

    void fill(double v);
    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

// Trainable value with gradient and AdamW moment accumulators, all one shape.
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor m;
    Tensor v;
    std::uint64_t step_count = 0;

    Param() = default;
    Param(std::string n, Tensor init);
    void zero_grad() { grad.fill(0.0); }
};

// Seeded uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
Tensor uniform_init(std::vector<std::size_t> shape, std::size_t fan_in, std::uint64_t seed);

// --- Layers --------------------------------------------------------------
// Each layer caches what its backward pass needs; backward accumulates into
// the layer's param grads and returns the input gradient. A backward call
// must follow the matching forward before the cache is overwritten.

class Conv2d {
public:
    Conv2d(std::string name, std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
           std::size_t stride, std::size_t padding, std::uint64_t seed);

    Tensor forward(const Tensor& x);        // [Cin,H,W] -> [Cout,H',W']
    Tensor backward(const Tensor& gy);

    Param weight; // [Cout,Cin,k,k]
    Param bias;   // [Cout]

    std::size_t in_channels() const { return in_ch_; }
    std::size_t out_channels() const { return out_ch_; }
    std::size_t kernel() const { return kernel_; }
    std::size_t stride() const { return stride_; }
    std::size_t padding() const { return padding_; }

private:
    std::size_t in_ch_, out_ch_, kernel_, stride_, padding_;
    Tensor x_;
};

class ReLU {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& gy);

private:
    std::vector<std::uint8_t> mask_;
};

// k x k window, stride k, floor on non-divisible extents. Ties go to the
// first element in scan order.
class MaxPool2d {
public:
    explicit MaxPool2d(std::size_t k) : k_(k) {}
    Tensor forward(const Tensor& x);        // [C,H,W] -> [C,H/k,W/k]
    Tensor backward(const Tensor& gy);

private:
    std::size_t k_;
    std::vector<std::size_t> shape_in_;
    std::vector<std::size_t> argmax_;
};

// Mean over the height axis: [C,H,W] -> [C,1,W].
Tensor avg_pool_height(const Tensor& x);
Tensor avg_pool_height_backward(const Tensor& gy, std::size_t in_height);

class Linear {
public:
    Linear(std::string name, std::size_t in, std::size_t out, std::uint64_t seed);

    Tensor forward(const Tensor& x);        // [T,in] -> [T,out]
    Tensor backward(const Tensor& gy);

    Param weight; // [out,in]
    Param bias;   // [out]

private:
    std::size_t in_, out_;
    Tensor x_;
};

// Standard gates (input/forget/cell/output), forward and reversed passes
// concatenated: [T,D] -> [T,2h]. Exact gradients through time.
class BiLstm {
public:
    BiLstm(std::string name, std::size_t input, std::size_t hidden, std::uint64_t seed);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& gy);

    std::vector<Param*> params();
    std::size_t hidden() const { return hidden_; }

private:
    struct Direction {
        Param w;   // [4h,D]
        Param u;   // [4h,h]
        Param b;   // [4h]
        // caches, per time step
        std::vector<double> gates;  // T x 4h, post-activation (i,f,g,o)
        std::vector<double> cells;  // T x h
        std::vector<double> hidden; // T x h
        std::vector<double> tanh_c; // T x h

        Tensor run(const Tensor& x, std::size_t h);
        Tensor run_backward(const Tensor& x, const Tensor& gh, std::size_t h);
    };

    std::size_t input_, hidden_;
    Direction fwd_, bwd_;
    Tensor x_, x_rev_;
};

// Rows over the last axis sum to one after exponentiation.
Tensor log_softmax(const Tensor& x);
// y is the forward output; gx = gy - exp(y) * sum_row(gy).
Tensor log_softmax_backward(const Tensor& y, const Tensor& gy);

// Zeroes each unit with probability p and scales survivors by 1/(1-p) while
// training; identity in inference. The mask is a pure function of the seed,
// so repeated forwards with one seed agree (finite differences rely on it).
class Dropout {
public:
    explicit Dropout(double p);
    Tensor forward(const Tensor& x, bool train, std::uint64_t seed);
    Tensor backward(const Tensor& gy);
    double p() const { return p_; }

private:
    double p_;
    std::vector<double> mask_;
};

// --- Optimizer -----------------------------------------------------------

struct AdamWOptions {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
};

// Decoupled update: value -= lr * mhat/(sqrt(vhat)+eps) + lr * wd * value_old.
void adamw_step(const std::vector<Param*>& params, const AdamWOptions& opt);

// --- Verification --------------------------------------------------------

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
};

// compute_grads must zero and refill every param's grad; loss must re-run the
// forward pass from scratch. Every parameter element is perturbed by +-eps
// and the analytic gradient compared against the central difference with
// relative error |a - n| / max(|a|, |n|, 1e-8).
GradCheckReport grad_check(const std::vector<Param*>& params,
                           const std::function<void()>& compute_grads,
                           const std::function<double()>& loss, double eps = 1e-6);

// --- CRNN assembly ---------------------------------------------------------

struct ConvBlockSpec {
    std::size_t out_channels = 16;
    std::size_t kernel = 3;
    std::size_t stride = 1;
    std::size_t pool = 2; // 1 disables pooling
};

struct NetConfig {
    std::vector<ConvBlockSpec> conv_spec = {{16, 3, 1, 2}, {32, 3, 1, 2}};
    std::size_t hidden_size = 48; // LSTM units per direction
    double dropout_p = 0.20;
    int num_classes = 0; // alphabet size + 1 blank
    std::uint64_t seed = 42;

    void validate() const;
    std::size_t feature_dim() const { return conv_spec.back().out_channels; }
    std::size_t downsample() const; // product of strides and pools
};

// conv blocks -> height average pooling -> BiLSTM -> dropout -> linear ->
// log-softmax. Input is a [1,H,W] tensor in [0,1]; output is a
// [T,num_classes] log-probability sequence with T = W / downsample().
class Crnn {
public:
    explicit Crnn(const NetConfig& cfg);

    Tensor forward(const Tensor& image, bool train, std::uint64_t dropout_seed = 0);
    void backward(const Tensor& grad_logprobs);

    std::vector<Param*> params();
    void zero_grads();
    const NetConfig& config() const { return cfg_; }

private:
    NetConfig cfg_;
    std::vector<Conv2d> convs_;
    std::vector<ReLU> relus_;
    std::vector<MaxPool2d> pools_;
    BiLstm lstm_;
    Dropout dropout_;
    Linear head_;
    // caches
    std::size_t pooled_height_ = 0;
    Tensor logprobs_;
};

} // namespace manuscript::net

#endif
