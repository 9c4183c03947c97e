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
// File: net.cpp
// Purpose: layer forward/backward kernels, AdamW, gradient checking

#include "manuscript/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "manuscript/error.hpp"
#include "manuscript/rng.hpp"

namespace manuscript::net {

namespace {

std::size_t numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

double sigmoid(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

void require(bool cond, const char* what) {
    if (!cond) throw validation_error(what);
}

} // namespace

Tensor::Tensor(std::vector<std::size_t> s, double fill_value)
    : shape(std::move(s)), data(numel(shape), fill_value) {}

void Tensor::fill(double v) {
    std::fill(data.begin(), data.end(), v);
}

Param::Param(std::string n, Tensor init)
    : name(std::move(n)),
      value(std::move(init)),
      grad(value.shape),
      m(value.shape),
      v(value.shape) {}

Tensor uniform_init(std::vector<std::size_t> shape, std::size_t fan_in, std::uint64_t seed) {
    Tensor t(std::move(shape));
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Rng rng(seed);
    for (double& x : t.data) x = rng.next_range(-bound, bound);
    return t;
}

// --- Conv2d ---------------------------------------------------------------

Conv2d::Conv2d(std::string name, std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
               std::size_t stride, std::size_t padding, std::uint64_t seed)
    : weight(name + ".weight",
             uniform_init({out_ch, in_ch, kernel, kernel}, in_ch * kernel * kernel,
                          derive_seed(seed, 0))),
      bias(name + ".bias",
           uniform_init({out_ch}, in_ch * kernel * kernel, derive_seed(seed, 1))),
      in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel), stride_(stride), padding_(padding) {
    require(kernel >= 1 && stride >= 1, "conv2d: kernel and stride must be >= 1");
}

Tensor Conv2d::forward(const Tensor& x) {
    require(x.shape.size() == 3 && x.shape[0] == in_ch_, "conv2d: input shape mismatch");
    const std::size_t H = x.shape[1];
    const std::size_t W = x.shape[2];
    require(H + 2 * padding_ >= kernel_ && W + 2 * padding_ >= kernel_,
            "conv2d: input smaller than kernel");
    require((H + 2 * padding_ - kernel_) % stride_ == 0 &&
                (W + 2 * padding_ - kernel_) % stride_ == 0,
            "conv2d: output extent is not integral");
    const std::size_t OH = (H + 2 * padding_ - kernel_) / stride_ + 1;
    const std::size_t OW = (W + 2 * padding_ - kernel_) / stride_ + 1;

    x_ = x;
    Tensor y({out_ch_, OH, OW});
    for (std::size_t co = 0; co < out_ch_; ++co) {
        const double b = bias.value[co];
        for (std::size_t oh = 0; oh < OH; ++oh) {
            double* yrow = &y.data[(co * OH + oh) * OW];
            for (std::size_t ow = 0; ow < OW; ++ow) yrow[ow] = b;
            for (std::size_t ci = 0; ci < in_ch_; ++ci) {
                for (std::size_t kh = 0; kh < kernel_; ++kh) {
                    const long ih = static_cast<long>(oh * stride_ + kh) - static_cast<long>(padding_);
                    if (ih < 0 || ih >= static_cast<long>(H)) continue;
                    const double* xrow = &x.data[(ci * H + static_cast<std::size_t>(ih)) * W];
                    const double* wrow = &weight.value.data[((co * in_ch_ + ci) * kernel_ + kh) * kernel_];
                    for (std::size_t kw = 0; kw < kernel_; ++kw) {
                        const double wv = wrow[kw];
                        // valid ow range so that 0 <= ow*stride + kw - padding < W
                        const long shift = static_cast<long>(kw) - static_cast<long>(padding_);
                        std::size_t ow0 = 0;
                        if (shift < 0)
                            ow0 = static_cast<std::size_t>((-shift + static_cast<long>(stride_) - 1) /
                                                           static_cast<long>(stride_));
                        std::size_t ow1 = OW;
                        const long max_iw = static_cast<long>(W) - 1 - shift;
                        if (max_iw < 0)
                            ow1 = 0;
                        else if (static_cast<std::size_t>(max_iw / static_cast<long>(stride_)) + 1 < ow1)
                            ow1 = static_cast<std::size_t>(max_iw / static_cast<long>(stride_)) + 1;
                        for (std::size_t ow = ow0; ow < ow1; ++ow)
                            yrow[ow] += wv * xrow[static_cast<std::size_t>(
                                                 static_cast<long>(ow * stride_) + shift)];
                    }
                }
            }
        }
    }
    return y;
}

Tensor Conv2d::backward(const Tensor& gy) {
    const std::size_t H = x_.shape[1];
    const std::size_t W = x_.shape[2];
    const std::size_t OH = gy.shape[1];
    const std::size_t OW = gy.shape[2];
    require(gy.shape.size() == 3 && gy.shape[0] == out_ch_, "conv2d: grad shape mismatch");

    Tensor gx({in_ch_, H, W});
    for (std::size_t co = 0; co < out_ch_; ++co) {
        double db = 0.0;
        for (std::size_t oh = 0; oh < OH; ++oh) {
            const double* grow = &gy.data[(co * OH + oh) * OW];
            for (std::size_t ow = 0; ow < OW; ++ow) db += grow[ow];
            for (std::size_t ci = 0; ci < in_ch_; ++ci) {
                for (std::size_t kh = 0; kh < kernel_; ++kh) {
                    const long ih = static_cast<long>(oh * stride_ + kh) - static_cast<long>(padding_);
                    if (ih < 0 || ih >= static_cast<long>(H)) continue;
                    const double* xrow = &x_.data[(ci * H + static_cast<std::size_t>(ih)) * W];
                    double* gxrow = &gx.data[(ci * H + static_cast<std::size_t>(ih)) * W];
                    double* dwrow = &weight.grad.data[((co * in_ch_ + ci) * kernel_ + kh) * kernel_];
                    const double* wrow = &weight.value.data[((co * in_ch_ + ci) * kernel_ + kh) * kernel_];
                    for (std::size_t kw = 0; kw < kernel_; ++kw) {
                        const long shift = static_cast<long>(kw) - static_cast<long>(padding_);
                        double dw = 0.0;
                        const double wv = wrow[kw];
                        for (std::size_t ow = 0; ow < OW; ++ow) {
                            const long iw = static_cast<long>(ow * stride_) + shift;
                            if (iw < 0 || iw >= static_cast<long>(W)) continue;
                            const double g = grow[ow];
                            dw += g * xrow[static_cast<std::size_t>(iw)];
                            gxrow[static_cast<std::size_t>(iw)] += g * wv;
                        }
                        dwrow[kw] += dw;
                    }
                }
            }
        }
        bias.grad[co] += db;
    }
    return gx;
}

// --- ReLU -------------------------------------------------------------------

Tensor ReLU::forward(const Tensor& x) {
    mask_.assign(x.size(), 0);
    Tensor y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] > 0.0)
            mask_[i] = 1;
        else
            y[i] = 0.0;
    }
    return y;
}

Tensor ReLU::backward(const Tensor& gy) {
    require(gy.size() == mask_.size(), "relu: grad size mismatch");
    Tensor gx = gy;
    for (std::size_t i = 0; i < gx.size(); ++i)
        if (!mask_[i]) gx[i] = 0.0;
    return gx;
}

// --- MaxPool2d ---------------------------------------------------------------

Tensor MaxPool2d::forward(const Tensor& x) {
    require(x.shape.size() == 3, "maxpool: rank-3 input expected");
    const std::size_t C = x.shape[0], H = x.shape[1], W = x.shape[2];
    const std::size_t OH = H / k_, OW = W / k_;
    require(OH >= 1 && OW >= 1, "maxpool: input smaller than window");

    shape_in_ = x.shape;
    Tensor y({C, OH, OW});
    argmax_.assign(y.size(), 0);
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t oh = 0; oh < OH; ++oh) {
            for (std::size_t ow = 0; ow < OW; ++ow) {
                double best = -std::numeric_limits<double>::infinity();
                std::size_t best_idx = 0;
                for (std::size_t dy = 0; dy < k_; ++dy) {
                    for (std::size_t dx = 0; dx < k_; ++dx) {
                        const std::size_t idx = (c * H + oh * k_ + dy) * W + ow * k_ + dx;
                        if (x.data[idx] > best) {
                            best = x.data[idx];
                            best_idx = idx;
                        }
                    }
                }
                const std::size_t oidx = (c * OH + oh) * OW + ow;
                y.data[oidx] = best;
                argmax_[oidx] = best_idx;
            }
        }
    }
    return y;
}

Tensor MaxPool2d::backward(const Tensor& gy) {
    require(gy.size() == argmax_.size(), "maxpool: grad size mismatch");
    Tensor gx(shape_in_);
    for (std::size_t i = 0; i < gy.size(); ++i) gx.data[argmax_[i]] += gy.data[i];
    return gx;
}

// --- Height pooling -----------------------------------------------------------

Tensor avg_pool_height(const Tensor& x) {
    require(x.shape.size() == 3 && x.shape[1] >= 1, "avg_pool_height: rank-3 input expected");
    const std::size_t C = x.shape[0], H = x.shape[1], W = x.shape[2];
    Tensor y({C, 1, W});
    const double inv = 1.0 / static_cast<double>(H);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t h = 0; h < H; ++h)
            for (std::size_t w = 0; w < W; ++w)
                y.data[c * W + w] += x.data[(c * H + h) * W + w] * inv;
    return y;
}

Tensor avg_pool_height_backward(const Tensor& gy, std::size_t in_height) {
    const std::size_t C = gy.shape[0], W = gy.shape[2];
    Tensor gx({C, in_height, W});
    const double inv = 1.0 / static_cast<double>(in_height);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t h = 0; h < in_height; ++h)
            for (std::size_t w = 0; w < W; ++w)
                gx.data[(c * in_height + h) * W + w] = gy.data[c * W + w] * inv;
    return gx;
}

// --- Linear ---------------------------------------------------------------------

Linear::Linear(std::string name, std::size_t in, std::size_t out, std::uint64_t seed)
    : weight(name + ".weight", uniform_init({out, in}, in, derive_seed(seed, 0))),
      bias(name + ".bias", uniform_init({out}, in, derive_seed(seed, 1))),
      in_(in), out_(out) {}

Tensor Linear::forward(const Tensor& x) {
    require(x.shape.size() == 2 && x.shape[1] == in_, "linear: input shape mismatch");
    const std::size_t T = x.shape[0];
    x_ = x;
    Tensor y({T, out_});
    for (std::size_t t = 0; t < T; ++t) {
        const double* xr = &x.data[t * in_];
        double* yr = &y.data[t * out_];
        for (std::size_t o = 0; o < out_; ++o) {
            const double* wr = &weight.value.data[o * in_];
            double acc = bias.value[o];
            for (std::size_t i = 0; i < in_; ++i) acc += wr[i] * xr[i];
            yr[o] = acc;
        }
    }
    return y;
}

Tensor Linear::backward(const Tensor& gy) {
    const std::size_t T = x_.shape[0];
    require(gy.shape.size() == 2 && gy.shape[0] == T && gy.shape[1] == out_,
            "linear: grad shape mismatch");
    Tensor gx({T, in_});
    for (std::size_t t = 0; t < T; ++t) {
        const double* xr = &x_.data[t * in_];
        const double* gr = &gy.data[t * out_];
        double* gxr = &gx.data[t * in_];
        for (std::size_t o = 0; o < out_; ++o) {
            const double g = gr[o];
            bias.grad[o] += g;
            double* dwr = &weight.grad.data[o * in_];
            const double* wr = &weight.value.data[o * in_];
            for (std::size_t i = 0; i < in_; ++i) {
                dwr[i] += g * xr[i];
                gxr[i] += g * wr[i];
            }
        }
    }
    return gx;
}

// --- BiLSTM --------------------------------------------------------------------

BiLstm::BiLstm(std::string name, std::size_t input, std::size_t hidden, std::uint64_t seed)
    : input_(input), hidden_(hidden) {
    const auto make = [&](Direction& d, const std::string& tag, std::uint64_t s) {
        d.w = Param(name + "." + tag + ".w", uniform_init({4 * hidden, input}, input, derive_seed(s, 0)));
        d.u = Param(name + "." + tag + ".u", uniform_init({4 * hidden, hidden}, hidden, derive_seed(s, 1)));
        d.b = Param(name + "." + tag + ".b", uniform_init({4 * hidden}, hidden, derive_seed(s, 2)));
    };
    make(fwd_, "fwd", derive_seed(seed, 10));
    make(bwd_, "bwd", derive_seed(seed, 11));
}

std::vector<Param*> BiLstm::params() {
    return {&fwd_.w, &fwd_.u, &fwd_.b, &bwd_.w, &bwd_.u, &bwd_.b};
}

// One directional pass; caches activations for BPTT.
Tensor BiLstm::Direction::run(const Tensor& x, std::size_t h) {
    const std::size_t T = x.shape[0];
    const std::size_t D = x.shape[1];
    gates.assign(T * 4 * h, 0.0);
    cells.assign(T * h, 0.0);
    hidden.assign(T * h, 0.0);
    tanh_c.assign(T * h, 0.0);

    Tensor out({T, h});
    std::vector<double> z(4 * h);
    for (std::size_t t = 0; t < T; ++t) {
        const double* xt = &x.data[t * D];
        const double* h_prev = (t == 0) ? nullptr : &hidden[(t - 1) * h];
        for (std::size_t r = 0; r < 4 * h; ++r) {
            const double* wr = &w.value.data[r * D];
            double acc = b.value[r];
            for (std::size_t i = 0; i < D; ++i) acc += wr[i] * xt[i];
            if (h_prev) {
                const double* ur = &u.value.data[r * h];
                for (std::size_t i = 0; i < h; ++i) acc += ur[i] * h_prev[i];
            }
            z[r] = acc;
        }
        double* gt = &gates[t * 4 * h];
        double* ct = &cells[t * h];
        double* ht = &hidden[t * h];
        double* tc = &tanh_c[t * h];
        for (std::size_t j = 0; j < h; ++j) {
            const double gi = sigmoid(z[j]);
            const double gf = sigmoid(z[h + j]);
            const double gg = std::tanh(z[2 * h + j]);
            const double go = sigmoid(z[3 * h + j]);
            const double c_prev = (t == 0) ? 0.0 : cells[(t - 1) * h + j];
            const double c = gf * c_prev + gi * gg;
            const double tch = std::tanh(c);
            gt[j] = gi;
            gt[h + j] = gf;
            gt[2 * h + j] = gg;
            gt[3 * h + j] = go;
            ct[j] = c;
            tc[j] = tch;
            ht[j] = go * tch;
            out.data[t * h + j] = ht[j];
        }
    }
    return out;
}

Tensor BiLstm::Direction::run_backward(const Tensor& x, const Tensor& gh_out, std::size_t h) {
    const std::size_t T = x.shape[0];
    const std::size_t D = x.shape[1];
    Tensor gx({T, D});
    std::vector<double> dh_next(h, 0.0), dc_next(h, 0.0), dz(4 * h);
    for (std::size_t ti = T; ti-- > 0;) {
        const double* gt = &gates[ti * 4 * h];
        const double* tc = &tanh_c[ti * h];
        for (std::size_t j = 0; j < h; ++j) {
            const double gi = gt[j], gf = gt[h + j], gg = gt[2 * h + j], go = gt[3 * h + j];
            const double dh = gh_out.data[ti * h + j] + dh_next[j];
            const double dc = dc_next[j] + dh * go * (1.0 - tc[j] * tc[j]);
            const double c_prev = (ti == 0) ? 0.0 : cells[(ti - 1) * h + j];
            dz[j] = dc * gg * gi * (1.0 - gi);             // input gate
            dz[h + j] = dc * c_prev * gf * (1.0 - gf);     // forget gate
            dz[2 * h + j] = dc * gi * (1.0 - gg * gg);     // candidate
            dz[3 * h + j] = dh * tc[j] * go * (1.0 - go);  // output gate
            dc_next[j] = dc * gf;
        }
        const double* xt = &x.data[ti * D];
        const double* h_prev = (ti == 0) ? nullptr : &hidden[(ti - 1) * h];
        std::fill(dh_next.begin(), dh_next.end(), 0.0);
        for (std::size_t r = 0; r < 4 * h; ++r) {
            const double g = dz[r];
            if (g == 0.0) continue;
            b.grad[r] += g;
            double* dwr = &w.grad.data[r * D];
            const double* wr = &w.value.data[r * D];
            double* gxr = &gx.data[ti * D];
            for (std::size_t i = 0; i < D; ++i) {
                dwr[i] += g * xt[i];
                gxr[i] += g * wr[i];
            }
            if (h_prev) {
                double* dur = &u.grad.data[r * h];
                const double* ur = &u.value.data[r * h];
                for (std::size_t i = 0; i < h; ++i) {
                    dur[i] += g * h_prev[i];
                    dh_next[i] += g * ur[i];
                }
            }
        }
    }
    return gx;
}

Tensor BiLstm::forward(const Tensor& x) {
    require(x.shape.size() == 2 && x.shape[1] == input_, "bilstm: input shape mismatch");
    const std::size_t T = x.shape[0];
    x_ = x;
    x_rev_ = x;
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t i = 0; i < input_; ++i)
            x_rev_.data[t * input_ + i] = x.data[(T - 1 - t) * input_ + i];

    const Tensor hf = fwd_.run(x_, hidden_);
    const Tensor hb = bwd_.run(x_rev_, hidden_);

    Tensor out({T, 2 * hidden_});
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t j = 0; j < hidden_; ++j) {
            out.data[t * 2 * hidden_ + j] = hf.data[t * hidden_ + j];
            out.data[t * 2 * hidden_ + hidden_ + j] = hb.data[(T - 1 - t) * hidden_ + j];
        }
    }
    return out;
}

Tensor BiLstm::backward(const Tensor& gy) {
    const std::size_t T = x_.shape[0];
    require(gy.shape.size() == 2 && gy.shape[0] == T && gy.shape[1] == 2 * hidden_,
            "bilstm: grad shape mismatch");

    Tensor ghf({T, hidden_});
    Tensor ghb({T, hidden_});
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t j = 0; j < hidden_; ++j) {
            ghf.data[t * hidden_ + j] = gy.data[t * 2 * hidden_ + j];
            ghb.data[(T - 1 - t) * hidden_ + j] = gy.data[t * 2 * hidden_ + hidden_ + j];
        }
    }
    const Tensor gxf = fwd_.run_backward(x_, ghf, hidden_);
    const Tensor gxb_rev = bwd_.run_backward(x_rev_, ghb, hidden_);

    Tensor gx({T, input_});
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t i = 0; i < input_; ++i)
            gx.data[t * input_ + i] =
                gxf.data[t * input_ + i] + gxb_rev.data[(T - 1 - t) * input_ + i];
    return gx;
}

// --- log-softmax -----------------------------------------------------------------

Tensor log_softmax(const Tensor& x) {
    require(x.shape.size() >= 1, "log_softmax: empty shape");
    const std::size_t C = x.shape.back();
    const std::size_t rows = x.size() / C;
    Tensor y = x;
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = &y.data[r * C];
        double mx = row[0];
        for (std::size_t c = 1; c < C; ++c) mx = std::max(mx, row[c]);
        double sum = 0.0;
        for (std::size_t c = 0; c < C; ++c) sum += std::exp(row[c] - mx);
        const double lse = mx + std::log(sum);
        for (std::size_t c = 0; c < C; ++c) row[c] -= lse;
    }
    return y;
}

Tensor log_softmax_backward(const Tensor& y, const Tensor& gy) {
    require(y.same_shape(gy), "log_softmax_backward: shape mismatch");
    const std::size_t C = y.shape.back();
    const std::size_t rows = y.size() / C;
    Tensor gx = gy;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* yr = &y.data[r * C];
        double* gr = &gx.data[r * C];
        double gsum = 0.0;
        for (std::size_t c = 0; c < C; ++c) gsum += gr[c];
        for (std::size_t c = 0; c < C; ++c) gr[c] -= std::exp(yr[c]) * gsum;
    }
    return gx;
}

// --- Dropout ---------------------------------------------------------------------

Dropout::Dropout(double p) : p_(p) {
    require(p >= 0.0 && p < 1.0, "dropout: p must be in [0, 1)");
}

Tensor Dropout::forward(const Tensor& x, bool train, std::uint64_t seed) {
    if (!train || p_ == 0.0) {
        mask_.assign(x.size(), 1.0);
        return x;
    }
    const double keep_scale = 1.0 / (1.0 - p_);
    Rng rng(seed);
    mask_.resize(x.size());
    Tensor y = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double m = (rng.next_unit() < p_) ? 0.0 : keep_scale;
        mask_[i] = m;
        y[i] *= m;
    }
    return y;
}

Tensor Dropout::backward(const Tensor& gy) {
    require(gy.size() == mask_.size(), "dropout: grad size mismatch");
    Tensor gx = gy;
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] *= mask_[i];
    return gx;
}

// --- AdamW -----------------------------------------------------------------------

void adamw_step(const std::vector<Param*>& params, const AdamWOptions& opt) {
    for (Param* p : params) {
        p->step_count += 1;
        const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(p->step_count));
        const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(p->step_count));
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const double g = p->grad[i];
            p->m[i] = opt.beta1 * p->m[i] + (1.0 - opt.beta1) * g;
            p->v[i] = opt.beta2 * p->v[i] + (1.0 - opt.beta2) * g * g;
            const double mhat = p->m[i] / bc1;
            const double vhat = p->v[i] / bc2;
            const double old = p->value[i];
            p->value[i] = old - opt.lr * mhat / (std::sqrt(vhat) + opt.eps) -
                          opt.lr * opt.weight_decay * old;
        }
    }
}

// --- Gradient check ----------------------------------------------------------------

GradCheckReport grad_check(const std::vector<Param*>& params,
                           const std::function<void()>& compute_grads,
                           const std::function<double()>& loss, double eps) {
    compute_grads();
    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const Param* p : params) analytic.push_back(p->grad.data);

    GradCheckReport report;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Param* p = params[pi];
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const double old = p->value[i];
            p->value[i] = old + eps;
            const double lp = loss();
            p->value[i] = old - eps;
            const double lm = loss();
            p->value[i] = old;
            if (!std::isfinite(lp) || !std::isfinite(lm))
                throw validation_error("grad_check: non-finite loss");
            const double numeric = (lp - lm) / (2.0 * eps);
            const double a = analytic[pi][i];
            const double rel = std::abs(a - numeric) /
                               std::max({std::abs(a), std::abs(numeric), 1e-8});
            if (rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_param = p->name;
                report.worst_index = i;
            }
        }
    }
    return report;
}

// --- CRNN ------------------------------------------------------------------------

void NetConfig::validate() const {
    if (conv_spec.empty())
        throw validation_error("NetConfig: conv_spec must not be empty");
    for (const auto& b : conv_spec)
        if (b.out_channels < 1 || b.kernel < 1 || b.stride < 1 || b.pool < 1)
            throw validation_error("NetConfig: conv block fields must be >= 1");
    if (hidden_size < 1)
        throw validation_error("NetConfig: hidden_size must be >= 1");
    if (dropout_p < 0.0 || dropout_p >= 1.0)
        throw validation_error("NetConfig: dropout_p must be in [0, 1)");
    if (num_classes < 2)
        throw validation_error("NetConfig: num_classes must be >= 2");
}

std::size_t NetConfig::downsample() const {
    std::size_t f = 1;
    for (const auto& b : conv_spec) f *= b.stride * b.pool;
    return f;
}

Crnn::Crnn(const NetConfig& cfg)
    : cfg_(cfg),
      lstm_("lstm", cfg.feature_dim(), cfg.hidden_size, derive_seed(cfg.seed, 100)),
      dropout_(cfg.dropout_p),
      head_("head", 2 * cfg.hidden_size, static_cast<std::size_t>(cfg.num_classes),
            derive_seed(cfg.seed, 200)) {
    cfg_.validate();
    std::size_t in_ch = 1;
    for (std::size_t i = 0; i < cfg_.conv_spec.size(); ++i) {
        const auto& b = cfg_.conv_spec[i];
        convs_.emplace_back("conv" + std::to_string(i), in_ch, b.out_channels, b.kernel,
                            b.stride, b.kernel / 2, derive_seed(cfg_.seed, i));
        relus_.emplace_back();
        pools_.emplace_back(b.pool);
        in_ch = b.out_channels;
    }
}

Tensor Crnn::forward(const Tensor& image, bool train, std::uint64_t dropout_seed) {
    require(image.shape.size() == 3 && image.shape[0] == 1, "crnn: input must be [1,H,W]");
    Tensor h = image;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
        h = convs_[i].forward(h);
        h = relus_[i].forward(h);
        if (cfg_.conv_spec[i].pool > 1) h = pools_[i].forward(h);
    }
    pooled_height_ = h.shape[1];
    h = avg_pool_height(h); // [C,1,W]

    // width index becomes the time step, channel vector the feature
    const std::size_t C = h.shape[0];
    const std::size_t T = h.shape[2];
    require(T >= 1, "crnn: input too narrow, no frames left");
    Tensor seq({T, C});
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t t = 0; t < T; ++t) seq.data[t * C + c] = h.data[c * T + t];

    Tensor r = lstm_.forward(seq);
    r = dropout_.forward(r, train, dropout_seed);
    r = head_.forward(r);
    logprobs_ = log_softmax(r);
    return logprobs_;
}

void Crnn::backward(const Tensor& grad_logprobs) {
    Tensor g = log_softmax_backward(logprobs_, grad_logprobs);
    g = head_.backward(g);
    g = dropout_.backward(g);
    g = lstm_.backward(g);

    // back to [C,1,W]
    const std::size_t T = g.shape[0];
    const std::size_t C = g.shape[1];
    Tensor gh({C, std::size_t{1}, T});
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t t = 0; t < T; ++t) gh.data[c * T + t] = g.data[t * C + c];
    Tensor gx = avg_pool_height_backward(gh, pooled_height_);

    for (std::size_t i = convs_.size(); i-- > 0;) {
        if (cfg_.conv_spec[i].pool > 1) gx = pools_[i].backward(gx);
        gx = relus_[i].backward(gx);
        gx = convs_[i].backward(gx);
    }
}

std::vector<Param*> Crnn::params() {
    std::vector<Param*> out;
    for (auto& c : convs_) {
        out.push_back(&c.weight);
        out.push_back(&c.bias);
    }
    for (Param* p : lstm_.params()) out.push_back(p);
    out.push_back(&head_.weight);
    out.push_back(&head_.bias);
    return out;
}

void Crnn::zero_grads() {
    for (Param* p : params()) p->zero_grad();
}

} // namespace manuscript::net
