// src/network.cpp

// Copyright 2026  FaceVox Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "facevox/network.hpp"

#include <cmath>

#include "facevox/error.hpp"
#include "facevox/rng.hpp"

namespace facevox {

namespace {

constexpr double kProbClamp = 1e-12;

inline int TensorIndex(const TensorShape &s, int c, int y, int x) {
  return (c * s.height + y) * s.width + x;
}

Eigen::VectorXd Activate(const Eigen::VectorXd &z, Activation act) {
  switch (act) {
    case Activation::kLinear:
      return z;
    case Activation::kSigmoid:
      return (1.0 / (1.0 + (-z.array()).exp())).matrix();
    case Activation::kTanh:
      return z.array().tanh().matrix();
    case Activation::kSoftmax: {
      const Eigen::ArrayXd shifted = z.array() - z.maxCoeff();
      const Eigen::ArrayXd e = shifted.exp();
      return (e / e.sum()).matrix();
    }
  }
  throw ParameterError("network: unknown activation");
}

// f'(z) expressed through the activation value a = f(z); not defined for
// softmax, which needs its full Jacobian.
Eigen::ArrayXd ActivationDerivative(const Eigen::VectorXd &a, Activation act) {
  switch (act) {
    case Activation::kLinear:
      return Eigen::ArrayXd::Ones(a.size());
    case Activation::kSigmoid:
      return a.array() * (1.0 - a.array());
    case Activation::kTanh:
      return 1.0 - a.array().square();
    default:
      throw ParameterError("network: no elementwise derivative for softmax");
  }
}

Activation LayerActivation(const Layer &layer) {
  if (const auto *d = std::get_if<DenseLayer>(&layer)) return d->activation;
  if (const auto *c = std::get_if<Conv2dLayer>(&layer)) return c->activation;
  return Activation::kLinear;
}

TensorShape LayerOutputShape(const Layer &layer, const TensorShape &in) {
  if (const auto *d = std::get_if<DenseLayer>(&layer)) {
    if (int(d->weights.cols()) != in.Size()) {
      throw ParameterError("network: dense layer expects input size " +
                           std::to_string(d->weights.cols()) + ", got " +
                           std::to_string(in.Size()));
    }
    return TensorShape{1, 1, int(d->weights.rows())};
  }
  if (const auto *c = std::get_if<Conv2dLayer>(&layer)) {
    if (c->in_channels != in.channels) {
      throw ParameterError("network: conv layer channel mismatch");
    }
    const int oh = ConvOutputExtent(in.height, c->kernel);
    const int ow = ConvOutputExtent(in.width, c->kernel);
    return TensorShape{c->out_channels, oh, ow};
  }
  const auto &p = std::get<MaxPool2dLayer>(layer);
  if (p.window < 1) throw ParameterError("network: pool window must be >= 1");
  const int oh = in.height / p.window;
  const int ow = in.width / p.window;
  if (oh < 1 || ow < 1) {
    throw ParameterError("network: pool window exceeds input extent");
  }
  return TensorShape{in.channels, oh, ow};
}

// delta at the output layer's pre-activation for each supported pair.
Eigen::VectorXd OutputDelta(const Eigen::VectorXd &z /*activation*/,
                            const Eigen::VectorXd &y, Activation act,
                            LossKind loss) {
  const int n = int(z.size());
  if (loss == LossKind::kCrossEntropy) {
    if (act == Activation::kSoftmax || act == Activation::kSigmoid) {
      // Both cancellations give exactly (z - y) / n.
      return (z - y) / double(n);
    }
    // Generic chain rule through the clamped per-node cross entropy.
    Eigen::ArrayXd zc = z.array().max(kProbClamp).min(1.0 - kProbClamp);
    Eigen::ArrayXd dj =
        (-(y.array() / zc) + (1.0 - y.array()) / (1.0 - zc)) / double(n);
    return (dj * ActivationDerivative(z, act)).matrix();
  }
  // Mean squared error.
  const Eigen::VectorXd g = z - y;
  if (act == Activation::kSoftmax) {
    // Full softmax Jacobian: delta_i = z_i (g_i - sum_k g_k z_k).
    const double dot = g.dot(z);
    return (z.array() * (g.array() - dot)).matrix();
  }
  return (g.array() * ActivationDerivative(z, act)).matrix();
}

}  // namespace

int ConvOutputExtent(int input_extent, int kernel) {
  if (kernel < 1 || input_extent < kernel) {
    throw ParameterError("conv: kernel " + std::to_string(kernel) +
                         " does not fit input extent " +
                         std::to_string(input_extent));
  }
  return input_extent - kernel + 1;
}

int ConvParameterCount(const Conv2dLayer &layer) {
  return layer.kernel * layer.kernel * layer.in_channels * layer.out_channels +
         layer.out_channels;
}

TensorShape OutputShape(const LayeredNetwork &net) {
  TensorShape s = net.input_shape;
  for (const Layer &l : net.layers) s = LayerOutputShape(l, s);
  return s;
}

DenseLayer MakeDense(int in, int out, Activation act) {
  if (in < 1 || out < 1) throw ParameterError("dense: sizes must be >= 1");
  DenseLayer l;
  l.weights = Eigen::MatrixXd::Zero(out, in);
  l.bias = Eigen::VectorXd::Zero(out);
  l.activation = act;
  return l;
}

Conv2dLayer MakeConv(int in_channels, int out_channels, int kernel,
                     Activation act) {
  if (in_channels < 1 || out_channels < 1 || kernel < 1) {
    throw ParameterError("conv: sizes must be >= 1");
  }
  Conv2dLayer l;
  l.in_channels = in_channels;
  l.out_channels = out_channels;
  l.kernel = kernel;
  l.kernels =
      Eigen::MatrixXd::Zero(out_channels, in_channels * kernel * kernel);
  l.bias = Eigen::VectorXd::Zero(out_channels);
  l.activation = act;
  return l;
}

void InitializeWeights(LayeredNetwork &net, uint64_t seed) {
  Rng rng(seed);
  for (Layer &layer : net.layers) {
    if (auto *d = std::get_if<DenseLayer>(&layer)) {
      const double r =
          std::sqrt(6.0 / double(d->weights.cols() + d->weights.rows()));
      for (int i = 0; i < d->weights.rows(); ++i) {
        for (int j = 0; j < d->weights.cols(); ++j) {
          d->weights(i, j) = rng.Uniform(-r, r);
        }
      }
      d->bias.setZero();
    } else if (auto *c = std::get_if<Conv2dLayer>(&layer)) {
      const int fan_in = c->in_channels * c->kernel * c->kernel;
      const int fan_out = c->out_channels * c->kernel * c->kernel;
      const double r = std::sqrt(6.0 / double(fan_in + fan_out));
      for (int i = 0; i < c->kernels.rows(); ++i) {
        for (int j = 0; j < c->kernels.cols(); ++j) {
          c->kernels(i, j) = rng.Uniform(-r, r);
        }
      }
      c->bias.setZero();
    }
  }
}

ForwardTrace Forward(const LayeredNetwork &net, const Eigen::VectorXd &input,
                     const DropoutMasks *masks) {
  if (int(input.size()) != net.input_shape.Size()) {
    throw ParameterError("network: input size " + std::to_string(input.size()) +
                         " does not match declared shape " +
                         std::to_string(net.input_shape.Size()));
  }
  if (masks && masks->size() != net.layers.size()) {
    throw ParameterError("network: dropout mask count mismatch");
  }

  ForwardTrace trace;
  trace.activations.push_back(input);
  trace.shapes.push_back(net.input_shape);
  trace.preacts.resize(net.layers.size());
  trace.pool_argmax.resize(net.layers.size());

  for (size_t li = 0; li < net.layers.size(); ++li) {
    const Layer &layer = net.layers[li];
    const TensorShape in_shape = trace.shapes.back();
    const TensorShape out_shape = LayerOutputShape(layer, in_shape);
    const Eigen::VectorXd &a_in = trace.activations.back();
    Eigen::VectorXd a_out;

    if (const auto *d = std::get_if<DenseLayer>(&layer)) {
      Eigen::VectorXd z = d->weights * a_in + d->bias;
      trace.preacts[li] = z;
      a_out = Activate(z, d->activation);
    } else if (const auto *c = std::get_if<Conv2dLayer>(&layer)) {
      Eigen::VectorXd z(out_shape.Size());
      for (int co = 0; co < c->out_channels; ++co) {
        for (int oy = 0; oy < out_shape.height; ++oy) {
          for (int ox = 0; ox < out_shape.width; ++ox) {
            double acc = c->bias(co);
            int widx = 0;
            for (int ci = 0; ci < c->in_channels; ++ci) {
              for (int ky = 0; ky < c->kernel; ++ky) {
                for (int kx = 0; kx < c->kernel; ++kx, ++widx) {
                  acc += c->kernels(co, widx) *
                         a_in(TensorIndex(in_shape, ci, oy + ky, ox + kx));
                }
              }
            }
            z(TensorIndex(out_shape, co, oy, ox)) = acc;
          }
        }
      }
      trace.preacts[li] = z;
      a_out = Activate(z, c->activation);
    } else {
      const auto &p = std::get<MaxPool2dLayer>(layer);
      a_out.resize(out_shape.Size());
      std::vector<int> argmax(size_t(out_shape.Size()));
      for (int ch = 0; ch < out_shape.channels; ++ch) {
        for (int oy = 0; oy < out_shape.height; ++oy) {
          for (int ox = 0; ox < out_shape.width; ++ox) {
            int best_idx = -1;
            double best = 0.0;
            for (int wy = 0; wy < p.window; ++wy) {
              for (int wx = 0; wx < p.window; ++wx) {
                const int idx = TensorIndex(in_shape, ch, oy * p.window + wy,
                                            ox * p.window + wx);
                // Strict > keeps the first occurrence on ties.
                if (best_idx < 0 || a_in(idx) > best) {
                  best_idx = idx;
                  best = a_in(idx);
                }
              }
            }
            const int oidx = TensorIndex(out_shape, ch, oy, ox);
            a_out(oidx) = best;
            argmax[size_t(oidx)] = best_idx;
          }
        }
      }
      trace.pool_argmax[li] = std::move(argmax);
    }

    if (masks && (*masks)[li].size() > 0) {
      if ((*masks)[li].size() != a_out.size()) {
        throw ParameterError("network: dropout mask size mismatch at layer " +
                             std::to_string(li));
      }
      a_out.array() *= (*masks)[li].array();
    }
    trace.activations.push_back(std::move(a_out));
    trace.shapes.push_back(out_shape);
  }
  return trace;
}

double LossValue(const Eigen::VectorXd &prediction,
                 const Eigen::VectorXd &target, LossKind kind,
                 bool categorical) {
  if (prediction.size() != target.size()) {
    throw ParameterError("loss: prediction/target size mismatch");
  }
  const int n = int(prediction.size());
  if (n == 0) throw ParameterError("loss: empty prediction");
  if (kind == LossKind::kMse) {
    return 0.5 * (prediction - target).squaredNorm();
  }
  const Eigen::ArrayXd z =
      prediction.array().max(kProbClamp).min(1.0 - kProbClamp);
  const Eigen::ArrayXd y = target.array();
  if (categorical) {
    return -(y * z.log()).sum() / double(n);
  }
  return -((y * z.log()) + (1.0 - y) * (1.0 - z).log()).sum() / double(n);
}

double BatchObjective(const LayeredNetwork &net, const Eigen::MatrixXd &inputs,
                      const Eigen::MatrixXd &targets, LossKind loss,
                      const Regularizers &reg, const DropoutMasks *masks) {
  if (inputs.rows() != targets.rows() || inputs.rows() == 0) {
    throw ParameterError("network: batch must be non-empty and aligned");
  }
  const bool categorical =
      !net.layers.empty() &&
      LayerActivation(net.layers.back()) == Activation::kSoftmax;
  double acc = 0.0;
  for (int s = 0; s < inputs.rows(); ++s) {
    const ForwardTrace trace = Forward(net, inputs.row(s), masks);
    acc += LossValue(trace.Output(), targets.row(s), loss, categorical);
  }
  acc /= double(inputs.rows());
  for (const Layer &layer : net.layers) {
    if (const auto *d = std::get_if<DenseLayer>(&layer)) {
      acc += 0.5 * reg.l2 * d->weights.squaredNorm() +
             reg.l1 * d->weights.array().abs().sum();
    } else if (const auto *c = std::get_if<Conv2dLayer>(&layer)) {
      acc += 0.5 * reg.l2 * c->kernels.squaredNorm() +
             reg.l1 * c->kernels.array().abs().sum();
    }
  }
  return acc;
}

NetworkGradients Backprop(const LayeredNetwork &net,
                          const Eigen::MatrixXd &inputs,
                          const Eigen::MatrixXd &targets, LossKind loss,
                          const Regularizers &reg, const DropoutMasks *masks,
                          double *batch_objective) {
  if (inputs.rows() != targets.rows() || inputs.rows() == 0) {
    throw ParameterError("network: batch must be non-empty and aligned");
  }
  const int n_layers = int(net.layers.size());
  if (n_layers == 0) throw ParameterError("network: empty layer stack");

  NetworkGradients grads;
  grads.layers.resize(size_t(n_layers));
  for (int li = 0; li < n_layers; ++li) {
    if (const auto *d = std::get_if<DenseLayer>(&net.layers[size_t(li)])) {
      grads.layers[size_t(li)].weights =
          Eigen::MatrixXd::Zero(d->weights.rows(), d->weights.cols());
      grads.layers[size_t(li)].bias = Eigen::VectorXd::Zero(d->bias.size());
    } else if (const auto *c =
                   std::get_if<Conv2dLayer>(&net.layers[size_t(li)])) {
      grads.layers[size_t(li)].weights =
          Eigen::MatrixXd::Zero(c->kernels.rows(), c->kernels.cols());
      grads.layers[size_t(li)].bias = Eigen::VectorXd::Zero(c->bias.size());
    }
  }

  const bool categorical =
      LayerActivation(net.layers.back()) == Activation::kSoftmax;
  double total_loss = 0.0;

  for (int s = 0; s < inputs.rows(); ++s) {
    const ForwardTrace trace = Forward(net, inputs.row(s), masks);
    const Eigen::VectorXd target = targets.row(s);
    total_loss += LossValue(trace.Output(), target, loss, categorical);

    // delta starts as dJ/d(pre-activation) of the output layer and is
    // propagated to each earlier layer's post-activation, then through
    // mask, activation and linear map.
    Eigen::VectorXd delta = OutputDelta(
        trace.Output(), target, LayerActivation(net.layers.back()), loss);

    for (int li = n_layers - 1; li >= 0; --li) {
      const Layer &layer = net.layers[size_t(li)];
      const TensorShape &in_shape = trace.shapes[size_t(li)];
      const TensorShape &out_shape = trace.shapes[size_t(li) + 1];
      const Eigen::VectorXd &a_in = trace.activations[size_t(li)];

      // For non-final layers delta currently lives at the post-activation
      // (post-mask) output; fold in the mask and the activation slope.
      if (li != n_layers - 1) {
        if (masks && (*masks)[size_t(li)].size() > 0) {
          delta.array() *= (*masks)[size_t(li)].array();
        }
        const Activation act = LayerActivation(layer);
        if (!std::holds_alternative<MaxPool2dLayer>(layer)) {
          // Post-mask activations differ from raw f(z) when masked, so the
          // slope is taken from the stored pre-activation.
          const Eigen::VectorXd raw =
              Activate(trace.preacts[size_t(li)], act);
          delta.array() *= ActivationDerivative(raw, act);
        }
      }

      if (const auto *d = std::get_if<DenseLayer>(&layer)) {
        grads.layers[size_t(li)].weights.noalias() +=
            delta * a_in.transpose();
        grads.layers[size_t(li)].bias += delta;
        if (li > 0) delta = d->weights.transpose() * delta;
      } else if (const auto *c = std::get_if<Conv2dLayer>(&layer)) {
        Eigen::VectorXd delta_in = Eigen::VectorXd::Zero(in_shape.Size());
        for (int co = 0; co < c->out_channels; ++co) {
          for (int oy = 0; oy < out_shape.height; ++oy) {
            for (int ox = 0; ox < out_shape.width; ++ox) {
              const double dv = delta(TensorIndex(out_shape, co, oy, ox));
              if (dv == 0.0) continue;
              grads.layers[size_t(li)].bias(co) += dv;
              int widx = 0;
              for (int ci = 0; ci < c->in_channels; ++ci) {
                for (int ky = 0; ky < c->kernel; ++ky) {
                  for (int kx = 0; kx < c->kernel; ++kx, ++widx) {
                    const int iidx =
                        TensorIndex(in_shape, ci, oy + ky, ox + kx);
                    grads.layers[size_t(li)].weights(co, widx) +=
                        dv * a_in(iidx);
                    delta_in(iidx) += dv * c->kernels(co, widx);
                  }
                }
              }
            }
          }
        }
        if (li > 0) delta = std::move(delta_in);
      } else {
        Eigen::VectorXd delta_in = Eigen::VectorXd::Zero(in_shape.Size());
        const std::vector<int> &argmax = trace.pool_argmax[size_t(li)];
        for (int oidx = 0; oidx < out_shape.Size(); ++oidx) {
          delta_in(argmax[size_t(oidx)]) += delta(oidx);
        }
        if (li > 0) delta = std::move(delta_in);
      }
    }
  }

  const double inv_batch = 1.0 / double(inputs.rows());
  for (LayerGradients &g : grads.layers) {
    if (g.weights.size() > 0) g.weights *= inv_batch;
    if (g.bias.size() > 0) g.bias *= inv_batch;
  }

  // Regularizer terms act on the full objective, not per sample.
  for (int li = 0; li < n_layers; ++li) {
    const Eigen::MatrixXd *w = nullptr;
    if (const auto *d = std::get_if<DenseLayer>(&net.layers[size_t(li)])) {
      w = &d->weights;
    } else if (const auto *c =
                   std::get_if<Conv2dLayer>(&net.layers[size_t(li)])) {
      w = &c->kernels;
    }
    if (!w) continue;
    if (reg.l2 != 0.0) grads.layers[size_t(li)].weights += reg.l2 * *w;
    if (reg.l1 != 0.0) {
      grads.layers[size_t(li)].weights +=
          reg.l1 * w->array().sign().matrix();
    }
  }

  if (batch_objective) {
    double penalty = 0.0;
    for (const Layer &layer : net.layers) {
      if (const auto *d = std::get_if<DenseLayer>(&layer)) {
        penalty += 0.5 * reg.l2 * d->weights.squaredNorm() +
                   reg.l1 * d->weights.array().abs().sum();
      } else if (const auto *c = std::get_if<Conv2dLayer>(&layer)) {
        penalty += 0.5 * reg.l2 * c->kernels.squaredNorm() +
                   reg.l1 * c->kernels.array().abs().sum();
      }
    }
    *batch_objective = total_loss * inv_batch + penalty;
  }
  return grads;
}

int ParameterCount(const LayeredNetwork &net) {
  int n = 0;
  for (const Layer &layer : net.layers) {
    if (const auto *d = std::get_if<DenseLayer>(&layer)) {
      n += int(d->weights.size() + d->bias.size());
    } else if (const auto *c = std::get_if<Conv2dLayer>(&layer)) {
      n += int(c->kernels.size() + c->bias.size());
    }
  }
  return n;
}

Eigen::VectorXd FlattenParameters(const LayeredNetwork &net) {
  Eigen::VectorXd flat(ParameterCount(net));
  int pos = 0;
  for (const Layer &layer : net.layers) {
    const Eigen::MatrixXd *w = nullptr;
    const Eigen::VectorXd *b = nullptr;
    if (const auto *d = std::get_if<DenseLayer>(&layer)) {
      w = &d->weights;
      b = &d->bias;
    } else if (const auto *c = std::get_if<Conv2dLayer>(&layer)) {
      w = &c->kernels;
      b = &c->bias;
    }
    if (!w) continue;
    for (int j = 0; j < w->cols(); ++j) {
      for (int i = 0; i < w->rows(); ++i) flat(pos++) = (*w)(i, j);
    }
    for (int i = 0; i < b->size(); ++i) flat(pos++) = (*b)(i);
  }
  return flat;
}

void SetParameters(LayeredNetwork &net, const Eigen::VectorXd &flat) {
  if (int(flat.size()) != ParameterCount(net)) {
    throw ParameterError("network: flat parameter size mismatch");
  }
  int pos = 0;
  for (Layer &layer : net.layers) {
    Eigen::MatrixXd *w = nullptr;
    Eigen::VectorXd *b = nullptr;
    if (auto *d = std::get_if<DenseLayer>(&layer)) {
      w = &d->weights;
      b = &d->bias;
    } else if (auto *c = std::get_if<Conv2dLayer>(&layer)) {
      w = &c->kernels;
      b = &c->bias;
    }
    if (!w) continue;
    for (int j = 0; j < w->cols(); ++j) {
      for (int i = 0; i < w->rows(); ++i) (*w)(i, j) = flat(pos++);
    }
    for (int i = 0; i < b->size(); ++i) (*b)(i) = flat(pos++);
  }
}

Eigen::VectorXd FlattenGradients(const NetworkGradients &grads) {
  int n = 0;
  for (const LayerGradients &g : grads.layers) {
    n += int(g.weights.size() + g.bias.size());
  }
  Eigen::VectorXd flat(n);
  int pos = 0;
  for (const LayerGradients &g : grads.layers) {
    for (int j = 0; j < g.weights.cols(); ++j) {
      for (int i = 0; i < g.weights.rows(); ++i) flat(pos++) = g.weights(i, j);
    }
    for (int i = 0; i < g.bias.size(); ++i) flat(pos++) = g.bias(i);
  }
  return flat;
}

}  // namespace facevox
