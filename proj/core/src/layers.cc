// Copyright 2026 The delhate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "delhate/layers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "delhate/errors.h"

namespace delhate {
namespace {

void Require(bool ok, const std::string& what) {
  if (!ok) throw ShapeMismatch(what);
}

void RequireRank(const Tensor& t, std::size_t rank, const char* op) {
  Require(t.rank() == rank, std::string(op) + ": expected rank " +
                                std::to_string(rank) + ", got " +
                                ShapeString(t.shape()));
}

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  Require(a.SameShape(b), std::string(op) + ": shapes " +
                              ShapeString(a.shape()) + " and " +
                              ShapeString(b.shape()) + " differ");
}

// Applies f elementwise and records g(x, y) * upstream as the derivative.
template <typename Fwd, typename Deriv>
Var Elementwise(Graph& g, Var x, Fwd fwd, Deriv deriv) {
  const Tensor& in = g.value(x);
  Tensor out(in.shape());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = fwd(in[i]);
  return g.Record(std::move(out), {x}, [x, deriv](Graph& gr, Var self) {
    const Tensor& xin = gr.value(x);
    const Tensor& y = gr.value(self);
    const Tensor& up = gr.grad(self);
    if (!gr.requires_grad(x)) return;
    Tensor& gx = gr.grad(x);
    for (std::size_t i = 0; i < up.size(); ++i) {
      gx[i] += up[i] * deriv(xin[i], y[i]);
    }
  });
}

double StableSigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

}  // namespace

Var Conv1d(Graph& g, Var input, Var filters, Var bias, std::size_t pad) {
  const Tensor& x = g.value(input);
  const Tensor& f = g.value(filters);
  const Tensor& b = g.value(bias);
  RequireRank(x, 2, "Conv1d input");
  RequireRank(f, 3, "Conv1d filters");
  RequireRank(b, 1, "Conv1d bias");
  const std::size_t c_in = x.dim(0), length = x.dim(1);
  const std::size_t c_out = f.dim(0), width = f.dim(2);
  Require(f.dim(1) == c_in, "Conv1d: filter channels " +
                                std::to_string(f.dim(1)) + " != input " +
                                std::to_string(c_in));
  Require(b.dim(0) == c_out, "Conv1d: bias length mismatch");
  Require(width >= 1 && width <= length + 2 * pad,
          "Conv1d: filter width exceeds padded input");
  const std::size_t out_len = length + 2 * pad - width + 1;

  Tensor out({c_out, out_len});
  for (std::size_t o = 0; o < c_out; ++o) {
    double* row = &out.at(o, 0);
    std::fill(row, row + out_len, b[o]);
    for (std::size_t c = 0; c < c_in; ++c) {
      const double* xs = x.data().data() + c * x.dim(1);
      for (std::size_t k = 0; k < width; ++k) {
        const double w = f.at(o, c, k);
        // Output t reads input t + k - pad.
        const std::size_t t_lo = k < pad ? pad - k : 0;
        const std::size_t t_hi = std::min(out_len, length + pad - k);
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) -
                                     static_cast<std::ptrdiff_t>(pad);
        for (std::size_t t = t_lo; t < t_hi; ++t) {
          row[t] += w * xs[static_cast<std::ptrdiff_t>(t) + shift];
        }
      }
    }
  }

  return g.Record(
      std::move(out), {input, filters, bias},
      [input, filters, bias, pad](Graph& gr, Var self) {
        const Tensor& xv = gr.value(input);
        const Tensor& fv = gr.value(filters);
        const Tensor& up = gr.grad(self);
        const std::size_t cin = xv.dim(0), len = xv.dim(1);
        const std::size_t cout = fv.dim(0), wid = fv.dim(2);
        const std::size_t olen = up.dim(1);
        const bool need_x = gr.requires_grad(input);
        const bool need_f = gr.requires_grad(filters);
        if (gr.requires_grad(bias)) {
          Tensor& gb = gr.grad(bias);
          for (std::size_t o = 0; o < cout; ++o) {
            double s = 0.0;
            for (std::size_t t = 0; t < olen; ++t) s += up.at(o, t);
            gb[o] += s;
          }
        }
        if (!need_x && !need_f) return;
        Tensor* gx = need_x ? &gr.grad(input) : nullptr;
        Tensor* gf = need_f ? &gr.grad(filters) : nullptr;
        for (std::size_t o = 0; o < cout; ++o) {
          const double* go = up.data().data() + o * up.dim(1);
          for (std::size_t c = 0; c < cin; ++c) {
            const double* xs = xv.data().data() + c * xv.dim(1);
            for (std::size_t k = 0; k < wid; ++k) {
              const std::size_t t_lo = k < pad ? pad - k : 0;
              const std::size_t t_hi = std::min(olen, len + pad - k);
              const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(k) -
                                           static_cast<std::ptrdiff_t>(pad);
              if (gf != nullptr) {
                double s = 0.0;
                for (std::size_t t = t_lo; t < t_hi; ++t) {
                  s += go[t] * xs[static_cast<std::ptrdiff_t>(t) + shift];
                }
                gf->at(o, c, k) += s;
              }
              if (gx != nullptr) {
                const double w = fv.at(o, c, k);
                double* gxs = &gx->at(c, 0);
                for (std::size_t t = t_lo; t < t_hi; ++t) {
                  gxs[static_cast<std::ptrdiff_t>(t) + shift] += w * go[t];
                }
              }
            }
          }
        }
      });
}

Var MaxPool1d(Graph& g, Var input, std::size_t rate) {
  const Tensor& x = g.value(input);
  RequireRank(x, 2, "MaxPool1d");
  Require(rate >= 1, "MaxPool1d: rate must be positive");
  const std::size_t channels = x.dim(0), length = x.dim(1);
  const std::size_t out_len = length / rate;
  Require(out_len >= 1, "MaxPool1d: input shorter than one window");
  Tensor out({channels, out_len});
  std::vector<std::size_t> winners(channels * out_len);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t j = 0; j < out_len; ++j) {
      std::size_t best = j * rate;
      double second = -std::numeric_limits<double>::infinity();
      for (std::size_t t = j * rate + 1; t < (j + 1) * rate; ++t) {
        if (x.at(c, t) > x.at(c, best)) {
          second = x.at(c, best);
          best = t;
        } else {
          second = std::max(second, x.at(c, t));
        }
      }
      out.at(c, j) = x.at(c, best);
      winners[c * out_len + j] = best;
      if (rate > 1) margin = std::min(margin, x.at(c, best) - second);
    }
  }
  g.NoteKinkMargin(margin);
  return g.Record(std::move(out), {input},
                  [input, winners = std::move(winners)](Graph& gr, Var self) {
                    const Tensor& up = gr.grad(self);
                    Tensor& gx = gr.grad(input);
                    const std::size_t olen = up.dim(1);
                    for (std::size_t c = 0; c < up.dim(0); ++c) {
                      for (std::size_t j = 0; j < olen; ++j) {
                        gx.at(c, winners[c * olen + j]) += up.at(c, j);
                      }
                    }
                  });
}

Var GlobalMaxPool(Graph& g, Var input) {
  const Tensor& x = g.value(input);
  RequireRank(x, 2, "GlobalMaxPool");
  const std::size_t steps = x.dim(0), features = x.dim(1);
  Require(steps >= 1, "GlobalMaxPool: empty time axis");
  Tensor out({features});
  std::vector<std::size_t> winners(features);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t h = 0; h < features; ++h) {
    std::size_t best = 0;
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 1; t < steps; ++t) {
      if (x.at(t, h) > x.at(best, h)) {
        second = x.at(best, h);
        best = t;
      } else {
        second = std::max(second, x.at(t, h));
      }
    }
    out[h] = x.at(best, h);
    winners[h] = best;
    if (steps > 1) margin = std::min(margin, x.at(best, h) - second);
  }
  g.NoteKinkMargin(margin);
  return g.Record(std::move(out), {input},
                  [input, winners = std::move(winners)](Graph& gr, Var self) {
                    const Tensor& up = gr.grad(self);
                    Tensor& gx = gr.grad(input);
                    for (std::size_t h = 0; h < up.size(); ++h) {
                      gx.at(winners[h], h) += up[h];
                    }
                  });
}

Var Transpose(Graph& g, Var matrix) {
  const Tensor& x = g.value(matrix);
  RequireRank(x, 2, "Transpose");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  Tensor out({cols, rows});
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out.at(j, i) = x.at(i, j);
  }
  return g.Record(std::move(out), {matrix}, [matrix](Graph& gr, Var self) {
    const Tensor& up = gr.grad(self);
    Tensor& gx = gr.grad(matrix);
    for (std::size_t i = 0; i < gx.dim(0); ++i) {
      for (std::size_t j = 0; j < gx.dim(1); ++j) gx.at(i, j) += up.at(j, i);
    }
  });
}

Var Flatten(Graph& g, Var input) {
  const Tensor& x = g.value(input);
  Tensor out({x.size()}, x.values());
  return g.Record(std::move(out), {input}, [input](Graph& gr, Var self) {
    const Tensor& up = gr.grad(self);
    Tensor& gx = gr.grad(input);
    for (std::size_t i = 0; i < up.size(); ++i) gx[i] += up[i];
  });
}

Var Row(Graph& g, Var matrix, std::size_t row) {
  const Tensor& x = g.value(matrix);
  RequireRank(x, 2, "Row");
  Require(row < x.dim(0), "Row: index out of range");
  const std::size_t cols = x.dim(1);
  std::vector<double> values(x.data().begin() + row * cols,
                             x.data().begin() + (row + 1) * cols);
  return g.Record(Tensor({cols}, std::move(values)), {matrix},
                  [matrix, row](Graph& gr, Var self) {
                    const Tensor& up = gr.grad(self);
                    Tensor& gx = gr.grad(matrix);
                    for (std::size_t j = 0; j < up.size(); ++j) {
                      gx.at(row, j) += up[j];
                    }
                  });
}

Var StackRows(Graph& g, const std::vector<Var>& rows) {
  Require(!rows.empty(), "StackRows: no rows");
  const std::size_t cols = g.value(rows[0]).size();
  Tensor out({rows.size(), cols});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Tensor& r = g.value(rows[i]);
    RequireRank(r, 1, "StackRows");
    Require(r.size() == cols, "StackRows: ragged rows");
    std::copy(r.data().begin(), r.data().end(), &out.at(i, 0));
  }
  return g.Record(std::move(out), rows, [rows](Graph& gr, Var self) {
    const Tensor& up = gr.grad(self);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!gr.requires_grad(rows[i])) continue;
      Tensor& gx = gr.grad(rows[i]);
      for (std::size_t j = 0; j < gx.size(); ++j) gx[j] += up.at(i, j);
    }
  });
}

Var MatVec(Graph& g, Var weight, Var x) {
  const Tensor& w = g.value(weight);
  const Tensor& v = g.value(x);
  RequireRank(w, 2, "MatVec weight");
  RequireRank(v, 1, "MatVec input");
  Require(w.dim(1) == v.dim(0), "MatVec: weight " + ShapeString(w.shape()) +
                                    " vs input " + ShapeString(v.shape()));
  const std::size_t rows = w.dim(0), cols = w.dim(1);
  Tensor out({rows});
  for (std::size_t i = 0; i < rows; ++i) {
    const double* wr = w.data().data() + i * w.dim(1);
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += wr[j] * v[j];
    out[i] = s;
  }
  return g.Record(std::move(out), {weight, x}, [weight, x](Graph& gr, Var self) {
    const Tensor& wv = gr.value(weight);
    const Tensor& xv = gr.value(x);
    const Tensor& up = gr.grad(self);
    const std::size_t rows = wv.dim(0), cols = wv.dim(1);
    if (gr.requires_grad(weight)) {
      Tensor& gw = gr.grad(weight);
      for (std::size_t i = 0; i < rows; ++i) {
        double* gr_row = &gw.at(i, 0);
        for (std::size_t j = 0; j < cols; ++j) gr_row[j] += up[i] * xv[j];
      }
    }
    if (gr.requires_grad(x)) {
      Tensor& gx = gr.grad(x);
      for (std::size_t i = 0; i < rows; ++i) {
        const double* wr = wv.data().data() + i * wv.dim(1);
        for (std::size_t j = 0; j < cols; ++j) gx[j] += up[i] * wr[j];
      }
    }
  });
}

Var Affine(Graph& g, Var weight, Var x, Var bias) {
  const Tensor& b = g.value(bias);
  RequireRank(b, 1, "Affine bias");
  Require(b.dim(0) == g.value(weight).dim(0), "Affine: bias length mismatch");
  return Add(g, MatVec(g, weight, x), bias);
}

Var Add(Graph& g, Var a, Var b) {
  const Tensor& av = g.value(a);
  const Tensor& bv = g.value(b);
  RequireSameShape(av, bv, "Add");
  Tensor out(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
  return g.Record(std::move(out), {a, b}, [a, b](Graph& gr, Var self) {
    const Tensor& up = gr.grad(self);
    for (Var v : {a, b}) {
      if (!gr.requires_grad(v)) continue;
      Tensor& gv = gr.grad(v);
      for (std::size_t i = 0; i < up.size(); ++i) gv[i] += up[i];
    }
  });
}

Var Sub(Graph& g, Var a, Var b) {
  const Tensor& av = g.value(a);
  const Tensor& bv = g.value(b);
  RequireSameShape(av, bv, "Sub");
  Tensor out(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] - bv[i];
  return g.Record(std::move(out), {a, b}, [a, b](Graph& gr, Var self) {
    const Tensor& up = gr.grad(self);
    if (gr.requires_grad(a)) {
      Tensor& ga = gr.grad(a);
      for (std::size_t i = 0; i < up.size(); ++i) ga[i] += up[i];
    }
    if (gr.requires_grad(b)) {
      Tensor& gb = gr.grad(b);
      for (std::size_t i = 0; i < up.size(); ++i) gb[i] -= up[i];
    }
  });
}

Var Mul(Graph& g, Var a, Var b) {
  const Tensor& av = g.value(a);
  const Tensor& bv = g.value(b);
  RequireSameShape(av, bv, "Mul");
  Tensor out(av.shape());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i];
  return g.Record(std::move(out), {a, b}, [a, b](Graph& gr, Var self) {
    const Tensor& up = gr.grad(self);
    const Tensor& av = gr.value(a);
    const Tensor& bv = gr.value(b);
    if (gr.requires_grad(a)) {
      Tensor& ga = gr.grad(a);
      for (std::size_t i = 0; i < up.size(); ++i) ga[i] += up[i] * bv[i];
    }
    if (gr.requires_grad(b)) {
      Tensor& gb = gr.grad(b);
      for (std::size_t i = 0; i < up.size(); ++i) gb[i] += up[i] * av[i];
    }
  });
}

Var Sigmoid(Graph& g, Var x) {
  return Elementwise(
      g, x, StableSigmoid, [](double, double y) { return y * (1.0 - y); });
}

Var Tanh(Graph& g, Var x) {
  return Elementwise(
      g, x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Var Relu(Graph& g, Var x) {
  const Tensor& in = g.value(x);
  double margin = std::numeric_limits<double>::infinity();
  for (double v : in.data()) margin = std::min(margin, std::abs(v));
  g.NoteKinkMargin(margin);
  return Elementwise(
      g, x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Var Softmax(Graph& g, Var x) {
  const Tensor& in = g.value(x);
  RequireRank(in, 1, "Softmax");
  Tensor out(in.shape());
  const double peak = *std::max_element(in.data().begin(), in.data().end());
  double total = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = std::exp(in[i] - peak);
    total += out[i];
  }
  for (std::size_t i = 0; i < in.size(); ++i) out[i] /= total;
  return g.Record(std::move(out), {x}, [x](Graph& gr, Var self) {
    const Tensor& y = gr.value(self);
    const Tensor& up = gr.grad(self);
    double dot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dot += up[i] * y[i];
    Tensor& gx = gr.grad(x);
    for (std::size_t i = 0; i < y.size(); ++i) gx[i] += y[i] * (up[i] - dot);
  });
}

Var Dropout(Graph& g, Var x, double p, bool train, Rng* rng) {
  Require(p >= 0.0 && p < 1.0, "Dropout: p must lie in [0, 1)");
  if (!train || p == 0.0) return x;
  Require(rng != nullptr, "Dropout: train mode needs an rng");
  const Tensor& in = g.value(x);
  const double scale = 1.0 / (1.0 - p);
  std::vector<double> mask(in.size());
  Tensor out(in.shape());
  for (std::size_t i = 0; i < in.size(); ++i) {
    mask[i] = rng->Bernoulli(p) ? 0.0 : scale;
    out[i] = in[i] * mask[i];
  }
  return g.Record(std::move(out), {x},
                  [x, mask = std::move(mask)](Graph& gr, Var self) {
                    const Tensor& up = gr.grad(self);
                    Tensor& gx = gr.grad(x);
                    for (std::size_t i = 0; i < up.size(); ++i) {
                      gx[i] += up[i] * mask[i];
                    }
                  });
}

Var CrossEntropy(Graph& g, Var pred, std::size_t target) {
  const Tensor& p = g.value(pred);
  RequireRank(p, 1, "CrossEntropy");
  Require(target < p.size(), "CrossEntropy: target out of range");
  const double clamped = std::max(p[target], kLogEpsilon);
  return g.Record(Tensor::Scalar(-std::log(clamped)), {pred},
                  [pred, target](Graph& gr, Var self) {
                    const double pt = gr.value(pred)[target];
                    if (pt <= kLogEpsilon) return;
                    gr.grad(pred)[target] -= gr.grad(self)[0] / pt;
                  });
}

Var WeightedSum(Graph& g, Var x, const Tensor& weights) {
  const Tensor& in = g.value(x);
  Require(in.size() == weights.size(), "WeightedSum: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) s += weights[i] * in[i];
  return g.Record(Tensor::Scalar(s), {x}, [x, weights](Graph& gr, Var self) {
    const double up = gr.grad(self)[0];
    Tensor& gx = gr.grad(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += up * weights[i];
  });
}

Var SumScalars(Graph& g, const std::vector<Var>& scalars) {
  double s = 0.0;
  for (Var v : scalars) {
    Require(g.value(v).size() == 1, "SumScalars: non-scalar input");
    s += g.value(v)[0];
  }
  return g.Record(Tensor::Scalar(s), scalars, [scalars](Graph& gr, Var self) {
    const double up = gr.grad(self)[0];
    for (Var v : scalars) {
      if (gr.requires_grad(v)) gr.grad(v)[0] += up;
    }
  });
}

Var FullyConnected(Graph& g, Var x, Var weight, Var bias,
                   Activation activation) {
  Var z = Affine(g, weight, x, bias);
  switch (activation) {
    case Activation::kRelu:
      return Relu(g, z);
    case Activation::kSoftmax:
      return Softmax(g, z);
    case Activation::kNone:
      break;
  }
  return z;
}

Var Gru(Graph& g, Var inputs, const GruWeights& w, Var h0) {
  const Tensor& x = g.value(inputs);
  RequireRank(x, 2, "Gru inputs");
  const std::size_t hidden = g.value(h0).size();
  Require(g.value(w.u_update).dim(0) == hidden &&
              g.value(w.u_update).dim(1) == hidden,
          "Gru: recurrent weight does not match h0");
  std::vector<Var> states;
  states.reserve(x.dim(0));
  Var h = h0;
  for (std::size_t t = 0; t < x.dim(0); ++t) {
    Var xt = Row(g, inputs, t);
    Var z = Sigmoid(g, Add(g, Affine(g, w.w_update, xt, w.b_update),
                           MatVec(g, w.u_update, h)));
    Var r = Sigmoid(g, Add(g, Affine(g, w.w_reset, xt, w.b_reset),
                           MatVec(g, w.u_reset, h)));
    Var c = Tanh(g, Add(g, Affine(g, w.w_candidate, xt, w.b_candidate),
                        MatVec(g, w.u_candidate, Mul(g, r, h))));
    h = Add(g, h, Mul(g, z, Sub(g, c, h)));
    states.push_back(h);
  }
  return StackRows(g, states);
}

Var Lstm(Graph& g, Var inputs, const LstmWeights& w, Var h0, Var c0) {
  const Tensor& x = g.value(inputs);
  RequireRank(x, 2, "Lstm inputs");
  const std::size_t hidden = g.value(h0).size();
  Require(g.value(c0).size() == hidden, "Lstm: h0 and c0 differ in size");
  Require(g.value(w.u_input).dim(0) == hidden &&
              g.value(w.u_input).dim(1) == hidden,
          "Lstm: recurrent weight does not match h0");
  std::vector<Var> states;
  states.reserve(x.dim(0));
  Var h = h0;
  Var c = c0;
  for (std::size_t t = 0; t < x.dim(0); ++t) {
    Var xt = Row(g, inputs, t);
    auto gate = [&](Var wx, Var uh, Var b) {
      return Add(g, Affine(g, wx, xt, b), MatVec(g, uh, h));
    };
    Var i = Sigmoid(g, gate(w.w_input, w.u_input, w.b_input));
    Var f = Sigmoid(g, gate(w.w_forget, w.u_forget, w.b_forget));
    Var cand = Tanh(g, gate(w.w_cell, w.u_cell, w.b_cell));
    Var o = Sigmoid(g, gate(w.w_output, w.u_output, w.b_output));
    c = Add(g, Mul(g, f, c), Mul(g, i, cand));
    h = Mul(g, o, Tanh(g, c));
    states.push_back(h);
  }
  return StackRows(g, states);
}

}  // namespace delhate
