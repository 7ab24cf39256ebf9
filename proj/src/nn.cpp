#include "metaprior/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "metaprior/rng.hpp"

namespace metaprior {

namespace {

// Offset of layer `l`'s weight block inside the flat vector.
Index layer_offset(const Layout& layout, std::size_t l) {
  Index off = 0;
  for (std::size_t i = 0; i < l; ++i) {
    off += layout[i].input_dim * layout[i].output_dim + layout[i].output_dim;
  }
  return off;
}

Eigen::Map<const Matrix> weight_map(const WeightVector& w, std::size_t l,
                                    Index off) {
  return {w.values.data() + off, w.layout[l].output_dim,
          w.layout[l].input_dim};
}

Eigen::Map<const Vector> bias_map(const WeightVector& w, std::size_t l,
                                  Index off) {
  const Index wcount = w.layout[l].input_dim * w.layout[l].output_dim;
  return {w.values.data() + off + wcount, w.layout[l].output_dim};
}

Matrix apply_activation(Matrix z, Activation act) {
  if (act == Activation::kTanh) z = z.array().tanh().matrix();
  return z;
}

}  // namespace

Layout dense_layout(std::initializer_list<Index> dims) {
  if (dims.size() < 2) {
    throw std::invalid_argument("dense_layout: need at least two dims");
  }
  Layout layout;
  auto it = dims.begin();
  Index prev = *it++;
  for (; it != dims.end(); ++it) {
    const bool last = std::next(it) == dims.end();
    layout.push_back(
        {prev, *it, last ? Activation::kIdentity : Activation::kTanh});
    prev = *it;
  }
  return layout;
}

Index parameter_count(const Layout& layout) {
  Index n = 0;
  for (const auto& spec : layout) {
    n += spec.input_dim * spec.output_dim + spec.output_dim;
  }
  return n;
}

void validate_layout(const Layout& layout) {
  if (layout.empty()) throw std::invalid_argument("layout: empty");
  for (std::size_t l = 0; l < layout.size(); ++l) {
    if (layout[l].input_dim < 1 || layout[l].output_dim < 1) {
      throw std::invalid_argument("layout: layer dims must be >= 1");
    }
    if (l > 0 && layout[l].input_dim != layout[l - 1].output_dim) {
      throw std::invalid_argument("layout: dimension chain mismatch");
    }
  }
  if (layout.back().activation != Activation::kIdentity) {
    throw std::invalid_argument("layout: final activation must be identity");
  }
}

WeightVector init_weights(const Layout& layout, std::uint64_t seed) {
  validate_layout(layout);
  WeightVector w;
  w.layout = layout;
  w.values = Vector::Zero(parameter_count(layout));

  RandomStream rng(seed);
  Index off = 0;
  for (const auto& spec : layout) {
    const Index wcount = spec.input_dim * spec.output_dim;
    const Scalar bound =
        std::sqrt(6.0 / static_cast<Scalar>(spec.input_dim + spec.output_dim));
    for (Index i = 0; i < wcount; ++i) {
      w.values[off + i] = rng.uniform(-bound, bound);
    }
    off += wcount + spec.output_dim;  // biases stay zero
  }
  return w;
}

Scalar forward(const WeightVector& w, Scalar x) {
  if (!std::isfinite(x)) {
    throw std::domain_error("forward: non-finite input");
  }
  Vector xs(1);
  xs[0] = x;
  return forward_batch(w, xs)[0];
}

Vector forward_batch(const WeightVector& w, const Vector& xs) {
  validate_layout(w.layout);
  if (w.values.size() != parameter_count(w.layout)) {
    throw std::invalid_argument("forward: value count does not match layout");
  }

  Matrix a = xs.transpose();  // (input_dim=1) x batch
  Index off = 0;
  for (std::size_t l = 0; l < w.layout.size(); ++l) {
    const auto W = weight_map(w, l, off);
    const auto b = bias_map(w, l, off);
    Matrix z = W * a;
    z.colwise() += b;
    a = apply_activation(std::move(z), w.layout[l].activation);
    off += w.layout[l].input_dim * w.layout[l].output_dim +
           w.layout[l].output_dim;
  }
  return a.row(0).transpose();
}

LossGrad mse_loss_grad(const WeightVector& w, const Minibatch& batch) {
  validate_layout(w.layout);
  if (batch.xs.size() == 0 || batch.xs.size() != batch.ys.size()) {
    throw std::invalid_argument("mse_loss_grad: batch empty or ragged");
  }

  const std::size_t layers = w.layout.size();
  const Index n = batch.xs.size();

  // Forward pass keeping post-activation values; tanh' is recovered from
  // the activations themselves (1 - a^2).
  std::vector<Matrix> acts(layers + 1);
  acts[0] = batch.xs.transpose();
  {
    Index off = 0;
    for (std::size_t l = 0; l < layers; ++l) {
      const auto W = weight_map(w, l, off);
      const auto b = bias_map(w, l, off);
      Matrix z = W * acts[l];
      z.colwise() += b;
      acts[l + 1] = apply_activation(std::move(z), w.layout[l].activation);
      off += w.layout[l].input_dim * w.layout[l].output_dim +
             w.layout[l].output_dim;
    }
  }

  LossGrad out;
  out.grad.layout = w.layout;
  out.grad.values = Vector::Zero(w.values.size());

  const Matrix residual = acts[layers] - batch.ys.transpose();
  out.loss = residual.squaredNorm() / static_cast<Scalar>(n);

  // d(mean residual^2)/d(output)
  Matrix delta = (2.0 / static_cast<Scalar>(n)) * residual;

  for (std::size_t l = layers; l-- > 0;) {
    const Index off = layer_offset(w.layout, l);
    const Index wcount = w.layout[l].input_dim * w.layout[l].output_dim;

    Eigen::Map<Matrix> gW(out.grad.values.data() + off,
                          w.layout[l].output_dim, w.layout[l].input_dim);
    Eigen::Map<Vector> gb(out.grad.values.data() + off + wcount,
                          w.layout[l].output_dim);

    gW = delta * acts[l].transpose();
    gb = delta.rowwise().sum();

    if (l > 0) {
      const auto W = weight_map(w, l, off);
      Matrix back = W.transpose() * delta;
      if (w.layout[l - 1].activation == Activation::kTanh) {
        back.array() *= 1.0 - acts[l].array().square();
      }
      delta = std::move(back);
    }
  }
  return out;
}

WeightVector sgd_steps(const WeightVector& w, std::span<const Minibatch> batches,
                       Scalar step_size) {
  if (!(step_size > 0)) {
    throw std::invalid_argument("sgd_steps: step size must be positive");
  }
  WeightVector result = w;
  for (const Minibatch& batch : batches) {
    const LossGrad lg = mse_loss_grad(result, batch);
    result.values -= step_size * lg.grad.values;
  }
  return result;
}

}  // namespace metaprior
