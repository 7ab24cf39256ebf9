#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "metaprior/common.hpp"

namespace metaprior {

enum class Activation { kTanh, kIdentity };

struct LayerSpec {
  Index input_dim = 0;
  Index output_dim = 0;
  Activation activation = Activation::kTanh;

  bool operator==(const LayerSpec&) const = default;
};

using Layout = std::vector<LayerSpec>;

// Dense chain with tanh hidden layers and an identity output layer,
// e.g. dense_layout({1, 64, 64, 1}).
Layout dense_layout(std::initializer_list<Index> dims);

// Total parameter count: sum of in*out weights plus out biases per layer.
Index parameter_count(const Layout& layout);

// Throws std::invalid_argument on zero dims, a broken dimension chain, or
// a non-identity final activation.
void validate_layout(const Layout& layout);

// Flat parameter vector in layer-major order: for each layer, the weight
// matrix (column-major, output_dim x input_dim) followed by the bias.
struct WeightVector {
  Layout layout;
  Vector values;

  bool same_layout(const WeightVector& other) const {
    return layout == other.layout && values.size() == other.values.size();
  }
};

struct Minibatch {
  Vector xs;
  Vector ys;
};

// Fan-scaled uniform init, biases zero; identical output for equal seeds.
WeightVector init_weights(const Layout& layout, std::uint64_t seed);

// Scalar network evaluation. Throws std::domain_error on non-finite x.
Scalar forward(const WeightVector& w, Scalar x);

// Evaluates the network at every entry of xs.
Vector forward_batch(const WeightVector& w, const Vector& xs);

struct LossGrad {
  Scalar loss = 0;
  WeightVector grad;
};

// Mean squared error over the batch and its exact gradient with respect
// to every parameter (reverse-mode, layer by layer).
LossGrad mse_loss_grad(const WeightVector& w, const Minibatch& batch);

// Sequential gradient steps, one per minibatch; the input is not modified.
WeightVector sgd_steps(const WeightVector& w, std::span<const Minibatch> batches,
                       Scalar step_size);

}  // namespace metaprior
