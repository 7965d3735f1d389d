#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace slimqfl {

/// Single dense layer without bias, inputs x classes, row-major
/// (weights[i * n_classes + k]). An optional input mask drops features: masked
/// rows stay at zero and receive zero gradient.
struct DenseParams {
  static constexpr std::size_t kInputs = 16;
  static constexpr std::size_t kClasses = 4;

  std::vector<double> weights = std::vector<double>(kInputs * kClasses, 0.0);
  std::vector<bool> input_mask = std::vector<bool>(kInputs, true);

  /// Mask that drops the two top corner pixels, leaving 14 x 4 = 56 weights.
  static std::vector<bool> corner_drop_mask();

  double& at(std::size_t input, std::size_t k) {
    return weights[input * kClasses + k];
  }
  double at(std::size_t input, std::size_t k) const {
    return weights[input * kClasses + k];
  }

  std::size_t trainable_count() const;
  void validate() const;

  friend bool operator==(const DenseParams&, const DenseParams&) = default;
};

std::vector<double> nn_forward(std::span<const double> input,
                               const DenseParams& params);

double nn_loss(std::span<const double> input, int label,
               const DenseParams& params);

/// Softmax cross-entropy gradient, outer(input, softmax(logits) - onehot).
/// Same layout as DenseParams::weights.
std::vector<double> nn_grad(std::span<const double> input, int label,
                            const DenseParams& params);

}  // namespace slimqfl
