#include "slimqfl/classical_nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "slimqfl/qsnn.hpp"

namespace slimqfl {
namespace {

void check_input(std::span<const double> input) {
  if (input.size() != DenseParams::kInputs) {
    throw std::invalid_argument("dense input must have 16 features, got " +
                                std::to_string(input.size()));
  }
}

void check_label(int label) {
  if (label < 0 || label >= static_cast<int>(DenseParams::kClasses)) {
    throw std::out_of_range("label " + std::to_string(label) +
                            " out of range");
  }
}

}  // namespace

std::vector<bool> DenseParams::corner_drop_mask() {
  std::vector<bool> mask(kInputs, true);
  mask[0] = false;
  mask[3] = false;
  return mask;
}

std::size_t DenseParams::trainable_count() const {
  return static_cast<std::size_t>(
             std::count(input_mask.begin(), input_mask.end(), true)) *
         kClasses;
}

void DenseParams::validate() const {
  if (weights.size() != kInputs * kClasses || input_mask.size() != kInputs) {
    throw std::invalid_argument("dense parameters have the wrong shape");
  }
}

std::vector<double> nn_forward(std::span<const double> input,
                               const DenseParams& params) {
  check_input(input);
  params.validate();
  std::vector<double> logits(DenseParams::kClasses, 0.0);
  for (std::size_t i = 0; i < DenseParams::kInputs; ++i) {
    if (!params.input_mask[i]) continue;
    for (std::size_t k = 0; k < DenseParams::kClasses; ++k) {
      logits[k] += input[i] * params.at(i, k);
    }
  }
  return logits;
}

double nn_loss(std::span<const double> input, int label,
               const DenseParams& params) {
  check_label(label);
  const auto logits = nn_forward(input, params);
  // loss() scales by w; logits are used as-is here.
  return loss(logits, label, 1.0);
}

std::vector<double> nn_grad(std::span<const double> input, int label,
                            const DenseParams& params) {
  check_label(label);
  const auto logits = nn_forward(input, params);
  std::vector<double> delta = softmax(logits);
  delta[static_cast<std::size_t>(label)] -= 1.0;
  std::vector<double> grad(params.weights.size(), 0.0);
  for (std::size_t i = 0; i < DenseParams::kInputs; ++i) {
    if (!params.input_mask[i]) continue;
    for (std::size_t k = 0; k < DenseParams::kClasses; ++k) {
      grad[i * DenseParams::kClasses + k] = input[i] * delta[k];
    }
  }
  return grad;
}

}  // namespace slimqfl
