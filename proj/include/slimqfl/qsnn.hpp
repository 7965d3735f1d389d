#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slimqfl/state_vector.hpp"

namespace slimqfl {

/// Shape of the quantum slimmable network. Each layer holds three rotations
/// (X, Y, Z) per qubit followed by a CNOT ring; one measurement pole per class.
struct QsnnConfig {
  int n_qubits = 4;
  int n_layers = 3;
  int n_classes = 4;
  double observable_scale = 1.6;  // logits = scale * observable

  std::size_t angle_count() const {
    return static_cast<std::size_t>(n_layers) * n_qubits * 3;
  }
  std::size_t pole_count() const { return static_cast<std::size_t>(n_classes); }
  std::size_t feature_count() const {
    return static_cast<std::size_t>(n_qubits) * 4;
  }

  void validate() const;
};

/// Model parameters: measurement poles (theta) and circuit angles (phi),
/// both in radians.
struct QsnnParams {
  std::vector<double> pole;
  std::vector<double> angle;

  static QsnnParams zeros(const QsnnConfig& config);
  void validate(const QsnnConfig& config) const;

  friend bool operator==(const QsnnParams&, const QsnnParams&) = default;
};

/// Classical input already scaled to [0, pi], four features per qubit.
struct EncodedInput {
  std::vector<double> features;
};

/// Per-class expectation values, each in [-1, 1].
using Observable = std::vector<double>;

/// Applies RX, RY, RZ, RX on each qubit q with features 4q..4q+3.
/// Expects the |0...0> state.
StateVector encode(StateVector state, const EncodedInput& input);

/// The gate list of the parameterized circuit for the given angles.
std::vector<GateOp> pqc_ops(std::span<const double> angle,
                            const QsnnConfig& config);

StateVector apply_pqc(StateVector state, std::span<const double> angle,
                      const QsnnConfig& config);

/// obs_k = <Z_k> after RY(theta_k) on qubit k.
Observable measure_with_pole(const StateVector& state,
                             std::span<const double> pole);

Observable forward(const EncodedInput& input, const QsnnParams& params,
                   const QsnnConfig& config);

std::vector<double> softmax(std::span<const double> logits);

/// Softmax cross-entropy of logits w * obs against label.
double loss(const Observable& obs, int label, double w);

/// Index of the largest logit; ties go to the lowest index.
int argmax(std::span<const double> values);

/// dobs_k/dtheta_k = [obs_k(theta_k + pi/2) - obs_k(theta_k - pi/2)] / 2 for a
/// state leaving the circuit. Poles are local: dobs_k/dtheta_j = 0 for j != k.
std::vector<double> pole_shift_derivatives(const StateVector& state,
                                           std::span<const double> pole);

/// Observable at the given parameters and its shift-rule Jacobian with respect
/// to the angles; d[j * n_classes + k] = dobs_k/dphi_j.
struct AngleJacobian {
  Observable obs;
  std::vector<double> d;
};

AngleJacobian angle_shift_jacobian(const EncodedInput& input,
                                   const QsnnParams& params,
                                   const QsnnConfig& config);

/// dL/dtheta by the parameter-shift rule on each pole rotation.
std::vector<double> grad_pole(const EncodedInput& input, int label,
                              const QsnnParams& params,
                              const QsnnConfig& config);

/// dL/dphi by the parameter-shift rule: two shifted circuit evaluations per
/// angle, each yielding all class observables.
std::vector<double> grad_angle(const EncodedInput& input, int label,
                               const QsnnParams& params,
                               const QsnnConfig& config);

}  // namespace slimqfl
