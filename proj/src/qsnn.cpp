#include "slimqfl/qsnn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace slimqfl {
namespace {

constexpr double kShift = std::numbers::pi / 2.0;

void check_label(int label, int n_classes) {
  if (label < 0 || label >= n_classes) {
    throw std::out_of_range("label " + std::to_string(label) +
                            " out of range for " + std::to_string(n_classes) +
                            " classes");
  }
}

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + " must be finite");
    }
  }
}

// dL/dobs_k for softmax cross-entropy over w * obs.
std::vector<double> loss_sensitivity(const Observable& obs, int label,
                                     double w) {
  std::vector<double> logits(obs.size());
  for (std::size_t k = 0; k < obs.size(); ++k) logits[k] = w * obs[k];
  std::vector<double> sens = softmax(logits);
  sens[static_cast<std::size_t>(label)] -= 1.0;
  for (double& s : sens) s *= w;
  return sens;
}

StateVector encoded_state(const EncodedInput& input, const QsnnConfig& config) {
  if (input.features.size() != config.feature_count()) {
    throw std::invalid_argument("input has " +
                                std::to_string(input.features.size()) +
                                " features, expected " +
                                std::to_string(config.feature_count()));
  }
  return encode(StateVector(config.n_qubits), input);
}

// A gate with its half-angle trigonometry resolved once.
struct PreparedGate {
  GateOp::Kind kind;
  Axis axis;
  int target;
  int control;
  double cos_half;
  double sin_half;
};

Axis axis_of(GateOp::Kind kind) {
  switch (kind) {
    case GateOp::Kind::RY: return Axis::Y;
    case GateOp::Kind::RZ: return Axis::Z;
    default: return Axis::X;
  }
}

std::vector<PreparedGate> prepare(const std::vector<GateOp>& ops) {
  std::vector<PreparedGate> out;
  out.reserve(ops.size());
  for (const auto& op : ops) {
    out.push_back(PreparedGate{op.kind, axis_of(op.kind), op.target,
                               op.control.value_or(-1),
                               std::cos(0.5 * op.angle),
                               std::sin(0.5 * op.angle)});
  }
  return out;
}

std::vector<PreparedGate> prepare_poles(std::span<const double> pole) {
  std::vector<PreparedGate> out;
  out.reserve(pole.size());
  for (std::size_t k = 0; k < pole.size(); ++k) {
    out.push_back(PreparedGate{GateOp::Kind::RY, Axis::Y, static_cast<int>(k),
                               -1, std::cos(0.5 * pole[k]),
                               std::sin(0.5 * pole[k])});
  }
  return out;
}

void apply_prepared(StateVector& state, const PreparedGate& op) {
  if (op.kind == GateOp::Kind::CNOT) {
    state.cnot(op.control, op.target);
  } else {
    state.rotate_half(op.axis, op.target, op.cos_half, op.sin_half);
  }
}

// Pole rotations act on distinct qubits, so one rotated copy serves every
// class: RY on qubit j leaves the marginal of qubit k != j intact.
void measure_prepared(const StateVector& state,
                      const std::vector<PreparedGate>& poles,
                      std::span<double> out) {
  StateVector rotated = state;
  for (const auto& p : poles) apply_prepared(rotated, p);
  rotated.expectation_z_all(out);
}

}  // namespace

void QsnnConfig::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("n_qubits out of range");
  }
  if (n_layers < 0) throw std::invalid_argument("n_layers must be >= 0");
  if (n_classes < 2 || n_classes > n_qubits) {
    throw std::invalid_argument("n_classes must be in [2, n_qubits]");
  }
  if (!std::isfinite(observable_scale) || observable_scale <= 0.0) {
    throw std::invalid_argument("observable_scale must be positive");
  }
}

QsnnParams QsnnParams::zeros(const QsnnConfig& config) {
  return QsnnParams{std::vector<double>(config.pole_count(), 0.0),
                    std::vector<double>(config.angle_count(), 0.0)};
}

void QsnnParams::validate(const QsnnConfig& config) const {
  if (pole.size() != config.pole_count()) {
    throw std::invalid_argument("pole vector has " +
                                std::to_string(pole.size()) +
                                " entries, expected " +
                                std::to_string(config.pole_count()));
  }
  if (angle.size() != config.angle_count()) {
    throw std::invalid_argument("angle vector has " +
                                std::to_string(angle.size()) +
                                " entries, expected " +
                                std::to_string(config.angle_count()));
  }
  check_finite(pole, "pole parameters");
  check_finite(angle, "angle parameters");
}

StateVector encode(StateVector state, const EncodedInput& input) {
  const int n = state.num_qubits();
  if (input.features.size() != static_cast<std::size_t>(4 * n)) {
    throw std::invalid_argument("encoder expects 4 features per qubit");
  }
  const auto& x = input.features;
  for (int q = 0; q < n; ++q) {
    const std::size_t base = static_cast<std::size_t>(4 * q);
    state.rotate(Axis::X, q, x[base]);
    state.rotate(Axis::Y, q, x[base + 1]);
    state.rotate(Axis::Z, q, x[base + 2]);
    state.rotate(Axis::X, q, x[base + 3]);
  }
  return state;
}

std::vector<GateOp> pqc_ops(std::span<const double> angle,
                            const QsnnConfig& config) {
  if (angle.size() != config.angle_count()) {
    throw std::invalid_argument("angle vector has " +
                                std::to_string(angle.size()) +
                                " entries, expected " +
                                std::to_string(config.angle_count()));
  }
  const int n = config.n_qubits;
  std::vector<GateOp> ops;
  ops.reserve(angle.size() + static_cast<std::size_t>(config.n_layers * n));
  std::size_t j = 0;
  for (int layer = 0; layer < config.n_layers; ++layer) {
    for (int q = 0; q < n; ++q) {
      ops.push_back(GateOp::rotation(Axis::X, q, angle[j++]));
      ops.push_back(GateOp::rotation(Axis::Y, q, angle[j++]));
      ops.push_back(GateOp::rotation(Axis::Z, q, angle[j++]));
    }
    if (n > 1) {
      for (int q = 0; q < n; ++q) ops.push_back(GateOp::cnot(q, (q + 1) % n));
    }
  }
  return ops;
}

StateVector apply_pqc(StateVector state, std::span<const double> angle,
                      const QsnnConfig& config) {
  if (state.num_qubits() != config.n_qubits) {
    throw std::invalid_argument("state width does not match config");
  }
  for (const auto& op : pqc_ops(angle, config)) state.apply(op);
  return state;
}

Observable measure_with_pole(const StateVector& state,
                             std::span<const double> pole) {
  if (pole.size() > static_cast<std::size_t>(state.num_qubits())) {
    throw std::invalid_argument("more poles than qubits");
  }
  Observable obs(pole.size());
  measure_prepared(state, prepare_poles(pole), obs);
  return obs;
}

Observable forward(const EncodedInput& input, const QsnnParams& params,
                   const QsnnConfig& config) {
  params.validate(config);
  StateVector state = encoded_state(input, config);
  state = apply_pqc(std::move(state), params.angle, config);
  return measure_with_pole(state, params.pole);
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - peak);
    total += out[k];
  }
  for (double& v : out) v /= total;
  return out;
}

double loss(const Observable& obs, int label, double w) {
  check_label(label, static_cast<int>(obs.size()));
  double peak = -INFINITY;
  for (double o : obs) peak = std::max(peak, w * o);
  double total = 0.0;
  for (double o : obs) total += std::exp(w * o - peak);
  const double value =
      peak + std::log(total) - w * obs[static_cast<std::size_t>(label)];
  return std::max(0.0, value);
}

int argmax(std::span<const double> values) {
  int best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[static_cast<std::size_t>(best)]) {
      best = static_cast<int>(k);
    }
  }
  return best;
}

std::vector<double> pole_shift_derivatives(const StateVector& state,
                                           std::span<const double> pole) {
  if (pole.size() > static_cast<std::size_t>(state.num_qubits())) {
    throw std::invalid_argument("more poles than qubits");
  }
  std::vector<double> d(pole.size());
  for (std::size_t k = 0; k < pole.size(); ++k) {
    const int q = static_cast<int>(k);
    StateVector plus = state;
    plus.rotate(Axis::Y, q, pole[k] + kShift);
    StateVector minus = state;
    minus.rotate(Axis::Y, q, pole[k] - kShift);
    d[k] = 0.5 * (plus.expectation_z(q) - minus.expectation_z(q));
  }
  return d;
}

std::vector<double> grad_pole(const EncodedInput& input, int label,
                              const QsnnParams& params,
                              const QsnnConfig& config) {
  params.validate(config);
  check_label(label, config.n_classes);
  const StateVector state =
      apply_pqc(encoded_state(input, config), params.angle, config);
  const Observable obs = measure_with_pole(state, params.pole);
  const std::vector<double> sens =
      loss_sensitivity(obs, label, config.observable_scale);
  std::vector<double> grad = pole_shift_derivatives(state, params.pole);
  for (std::size_t k = 0; k < grad.size(); ++k) grad[k] *= sens[k];
  return grad;
}

AngleJacobian angle_shift_jacobian(const EncodedInput& input,
                                   const QsnnParams& params,
                                   const QsnnConfig& config) {
  params.validate(config);
  const std::vector<PreparedGate> ops = prepare(pqc_ops(params.angle, config));
  const std::vector<PreparedGate> poles = prepare_poles(params.pole);

  // Record the state entering every rotation gate; a shifted evaluation
  // resumes from there instead of replaying the prefix. pqc_ops emits the
  // rotations in angle order.
  StateVector state = encoded_state(input, config);
  std::vector<std::size_t> rotation_at;
  std::vector<StateVector> before;
  rotation_at.reserve(params.angle.size());
  before.reserve(params.angle.size());
  for (std::size_t g = 0; g < ops.size(); ++g) {
    if (ops[g].kind != GateOp::Kind::CNOT) {
      rotation_at.push_back(g);
      before.push_back(state);
    }
    apply_prepared(state, ops[g]);
  }
  const std::size_t n_classes = params.pole.size();
  AngleJacobian jac{Observable(n_classes),
                    std::vector<double>(params.angle.size() * n_classes)};
  measure_prepared(state, poles, jac.obs);

  Observable plus(n_classes);
  Observable minus(n_classes);
  auto shifted = [&](std::size_t j, double shift, Observable& out) {
    const std::size_t g = rotation_at[j];
    StateVector s = before[j];
    PreparedGate op = ops[g];
    const double half = 0.5 * (params.angle[j] + shift);
    op.cos_half = std::cos(half);
    op.sin_half = std::sin(half);
    apply_prepared(s, op);
    for (std::size_t h = g + 1; h < ops.size(); ++h) apply_prepared(s, ops[h]);
    measure_prepared(s, poles, out);
  };

  for (std::size_t j = 0; j < params.angle.size(); ++j) {
    shifted(j, kShift, plus);
    shifted(j, -kShift, minus);
    for (std::size_t k = 0; k < n_classes; ++k) {
      jac.d[j * n_classes + k] = 0.5 * (plus[k] - minus[k]);
    }
  }
  return jac;
}

std::vector<double> grad_angle(const EncodedInput& input, int label,
                               const QsnnParams& params,
                               const QsnnConfig& config) {
  check_label(label, config.n_classes);
  const AngleJacobian jac = angle_shift_jacobian(input, params, config);
  const std::vector<double> sens =
      loss_sensitivity(jac.obs, label, config.observable_scale);
  const std::size_t n_classes = jac.obs.size();
  std::vector<double> grad(params.angle.size(), 0.0);
  for (std::size_t j = 0; j < grad.size(); ++j) {
    double g = 0.0;
    for (std::size_t k = 0; k < n_classes; ++k) {
      g += sens[k] * jac.d[j * n_classes + k];
    }
    grad[j] = g;
  }
  return grad;
}

}  // namespace slimqfl
