#include "slimqfl/state_vector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace slimqfl {
namespace {

void check_n_qubits(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw std::invalid_argument("n_qubits must be in [1, " +
                                std::to_string(kMaxQubits) + "], got " +
                                std::to_string(n));
  }
}

// The kernels below work on raw real/imag parts; std::complex multiplication
// carries NaN-recovery branches that dominate at this state size.

void rx_kernel(Complex* amps, std::size_t dim, std::size_t mask, double c,
               double s) {
  for (std::size_t base = 0; base < dim; base += 2 * mask) {
    for (std::size_t i = base; i < base + mask; ++i) {
      Complex& a0 = amps[i];
      Complex& a1 = amps[i | mask];
      const double x0 = a0.real(), y0 = a0.imag();
      const double x1 = a1.real(), y1 = a1.imag();
      // [c, -is; -is, c]
      a0 = Complex(c * x0 + s * y1, c * y0 - s * x1);
      a1 = Complex(s * y0 + c * x1, -s * x0 + c * y1);
    }
  }
}

void ry_kernel(Complex* amps, std::size_t dim, std::size_t mask, double c,
               double s) {
  for (std::size_t base = 0; base < dim; base += 2 * mask) {
    for (std::size_t i = base; i < base + mask; ++i) {
      Complex& a0 = amps[i];
      Complex& a1 = amps[i | mask];
      const double x0 = a0.real(), y0 = a0.imag();
      const double x1 = a1.real(), y1 = a1.imag();
      // [c, -s; s, c]
      a0 = Complex(c * x0 - s * x1, c * y0 - s * y1);
      a1 = Complex(s * x0 + c * x1, s * y0 + c * y1);
    }
  }
}

void rz_kernel(Complex* amps, std::size_t dim, std::size_t mask, double c,
               double s) {
  // diag(c - is, c + is)
  for (std::size_t base = 0; base < dim; base += 2 * mask) {
    for (std::size_t i = base; i < base + mask; ++i) {
      const double x0 = amps[i].real(), y0 = amps[i].imag();
      amps[i] = Complex(c * x0 + s * y0, c * y0 - s * x0);
      const double x1 = amps[i | mask].real(), y1 = amps[i | mask].imag();
      amps[i | mask] = Complex(c * x1 - s * y1, c * y1 + s * x1);
    }
  }
}

}  // namespace

GateOp GateOp::rotation(Axis axis, int qubit, double angle) {
  GateOp op;
  switch (axis) {
    case Axis::X: op.kind = Kind::RX; break;
    case Axis::Y: op.kind = Kind::RY; break;
    case Axis::Z: op.kind = Kind::RZ; break;
  }
  op.target = qubit;
  op.angle = angle;
  return op;
}

GateOp GateOp::cnot(int control, int target) {
  GateOp op;
  op.kind = Kind::CNOT;
  op.target = target;
  op.control = control;
  return op;
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  check_n_qubits(n_qubits);
  amps_.assign(std::size_t{1} << n_qubits, Complex(0.0, 0.0));
  amps_[0] = Complex(1.0, 0.0);
}

StateVector::StateVector(int n_qubits, std::vector<Complex> amps)
    : n_qubits_(n_qubits), amps_(std::move(amps)) {}

StateVector StateVector::from_amplitudes(int n_qubits,
                                         std::vector<Complex> amps) {
  check_n_qubits(n_qubits);
  if (amps.size() != (std::size_t{1} << n_qubits)) {
    throw std::invalid_argument("amplitude count must be 2^n_qubits");
  }
  return StateVector(n_qubits, std::move(amps));
}

void StateVector::check_qubit(int qubit) const {
  if (qubit < 0 || qubit >= n_qubits_) {
    throw std::out_of_range("qubit index " + std::to_string(qubit) +
                            " out of range for " + std::to_string(n_qubits_) +
                            " qubits");
  }
}

void StateVector::rotate(Axis axis, int qubit, double delta) {
  check_qubit(qubit);
  if (!std::isfinite(delta)) {
    throw std::invalid_argument("rotation angle must be finite");
  }
  rotate_half(axis, qubit, std::cos(0.5 * delta), std::sin(0.5 * delta));
}

void StateVector::rotate_half(Axis axis, int qubit, double c, double s) {
  check_qubit(qubit);
  const std::size_t mask = std::size_t{1} << qubit;
  switch (axis) {
    case Axis::X: rx_kernel(amps_.data(), amps_.size(), mask, c, s); break;
    case Axis::Y: ry_kernel(amps_.data(), amps_.size(), mask, c, s); break;
    case Axis::Z: rz_kernel(amps_.data(), amps_.size(), mask, c, s); break;
  }
}

void StateVector::cnot(int control, int target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) {
    throw std::invalid_argument("CNOT control and target must differ");
  }
  const std::size_t cmask = std::size_t{1} << control;
  const std::size_t tmask = std::size_t{1} << target;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & cmask) && !(i & tmask)) std::swap(amps_[i], amps_[i | tmask]);
  }
}

void StateVector::apply(const GateOp& op) {
  switch (op.kind) {
    case GateOp::Kind::RX: rotate(Axis::X, op.target, op.angle); break;
    case GateOp::Kind::RY: rotate(Axis::Y, op.target, op.angle); break;
    case GateOp::Kind::RZ: rotate(Axis::Z, op.target, op.angle); break;
    case GateOp::Kind::CNOT:
      if (!op.control) throw std::invalid_argument("CNOT requires a control");
      cnot(*op.control, op.target);
      break;
  }
}

double StateVector::expectation_z(int qubit) const {
  check_qubit(qubit);
  const std::size_t mask = std::size_t{1} << qubit;
  double value = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const double p = std::norm(amps_[i]);
    value += (i & mask) ? -p : p;
  }
  return value;
}

void StateVector::expectation_z_all(std::span<double> out) const {
  if (out.size() > static_cast<std::size_t>(n_qubits_)) {
    throw std::out_of_range("more outputs than qubits");
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const double p = std::norm(amps_[i]);
    for (std::size_t q = 0; q < out.size(); ++q) {
      out[q] += ((i >> q) & 1u) ? -p : p;
    }
  }
}

double StateVector::norm_squared() const {
  double total = 0.0;
  for (const auto& a : amps_) total += std::norm(a);
  return total;
}

StateVector init_zero_state(int n_qubits) { return StateVector(n_qubits); }

StateVector apply_rotation(StateVector state, Axis axis, int qubit,
                           double delta) {
  state.rotate(axis, qubit, delta);
  return state;
}

StateVector apply_cnot(StateVector state, int control, int target) {
  state.cnot(control, target);
  return state;
}

double expectation_z(const StateVector& state, int qubit) {
  return state.expectation_z(qubit);
}

}  // namespace slimqfl
