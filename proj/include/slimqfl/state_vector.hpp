#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace slimqfl {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 12;

enum class Axis { X, Y, Z };

/// One gate of a circuit. Qubit q is bit q of the amplitude index
/// (qubit 0 is the least significant bit).
struct GateOp {
  enum class Kind { RX, RY, RZ, CNOT };

  Kind kind = Kind::RX;
  int target = 0;
  std::optional<int> control;  // CNOT only
  double angle = 0.0;          // rotations only

  static GateOp rotation(Axis axis, int qubit, double angle);
  static GateOp cnot(int control, int target);
};

/// Dense pure state of n qubits. Rotations follow R(d) = exp(-i d/2 P).
class StateVector {
 public:
  /// |0...0> on n qubits, 1 <= n <= kMaxQubits.
  explicit StateVector(int n_qubits);

  /// Takes ownership of raw amplitudes; length must be 2^n. The amplitudes
  /// are not renormalized.
  static StateVector from_amplitudes(int n_qubits, std::vector<Complex> amps);

  int num_qubits() const { return n_qubits_; }
  std::size_t size() const { return amps_.size(); }
  std::span<const Complex> amplitudes() const { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  void rotate(Axis axis, int qubit, double delta);
  /// Same as rotate() with cos(delta / 2) and sin(delta / 2) precomputed.
  void rotate_half(Axis axis, int qubit, double cos_half, double sin_half);
  void cnot(int control, int target);
  void apply(const GateOp& op);

  /// <Z_q> = sum |a_i|^2 * (+1 if bit q of i is 0 else -1).
  double expectation_z(int qubit) const;
  /// <Z_q> for q = 0 .. out.size() - 1 in a single sweep.
  void expectation_z_all(std::span<double> out) const;
  double norm_squared() const;

 private:
  StateVector(int n_qubits, std::vector<Complex> amps);
  void check_qubit(int qubit) const;

  int n_qubits_;
  std::vector<Complex> amps_;
};

// Value-returning forms of the gate primitives.
StateVector init_zero_state(int n_qubits);
StateVector apply_rotation(StateVector state, Axis axis, int qubit,
                           double delta);
StateVector apply_cnot(StateVector state, int control, int target);
double expectation_z(const StateVector& state, int qubit);

}  // namespace slimqfl
