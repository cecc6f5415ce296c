// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fidqae/common.hpp"

namespace fidqae::qsim {

using Complex = std::complex<double>;

/// Hard cap on register width. Statevectors above this are outside the
/// supported regime (4096 amplitudes, 16 MiB density matrices).
inline constexpr int kMaxQubits = 12;

/// Bit-ordering convention, fixed repo-wide: qubit 0 is the MOST significant
/// bit of the basis index, and character k of a measurement bitstring is the
/// outcome of qubit k. So for m qubits, qubit q owns bit (m-1-q) of the
/// index, and |10...0> (qubit 0 excited) is basis index 2^(m-1).
inline Eigen::Index basis_dim(int num_qubits) {
  return Eigen::Index{1} << num_qubits;
}
inline Eigen::Index qubit_mask(int num_qubits, int qubit) {
  return Eigen::Index{1} << (num_qubits - 1 - qubit);
}

std::string index_to_bitstring(Eigen::Index index, int num_qubits);
Eigen::Index bitstring_to_index(const std::string& bits);

/// Normalized pure state on num_qubits qubits, amplitudes in basis order.
struct PureState {
  int num_qubits = 0;
  Eigen::VectorXcd amplitudes;

  /// |0...0>.
  static PureState zero(int num_qubits);
  /// Validates power-of-two length, unit norm (1e-9) and the qubit cap.
  static PureState from_amplitudes(Eigen::VectorXcd amplitudes);

  Eigen::Index dim() const { return amplitudes.size(); }
};

/// Density matrix on num_qubits qubits.
struct MixedState {
  int num_qubits = 0;
  Eigen::MatrixXcd matrix;

  /// |psi><psi|.
  static MixedState from_pure(const PureState& psi);
  /// Validates squareness, Hermiticity (1e-9) and unit trace (1e-9).
  static MixedState from_matrix(Eigen::MatrixXcd rho);

  Eigen::Index dim() const { return matrix.rows(); }
};

enum class GateKind { RX, RY, RZ, H, X, CNOT, CSWAP };

/// One circuit operation. Rotation kinds use `angle` with the half-angle
/// convention R(theta) = exp(-i theta P / 2); the others ignore it.
/// CNOT is {control, target}; CSWAP is {control, a, b}. Indices are
/// validated distinct at construction and in-range at application.
struct GateOp {
  GateKind kind = GateKind::X;
  double angle = 0.0;
  std::array<int, 3> qubits{-1, -1, -1};

  int arity() const;

  static GateOp rx(double angle, int qubit);
  static GateOp ry(double angle, int qubit);
  static GateOp rz(double angle, int qubit);
  static GateOp h(int qubit);
  static GateOp x(int qubit);
  static GateOp cnot(int control, int target);
  static GateOp cswap(int control, int a, int b);
};

/// 2x2 matrix of a single-qubit kind (rotations, H, X).
Eigen::Matrix2cd single_qubit_matrix(GateKind kind, double angle);

/// Applies one gate with bit-indexed strided kernels (no dense operator is
/// ever materialized). Norm is preserved to 1e-12 per application.
PureState apply_gate(const PureState& state, const GateOp& gate);
PureState apply_circuit(const PureState& state, std::span<const GateOp> gates);

/// rho -> U rho U^dagger through the same kernels, applied to both indices.
MixedState apply_gate_mixed(const MixedState& state, const GateOp& gate);
MixedState apply_circuit_mixed(const MixedState& state,
                               std::span<const GateOp> gates);

/// In-place kernels for hot loops. The wrappers above copy once and call
/// these; batch evaluators reuse a single buffer across samples.
namespace kernels {
void apply_gate_inplace(Eigen::VectorXcd& amplitudes, int num_qubits,
                        const GateOp& gate);
void apply_gate_inplace(Eigen::MatrixXcd& rho, int num_qubits,
                        const GateOp& gate);
/// rho -> K rho K^dagger for an arbitrary (not necessarily unitary) 2x2
/// matrix acting on one qubit. Building block for channel application.
void apply_1q_both_sides(Eigen::MatrixXcd& rho, int num_qubits, int qubit,
                         const Eigen::Matrix2cd& k);
}  // namespace kernels

/// Reduced density matrix over `keep` (non-empty, strictly ascending, in
/// range). Reduced qubit r corresponds to keep[r]; relative order is kept.
MixedState partial_trace(const PureState& state, const std::vector<int>& keep);
MixedState partial_trace(const MixedState& state, const std::vector<int>& keep);

/// <psi| rho |psi> for equal-width registers. The raw value must lie in
/// [-1e-9, 1+1e-9] (and have imaginary part below 1e-9) or this throws;
/// the result is then clamped into [0, 1].
double fidelity_pure_mixed(const PureState& psi, const MixedState& rho);

/// Probability that measuring `qubit` yields 0. Exact marginal, no sampling.
double measure_probability_zero(const PureState& state, int qubit);
double measure_probability_zero(const MixedState& state, int qubit);

/// Probability that every qubit in `qubits` reads 0 simultaneously.
double probability_all_zero(const PureState& state,
                            const std::vector<int>& qubits);
double probability_all_zero(const MixedState& state,
                            const std::vector<int>& qubits);

/// Measurement record: bitstring -> occurrences, with keys as described by
/// the bit-ordering convention above. Only observed outcomes carry keys.
struct CountsHistogram {
  int num_qubits = 0;
  long long total_shots = 0;
  std::map<std::string, long long> counts;
};

/// Multinomial sampling of the computational-basis distribution. shots >= 1.
/// Identical (state, shots, seed) triples give identical histograms.
CountsHistogram sample_counts(const PureState& state, long long shots,
                              std::uint64_t seed);

/// Same sampler over an explicit probability vector (e.g. a density-matrix
/// diagonal). Probabilities must sum to 1 within 1e-9.
CountsHistogram sample_counts_from_probabilities(const Eigen::VectorXd& probs,
                                                 int num_qubits,
                                                 long long shots,
                                                 std::uint64_t seed);

/// Validation support. The PSD check is for debug/test paths only; the
/// simulator never needs it in production flows.
void validate_pure(const PureState& state, double tol = 1e-9);
void validate_mixed(const MixedState& state, double tol = 1e-9);
double min_eigenvalue(const MixedState& state);

}  // namespace fidqae::qsim
