// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fidqae/common.hpp"
#include "fidqae/qsim.hpp"

namespace fidqae::model {

/// Register plan for the autoencoder circuit.
///
/// The data register occupies qubits [0, n_data); the trash sub-register is
/// its last n_trash qubits. The SWAP-test extension appends one reference
/// qubit per trash qubit at [n_data, n_data + n_trash) and a single control
/// qubit at the end. Registers are disjoint by construction.
struct CircuitLayout {
  int n_data = 4;
  int n_trash = 1;

  int n_latent() const { return n_data - n_trash; }
  int n_reference() const { return n_trash; }
  int total_swap_qubits() const { return n_data + n_trash + 1; }
  int control_qubit() const { return n_data + n_trash; }
  Eigen::Index feature_dim() const { return Eigen::Index{1} << n_data; }

  std::vector<int> trash_qubits() const;
  std::vector<int> reference_qubits() const;

  /// Requires 1 <= n_trash < n_data and a total register within the
  /// simulator's qubit cap.
  void validate() const;
};

/// Trainable rotation angles for the ansatz: 15 per unordered qubit pair,
/// i.e. 15 * n_data * (n_data - 1) / 2 entries, all finite.
struct AnsatzParameters {
  Eigen::VectorXd theta;

  AnsatzParameters() = default;
  explicit AnsatzParameters(Eigen::VectorXd values);

  static int expected_size(const CircuitLayout& layout);
  /// Entries drawn uniformly from [-0.1, 0.1], reproducible by seed.
  static AnsatzParameters random_init(const CircuitLayout& layout,
                                      std::uint64_t seed);
};

/// One input record mapped onto the data register.
struct EncodedSample {
  Eigen::VectorXd features;  // unit L2 norm, length 2^n_data
  qsim::PureState state;     // real amplitudes equal to `features`
  std::optional<Label> label;
  std::string id;
};

/// x / ||x||_2. A zero (or non-finite) input is a distinct hard error.
Eigen::VectorXd l2_normalize(const Eigen::VectorXd& x);

/// Unit-norm real vector of length 2^n_data -> pure state with those exact
/// amplitudes (no re-normalization; norm must already be 1 within 1e-9).
qsim::PureState amplitude_encode(const Eigen::VectorXd& unit_features,
                                 const CircuitLayout& layout);

EncodedSample encode_sample(const Eigen::VectorXd& raw_features,
                            std::optional<Label> label, std::string id,
                            const CircuitLayout& layout);

/// Bulk encoding; rows whose feature vector has zero norm are dropped and
/// counted instead of aborting the batch.
struct EncodedDataset {
  std::vector<EncodedSample> samples;
  std::size_t dropped_zero_norm = 0;
};
EncodedDataset encode_dataset(const Eigen::MatrixXd& rows,
                              const std::vector<std::optional<Label>>& labels,
                              const std::vector<std::string>& ids,
                              const CircuitLayout& layout);

/// Gate list of one 15-parameter two-qubit block on (i, j), i < j:
/// local RZ-RY-RZ on each qubit, CNOT(i,j), RZ(i) and RY(j), CNOT(i,j),
/// RY(j), then a closing local RZ-RY-RZ on each qubit. Both entangling
/// gates share the same orientation so the block is exactly the identity
/// at theta = 0 (2 CNOTs, 15 rotations per block).
inline constexpr int kParamsPerPair = 15;
inline constexpr int kGatesPerPair = 17;

/// Blocks in lexicographic pair order (0,1), (0,2), ..., consuming
/// parameters in emission order. Deterministic: equal inputs give
/// identical gate lists.
std::vector<std::vector<qsim::GateOp>> build_ansatz_blocks(
    const AnsatzParameters& params, const CircuitLayout& layout);
std::vector<qsim::GateOp> build_ansatz(const AnsatzParameters& params,
                                       const CircuitLayout& layout);

/// Exact trash fidelity: runs the ansatz on the encoded state and returns
/// <0...0| Tr_latent(rho) |0...0>, i.e. the probability that every trash
/// qubit reads 0. Result clamped into [0, 1] after a 1e-9 tolerance check.
double trash_fidelity_exact(const AnsatzParameters& params,
                            const EncodedSample& sample,
                            const CircuitLayout& layout);

/// Same, evaluated against a caller-supplied gate list (one build of the
/// ansatz amortized over a batch).
double trash_fidelity_exact(std::span<const qsim::GateOp> ansatz,
                            const EncodedSample& sample,
                            const CircuitLayout& layout);

/// Mean exact trash fidelity over a set of samples, evaluated in parallel
/// with a deterministic (index-ordered) aggregation.
double mean_trash_fidelity(const AnsatzParameters& params,
                           std::span<const EncodedSample> samples,
                           const CircuitLayout& layout);

/// Full SWAP-test circuit on n_data + n_trash + 1 qubits: the ansatz on the
/// data register, H on control, one CSWAP(control, trash_k, reference_k)
/// per trash qubit, H on control. The input state is the encoded data state
/// with reference and control qubits in |0>.
std::vector<qsim::GateOp> build_swap_test_circuit(
    const AnsatzParameters& params, const CircuitLayout& layout);

/// Encoded data state padded with |0> reference and control qubits.
qsim::PureState prepare_swap_test_input(const EncodedSample& sample,
                                        const CircuitLayout& layout);

/// Exact P(control = 0) for the SWAP test, which equals 1/2 + F/2.
double swap_test_probability_zero(const AnsatzParameters& params,
                                  const EncodedSample& sample,
                                  const CircuitLayout& layout);

/// Shot-estimated fidelity 2 * P0_hat - 1 from `shots` Bernoulli samples of
/// the control qubit. Deliberately NOT clamped: values slightly outside
/// [0, 1] are legitimate finite-shot outcomes. Deterministic per seed.
double swap_test_fidelity_sampled(const AnsatzParameters& params,
                                  const EncodedSample& sample,
                                  const CircuitLayout& layout, long long shots,
                                  std::uint64_t seed);

}  // namespace fidqae::model
