// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fidqae/classify.hpp"
#include "fidqae/model.hpp"

namespace fidqae::noise {

enum class NoiseKind {
  amplitude_damping,
  phase_damping,
  bit_flip,
  phase_flip,
  depolarizing
};

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);
std::vector<NoiseKind> all_noise_kinds();

/// Single-qubit channel with strength p in [0, 1].
struct NoiseChannelSpec {
  NoiseKind kind = NoiseKind::depolarizing;
  double p = 0.0;

  void validate() const;
};

/// Kraus operators of the channel. Zero operators (e.g. at p = 0 or p = 1)
/// are dropped, so the p = 0 channel is the single operator I. The set
/// always satisfies sum_k K_k^dagger K_k = I to 1e-12.
/// Conventions: bit flip {sqrt(1-p) I, sqrt(p) X}; phase flip with Z;
/// depolarizing {sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}
/// (p = 1 sends any single-qubit state to I/2); amplitude damping
/// {[[1,0],[0,sqrt(1-p)]], [[0,sqrt(p)],[0,0]]}; phase damping
/// {[[1,0],[0,sqrt(1-p)]], [[0,0],[0,sqrt(p)]]}.
std::vector<Eigen::Matrix2cd> kraus_operators(const NoiseChannelSpec& spec);

/// rho -> sum_k K_k rho K_k^dagger on one qubit. Trace-preserving to 1e-12.
qsim::MixedState apply_channel(const qsim::MixedState& state,
                               const NoiseChannelSpec& spec, int qubit);

/// Where the channel strikes during ansatz evolution:
///  - per_gate: after every gate, on each qubit that gate touched (default);
///  - per_layer: after each two-qubit parameter block, on its two qubits;
///  - final_only: once after the whole ansatz, on every data qubit.
/// The SWAP-test measurement gates are always noiseless, so shot-based
/// estimates converge to the exact noisy fidelity.
enum class NoisePlacement { per_gate, per_layer, final_only };

std::string to_string(NoisePlacement placement);
NoisePlacement placement_from_string(const std::string& name);

/// Density-matrix evolution of the encoded sample through the ansatz with
/// the channel inserted per the placement policy.
qsim::MixedState evolve_noisy(const model::AnsatzParameters& params,
                              const model::EncodedSample& sample,
                              const model::CircuitLayout& layout,
                              const NoiseChannelSpec& spec,
                              NoisePlacement placement);

/// Exact noisy trash fidelity <0...0| Tr_latent(rho) |0...0>.
double noisy_trash_fidelity(const model::AnsatzParameters& params,
                            const model::EncodedSample& sample,
                            const model::CircuitLayout& layout,
                            const NoiseChannelSpec& spec,
                            NoisePlacement placement);

/// Shot estimate via the SWAP-test construction: the noisy data register is
/// joined with |0> reference and control qubits, the (noiseless) H-CSWAP-H
/// block runs in density-matrix form, and the control marginal is sampled.
/// Returns 2 * P0_hat - 1, unclamped.
double noisy_trash_fidelity_sampled(const model::AnsatzParameters& params,
                                    const model::EncodedSample& sample,
                                    const model::CircuitLayout& layout,
                                    const NoiseChannelSpec& spec,
                                    NoisePlacement placement, long long shots,
                                    std::uint64_t seed);

/// Exact P(control = 0) of the SWAP test run on the noisy state.
double noisy_swap_probability_zero(const model::AnsatzParameters& params,
                                   const model::EncodedSample& sample,
                                   const model::CircuitLayout& layout,
                                   const NoiseChannelSpec& spec,
                                   NoisePlacement placement);

/// Full measurement distribution of the noisy SWAP-test circuit over all
/// n_data + n_trash + 1 qubits (Born probabilities of the density-matrix
/// diagonal). Used to synthesize hardware-style counts files.
Eigen::VectorXd noisy_swap_measurement_probabilities(
    const model::AnsatzParameters& params, const model::EncodedSample& sample,
    const model::CircuitLayout& layout, const NoiseChannelSpec& spec,
    NoisePlacement placement);

/// p grid 0..1 with `points` equally spaced values (default 11).
std::vector<double> probability_grid(int points = 11);

/// One sweep cell: a channel at one strength, scored at its best-F1
/// threshold from the grid. shots == 0 means exact fidelities.
struct NoiseSweepCell {
  NoiseKind kind = NoiseKind::depolarizing;
  double p = 0.0;
  long long shots = 0;
  classify::MetricsReport metrics;
};

/// Evaluates every (kind, p) pair over the labeled samples; exact mode when
/// shots == 0, otherwise SWAP-test sampling with per-sample derived seeds.
std::vector<NoiseSweepCell> noise_sweep(
    const model::AnsatzParameters& params,
    std::span<const model::EncodedSample> samples,
    const model::CircuitLayout& layout, const std::vector<NoiseKind>& kinds,
    const std::vector<double>& p_grid, const std::vector<double>& thresholds,
    NoisePlacement placement, long long shots = 0, std::uint64_t seed = 0);

/// Fixed p, varying shot budget (the shot-robustness experiment).
std::vector<NoiseSweepCell> shots_sweep(
    const model::AnsatzParameters& params,
    std::span<const model::EncodedSample> samples,
    const model::CircuitLayout& layout, const std::vector<NoiseKind>& kinds,
    double p, const std::vector<long long>& shot_grid,
    const std::vector<double>& thresholds, NoisePlacement placement,
    std::uint64_t seed);

/// CSV: channel,p,shots,threshold,f1,accuracy,precision,recall,specificity,
/// mcc; `shots` prints "exact" for exact cells.
void save_sweep_csv(const std::string& path,
                    std::span<const NoiseSweepCell> cells,
                    const std::string& metadata = "");

}  // namespace fidqae::noise
