// SPDX-License-Identifier: Apache-2.0
#include "fidqae/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fidqae::noise {

using model::AnsatzParameters;
using model::CircuitLayout;
using model::EncodedSample;
using qsim::Complex;
using qsim::GateOp;
using qsim::MixedState;

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::amplitude_damping: return "amplitude_damping";
    case NoiseKind::phase_damping: return "phase_damping";
    case NoiseKind::bit_flip: return "bit_flip";
    case NoiseKind::phase_flip: return "phase_flip";
    case NoiseKind::depolarizing: return "depolarizing";
  }
  throw std::logic_error("unreachable noise kind");
}

NoiseKind noise_kind_from_string(const std::string& name) {
  for (NoiseKind kind : all_noise_kinds())
    if (to_string(kind) == name) return kind;
  throw std::invalid_argument("unknown noise kind: " + name);
}

std::vector<NoiseKind> all_noise_kinds() {
  return {NoiseKind::amplitude_damping, NoiseKind::phase_damping,
          NoiseKind::bit_flip, NoiseKind::phase_flip, NoiseKind::depolarizing};
}

void NoiseChannelSpec::validate() const {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("noise strength p must lie in [0, 1]");
}

std::vector<Eigen::Matrix2cd> kraus_operators(const NoiseChannelSpec& spec) {
  spec.validate();
  const double p = spec.p;
  const Complex i{0.0, 1.0};
  Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd X, Y, Z;
  X << 0, 1, 1, 0;
  Y << 0, -i, i, 0;
  Z << 1, 0, 0, -1;

  std::vector<Eigen::Matrix2cd> ops;
  switch (spec.kind) {
    case NoiseKind::bit_flip:
      ops = {std::sqrt(1.0 - p) * I, std::sqrt(p) * X};
      break;
    case NoiseKind::phase_flip:
      ops = {std::sqrt(1.0 - p) * I, std::sqrt(p) * Z};
      break;
    case NoiseKind::depolarizing:
      ops = {std::sqrt(1.0 - 3.0 * p / 4.0) * I, std::sqrt(p / 4.0) * X,
             std::sqrt(p / 4.0) * Y, std::sqrt(p / 4.0) * Z};
      break;
    case NoiseKind::amplitude_damping: {
      Eigen::Matrix2cd k0, k1;
      k0 << 1, 0, 0, std::sqrt(1.0 - p);
      k1 << 0, std::sqrt(p), 0, 0;
      ops = {k0, k1};
      break;
    }
    case NoiseKind::phase_damping: {
      Eigen::Matrix2cd k0, k1;
      k0 << 1, 0, 0, std::sqrt(1.0 - p);
      k1 << 0, 0, 0, std::sqrt(p);
      ops = {k0, k1};
      break;
    }
  }
  std::erase_if(ops, [](const Eigen::Matrix2cd& k) {
    return k.cwiseAbs().maxCoeff() == 0.0;
  });
  return ops;
}

namespace {

void apply_channel_inplace(Eigen::MatrixXcd& rho, int num_qubits,
                           const std::vector<Eigen::Matrix2cd>& kraus,
                           int qubit) {
  if (kraus.size() == 1 && kraus[0].isIdentity(0.0)) return;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  Eigen::MatrixXcd term(rho.rows(), rho.cols());
  for (const Eigen::Matrix2cd& k : kraus) {
    term = rho;
    qsim::kernels::apply_1q_both_sides(term, num_qubits, qubit, k);
    acc += term;
  }
  rho = std::move(acc);
}

std::vector<int> gate_qubits(const GateOp& gate) {
  std::vector<int> q;
  for (int k = 0; k < gate.arity(); ++k) q.push_back(gate.qubits[k]);
  return q;
}

std::vector<int> block_qubits(const std::vector<GateOp>& block) {
  std::vector<int> q;
  for (const GateOp& g : block)
    for (int k = 0; k < g.arity(); ++k) q.push_back(g.qubits[k]);
  std::sort(q.begin(), q.end());
  q.erase(std::unique(q.begin(), q.end()), q.end());
  return q;
}

}  // namespace

qsim::MixedState apply_channel(const qsim::MixedState& state,
                               const NoiseChannelSpec& spec, int qubit) {
  if (qubit < 0 || qubit >= state.num_qubits)
    throw std::invalid_argument("apply_channel: qubit index out of range");
  MixedState out = state;
  apply_channel_inplace(out.matrix, out.num_qubits, kraus_operators(spec),
                        qubit);
  return out;
}

std::string to_string(NoisePlacement placement) {
  switch (placement) {
    case NoisePlacement::per_gate: return "per_gate";
    case NoisePlacement::per_layer: return "per_layer";
    case NoisePlacement::final_only: return "final_only";
  }
  throw std::logic_error("unreachable placement");
}

NoisePlacement placement_from_string(const std::string& name) {
  if (name == "per_gate") return NoisePlacement::per_gate;
  if (name == "per_layer") return NoisePlacement::per_layer;
  if (name == "final_only") return NoisePlacement::final_only;
  throw std::invalid_argument("unknown noise placement: " + name);
}

qsim::MixedState evolve_noisy(const AnsatzParameters& params,
                              const EncodedSample& sample,
                              const CircuitLayout& layout,
                              const NoiseChannelSpec& spec,
                              NoisePlacement placement) {
  spec.validate();
  const auto kraus = kraus_operators(spec);
  const auto blocks = model::build_ansatz_blocks(params, layout);

  MixedState rho = MixedState::from_pure(sample.state);
  for (const auto& block : blocks) {
    for (const GateOp& g : block) {
      qsim::kernels::apply_gate_inplace(rho.matrix, rho.num_qubits, g);
      if (placement == NoisePlacement::per_gate)
        for (int q : gate_qubits(g))
          apply_channel_inplace(rho.matrix, rho.num_qubits, kraus, q);
    }
    if (placement == NoisePlacement::per_layer)
      for (int q : block_qubits(block))
        apply_channel_inplace(rho.matrix, rho.num_qubits, kraus, q);
  }
  if (placement == NoisePlacement::final_only)
    for (int q = 0; q < layout.n_data; ++q)
      apply_channel_inplace(rho.matrix, rho.num_qubits, kraus, q);
  return rho;
}

double noisy_trash_fidelity(const AnsatzParameters& params,
                            const EncodedSample& sample,
                            const CircuitLayout& layout,
                            const NoiseChannelSpec& spec,
                            NoisePlacement placement) {
  const MixedState rho = evolve_noisy(params, sample, layout, spec, placement);
  const Eigen::Index trash_mask = (Eigen::Index{1} << layout.n_trash) - 1;
  double p = 0.0;
  for (Eigen::Index i = 0; i < rho.dim(); ++i)
    if (!(i & trash_mask)) p += rho.matrix(i, i).real();
  constexpr double tol = 1e-9;
  if (p < -tol || p > 1.0 + tol)
    throw std::runtime_error("noisy trash fidelity outside [0, 1]");
  return std::clamp(p, 0.0, 1.0);
}

namespace {

// Joins the noisy data register with |0><0| reference and control qubits
// and runs the (noiseless) H-CSWAP-H measurement block.
MixedState noisy_swap_state(const AnsatzParameters& params,
                            const EncodedSample& sample,
                            const CircuitLayout& layout,
                            const NoiseChannelSpec& spec,
                            NoisePlacement placement) {
  const MixedState data = evolve_noisy(params, sample, layout, spec, placement);
  MixedState big;
  big.num_qubits = layout.total_swap_qubits();
  const Eigen::Index dim = qsim::basis_dim(big.num_qubits);
  big.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  const int pad = layout.n_trash + 1;
  for (Eigen::Index r = 0; r < data.dim(); ++r)
    for (Eigen::Index c = 0; c < data.dim(); ++c)
      big.matrix(r << pad, c << pad) = data.matrix(r, c);

  const int control = layout.control_qubit();
  const auto trash = layout.trash_qubits();
  const auto reference = layout.reference_qubits();
  qsim::kernels::apply_gate_inplace(big.matrix, big.num_qubits,
                                    GateOp::h(control));
  for (std::size_t k = 0; k < trash.size(); ++k)
    qsim::kernels::apply_gate_inplace(
        big.matrix, big.num_qubits,
        GateOp::cswap(control, trash[k], reference[k]));
  qsim::kernels::apply_gate_inplace(big.matrix, big.num_qubits,
                                    GateOp::h(control));
  return big;
}

}  // namespace

double noisy_swap_probability_zero(const AnsatzParameters& params,
                                   const EncodedSample& sample,
                                   const CircuitLayout& layout,
                                   const NoiseChannelSpec& spec,
                                   NoisePlacement placement) {
  const MixedState big =
      noisy_swap_state(params, sample, layout, spec, placement);
  return qsim::measure_probability_zero(big, layout.control_qubit());
}

double noisy_trash_fidelity_sampled(const AnsatzParameters& params,
                                    const EncodedSample& sample,
                                    const CircuitLayout& layout,
                                    const NoiseChannelSpec& spec,
                                    NoisePlacement placement, long long shots,
                                    std::uint64_t seed) {
  if (shots < 1)
    throw std::invalid_argument("noisy_trash_fidelity_sampled: shots >= 1");
  const double p0 = std::clamp(
      noisy_swap_probability_zero(params, sample, layout, spec, placement),
      0.0, 1.0);
  SeededRng rng(seed);
  long long zeros = 0;
  for (long long s = 0; s < shots; ++s)
    if (rng.uniform() < p0) ++zeros;
  return 2.0 * static_cast<double>(zeros) / static_cast<double>(shots) - 1.0;
}

Eigen::VectorXd noisy_swap_measurement_probabilities(
    const AnsatzParameters& params, const EncodedSample& sample,
    const CircuitLayout& layout, const NoiseChannelSpec& spec,
    NoisePlacement placement) {
  const MixedState big =
      noisy_swap_state(params, sample, layout, spec, placement);
  Eigen::VectorXd probs = big.matrix.diagonal().real();
  // Round-off can leave tiny negatives on the diagonal.
  probs = probs.cwiseMax(0.0);
  return probs / probs.sum();
}

std::vector<double> probability_grid(int points) {
  if (points < 2) throw std::invalid_argument("probability_grid: points >= 2");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k)
    grid[static_cast<std::size_t>(k)] =
        static_cast<double>(k) / static_cast<double>(points - 1);
  return grid;
}

namespace {

classify::MetricsReport score_cell(
    const AnsatzParameters& params, std::span<const EncodedSample> samples,
    const CircuitLayout& layout, const NoiseChannelSpec& spec,
    NoisePlacement placement, long long shots,
    const std::vector<double>& thresholds, std::uint64_t cell_seed) {
  std::vector<classify::FidelityRecord> records(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    const EncodedSample& s = samples[i];
    if (!s.label)
      throw std::invalid_argument("noise sweep requires labeled samples");
    double f;
    if (shots == 0) {
      f = noisy_trash_fidelity(params, s, layout, spec, placement);
    } else {
      // Finite-shot estimates may stray slightly outside [0, 1]; records
      // are clamped, which cannot flip any comparison at interior
      // thresholds.
      f = std::clamp(
          noisy_trash_fidelity_sampled(params, s, layout, spec, placement,
                                       shots, derive_seed(cell_seed, i)),
          0.0, 1.0);
    }
    records[i] = classify::FidelityRecord{s.id, f, *s.label};
  });
  return classify::best_f1_report(records, thresholds);
}

}  // namespace

std::vector<NoiseSweepCell> noise_sweep(
    const AnsatzParameters& params, std::span<const EncodedSample> samples,
    const CircuitLayout& layout, const std::vector<NoiseKind>& kinds,
    const std::vector<double>& p_grid, const std::vector<double>& thresholds,
    NoisePlacement placement, long long shots, std::uint64_t seed) {
  if (samples.empty())
    throw std::invalid_argument("noise_sweep: empty sample set");
  if (kinds.empty() || p_grid.empty())
    throw std::invalid_argument("noise_sweep: empty kind or p grid");
  std::vector<NoiseSweepCell> cells;
  cells.reserve(kinds.size() * p_grid.size());
  for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
    for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
      NoiseChannelSpec spec{kinds[ki], p_grid[pi]};
      NoiseSweepCell cell;
      cell.kind = kinds[ki];
      cell.p = p_grid[pi];
      cell.shots = shots;
      cell.metrics =
          score_cell(params, samples, layout, spec, placement, shots,
                     thresholds, derive_seed(seed, ki, pi));
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::vector<NoiseSweepCell> shots_sweep(
    const AnsatzParameters& params, std::span<const EncodedSample> samples,
    const CircuitLayout& layout, const std::vector<NoiseKind>& kinds,
    double p, const std::vector<long long>& shot_grid,
    const std::vector<double>& thresholds, NoisePlacement placement,
    std::uint64_t seed) {
  if (samples.empty())
    throw std::invalid_argument("shots_sweep: empty sample set");
  if (kinds.empty() || shot_grid.empty())
    throw std::invalid_argument("shots_sweep: empty kind or shot grid");
  for (long long s : shot_grid)
    if (s < 1) throw std::invalid_argument("shots_sweep: shots must be >= 1");
  std::vector<NoiseSweepCell> cells;
  cells.reserve(kinds.size() * shot_grid.size());
  for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
    for (std::size_t si = 0; si < shot_grid.size(); ++si) {
      NoiseChannelSpec spec{kinds[ki], p};
      NoiseSweepCell cell;
      cell.kind = kinds[ki];
      cell.p = p;
      cell.shots = shot_grid[si];
      cell.metrics =
          score_cell(params, samples, layout, spec, placement, shot_grid[si],
                     thresholds, derive_seed(seed, ki, 0x1000 + si));
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

void save_sweep_csv(const std::string& path,
                    std::span<const NoiseSweepCell> cells,
                    const std::string& metadata) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sweep file: " + path);
  if (!metadata.empty()) out << "# " << metadata << "\n";
  out << "channel,p,shots,threshold,f1,accuracy,precision,recall,"
         "specificity,mcc\n";
  char buf[512];
  for (const NoiseSweepCell& c : cells) {
    const classify::MetricsReport& m = c.metrics;
    std::snprintf(buf, sizeof(buf),
                  "%s,%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  to_string(c.kind).c_str(), c.p,
                  c.shots == 0 ? "exact" : std::to_string(c.shots).c_str(),
                  m.threshold, m.f1, m.accuracy, m.precision, m.recall,
                  m.specificity, m.mcc);
    out << buf;
  }
}

}  // namespace fidqae::noise
