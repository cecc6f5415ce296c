// SPDX-License-Identifier: Apache-2.0
#include "fidqae/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fidqae::model {

using qsim::GateOp;
using qsim::PureState;

std::vector<int> CircuitLayout::trash_qubits() const {
  std::vector<int> q;
  for (int k = n_data - n_trash; k < n_data; ++k) q.push_back(k);
  return q;
}

std::vector<int> CircuitLayout::reference_qubits() const {
  std::vector<int> q;
  for (int k = n_data; k < n_data + n_trash; ++k) q.push_back(k);
  return q;
}

void CircuitLayout::validate() const {
  if (n_trash < 1)
    throw std::invalid_argument("layout: n_trash must be at least 1");
  if (n_data <= n_trash)
    throw std::invalid_argument("layout: n_data must exceed n_trash");
  if (total_swap_qubits() > qsim::kMaxQubits)
    throw std::invalid_argument("layout: SWAP-test register exceeds qubit cap");
}

AnsatzParameters::AnsatzParameters(Eigen::VectorXd values)
    : theta(std::move(values)) {
  if (!theta.allFinite())
    throw std::invalid_argument("ansatz parameters must all be finite");
}

int AnsatzParameters::expected_size(const CircuitLayout& layout) {
  layout.validate();
  return kParamsPerPair * layout.n_data * (layout.n_data - 1) / 2;
}

AnsatzParameters AnsatzParameters::random_init(const CircuitLayout& layout,
                                               std::uint64_t seed) {
  SeededRng rng(seed);
  Eigen::VectorXd theta(expected_size(layout));
  for (Eigen::Index k = 0; k < theta.size(); ++k)
    theta(k) = rng.uniform(-0.1, 0.1);
  return AnsatzParameters(std::move(theta));
}

Eigen::VectorXd l2_normalize(const Eigen::VectorXd& x) {
  if (!x.allFinite())
    throw std::invalid_argument("l2_normalize: non-finite feature value");
  const double norm = x.norm();
  if (norm == 0.0)
    throw std::domain_error("l2_normalize: zero-norm feature vector");
  return x / norm;
}

PureState amplitude_encode(const Eigen::VectorXd& unit_features,
                           const CircuitLayout& layout) {
  layout.validate();
  if (unit_features.size() != layout.feature_dim())
    throw std::invalid_argument(
        "amplitude_encode: expected " + std::to_string(layout.feature_dim()) +
        " features, got " + std::to_string(unit_features.size()));
  if (std::abs(unit_features.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("amplitude_encode: features are not unit-norm");
  PureState state;
  state.num_qubits = layout.n_data;
  state.amplitudes = unit_features.cast<qsim::Complex>();
  return state;
}

EncodedSample encode_sample(const Eigen::VectorXd& raw_features,
                            std::optional<Label> label, std::string id,
                            const CircuitLayout& layout) {
  EncodedSample sample;
  sample.features = l2_normalize(raw_features);
  sample.state = amplitude_encode(sample.features, layout);
  sample.label = label;
  sample.id = std::move(id);
  return sample;
}

EncodedDataset encode_dataset(const Eigen::MatrixXd& rows,
                              const std::vector<std::optional<Label>>& labels,
                              const std::vector<std::string>& ids,
                              const CircuitLayout& layout) {
  if (static_cast<std::size_t>(rows.rows()) != labels.size() ||
      labels.size() != ids.size())
    throw std::invalid_argument("encode_dataset: rows/labels/ids mismatch");
  EncodedDataset out;
  out.samples.reserve(labels.size());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const Eigen::VectorXd features = rows.row(r).transpose();
    if (features.norm() == 0.0) {
      ++out.dropped_zero_norm;
      continue;
    }
    out.samples.push_back(encode_sample(
        features, labels[static_cast<std::size_t>(r)],
        ids[static_cast<std::size_t>(r)], layout));
  }
  return out;
}

std::vector<std::vector<GateOp>> build_ansatz_blocks(
    const AnsatzParameters& params, const CircuitLayout& layout) {
  layout.validate();
  const int expected = AnsatzParameters::expected_size(layout);
  if (params.theta.size() != expected)
    throw std::invalid_argument(
        "ansatz parameter count mismatch: expected " +
        std::to_string(expected) + ", got " +
        std::to_string(params.theta.size()));

  std::vector<std::vector<GateOp>> blocks;
  int p = 0;
  const auto t = [&](int offset) { return params.theta(p + offset); };
  for (int i = 0; i < layout.n_data; ++i) {
    for (int j = i + 1; j < layout.n_data; ++j) {
      std::vector<GateOp> block;
      block.reserve(kGatesPerPair);
      block.push_back(GateOp::rz(t(0), i));
      block.push_back(GateOp::ry(t(1), i));
      block.push_back(GateOp::rz(t(2), i));
      block.push_back(GateOp::rz(t(3), j));
      block.push_back(GateOp::ry(t(4), j));
      block.push_back(GateOp::rz(t(5), j));
      block.push_back(GateOp::cnot(i, j));
      block.push_back(GateOp::rz(t(6), i));
      block.push_back(GateOp::ry(t(7), j));
      block.push_back(GateOp::cnot(i, j));
      block.push_back(GateOp::ry(t(8), j));
      block.push_back(GateOp::rz(t(9), i));
      block.push_back(GateOp::ry(t(10), i));
      block.push_back(GateOp::rz(t(11), i));
      block.push_back(GateOp::rz(t(12), j));
      block.push_back(GateOp::ry(t(13), j));
      block.push_back(GateOp::rz(t(14), j));
      p += kParamsPerPair;
      blocks.push_back(std::move(block));
    }
  }
  return blocks;
}

std::vector<GateOp> build_ansatz(const AnsatzParameters& params,
                                 const CircuitLayout& layout) {
  std::vector<GateOp> gates;
  for (auto& block : build_ansatz_blocks(params, layout))
    gates.insert(gates.end(), block.begin(), block.end());
  return gates;
}

namespace {

double clamp_fidelity(double raw) {
  constexpr double tol = 1e-9;
  if (raw < -tol || raw > 1.0 + tol)
    throw std::runtime_error("trash fidelity outside [0, 1] beyond tolerance");
  return std::clamp(raw, 0.0, 1.0);
}

}  // namespace

double trash_fidelity_exact(std::span<const GateOp> ansatz,
                            const EncodedSample& sample,
                            const CircuitLayout& layout) {
  Eigen::VectorXcd amps = sample.state.amplitudes;
  for (const GateOp& g : ansatz)
    qsim::kernels::apply_gate_inplace(amps, layout.n_data, g);
  // <0|Tr_latent(rho)|0> equals the probability that every trash qubit
  // reads 0; the trash qubits own the lowest index bits, so sum the
  // squared amplitudes of indices whose low n_trash bits vanish.
  const Eigen::Index trash_mask = (Eigen::Index{1} << layout.n_trash) - 1;
  double p = 0.0;
  for (Eigen::Index i = 0; i < amps.size(); ++i)
    if (!(i & trash_mask)) p += std::norm(amps(i));
  return clamp_fidelity(p);
}

double trash_fidelity_exact(const AnsatzParameters& params,
                            const EncodedSample& sample,
                            const CircuitLayout& layout) {
  const std::vector<GateOp> gates = build_ansatz(params, layout);
  return trash_fidelity_exact(gates, sample, layout);
}

double mean_trash_fidelity(const AnsatzParameters& params,
                           std::span<const EncodedSample> samples,
                           const CircuitLayout& layout) {
  if (samples.empty())
    throw std::invalid_argument("mean_trash_fidelity: empty sample set");
  const std::vector<GateOp> gates = build_ansatz(params, layout);
  std::vector<double> fidelities(samples.size(), 0.0);
  parallel_for(samples.size(), [&](std::size_t i) {
    fidelities[i] = trash_fidelity_exact(gates, samples[i], layout);
  });
  double sum = 0.0;
  for (double f : fidelities) sum += f;
  return sum / static_cast<double>(samples.size());
}

std::vector<GateOp> build_swap_test_circuit(const AnsatzParameters& params,
                                            const CircuitLayout& layout) {
  std::vector<GateOp> gates = build_ansatz(params, layout);
  const int control = layout.control_qubit();
  gates.push_back(GateOp::h(control));
  const std::vector<int> trash = layout.trash_qubits();
  const std::vector<int> reference = layout.reference_qubits();
  for (std::size_t k = 0; k < trash.size(); ++k)
    gates.push_back(GateOp::cswap(control, trash[k], reference[k]));
  gates.push_back(GateOp::h(control));
  return gates;
}

PureState prepare_swap_test_input(const EncodedSample& sample,
                                  const CircuitLayout& layout) {
  PureState big;
  big.num_qubits = layout.total_swap_qubits();
  big.amplitudes = Eigen::VectorXcd::Zero(qsim::basis_dim(big.num_qubits));
  // Reference and control qubits sit below the data register, so the
  // product with |0...0> is a left shift of each data index.
  const int pad_bits = layout.n_trash + 1;
  for (Eigen::Index i = 0; i < sample.state.dim(); ++i)
    big.amplitudes(i << pad_bits) = sample.state.amplitudes(i);
  return big;
}

double swap_test_probability_zero(const AnsatzParameters& params,
                                  const EncodedSample& sample,
                                  const CircuitLayout& layout) {
  const std::vector<GateOp> gates = build_swap_test_circuit(params, layout);
  PureState state = prepare_swap_test_input(sample, layout);
  for (const GateOp& g : gates)
    qsim::kernels::apply_gate_inplace(state.amplitudes, state.num_qubits, g);
  return qsim::measure_probability_zero(state, layout.control_qubit());
}

double swap_test_fidelity_sampled(const AnsatzParameters& params,
                                  const EncodedSample& sample,
                                  const CircuitLayout& layout, long long shots,
                                  std::uint64_t seed) {
  if (shots < 1)
    throw std::invalid_argument("swap_test_fidelity_sampled: shots must be >= 1");
  const double p0 = swap_test_probability_zero(params, sample, layout);
  SeededRng rng(seed);
  long long zeros = 0;
  for (long long s = 0; s < shots; ++s)
    if (rng.uniform() < p0) ++zeros;
  const double p0_hat = static_cast<double>(zeros) / static_cast<double>(shots);
  return 2.0 * p0_hat - 1.0;
}

}  // namespace fidqae::model
