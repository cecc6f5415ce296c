// SPDX-License-Identifier: Apache-2.0
#include "fidqae/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fidqae::qsim {

namespace {

int qubit_count_for_dim(Eigen::Index dim) {
  if (dim < 2) throw std::invalid_argument("state must have at least 1 qubit");
  int m = 0;
  Eigen::Index d = dim;
  while (d > 1) {
    if (d & 1) throw std::invalid_argument("amplitude count is not a power of two");
    d >>= 1;
    ++m;
  }
  if (m > kMaxQubits)
    throw std::invalid_argument("register exceeds the " +
                                std::to_string(kMaxQubits) + "-qubit cap");
  return m;
}

void check_qubit_range(int num_qubits, int qubit) {
  if (qubit < 0 || qubit >= num_qubits)
    throw std::invalid_argument("qubit index " + std::to_string(qubit) +
                            " out of range for " + std::to_string(num_qubits) +
                            " qubits");
}

void check_gate(const GateOp& gate, int num_qubits) {
  for (int k = 0; k < gate.arity(); ++k)
    check_qubit_range(num_qubits, gate.qubits[k]);
}

void check_distinct(std::initializer_list<int> qubits) {
  std::vector<int> q(qubits);
  std::sort(q.begin(), q.end());
  if (std::adjacent_find(q.begin(), q.end()) != q.end())
    throw std::invalid_argument("gate qubit indices must be distinct");
}

// Single-qubit kernel: walks amplitude pairs that differ only in the target
// bit and mixes each pair through the 2x2 matrix.
void kernel_1q(Complex* a, int num_qubits, int qubit,
               const Eigen::Matrix2cd& u) {
  const Eigen::Index dim = basis_dim(num_qubits);
  const Eigen::Index stride = qubit_mask(num_qubits, qubit);
  const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
    for (Eigen::Index off = 0; off < stride; ++off) {
      const Eigen::Index i0 = base + off;
      const Eigen::Index i1 = i0 + stride;
      const Complex a0 = a[i0];
      const Complex a1 = a[i1];
      a[i0] = u00 * a0 + u01 * a1;
      a[i1] = u10 * a0 + u11 * a1;
    }
  }
}

void kernel_cnot(Complex* a, int num_qubits, int control, int target) {
  const Eigen::Index dim = basis_dim(num_qubits);
  const Eigen::Index mc = qubit_mask(num_qubits, control);
  const Eigen::Index mt = qubit_mask(num_qubits, target);
  for (Eigen::Index i = 0; i < dim; ++i)
    if ((i & mc) && !(i & mt)) std::swap(a[i], a[i | mt]);
}

void kernel_cswap(Complex* a, int num_qubits, int control, int qa, int qb) {
  const Eigen::Index dim = basis_dim(num_qubits);
  const Eigen::Index mc = qubit_mask(num_qubits, control);
  const Eigen::Index ma = qubit_mask(num_qubits, qa);
  const Eigen::Index mb = qubit_mask(num_qubits, qb);
  for (Eigen::Index i = 0; i < dim; ++i)
    if ((i & mc) && (i & ma) && !(i & mb)) std::swap(a[i], a[(i ^ ma) | mb]);
}

// Basis permutation of a self-inverse gate, as an index map. Used to apply
// permutation gates to density matrices by row and column relabeling.
Eigen::Index permute_index(const GateOp& gate, int num_qubits,
                           Eigen::Index i) {
  switch (gate.kind) {
    case GateKind::X:
      return i ^ qubit_mask(num_qubits, gate.qubits[0]);
    case GateKind::CNOT: {
      const Eigen::Index mc = qubit_mask(num_qubits, gate.qubits[0]);
      const Eigen::Index mt = qubit_mask(num_qubits, gate.qubits[1]);
      return (i & mc) ? (i ^ mt) : i;
    }
    case GateKind::CSWAP: {
      const Eigen::Index mc = qubit_mask(num_qubits, gate.qubits[0]);
      const Eigen::Index ma = qubit_mask(num_qubits, gate.qubits[1]);
      const Eigen::Index mb = qubit_mask(num_qubits, gate.qubits[2]);
      if (!(i & mc)) return i;
      const bool ba = (i & ma) != 0;
      const bool bb = (i & mb) != 0;
      if (ba == bb) return i;
      return i ^ ma ^ mb;
    }
    default:
      throw std::logic_error("permute_index: not a permutation gate");
  }
}

bool is_permutation_gate(GateKind kind) {
  return kind == GateKind::X || kind == GateKind::CNOT ||
         kind == GateKind::CSWAP;
}

}  // namespace

std::string index_to_bitstring(Eigen::Index index, int num_qubits) {
  std::string bits(static_cast<std::size_t>(num_qubits), '0');
  for (int q = 0; q < num_qubits; ++q)
    if (index & qubit_mask(num_qubits, q)) bits[static_cast<std::size_t>(q)] = '1';
  return bits;
}

Eigen::Index bitstring_to_index(const std::string& bits) {
  if (bits.empty() || bits.size() > static_cast<std::size_t>(kMaxQubits))
    throw std::invalid_argument("bitstring length must be in [1, " +
                                std::to_string(kMaxQubits) + "]");
  Eigen::Index index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("bitstring may contain only '0' and '1'");
    index = (index << 1) | (c == '1' ? 1 : 0);
  }
  return index;
}

PureState PureState::zero(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits)
    throw std::invalid_argument("qubit count must be in [1, " +
                                std::to_string(kMaxQubits) + "]");
  PureState s;
  s.num_qubits = num_qubits;
  s.amplitudes = Eigen::VectorXcd::Zero(basis_dim(num_qubits));
  s.amplitudes(0) = Complex{1.0, 0.0};
  return s;
}

PureState PureState::from_amplitudes(Eigen::VectorXcd amplitudes) {
  PureState s;
  s.num_qubits = qubit_count_for_dim(amplitudes.size());
  s.amplitudes = std::move(amplitudes);
  validate_pure(s);
  return s;
}

MixedState MixedState::from_pure(const PureState& psi) {
  MixedState rho;
  rho.num_qubits = psi.num_qubits;
  rho.matrix = psi.amplitudes * psi.amplitudes.adjoint();
  return rho;
}

MixedState MixedState::from_matrix(Eigen::MatrixXcd m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("density matrix must be square");
  MixedState rho;
  rho.num_qubits = qubit_count_for_dim(m.rows());
  rho.matrix = std::move(m);
  validate_mixed(rho);
  return rho;
}

int GateOp::arity() const {
  switch (kind) {
    case GateKind::CNOT:
      return 2;
    case GateKind::CSWAP:
      return 3;
    default:
      return 1;
  }
}

GateOp GateOp::rx(double angle, int qubit) {
  return GateOp{GateKind::RX, angle, {qubit, -1, -1}};
}
GateOp GateOp::ry(double angle, int qubit) {
  return GateOp{GateKind::RY, angle, {qubit, -1, -1}};
}
GateOp GateOp::rz(double angle, int qubit) {
  return GateOp{GateKind::RZ, angle, {qubit, -1, -1}};
}
GateOp GateOp::h(int qubit) { return GateOp{GateKind::H, 0.0, {qubit, -1, -1}}; }
GateOp GateOp::x(int qubit) { return GateOp{GateKind::X, 0.0, {qubit, -1, -1}}; }
GateOp GateOp::cnot(int control, int target) {
  check_distinct({control, target});
  return GateOp{GateKind::CNOT, 0.0, {control, target, -1}};
}
GateOp GateOp::cswap(int control, int a, int b) {
  check_distinct({control, a, b});
  return GateOp{GateKind::CSWAP, 0.0, {control, a, b}};
}

Eigen::Matrix2cd single_qubit_matrix(GateKind kind, double angle) {
  const double half = angle / 2.0;
  const Complex i{0.0, 1.0};
  Eigen::Matrix2cd u;
  switch (kind) {
    case GateKind::RX:
      u << std::cos(half), -i * std::sin(half),  //
          -i * std::sin(half), std::cos(half);
      return u;
    case GateKind::RY:
      u << std::cos(half), -std::sin(half),  //
          std::sin(half), std::cos(half);
      return u;
    case GateKind::RZ:
      u << std::exp(-i * half), Complex{0.0, 0.0},  //
          Complex{0.0, 0.0}, std::exp(i * half);
      return u;
    case GateKind::H:
      u << 1.0, 1.0, 1.0, -1.0;
      return u / std::sqrt(2.0);
    case GateKind::X:
      u << 0.0, 1.0, 1.0, 0.0;
      return u;
    default:
      throw std::invalid_argument("not a single-qubit gate kind");
  }
}

namespace kernels {

void apply_gate_inplace(Eigen::VectorXcd& amplitudes, int num_qubits,
                        const GateOp& gate) {
  check_gate(gate, num_qubits);
  Complex* a = amplitudes.data();
  switch (gate.kind) {
    case GateKind::CNOT:
      kernel_cnot(a, num_qubits, gate.qubits[0], gate.qubits[1]);
      return;
    case GateKind::CSWAP:
      kernel_cswap(a, num_qubits, gate.qubits[0], gate.qubits[1],
                   gate.qubits[2]);
      return;
    default:
      kernel_1q(a, num_qubits, gate.qubits[0],
                single_qubit_matrix(gate.kind, gate.angle));
      return;
  }
}

void apply_1q_both_sides(Eigen::MatrixXcd& rho, int num_qubits, int qubit,
                         const Eigen::Matrix2cd& k) {
  check_qubit_range(num_qubits, qubit);
  const Eigen::Index dim = rho.rows();
  const Eigen::Index stride = qubit_mask(num_qubits, qubit);
  // Left multiply: columns are contiguous, run the pair kernel per column.
  for (Eigen::Index c = 0; c < dim; ++c)
    kernel_1q(rho.col(c).data(), num_qubits, qubit, k);
  // Right multiply by k^dagger: (A k^dagger)(:, j0/j1) mixes column pairs
  // with conjugated coefficients.
  const Complex k00 = std::conj(k(0, 0)), k01 = std::conj(k(0, 1));
  const Complex k10 = std::conj(k(1, 0)), k11 = std::conj(k(1, 1));
  Eigen::VectorXcd tmp(dim);
  for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
    for (Eigen::Index off = 0; off < stride; ++off) {
      const Eigen::Index j0 = base + off;
      const Eigen::Index j1 = j0 + stride;
      tmp = rho.col(j0) * k00 + rho.col(j1) * k01;
      rho.col(j1) = rho.col(j0) * k10 + rho.col(j1) * k11;
      rho.col(j0) = tmp;
    }
  }
}

void apply_gate_inplace(Eigen::MatrixXcd& rho, int num_qubits,
                        const GateOp& gate) {
  check_gate(gate, num_qubits);
  if (is_permutation_gate(gate.kind)) {
    // U rho U^T with U a self-inverse basis permutation: relabel rows, then
    // columns, swapping each transposition pair once.
    const Eigen::Index dim = rho.rows();
    for (Eigen::Index i = 0; i < dim; ++i) {
      const Eigen::Index j = permute_index(gate, num_qubits, i);
      if (j > i) rho.row(i).swap(rho.row(j));
    }
    for (Eigen::Index i = 0; i < dim; ++i) {
      const Eigen::Index j = permute_index(gate, num_qubits, i);
      if (j > i) rho.col(i).swap(rho.col(j));
    }
    return;
  }
  apply_1q_both_sides(rho, num_qubits, gate.qubits[0],
                      single_qubit_matrix(gate.kind, gate.angle));
}

}  // namespace kernels

PureState apply_gate(const PureState& state, const GateOp& gate) {
  PureState out = state;
  kernels::apply_gate_inplace(out.amplitudes, out.num_qubits, gate);
  return out;
}

PureState apply_circuit(const PureState& state, std::span<const GateOp> gates) {
  PureState out = state;
  for (const GateOp& g : gates)
    kernels::apply_gate_inplace(out.amplitudes, out.num_qubits, g);
  return out;
}

MixedState apply_gate_mixed(const MixedState& state, const GateOp& gate) {
  MixedState out = state;
  kernels::apply_gate_inplace(out.matrix, out.num_qubits, gate);
  return out;
}

MixedState apply_circuit_mixed(const MixedState& state,
                               std::span<const GateOp> gates) {
  MixedState out = state;
  for (const GateOp& g : gates)
    kernels::apply_gate_inplace(out.matrix, out.num_qubits, g);
  return out;
}

namespace {

struct TraceIndexPlan {
  std::vector<Eigen::Index> kept_base;    // scatter of reduced index bits
  std::vector<Eigen::Index> traced_base;  // scatter of traced index bits
};

TraceIndexPlan plan_partial_trace(int num_qubits, const std::vector<int>& keep) {
  if (keep.empty())
    throw std::invalid_argument("partial_trace: keep list must be non-empty");
  for (std::size_t k = 0; k < keep.size(); ++k) {
    check_qubit_range(num_qubits, keep[k]);
    if (k > 0 && keep[k] <= keep[k - 1])
      throw std::invalid_argument(
          "partial_trace: keep list must be strictly ascending");
  }
  std::vector<int> traced;
  for (int q = 0; q < num_qubits; ++q)
    if (!std::binary_search(keep.begin(), keep.end(), q)) traced.push_back(q);

  auto scatter = [&](const std::vector<int>& qubits) {
    const Eigen::Index sub_dim = Eigen::Index{1} << qubits.size();
    std::vector<Eigen::Index> base(static_cast<std::size_t>(sub_dim), 0);
    for (Eigen::Index sub = 0; sub < sub_dim; ++sub) {
      Eigen::Index full = 0;
      for (std::size_t r = 0; r < qubits.size(); ++r) {
        const Eigen::Index sub_bit =
            Eigen::Index{1} << (qubits.size() - 1 - r);
        if (sub & sub_bit) full |= qubit_mask(num_qubits, qubits[r]);
      }
      base[static_cast<std::size_t>(sub)] = full;
    }
    return base;
  };
  return TraceIndexPlan{scatter(keep), scatter(traced)};
}

}  // namespace

MixedState partial_trace(const PureState& state, const std::vector<int>& keep) {
  const TraceIndexPlan plan = plan_partial_trace(state.num_qubits, keep);
  const auto dim_keep = static_cast<Eigen::Index>(plan.kept_base.size());
  MixedState out;
  out.num_qubits = static_cast<int>(keep.size());
  out.matrix = Eigen::MatrixXcd::Zero(dim_keep, dim_keep);
  const Complex* a = state.amplitudes.data();
  for (Eigen::Index row = 0; row < dim_keep; ++row) {
    const Eigen::Index rb = plan.kept_base[static_cast<std::size_t>(row)];
    for (Eigen::Index col = 0; col < dim_keep; ++col) {
      const Eigen::Index cb = plan.kept_base[static_cast<std::size_t>(col)];
      Complex sum{0.0, 0.0};
      for (Eigen::Index tb : plan.traced_base)
        sum += a[rb | tb] * std::conj(a[cb | tb]);
      out.matrix(row, col) = sum;
    }
  }
  return out;
}

MixedState partial_trace(const MixedState& state, const std::vector<int>& keep) {
  const TraceIndexPlan plan = plan_partial_trace(state.num_qubits, keep);
  const auto dim_keep = static_cast<Eigen::Index>(plan.kept_base.size());
  MixedState out;
  out.num_qubits = static_cast<int>(keep.size());
  out.matrix = Eigen::MatrixXcd::Zero(dim_keep, dim_keep);
  for (Eigen::Index row = 0; row < dim_keep; ++row) {
    const Eigen::Index rb = plan.kept_base[static_cast<std::size_t>(row)];
    for (Eigen::Index col = 0; col < dim_keep; ++col) {
      const Eigen::Index cb = plan.kept_base[static_cast<std::size_t>(col)];
      Complex sum{0.0, 0.0};
      for (Eigen::Index tb : plan.traced_base)
        sum += state.matrix(rb | tb, cb | tb);
      out.matrix(row, col) = sum;
    }
  }
  return out;
}

double fidelity_pure_mixed(const PureState& psi, const MixedState& rho) {
  if (psi.num_qubits != rho.num_qubits)
    throw std::invalid_argument("fidelity: register widths differ");
  const Complex raw = psi.amplitudes.adjoint() * rho.matrix * psi.amplitudes;
  constexpr double tol = 1e-9;
  if (std::abs(raw.imag()) > tol)
    throw std::invalid_argument("fidelity has non-negligible imaginary part");
  if (raw.real() < -tol || raw.real() > 1.0 + tol)
    throw std::invalid_argument("fidelity outside [0, 1] beyond tolerance");
  return std::clamp(raw.real(), 0.0, 1.0);
}

double measure_probability_zero(const PureState& state, int qubit) {
  return probability_all_zero(state, {qubit});
}

double measure_probability_zero(const MixedState& state, int qubit) {
  return probability_all_zero(state, {qubit});
}

double probability_all_zero(const PureState& state,
                            const std::vector<int>& qubits) {
  if (qubits.empty())
    throw std::invalid_argument("probability_all_zero: empty qubit list");
  Eigen::Index mask = 0;
  for (int q : qubits) {
    check_qubit_range(state.num_qubits, q);
    mask |= qubit_mask(state.num_qubits, q);
  }
  double p = 0.0;
  for (Eigen::Index i = 0; i < state.dim(); ++i)
    if (!(i & mask)) p += std::norm(state.amplitudes(i));
  return p;
}

double probability_all_zero(const MixedState& state,
                            const std::vector<int>& qubits) {
  if (qubits.empty())
    throw std::invalid_argument("probability_all_zero: empty qubit list");
  Eigen::Index mask = 0;
  for (int q : qubits) {
    check_qubit_range(state.num_qubits, q);
    mask |= qubit_mask(state.num_qubits, q);
  }
  double p = 0.0;
  for (Eigen::Index i = 0; i < state.dim(); ++i)
    if (!(i & mask)) p += state.matrix(i, i).real();
  return p;
}

CountsHistogram sample_counts_from_probabilities(const Eigen::VectorXd& probs,
                                                 int num_qubits,
                                                 long long shots,
                                                 std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample_counts: shots must be >= 1");
  if (probs.size() != basis_dim(num_qubits))
    throw std::invalid_argument("sample_counts: probability vector size mismatch");
  const double total = probs.sum();
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("sample_counts: probabilities must sum to 1");

  // Inverse-CDF sampling. The cumulative table is normalized by its own sum
  // so the final entry is exactly 1 and every uniform draw lands in a bin.
  std::vector<double> cdf(static_cast<std::size_t>(probs.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += std::max(0.0, probs(i));
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  for (double& c : cdf) c /= acc;

  SeededRng rng(seed);
  std::map<Eigen::Index, long long> tally;
  for (long long s = 0; s < shots; ++s) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto idx = static_cast<Eigen::Index>(it - cdf.begin());
    ++tally[std::min(idx, probs.size() - 1)];
  }

  CountsHistogram hist;
  hist.num_qubits = num_qubits;
  hist.total_shots = shots;
  for (const auto& [index, count] : tally)
    hist.counts.emplace(index_to_bitstring(index, num_qubits), count);
  return hist;
}

CountsHistogram sample_counts(const PureState& state, long long shots,
                              std::uint64_t seed) {
  return sample_counts_from_probabilities(
      state.amplitudes.cwiseAbs2(), state.num_qubits, shots, seed);
}

void validate_pure(const PureState& state, double tol) {
  if (state.num_qubits < 1 || state.num_qubits > kMaxQubits)
    throw std::invalid_argument("qubit count must be in [1, " +
                                std::to_string(kMaxQubits) + "]");
  if (state.amplitudes.size() != basis_dim(state.num_qubits))
    throw std::invalid_argument("amplitude count does not match qubit count");
  const double norm = state.amplitudes.norm();
  if (std::abs(norm - 1.0) > tol)
    throw std::invalid_argument("state norm deviates from 1 beyond tolerance");
}

void validate_mixed(const MixedState& state, double tol) {
  if (state.num_qubits < 1 || state.num_qubits > kMaxQubits)
    throw std::invalid_argument("qubit count must be in [1, " +
                                std::to_string(kMaxQubits) + "]");
  if (state.matrix.rows() != state.matrix.cols() ||
      state.matrix.rows() != basis_dim(state.num_qubits))
    throw std::invalid_argument("density matrix shape does not match qubit count");
  if ((state.matrix - state.matrix.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(state.matrix.trace().real() - 1.0) > tol ||
      std::abs(state.matrix.trace().imag()) > tol)
    throw std::invalid_argument("density matrix trace deviates from 1");
}

double min_eigenvalue(const MixedState& state) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(state.matrix);
  return solver.eigenvalues().minCoeff();
}

}  // namespace fidqae::qsim
