// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used only by tests. Everything here
// is deliberately naive: dense matrices assembled from bit arithmetic,
// nested-loop summations, and literal metric formulas. The production code
// must match these, not the other way around.
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fidqae/classify.hpp"
#include "fidqae/qsim.hpp"

namespace oracle {

using Complex = std::complex<double>;

// Bit of qubit q in basis index idx (qubit 0 = most significant bit).
inline int bit_of(long long idx, int num_qubits, int qubit) {
  return static_cast<int>((idx >> (num_qubits - 1 - qubit)) & 1LL);
}

inline long long with_bit(long long idx, int num_qubits, int qubit, int bit) {
  const long long mask = 1LL << (num_qubits - 1 - qubit);
  return bit ? (idx | mask) : (idx & ~mask);
}

// Hand-written 2x2 matrices; the rotation convention is exp(-i theta P / 2).
inline Eigen::Matrix2cd one_qubit_matrix(const fidqae::qsim::GateOp& op) {
  using fidqae::qsim::GateKind;
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd m;
  const double c = std::cos(op.angle / 2.0);
  const double s = std::sin(op.angle / 2.0);
  switch (op.kind) {
    case GateKind::RX:
      m << c, -i * s, -i * s, c;
      return m;
    case GateKind::RY:
      m << c, -s, s, c;
      return m;
    case GateKind::RZ:
      m << std::exp(-i * (op.angle / 2.0)), 0.0, 0.0,
          std::exp(i * (op.angle / 2.0));
      return m;
    case GateKind::H:
      m << 1.0, 1.0, 1.0, -1.0;
      return m / std::sqrt(2.0);
    case GateKind::X:
      m << 0.0, 1.0, 1.0, 0.0;
      return m;
    default:
      throw std::logic_error("not a one-qubit gate");
  }
}

// Full 2^m x 2^m unitary of one gate, assembled column by column.
inline Eigen::MatrixXcd dense_gate_matrix(const fidqae::qsim::GateOp& op,
                                          int num_qubits) {
  using fidqae::qsim::GateKind;
  const long long dim = 1LL << num_qubits;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
  if (op.kind == GateKind::CNOT) {
    const int control = op.qubits[0], target = op.qubits[1];
    for (long long c = 0; c < dim; ++c) {
      long long r = c;
      if (bit_of(c, num_qubits, control) == 1)
        r = with_bit(c, num_qubits, target,
                     1 - bit_of(c, num_qubits, target));
      u(r, c) = 1.0;
    }
    return u;
  }
  if (op.kind == GateKind::CSWAP) {
    const int control = op.qubits[0], a = op.qubits[1], b = op.qubits[2];
    for (long long c = 0; c < dim; ++c) {
      long long r = c;
      if (bit_of(c, num_qubits, control) == 1) {
        const int ba = bit_of(c, num_qubits, a);
        const int bb = bit_of(c, num_qubits, b);
        r = with_bit(with_bit(c, num_qubits, a, bb), num_qubits, b, ba);
      }
      u(r, c) = 1.0;
    }
    return u;
  }
  const Eigen::Matrix2cd m2 = one_qubit_matrix(op);
  const int q = op.qubits[0];
  for (long long c = 0; c < dim; ++c) {
    const int b = bit_of(c, num_qubits, q);
    u(with_bit(c, num_qubits, q, 0), c) += m2(0, b);
    u(with_bit(c, num_qubits, q, 1), c) += m2(1, b);
  }
  return u;
}

inline Eigen::VectorXcd apply_circuit_dense(
    std::span<const fidqae::qsim::GateOp> gates, Eigen::VectorXcd state,
    int num_qubits) {
  for (const auto& op : gates)
    state = dense_gate_matrix(op, num_qubits) * state;
  return state;
}

inline Eigen::MatrixXcd apply_circuit_dense_mixed(
    std::span<const fidqae::qsim::GateOp> gates, Eigen::MatrixXcd rho,
    int num_qubits) {
  for (const auto& op : gates) {
    const Eigen::MatrixXcd u = dense_gate_matrix(op, num_qubits);
    rho = u * rho * u.adjoint();
  }
  return rho;
}

// Partial trace by explicit index summation. `keep` is strictly ascending;
// kept qubits retain their relative order in the reduced index.
inline Eigen::MatrixXcd partial_trace_dense(const Eigen::MatrixXcd& rho,
                                            int num_qubits,
                                            std::span<const int> keep) {
  std::vector<int> traced;
  for (int q = 0; q < num_qubits; ++q) {
    bool kept = false;
    for (int k : keep) kept = kept || (k == q);
    if (!kept) traced.push_back(q);
  }
  const int nk = static_cast<int>(keep.size());
  const int nt = static_cast<int>(traced.size());
  const long long dim_k = 1LL << nk;
  const long long dim_t = 1LL << nt;

  // Scatters the bits of a reduced index onto the original qubit positions.
  const auto assemble = [&](long long kept_idx, long long traced_idx) {
    long long full = 0;
    for (int a = 0; a < nk; ++a)
      full = with_bit(full, num_qubits, keep[static_cast<std::size_t>(a)],
                      bit_of(kept_idx, nk, a));
    for (int a = 0; a < nt; ++a)
      full = with_bit(full, num_qubits, traced[static_cast<std::size_t>(a)],
                      bit_of(traced_idx, nt, a));
    return full;
  };

  Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(dim_k, dim_k);
  for (long long i = 0; i < dim_k; ++i)
    for (long long j = 0; j < dim_k; ++j)
      for (long long t = 0; t < dim_t; ++t)
        reduced(i, j) += rho(assemble(i, t), assemble(j, t));
  return reduced;
}

// Dense one-qubit Kraus application: rho -> sum_k K rho K^dagger with K
// embedded as a full 2^m x 2^m matrix.
inline Eigen::MatrixXcd apply_kraus_dense(
    const Eigen::MatrixXcd& rho, int num_qubits, int qubit,
    std::span<const Eigen::Matrix2cd> kraus) {
  const long long dim = rho.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (const Eigen::Matrix2cd& k2 : kraus) {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(dim, dim);
    for (long long c = 0; c < dim; ++c) {
      const int b = bit_of(c, num_qubits, qubit);
      k(with_bit(c, num_qubits, qubit, 0), c) += k2(0, b);
      k(with_bit(c, num_qubits, qubit, 1), c) += k2(1, b);
    }
    out += k * rho * k.adjoint();
  }
  return out;
}

// Literal metric formulas over an explicit counting pass. Mirrors the
// documented degenerate-denominator policy so comparisons are bit-exact.
inline fidqae::classify::MetricsReport count_metrics(
    std::span<const fidqae::classify::FidelityRecord> records,
    double threshold) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  long long tp = 0, tn = 0, fp = 0, fn = 0;
  for (const auto& rec : records) {
    const bool predicted_fraud = rec.fidelity < threshold;
    const bool is_fraud = rec.label == fidqae::Label::fraud;
    if (is_fraud && predicted_fraud) ++tp;
    if (is_fraud && !predicted_fraud) ++fn;
    if (!is_fraud && predicted_fraud) ++fp;
    if (!is_fraud && !predicted_fraud) ++tn;
  }
  fidqae::classify::MetricsReport r;
  r.threshold = threshold;
  r.tp = tp;
  r.tn = tn;
  r.fp = fp;
  r.fn = fn;
  const auto d = [](long long v) { return static_cast<double>(v); };
  r.accuracy = d(tp + tn) / d(tp + tn + fp + fn);
  r.recall = tp + fn == 0 ? nan : d(tp) / d(tp + fn);
  r.specificity = tn + fp == 0 ? nan : d(tn) / d(tn + fp);
  r.precision = tp + fp == 0 ? 0.0 : d(tp) / d(tp + fp);
  if (std::isnan(r.recall))
    r.f1 = nan;
  else if (r.precision + r.recall == 0.0)
    r.f1 = 0.0;
  else
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  r.g_mean = std::isnan(r.recall) || std::isnan(r.specificity)
                 ? nan
                 : std::sqrt(r.recall * r.specificity);
  if (tp + fp == 0 || tp + fn == 0 || tn + fp == 0 || tn + fn == 0)
    r.mcc = 0.0;
  else
    r.mcc = (d(tp) * d(tn) - d(fp) * d(fn)) /
            std::sqrt(d(tp + fp) * d(tp + fn) * d(tn + fp) * d(tn + fn));
  r.degenerate = tp + fn == 0 || tn + fp == 0 || tp + fp == 0 ||
                 tn + fn == 0 || r.precision + r.recall == 0.0;
  return r;
}

// Central finite difference of a scalar function of a parameter vector.
template <typename F>
Eigen::VectorXd finite_difference(F&& f, const Eigen::VectorXd& theta,
                                  double h) {
  Eigen::VectorXd grad(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd up = theta, down = theta;
    up(i) += h;
    down(i) -= h;
    grad(i) = (f(up) - f(down)) / (2.0 * h);
  }
  return grad;
}

inline bool same_or_both_nan(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace oracle
