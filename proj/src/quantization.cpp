#include "lcs/quantization.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace lcs {

namespace {

std::vector<std::uint64_t> binomial_row(unsigned r) {
  if (r > 60) throw std::invalid_argument("difference order too large for exact binomials");
  std::vector<std::uint64_t> c(r + 1, 1);
  for (unsigned i = 1; i <= r; ++i) c[i] = c[i - 1] * (r - i + 1) / i;
  return c;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Nearest point of {+-(2l-1)delta/2 : l = 1..levels}; exact midpoints go up.
double quantize_to_alphabet(double v, double delta, unsigned levels) {
  const double top = (2.0 * levels - 1.0) * delta / 2.0;
  double q = (std::floor(v / delta) + 0.5) * delta;
  if (q > top) q = top;
  if (q < -top) q = -top;
  return q;
}

}  // namespace

DifferenceMatrix difference_power(std::uint64_t m, unsigned r) {
  if (m < 1) throw std::invalid_argument("difference_power: m >= 1 required");
  const auto binom = binomial_row(r);
  DifferenceMatrix out;
  out.m = m;
  out.r = r;
  out.dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::uint64_t i = 0; i < m; ++i) {
    for (std::uint64_t j = (i >= r ? i - r : 0); j <= i; ++j) {
      const std::uint64_t k = i - j;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      out.dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          sign * static_cast<double>(binom[k]);
    }
  }
  return out;
}

Eigen::VectorXd apply_difference_power(const Eigen::VectorXd& x, unsigned r) {
  Eigen::VectorXd v = x;
  for (unsigned round = 0; round < r; ++round)
    for (Eigen::Index i = v.size() - 1; i > 0; --i) v[i] -= v[i - 1];
  return v;
}

Eigen::VectorXd apply_difference_inverse(const Eigen::VectorXd& x, unsigned r) {
  Eigen::VectorXd v = x;
  for (unsigned round = 0; round < r; ++round)
    for (Eigen::Index i = 1; i < v.size(); ++i) v[i] += v[i - 1];
  return v;
}

Eigen::VectorXd apply_difference_power_adjoint(const Eigen::VectorXd& x, unsigned r) {
  Eigen::VectorXd v = x;
  const Eigen::Index n = v.size();
  for (unsigned round = 0; round < r; ++round)
    for (Eigen::Index i = 0; i + 1 < n; ++i) v[i] -= v[i + 1];
  return v;
}

PreprocessedFrame svd_preprocess(std::uint64_t m, unsigned r) {
  PreprocessedFrame frame;
  frame.m = m;
  frame.r = r;
  if (r == 0) {
    // Identity shortcut: the SVD of I is sign/rotation ambiguous, the
    // convention below would not pin it down.
    frame.u = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                        static_cast<Eigen::Index>(m));
    frame.v = frame.u;
    frame.singular_values = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
    return frame;
  }
  const DifferenceMatrix dr = difference_power(m, r);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dr.dense, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("svd_preprocess: SVD failed");
  frame.u = svd.matrixU();
  frame.v = svd.matrixV();
  frame.singular_values = svd.singularValues();
  // Deterministic signs: largest-magnitude entry of each left vector (first
  // occurrence on ties) is positive; the right vector flips along.
  for (Eigen::Index j = 0; j < frame.u.cols(); ++j) {
    Eigen::Index at = 0;
    frame.u.col(j).cwiseAbs().maxCoeff(&at);
    if (frame.u(at, j) < 0.0) {
      frame.u.col(j) = -frame.u.col(j);
      frame.v.col(j) = -frame.v.col(j);
    }
  }
  return frame;
}

double stable_input_range(unsigned r, unsigned levels, double delta) {
  if (levels < 1 || delta <= 0)
    throw std::invalid_argument("stable_input_range: levels >= 1 and delta > 0 required");
  if (r > 60) throw std::invalid_argument("stable_input_range: order too large");
  const double feedback = (std::pow(2.0, static_cast<double>(r)) - 1.0) / 2.0;
  return (static_cast<double>(levels) - feedback) * delta;
}

std::string QuantizationRun::csv_row() const {
  std::string out;
  out += std::to_string(r);
  out += ',';
  out += fmt17(delta);
  out += ',';
  out += std::to_string(levels);
  out += ',';
  out += std::to_string(q.size());
  out += ',';
  out += fmt17(u_inf);
  out += ',';
  out += stable ? '1' : '0';
  return out;
}

QuantizationRun sigma_delta_quantize(const Eigen::VectorXd& y, unsigned r, double delta,
                                     unsigned levels) {
  if (r < 1 || r > 3) throw std::invalid_argument("sigma_delta_quantize: r must be 1, 2, or 3");
  if (delta <= 0) throw std::invalid_argument("sigma_delta_quantize: delta > 0 required");
  if (levels < 1) throw std::invalid_argument("sigma_delta_quantize: levels >= 1 required");
  if (y.size() < 1) throw std::invalid_argument("sigma_delta_quantize: empty input");

  const auto binom = binomial_row(r);
  QuantizationRun run;
  run.r = r;
  run.delta = delta;
  run.levels = levels;
  run.q.resize(y.size());
  run.u.resize(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double v = y[i];
    for (unsigned t = 1; t <= r && static_cast<Eigen::Index>(t) <= i; ++t) {
      const double sign = (t % 2 == 1) ? 1.0 : -1.0;
      v += sign * static_cast<double>(binom[t]) * run.u[i - static_cast<Eigen::Index>(t)];
    }
    run.q[i] = quantize_to_alphabet(v, delta, levels);
    run.u[i] = v - run.q[i];
  }
  run.u_inf = run.u.cwiseAbs().maxCoeff();
  run.stable = run.u_inf <= delta / 2.0 + 1e-12;
  return run;
}

QuantizationRun scalar_quantize(const Eigen::VectorXd& y, double delta, unsigned levels) {
  if (delta <= 0) throw std::invalid_argument("scalar_quantize: delta > 0 required");
  if (levels < 1) throw std::invalid_argument("scalar_quantize: levels >= 1 required");
  if (y.size() < 1) throw std::invalid_argument("scalar_quantize: empty input");
  QuantizationRun run;
  run.r = 0;
  run.delta = delta;
  run.levels = levels;
  run.q.resize(y.size());
  run.u.resize(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    run.q[i] = quantize_to_alphabet(y[i], delta, levels);
    run.u[i] = y[i] - run.q[i];
  }
  run.u_inf = run.u.cwiseAbs().maxCoeff();
  run.stable = run.u_inf <= delta / 2.0 + 1e-12;
  return run;
}

OneStageData assemble_one_stage(const LinearOperator& phi, const PreprocessedFrame& frame,
                                const Eigen::VectorXd& x, unsigned r, double delta,
                                unsigned levels, double epsilon,
                                const Eigen::VectorXd* noise) {
  if (static_cast<Eigen::Index>(frame.m) != phi.rows())
    throw std::invalid_argument("assemble_one_stage: frame size != operator rows");
  if (frame.r != r) throw std::invalid_argument("assemble_one_stage: frame order != r");
  if (x.size() != phi.cols())
    throw std::invalid_argument("assemble_one_stage: signal length != operator cols");
  if (epsilon < 0) throw std::invalid_argument("assemble_one_stage: epsilon >= 0 required");

  const double root_m = std::sqrt(static_cast<double>(frame.m));
  OneStageData data{LeftMatrixOperator(frame.u, phi), {}, {}, {}, 0.0, 0.0, 0.0};
  data.y = data.effective.apply(x);
  if (noise) {
    if (noise->size() != data.y.size())
      throw std::invalid_argument("assemble_one_stage: noise length != rows");
    if (noise->norm() > epsilon * root_m + 1e-12)
      throw std::invalid_argument("assemble_one_stage: noise exceeds the epsilon budget");
    data.y += *noise;
  }

  unsigned L = levels;
  if (L == 0) {
    // Smallest alphabet whose stable range covers the observed measurements
    // with 20% headroom.
    const double feedback = (std::pow(2.0, static_cast<double>(r)) - 1.0) / 2.0;
    const double need = 1.2 * data.y.cwiseAbs().maxCoeff() / delta + feedback;
    L = static_cast<unsigned>(std::ceil(need));
    if (L < 1) L = 1;
  }

  data.run = (r == 0) ? scalar_quantize(data.y, delta, L)
                      : sigma_delta_quantize(data.y, r, delta, L);
  data.q = data.run.q;
  data.c_r = data.run.u_inf / delta;
  data.radius_state = data.run.u_inf * root_m;  // == c_r * delta * sqrt(m)
  data.radius_noise = epsilon * root_m;
  return data;
}

}  // namespace lcs
