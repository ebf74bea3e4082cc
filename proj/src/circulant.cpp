#include "lcs/circulant.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace lcs {

namespace {

// FFTW's planner mutates global state; executing a plan on fresh buffers is
// thread-safe once the plan exists.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct CirculantOperator::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

CirculantOperator::CirculantOperator(PartialCirculantMatrix mat)
    : mat_(std::move(mat)), plans_(new Plans) {
  if (mat_.p == 0 || mat_.generator.size() != mat_.p)
    throw std::invalid_argument("CirculantOperator: malformed matrix");
  const int n = static_cast<int>(mat_.p);
  const int half = n / 2 + 1;

  std::vector<double> real_buf(mat_.p);
  std::vector<std::complex<double>> cplx_buf(half);
  {
    // FFTW_ESTIMATE keeps planning deterministic (no runtime measurement);
    // FFTW_UNALIGNED lets the new-array execute run on plain vectors.
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->r2c = fftw_plan_dft_r2c_1d(n, real_buf.data(),
                                       reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->c2r = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                       real_buf.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  if (!plans_->r2c || !plans_->c2r) throw std::runtime_error("CirculantOperator: planning failed");

  for (std::uint64_t t = 0; t < mat_.p; ++t) real_buf[t] = mat_.generator[t];
  fftw_execute_dft_r2c(plans_->r2c, real_buf.data(),
                       reinterpret_cast<fftw_complex*>(cplx_buf.data()));
  gen_spectrum_ = std::move(cplx_buf);
}

CirculantOperator::~CirculantOperator() = default;

Eigen::VectorXd CirculantOperator::apply(const Eigen::VectorXd& x) const {
  if (x.size() != cols()) throw std::invalid_argument("CirculantOperator::apply: length != p");
  const std::size_t n = mat_.p;
  const std::size_t half = n / 2 + 1;
  std::vector<double> real_buf(x.data(), x.data() + n);
  std::vector<std::complex<double>> spec(half);
  fftw_execute_dft_r2c(plans_->r2c, real_buf.data(),
                       reinterpret_cast<fftw_complex*>(spec.data()));
  // Cross-correlation with the generator: multiply by the conjugate spectrum.
  for (std::size_t k = 0; k < half; ++k) spec[k] *= std::conj(gen_spectrum_[k]);
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(spec.data()),
                       real_buf.data());
  const double norm = mat_.scale / static_cast<double>(n);
  Eigen::VectorXd out(rows());
  for (Eigen::Index i = 0; i < rows(); ++i) out[i] = real_buf[static_cast<std::size_t>(i)] * norm;
  return out;
}

Eigen::VectorXd CirculantOperator::apply_adjoint(const Eigen::VectorXd& y) const {
  if (y.size() != rows())
    throw std::invalid_argument("CirculantOperator::apply_adjoint: length != m");
  const std::size_t n = mat_.p;
  const std::size_t half = n / 2 + 1;
  std::vector<double> real_buf(n, 0.0);
  for (Eigen::Index i = 0; i < y.size(); ++i) real_buf[static_cast<std::size_t>(i)] = y[i];
  std::vector<std::complex<double>> spec(half);
  fftw_execute_dft_r2c(plans_->r2c, real_buf.data(),
                       reinterpret_cast<fftw_complex*>(spec.data()));
  // Plain cyclic convolution with the generator gives the transpose action.
  for (std::size_t k = 0; k < half; ++k) spec[k] *= gen_spectrum_[k];
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(spec.data()),
                       real_buf.data());
  const double norm = mat_.scale / static_cast<double>(n);
  Eigen::VectorXd out(cols());
  for (Eigen::Index j = 0; j < cols(); ++j) out[j] = real_buf[static_cast<std::size_t>(j)] * norm;
  return out;
}

std::int64_t CirculantOperator::column_sign_inner(std::uint64_t a, std::uint64_t b) const {
  if (a >= mat_.p || b >= mat_.p)
    throw std::out_of_range("CirculantOperator::column_sign_inner: column index");
  const std::uint64_t p = mat_.p;
  std::int64_t sum = 0;
  std::uint64_t ta = a;  // (a - i) mod p, walked downward
  std::uint64_t tb = b;
  for (std::uint64_t i = 0; i < mat_.rows; ++i) {
    sum += static_cast<std::int64_t>(mat_.generator[ta]) * mat_.generator[tb];
    ta = (ta == 0) ? p - 1 : ta - 1;
    tb = (tb == 0) ? p - 1 : tb - 1;
  }
  return sum;
}

}  // namespace lcs
