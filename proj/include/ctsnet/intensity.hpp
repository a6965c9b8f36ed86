#ifndef CTSNET_INTENSITY_HPP
#define CTSNET_INTENSITY_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ctsnet {

struct StateSpaceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Square intensity matrix: nonnegative off-diagonal rates, rows sum to 0.
struct IntensityMatrix {
  int dim = 0;
  std::vector<double> q;  // row-major dim*dim

  IntensityMatrix() = default;
  explicit IntensityMatrix(int d)
      : dim(d), q(static_cast<std::size_t>(d) * d, 0.0) {
    if (d < 1) throw std::invalid_argument("intensity matrix needs dim >= 1");
  }

  double& at(int i, int j) { return q[static_cast<std::size_t>(i) * dim + j]; }
  double at(int i, int j) const {
    return q[static_cast<std::size_t>(i) * dim + j];
  }

  double row_sum(int i) const {
    double s = 0;
    for (int j = 0; j < dim; ++j) s += at(i, j);
    return s;
  }

  // diag = -(sum of off-diagonal entries)
  void set_diagonal_from_rows() {
    for (int i = 0; i < dim; ++i) {
      double s = 0;
      for (int j = 0; j < dim; ++j)
        if (j != i) s += at(i, j);
      at(i, i) = -s;
    }
  }

  void validate(double tol = 1e-9) const {
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        if (i != j && at(i, j) < 0)
          throw std::invalid_argument("negative off-diagonal intensity");
      }
      if (std::abs(row_sum(i)) > tol)
        throw std::invalid_argument("intensity matrix row does not sum to 0");
    }
  }
};

// Row-major dense matrix for kernels and smoother workspaces.
struct DenseMatrix {
  int rows = 0, cols = 0;
  std::vector<double> v;

  DenseMatrix() = default;
  DenseMatrix(int r, int c)
      : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}
  static DenseMatrix identity(int d) {
    DenseMatrix m(d, d);
    for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
    return m;
  }
  double& at(int i, int j) { return v[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const {
    return v[static_cast<std::size_t>(i) * cols + j];
  }
};

inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul shape mismatch");
  DenseMatrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  }
  return c;
}

namespace detail {

// exp(t*A) by uniformization for A with nonnegative off-diagonal entries and
// row sums <= 0 (generators and sub-generators). The Poisson series is
// truncated when the accumulated mass reaches 1 - tail.
inline DenseMatrix expm_uniformized_step(const IntensityMatrix& a, double t,
                                         double tail) {
  const int d = a.dim;
  double m = 0;
  for (int i = 0; i < d; ++i) m = std::max(m, -a.at(i, i));
  DenseMatrix out = DenseMatrix::identity(d);
  if (m == 0.0 || t == 0.0) return out;

  // P = I + A/m, entries >= 0, substochastic rows
  DenseMatrix p(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      p.at(i, j) = (i == j ? 1.0 : 0.0) + a.at(i, j) / m;

  const double mt = m * t;
  double w = std::exp(-mt);  // Poisson weight at k = 0
  double acc = w;
  DenseMatrix pk = DenseMatrix::identity(d);
  for (auto& x : out.v) x *= w;
  int k = 0;
  while (acc < 1.0 - tail && k < 10000) {
    ++k;
    w *= mt / k;
    pk = multiply(pk, p);
    for (std::size_t idx = 0; idx < out.v.size(); ++idx)
      out.v[idx] += w * pk.v[idx];
    acc += w;
  }
  return out;
}

inline DenseMatrix expm_subgenerator(const IntensityMatrix& a, double t,
                                     double tail = 1e-12) {
  if (t < 0) throw std::invalid_argument("matrix exponential needs t >= 0");
  double m = 0;
  for (int i = 0; i < a.dim; ++i) m = std::max(m, -a.at(i, i));
  // keep m*step small enough that exp(-m*step) stays well away from underflow
  const int steps = std::max(1, static_cast<int>(std::ceil(m * t / 64.0)));
  DenseMatrix out =
      expm_uniformized_step(a, t / steps, tail / steps);
  DenseMatrix base = out;
  for (int s = 1; s < steps; ++s) out = multiply(out, base);
  return out;
}

}  // namespace detail

// exp(t*Q) for a valid generator Q; rows of the result sum to 1 within 1e-10.
inline DenseMatrix exact_transition_kernel(const IntensityMatrix& gen,
                                           double t) {
  gen.validate();
  if (t < 0) throw std::invalid_argument("transition kernel needs t >= 0");
  return detail::expm_subgenerator(gen, t);
}

}  // namespace ctsnet

#endif
