#include <algorithm>
#include <cmath>
#include <numeric>

#include "biobench/infer.hpp"
#include "biobench/rng.hpp"

namespace biobench::infer {

namespace {

// row-major helpers for small dense matrices
std::vector<double> matmul(const std::vector<double>& a, std::size_t ar,
                           std::size_t ac, const std::vector<double>& b,
                           std::size_t bc) {
  std::vector<double> c(ar * bc, 0.0);
  for (std::size_t i = 0; i < ar; ++i)
    for (std::size_t k = 0; k < ac; ++k) {
      const double av = a[i * ac + k];
      for (std::size_t j = 0; j < bc; ++j) c[i * bc + j] += av * b[k * bc + j];
    }
  return c;
}

/// W <- (W W^T)^(-1/2) W, computed through the eigensystem of W W^T.
std::vector<double> symmetric_decorrelate(const std::vector<double>& w,
                                          std::size_t n, std::size_t cols,
                                          KernelContext& ctx) {
  std::vector<double> wwt(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < cols; ++k) s += w[i * cols + k] * w[j * cols + k];
      wwt[i * n + j] = s;
    }
  const auto eig = jacobi_eigen(wwt, n, ctx);
  for (double v : eig.values)
    if (!(v > 1e-12))
      throw NumericError("fastica: degenerate unmixing matrix");

  std::vector<double> inv_sqrt(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k)
        s += eig.vectors[i * n + k] * eig.vectors[j * n + k] /
             std::sqrt(eig.values[k]);
      inv_sqrt[i * n + j] = s;
    }
  ctx.mac(2 * n * n * (cols + n));
  ctx.mul(2 * n);
  return matmul(inv_sqrt, n, n, w, cols);
}

}  // namespace

EigenResult jacobi_eigen(std::vector<double> a, std::size_t n,
                         KernelContext& ctx) {
  if (n == 0 || a.size() != n * n) throw DomainError("jacobi_eigen: shape");
  double max_abs = 0;
  for (double v : a) max_abs = std::max(max_abs, std::fabs(v));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(a[i * n + j] - a[j * n + i]) > 1e-8 * std::max(1.0, max_abs))
        throw DomainError("jacobi_eigen: matrix is not symmetric");

  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  std::uint64_t rotations = 0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
    if (off < 1e-24 * std::max(1.0, max_abs * max_abs)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
        ++rotations;
      }
    }
  }

  EigenResult out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a[i * n + i];

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return out.values[x] > out.values[y];
  });
  EigenResult sorted;
  sorted.values.resize(n);
  sorted.vectors.assign(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    sorted.values[j] = out.values[order[j]];
    for (std::size_t i = 0; i < n; ++i)
      sorted.vectors[i * n + j] = v[i * n + order[j]];
  }
  ctx.mac(12 * rotations * n);
  ctx.mul(8 * rotations);
  ctx.branch(rotations);
  ctx.mem(6 * rotations * n);
  return sorted;
}

IcaResult fastica(std::span<const double> x, std::size_t channels,
                  std::size_t n, const IcaParams& params, KernelContext& ctx) {
  if (channels == 0 || n < 2 || x.size() != channels * n)
    throw DomainError("fastica: input shape mismatch");
  const std::size_t m = params.n_components;
  if (m == 0 || m > channels)
    throw DomainError("fastica: component count out of range");

  // center each channel
  std::vector<double> xc(x.begin(), x.end());
  for (std::size_t c = 0; c < channels; ++c) {
    double mean = 0;
    for (std::size_t i = 0; i < n; ++i) mean += xc[c * n + i];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) xc[c * n + i] -= mean;
  }

  // channel covariance and whitening from its eigensystem
  std::vector<double> cov(channels * channels, 0.0);
  for (std::size_t a = 0; a < channels; ++a)
    for (std::size_t b = a; b < channels; ++b) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += xc[a * n + i] * xc[b * n + i];
      s /= static_cast<double>(n - 1);
      cov[a * channels + b] = s;
      cov[b * channels + a] = s;
    }
  ctx.mac(channels * n + channels * (channels + 1) / 2 * n);

  const auto eig = jacobi_eigen(cov, channels, ctx);
  if (!(eig.values[0] > 0) || eig.values[m - 1] < 1e-12 * eig.values[0])
    throw NumericError("fastica: singular channel covariance");

  std::vector<double> white(m * channels);  // rows: e_j^T / sqrt(lambda_j)
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t c = 0; c < channels; ++c)
      white[j * channels + c] =
          eig.vectors[c * channels + j] / std::sqrt(eig.values[j]);
  auto z = matmul(white, m, channels, xc, n);  // m x n, unit covariance
  ctx.mac(m * channels * n);
  ctx.mul(m * channels);

  Rng rng(params.seed);
  std::vector<double> w(m * m);
  for (auto& v : w) v = rng.gaussian();
  w = symmetric_decorrelate(w, m, m, ctx);

  IcaResult out;
  out.n_components = m;
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> wn(m * m);
  for (out.iterations = 1; out.iterations <= params.max_iterations;
       ++out.iterations) {
    // y = w z;  w+ = E[g(y) z^T] - diag(E[g'(y)]) w, with g = tanh
    const auto y = matmul(w, m, m, z, n);
    std::vector<double> gmean(m, 0.0);
    std::vector<double> gy(m * n);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        const double g = std::tanh(y[r * n + i]);
        gy[r * n + i] = g;
        gmean[r] += 1.0 - g * g;
      }
      gmean[r] *= inv_n;
    }
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += gy[r * n + i] * z[c * n + i];
        wn[r * m + c] = s * inv_n - gmean[r] * w[r * m + c];
      }
    wn = symmetric_decorrelate(wn, m, m, ctx);

    double delta = 0;
    for (std::size_t r = 0; r < m; ++r) {
      double dot = 0;
      for (std::size_t c = 0; c < m; ++c) dot += wn[r * m + c] * w[r * m + c];
      delta = std::max(delta, std::fabs(1.0 - std::fabs(dot)));
    }
    w = wn;
    ctx.mac(3 * m * m * n + m * m);
    ctx.mul(3 * m * n);
    ctx.branch(m);
    if (delta < params.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.iterations = std::min(out.iterations, params.max_iterations);

  out.unmixing = w;
  out.sources = matmul(w, m, m, z, n);
  ctx.mac(m * m * n);
  ctx.mem(m * n);
  return out;
}

}  // namespace biobench::infer
