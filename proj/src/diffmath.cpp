#include "eacl/diffmath.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "eacl/errors.hpp"

namespace eacl {

namespace {

std::string shape_str(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

void Matrix::set_row(std::size_t r, const Vector& v) {
  if (v.size() != cols) {
    throw ValidationError("set_row: expected " + std::to_string(cols) +
                          " values, got " + std::to_string(v.size()));
  }
  std::copy(v.begin(), v.end(), data.begin() + static_cast<std::ptrdiff_t>(r * cols));
}

double dot(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) {
    throw ValidationError("dot: dimension mismatch " + std::to_string(u.size()) +
                          " vs " + std::to_string(v.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double norm(const Vector& v) { return std::sqrt(dot(v, v)); }

MlpParams init_mlp(const std::vector<std::size_t>& dims, Rng& rng) {
  if (dims.size() < 2) throw ValidationError("init_mlp: need at least one layer");
  MlpParams params;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    std::size_t in = dims[l], out = dims[l + 1];
    // LeCun-uniform weights (variance 1/fan_in) and zero biases. The
    // narrower 1/sqrt(fan_in) bound shrinks activation norms roughly 3x
    // per layer, and a shared random bias offset pushes every output of
    // this stack towards one ray; both stall the cosine-based losses
    // with tiny norms and exploding 1/|v| gradients.
    double bound = std::sqrt(3.0 / static_cast<double>(in));
    AffineLayer layer;
    layer.w = Matrix(out, in);
    layer.b = Vector(out, 0.0);
    for (double& x : layer.w.data) x = rng.uniform(-bound, bound);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

MlpGrad zero_grad_like(const MlpParams& params) {
  MlpGrad g;
  for (const auto& layer : params.layers) {
    AffineLayer zero;
    zero.w = Matrix(layer.w.rows, layer.w.cols);
    zero.b = Vector(layer.b.size(), 0.0);
    g.layers.push_back(std::move(zero));
  }
  return g;
}

void accumulate(MlpGrad& acc, const MlpGrad& g, double scale) {
  for (std::size_t l = 0; l < acc.layers.size(); ++l) {
    auto& a = acc.layers[l];
    const auto& b = g.layers[l];
    for (std::size_t i = 0; i < a.w.data.size(); ++i) a.w.data[i] += scale * b.w.data[i];
    for (std::size_t i = 0; i < a.b.size(); ++i) a.b[i] += scale * b.b[i];
  }
}

void sgd_step(MlpParams& params, const MlpGrad& grad, double lr) {
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& p = params.layers[l];
    const auto& g = grad.layers[l];
    for (std::size_t i = 0; i < p.w.data.size(); ++i) p.w.data[i] -= lr * g.w.data[i];
    for (std::size_t i = 0; i < p.b.size(); ++i) p.b[i] -= lr * g.b[i];
  }
}

Vector mlp_forward(const MlpParams& params, const Vector& x, MlpCache* cache) {
  if (x.size() != params.in_dim()) {
    throw ValidationError("mlp_forward: input dim " + std::to_string(x.size()) +
                          " does not match first layer " + shape_str(params.layers.front().w.rows, params.layers.front().w.cols));
  }
  if (cache) {
    cache->inputs.clear();
    cache->preacts.clear();
  }
  Vector a = x;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    Vector z(layer.w.rows, 0.0);
    for (std::size_t r = 0; r < layer.w.rows; ++r) {
      double s = layer.b[r];
      const double* wr = &layer.w.data[r * layer.w.cols];
      for (std::size_t c = 0; c < layer.w.cols; ++c) s += wr[c] * a[c];
      z[r] = s;
    }
    if (cache) {
      cache->inputs.push_back(std::move(a));
      cache->preacts.push_back(z);
    }
    bool last = (l + 1 == params.layers.size());
    if (last) {
      a = std::move(z);
    } else {
      a.resize(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) a[i] = std::tanh(z[i]);
    }
  }
  return a;
}

Vector mlp_backward(const MlpParams& params, const MlpCache& cache,
                    const Vector& upstream, MlpGrad& grad) {
  if (cache.inputs.size() != params.layers.size()) {
    throw ValidationError("mlp_backward: cache does not match parameter stack");
  }
  if (upstream.size() != params.out_dim()) {
    throw ValidationError("mlp_backward: upstream dim " + std::to_string(upstream.size()) +
                          " vs output dim " + std::to_string(params.out_dim()));
  }
  Vector g = upstream;
  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const auto& layer = params.layers[li];
    const Vector& input = cache.inputs[li];
    const Vector& z = cache.preacts[li];
    Vector dz(g.size());
    bool last = (li + 1 == params.layers.size());
    if (last) {
      dz = g;
    } else {
      for (std::size_t i = 0; i < g.size(); ++i) {
        double t = std::tanh(z[i]);
        dz[i] = g[i] * (1.0 - t * t);
      }
    }
    auto& gl = grad.layers[li];
    for (std::size_t r = 0; r < layer.w.rows; ++r) {
      double* gw = &gl.w.data[r * layer.w.cols];
      for (std::size_t c = 0; c < layer.w.cols; ++c) gw[c] += dz[r] * input[c];
      gl.b[r] += dz[r];
    }
    Vector gprev(layer.w.cols, 0.0);
    for (std::size_t r = 0; r < layer.w.rows; ++r) {
      const double* wr = &layer.w.data[r * layer.w.cols];
      for (std::size_t c = 0; c < layer.w.cols; ++c) gprev[c] += wr[c] * dz[r];
    }
    g = std::move(gprev);
  }
  return g;
}

namespace {
constexpr double kZeroNormGuard = 1e-12;
}

CosineResult cosine_sim(const Vector& u, const Vector& v) {
  double nu = norm(u), nv = norm(v);
  if (nu < kZeroNormGuard || nv < kZeroNormGuard) {
    throw NumericError("cosine_sim: zero-norm input");
  }
  double d = dot(u, v);
  double c = d / (nu * nv);
  CosineResult res;
  res.value = c;
  res.grad_u.resize(u.size());
  res.grad_v.resize(v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    res.grad_u[i] = v[i] / (nu * nv) - c * u[i] / (nu * nu);
    res.grad_v[i] = u[i] / (nu * nv) - c * v[i] / (nv * nv);
  }
  return res;
}

double cosine_value(const Vector& u, const Vector& v) {
  double nu = norm(u), nv = norm(v);
  if (nu < kZeroNormGuard || nv < kZeroNormGuard) {
    throw NumericError("cosine_sim: zero-norm input");
  }
  return dot(u, v) / (nu * nv);
}

ArccosResult arccos_safe(double x) {
  if (std::isnan(x)) throw NumericError("arccos_safe: NaN input");
  double clamped = std::clamp(x, -1.0 + kArccosClampEps, 1.0 - kArccosClampEps);
  ArccosResult res;
  res.angle = std::acos(clamped);
  res.grad = -1.0 / std::sqrt(1.0 - clamped * clamped);
  return res;
}

GradCheckReport grad_check(const std::function<double(const Vector&)>& f,
                           const Vector& x, const Vector& analytic_grad,
                           double step, double tolerance, double denom_floor) {
  if (step <= 0.0) throw ValidationError("grad_check: step must be positive");
  if (analytic_grad.size() != x.size()) {
    throw ValidationError("grad_check: gradient size mismatch");
  }
  GradCheckReport report;
  Vector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    double fp = f(probe);
    probe[i] = x[i] - step;
    double fm = f(probe);
    probe[i] = x[i];
    double fd = (fp - fm) / (2.0 * step);
    double abs_err = std::fabs(fd - analytic_grad[i]);
    double rel = abs_err / std::max({std::fabs(fd), std::fabs(analytic_grad[i]), denom_floor});
    if (rel > report.max_rel_err) {
      report.max_rel_err = rel;
      report.worst_index = i;
    }
    report.max_abs_err = std::max(report.max_abs_err, abs_err);
  }
  report.pass = report.max_rel_err <= tolerance;
  return report;
}

Vector flatten(const MlpParams& params) {
  Vector flat;
  for (const auto& layer : params.layers) {
    flat.insert(flat.end(), layer.w.data.begin(), layer.w.data.end());
    flat.insert(flat.end(), layer.b.begin(), layer.b.end());
  }
  return flat;
}

Vector flatten(const MlpGrad& grad) {
  Vector flat;
  for (const auto& layer : grad.layers) {
    flat.insert(flat.end(), layer.w.data.begin(), layer.w.data.end());
    flat.insert(flat.end(), layer.b.begin(), layer.b.end());
  }
  return flat;
}

void unflatten(const Vector& flat, MlpParams& params) {
  std::size_t pos = 0;
  for (auto& layer : params.layers) {
    for (double& x : layer.w.data) x = flat[pos++];
    for (double& x : layer.b) x = flat[pos++];
  }
  if (pos != flat.size()) throw ValidationError("unflatten: size mismatch");
}

}  // namespace eacl
