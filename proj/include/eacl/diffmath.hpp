#ifndef EACL_DIFFMATH_HPP_
#define EACL_DIFFMATH_HPP_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "eacl/rng.hpp"

namespace eacl {

using Vector = std::vector<double>;

// Dense row-major matrix. Small and dumb on purpose; everything in this
// project fits comfortably in cache.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  Vector row(std::size_t r) const {
    return Vector(data.begin() + static_cast<std::ptrdiff_t>(r * cols),
                  data.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
  }
  void set_row(std::size_t r, const Vector& v);

  bool operator==(const Matrix& other) const = default;
};

double dot(const Vector& u, const Vector& v);
double norm(const Vector& v);

// One affine layer: y = w x + b, with w shaped out x in.
struct AffineLayer {
  Matrix w;
  Vector b;

  bool operator==(const AffineLayer& other) const = default;
};

// A stack of affine layers with tanh between them (none after the last).
// A single layer is therefore purely affine.
struct MlpParams {
  std::vector<AffineLayer> layers;

  std::size_t in_dim() const { return layers.front().w.cols; }
  std::size_t out_dim() const { return layers.back().w.rows; }

  bool operator==(const MlpParams& other) const = default;
};

// Everything the backward pass needs: the input to each layer and each
// layer's pre-activation.
struct MlpCache {
  std::vector<Vector> inputs;
  std::vector<Vector> preacts;
};

// Shape-congruent with MlpParams.
struct MlpGrad {
  std::vector<AffineLayer> layers;
};

// Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] for weights and biases.
MlpParams init_mlp(const std::vector<std::size_t>& dims, Rng& rng);

MlpGrad zero_grad_like(const MlpParams& params);
void accumulate(MlpGrad& acc, const MlpGrad& g, double scale = 1.0);
void sgd_step(MlpParams& params, const MlpGrad& grad, double lr);

Vector mlp_forward(const MlpParams& params, const Vector& x, MlpCache* cache);

// Exact reverse-mode gradients for one sample. Returns the gradient with
// respect to the input; parameter gradients are accumulated into grad.
Vector mlp_backward(const MlpParams& params, const MlpCache& cache,
                    const Vector& upstream, MlpGrad& grad);

struct CosineResult {
  double value = 0.0;
  Vector grad_u;
  Vector grad_v;
};

// <u,v>/(|u||v|) with analytic gradients. Zero-norm inputs are errors.
CosineResult cosine_sim(const Vector& u, const Vector& v);
double cosine_value(const Vector& u, const Vector& v);

inline constexpr double kArccosClampEps = 1e-7;

struct ArccosResult {
  double angle = 0.0;  // in [0, pi]
  double grad = 0.0;   // d angle / d x at the clamped point
};

// arccos with the argument clamped to [-1+eps, 1-eps]; the gradient
// -1/sqrt(1-x^2) is evaluated at the clamped point so it stays bounded.
ArccosResult arccos_safe(double x);

// Central finite differences against a provided analytic gradient.
// Relative error per coordinate uses max(|analytic|, |fd|, denom_floor) as
// the denominator, so coordinates with near-zero gradient are compared on
// an absolute scale instead of blowing up.
struct GradCheckReport {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  std::size_t worst_index = 0;
  bool pass = false;
};

GradCheckReport grad_check(const std::function<double(const Vector&)>& f,
                           const Vector& x, const Vector& analytic_grad,
                           double step, double tolerance,
                           double denom_floor = 1e-2);

// Flattening helpers so whole parameter sets can be fed to grad_check.
Vector flatten(const MlpParams& params);
Vector flatten(const MlpGrad& grad);
void unflatten(const Vector& flat, MlpParams& params);

}  // namespace eacl

#endif  // EACL_DIFFMATH_HPP_
