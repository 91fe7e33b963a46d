#include <doctest.h>

#include <cmath>

#include "eacl/diffmath.hpp"
#include "eacl/errors.hpp"
#include "oracles.hpp"

using namespace eacl;

namespace {

MlpParams random_mlp(const std::vector<std::size_t>& dims, std::uint64_t seed) {
  Rng rng(seed);
  return init_mlp(dims, rng);
}

}  // namespace

TEST_CASE("mlp_forward identity weights is the identity map") {
  MlpParams params;
  AffineLayer layer;
  layer.w = Matrix(3, 3);
  for (std::size_t i = 0; i < 3; ++i) layer.w.at(i, i) = 1.0;
  layer.b = Vector(3, 0.0);
  params.layers.push_back(layer);

  Vector x = {0.5, -1.25, 2.0};
  CHECK(mlp_forward(params, x, nullptr) == x);
}

TEST_CASE("mlp_forward zero weights returns the bias") {
  MlpParams params;
  AffineLayer layer;
  layer.w = Matrix(2, 4);
  layer.b = Vector{1.5, -0.25};
  params.layers.push_back(layer);

  Vector out = mlp_forward(params, Vector{1, 2, 3, 4}, nullptr);
  CHECK(out == layer.b);
}

TEST_CASE("mlp_forward is pure") {
  MlpParams params = random_mlp({5, 4, 3}, 11);
  Rng rng(12);
  Vector x(5);
  for (double& v : x) v = rng.uniform(-1, 1);
  CHECK(mlp_forward(params, x, nullptr) == mlp_forward(params, x, nullptr));
}

TEST_CASE("mlp_forward rejects dimension mismatch") {
  MlpParams params = random_mlp({5, 3}, 1);
  CHECK_THROWS_AS(mlp_forward(params, Vector(4, 0.0), nullptr), ValidationError);
}

TEST_CASE("mlp_backward single linear layer has outer-product weight gradient") {
  MlpParams params = random_mlp({3, 2}, 5);
  Vector x = {0.3, -0.7, 1.1};
  MlpCache cache;
  mlp_forward(params, x, &cache);
  Vector upstream = {2.0, -0.5};
  MlpGrad grad = zero_grad_like(params);
  Vector input_grad = mlp_backward(params, cache, upstream, grad);

  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(grad.layers[0].w.at(r, c) == doctest::Approx(upstream[r] * x[c]).epsilon(1e-12));
    }
    CHECK(grad.layers[0].b[r] == doctest::Approx(upstream[r]).epsilon(1e-12));
  }
  for (std::size_t c = 0; c < 3; ++c) {
    double expect = params.layers[0].w.at(0, c) * upstream[0] +
                    params.layers[0].w.at(1, c) * upstream[1];
    CHECK(input_grad[c] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("mlp_backward zero upstream gives zero gradients") {
  MlpParams params = random_mlp({4, 4, 2}, 9);
  MlpCache cache;
  mlp_forward(params, Vector{0.1, 0.2, 0.3, 0.4}, &cache);
  MlpGrad grad = zero_grad_like(params);
  Vector input_grad = mlp_backward(params, cache, Vector(2, 0.0), grad);
  for (double g : flatten(grad)) CHECK(g == 0.0);
  for (double g : input_grad) CHECK(g == 0.0);
}

TEST_CASE("mlp_backward matches finite differences over 100 random draws") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t in = 2 + rng.below(4), hidden = 2 + rng.below(4), out = 1 + rng.below(3);
    MlpParams params = random_mlp({in, hidden, out}, rng.next_u64());
    Vector x(in), upstream(out);
    for (double& v : x) v = rng.uniform(-1, 1);
    for (double& v : upstream) v = rng.uniform(-1, 1);

    MlpCache cache;
    mlp_forward(params, x, &cache);
    MlpGrad grad = zero_grad_like(params);
    mlp_backward(params, cache, upstream, grad);

    // Scalar function <upstream, mlp(x)> over flattened parameters.
    auto f = [&](const Vector& flat) {
      MlpParams probe = params;
      unflatten(flat, probe);
      Vector y = mlp_forward(probe, x, nullptr);
      return dot(upstream, y);
    };
    GradCheckReport report = grad_check(f, flatten(params), flatten(grad), 1e-5, 1e-4);
    CHECK_MESSAGE(report.pass, "trial ", trial, " max_rel_err ", report.max_rel_err);
  }
}

TEST_CASE("mlp_backward input gradient matches finite differences") {
  MlpParams params = random_mlp({4, 5, 3}, 42);
  Vector x = {0.2, -0.4, 0.9, 0.1}, upstream = {1.0, -2.0, 0.5};
  MlpCache cache;
  mlp_forward(params, x, &cache);
  MlpGrad grad = zero_grad_like(params);
  Vector input_grad = mlp_backward(params, cache, upstream, grad);
  auto f = [&](const Vector& probe) { return dot(upstream, mlp_forward(params, probe, nullptr)); };
  CHECK(grad_check(f, x, input_grad, 1e-5, 1e-4).pass);
}

TEST_CASE("cosine_sim closed-form values") {
  CHECK(cosine_sim({1, 0}, {1, 0}).value == doctest::Approx(1.0));
  CHECK(cosine_sim({1, 0}, {0, 1}).value == doctest::Approx(0.0));
  CHECK(cosine_sim({1, 0}, {1, 1}).value == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("cosine_sim rejects zero-norm input") {
  CHECK_THROWS_AS(cosine_sim({0, 0}, {1, 0}), NumericError);
  CHECK_THROWS_AS(cosine_sim({1, 0}, {0, 0}), NumericError);
}

TEST_CASE("cosine_sim is symmetric and scale invariant") {
  Rng rng(31337);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t d = 2 + rng.below(6);
    Vector u(d), v(d);
    for (double& x : u) x = rng.uniform(-2, 2);
    for (double& x : v) x = rng.uniform(-2, 2);
    if (norm(u) < 1e-3 || norm(v) < 1e-3) continue;
    double a = cosine_sim(u, v).value;
    double b = cosine_sim(v, u).value;
    CHECK(std::fabs(a - b) <= 1e-9);
    double scale = std::exp(rng.uniform(-3, 3));
    Vector su = u;
    for (double& x : su) x *= scale;
    CHECK(std::fabs(cosine_sim(su, v).value - a) <= 1e-9);
  }
}

TEST_CASE("cosine_sim gradients match finite differences") {
  Rng rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t d = 2 + rng.below(5);
    Vector u(d), v(d);
    for (double& x : u) x = rng.uniform(-2, 2);
    for (double& x : v) x = rng.uniform(-2, 2);
    if (norm(u) < 0.1 || norm(v) < 0.1) continue;
    CosineResult res = cosine_sim(u, v);
    auto fu = [&](const Vector& probe) { return cosine_sim(probe, v).value; };
    auto fv = [&](const Vector& probe) { return cosine_sim(u, probe).value; };
    CHECK(grad_check(fu, u, res.grad_u, 1e-6, 1e-4).pass);
    CHECK(grad_check(fv, v, res.grad_v, 1e-6, 1e-4).pass);
  }
}

TEST_CASE("arccos_safe spot values and clamping") {
  CHECK(arccos_safe(0.0).angle == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(arccos_safe(0.0).grad == doctest::Approx(-1.0).epsilon(1e-12));
  // x = 1 clamps to 1 - eps; the angle is about sqrt(2 eps).
  double angle_at_one = arccos_safe(1.0).angle;
  CHECK(angle_at_one > 0.0);
  CHECK(angle_at_one <= std::sqrt(2.0 * kArccosClampEps) * (1.0 + 1e-6));
  CHECK(arccos_safe(-1.0).angle <= M_PI);
  CHECK(arccos_safe(2.0).angle == arccos_safe(1.0).angle);
  CHECK_THROWS_AS(arccos_safe(std::nan("")), NumericError);
}

TEST_CASE("arccos_safe is monotone non-increasing") {
  Rng rng(5150);
  for (int trial = 0; trial < 200; ++trial) {
    double a = rng.uniform(-1.2, 1.2), b = rng.uniform(-1.2, 1.2);
    if (a > b) std::swap(a, b);
    CHECK(arccos_safe(a).angle >= arccos_safe(b).angle);
  }
}

TEST_CASE("grad_check passes a quadratic form at 1e-6") {
  Matrix q(3, 3);
  Rng rng(8);
  for (double& x : q.data) x = rng.uniform(-1, 1);
  Vector x0 = {0.4, -0.2, 0.9};
  auto f = [&](const Vector& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) s += x[i] * q.at(i, j) * x[j];
    return s;
  };
  Vector analytic(3, 0.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      analytic[i] += q.at(i, j) * x0[j];
      analytic[j] += q.at(i, j) * x0[i];
    }
  CHECK(grad_check(f, x0, analytic, 1e-5, 1e-6).pass);
}

TEST_CASE("grad_check fails on a corrupted gradient") {
  auto f = [](const Vector& x) { return x[0] * x[0] + 3.0 * x[1]; };
  Vector x0 = {1.0, 2.0};
  Vector wrong = {2.0 * x0[0] + 0.5, 3.0};
  CHECK_FALSE(grad_check(f, x0, wrong, 1e-5, 1e-4).pass);
}

TEST_CASE("init_mlp respects the fan-in bound and is seed deterministic") {
  MlpParams a = random_mlp({8, 6, 4}, 123);
  MlpParams b = random_mlp({8, 6, 4}, 123);
  CHECK(a == b);
  double bound0 = std::sqrt(3.0 / 8.0);
  for (double w : a.layers[0].w.data) CHECK(std::fabs(w) <= bound0);
  for (double bias : a.layers[0].b) CHECK(bias == 0.0);
}
