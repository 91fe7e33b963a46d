#include <doctest.h>

#include <cmath>

#include "eacl/errors.hpp"
#include "eacl/losses.hpp"
#include "oracles.hpp"

using namespace eacl;

namespace {

// Random stage-one style batch: b utterance rows plus one anchor row per
// class, every class guaranteed at least one utterance unless asked not to.
ContrastiveBatch random_batch(Rng& rng, std::size_t b, std::size_t s, std::size_t d,
                              double tau) {
  Matrix reps = oracle::random_matrix(b, d, rng);
  Matrix anchors = oracle::random_matrix(s, d, rng);
  std::vector<int> labels = oracle::random_labels(b, s, rng);
  return make_contrastive_batch(reps, labels, anchors, tau);
}

Vector flatten_rows(const Matrix& m) { return m.data; }

}  // namespace

TEST_CASE("sup_loss identical rows value is 4 log 4") {
  // b=2, s=2, all four rows the same vector, labels (0,1) + anchors (0,1):
  // every row has exactly one positive and every c_ij = 1/tau.
  Matrix reps(2, 3);
  Matrix anchors(2, 3);
  Vector row = {0.3, -1.2, 0.5};
  reps.set_row(0, row);
  reps.set_row(1, row);
  anchors.set_row(0, row);
  anchors.set_row(1, row);
  ContrastiveBatch batch = make_contrastive_batch(reps, {0, 1}, anchors, 0.1);
  SupLossResult res = sup_loss(batch);
  CHECK(res.value == doctest::Approx(4.0 * std::log(4.0)).epsilon(1e-12));
  CHECK(res.skipped_rows == 0);
}

TEST_CASE("sup_loss matches the brute-force oracle on random batches") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t b = 1 + rng.below(8), s = 2 + rng.below(5), d = 2 + rng.below(15);
    double tau = 0.05 + rng.uniform() * 0.5;
    ContrastiveBatch batch = random_batch(rng, b, s, d, tau);
    double expected = oracle::sup_loss_literal(batch.v, batch.labels, tau);
    CHECK(std::fabs(sup_loss(batch).value - expected) <= 1e-9);
  }
}

TEST_CASE("sup_loss conventional variant matches its oracle") {
  Rng rng(100);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t b = 1 + rng.below(8), s = 2 + rng.below(5), d = 2 + rng.below(15);
    double tau = 0.05 + rng.uniform() * 0.5;
    ContrastiveBatch batch = random_batch(rng, b, s, d, tau);
    double expected = oracle::sup_loss_conventional(batch.v, batch.labels, tau);
    CHECK(std::fabs(sup_loss(batch, SupconVariant::conventional).value - expected) <= 1e-9);
  }
}

TEST_CASE("the two sup_loss variants genuinely differ on a fixed batch") {
  Rng rng(7);
  ContrastiveBatch batch = random_batch(rng, 4, 3, 6, 0.1);
  double literal = sup_loss(batch, SupconVariant::literal).value;
  double conventional = sup_loss(batch, SupconVariant::conventional).value;
  CHECK(std::fabs(literal - conventional) > 1e-6);
  // Pin the literal value against the oracle once more as a regression
  // anchor for the printed-formula semantics.
  CHECK(literal ==
        doctest::Approx(oracle::sup_loss_literal(batch.v, batch.labels, 0.1)).epsilon(1e-12));
}

TEST_CASE("sup_loss counts skipped rows for classes absent from the batch") {
  // Anchors for 3 classes but utterances only cover class 0 and 1; the
  // class-2 anchor has no positives.
  Rng rng(15);
  Matrix reps = oracle::random_matrix(3, 4, rng);
  Matrix anchors = oracle::random_matrix(3, 4, rng);
  ContrastiveBatch batch = make_contrastive_batch(reps, {0, 1, 0}, anchors, 0.1);
  SupLossResult res = sup_loss(batch);
  CHECK(res.skipped_rows == 1);
  // Skipped anchor still appears in other rows' denominators but gets no
  // query term; the oracle applies the same rule.
  CHECK(res.value ==
        doctest::Approx(oracle::sup_loss_literal(batch.v, batch.labels, 0.1)).epsilon(1e-12));
}

TEST_CASE("sup_loss errors") {
  Rng rng(16);
  Matrix reps = oracle::random_matrix(2, 4, rng);
  Matrix anchors = oracle::random_matrix(2, 4, rng);
  ContrastiveBatch batch = make_contrastive_batch(reps, {0, 1}, anchors, 0.1);
  batch.tau = 0.0;
  CHECK_THROWS_AS(sup_loss(batch), ValidationError);
  batch.tau = 0.1;
  batch.labels = {0, 1, 2, 3};  // all positive sets empty
  CHECK_THROWS_AS(sup_loss(batch), ValidationError);
}

TEST_CASE("sup_loss is invariant under joint row/label permutations") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    ContrastiveBatch batch = random_batch(rng, 5, 3, 6, 0.1);
    double base = sup_loss(batch).value;

    std::vector<std::size_t> perm(batch.v.rows);
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    ContrastiveBatch permuted = batch;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      permuted.v.set_row(i, batch.v.row(perm[i]));
      permuted.labels[i] = batch.labels[perm[i]];
    }
    CHECK(std::fabs(sup_loss(permuted).value - base) <= 1e-9);
  }
}

TEST_CASE("sup_loss is invariant under positive rescaling of a single row") {
  Rng rng(18);
  ContrastiveBatch batch = random_batch(rng, 5, 3, 6, 0.1);
  double base = sup_loss(batch).value;
  for (double scale : {1e-3, 0.5, 7.0, 1e3}) {
    ContrastiveBatch scaled = batch;
    for (std::size_t c = 0; c < scaled.v.cols; ++c) scaled.v.at(2, c) *= scale;
    CHECK(std::fabs(sup_loss(scaled).value - base) <= 1e-7);
  }
}

TEST_CASE("sup_loss gradients match finite differences for both variants") {
  Rng rng(19);
  for (SupconVariant variant : {SupconVariant::literal, SupconVariant::conventional}) {
    for (int trial = 0; trial < 25; ++trial) {
      std::size_t b = 1 + rng.below(6), s = 2 + rng.below(4), d = 2 + rng.below(8);
      ContrastiveBatch batch = random_batch(rng, b, s, d, 0.1 + rng.uniform() * 0.4);
      SupLossResult res = sup_loss(batch, variant);
      auto f = [&](const Vector& flat) {
        ContrastiveBatch probe = batch;
        probe.v.data = flat;
        return sup_loss(probe, variant).value;
      };
      GradCheckReport report =
          grad_check(f, flatten_rows(batch.v), flatten_rows(res.grad_v), 1e-5, 1e-4);
      CHECK_MESSAGE(report.pass, "variant ", static_cast<int>(variant), " trial ", trial,
                    " max_rel_err ", report.max_rel_err);
    }
  }
}

TEST_CASE("ce_loss uniform logits give ln s") {
  Matrix logits(3, 7);
  CeLossResult res = ce_loss(logits, {0, 3, 6});
  CHECK(res.value == doctest::Approx(std::log(7.0)).epsilon(1e-12));
}

TEST_CASE("ce_loss huge true-class margin drives the loss to zero") {
  Matrix logits(1, 4);
  logits.at(0, 2) = 60.0;
  CHECK(std::fabs(ce_loss(logits, {2}).value) <= 1e-12);
}

TEST_CASE("ce_loss matches oracle and finite differences") {
  Rng rng(20);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t b = 1 + rng.below(6), s = 2 + rng.below(6);
    Matrix logits = oracle::random_matrix(b, s, rng, -3.0, 3.0);
    std::vector<int> labels = oracle::random_labels(b, s, rng);
    CeLossResult res = ce_loss(logits, labels);
    CHECK(res.value == doctest::Approx(oracle::ce_loss(logits, labels)).epsilon(1e-12));
    auto f = [&](const Vector& flat) {
      Matrix probe = logits;
      probe.data = flat;
      return ce_loss(probe, labels).value;
    };
    CHECK(grad_check(f, logits.data, res.grad_logits.data, 1e-5, 1e-4).pass);
  }
}

TEST_CASE("ce_loss gradient is softmax minus one-hot over batch") {
  Matrix logits(1, 3);
  logits.at(0, 0) = 1.0;
  logits.at(0, 1) = 2.0;
  logits.at(0, 2) = -1.0;
  CeLossResult res = ce_loss(logits, {1});
  double z = std::exp(1.0) + std::exp(2.0) + std::exp(-1.0);
  CHECK(res.grad_logits.at(0, 0) == doctest::Approx(std::exp(1.0) / z).epsilon(1e-12));
  CHECK(res.grad_logits.at(0, 1) == doctest::Approx(std::exp(2.0) / z - 1.0).epsilon(1e-12));
}

TEST_CASE("ce_loss rejects out-of-range labels") {
  Matrix logits(2, 3);
  CHECK_THROWS_AS(ce_loss(logits, {0, 3}), ValidationError);
}

TEST_CASE("angle_loss orthogonal pair gives -pi/2") {
  Matrix anchors(2, 2);
  anchors.at(0, 0) = 1.0;
  anchors.at(1, 1) = 1.0;
  CHECK(angle_loss(anchors).value == doctest::Approx(-M_PI / 2).epsilon(1e-12));
}

TEST_CASE("angle_loss three planar anchors") {
  Matrix anchors(3, 2);
  anchors.at(0, 0) = 1.0;
  anchors.at(1, 1) = 1.0;
  anchors.at(2, 0) = -1.0;
  CHECK(angle_loss(anchors).value == doctest::Approx(-M_PI / 2).epsilon(1e-12));
}

TEST_CASE("angle_loss identical anchors collapse to about zero") {
  Matrix anchors(2, 3);
  anchors.set_row(0, {0.5, 0.5, 0.1});
  anchors.set_row(1, {0.5, 0.5, 0.1});
  double value = angle_loss(anchors).value;
  CHECK(std::fabs(value) <= std::sqrt(2.0 * kArccosClampEps) * (1.0 + 1e-6));
}

TEST_CASE("angle_loss matches oracle on random anchor sets") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t s = 2 + rng.below(5), d = 2 + rng.below(15);
    Matrix anchors = oracle::random_safe_anchors(s, d, rng);
    CHECK(std::fabs(angle_loss(anchors).value - oracle::angle_loss(anchors)) <= 1e-9);
  }
}

TEST_CASE("angle_loss gradient matches finite differences away from ties") {
  Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t s = 2 + rng.below(4), d = 3 + rng.below(6);
    Matrix anchors = oracle::random_safe_anchors(s, d, rng);
    AngleLossResult res = angle_loss(anchors);
    auto f = [&](const Vector& flat) {
      Matrix probe = anchors;
      probe.data = flat;
      return angle_loss(probe).value;
    };
    GradCheckReport report = grad_check(f, anchors.data, res.grad_anchors.data, 1e-5, 1e-4);
    CHECK_MESSAGE(report.pass, "trial ", trial, " max_rel_err ", report.max_rel_err);
  }
}

TEST_CASE("angle_loss is invariant under joint orthogonal rotation") {
  Rng rng(23);
  std::size_t s = 4, d = 5;
  Matrix anchors = oracle::random_safe_anchors(s, d, rng);
  double base = angle_loss(anchors).value;

  // Gram-Schmidt on a random matrix gives the rotation.
  std::vector<Vector> q;
  while (q.size() < d) {
    Vector v(d);
    for (double& x : v) x = rng.uniform(-1, 1);
    for (const auto& u : q) {
      double proj = dot(v, u);
      for (std::size_t i = 0; i < d; ++i) v[i] -= proj * u[i];
    }
    double n = norm(v);
    if (n < 1e-6) continue;
    for (double& x : v) x /= n;
    q.push_back(v);
  }
  Matrix rotated(s, d);
  for (std::size_t r = 0; r < s; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += anchors.at(r, k) * q[c][k];
      rotated.at(r, c) = acc;
    }
  }
  CHECK(std::fabs(angle_loss(rotated).value - base) <= 1e-9);
}

TEST_CASE("angle_loss decreases when the closest pair is pulled apart") {
  auto planar = [](double deg0, double deg1, double deg2) {
    Matrix m(3, 2);
    for (std::size_t i = 0; i < 3; ++i) {
      double rad = (i == 0 ? deg0 : i == 1 ? deg1 : deg2) * M_PI / 180.0;
      m.at(i, 0) = std::cos(rad);
      m.at(i, 1) = std::sin(rad);
    }
    return m;
  };
  double before = angle_loss(planar(0.0, 30.0, 150.0)).value;
  double after = angle_loss(planar(0.0, 40.0, 150.0)).value;
  CHECK(after < before);
}

TEST_CASE("angle_loss rejects zero-norm anchors") {
  Matrix anchors(2, 3);
  anchors.set_row(0, {1.0, 0.0, 0.0});
  CHECK_THROWS_AS(angle_loss(anchors), NumericError);
}

TEST_CASE("stage_one_loss composes the three terms by the configured weights") {
  Rng rng(24);
  ContrastiveBatch batch = random_batch(rng, 5, 3, 6, 0.1);
  Matrix anchors(3, 6);
  for (std::size_t c = 0; c < 3; ++c) anchors.set_row(c, batch.v.row(5 + c));
  Matrix logits = oracle::random_matrix(5, 3, rng);
  std::vector<int> labels(batch.labels.begin(), batch.labels.begin() + 5);

  double sup = sup_loss(batch).value;
  double angle = angle_loss(anchors).value;
  double ce = ce_loss(logits, labels).value;

  StageOneLossResult res = stage_one_loss(batch, logits, labels, 0.9, 0.01, anchors);
  CHECK(res.value == doctest::Approx(0.9 * sup + 0.009 * angle + 0.1 * ce).epsilon(1e-12));

  StageOneLossResult sup_only = stage_one_loss(batch, logits, labels, 1.0, 0.0, anchors);
  CHECK(sup_only.value == doctest::Approx(sup).epsilon(1e-12));
  for (double g : sup_only.grad_logits.data) CHECK(g == 0.0);

  StageOneLossResult ce_only = stage_one_loss(batch, logits, labels, 0.0, 0.0, anchors);
  CHECK(ce_only.value == doctest::Approx(ce).epsilon(1e-12));
  for (double g : ce_only.grad_v.data) CHECK(g == 0.0);
}

TEST_CASE("stage_one_loss merged gradients match finite differences") {
  Rng rng(25);
  std::size_t b = 4, s = 3, d = 5;
  Matrix reps = oracle::random_matrix(b, d, rng);
  Matrix anchors = oracle::random_safe_anchors(s, d, rng);
  std::vector<int> labels = {0, 1, 2, 0};
  Matrix logits = oracle::random_matrix(b, s, rng);
  ContrastiveBatch batch = make_contrastive_batch(reps, labels, anchors, 0.15);

  StageOneLossResult res = stage_one_loss(batch, logits, labels, 0.9, 0.01, anchors);

  // Joint check over all rows of V; anchor rows feed both the
  // contrastive and the angle term.
  auto fv = [&](const Vector& flat) {
    Matrix v = batch.v;
    v.data = flat;
    Matrix probe_reps(b, d), probe_anchors(s, d);
    for (std::size_t i = 0; i < b; ++i) probe_reps.set_row(i, v.row(i));
    for (std::size_t c = 0; c < s; ++c) probe_anchors.set_row(c, v.row(b + c));
    ContrastiveBatch probe = make_contrastive_batch(probe_reps, labels, probe_anchors, 0.15);
    return stage_one_loss(probe, logits, labels, 0.9, 0.01, probe_anchors).value;
  };
  CHECK(grad_check(fv, batch.v.data, res.grad_v.data, 1e-5, 1e-4).pass);

  auto fl = [&](const Vector& flat) {
    Matrix probe = logits;
    probe.data = flat;
    return stage_one_loss(batch, probe, labels, 0.9, 0.01, anchors).value;
  };
  CHECK(grad_check(fl, logits.data, res.grad_logits.data, 1e-5, 1e-4).pass);
}

TEST_CASE("ada_loss aligned representation spot value") {
  // cos(r, a_true) = 1, cos(r, others) = 0, tau = 0.1.
  Matrix reps(1, 3);
  reps.set_row(0, {2.0, 0.0, 0.0});
  Matrix anchors(3, 3);
  anchors.set_row(0, {0.5, 0.0, 0.0});
  anchors.set_row(1, {0.0, 1.0, 0.0});
  anchors.set_row(2, {0.0, 0.0, 3.0});
  AdaLossResult res = ada_loss(reps, anchors, {0}, 0.1);
  double expected = std::log1p(2.0 * std::exp(-10.0));
  CHECK(res.value == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("ada_loss equidistant anchors give ln s") {
  Matrix reps(1, 4);
  reps.set_row(0, {1.0, 1.0, 1.0, 0.0});
  Matrix anchors(3, 4);
  anchors.at(0, 0) = 1.0;
  anchors.at(1, 1) = 1.0;
  anchors.at(2, 2) = 1.0;
  CHECK(ada_loss(reps, anchors, {1}, 0.1).value == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("ada_loss matches oracle and anchor gradients pass finite differences") {
  Rng rng(26);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t b = 1 + rng.below(6), s = 2 + rng.below(5), d = 2 + rng.below(10);
    Matrix reps = oracle::random_matrix(b, d, rng);
    Matrix anchors = oracle::random_matrix(s, d, rng);
    std::vector<int> labels = oracle::random_labels(b, s, rng);
    double tau = 0.1 + rng.uniform() * 0.4;
    AdaLossResult res = ada_loss(reps, anchors, labels, tau);
    CHECK(std::fabs(res.value - oracle::ada_loss(reps, anchors, labels, tau)) <= 1e-9);
    auto f = [&](const Vector& flat) {
      Matrix probe = anchors;
      probe.data = flat;
      return ada_loss(reps, probe, labels, tau).value;
    };
    GradCheckReport report = grad_check(f, anchors.data, res.grad_anchors.data, 1e-5, 1e-4);
    CHECK_MESSAGE(report.pass, "trial ", trial, " max_rel_err ", report.max_rel_err);
  }
}

TEST_CASE("ada_loss is invariant under positive rescaling of a single row") {
  Rng rng(27);
  Matrix reps = oracle::random_matrix(4, 5, rng);
  Matrix anchors = oracle::random_matrix(3, 5, rng);
  std::vector<int> labels = {0, 1, 2, 1};
  double base = ada_loss(reps, anchors, labels, 0.1).value;
  Matrix scaled = anchors;
  for (std::size_t c = 0; c < 5; ++c) scaled.at(1, c) *= 250.0;
  CHECK(std::fabs(ada_loss(reps, scaled, labels, 0.1).value - base) <= 1e-7);
}

TEST_CASE("ada_loss errors") {
  Matrix reps(1, 3);
  reps.set_row(0, {1, 0, 0});
  Matrix anchors(2, 3);
  anchors.set_row(0, {0, 1, 0});
  anchors.set_row(1, {0, 0, 1});
  CHECK_THROWS_AS(ada_loss(reps, anchors, {0}, 0.0), ValidationError);
  CHECK_THROWS_AS(ada_loss(reps, anchors, {2}, 0.1), ValidationError);
  Matrix zero_anchor = anchors;
  zero_anchor.set_row(1, {0, 0, 0});
  CHECK_THROWS_AS(ada_loss(reps, zero_anchor, {0}, 0.1), NumericError);
}
