#include "eacl/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eacl/errors.hpp"

namespace eacl {

namespace {

void check_finite(double value, const char* who) {
  if (!std::isfinite(value)) {
    throw NumericError(std::string(who) + ": non-finite loss value");
  }
}

// Pairwise cosines and the pieces needed to push gradients back through
// them. norms[i] is validated to be non-zero.
struct CosineTable {
  std::size_t n = 0;
  std::vector<double> norms;
  Matrix cos;  // n x n, diagonal = 1
};

CosineTable cosine_table(const Matrix& v, const char* who) {
  CosineTable t;
  t.n = v.rows;
  t.norms.resize(v.rows);
  for (std::size_t i = 0; i < v.rows; ++i) {
    double n2 = 0.0;
    for (std::size_t c = 0; c < v.cols; ++c) n2 += v.at(i, c) * v.at(i, c);
    t.norms[i] = std::sqrt(n2);
    if (t.norms[i] < 1e-12) {
      throw NumericError(std::string(who) + ": zero-norm row " + std::to_string(i));
    }
  }
  t.cos = Matrix(v.rows, v.rows);
  for (std::size_t i = 0; i < v.rows; ++i) {
    t.cos.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < v.rows; ++j) {
      double d = 0.0;
      for (std::size_t c = 0; c < v.cols; ++c) d += v.at(i, c) * v.at(j, c);
      double value = d / (t.norms[i] * t.norms[j]);
      t.cos.at(i, j) = value;
      t.cos.at(j, i) = value;
    }
  }
  return t;
}

// grad += w * d cos(v_i, v_j) / d v_i, accumulated into row i.
void add_cosine_grad(Matrix& grad, const Matrix& v, const CosineTable& t,
                     std::size_t i, std::size_t j, double w) {
  double ni = t.norms[i], nj = t.norms[j];
  double c = t.cos.at(i, j);
  for (std::size_t k = 0; k < v.cols; ++k) {
    grad.at(i, k) += w * (v.at(j, k) / (ni * nj) - c * v.at(i, k) / (ni * ni));
  }
}

double logsumexp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

ContrastiveBatch make_contrastive_batch(const Matrix& representations,
                                        const std::vector<int>& labels,
                                        const Matrix& anchors, double tau) {
  if (representations.rows != labels.size()) {
    throw ValidationError("make_contrastive_batch: label count " +
                          std::to_string(labels.size()) + " vs representation rows " +
                          std::to_string(representations.rows));
  }
  if (representations.cols != anchors.cols) {
    throw ValidationError("make_contrastive_batch: dimension mismatch between representations and anchors");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= anchors.rows) {
      throw ValidationError("make_contrastive_batch: label " + std::to_string(y) + " out of range");
    }
  }
  ContrastiveBatch batch;
  batch.utterance_rows = representations.rows;
  batch.class_count = anchors.rows;
  batch.tau = tau;
  batch.v = Matrix(representations.rows + anchors.rows, anchors.cols);
  std::copy(representations.data.begin(), representations.data.end(), batch.v.data.begin());
  std::copy(anchors.data.begin(), anchors.data.end(),
            batch.v.data.begin() + static_cast<std::ptrdiff_t>(representations.data.size()));
  batch.labels = labels;
  for (std::size_t c = 0; c < anchors.rows; ++c) {
    batch.labels.push_back(static_cast<int>(c));
  }
  return batch;
}

SupLossResult sup_loss(const ContrastiveBatch& batch, SupconVariant variant) {
  if (batch.tau <= 0.0) throw ValidationError("sup_loss: temperature must be positive");
  const Matrix& v = batch.v;
  const std::size_t n = v.rows;
  if (batch.labels.size() != n) throw ValidationError("sup_loss: label count mismatch");

  CosineTable table = cosine_table(v, "sup_loss");
  const double inv_tau = 1.0 / batch.tau;

  SupLossResult res;
  res.grad_v = Matrix(n, v.cols);

  std::size_t participating = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> positives;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && batch.labels[j] == batch.labels[i]) positives.push_back(j);
    }
    if (positives.empty()) {
      ++res.skipped_rows;
      continue;
    }
    ++participating;

    std::vector<double> c_all(n), c_pos;
    for (std::size_t j = 0; j < n; ++j) c_all[j] = table.cos.at(i, j) * inv_tau;
    c_pos.reserve(positives.size());
    for (std::size_t j : positives) c_pos.push_back(c_all[j]);

    if (variant == SupconVariant::literal) {
      // -log( sum_pos e^c / (|P| * sum_all e^c) ), self term kept in the
      // denominator; c_ii is constant so it carries no gradient.
      double lse_all = logsumexp(c_all);
      double lse_pos = logsumexp(c_pos);
      res.value += std::log(static_cast<double>(positives.size())) + lse_all - lse_pos;

      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double w = std::exp(c_all[j] - lse_all);
        if (batch.labels[j] == batch.labels[i]) w -= std::exp(c_all[j] - lse_pos);
        w *= inv_tau;
        add_cosine_grad(res.grad_v, v, table, i, j, w);
        add_cosine_grad(res.grad_v, v, table, j, i, w);
      }
    } else {
      // -(1/|P|) sum_p log( e^{c_ip} / sum_{a != i} e^{c_ia} )
      std::vector<double> c_others;
      c_others.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) c_others.push_back(c_all[j]);
      }
      double lse_others = logsumexp(c_others);
      double inv_p = 1.0 / static_cast<double>(positives.size());
      for (double cp : c_pos) res.value += inv_p * (lse_others - cp);

      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double w = std::exp(c_all[j] - lse_others);  // from |P| identical denominators
        if (batch.labels[j] == batch.labels[i]) w -= inv_p;
        w *= inv_tau;
        add_cosine_grad(res.grad_v, v, table, i, j, w);
        add_cosine_grad(res.grad_v, v, table, j, i, w);
      }
    }
  }
  if (participating == 0) {
    throw ValidationError("sup_loss: every row has an empty positive set");
  }
  check_finite(res.value, "sup_loss");
  return res;
}

CeLossResult ce_loss(const Matrix& logits, const std::vector<int>& labels) {
  const std::size_t b = logits.rows, s = logits.cols;
  if (b == 0) throw ValidationError("ce_loss: empty batch");
  if (labels.size() != b) throw ValidationError("ce_loss: label count mismatch");

  CeLossResult res;
  res.grad_logits = Matrix(b, s);
  const double inv_b = 1.0 / static_cast<double>(b);
  for (std::size_t i = 0; i < b; ++i) {
    int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= s) {
      throw ValidationError("ce_loss: label " + std::to_string(y) + " out of range for " +
                            std::to_string(s) + " classes");
    }
    double m = logits.at(i, 0);
    for (std::size_t j = 1; j < s; ++j) m = std::max(m, logits.at(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < s; ++j) z += std::exp(logits.at(i, j) - m);
    double log_z = m + std::log(z);
    res.value += inv_b * (log_z - logits.at(i, static_cast<std::size_t>(y)));
    for (std::size_t j = 0; j < s; ++j) {
      double p = std::exp(logits.at(i, j) - log_z);
      res.grad_logits.at(i, j) = inv_b * (p - (static_cast<std::size_t>(y) == j ? 1.0 : 0.0));
    }
  }
  check_finite(res.value, "ce_loss");
  return res;
}

AngleLossResult angle_loss(const Matrix& anchors) {
  const std::size_t s = anchors.rows;
  if (s < 2) throw ValidationError("angle_loss: need at least 2 anchors");
  CosineTable table = cosine_table(anchors, "angle_loss");

  AngleLossResult res;
  res.grad_anchors = Matrix(s, anchors.cols);
  const double inv_s = 1.0 / static_cast<double>(s);
  for (std::size_t i = 0; i < s; ++i) {
    std::size_t best_j = s;
    double best_angle = std::numeric_limits<double>::infinity();
    double best_dangle_dcos = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      if (j == i) continue;
      ArccosResult a = arccos_safe(table.cos.at(i, j));
      if (a.angle < best_angle) {  // strict: angle ties keep the lowest j
        best_angle = a.angle;
        best_j = j;
        best_dangle_dcos = a.grad;
      }
    }
    res.value -= inv_s * best_angle;
    double w = -inv_s * best_dangle_dcos;
    add_cosine_grad(res.grad_anchors, anchors, table, i, best_j, w);
    add_cosine_grad(res.grad_anchors, anchors, table, best_j, i, w);
  }
  check_finite(res.value, "angle_loss");
  return res;
}

StageOneLossResult stage_one_loss(const ContrastiveBatch& batch,
                                  const Matrix& logits,
                                  const std::vector<int>& labels,
                                  double lambda1, double lambda2,
                                  const Matrix& anchors,
                                  SupconVariant variant) {
  if (lambda1 < 0.0 || lambda1 > 1.0) throw ValidationError("stage_one_loss: lambda1 must be in [0,1]");
  if (lambda2 < 0.0) throw ValidationError("stage_one_loss: lambda2 must be non-negative");
  if (anchors.rows != batch.class_count) {
    throw ValidationError("stage_one_loss: anchor count does not match batch classes");
  }

  SupLossResult sup = sup_loss(batch, variant);
  AngleLossResult angle = angle_loss(anchors);
  CeLossResult ce = ce_loss(logits, labels);

  StageOneLossResult res;
  res.sup_value = sup.value;
  res.angle_value = angle.value;
  res.ce_value = ce.value;
  res.skipped_rows = sup.skipped_rows;
  res.value = lambda1 * (sup.value + lambda2 * angle.value) + (1.0 - lambda1) * ce.value;

  res.grad_v = std::move(sup.grad_v);
  for (double& g : res.grad_v.data) g *= lambda1;
  const std::size_t b = batch.utterance_rows;
  for (std::size_t c = 0; c < batch.class_count; ++c) {
    for (std::size_t k = 0; k < res.grad_v.cols; ++k) {
      res.grad_v.at(b + c, k) += lambda1 * lambda2 * angle.grad_anchors.at(c, k);
    }
  }
  res.grad_logits = std::move(ce.grad_logits);
  for (double& g : res.grad_logits.data) g *= (1.0 - lambda1);
  check_finite(res.value, "stage_one_loss");
  return res;
}

AdaLossResult ada_loss(const Matrix& representations, const Matrix& anchors,
                       const std::vector<int>& labels, double tau) {
  if (tau <= 0.0) throw ValidationError("ada_loss: temperature must be positive");
  const std::size_t b = representations.rows, s = anchors.rows;
  if (b == 0) throw ValidationError("ada_loss: empty batch");
  if (labels.size() != b) throw ValidationError("ada_loss: label count mismatch");
  if (representations.cols != anchors.cols) {
    throw ValidationError("ada_loss: dimension mismatch between representations and anchors");
  }

  std::vector<double> rep_norm(b), anc_norm(s);
  for (std::size_t i = 0; i < b; ++i) {
    Vector r = representations.row(i);
    rep_norm[i] = norm(r);
    if (rep_norm[i] < 1e-12) throw NumericError("ada_loss: zero-norm representation row");
  }
  for (std::size_t j = 0; j < s; ++j) {
    Vector a = anchors.row(j);
    anc_norm[j] = norm(a);
    if (anc_norm[j] < 1e-12) throw NumericError("ada_loss: zero-norm anchor row");
  }

  AdaLossResult res;
  res.grad_anchors = Matrix(s, anchors.cols);
  const double inv_b = 1.0 / static_cast<double>(b);
  const double inv_tau = 1.0 / tau;
  Matrix cos(b, s);
  for (std::size_t i = 0; i < b; ++i) {
    int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= s) {
      throw ValidationError("ada_loss: label " + std::to_string(y) + " out of range");
    }
    std::vector<double> c(s);
    for (std::size_t j = 0; j < s; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < anchors.cols; ++k) {
        d += representations.at(i, k) * anchors.at(j, k);
      }
      cos.at(i, j) = d / (rep_norm[i] * anc_norm[j]);
      c[j] = cos.at(i, j) * inv_tau;
    }
    double log_z = logsumexp(c);
    res.value += inv_b * (log_z - c[static_cast<std::size_t>(y)]);
    for (std::size_t j = 0; j < s; ++j) {
      double p = std::exp(c[j] - log_z);
      double dc = inv_b * (p - (static_cast<std::size_t>(y) == j ? 1.0 : 0.0)) * inv_tau;
      // d cos(r_i, a_j) / d a_j only; representations are frozen.
      for (std::size_t k = 0; k < anchors.cols; ++k) {
        res.grad_anchors.at(j, k) += dc * (representations.at(i, k) / (rep_norm[i] * anc_norm[j]) -
                                           cos.at(i, j) * anchors.at(j, k) / (anc_norm[j] * anc_norm[j]));
      }
    }
  }
  check_finite(res.value, "ada_loss");
  return res;
}

}  // namespace eacl
