#ifndef EACL_TESTS_ORACLES_HPP_
#define EACL_TESTS_ORACLES_HPP_

// Brute-force reference implementations of every training objective,
// written as plain double loops with no shared code with the library
// implementations they check.

#include <cmath>
#include <vector>

#include "eacl/diffmath.hpp"
#include "eacl/losses.hpp"

namespace eacl::oracle {

inline double cos_rows(const Matrix& m, std::size_t i, std::size_t j) {
  double d = 0.0, ni = 0.0, nj = 0.0;
  for (std::size_t c = 0; c < m.cols; ++c) {
    d += m.at(i, c) * m.at(j, c);
    ni += m.at(i, c) * m.at(i, c);
    nj += m.at(j, c) * m.at(j, c);
  }
  return d / (std::sqrt(ni) * std::sqrt(nj));
}

// Literal form: term_i = -log( sum_pos e^c / (|P_i| * sum_all e^c) ),
// the denominator ranging over every row including i itself. Rows with
// no positives contribute nothing.
inline double sup_loss_literal(const Matrix& v, const std::vector<int>& labels,
                               double tau) {
  double total = 0.0;
  for (std::size_t i = 0; i < v.rows; ++i) {
    double sum_pos = 0.0, sum_all = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t j = 0; j < v.rows; ++j) {
      double e = std::exp(cos_rows(v, i, j) / tau);
      sum_all += e;
      if (j != i && labels[j] == labels[i]) {
        sum_pos += e;
        ++n_pos;
      }
    }
    if (n_pos == 0) continue;
    total += -std::log(sum_pos / (static_cast<double>(n_pos) * sum_all));
  }
  return total;
}

// Conventional SupCon: mean over positives of -log(e^c_p / sum_{a != i} e^c_a).
inline double sup_loss_conventional(const Matrix& v, const std::vector<int>& labels,
                                    double tau) {
  double total = 0.0;
  for (std::size_t i = 0; i < v.rows; ++i) {
    double sum_others = 0.0;
    std::vector<double> pos;
    for (std::size_t j = 0; j < v.rows; ++j) {
      if (j == i) continue;
      double e = std::exp(cos_rows(v, i, j) / tau);
      sum_others += e;
      if (labels[j] == labels[i]) pos.push_back(e);
    }
    if (pos.empty()) continue;
    double term = 0.0;
    for (double e : pos) term += -std::log(e / sum_others);
    total += term / static_cast<double>(pos.size());
  }
  return total;
}

inline double ce_loss(const Matrix& logits, const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < logits.rows; ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < logits.cols; ++j) z += std::exp(logits.at(i, j));
    double p = std::exp(logits.at(i, static_cast<std::size_t>(labels[i]))) / z;
    total += -std::log(p);
  }
  return total / static_cast<double>(logits.rows);
}

inline double clamped_angle(double c) {
  const double eps = 1e-7;
  if (c > 1.0 - eps) c = 1.0 - eps;
  if (c < -1.0 + eps) c = -1.0 + eps;
  return std::acos(c);
}

inline double angle_loss(const Matrix& anchors) {
  double total = 0.0;
  for (std::size_t i = 0; i < anchors.rows; ++i) {
    double min_angle = 1e300;
    for (std::size_t j = 0; j < anchors.rows; ++j) {
      if (j == i) continue;
      min_angle = std::min(min_angle, clamped_angle(cos_rows(anchors, i, j)));
    }
    total += min_angle;
  }
  return -total / static_cast<double>(anchors.rows);
}

inline double ada_loss(const Matrix& reps, const Matrix& anchors,
                       const std::vector<int>& labels, double tau) {
  double total = 0.0;
  for (std::size_t i = 0; i < reps.rows; ++i) {
    double z = 0.0, num = 0.0;
    for (std::size_t j = 0; j < anchors.rows; ++j) {
      double d = 0.0, nr = 0.0, na = 0.0;
      for (std::size_t c = 0; c < reps.cols; ++c) {
        d += reps.at(i, c) * anchors.at(j, c);
        nr += reps.at(i, c) * reps.at(i, c);
        na += anchors.at(j, c) * anchors.at(j, c);
      }
      double e = std::exp(d / (std::sqrt(nr) * std::sqrt(na)) / tau);
      z += e;
      if (static_cast<std::size_t>(labels[i]) == j) num = e;
    }
    total += -std::log(num / z);
  }
  return total / static_cast<double>(reps.rows);
}

// Random instance helpers shared by unit and acceptance suites.

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng,
                            double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& x : m.data) x = rng.uniform(lo, hi);
  return m;
}

// Anchor sets whose pairwise cosines stay away from +-1 and whose
// per-anchor min-angle gaps are wide enough that finite differences do
// not flip the arg-min.
inline Matrix random_safe_anchors(std::size_t s, std::size_t d, Rng& rng) {
  for (;;) {
    Matrix m = random_matrix(s, d, rng);
    bool ok = true;
    for (std::size_t i = 0; i < s && ok; ++i) {
      std::vector<double> angles;
      for (std::size_t j = 0; j < s; ++j) {
        if (j == i) continue;
        double c = cos_rows(m, i, j);
        if (std::fabs(c) > 0.95) ok = false;
        angles.push_back(clamped_angle(c));
      }
      std::sort(angles.begin(), angles.end());
      if (angles.size() >= 2 && angles[1] - angles[0] < 1e-3) ok = false;
    }
    if (ok) return m;
  }
}

inline std::vector<int> random_labels(std::size_t n, std::size_t s, Rng& rng) {
  std::vector<int> labels(n);
  for (auto& y : labels) y = static_cast<int>(rng.below(s));
  return labels;
}

}  // namespace eacl::oracle

#endif  // EACL_TESTS_ORACLES_HPP_
