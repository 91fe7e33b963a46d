#ifndef EACL_METRICS_HPP_
#define EACL_METRICS_HPP_

#include <string>
#include <vector>

#include "eacl/diffmath.hpp"
#include "eacl/encoder.hpp"

namespace eacl {

struct EvalReport {
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;  // unweighted mean over all classes
  std::vector<double> per_class_f1;
  std::vector<std::size_t> support;
  Matrix confusion;  // row-normalized by true class; zero-support rows stay zero
};

// Standard per-class precision/recall/F1 with the 0/0 -> 0 convention.
EvalReport evaluate(const std::vector<int>& gold, const std::vector<int>& pred,
                    std::size_t s);

std::string eval_report_to_json(const EvalReport& report);

struct AnchorGeometry {
  Matrix cosine;     // s x s, unit diagonal
  Matrix angle_deg;  // degrees, matching the reporting convention
  double min_angle_deg = 0.0;  // over off-diagonal pairs
};

AnchorGeometry anchor_geometry(const Matrix& anchors);

std::string anchor_geometry_to_json(const AnchorGeometry& g);

// Tabular export of representations plus anchors for external projection
// tools. Header "dim=<d> classes=<s>", then per row:
// role,class_id,v_1..v_d with 9 significant digits.
void export_embeddings(const ModelState& state,
                       const std::vector<EncodedSample>& samples,
                       const std::string& path);

struct EmbeddingRow {
  std::string role;  // "utterance" or "anchor"
  int class_id = 0;
  Vector values;
};

struct EmbeddingFile {
  std::size_t dim = 0;
  std::size_t classes = 0;
  std::vector<EmbeddingRow> rows;
};

EmbeddingFile parse_embeddings(const std::string& path);

}  // namespace eacl

#endif  // EACL_METRICS_HPP_
