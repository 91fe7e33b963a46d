#include "eacl/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eacl/errors.hpp"

namespace eacl {

EvalReport evaluate(const std::vector<int>& gold, const std::vector<int>& pred,
                    std::size_t s) {
  if (gold.empty()) throw ValidationError("evaluate: empty label vectors");
  if (gold.size() != pred.size()) {
    throw ValidationError("evaluate: gold/pred length mismatch " +
                          std::to_string(gold.size()) + " vs " + std::to_string(pred.size()));
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto in_range = [s](int y) { return y >= 0 && static_cast<std::size_t>(y) < s; };
    if (!in_range(gold[i]) || !in_range(pred[i])) {
      throw ValidationError("evaluate: label out of range at index " + std::to_string(i));
    }
  }

  Matrix counts(s, s);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    counts.at(static_cast<std::size_t>(gold[i]), static_cast<std::size_t>(pred[i])) += 1.0;
  }

  EvalReport report;
  report.per_class_f1.assign(s, 0.0);
  report.support.assign(s, 0);
  report.confusion = Matrix(s, s);

  double weighted_sum = 0.0, macro_sum = 0.0;
  for (std::size_t c = 0; c < s; ++c) {
    double tp = counts.at(c, c);
    double fn = 0.0, fp = 0.0, row_total = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      row_total += counts.at(c, j);
      if (j != c) {
        fn += counts.at(c, j);
        fp += counts.at(j, c);
      }
    }
    double precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
    double recall = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
    double f1 = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    report.per_class_f1[c] = f1;
    report.support[c] = static_cast<std::size_t>(row_total);
    weighted_sum += row_total * f1;
    macro_sum += f1;
    if (row_total > 0.0) {
      for (std::size_t j = 0; j < s; ++j) report.confusion.at(c, j) = counts.at(c, j) / row_total;
    }
  }
  report.weighted_f1 = weighted_sum / static_cast<double>(gold.size());
  report.macro_f1 = macro_sum / static_cast<double>(s);
  return report;
}

namespace {

using nlohmann::json;

json matrix_rows(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string eval_report_to_json(const EvalReport& report) {
  json doc;
  doc["weighted_f1"] = report.weighted_f1;
  doc["macro_f1"] = report.macro_f1;
  doc["per_class_f1"] = report.per_class_f1;
  doc["support"] = report.support;
  doc["confusion"] = matrix_rows(report.confusion);
  return doc.dump(1);
}

AnchorGeometry anchor_geometry(const Matrix& anchors) {
  const std::size_t s = anchors.rows;
  if (s < 2) throw ValidationError("anchor_geometry: need at least 2 anchors");
  std::vector<double> norms(s);
  for (std::size_t i = 0; i < s; ++i) {
    norms[i] = norm(anchors.row(i));
    if (norms[i] < 1e-12) throw NumericError("anchor_geometry: zero-norm anchor row " + std::to_string(i));
  }

  AnchorGeometry g;
  g.cosine = Matrix(s, s);
  g.angle_deg = Matrix(s, s);
  g.min_angle_deg = 180.0;
  constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;
  for (std::size_t i = 0; i < s; ++i) {
    g.cosine.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < s; ++j) {
      double c = dot(anchors.row(i), anchors.row(j)) / (norms[i] * norms[j]);
      double angle = arccos_safe(c).angle * kRadToDeg;
      g.cosine.at(i, j) = c;
      g.cosine.at(j, i) = c;
      g.angle_deg.at(i, j) = angle;
      g.angle_deg.at(j, i) = angle;
      g.min_angle_deg = std::min(g.min_angle_deg, angle);
    }
  }
  return g;
}

std::string anchor_geometry_to_json(const AnchorGeometry& g) {
  json doc;
  doc["cosine"] = matrix_rows(g.cosine);
  doc["angle_deg"] = matrix_rows(g.angle_deg);
  doc["min_angle_deg"] = g.min_angle_deg;
  return doc.dump(1);
}

void export_embeddings(const ModelState& state,
                       const std::vector<EncodedSample>& samples,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write embeddings: " + path);

  Matrix r = represent(state, samples);
  Matrix anchors = current_anchors(state);

  out << "dim=" << state.hidden_dim << " classes=" << state.class_count << "\n";
  char buf[32];
  auto write_row = [&](const char* role, int cls, const Matrix& m, std::size_t row) {
    out << role << ',' << cls;
    for (std::size_t c = 0; c < m.cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.9g", m.at(row, c));
      out << ',' << buf;
    }
    out << "\n";
  };
  for (std::size_t i = 0; i < samples.size(); ++i) {
    write_row("utterance", samples[i].label, r, i);
  }
  for (std::size_t c = 0; c < state.class_count; ++c) {
    write_row("anchor", static_cast<int>(c), anchors, c);
  }
}

EmbeddingFile parse_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings: " + path);
  EmbeddingFile file;
  std::string header;
  if (!std::getline(in, header)) throw DataError("embeddings: missing header");
  if (std::sscanf(header.c_str(), "dim=%zu classes=%zu", &file.dim, &file.classes) != 2) {
    throw DataError("embeddings: malformed header \"" + header + "\"");
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    EmbeddingRow r;
    std::string field;
    if (!std::getline(row, r.role, ',')) throw DataError("embeddings: bad row");
    if (!std::getline(row, field, ',')) throw DataError("embeddings: bad row");
    r.class_id = std::stoi(field);
    while (std::getline(row, field, ',')) r.values.push_back(std::stod(field));
    if (r.values.size() != file.dim) throw DataError("embeddings: row width does not match header");
    file.rows.push_back(std::move(r));
  }
  return file;
}

}  // namespace eacl
