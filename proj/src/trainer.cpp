#include "eacl/trainer.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "eacl/errors.hpp"
#include "eacl/losses.hpp"
#include "eacl/metrics.hpp"

namespace eacl {

std::string epoch_record_to_json(const EpochRecord& rec) {
  nlohmann::json doc;
  doc["stage"] = rec.stage;
  doc["epoch"] = rec.epoch;
  if (rec.stage == 1) {
    doc["total"] = rec.total;
    doc["sup"] = rec.sup;
    doc["angle"] = rec.angle;
    doc["ce"] = rec.ce;
    doc["skipped_rows"] = rec.skipped_rows;
  } else {
    doc["ada"] = rec.ada;
  }
  doc["min_angle_deg"] = rec.min_angle_deg;
  doc["dev_f1"] = rec.dev_f1;
  doc["selected"] = rec.selected;
  return doc.dump();
}

std::vector<int> sample_labels(const std::vector<EncodedSample>& samples) {
  std::vector<int> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) labels.push_back(s.label);
  return labels;
}

std::vector<int> predict_from_representations(const Matrix& representations,
                                              const Matrix& anchors) {
  std::vector<int> pred(representations.rows, 0);
  for (std::size_t i = 0; i < representations.rows; ++i) {
    Vector r = representations.row(i);
    int best = 0;
    double best_sim = cosine_value(r, anchors.row(0));
    for (std::size_t j = 1; j < anchors.rows; ++j) {
      double sim = cosine_value(r, anchors.row(j));
      if (sim > best_sim) {  // strict: ties keep the lowest class id
        best_sim = sim;
        best = static_cast<int>(j);
      }
    }
    pred[i] = best;
  }
  return pred;
}

std::vector<int> predict(const ModelState& state,
                         const std::vector<EncodedSample>& samples) {
  return predict_from_representations(represent(state, samples), current_anchors(state));
}

namespace {

double dev_weighted_f1(const ModelState& state,
                       const std::vector<EncodedSample>& dev) {
  std::vector<int> pred = predict(state, dev);
  return evaluate(sample_labels(dev), pred, state.class_count).weighted_f1;
}

std::vector<EncodedSample> gather(const std::vector<EncodedSample>& samples,
                                  const std::vector<std::size_t>& order,
                                  std::size_t begin, std::size_t end) {
  std::vector<EncodedSample> out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) out.push_back(samples[order[i]]);
  return out;
}

struct Stage1Snapshot {
  MlpParams encoder, proj_cl, head_ce;
};

}  // namespace

TrainLog train_stage_one(ModelState& state,
                         const std::vector<EncodedSample>& samples,
                         const TrainConfig& config,
                         const std::vector<EncodedSample>& dev_samples) {
  if (state.stage != Stage::one) throw ValidationError("train_stage_one: model is not in stage one");
  validate_config(config);
  if (samples.empty()) throw DataError("train_stage_one: no training samples");

  // Ablations that act inside the stage-one objective.
  const double lambda1 = config.ablation == Ablation::no_ce ? 1.0 : config.lambda1;
  const double lambda2 = config.ablation == Ablation::no_angle ? 0.0 : config.lambda2;

  const std::vector<EncodedSample>& selection = dev_samples.empty() ? samples : dev_samples;

  TrainLog log;
  Rng shuffle_rng(derive_seed(config.seed, "stage1_shuffle"));
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Stage1Snapshot best;
  double best_f1 = -1.0;
  std::size_t best_epoch = 0;

  for (std::size_t epoch = 1; epoch <= config.stage1_epochs; ++epoch) {
    shuffle_rng.shuffle(order);

    double sum_total = 0.0, sum_sup = 0.0, sum_angle = 0.0, sum_ce = 0.0;
    std::size_t skipped = 0, batches = 0;

    for (std::size_t start = 0; start < samples.size(); start += config.batch_size) {
      std::size_t end = std::min(samples.size(), start + config.batch_size);
      std::vector<EncodedSample> batch = gather(samples, order, start, end);
      std::vector<int> labels = sample_labels(batch);

      EncodeResult enc = encode_batch(state, batch);
      AnchorForward anc = current_anchors_cached(state);
      LogitsResult logit = ce_logits(state, batch);

      ContrastiveBatch cbatch = make_contrastive_batch(enc.r, labels, anc.anchors, config.tau);
      StageOneLossResult loss = stage_one_loss(cbatch, logit.logits, labels, lambda1,
                                               lambda2, anc.anchors, config.supcon_variant);

      MlpGrad enc_grad = zero_grad_like(state.encoder);
      MlpGrad proj_grad = zero_grad_like(state.proj_cl);
      MlpGrad head_grad = zero_grad_like(state.head_ce);
      for (std::size_t i = 0; i < batch.size(); ++i) {
        Vector dz_proj = mlp_backward(state.proj_cl, enc.proj_caches[i],
                                      loss.grad_v.row(i), proj_grad);
        Vector dz_head = mlp_backward(state.head_ce, logit.head_caches[i],
                                      loss.grad_logits.row(i), head_grad);
        for (std::size_t j = 0; j < dz_proj.size(); ++j) dz_proj[j] += dz_head[j];
        mlp_backward(state.encoder, enc.encoder_caches[i], dz_proj, enc_grad);
      }
      // Anchor rows reach proj_cl only; anchor_hidden stays frozen.
      for (std::size_t c = 0; c < state.class_count; ++c) {
        mlp_backward(state.proj_cl, anc.proj_caches[c],
                     loss.grad_v.row(batch.size() + c), proj_grad);
      }

      sgd_step(state.encoder, enc_grad, config.learning_rate);
      sgd_step(state.proj_cl, proj_grad, config.learning_rate);
      sgd_step(state.head_ce, head_grad, config.learning_rate);

      sum_total += loss.value;
      sum_sup += loss.sup_value;
      sum_angle += loss.angle_value;
      sum_ce += loss.ce_value;
      skipped += loss.skipped_rows;
      ++batches;
    }

    EpochRecord rec;
    rec.stage = 1;
    rec.epoch = epoch;
    rec.total = sum_total / static_cast<double>(batches);
    rec.sup = sum_sup / static_cast<double>(batches);
    rec.angle = sum_angle / static_cast<double>(batches);
    rec.ce = sum_ce / static_cast<double>(batches);
    rec.skipped_rows = skipped;
    rec.min_angle_deg = anchor_geometry(current_anchors(state)).min_angle_deg;
    rec.dev_f1 = dev_weighted_f1(state, selection);
    log.push_back(rec);

    if (rec.dev_f1 > best_f1) {
      best_f1 = rec.dev_f1;
      best_epoch = epoch;
      best.encoder = state.encoder;
      best.proj_cl = state.proj_cl;
      best.head_ce = state.head_ce;
    }
  }

  if (best_epoch > 0) {
    state.encoder = best.encoder;
    state.proj_cl = best.proj_cl;
    state.head_ce = best.head_ce;
    log[best_epoch - 1].selected = true;
  }
  return log;
}

void enter_stage_two(ModelState& state, const TrainConfig& config,
                     const Matrix& train_representations,
                     const std::vector<int>& train_labels) {
  if (state.stage != Stage::one) {
    throw ValidationError("enter_stage_two: model is not in stage one");
  }
  Matrix inherited = current_anchors(state);

  switch (config.ablation) {
    case Ablation::no_inherit: {
      Rng rng(derive_seed(config.seed, "anchor_reinit"));
      double bound = 1.0 / std::sqrt(static_cast<double>(state.hidden_dim));
      state.anchors = Matrix(state.class_count, state.hidden_dim);
      for (double& x : state.anchors.data) x = rng.uniform(-bound, bound);
      break;
    }
    case Ablation::center_anchors: {
      if (train_representations.rows != train_labels.size()) {
        throw ValidationError("enter_stage_two: representation/label count mismatch");
      }
      state.anchors = inherited;  // classes without support keep their anchor
      std::vector<std::size_t> counts(state.class_count, 0);
      Matrix sums(state.class_count, state.hidden_dim);
      for (std::size_t i = 0; i < train_representations.rows; ++i) {
        auto c = static_cast<std::size_t>(train_labels[i]);
        counts[c] += 1;
        for (std::size_t k = 0; k < state.hidden_dim; ++k) {
          sums.at(c, k) += train_representations.at(i, k);
        }
      }
      for (std::size_t c = 0; c < state.class_count; ++c) {
        if (counts[c] == 0) continue;
        for (std::size_t k = 0; k < state.hidden_dim; ++k) {
          state.anchors.at(c, k) = sums.at(c, k) / static_cast<double>(counts[c]);
        }
      }
      break;
    }
    default:
      state.anchors = inherited;
      break;
  }
  state.stage = Stage::two;
}

TrainLog train_stage_two(ModelState& state,
                         const std::vector<EncodedSample>& samples,
                         const TrainConfig& config,
                         const std::vector<EncodedSample>& dev_samples) {
  if (state.stage != Stage::two) throw ValidationError("train_stage_two: model is not in stage two");
  if (config.ablation == Ablation::no_adapt) {
    throw ValidationError("train_stage_two: adaptation is disabled under no_adapt");
  }
  validate_config(config);
  if (samples.empty()) throw DataError("train_stage_two: no training samples");

  // Encoder is frozen: compute representations once.
  Matrix reps = represent(state, samples);
  std::vector<int> labels = sample_labels(samples);
  const std::vector<EncodedSample>& selection = dev_samples.empty() ? samples : dev_samples;
  Matrix selection_reps = represent(state, selection);
  std::vector<int> selection_labels = sample_labels(selection);

  TrainLog log;
  // The inherited anchors are a selection candidate too: adaptation is
  // kept only where it does not lose on the selection split.
  Matrix best_anchors = state.anchors;
  double best_f1 = -1.0;
  if (config.stage2_epochs > 0) {
    std::vector<int> pred = predict_from_representations(selection_reps, state.anchors);
    best_f1 = evaluate(selection_labels, pred, state.class_count).weighted_f1;
  }
  std::size_t best_epoch = 0;

  for (std::size_t epoch = 1; epoch <= config.stage2_epochs; ++epoch) {
    AdaLossResult loss = ada_loss(reps, state.anchors, labels, config.tau);
    for (std::size_t i = 0; i < state.anchors.data.size(); ++i) {
      state.anchors.data[i] -= config.learning_rate * loss.grad_anchors.data[i];
    }

    EpochRecord rec;
    rec.stage = 2;
    rec.epoch = epoch;
    rec.ada = loss.value;  // loss on the anchors entering this epoch
    rec.min_angle_deg = anchor_geometry(state.anchors).min_angle_deg;
    std::vector<int> pred = predict_from_representations(selection_reps, state.anchors);
    rec.dev_f1 = evaluate(selection_labels, pred, state.class_count).weighted_f1;
    log.push_back(rec);

    if (rec.dev_f1 > best_f1) {
      best_f1 = rec.dev_f1;
      best_epoch = epoch;
      best_anchors = state.anchors;
    }
  }

  state.anchors = best_anchors;
  if (best_epoch > 0) log[best_epoch - 1].selected = true;
  return log;
}

}  // namespace eacl
