#include "xmvae/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "xmvae/dataset.hpp"
#include "xmvae/error.hpp"
#include "xmvae/metrics.hpp"

namespace xmvae {

PairSet build_pairs(const VariantConfig& v) {
  const std::string& i = v.input;
  const std::string& t = v.target;
  std::vector<ModalityPair> raw;
  switch (v.id) {
    case 1:
      raw = {{i, t}};
      break;
    case 2:
      raw = {{i, t}, {t, t}};
      break;
    case 3:
      raw = {{i, t}, {i, i}};
      break;
    case 4:
      raw = {{i, t}, {i, i}, {t, t}};
      break;
    default:
      throw InvalidArgument("unknown variant id " + std::to_string(v.id));
  }
  PairSet out;
  for (const ModalityPair& p : raw) {
    if (std::find(out.pairs.begin(), out.pairs.end(), p) == out.pairs.end()) {
      out.pairs.push_back(p);
    }
  }
  return out;
}

ModelSet make_models(const PairSet& pairs, const TrainConfig& cfg) {
  ModelSet models;
  models.latent = cfg.latent;
  for (const ModalityPair& p : pairs.pairs) {
    if (!models.encoders.contains(p.encoder)) {
      models.encoders.emplace(
          p.encoder, KeypointEncoder(ModalitySpec::named(p.encoder, cfg.handedness_flag),
                                     cfg.latent, cfg.mlp));
    }
    if (!models.decoders.contains(p.decoder)) {
      models.decoders.emplace(
          p.decoder,
          KeypointDecoder(ModalitySpec::named(p.decoder), cfg.latent, cfg.mlp));
    }
  }
  return models;
}

namespace {

std::vector<Parameter*> pair_parameters(ModelSet& models, const ModalityPair& p) {
  std::vector<Parameter*> params;
  for (Parameter& q : models.encoder(p.encoder).parameters()) params.push_back(&q);
  for (Parameter& q : models.decoder(p.decoder).parameters()) params.push_back(&q);
  return params;
}

LossBreakdown run_batch(ModelSet& models, const ModalityPair& pair,
                        const MatrixDataset& data,
                        std::span<const std::size_t> rows, const TrainConfig& cfg,
                        Rng& noise_rng, std::vector<Parameter*>& params) {
  if (rows.empty()) throw InvalidArgument("train: empty batch");

  const Tensor x_in = ops::gather_rows(data.features.at(pair.encoder), rows);
  const Tensor x_target = ops::gather_rows(data.features.at(pair.decoder), rows);
  const std::optional<Tensor> hand = gather_handedness(data, rows);

  Tape tape;
  KeypointEncoder& enc = models.encoder(pair.encoder);
  KeypointDecoder& dec = models.decoder(pair.decoder);
  ElboOptions opts;
  opts.kl_weight = cfg.kl_weight;
  opts.samples_per_step = cfg.samples_per_step;
  opts.recon = cfg.recon;
  ElboResult elbo = elbo_loss(
      tape, [&](Tape& t) { return enc.encode(t, x_in, hand); },
      [&](Tape& t, Tape::Ref z) { return dec.decode(t, z); }, x_target,
      NoiseSource::from(noise_rng), opts);

  if (!std::isfinite(elbo.losses.total)) {
    throw NumericalError("train: non-finite loss on pair " + pair.label() +
                         " (reconstruction=" + format_real(elbo.losses.reconstruction) +
                         ", kl=" + format_real(elbo.losses.kl) + ")");
  }
  tape.backward(elbo.total);
  adam_step(params, cfg.adam);
  return elbo.losses;
}

}  // namespace

std::vector<PairEpochStats> train_epoch(
    ModelSet& models, const PairSet& pairs, const MatrixDataset& data,
    const std::vector<std::vector<std::size_t>>& rows_per_pair,
    const TrainConfig& cfg, std::size_t epoch) {
  if (pairs.pairs.empty()) throw InvalidArgument("train_epoch: empty pair set");
  if (rows_per_pair.size() != pairs.pairs.size()) {
    throw InvalidArgument("train_epoch: one row set per pair required");
  }
  if (cfg.batch == 0) throw InvalidArgument("train_epoch: batch size must be >= 1");

  std::vector<PairEpochStats> stats;
  stats.reserve(pairs.pairs.size());
  for (std::size_t pi = 0; pi < pairs.pairs.size(); ++pi) {
    const ModalityPair& pair = pairs.pairs[pi];
    std::vector<std::size_t> rows = rows_per_pair[pi];
    if (rows.empty()) {
      throw InvalidArgument("train_epoch: no rows for pair " + pair.label());
    }

    const std::uint64_t stream = epoch * pairs.pairs.size() + pi;
    Rng shuffle_rng(Rng::derive(cfg.seed, rng_tag::kShuffle, stream));
    Rng noise_rng(Rng::derive(cfg.seed, rng_tag::kNoise, stream));
    shuffle_rng.shuffle(std::span<std::size_t>(rows));

    std::vector<Parameter*> params = pair_parameters(models, pair);

    PairEpochStats s;
    s.pair = pair;
    const std::size_t limit =
        cfg.epoch_mode == EpochMode::kSingleBatch ? std::min(rows.size(), cfg.batch)
                                                  : rows.size();
    for (std::size_t start = 0; start < limit; start += cfg.batch) {
      const std::size_t count = std::min(cfg.batch, limit - start);
      LossBreakdown loss =
          run_batch(models, pair, data,
                    std::span<const std::size_t>(rows.data() + start, count), cfg,
                    noise_rng, params);
      s.mean_loss.reconstruction += loss.reconstruction;
      s.mean_loss.kl += loss.kl;
      s.mean_loss.total += loss.total;
      s.batches += 1;
    }
    const double nb = static_cast<double>(s.batches);
    s.mean_loss.reconstruction /= nb;
    s.mean_loss.kl /= nb;
    s.mean_loss.total /= nb;
    stats.push_back(std::move(s));
  }
  return stats;
}

Tensor predict_rows(const ModelSet& models, const MatrixDataset& data,
                    const std::string& input_modality,
                    const std::string& output_modality,
                    std::span<const std::size_t> rows) {
  const Tensor x = ops::gather_rows(data.features.at(input_modality), rows);
  const std::optional<Tensor> hand = gather_handedness(data, rows);
  return predict_mean(models.encoder(input_modality),
                      models.decoder(output_modality), x, hand);
}

EpeSummary evaluate_epe(const ModelSet& models, const MatrixDataset& data,
                        const std::string& input_modality,
                        const std::string& target_modality,
                        std::span<const std::size_t> rows) {
  if (target_modality != "3d" || rows.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  const Tensor pred = predict_rows(models, data, input_modality, target_modality, rows);
  const Tensor gt = ops::gather_rows(data.features.at(target_modality), rows);
  const JointErrors e = joint_errors(pred, gt);
  return {mean_epe(e), median_epe(e)};
}

TrainResult train(const VariantConfig& variant, const MatrixDataset& data,
                  const TrainConfig& cfg,
                  const std::optional<SemiSupConfig>& semi) {
  if (data.count == 0) throw InvalidArgument("train: empty dataset");

  PairSet pairs = build_pairs(variant);

  TrainResult result;
  result.models = make_models(pairs, cfg);
  result.models.init(cfg.seed);

  // Deterministic train/holdout split.
  Rng split_rng(Rng::derive(cfg.seed, rng_tag::kSplit));
  std::vector<std::size_t> order = split_rng.permutation(data.count);
  const auto holdout =
      static_cast<std::size_t>(std::llround(cfg.holdout_fraction * static_cast<double>(data.count)));
  if (holdout >= data.count) throw InvalidArgument("train: holdout fraction leaves no training rows");
  result.train_rows.assign(order.begin(), order.end() - holdout);
  result.holdout_rows.assign(order.end() - holdout, order.end());
  std::sort(result.train_rows.begin(), result.train_rows.end());
  std::sort(result.holdout_rows.begin(), result.holdout_rows.end());

  // Label mask: dataset flags, optionally thinned to the semi-supervised
  // fraction over the training rows.
  std::vector<bool> label_mask(data.count, true);
  if (semi.has_value()) {
    if (semi->label_fraction <= 0.0 || semi->label_fraction > 1.0) {
      throw InvalidArgument("train: label fraction must be in (0, 1]");
    }
    const auto keep = static_cast<std::size_t>(std::llround(
        semi->label_fraction * static_cast<double>(result.train_rows.size())));
    Rng mask_rng(Rng::derive(cfg.seed, rng_tag::kLabelMask));
    std::vector<std::size_t> shuffled = result.train_rows;
    mask_rng.shuffle(std::span<std::size_t>(shuffled));
    label_mask.assign(data.count, false);
    for (std::size_t i = 0; i < keep; ++i) label_mask[shuffled[i]] = true;
  }
  for (const std::size_t r : result.train_rows) {
    if (data.labeled[r] && label_mask[r]) result.labeled_train_rows.push_back(r);
  }

  // Pairs touching the target modality see labeled rows only; the
  // input-side autoencoding pair consumes everything.
  std::vector<std::vector<std::size_t>> rows_per_pair;
  for (const ModalityPair& p : pairs.pairs) {
    const bool touches_target =
        p.encoder == variant.target || p.decoder == variant.target;
    rows_per_pair.push_back(touches_target ? result.labeled_train_rows
                                           : result.train_rows);
  }

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<PairEpochStats> stats =
        train_epoch(result.models, pairs, data, rows_per_pair, cfg, epoch);
    const EpeSummary epe = evaluate_epe(result.models, data, variant.input,
                                        variant.target, result.holdout_rows);
    for (const PairEpochStats& s : stats) {
      HistoryRow row;
      row.epoch = epoch;
      row.pair = s.pair;
      row.loss = s.mean_loss;
      row.heldout_mean_epe = epe.mean;
      row.heldout_median_epe = epe.median;
      result.history.push_back(row);
    }
  }
  return result;
}

void write_history(const std::string& path,
                   const std::vector<HistoryRow>& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open history for writing: " + path);
  out << "epoch\tpair\treconstruction\tkl\ttotal\theldout_mean_epe\theldout_median_epe\n";
  for (const HistoryRow& row : history) {
    out << row.epoch << '\t' << row.pair.label() << '\t'
        << format_real(row.loss.reconstruction) << '\t' << format_real(row.loss.kl)
        << '\t' << format_real(row.loss.total) << '\t'
        << format_real(row.heldout_mean_epe) << '\t'
        << format_real(row.heldout_median_epe) << '\n';
  }
  if (!out) throw IoError("history write failed: " + path);
}

}  // namespace xmvae
