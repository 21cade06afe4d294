#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xmvae/model.hpp"
#include "xmvae/preprocess.hpp"
#include "xmvae/vae.hpp"

namespace xmvae {

struct ModalityPair {
  std::string encoder;
  std::string decoder;

  bool operator==(const ModalityPair& o) const {
    return encoder == o.encoder && decoder == o.decoder;
  }
  std::string label() const { return encoder + "->" + decoder; }
};

/// Ordered encoder/decoder pairs trained alternately; modality names
/// resolve to shared model instances.
struct PairSet {
  std::vector<ModalityPair> pairs;
};

/// The four training pair-set configurations:
///   1: (i->t)            2: (i->t, t->t)
///   3: (i->t, i->i)      4: (i->t, i->i, t->t)
struct VariantConfig {
  int id = 1;
  std::string input = "2d";
  std::string target = "3d";
};

/// Expands a variant into its pair set, deduplicating while preserving
/// order. Throws InvalidArgument for an unknown variant id.
PairSet build_pairs(const VariantConfig& v);

enum class EpochMode {
  kFullPass,     // full shuffled pass over the data per pair per epoch
  kSingleBatch,  // literal single sampled batch per pair per epoch
};

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch = 64;
  AdamConfig adam;  // lr defaults to 1e-4
  std::uint64_t seed = 1;
  double kl_weight = 1.0;
  int samples_per_step = 1;
  ReconMode recon = ReconMode::kSquaredSum;
  EpochMode epoch_mode = EpochMode::kFullPass;
  double holdout_fraction = 0.2;
  LatentConfig latent;
  MlpShape mlp;
  bool handedness_flag = true;  // encoders take the +-1 feature
};

/// Semi-supervised regime: only this fraction of training rows keep their
/// labels. Pairs touching the target modality train on labeled rows only;
/// input-side autoencoding pairs consume every row.
struct SemiSupConfig {
  double label_fraction = 1.0;
};

struct PairEpochStats {
  ModalityPair pair;
  LossBreakdown mean_loss;
  std::size_t batches = 0;
};

struct HistoryRow {
  std::size_t epoch = 0;
  ModalityPair pair;
  LossBreakdown loss;
  double heldout_mean_epe = 0.0;
  double heldout_median_epe = 0.0;
};

struct TrainResult {
  ModelSet models;
  std::vector<HistoryRow> history;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> holdout_rows;
  std::vector<std::size_t> labeled_train_rows;
};

ModelSet make_models(const PairSet& pairs, const TrainConfig& cfg);

/// One pass of the pair-alternating loop: for each pair in order, iterates
/// its row set in seeded shuffled mini-batches, backpropagates the combined
/// reconstruction + KL objective and applies ADAM to that pair's encoder
/// and decoder only. Throws NumericalError when a loss goes non-finite.
std::vector<PairEpochStats> train_epoch(
    ModelSet& models, const PairSet& pairs, const MatrixDataset& data,
    const std::vector<std::vector<std::size_t>>& rows_per_pair,
    const TrainConfig& cfg, std::size_t epoch);

/// Full training run: deterministic split, model init, epochs of
/// train_epoch, per-epoch held-out evaluation of the input->target mapping.
TrainResult train(const VariantConfig& variant, const MatrixDataset& data,
                  const TrainConfig& cfg,
                  const std::optional<SemiSupConfig>& semi = std::nullopt);

/// Mean-path predictions for the given rows of the input modality.
Tensor predict_rows(const ModelSet& models, const MatrixDataset& data,
                    const std::string& input_modality,
                    const std::string& output_modality,
                    std::span<const std::size_t> rows);

struct EpeSummary {
  double mean = 0.0;
  double median = 0.0;
};

/// Held-out end-point error of the input->target mapping in normalized
/// units. Only defined for a 3D target; returns NaNs otherwise.
EpeSummary evaluate_epe(const ModelSet& models, const MatrixDataset& data,
                        const std::string& input_modality,
                        const std::string& target_modality,
                        std::span<const std::size_t> rows);

/// Tab-separated history with a header line.
void write_history(const std::string& path,
                   const std::vector<HistoryRow>& history);

}  // namespace xmvae
