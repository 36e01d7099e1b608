#ifndef BIOBENCH_TRAIN_HPP
#define BIOBENCH_TRAIN_HPP

#include <span>
#include <vector>

#include "biobench/counters.hpp"
#include "biobench/errors.hpp"
#include "biobench/infer.hpp"

/// On-device training without backpropagation.  Each layer is trained
/// against its own contrastive objective: intermediate outputs of the same
/// class are pulled together, different classes pushed past a margin.  The
/// chain rule only ever spans one layer (conv, batch norm, ReLU, pooling),
/// so no activation history beyond the current layer is kept.
namespace biobench::train {

struct BpfreeParams {
  double margin = 1.0;
  double learning_rate = 0.01;
  std::size_t epochs = 1;
};

/// Pre-recorded training samples (inputs match the model's input shape).
struct TrainingBatch {
  std::vector<infer::Tensor1d> inputs;
  std::vector<int> labels;

  void validate(const infer::Cnn1dModel& m) const;
};

/// Mean squared distance over same-class pairs plus mean squared margin
/// shortfall over different-class pairs:
///   L = avg_same ||fi - fj||^2 + avg_diff max(0, margin - ||fi - fj||)^2
double contrastive_loss(std::span<const std::vector<double>> features,
                        std::span<const int> labels, double margin,
                        KernelContext& ctx);

/// d(loss)/d(features), same shapes as the input.
std::vector<std::vector<double>> contrastive_loss_grad(
    std::span<const std::vector<double>> features, std::span<const int> labels,
    double margin, KernelContext& ctx);

/// Parameter gradients for one layer.  Layers are indexed conv blocks first,
/// then dense layers; `biases` stays empty for conv blocks (batch norm is
/// frozen and owns the offset).
struct LayerGrads {
  std::vector<double> weights;
  std::vector<double> biases;
};

/// The layer's contrastive loss at the current parameters.
double bpfree_layer_loss(const infer::Cnn1dModel& m, const TrainingBatch& batch,
                         std::size_t layer_index, double margin,
                         KernelContext& ctx);

/// Analytic gradient of bpfree_layer_loss with respect to the layer's own
/// parameters (upstream layers are frozen for the step).
LayerGrads bpfree_layer_grad(const infer::Cnn1dModel& m,
                             const TrainingBatch& batch,
                             std::size_t layer_index, double margin,
                             KernelContext& ctx);

struct EpochStats {
  /// Loss per layer, sampled before that layer's update, input to output.
  std::vector<double> layer_losses;
};

/// One pass: each layer takes a single gradient step, input to output.
EpochStats bpfree_train_epoch(infer::Cnn1dModel& m, const TrainingBatch& batch,
                              const BpfreeParams& params, KernelContext& ctx);

/// params.epochs epochs; returns one stats row per epoch.
std::vector<EpochStats> bpfree_train(infer::Cnn1dModel& m,
                                     const TrainingBatch& batch,
                                     const BpfreeParams& params,
                                     KernelContext& ctx);

}  // namespace biobench::train

#endif  // BIOBENCH_TRAIN_HPP
