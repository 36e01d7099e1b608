#ifndef BIOBENCH_INFER_HPP
#define BIOBENCH_INFER_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "biobench/counters.hpp"
#include "biobench/errors.hpp"

/// Classifier and network kernels.  Like the DSP layer, every operation
/// accounts its work through a KernelContext.  Quantized kernels run in
/// integers end to end and force the fxp counter columns.
namespace biobench::infer {

// -------------------------------------------------------------------- svm --

enum class SvmKernel { linear, rbf };

struct SvmModel {
  SvmKernel kernel = SvmKernel::linear;
  std::size_t dim = 0;
  std::vector<double> support_vectors;  ///< n_sv x dim, row-major
  std::vector<double> dual_coeffs;      ///< alpha_i * y_i, length n_sv
  double bias = 0;
  double gamma = 1.0;  ///< rbf only

  std::size_t n_support() const {
    return dim == 0 ? 0 : support_vectors.size() / dim;
  }
  void validate() const;

  /// Model bytes as shipped on the device (16-bit words).
  std::size_t device_static_bytes() const;
};

double svm_decision(const SvmModel& m, std::span<const double> x,
                    KernelContext& ctx);

/// decision >= 0 maps to class 1.
int svm_classify(const SvmModel& m, std::span<const double> x,
                 KernelContext& ctx);

// ------------------------------------------------------------------ forest --

/// Node of a binary decision tree stored in a flat array.  Leaves have
/// feature == -1 and carry the positive-class probability in `value`.
struct TreeNode {
  int feature = -1;
  double threshold = 0;
  int left = -1;   ///< index into the tree's node array
  int right = -1;
  double value = 0;
};

struct ForestModel {
  std::size_t n_features = 0;
  std::vector<std::vector<TreeNode>> trees;

  void validate() const;
  std::size_t device_static_bytes() const;
};

/// Mean leaf value across trees.
double forest_predict(const ForestModel& m, std::span<const double> x,
                      KernelContext& ctx);

/// probability >= 0.5 maps to class 1.
int forest_classify(const ForestModel& m, std::span<const double> x,
                    KernelContext& ctx);

// -------------------------------------------------------------------- knn --

struct KnnTrainingSet {
  std::size_t dim = 0;
  std::vector<double> points;  ///< n x dim, row-major
  std::vector<int> labels;     ///< length n

  std::size_t size() const { return dim == 0 ? 0 : points.size() / dim; }
  void validate() const;
  std::size_t device_static_bytes() const;
};

/// Indices of the k smallest entries, by k passes of selection (the same
/// partial sort a device port would run).  `k` must be in [1, n].
std::vector<std::size_t> partial_select_k(std::span<const double> values,
                                          std::size_t k, KernelContext& ctx);

/// Majority vote over the k nearest neighbors (squared Euclidean metric);
/// ties break toward the smaller label.
int knn_classify(const KnnTrainingSet& set, std::span<const double> x,
                 std::size_t k, KernelContext& ctx);

// -------------------------------------------------------------------- mlp --

enum class Activation { none, relu, tanh_act, softmax };

struct DenseLayer {
  std::size_t in = 0, out = 0;
  std::vector<double> weights;  ///< out x in, row-major
  std::vector<double> biases;   ///< length out
  Activation activation = Activation::none;

  void validate() const;
};

/// Feed x through the layer stack; layer i's input size must match the
/// previous output.
std::vector<double> mlp_forward(std::span<const DenseLayer> layers,
                                std::span<const double> x, KernelContext& ctx);

/// Static bytes for a dense stack at 32-bit device words.
std::size_t mlp_device_static_bytes(std::span<const DenseLayer> layers);

// ---------------------------------------------------------------- 1-d cnn --

/// Channel-major 1-d feature map.
struct Tensor1d {
  std::size_t channels = 0;
  std::size_t len = 0;
  std::vector<double> data;  ///< channels x len

  double at(std::size_t c, std::size_t i) const { return data[c * len + i]; }
  double& at(std::size_t c, std::size_t i) { return data[c * len + i]; }
};

/// Convolution (valid, no bias) -> batch norm -> ReLU -> max pool.
/// Batch norm supplies the affine offset, so the convolution itself is
/// bias-free.  Pooling truncates the tail; ties take the first index.
struct ConvBlock {
  std::size_t in_ch = 0, out_ch = 0, kernel = 0;
  std::size_t pool = 1;
  std::vector<double> weights;  ///< out_ch x in_ch x kernel
  std::vector<double> bn_gamma, bn_beta, bn_mean, bn_var;  ///< per out_ch

  void validate() const;
  std::size_t out_len(std::size_t in_len) const;
};

Tensor1d conv_block_forward(const ConvBlock& b, const Tensor1d& x,
                            KernelContext& ctx);

struct Cnn1dModel {
  std::size_t in_ch = 0;
  std::size_t in_len = 0;
  std::vector<ConvBlock> blocks;
  std::vector<DenseLayer> fc;

  void validate() const;
  std::size_t flat_features() const;
  std::size_t parameter_count() const;
};

/// Full-precision forward pass; returns the final layer's outputs.
std::vector<double> cnn_forward(const Cnn1dModel& m, const Tensor1d& x,
                                KernelContext& ctx);

// Quantized form: batch norm is folded into the convolution, weights are
// stored as 16-bit integers with a per-layer power-of-two scale, and
// activations stay in q15.  acc = sum(w * x) + bias accumulates in 64 bits;
// the output is sat16(acc >> shift), truncating like the device port.

struct QConvLayer {
  std::size_t in_ch = 0, out_ch = 0, kernel = 0;
  std::size_t pool = 1;
  int shift = 0;  ///< round(w_folded * 2^shift) stored in `weights`
  std::vector<std::int16_t> weights;
  std::vector<std::int64_t> biases;  ///< at scale 2^(shift + 15)

  std::size_t out_len(std::size_t in_len) const;
};

struct QDenseLayer {
  std::size_t in = 0, out = 0;
  int shift = 0;
  bool relu = false;
  std::vector<std::int16_t> weights;
  std::vector<std::int64_t> biases;
};

struct QCnnModel {
  std::size_t in_ch = 0;
  std::size_t in_len = 0;
  std::vector<QConvLayer> conv;
  std::vector<QDenseLayer> fc;

  void validate() const;
  std::size_t device_static_bytes() const;
};

/// Fold batch norm and quantize a full-precision model.
QCnnModel quantize_cnn(const Cnn1dModel& m);

/// Integer forward pass over q15 activations.  The input is the raw ADC
/// window interpreted as q15 (code / 32768).  Returns the last layer's raw
/// accumulator outputs, already shifted to q15 scale but kept in 32 bits so
/// logits never saturate.
std::vector<std::int32_t> qcnn_forward(const QCnnModel& m,
                                       std::span<const std::int16_t> x,
                                       KernelContext& ctx);

// ---------------------------------------------------------------- fastica --

/// Symmetric eigendecomposition by cyclic Jacobi rotations.  `a` is n x n
/// row-major and must be symmetric.  Eigenvalues arrive descending with
/// matching columns in `vectors`.
struct EigenResult {
  std::vector<double> values;
  std::vector<double> vectors;  ///< n x n, column j = eigenvector j
};

EigenResult jacobi_eigen(std::vector<double> a, std::size_t n,
                         KernelContext& ctx);

struct IcaParams {
  std::size_t n_components = 4;
  std::size_t max_iterations = 200;
  double tolerance = 1e-6;
  std::uint64_t seed = 1;  ///< initial unmixing guess
};

struct IcaResult {
  std::size_t n_components = 0;
  std::vector<double> sources;    ///< n_components x n
  std::vector<double> unmixing;   ///< n_components x n_channels (whitened)
  std::size_t iterations = 0;
  bool converged = false;
};

/// FastICA with the tanh contrast and symmetric decorrelation.  X is
/// channels x n row-major.  Throws NumericError when the channel covariance
/// is singular; non-convergence is reported, not thrown.
IcaResult fastica(std::span<const double> x, std::size_t channels,
                  std::size_t n, const IcaParams& params, KernelContext& ctx);

// ------------------------------------------------------------------ fuzzy --

/// Trapezoidal membership: 0 outside [a, d], 1 inside [b, c], linear ramps
/// between.  Degenerate ramps (a == b) behave as steps.
struct Trapezoid {
  double a = 0, b = 0, c = 0, d = 0;

  double membership(double x) const;
  void validate() const;
};

/// One max-min rule: the rule fires at the minimum membership across its
/// feature terms and votes for `output_class` at that strength.
struct FuzzyRule {
  std::vector<Trapezoid> terms;  ///< one per feature
  int output_class = 0;
};

struct FuzzyDecision {
  int winner = 0;
  double strength = 0;  ///< winning class activation
};

/// Max-min inference over the rule base; class scores are the max rule
/// strength per class, the winner the argmax (smallest class on ties).
FuzzyDecision fuzzy_classify(std::span<const FuzzyRule> rules,
                             std::span<const double> features,
                             KernelContext& ctx);

/// One delineated heartbeat: the R-peak position, the interval to the
/// previous beat, a trailing median of recent intervals, and the delineated
/// fiducial offsets around the peak.
struct BeatFiducials {
  std::ptrdiff_t r_index = -1;  ///< sample index; negative means undetected
  double rr_s = 0;
  double median_rr_s = 0;
  std::vector<double> intervals_s;
};

/// Beat classification on relative-position features: feature 0 is
/// rr / median_rr, the rest are the fiducial intervals normalized by rr.
/// Class 0 is a normal beat.  An empty rule base defaults to normal with
/// zero strength; a beat without an R peak is a domain error.
FuzzyDecision rp_classify(const BeatFiducials& beat,
                          std::span<const FuzzyRule> rules, KernelContext& ctx);

/// Rule base flagging rhythm outliers: beats whose RR interval falls far
/// from the running median vote abnormal (class 1).  Interval features get
/// pass-everything terms so the arity matches any delineation depth.
std::vector<FuzzyRule> default_rp_rules(std::size_t n_intervals);

}  // namespace biobench::infer

#endif  // BIOBENCH_INFER_HPP
