// The four floating-point application pipelines: gesture classification,
// cough detection, emotion classification, and the backprop-free on-device
// trainer.
#include <algorithm>
#include <cmath>

#include "apps_detail.hpp"
#include "biobench/dsp.hpp"
#include "biobench/infer_io.hpp"

namespace biobench::apps::detail {

namespace {

// -------------------------------------------------------------------- gcl --

class GclPipeline final : public Pipeline {
 public:
  explicit GclPipeline(AppConfig config) : Pipeline(std::move(config)) {
    const auto in = static_cast<std::size_t>(3 * config_.params.ica_components);
    if (config_.model_path.empty()) {
      model_ = make_mlp_model(config_.model_seed, in, 32, 5);
    } else {
      model_ = load_model_or_config_error(
          [&] { return infer::load_mlp(config_.model_path); },
          config_.model_path);
    }
    ledger_.note_static(infer::mlp_device_static_bytes(model_));
    ledger_.add_code_allowance(3);
    ledger_.set_stack_bound(4096);
  }

 private:
  ClassificationResult run(const WindowInput& input, KernelContext& ctx) override {
    const auto& buf = input.buffers[0];
    const std::size_t n = buf.window_samples();
    const std::size_t ch = buf.channels();
    const auto m = static_cast<std::size_t>(config_.params.ica_components);

    // 24-bit codes scaled to unit floats in place of the widened window
    ledger_.alloc(4 * ch * n);
    std::vector<double> x(ch * n);
    const double scale = 1.0 / 8388608.0;
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t i = 0; i < n; ++i) x[c * n + i] = scale * buf.at(c, i);
    ctx.mul(ch * n);
    ctx.mem(2 * ch * n);

    infer::IcaParams params;
    params.n_components = m;
    params.max_iterations = static_cast<std::size_t>(config_.params.ica_max_iterations);
    params.tolerance = config_.params.ica_tolerance;
    params.seed = config_.model_seed;

    // whitened data, unmixing estimate, recovered sources
    const std::uint64_t ica_bytes = 4 * (m * n + m * ch + m * n);
    infer::IcaResult res;
    {
      ScopedAlloc ica_mem(ledger_, ica_bytes);
      res = infer::fastica(x, ch, n, params, ctx);
    }
    ledger_.alloc(4 * m * n);  // sources kept for the feature pass
    close_stage("source_separation", ctx);

    std::vector<double> features;
    features.reserve(3 * m);
    for (std::size_t k = 0; k < res.n_components; ++k) {
      const std::span<const double> src{res.sources.data() + k * n, n};
      const auto st = dsp::stat_features(src, ctx);
      features.push_back(st.rms);
      features.push_back(st.zero_cross_rate);
      features.push_back(st.line_length);
    }
    close_stage("source_features", ctx);

    const auto probs = infer::mlp_forward(model_, features, ctx);
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i)
      if (probs[i] > probs[best]) best = i;
    ctx.branch(probs.size());
    close_stage("classification", ctx);

    ledger_.release(4 * m * n);
    ledger_.release(4 * ch * n);

    ClassificationResult r;
    r.label = "gesture_" + std::to_string(best);
    r.score = probs[best];
    r.values = probs;
    if (!res.converged) r.notes.push_back("ica did not converge");
    return r;
  }

  std::vector<infer::DenseLayer> model_;
};

// --------------------------------------------------------------- coughdet --

class CoughDetPipeline final : public Pipeline {
 public:
  explicit CoughDetPipeline(AppConfig config) : Pipeline(std::move(config)) {
    if (config_.model_path.empty()) {
      model_ = make_forest_model(config_.model_seed, 48, 20, 8);
    } else {
      model_ = load_model_or_config_error(
          [&] { return infer::load_forest(config_.model_path); },
          config_.model_path);
    }
    ledger_.note_static(model_.device_static_bytes());
    ledger_.add_code_allowance(4);
    ledger_.set_stack_bound(4096);
  }

 private:
  ClassificationResult run(const WindowInput& input, KernelContext& ctx) override {
    const auto& audio_buf = input.buffers[0];
    const auto& imu_buf = input.buffers[1];
    const std::size_t na = audio_buf.window_samples();
    const std::size_t ni = imu_buf.window_samples();
    const double fs = config_.specs[0].sample_rate_hz;

    ledger_.alloc(4 * na + 2 * 6 * ni);
    std::vector<double> features;
    features.reserve(48);

    for (std::size_t c = 0; c < imu_buf.channels(); ++c) {
      const auto st = dsp::stat_features(imu_buf.channel(c), ctx);
      features.push_back(st.zero_cross_rate);
      features.push_back(st.rms);
      features.push_back(st.kurtosis);
    }
    close_stage("imu_features", ctx);

    // audio normalized to unit scale in place
    std::vector<double> audio(na);
    const double scale = 1.0 / 2147483648.0;
    for (std::size_t i = 0; i < na; ++i) audio[i] = scale * audio_buf.at(0, i);
    ctx.mul(na);
    ctx.mem(2 * na);
    {
      std::size_t nfft = 1;
      while (nfft < na) nfft <<= 1;
      ScopedAlloc psd_mem(ledger_, 4 * (nfft / 2 + 1));
      const auto ps = dsp::periodogram(audio, fs, ctx);
      const std::size_t bins = ps.psd.size();
      double mean = 0;
      for (double v : ps.psd) mean += v;
      mean /= static_cast<double>(bins);
      double var = 0;
      for (double v : ps.psd) var += (v - mean) * (v - mean);
      var /= static_cast<double>(bins);
      ctx.mac(2 * bins);
      ctx.mul(4);
      features.push_back(std::sqrt(var));
      features.push_back(dsp::peak_frequency(ps, ctx));
      features.push_back(mean * static_cast<double>(bins) * ps.bin_hz());
      features.push_back(dsp::spectral_entropy(ps, ctx));
    }
    close_stage("audio_spectral", ctx);

    dsp::MfccParams mp;
    mp.frame_len = static_cast<std::size_t>(config_.params.mfcc_frame);
    mp.n_mels = static_cast<std::size_t>(config_.params.mfcc_mels);
    mp.n_coeffs = static_cast<std::size_t>(config_.params.mfcc_coeffs);
    std::vector<std::vector<double>> frames;
    {
      ScopedAlloc mfcc_mem(ledger_, 4 * (2 * mp.frame_len + mp.n_mels));
      frames = dsp::mfcc(audio, fs, mp, ctx);
    }
    const std::uint64_t coeff_bytes = 4 * frames.size() * mp.n_coeffs;
    ledger_.alloc(coeff_bytes);
    const auto nf = static_cast<double>(frames.size());
    for (std::size_t k = 0; k < mp.n_coeffs; ++k) {
      double mean = 0;
      for (const auto& f : frames) mean += f[k];
      mean /= nf;
      features.push_back(mean);
    }
    for (std::size_t k = 0; k < mp.n_coeffs; ++k) {
      double var = 0;
      for (const auto& f : frames) var += (f[k] - features[22 + k]) * (f[k] - features[22 + k]);
      var /= nf;
      features.push_back(std::sqrt(var));
    }
    ctx.mac(2 * frames.size() * mp.n_coeffs);
    ctx.mul(3 * mp.n_coeffs);
    close_stage("mfcc", ctx);

    const double prob = infer::forest_predict(model_, features, ctx);
    ctx.branch(1);
    close_stage("classification", ctx);

    ledger_.release(coeff_bytes);
    ledger_.release(4 * na + 2 * 6 * ni);

    ClassificationResult r;
    r.label = prob >= 0.5 ? "cough" : "no_cough";
    r.score = prob;
    r.values = {prob};
    return r;
  }

  infer::ForestModel model_;
};

// -------------------------------------------------------------------- ecl --

class EclPipeline final : public Pipeline {
 public:
  explicit EclPipeline(AppConfig config) : Pipeline(std::move(config)) {
    if (config_.model_path.empty()) {
      model_ = make_knn_training_set(
          config_.model_seed,
          static_cast<std::size_t>(config_.params.knn_train_points));
    } else {
      model_ = load_model_or_config_error(
          [&] { return infer::load_knn(config_.model_path); },
          config_.model_path);
    }
    // k from the usual square-root heuristic on the training set size
    k_ = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(std::sqrt(
               static_cast<double>(model_.size())))));
    ledger_.note_static(model_.device_static_bytes());
    ledger_.add_code_allowance(3);
    ledger_.set_stack_bound(1024);
  }

 private:
  ClassificationResult run(const WindowInput& input, KernelContext& ctx) override {
    const auto n_batches = static_cast<std::size_t>(
        std::llround(config_.window_seconds / config_.params.batch_seconds));
    std::uint64_t batch_bytes = 0;
    for (const auto& s : config_.specs)
      batch_bytes += static_cast<std::uint64_t>(
          std::llround(s.sample_rate_hz * config_.params.batch_seconds *
                       s.container_bytes() * s.channels));

    std::vector<double> votes;
    ledger_.alloc(4 * n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
      ScopedAlloc staging(ledger_, batch_bytes);
      std::vector<double> q;
      for (std::size_t s = 0; s < input.buffers.size(); ++s) {
        const auto& buf = input.buffers[s];
        const auto per = static_cast<std::size_t>(std::llround(
            config_.specs[s].sample_rate_hz * config_.params.batch_seconds));
        const auto seg = buf.channel(0).subspan(b * per, per);
        double mean = 0;
        for (double v : seg) mean += v;
        mean /= static_cast<double>(per);
        q.push_back(mean);
        ctx.mac(per);
        ctx.mul(1);
      }
      close_stage("batch_average", ctx);

      int vote;
      {
        ScopedAlloc distances(ledger_, 4 * model_.size());
        vote = infer::knn_classify(model_, q, k_, ctx);
      }
      votes.push_back(vote);
      close_stage("knn_vote", ctx);
    }

    std::size_t fear = 0;
    for (double v : votes)
      if (v == 1.0) ++fear;
    ctx.branch(votes.size());
    close_stage("majority", ctx);
    ledger_.release(4 * n_batches);

    ClassificationResult r;
    // strict majority of the partial votes; ties stay calm
    r.label = 2 * fear > votes.size() ? "fear" : "no_fear";
    r.score = votes.empty() ? 0 : static_cast<double>(fear) / static_cast<double>(votes.size());
    r.values = std::move(votes);
    return r;
  }

  infer::KnnTrainingSet model_;
  std::size_t k_ = 1;
};

// ----------------------------------------------------------------- bpfree --

class BpfreePipeline final : public Pipeline {
 public:
  explicit BpfreePipeline(AppConfig config) : Pipeline(std::move(config)) {
    if (config_.model_path.empty()) {
      model_ = make_cnn_model(config_.model_seed, 23, 1024);
    } else {
      model_ = load_model_or_config_error(
          [&] { return infer::load_cnn(config_.model_path); },
          config_.model_path);
    }
    batch_ = make_bpfree_batch(config_.model_seed + 1, model_);
    std::uint64_t batch_bytes = 0;
    for (const auto& t : batch_.inputs) batch_bytes += 4 * t.data.size();
    batch_bytes_ = batch_bytes;
    ledger_.note_static(batch_bytes);  // training set ships in flash
    ledger_.add_code_allowance(1);
    ledger_.set_stack_bound(8192);
  }

 private:
  ClassificationResult run(const WindowInput&, KernelContext& ctx) override {
    // Trainable parameters live in RAM, as do the working batch, the
    // current layer's activations, and its gradient.
    const std::uint64_t param_bytes = 4 * model_.parameter_count();
    ledger_.alloc(param_bytes);
    ledger_.alloc(batch_bytes_);
    const std::size_t samples = batch_.inputs.size();
    std::size_t len = model_.in_len;
    for (const auto& b : model_.blocks) {
      const std::size_t conv_len = len - b.kernel + 1;
      const std::uint64_t act = 4 * samples * b.out_ch * conv_len;
      const std::uint64_t grad = 4 * b.weights.size();
      ledger_.alloc(act + grad);
      ledger_.release(act + grad);
      len = b.out_len(len);
    }
    for (const auto& l : model_.fc) {
      const std::uint64_t act = 4 * samples * (l.in + l.out);
      const std::uint64_t grad = 4 * (l.weights.size() + l.biases.size());
      ledger_.alloc(act + grad);
      ledger_.release(act + grad);
    }

    train::BpfreeParams params;
    params.margin = config_.params.bpfree_margin;
    params.learning_rate = config_.params.bpfree_learning_rate;
    params.epochs = static_cast<std::size_t>(config_.params.bpfree_epochs);

    infer::Cnn1dModel work = model_;  // repeat runs start from the same weights
    const auto stats = train::bpfree_train(work, batch_, params, ctx);
    close_stage("train", ctx);

    ledger_.release(batch_bytes_);
    ledger_.release(param_bytes);

    ClassificationResult r;
    r.label = "trained";
    const auto& losses = stats.back().layer_losses;
    double mean = 0;
    for (double v : losses) mean += v;
    r.score = losses.empty() ? 0 : mean / static_cast<double>(losses.size());
    r.values = losses;
    return r;
  }

  infer::Cnn1dModel model_;
  train::TrainingBatch batch_;
  std::uint64_t batch_bytes_ = 0;
};

}  // namespace

std::unique_ptr<Pipeline> build_gcl(const AppConfig& config) {
  return std::make_unique<GclPipeline>(config);
}
std::unique_ptr<Pipeline> build_coughdet(const AppConfig& config) {
  return std::make_unique<CoughDetPipeline>(config);
}
std::unique_ptr<Pipeline> build_ecl(const AppConfig& config) {
  return std::make_unique<EclPipeline>(config);
}
std::unique_ptr<Pipeline> build_bpfree(const AppConfig& config) {
  return std::make_unique<BpfreePipeline>(config);
}

}  // namespace biobench::apps::detail
