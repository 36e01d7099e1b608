// The four fixed-point application pipelines: heartbeat classification,
// ECG seizure detection (SVM), EEG seizure detection (CNN), and cognitive
// workload monitoring.  Ledger allocations model the device-resident
// buffers at container width, not host vectors.
#include <algorithm>
#include <cmath>

#include "apps_detail.hpp"
#include "biobench/dsp.hpp"
#include "biobench/infer_io.hpp"

namespace biobench::apps::detail {

namespace {

std::size_t seconds_to_samples(double seconds, double fs) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * fs));
  return std::max<std::size_t>(1, n);
}

// Trailing median of at most the last `depth` intervals; counted as one
// comparison pass per element of the working copy.
double trailing_median(std::vector<double> recent, KernelContext& ctx) {
  ctx.branch(recent.size());
  ctx.mem(recent.size());
  std::sort(recent.begin(), recent.end());
  const std::size_t m = recent.size();
  if (m == 0) return 0;
  return m % 2 ? recent[m / 2] : 0.5 * (recent[m / 2 - 1] + recent[m / 2]);
}

// ------------------------------------------------------------------- hcl --

class HclPipeline final : public Pipeline {
 public:
  explicit HclPipeline(AppConfig config) : Pipeline(std::move(config)) {
    rules_ = infer::default_rp_rules(2);
    std::uint64_t rule_bytes = 0;
    for (const auto& r : rules_) rule_bytes += 2 * (4 * r.terms.size() + 1);
    ledger_.note_static(rule_bytes);
    ledger_.add_code_allowance(6);
    ledger_.set_stack_bound(2048);
  }

 private:
  ClassificationResult run(const WindowInput& input, KernelContext& ctx) override {
    const auto& buf = input.buffers[0];
    const std::size_t n = buf.window_samples();
    const std::size_t ch = buf.channels();
    const double fs = config_.specs[0].sample_rate_hz;
    const auto k = static_cast<std::size_t>(config_.params.morph_kernel);

    ledger_.alloc(2 * ch * n);  // acquisition window, int16
    std::vector<double> rms(n, 0.0);
    ledger_.alloc(2 * n);  // combined series
    {
      ScopedAlloc scratch(ledger_, 2 * n);  // one filtered channel at a time
      std::vector<double> filtered(n);
      for (std::size_t c = 0; c < ch; ++c) {
        dsp::morph_baseline(buf.channel(c), filtered, k, ctx);
        close_stage("morphological_filter", ctx);
        for (std::size_t i = 0; i < n; ++i) rms[i] += filtered[i] * filtered[i];
        ctx.mac(n);
        ctx.mem(2 * n);
        close_stage("rms_combine", ctx);
      }
    }
    const double inv_ch = 1.0 / static_cast<double>(ch);
    for (auto& v : rms) v = std::sqrt(v * inv_ch);
    ctx.mul(3 * n);  // scale + sqrt
    close_stage("rms_combine", ctx);

    // scores overwrite the combined series on the device, so no new buffer
    const auto w_short = seconds_to_samples(config_.params.relen_short_s, fs);
    const auto w_long = seconds_to_samples(config_.params.relen_long_s, fs);
    const auto scores = dsp::relative_energy(rms, w_short, w_long, ctx);
    close_stage("relative_energy", ctx);

    dsp::PeakParams pp;
    pp.threshold = config_.params.peak_threshold;
    pp.refractory_s = config_.params.refractory_s;
    const auto peaks = dsp::detect_peaks(scores, fs, pp, ctx);
    const std::uint64_t peak_bytes =
        4 * static_cast<std::uint64_t>(
                std::ceil(buf.window_seconds() / pp.refractory_s));
    ledger_.alloc(peak_bytes);
    close_stage("peak_detection", ctx);

    // Delineate on the combined series: walk out from each peak until the
    // amplitude falls under 10% of the apex, capped at 100 ms per side.
    const auto reach = seconds_to_samples(0.1, fs);
    std::vector<infer::BeatFiducials> beats;
    std::uint64_t scanned = 0;
    for (const std::size_t p : peaks) {
      const double floor10 = 0.1 * rms[p];
      std::size_t on = p, off = p;
      while (on > 0 && p - on < reach && rms[on] > floor10) --on, ++scanned;
      while (off + 1 < n && off - p < reach && rms[off] > floor10) ++off, ++scanned;
      infer::BeatFiducials b;
      b.r_index = static_cast<std::ptrdiff_t>(p);
      b.intervals_s = {(p - on) / fs, (off - p) / fs};
      beats.push_back(std::move(b));
    }
    ctx.branch(2 * scanned);
    ctx.mem(scanned);
    close_stage("delineation", ctx);

    // Classify from the second beat on; the first has no interval yet.
    std::vector<double> recent;
    int abnormal = 0;
    std::vector<double> winners;
    for (std::size_t i = 1; i < beats.size(); ++i) {
      auto& b = beats[i];
      b.rr_s = (beats[i].r_index - beats[i - 1].r_index) / fs;
      recent.push_back(b.rr_s);
      if (recent.size() > 8) recent.erase(recent.begin());
      b.median_rr_s = trailing_median(recent, ctx);
      for (auto& v : b.intervals_s) v /= b.rr_s;
      ctx.mul(b.intervals_s.size() + 1);
      const auto d = infer::rp_classify(b, rules_, ctx);
      winners.push_back(d.winner);
      if (d.winner != 0) ++abnormal;
    }
    close_stage("classification", ctx);

    ledger_.release(peak_bytes);
    ledger_.release(2 * n);
    ledger_.release(2 * ch * n);

    ClassificationResult r;
    r.label = abnormal > 0 ? "abnormal_rhythm" : "normal_rhythm";
    r.score = static_cast<double>(beats.size());
    r.values = std::move(winners);
    return r;
  }

  std::vector<infer::FuzzyRule> rules_;
};

// ------------------------------------------------------------- seizdetsvm --

class SeizDetSvmPipeline final : public Pipeline {
 public:
  explicit SeizDetSvmPipeline(AppConfig config) : Pipeline(std::move(config)) {
    if (config_.model_path.empty()) {
      model_ = make_svm_model(config_.model_seed, 18);
    } else {
      model_ = load_model_or_config_error(
          [&] { return infer::load_svm(config_.model_path); },
          config_.model_path);
    }
    ledger_.note_static(model_.device_static_bytes());
    ledger_.add_code_allowance(6);
    ledger_.set_stack_bound(2048);
  }

 private:
  // Lomb-Scargle frequency grid and band sums over [lo, hi) Hz.
  struct Bands {
    std::vector<double> freqs;
    double df = 0;
  };

  Bands make_grid() const {
    Bands g;
    const auto nf = static_cast<std::size_t>(config_.params.lomb_n_freqs);
    const double fmax = config_.params.lomb_max_hz;
    g.df = fmax / static_cast<double>(nf);
    g.freqs.resize(nf);
    for (std::size_t j = 0; j < nf; ++j) g.freqs[j] = g.df * static_cast<double>(j + 1);
    return g;
  }

  static double band_sum(const Bands& g, std::span<const double> power,
                         double lo, double hi, KernelContext& ctx) {
    double s = 0;
    std::uint64_t bins = 0;
    for (std::size_t j = 0; j < g.freqs.size(); ++j)
      if (g.freqs[j] >= lo && g.freqs[j] < hi) {
        s += power[j];
        ++bins;
      }
    ctx.mac(bins);
    ctx.branch(g.freqs.size());
    ctx.mul(1);
    return s * g.df;
  }

  ClassificationResult run(const WindowInput& input, KernelContext& ctx) override {
    const auto& buf = input.buffers[0];
    const std::size_t n = buf.window_samples();
    const double fs = config_.specs[0].sample_rate_hz;

    ledger_.alloc(2 * n);  // window, int16; detrending runs in place
    std::vector<double> detr(n);
    dsp::detrend_moving_average(buf.channel(0), detr, config_.params.ma_window,
                                ctx);
    close_stage("ma_subtract", ctx);

    std::vector<double> rr, beat_t, edr;
    {
      ScopedAlloc score_mem(ledger_, 2 * n);
      const auto w_short = seconds_to_samples(config_.params.relen_short_s, fs);
      const auto w_long = seconds_to_samples(config_.params.relen_long_s, fs);
      const auto scores = dsp::relative_energy(detr, w_short, w_long, ctx);
      dsp::PeakParams pp;
      pp.threshold = config_.params.peak_threshold;
      pp.refractory_s = config_.params.refractory_s;
      const auto peaks = dsp::detect_peaks(scores, fs, pp, ctx);
      for (std::size_t i = 0; i < peaks.size(); ++i) {
        beat_t.push_back(peaks[i] / fs);
        edr.push_back(detr[peaks[i]]);  // R-wave amplitude modulation
        if (i > 0) rr.push_back((peaks[i] - peaks[i - 1]) / fs);
      }
      ctx.mac(peaks.size());
      ctx.mem(2 * peaks.size());
    }
    const std::uint64_t series_bytes = 4 * (2 * beat_t.size() + rr.size());
    ledger_.alloc(series_bytes);
    close_stage("rri_edr", ctx);

    std::vector<double> features(18, 0.0);
    bool degenerate = rr.size() < 3;
    if (!degenerate) {
      const auto m = rr.size();
      double mean = 0;
      for (double v : rr) mean += v;
      mean /= static_cast<double>(m);
      double var = 0;
      for (double v : rr) var += (v - mean) * (v - mean);
      var /= static_cast<double>(m);
      const double sdnn = std::sqrt(var);

      double sumd2 = 0, vard = 0, meand = 0;
      std::uint64_t nn50 = 0;
      for (std::size_t i = 1; i < m; ++i) meand += rr[i] - rr[i - 1];
      meand /= static_cast<double>(m - 1);
      for (std::size_t i = 1; i < m; ++i) {
        const double d = rr[i] - rr[i - 1];
        sumd2 += d * d;
        vard += (d - meand) * (d - meand);
        if (std::fabs(d) > 0.05) ++nn50;
      }
      const double rmssd = std::sqrt(sumd2 / static_cast<double>(m - 1));
      vard /= static_cast<double>(m - 1);
      const double pnn50 = static_cast<double>(nn50) / static_cast<double>(m - 1);
      // Lorenz (Poincare) descriptors from the interval differences
      const double sd1 = std::sqrt(0.5 * vard);
      const double sd2sq = 2.0 * var - 0.5 * vard;
      const double sd2 = std::sqrt(std::max(0.0, sd2sq));
      features[0] = sdnn;
      features[1] = rmssd;
      features[2] = pnn50;
      features[3] = sd1;
      features[4] = sd2;
      ctx.mac(4 * m);
      ctx.mul(16);
      ctx.branch(m);
    }
    close_stage("hrv_features", ctx);

    const Bands grid = make_grid();
    if (!degenerate) {
      ScopedAlloc psd_mem(ledger_, 4 * grid.freqs.size());
      const std::vector<double> rr_t(beat_t.begin() + 1, beat_t.end());
      const auto rr_power = dsp::lomb_scargle(rr_t, rr, grid.freqs, ctx);
      features[5] = band_sum(grid, rr_power, 0.0033, 0.04, ctx);
      features[6] = band_sum(grid, rr_power, 0.04, 0.15, ctx);
      features[7] = band_sum(grid, rr_power, 0.15, 0.4, ctx);
      features[8] = features[7] > 0 ? features[6] / features[7] : 0.0;
      ctx.mul(1);
      const auto edr_power = dsp::lomb_scargle(beat_t, edr, grid.freqs, ctx);
      features[17] = band_sum(grid, edr_power, 0.15, 0.5, ctx);
    }
    close_stage("lomb_scargle", ctx);

    std::vector<std::string> notes;
    if (!degenerate) {
      try {
        const auto a = dsp::lpc(edr, static_cast<std::size_t>(config_.params.lpc_order), ctx);
        for (std::size_t i = 0; i < a.size() && i < 8; ++i) features[9 + i] = a[i];
      } catch (const NumericError&) {
        notes.push_back("flat edr series, lpc skipped");
      }
    } else {
      notes.push_back("fewer than four beats, features zero-filled");
    }
    close_stage("lpc_edr", ctx);

    const double decision = infer::svm_decision(model_, features, ctx);
    ctx.branch(1);
    close_stage("classification", ctx);

    ledger_.release(series_bytes);
    ledger_.release(2 * n);

    ClassificationResult r;
    r.label = decision >= 0 ? "seizure" : "no_seizure";
    r.score = decision;
    r.values = std::move(features);
    r.notes = std::move(notes);
    return r;
  }

  infer::SvmModel model_;
};

// ------------------------------------------------------------- seizdetcnn --

class SeizDetCnnPipeline final : public Pipeline {
 public:
  explicit SeizDetCnnPipeline(AppConfig config) : Pipeline(std::move(config)) {
    const auto& s = config_.specs[0];
    const auto in_len = static_cast<std::size_t>(
        std::llround(s.sample_rate_hz * config_.window_seconds));
    infer::Cnn1dModel full;
    if (config_.model_path.empty()) {
      full = make_cnn_model(config_.model_seed, s.channels, in_len);
    } else {
      full = load_model_or_config_error(
          [&] { return infer::load_cnn(config_.model_path); },
          config_.model_path);
    }
    model_ = infer::quantize_cnn(full);
    ledger_.note_static(model_.device_static_bytes());
    ledger_.add_code_allowance(1);
    ledger_.set_stack_bound(4096);
  }

 private:
  ClassificationResult run(const WindowInput& input, KernelContext& ctx) override {
    const auto& buf = input.buffers[0];
    const std::size_t n = buf.window_samples();
    const std::size_t ch = buf.channels();

    std::vector<std::int16_t> x(ch * n);
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t i = 0; i < n; ++i)
        x[c * n + i] = static_cast<std::int16_t>(buf.at(c, i));
    ctx.mem(ch * n);

    // double-buffered activations: input plus the widest conv output
    std::uint64_t live = 2 * ch * n;
    ledger_.alloc(live);
    std::size_t len = model_.in_len;
    for (const auto& l : model_.conv) {
      len = l.out_len(len);
      const std::uint64_t out_bytes = 2 * l.out_ch * len;
      ledger_.alloc(out_bytes);
      ledger_.release(live);
      live = out_bytes;
    }
    for (const auto& l : model_.fc) {
      const std::uint64_t out_bytes = 4 * l.out;
      ledger_.alloc(out_bytes);
      ledger_.release(live);
      live = out_bytes;
    }

    const auto logits = infer::qcnn_forward(model_, x, ctx);
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i)
      if (logits[i] > logits[best]) best = i;
    ctx.branch(logits.size());
    close_stage("cnn", ctx);
    ledger_.release(live);

    ClassificationResult r;
    r.label = best == 1 ? "seizure" : "no_seizure";
    r.score = static_cast<double>(logits[best]) / 32768.0;
    r.values.assign(logits.begin(), logits.end());
    return r;
  }

  infer::QCnnModel model_;
};

// -------------------------------------------------------------------- cwm --

class CwmPipeline final : public Pipeline {
 public:
  explicit CwmPipeline(AppConfig config)
      : Pipeline(std::move(config)), filter_(make_bandpass()) {
    const auto& s = config_.specs[0];
    chunk_n_ = seconds_to_samples(config_.params.chunk_seconds, s.sample_rate_hz);
    const auto total = static_cast<std::size_t>(
        std::llround(s.sample_rate_hz * config_.window_seconds));
    n_chunks_ = total / chunk_n_;
    if (n_chunks_ == 0)
      throw ConfigError("window shorter than one processing chunk");
    n_features_ = n_chunks_ * s.channels * 10;
    if (config_.model_path.empty()) {
      model_ = make_forest_model(config_.model_seed, n_features_, 20, 8);
    } else {
      model_ = load_model_or_config_error(
          [&] { return infer::load_forest(config_.model_path); },
          config_.model_path);
    }
    ledger_.note_static(model_.device_static_bytes());
    ledger_.note_static(4 * 5 * 4);  // biquad coefficient table
    ledger_.add_code_allowance(4);
    ledger_.set_stack_bound(2048);
  }

 private:
  // 4th-order Butterworth band pass 0.5-40 Hz at fs 256, second-order
  // sections; unity passband gain, -3 dB at both edges.
  static std::vector<dsp::BiquadSection> make_bandpass() {
    return {
        {0.020341578860303529, 0.040683157720607058, 0.020341578860303529,
         -0.6478768233605019, 0.13834100126899804},
        {1, 2, 1, -0.85071168531494556, 0.52509757680294289},
        {1, -2, 1, -1.9770607075628359, 0.97721561717966354},
        {1, -2, 1, -1.9906535189168828, 0.99080439814873356},
    };
  }

  ClassificationResult run(const WindowInput& input, KernelContext& ctx) override {
    const auto& buf = input.buffers[0];
    const std::size_t ch = buf.channels();
    const double fs = config_.specs[0].sample_rate_hz;

    std::vector<double> features;
    features.reserve(n_features_);
    ledger_.alloc(4 * n_features_);

    std::vector<double> detr(chunk_n_), filt(chunk_n_);
    for (std::size_t chunk = 0; chunk < n_chunks_; ++chunk) {
      ScopedAlloc chunk_mem(ledger_, 4 * ch * chunk_n_);
      for (std::size_t c = 0; c < ch; ++c) {
        const auto x = buf.channel(c).subspan(chunk * chunk_n_, chunk_n_);
        dsp::detrend_moving_average(
            x, detr, static_cast<std::size_t>(config_.params.detrend_window), ctx);
        close_stage("detrend", ctx);

        filter_.reset();
        filter_.process(detr, filt, ctx);
        close_stage("bandpass_iir", ctx);

        const auto st = dsp::stat_features(filt, ctx);
        dsp::PowerSpectrum ps;
        {
          ScopedAlloc psd_mem(ledger_, 4 * (chunk_n_ / 2 + 1));
          ps = dsp::periodogram(filt, fs, ctx);
          features.push_back(st.skewness);
          features.push_back(st.kurtosis);
          features.push_back(st.variance);  // Hjorth activity
          features.push_back(st.hjorth_mobility);
          features.push_back(st.hjorth_complexity);
          features.push_back(dsp::band_power(ps, 0.5, 4, ctx));
          features.push_back(dsp::band_power(ps, 4, 8, ctx));
          features.push_back(dsp::band_power(ps, 8, 13, ctx));
          features.push_back(dsp::band_power(ps, 13, 30, ctx));
          features.push_back(dsp::spectral_entropy(ps, ctx));
        }
        close_stage("feature_extraction", ctx);
      }
    }

    const double prob = infer::forest_predict(model_, features, ctx);
    ctx.branch(1);
    close_stage("classification", ctx);
    ledger_.release(4 * n_features_);

    ClassificationResult r;
    r.label = prob >= 0.5 ? "high_workload" : "low_workload";
    r.score = prob;
    r.values = {prob};
    return r;
  }

  infer::ForestModel model_;
  dsp::BiquadCascade filter_;
  std::size_t chunk_n_ = 0;
  std::size_t n_chunks_ = 0;
  std::size_t n_features_ = 0;
};

}  // namespace

std::unique_ptr<Pipeline> build_hcl(const AppConfig& config) {
  return std::make_unique<HclPipeline>(config);
}
std::unique_ptr<Pipeline> build_seizdetsvm(const AppConfig& config) {
  return std::make_unique<SeizDetSvmPipeline>(config);
}
std::unique_ptr<Pipeline> build_seizdetcnn(const AppConfig& config) {
  return std::make_unique<SeizDetCnnPipeline>(config);
}
std::unique_ptr<Pipeline> build_cwm(const AppConfig& config) {
  return std::make_unique<CwmPipeline>(config);
}

}  // namespace biobench::apps::detail
