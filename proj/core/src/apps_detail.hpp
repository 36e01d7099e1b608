// Internal glue shared by the app pipeline translation units.
#ifndef BIOBENCH_APPS_DETAIL_HPP
#define BIOBENCH_APPS_DETAIL_HPP

#include <memory>
#include <vector>

#include "biobench/apps.hpp"
#include "biobench/infer.hpp"
#include "biobench/train.hpp"

namespace biobench::apps::detail {

// Built-in models, derived from config.model_seed so every run of a default
// config sees identical parameters.
infer::SvmModel make_svm_model(std::uint64_t seed, std::size_t dim);
infer::ForestModel make_forest_model(std::uint64_t seed, std::size_t features,
                                     std::size_t trees, int depth);
infer::KnnTrainingSet make_knn_training_set(std::uint64_t seed, std::size_t n);
std::vector<infer::DenseLayer> make_mlp_model(std::uint64_t seed,
                                              std::size_t in,
                                              std::size_t hidden,
                                              std::size_t out);
infer::Cnn1dModel make_cnn_model(std::uint64_t seed, std::size_t in_ch,
                                 std::size_t in_len);
train::TrainingBatch make_bpfree_batch(std::uint64_t seed,
                                       const infer::Cnn1dModel& model);

ArithAttribution attribution_for(const AppConfig& config);

// build_app promises configuration errors for malformed model files.
template <class F>
auto load_model_or_config_error(F&& load, const std::string& path) {
  try {
    return load();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("model " + path + ": " + e.what());
  }
}

// Pipeline factories, one per translation unit group.
std::unique_ptr<Pipeline> build_hcl(const AppConfig& config);
std::unique_ptr<Pipeline> build_seizdetsvm(const AppConfig& config);
std::unique_ptr<Pipeline> build_seizdetcnn(const AppConfig& config);
std::unique_ptr<Pipeline> build_cwm(const AppConfig& config);
std::unique_ptr<Pipeline> build_gcl(const AppConfig& config);
std::unique_ptr<Pipeline> build_coughdet(const AppConfig& config);
std::unique_ptr<Pipeline> build_ecl(const AppConfig& config);
std::unique_ptr<Pipeline> build_bpfree(const AppConfig& config);

}  // namespace biobench::apps::detail

#endif  // BIOBENCH_APPS_DETAIL_HPP
