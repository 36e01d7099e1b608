#ifndef BIOBENCH_INFER_IO_HPP
#define BIOBENCH_INFER_IO_HPP

#include <filesystem>

#include "biobench/infer.hpp"

/// JSON persistence for the model types.  Every file carries a "type" tag
/// checked on load; malformed files raise FormatError, shape problems the
/// usual DomainError from validate().
namespace biobench::infer {

void save_svm(const SvmModel& m, const std::filesystem::path& path);
SvmModel load_svm(const std::filesystem::path& path);

void save_forest(const ForestModel& m, const std::filesystem::path& path);
ForestModel load_forest(const std::filesystem::path& path);

void save_knn(const KnnTrainingSet& m, const std::filesystem::path& path);
KnnTrainingSet load_knn(const std::filesystem::path& path);

void save_mlp(const std::vector<DenseLayer>& layers,
              const std::filesystem::path& path);
std::vector<DenseLayer> load_mlp(const std::filesystem::path& path);

void save_cnn(const Cnn1dModel& m, const std::filesystem::path& path);
Cnn1dModel load_cnn(const std::filesystem::path& path);

void save_qcnn(const QCnnModel& m, const std::filesystem::path& path);
QCnnModel load_qcnn(const std::filesystem::path& path);

}  // namespace biobench::infer

#endif  // BIOBENCH_INFER_IO_HPP
