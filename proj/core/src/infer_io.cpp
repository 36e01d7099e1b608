#include "biobench/infer_io.hpp"

#include <fstream>

#include <json.hpp>

namespace biobench::infer {

namespace {

using nlohmann::json;

void write_file(const json& j, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw FormatError("cannot open " + path.string() + " for writing");
  f << j.dump(2) << '\n';
}

json read_file(const std::filesystem::path& path, const char* expected_type) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!j.is_object() || j.value("type", "") != expected_type)
    throw FormatError(path.string() + ": expected model type '" +
                      expected_type + "'");
  return j;
}

template <typename T>
T get(const json& j, const char* key, const std::filesystem::path& path) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": field '" + key + "': " + e.what());
  }
}

json layer_to_json(const DenseLayer& l) {
  const char* act = "none";
  switch (l.activation) {
    case Activation::none: act = "none"; break;
    case Activation::relu: act = "relu"; break;
    case Activation::tanh_act: act = "tanh"; break;
    case Activation::softmax: act = "softmax"; break;
  }
  return {{"in", l.in},       {"out", l.out},      {"activation", act},
          {"weights", l.weights}, {"biases", l.biases}};
}

DenseLayer layer_from_json(const json& j, const std::filesystem::path& path) {
  DenseLayer l;
  l.in = get<std::size_t>(j, "in", path);
  l.out = get<std::size_t>(j, "out", path);
  l.weights = get<std::vector<double>>(j, "weights", path);
  l.biases = get<std::vector<double>>(j, "biases", path);
  const auto act = get<std::string>(j, "activation", path);
  if (act == "none")
    l.activation = Activation::none;
  else if (act == "relu")
    l.activation = Activation::relu;
  else if (act == "tanh")
    l.activation = Activation::tanh_act;
  else if (act == "softmax")
    l.activation = Activation::softmax;
  else
    throw FormatError(path.string() + ": unknown activation '" + act + "'");
  l.validate();
  return l;
}

}  // namespace

void save_svm(const SvmModel& m, const std::filesystem::path& path) {
  m.validate();
  write_file({{"type", "svm"},
              {"kernel", m.kernel == SvmKernel::linear ? "linear" : "rbf"},
              {"dim", m.dim},
              {"bias", m.bias},
              {"gamma", m.gamma},
              {"support_vectors", m.support_vectors},
              {"dual_coeffs", m.dual_coeffs}},
             path);
}

SvmModel load_svm(const std::filesystem::path& path) {
  const auto j = read_file(path, "svm");
  SvmModel m;
  const auto kernel = get<std::string>(j, "kernel", path);
  if (kernel == "linear")
    m.kernel = SvmKernel::linear;
  else if (kernel == "rbf")
    m.kernel = SvmKernel::rbf;
  else
    throw FormatError(path.string() + ": unknown kernel '" + kernel + "'");
  m.dim = get<std::size_t>(j, "dim", path);
  m.bias = get<double>(j, "bias", path);
  m.gamma = get<double>(j, "gamma", path);
  m.support_vectors = get<std::vector<double>>(j, "support_vectors", path);
  m.dual_coeffs = get<std::vector<double>>(j, "dual_coeffs", path);
  m.validate();
  return m;
}

void save_forest(const ForestModel& m, const std::filesystem::path& path) {
  m.validate();
  json trees = json::array();
  for (const auto& tree : m.trees) {
    json nodes = json::array();
    for (const auto& n : tree)
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    trees.push_back(std::move(nodes));
  }
  write_file({{"type", "forest"}, {"n_features", m.n_features}, {"trees", trees}},
             path);
}

ForestModel load_forest(const std::filesystem::path& path) {
  const auto j = read_file(path, "forest");
  ForestModel m;
  m.n_features = get<std::size_t>(j, "n_features", path);
  for (const auto& tree : get<json>(j, "trees", path)) {
    std::vector<TreeNode> nodes;
    for (const auto& n : tree) {
      if (!n.is_array() || n.size() != 5)
        throw FormatError(path.string() + ": tree node must be a 5-array");
      nodes.push_back({n[0].get<int>(), n[1].get<double>(), n[2].get<int>(),
                       n[3].get<int>(), n[4].get<double>()});
    }
    m.trees.push_back(std::move(nodes));
  }
  m.validate();
  return m;
}

void save_knn(const KnnTrainingSet& m, const std::filesystem::path& path) {
  m.validate();
  write_file({{"type", "knn"},
              {"dim", m.dim},
              {"points", m.points},
              {"labels", m.labels}},
             path);
}

KnnTrainingSet load_knn(const std::filesystem::path& path) {
  const auto j = read_file(path, "knn");
  KnnTrainingSet m;
  m.dim = get<std::size_t>(j, "dim", path);
  m.points = get<std::vector<double>>(j, "points", path);
  m.labels = get<std::vector<int>>(j, "labels", path);
  m.validate();
  return m;
}

void save_mlp(const std::vector<DenseLayer>& layers,
              const std::filesystem::path& path) {
  json arr = json::array();
  for (const auto& l : layers) {
    l.validate();
    arr.push_back(layer_to_json(l));
  }
  write_file({{"type", "mlp"}, {"layers", arr}}, path);
}

std::vector<DenseLayer> load_mlp(const std::filesystem::path& path) {
  const auto j = read_file(path, "mlp");
  std::vector<DenseLayer> layers;
  for (const auto& lj : get<json>(j, "layers", path))
    layers.push_back(layer_from_json(lj, path));
  if (layers.empty()) throw FormatError(path.string() + ": no layers");
  return layers;
}

void save_cnn(const Cnn1dModel& m, const std::filesystem::path& path) {
  m.validate();
  json blocks = json::array();
  for (const auto& b : m.blocks)
    blocks.push_back({{"in_ch", b.in_ch},
                      {"out_ch", b.out_ch},
                      {"kernel", b.kernel},
                      {"pool", b.pool},
                      {"weights", b.weights},
                      {"bn_gamma", b.bn_gamma},
                      {"bn_beta", b.bn_beta},
                      {"bn_mean", b.bn_mean},
                      {"bn_var", b.bn_var}});
  json fc = json::array();
  for (const auto& l : m.fc) fc.push_back(layer_to_json(l));
  write_file({{"type", "cnn1d"},
              {"in_ch", m.in_ch},
              {"in_len", m.in_len},
              {"blocks", blocks},
              {"fc", fc}},
             path);
}

Cnn1dModel load_cnn(const std::filesystem::path& path) {
  const auto j = read_file(path, "cnn1d");
  Cnn1dModel m;
  m.in_ch = get<std::size_t>(j, "in_ch", path);
  m.in_len = get<std::size_t>(j, "in_len", path);
  for (const auto& bj : get<json>(j, "blocks", path)) {
    ConvBlock b;
    b.in_ch = get<std::size_t>(bj, "in_ch", path);
    b.out_ch = get<std::size_t>(bj, "out_ch", path);
    b.kernel = get<std::size_t>(bj, "kernel", path);
    b.pool = get<std::size_t>(bj, "pool", path);
    b.weights = get<std::vector<double>>(bj, "weights", path);
    b.bn_gamma = get<std::vector<double>>(bj, "bn_gamma", path);
    b.bn_beta = get<std::vector<double>>(bj, "bn_beta", path);
    b.bn_mean = get<std::vector<double>>(bj, "bn_mean", path);
    b.bn_var = get<std::vector<double>>(bj, "bn_var", path);
    m.blocks.push_back(std::move(b));
  }
  for (const auto& lj : get<json>(j, "fc", path))
    m.fc.push_back(layer_from_json(lj, path));
  m.validate();
  return m;
}

void save_qcnn(const QCnnModel& m, const std::filesystem::path& path) {
  m.validate();
  json conv = json::array();
  for (const auto& l : m.conv)
    conv.push_back({{"in_ch", l.in_ch},
                    {"out_ch", l.out_ch},
                    {"kernel", l.kernel},
                    {"pool", l.pool},
                    {"shift", l.shift},
                    {"weights", l.weights},
                    {"biases", l.biases}});
  json fc = json::array();
  for (const auto& l : m.fc)
    fc.push_back({{"in", l.in},
                  {"out", l.out},
                  {"shift", l.shift},
                  {"relu", l.relu},
                  {"weights", l.weights},
                  {"biases", l.biases}});
  write_file({{"type", "qcnn1d"},
              {"in_ch", m.in_ch},
              {"in_len", m.in_len},
              {"conv", conv},
              {"fc", fc}},
             path);
}

QCnnModel load_qcnn(const std::filesystem::path& path) {
  const auto j = read_file(path, "qcnn1d");
  QCnnModel m;
  m.in_ch = get<std::size_t>(j, "in_ch", path);
  m.in_len = get<std::size_t>(j, "in_len", path);
  for (const auto& lj : get<json>(j, "conv", path)) {
    QConvLayer l;
    l.in_ch = get<std::size_t>(lj, "in_ch", path);
    l.out_ch = get<std::size_t>(lj, "out_ch", path);
    l.kernel = get<std::size_t>(lj, "kernel", path);
    l.pool = get<std::size_t>(lj, "pool", path);
    l.shift = get<int>(lj, "shift", path);
    l.weights = get<std::vector<std::int16_t>>(lj, "weights", path);
    l.biases = get<std::vector<std::int64_t>>(lj, "biases", path);
    m.conv.push_back(std::move(l));
  }
  for (const auto& lj : get<json>(j, "fc", path)) {
    QDenseLayer l;
    l.in = get<std::size_t>(lj, "in", path);
    l.out = get<std::size_t>(lj, "out", path);
    l.shift = get<int>(lj, "shift", path);
    l.relu = get<bool>(lj, "relu", path);
    l.weights = get<std::vector<std::int16_t>>(lj, "weights", path);
    l.biases = get<std::vector<std::int64_t>>(lj, "biases", path);
    m.fc.push_back(std::move(l));
  }
  m.validate();
  return m;
}

}  // namespace biobench::infer
