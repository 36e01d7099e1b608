#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "biobench/infer.hpp"

namespace biobench::infer {

// -------------------------------------------------------------------- svm --

void SvmModel::validate() const {
  if (dim == 0) throw DomainError("SvmModel: zero feature dimension");
  if (support_vectors.empty() || support_vectors.size() % dim != 0)
    throw DomainError("SvmModel: support vector block is not n_sv x dim");
  if (dual_coeffs.size() != n_support())
    throw DomainError("SvmModel: coefficient count mismatch");
  if (kernel == SvmKernel::rbf && !(gamma > 0))
    throw DomainError("SvmModel: rbf gamma must be positive");
}

std::size_t SvmModel::device_static_bytes() const {
  return 2 * (support_vectors.size() + dual_coeffs.size() + 2);
}

double svm_decision(const SvmModel& m, std::span<const double> x,
                    KernelContext& ctx) {
  m.validate();
  if (x.size() != m.dim) throw DomainError("svm_decision: feature size mismatch");
  const std::size_t n_sv = m.n_support();
  double acc = m.bias;
  for (std::size_t s = 0; s < n_sv; ++s) {
    const double* sv = &m.support_vectors[s * m.dim];
    double k;
    if (m.kernel == SvmKernel::linear) {
      k = 0;
      for (std::size_t j = 0; j < m.dim; ++j) k += sv[j] * x[j];
    } else {
      double d2 = 0;
      for (std::size_t j = 0; j < m.dim; ++j) {
        const double d = sv[j] - x[j];
        d2 += d * d;
      }
      k = std::exp(-m.gamma * d2);
    }
    acc += m.dual_coeffs[s] * k;
  }
  const std::uint64_t per_sv = m.kernel == SvmKernel::linear ? m.dim : 2 * m.dim;
  ctx.mac(n_sv * per_sv + n_sv);
  if (m.kernel == SvmKernel::rbf) ctx.mul(3 * n_sv);
  ctx.mem(n_sv * m.dim);
  return acc;
}

int svm_classify(const SvmModel& m, std::span<const double> x,
                 KernelContext& ctx) {
  const int label = svm_decision(m, x, ctx) >= 0 ? 1 : 0;
  ctx.branch(1);
  return label;
}

// ------------------------------------------------------------------ forest --

void ForestModel::validate() const {
  if (n_features == 0) throw DomainError("ForestModel: zero feature count");
  if (trees.empty()) throw DomainError("ForestModel: empty forest");
  for (const auto& tree : trees) {
    if (tree.empty()) throw DomainError("ForestModel: empty tree");
    for (const auto& node : tree) {
      if (node.feature >= static_cast<int>(n_features))
        throw DomainError("ForestModel: feature index out of range");
      if (node.feature >= 0) {
        const auto sz = static_cast<int>(tree.size());
        if (node.left < 0 || node.left >= sz || node.right < 0 || node.right >= sz)
          throw DomainError("ForestModel: child index out of range");
      }
    }
  }
}

std::size_t ForestModel::device_static_bytes() const {
  std::size_t nodes = 0;
  for (const auto& t : trees) nodes += t.size();
  // feature id (2) + threshold (2) + children (2 x 2) + value (2)
  return nodes * 10;
}

double forest_predict(const ForestModel& m, std::span<const double> x,
                      KernelContext& ctx) {
  m.validate();
  if (x.size() != m.n_features)
    throw DomainError("forest_predict: feature size mismatch");
  double sum = 0;
  std::uint64_t depth_total = 0;
  for (const auto& tree : m.trees) {
    int idx = 0;
    while (tree[static_cast<std::size_t>(idx)].feature >= 0) {
      const auto& node = tree[static_cast<std::size_t>(idx)];
      idx = x[static_cast<std::size_t>(node.feature)] <= node.threshold
                ? node.left
                : node.right;
      ++depth_total;
    }
    sum += tree[static_cast<std::size_t>(idx)].value;
  }
  ctx.branch(depth_total + m.trees.size());
  ctx.mem(2 * depth_total);
  ctx.mac(m.trees.size());
  ctx.mul(1);
  return sum / static_cast<double>(m.trees.size());
}

int forest_classify(const ForestModel& m, std::span<const double> x,
                    KernelContext& ctx) {
  const int label = forest_predict(m, x, ctx) >= 0.5 ? 1 : 0;
  ctx.branch(1);
  return label;
}

// -------------------------------------------------------------------- knn --

void KnnTrainingSet::validate() const {
  if (dim == 0) throw DomainError("KnnTrainingSet: zero feature dimension");
  if (points.empty() || points.size() % dim != 0)
    throw DomainError("KnnTrainingSet: point block is not n x dim");
  if (labels.size() != size())
    throw DomainError("KnnTrainingSet: label count mismatch");
}

std::size_t KnnTrainingSet::device_static_bytes() const {
  return 2 * points.size() + labels.size();
}

std::vector<std::size_t> partial_select_k(std::span<const double> values,
                                          std::size_t k, KernelContext& ctx) {
  const std::size_t n = values.size();
  if (k == 0 || k > n) throw DomainError("partial_select_k: k out of range");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t pass = 0; pass < k; ++pass) {
    std::size_t best = pass;
    for (std::size_t j = pass + 1; j < n; ++j)
      if (values[order[j]] < values[order[best]]) best = j;
    std::swap(order[pass], order[best]);
  }
  ctx.branch(k * n - k * (k + 1) / 2);
  ctx.mem(3 * k);
  order.resize(k);
  return order;
}

int knn_classify(const KnnTrainingSet& set, std::span<const double> x,
                 std::size_t k, KernelContext& ctx) {
  set.validate();
  if (x.size() != set.dim) throw DomainError("knn_classify: feature size mismatch");
  const std::size_t n = set.size();
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < set.dim; ++j) {
      const double d = set.points[i * set.dim + j] - x[j];
      acc += d * d;
    }
    d2[i] = acc;
  }
  ctx.mac(2 * n * set.dim);
  ctx.mem(n * set.dim);

  const auto nearest = partial_select_k(d2, k, ctx);
  std::map<int, std::size_t> votes;
  for (const auto idx : nearest) ++votes[set.labels[idx]];
  int winner = nearest.empty() ? 0 : set.labels[nearest[0]];
  std::size_t best = 0;
  for (const auto& [label, count] : votes) {
    if (count > best) {  // map iterates ascending, so ties keep the smaller
      best = count;
      winner = label;
    }
  }
  ctx.branch(k + votes.size());
  return winner;
}

// -------------------------------------------------------------------- mlp --

void DenseLayer::validate() const {
  if (in == 0 || out == 0) throw DomainError("DenseLayer: zero dimension");
  if (weights.size() != in * out) throw DomainError("DenseLayer: weight shape");
  if (biases.size() != out) throw DomainError("DenseLayer: bias shape");
}

std::vector<double> mlp_forward(std::span<const DenseLayer> layers,
                                std::span<const double> x, KernelContext& ctx) {
  if (layers.empty()) throw DomainError("mlp_forward: no layers");
  std::vector<double> cur(x.begin(), x.end());
  std::uint64_t macs = 0, trans = 0;
  for (const auto& layer : layers) {
    layer.validate();
    if (cur.size() != layer.in)
      throw DomainError("mlp_forward: layer input size mismatch");
    std::vector<double> next(layer.out);
    for (std::size_t o = 0; o < layer.out; ++o) {
      double acc = layer.biases[o];
      const double* w = &layer.weights[o * layer.in];
      for (std::size_t i = 0; i < layer.in; ++i) acc += w[i] * cur[i];
      next[o] = acc;
    }
    macs += layer.in * layer.out + layer.out;
    switch (layer.activation) {
      case Activation::none:
        break;
      case Activation::relu:
        for (auto& v : next) v = std::max(0.0, v);
        ctx.branch(layer.out);
        break;
      case Activation::tanh_act:
        for (auto& v : next) v = std::tanh(v);
        trans += layer.out;
        break;
      case Activation::softmax: {
        const double m = *std::max_element(next.begin(), next.end());
        double z = 0;
        for (auto& v : next) {
          v = std::exp(v - m);
          z += v;
        }
        for (auto& v : next) v /= z;
        trans += layer.out;
        macs += 2 * layer.out;
        break;
      }
    }
    cur = std::move(next);
  }
  ctx.mac(macs);
  ctx.mul(2 * trans);
  ctx.mem(macs);
  return cur;
}

std::size_t mlp_device_static_bytes(std::span<const DenseLayer> layers) {
  std::size_t words = 0;
  for (const auto& l : layers) words += l.weights.size() + l.biases.size();
  return 4 * words;
}

// ------------------------------------------------------------------ fuzzy --

double Trapezoid::membership(double x) const {
  if (x < a || x > d) return 0.0;
  if (x >= b && x <= c) return 1.0;
  if (x < b) return a == b ? 1.0 : (x - a) / (b - a);
  return c == d ? 1.0 : (d - x) / (d - c);
}

void Trapezoid::validate() const {
  if (!(a <= b && b <= c && c <= d))
    throw DomainError("Trapezoid: corners must be ordered a <= b <= c <= d");
}

FuzzyDecision fuzzy_classify(std::span<const FuzzyRule> rules,
                             std::span<const double> features,
                             KernelContext& ctx) {
  if (rules.empty()) throw DomainError("fuzzy_classify: empty rule base");
  std::map<int, double> activation;
  std::uint64_t terms = 0;
  for (const auto& rule : rules) {
    if (rule.terms.size() != features.size())
      throw DomainError("fuzzy_classify: rule arity mismatch");
    double strength = 1.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      rule.terms[i].validate();
      strength = std::min(strength, rule.terms[i].membership(features[i]));
      ++terms;
    }
    auto [it, inserted] = activation.try_emplace(rule.output_class, strength);
    if (!inserted) it->second = std::max(it->second, strength);
  }
  FuzzyDecision out;
  out.winner = activation.begin()->first;
  out.strength = activation.begin()->second;
  for (const auto& [cls, s] : activation) {
    if (s > out.strength) {  // ascending iteration keeps the smaller class
      out.winner = cls;
      out.strength = s;
    }
  }
  ctx.branch(3 * terms + rules.size() + activation.size());
  ctx.mul(terms);
  ctx.mem(2 * terms);
  return out;
}

FuzzyDecision rp_classify(const BeatFiducials& beat,
                          std::span<const FuzzyRule> rules,
                          KernelContext& ctx) {
  if (beat.r_index < 0) throw DomainError("rp_classify: beat has no R peak");
  if (!(beat.rr_s > 0))
    throw DomainError("rp_classify: beat needs a neighbor interval");
  if (rules.empty()) return {0, 0.0};  // documented fallback: normal

  std::vector<double> features;
  features.reserve(1 + beat.intervals_s.size());
  const double median =
      beat.median_rr_s > 0 ? beat.median_rr_s : beat.rr_s;
  features.push_back(beat.rr_s / median);
  for (double iv : beat.intervals_s) features.push_back(iv / beat.rr_s);
  ctx.mul(features.size());
  return fuzzy_classify(rules, features, ctx);
}

std::vector<FuzzyRule> default_rp_rules(std::size_t n_intervals) {
  const Trapezoid wildcard{-1e9, -1e9, 1e9, 1e9};
  auto make = [&](Trapezoid rr_term, int cls) {
    FuzzyRule rule;
    rule.terms.push_back(rr_term);
    rule.terms.insert(rule.terms.end(), n_intervals, wildcard);
    rule.output_class = cls;
    return rule;
  };
  return {
      make({0.60, 0.85, 1.15, 1.40}, 0),  // steady rhythm
      make({0.00, 0.00, 0.50, 0.75}, 1),  // premature beat
      make({1.25, 1.50, 8.00, 8.00}, 1),  // dropped or late beat
  };
}

}  // namespace biobench::infer
