#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace poirec {

/// Gaussian kernel parameters. sigma and h only enter the exponent as the
/// product sigma*h (plus a rank-irrelevant 1/sigma prefactor), so sigma
/// stays fixed at 1 and h is the tuned bandwidth.
struct KernelConfig {
  double h = 1.0;
  double sigma = 1.0;
};

/// word -> dense vector map. Vectors are L2-normalized at insertion, which
/// makes squared Euclidean distance a fixed monotone function of cosine
/// (|w-t|^2 = 2 - 2 cos) so one geometry serves kernels and similarities.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim);

  /// word2vec text format: header "count dim", then "word v1 ... v_dim".
  static EmbeddingStore load(const std::string& path);

  void insert(const std::string& word, std::vector<double> vec);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(const std::string& word) const { return vectors_.count(word) != 0; }
  std::span<const double> vector(const std::string& word) const;

 private:
  std::size_t dim_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Dot product of the two unit vectors; nullopt when either word is
/// out of vocabulary (caller decides the policy).
std::optional<double> cosine(const EmbeddingStore& store, const std::string& w,
                             const std::string& t);

/// (1/(sigma*sqrt(2 pi))) * exp(-|w-t|^2 / (2 sigma^2 h^2)); symmetric.
/// nullopt when either word is out of vocabulary.
std::optional<double> gaussian_kernel(const EmbeddingStore& store, const std::string& w,
                                      const std::string& t, const KernelConfig& cfg);

struct MaxSimResult {
  double value = 1.0;
  bool oov = false;  // w itself or every seed was out of vocabulary
};

/// max over seeds of clamp(cos(w,s), 0, 1). Out-of-vocabulary seeds are
/// skipped; if w is OOV or no seed is usable the result is the neutral
/// value 1.0 with the oov flag set.
MaxSimResult max_sim(const EmbeddingStore& store, const std::string& w,
                     std::span<const std::string> seeds);

}  // namespace poirec
