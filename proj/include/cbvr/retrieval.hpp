#pragma once

#include "cbvr/color_features.hpp"
#include "cbvr/range_index.hpp"
#include "cbvr/segmentation.hpp"
#include "cbvr/texture_features.hpp"

#include <array>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cbvr {

enum class FeatureKind { Histogram, Glcm, Gabor, Tamura, Correlogram, Naive, Regions };

inline constexpr std::size_t kFeatureKinds = 7;
inline constexpr std::array<FeatureKind, kFeatureKinds> kAllFeatureKinds = {
    FeatureKind::Histogram,   FeatureKind::Glcm,  FeatureKind::Gabor,   FeatureKind::Tamura,
    FeatureKind::Correlogram, FeatureKind::Naive, FeatureKind::Regions};

std::string_view to_string(FeatureKind kind);
std::optional<FeatureKind> feature_kind_from_string(std::string_view name);

/// The seven descriptors of one key frame plus its index range.
struct FeatureSet {
  ColorHistogram histogram;
  GlcmFeatures glcm;
  GaborVector gabor;
  TamuraVector tamura = TamuraVector::Zero();
  AutoCorrelogram correlogram;
  NaiveSignature naive;
  int major_regions = 0;
  RangeKey range_key;

  friend bool operator==(const FeatureSet& a, const FeatureSet& b);
};

struct ExtractionOptions {
  GlcmOptions glcm{CorrelationForm::VarianceProduct, /*degenerate_as_zero=*/true};
  int glcm_step = 1;
  int correlogram_distance = kDefaultCorrelogramDistance;
  double major_region_fraction = kDefaultMajorRegionFraction;
  RangeThresholds range_thresholds;
};

/// Runs every extractor on one frame. Texture passes see the BT.601 gray
/// image; the Gabor pass first scales it to a height of 64.
FeatureSet extract_feature_set(const Raster& frame, const ExtractionOptions& options = {});

// Per-feature distances. Histograms and correlograms use L1 (histograms
// over mass-normalized bins), GLCM/Gabor/Tamura use L2, the naive signature
// sums per-point RGB Euclidean distances, regions use |a - b|.
double feature_distance(const ColorHistogram& a, const ColorHistogram& b);
double feature_distance(const GlcmFeatures& a, const GlcmFeatures& b);
double feature_distance(const GaborVector& a, const GaborVector& b);
double feature_distance(const TamuraVector& a, const TamuraVector& b);
double feature_distance(const AutoCorrelogram& a, const AutoCorrelogram& b);
double feature_distance(const NaiveSignature& a, const NaiveSignature& b);
double feature_distance(FeatureKind kind, const FeatureSet& a, const FeatureSet& b);

/// Non-negative per-feature weights, indexed like kAllFeatureKinds.
class WeightProfile {
 public:
  /// 1/7 each.
  WeightProfile();
  /// Throws InvalidArgument on negative or all-zero input; normalizes to sum 1.
  explicit WeightProfile(const std::array<double, kFeatureKinds>& raw);

  static WeightProfile only(FeatureKind kind);

  double operator[](FeatureKind kind) const noexcept { return w_[static_cast<std::size_t>(kind)]; }
  const std::array<double, kFeatureKinds>& values() const noexcept { return w_; }

 private:
  std::array<double, kFeatureKinds> w_;
};

struct Candidate {
  FrameId id;
  const FeatureSet* features;
};

struct RankedResult {
  FrameId frame_id = 0;
  std::array<double, kFeatureKinds> per_feature{};
  double combined = 0.0;
};

/// Min-max normalizes each feature's distances over the candidate set
/// (constant columns become 0), forms the weighted sum, and returns the k
/// best ascending with ties broken by frame id. Throws NoCandidates.
std::vector<RankedResult> combined_rank(const FeatureSet& query, std::span<const Candidate> candidates,
                                        const WeightProfile& weights, std::size_t k);

/// |top-k of ranked ∩ relevant| / k.
double precision_at_k(std::span<const FrameId> ranked, const std::set<FrameId>& relevant, std::size_t k);

/// Methods in report column order.
enum class EvalMethod { Glcm, Gabor, Tamura, Histogram, Autocorrelation, RegionGrowing, Combined };
inline constexpr std::size_t kEvalMethods = 7;
std::string_view column_title(EvalMethod m);
/// Ranking weights used for a report column.
WeightProfile method_weights(EvalMethod m);

struct LabeledQuery {
  std::string name;
  FeatureSet features;
  std::set<FrameId> relevant;
  /// Left out of the ranking, e.g. the query frame itself.
  std::optional<FrameId> exclude;
};

inline const std::vector<int> kDefaultPrecisionDepths = {20, 30, 50, 100};

struct PrecisionTable {
  std::vector<int> ks;
  /// mean_precision(k row, method column).
  Eigen::MatrixXd mean_precision;

  std::string to_text() const;
  std::string to_csv() const;
};

/// Ranks the whole corpus per method for every query and averages
/// precision@k. Throws NoQueries.
PrecisionTable precision_report(std::span<const Candidate> corpus, std::span<const LabeledQuery> queries,
                                const std::vector<int>& ks = kDefaultPrecisionDepths);

}  // namespace cbvr
