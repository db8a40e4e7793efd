#include "cbvr/retrieval.hpp"

#include "cbvr/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace cbvr {

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Histogram: return "histogram";
    case FeatureKind::Glcm: return "glcm";
    case FeatureKind::Gabor: return "gabor";
    case FeatureKind::Tamura: return "tamura";
    case FeatureKind::Correlogram: return "correlogram";
    case FeatureKind::Naive: return "naive";
    case FeatureKind::Regions: return "regions";
  }
  return "unknown";
}

std::optional<FeatureKind> feature_kind_from_string(std::string_view name) {
  for (const auto kind : kAllFeatureKinds) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

bool operator==(const FeatureSet& a, const FeatureSet& b) {
  return a.histogram == b.histogram && a.glcm == b.glcm && a.gabor.size() == b.gabor.size() &&
         a.gabor == b.gabor && a.tamura == b.tamura && a.correlogram == b.correlogram && a.naive == b.naive &&
         a.major_regions == b.major_regions && a.range_key == b.range_key;
}

FeatureSet extract_feature_set(const Raster& frame, const ExtractionOptions& options) {
  FeatureSet f;
  f.histogram = rgb_histogram(frame);
  f.range_key = assign_range(f.histogram, options.range_thresholds);
  f.correlogram = auto_correlogram(frame, options.correlogram_distance);
  f.naive = naive_signature(frame);

  const GrayRaster gray = to_grayscale(frame);
  f.glcm = glcm_features(glcm_matrix(gray, options.glcm_step), options.glcm);
  f.major_regions = count_major_regions(gray, options.major_region_fraction);

  const int gabor_window = 2 * default_gabor_bank().params().half_window + 1;
  const int gabor_width = std::max(
      gabor_window, static_cast<int>(std::lround(static_cast<double>(gray.width()) * kGaborMaxHeight / gray.height())));
  f.gabor = gabor_features(rescale(gray, gabor_width, kGaborMaxHeight));

  constexpr int kTamuraMinSide = 32;
  if (gray.width() < kTamuraMinSide || gray.height() < kTamuraMinSide) {
    f.tamura = tamura_features(
        rescale(gray, std::max(gray.width(), kTamuraMinSide), std::max(gray.height(), kTamuraMinSide)));
  } else {
    f.tamura = tamura_features(gray);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

double feature_distance(const ColorHistogram& a, const ColorHistogram& b) {
  if (a.total <= 0 || b.total <= 0) throw Error(ErrorKind::EmptyHistogram, "cannot compare empty histograms");
  return (a.bins.cast<double>() / static_cast<double>(a.total) - b.bins.cast<double>() / static_cast<double>(b.total))
      .abs()
      .sum();
}

namespace {

Eigen::Matrix<double, 5, 1> glcm_vector(const GlcmFeatures& f) {
  return {f.angular_second_moment, f.contrast, f.correlation, f.idm, f.entropy};
}

}  // namespace

double feature_distance(const GlcmFeatures& a, const GlcmFeatures& b) {
  return (glcm_vector(a) - glcm_vector(b)).norm();
}

double feature_distance(const GaborVector& a, const GaborVector& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "Gabor vectors differ in length");
  return (a - b).norm();
}

double feature_distance(const TamuraVector& a, const TamuraVector& b) { return (a - b).norm(); }

double feature_distance(const AutoCorrelogram& a, const AutoCorrelogram& b) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "correlograms differ in shape");
  }
  return (a.values - b.values).abs().sum();
}

double feature_distance(const NaiveSignature& a, const NaiveSignature& b) {
  return (a.points - b.points).rowwise().norm().sum();
}

double feature_distance(FeatureKind kind, const FeatureSet& a, const FeatureSet& b) {
  switch (kind) {
    case FeatureKind::Histogram: return feature_distance(a.histogram, b.histogram);
    case FeatureKind::Glcm: return feature_distance(a.glcm, b.glcm);
    case FeatureKind::Gabor: return feature_distance(a.gabor, b.gabor);
    case FeatureKind::Tamura: return feature_distance(a.tamura, b.tamura);
    case FeatureKind::Correlogram: return feature_distance(a.correlogram, b.correlogram);
    case FeatureKind::Naive: return feature_distance(a.naive, b.naive);
    case FeatureKind::Regions: return std::abs(static_cast<double>(a.major_regions - b.major_regions));
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Ranking
// ---------------------------------------------------------------------------

WeightProfile::WeightProfile() { w_.fill(1.0 / static_cast<double>(kFeatureKinds)); }

WeightProfile::WeightProfile(const std::array<double, kFeatureKinds>& raw) {
  double sum = 0.0;
  for (const double v : raw) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "weights must be finite and >= 0");
    sum += v;
  }
  if (sum <= 0.0) throw Error(ErrorKind::InvalidArgument, "at least one weight must be positive");
  for (std::size_t i = 0; i < kFeatureKinds; ++i) w_[i] = raw[i] / sum;
}

WeightProfile WeightProfile::only(FeatureKind kind) {
  std::array<double, kFeatureKinds> raw{};
  raw[static_cast<std::size_t>(kind)] = 1.0;
  return WeightProfile(raw);
}

std::vector<RankedResult> combined_rank(const FeatureSet& query, std::span<const Candidate> candidates,
                                        const WeightProfile& weights, std::size_t k) {
  if (candidates.empty()) throw Error(ErrorKind::NoCandidates, "no candidates to rank");
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");

  const auto n = static_cast<Eigen::Index>(candidates.size());
  Eigen::ArrayXXd raw(n, static_cast<Eigen::Index>(kFeatureKinds));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < kFeatureKinds; ++f) {
      raw(i, static_cast<Eigen::Index>(f)) =
          feature_distance(kAllFeatureKinds[f], query, *candidates[static_cast<std::size_t>(i)].features);
    }
  }

  Eigen::ArrayXd combined = Eigen::ArrayXd::Zero(n);
  for (std::size_t f = 0; f < kFeatureKinds; ++f) {
    const double w = weights.values()[f];
    if (w == 0.0) continue;
    const auto column = raw.col(static_cast<Eigen::Index>(f));
    const double lo = column.minCoeff();
    const double span = column.maxCoeff() - lo;
    if (span > 0.0) combined += w * (column - lo) / span;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const std::size_t keep = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      if (combined(a) != combined(b)) return combined(a) < combined(b);
                      return candidates[static_cast<std::size_t>(a)].id < candidates[static_cast<std::size_t>(b)].id;
                    });

  std::vector<RankedResult> out;
  out.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) {
    const Eigen::Index i = order[r];
    RankedResult result;
    result.frame_id = candidates[static_cast<std::size_t>(i)].id;
    for (std::size_t f = 0; f < kFeatureKinds; ++f) result.per_feature[f] = raw(i, static_cast<Eigen::Index>(f));
    result.combined = combined(i);
    out.push_back(result);
  }
  return out;
}

double precision_at_k(std::span<const FrameId> ranked, const std::set<FrameId>& relevant, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  const std::size_t depth = std::min(k, ranked.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) hits += relevant.count(ranked[i]);
  return static_cast<double>(hits) / static_cast<double>(k);
}

// ---------------------------------------------------------------------------
// Evaluation report
// ---------------------------------------------------------------------------

std::string_view column_title(EvalMethod m) {
  switch (m) {
    case EvalMethod::Glcm: return "GLCM";
    case EvalMethod::Gabor: return "Gabor";
    case EvalMethod::Tamura: return "Tamura";
    case EvalMethod::Histogram: return "Histogram";
    case EvalMethod::Autocorrelation: return "Autocorrelation";
    case EvalMethod::RegionGrowing: return "Simple Region Growing";
    case EvalMethod::Combined: return "Combined";
  }
  return "";
}

WeightProfile method_weights(EvalMethod m) {
  switch (m) {
    case EvalMethod::Glcm: return WeightProfile::only(FeatureKind::Glcm);
    case EvalMethod::Gabor: return WeightProfile::only(FeatureKind::Gabor);
    case EvalMethod::Tamura: return WeightProfile::only(FeatureKind::Tamura);
    case EvalMethod::Histogram: return WeightProfile::only(FeatureKind::Histogram);
    case EvalMethod::Autocorrelation: return WeightProfile::only(FeatureKind::Correlogram);
    case EvalMethod::RegionGrowing: return WeightProfile::only(FeatureKind::Regions);
    case EvalMethod::Combined: return WeightProfile();
  }
  return WeightProfile();
}

PrecisionTable precision_report(std::span<const Candidate> corpus, std::span<const LabeledQuery> queries,
                                const std::vector<int>& ks) {
  if (queries.empty()) throw Error(ErrorKind::NoQueries, "no labeled queries");
  if (ks.empty() || *std::min_element(ks.begin(), ks.end()) < 1) {
    throw Error(ErrorKind::InvalidArgument, "precision depths must be >= 1");
  }
  const auto depth = static_cast<std::size_t>(*std::max_element(ks.begin(), ks.end()));

  PrecisionTable table;
  table.ks = ks;
  table.mean_precision = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ks.size()), kEvalMethods);
  for (const auto& q : queries) {
    std::vector<Candidate> pool;
    pool.reserve(corpus.size());
    for (const auto& c : corpus) {
      if (!q.exclude || c.id != *q.exclude) pool.push_back(c);
    }
    for (std::size_t m = 0; m < kEvalMethods; ++m) {
      std::vector<FrameId> ranked;
      if (!pool.empty()) {
        for (const auto& r : combined_rank(q.features, pool, method_weights(static_cast<EvalMethod>(m)), depth)) {
          ranked.push_back(r.frame_id);
        }
      }
      for (std::size_t i = 0; i < ks.size(); ++i) {
        table.mean_precision(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) +=
            precision_at_k(ranked, q.relevant, static_cast<std::size_t>(ks[i]));
      }
    }
  }
  table.mean_precision /= static_cast<double>(queries.size());
  return table;
}

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string PrecisionTable::to_text() const {
  std::vector<std::string> labels;
  std::size_t label_width = 0;
  for (const int k : ks) {
    labels.push_back("Avg. prec.at " + std::to_string(k) + " frames");
    label_width = std::max(label_width, labels.back().size());
  }
  std::vector<std::size_t> widths;
  std::ostringstream out;
  out << std::string(label_width, ' ');
  for (std::size_t m = 0; m < kEvalMethods; ++m) {
    const auto title = column_title(static_cast<EvalMethod>(m));
    widths.push_back(std::max<std::size_t>(title.size(), 5));
    out << "  " << std::string(widths.back() - title.size(), ' ') << title;
  }
  out << '\n';
  for (std::size_t i = 0; i < ks.size(); ++i) {
    out << labels[i] << std::string(label_width - labels[i].size(), ' ');
    for (std::size_t m = 0; m < kEvalMethods; ++m) {
      const auto cell = fixed3(mean_precision(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)));
      out << "  " << std::string(widths[m] - cell.size(), ' ') << cell;
    }
    out << '\n';
  }
  return out.str();
}

std::string PrecisionTable::to_csv() const {
  std::ostringstream out;
  out << "depth";
  for (std::size_t m = 0; m < kEvalMethods; ++m) out << ',' << column_title(static_cast<EvalMethod>(m));
  out << '\n';
  for (std::size_t i = 0; i < ks.size(); ++i) {
    out << "Avg. prec.at " << ks[i] << " frames";
    for (std::size_t m = 0; m < kEvalMethods; ++m) {
      out << ',' << fixed3(mean_precision(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cbvr
