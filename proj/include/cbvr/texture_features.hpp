#pragma once

#include "cbvr/imaging.hpp"

#include <Eigen/Core>

#include <vector>

namespace cbvr {

// ---------------------------------------------------------------------------
// Gray-level co-occurrence
// ---------------------------------------------------------------------------

inline constexpr int kGlcmLevels = 257;

/// Symmetric, normalized co-occurrence matrix for a horizontal offset.
struct GlcmMatrix {
  Eigen::MatrixXd cells;
  std::int64_t pixel_counter = 0;
};

struct GlcmFeatures {
  double pixel_counter = 0.0;
  double angular_second_moment = 0.0;
  double contrast = 0.0;
  double correlation = 0.0;
  double idm = 0.0;
  double entropy = 0.0;

  friend bool operator==(const GlcmFeatures&, const GlcmFeatures&) = default;
};

enum class CorrelationForm {
  /// Divide by the product of the marginal variances.
  VarianceProduct,
  /// Haralick: divide by the product of the marginal standard deviations.
  Standard,
};

struct GlcmOptions {
  CorrelationForm correlation = CorrelationForm::VarianceProduct;
  /// When false a zero-variance marginal throws DegenerateTexture; when true
  /// correlation is reported as 0.
  bool degenerate_as_zero = false;
};

/// Pairs (x, y)-(x+step, y) for x < width - step. Throws ImageTooNarrow.
GlcmMatrix glcm_matrix(const GrayRaster& g, int step = 1);

GlcmFeatures glcm_features(const GlcmMatrix& m, const GlcmOptions& options = {});

// ---------------------------------------------------------------------------
// Gabor filter bank
// ---------------------------------------------------------------------------

struct GaborBankParams {
  int scales = 5;
  int orientations = 6;
  double lower_frequency = 0.05;
  double upper_frequency = 0.4;
  int half_window = 15;
};

/// Precomputed complex Gabor kernels, (2*half_window+1)^2 taps each.
/// Kernel rows index the y offset, columns the x offset. The real part of
/// every kernel is shifted to zero mean so the bank has no DC response.
class GaborBank {
 public:
  explicit GaborBank(const GaborBankParams& params = {});

  const GaborBankParams& params() const noexcept { return params_; }
  int filter_count() const noexcept { return params_.scales * params_.orientations; }

  const Eigen::ArrayXXd& real(int scale, int orientation) const { return real_[index(scale, orientation)]; }
  const Eigen::ArrayXXd& imag(int scale, int orientation) const { return imag_[index(scale, orientation)]; }

  /// Radial center frequency in cycles/pixel; scale 0 is the highest.
  double center_frequency(int scale) const;
  /// Modulation direction in radians: orientation * pi / orientations.
  double orientation_angle(int orientation) const;

 private:
  std::size_t index(int scale, int orientation) const {
    return static_cast<std::size_t>(scale * params_.orientations + orientation);
  }

  GaborBankParams params_;
  double scale_ratio_ = 1.0;
  std::vector<Eigen::ArrayXXd> real_;
  std::vector<Eigen::ArrayXXd> imag_;
};

const GaborBank& default_gabor_bank();

/// Entry 2(mN+n) is sum|response| / imageSize for filter (m, n) and entry
/// 2(mN+n)+1 is sqrt(sum(|response| - that mean)^2) / imageSize.
using GaborVector = Eigen::VectorXd;

/// Valid-region convolution (no padding). Throws ImageTooSmall when either
/// side is shorter than the kernel window.
GaborVector gabor_features(const GrayRaster& g, const GaborBank& bank = default_gabor_bank());

/// Height the ingestion pipeline scales frames to before the Gabor pass.
inline constexpr int kGaborMaxHeight = 64;

// ---------------------------------------------------------------------------
// Tamura
// ---------------------------------------------------------------------------

inline constexpr int kTamuraDirectionBins = 16;
inline constexpr int kTamuraLength = 2 + kTamuraDirectionBins;

/// [coarseness, contrast, 16 raw direction counts].
using TamuraVector = Eigen::Matrix<double, kTamuraLength, 1>;

struct TamuraOptions {
  int max_window_exponent = 5;
  double edge_threshold = 12.0;
};

/// Throws ImageTooSmall below 32x32.
TamuraVector tamura_features(const GrayRaster& g, const TamuraOptions& options = {});

}  // namespace cbvr
