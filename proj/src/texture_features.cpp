#include "cbvr/texture_features.hpp"

#include "cbvr/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cbvr {

// ---------------------------------------------------------------------------
// GLCM
// ---------------------------------------------------------------------------

GlcmMatrix glcm_matrix(const GrayRaster& g, int step) {
  if (step < 1) throw Error(ErrorKind::InvalidArgument, "glcm step must be >= 1");
  if (g.width() <= step) {
    throw Error(ErrorKind::ImageTooNarrow,
                "width " + std::to_string(g.width()) + " <= step " + std::to_string(step));
  }
  GlcmMatrix m;
  m.cells = Eigen::MatrixXd::Zero(kGlcmLevels, kGlcmLevels);
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x + step < g.width(); ++x) {
      const int a = g.at(x, y);
      const int b = g.at(x + step, y);
      m.cells(a, b) += 1.0;
      m.cells(b, a) += 1.0;
      m.pixel_counter += 2;
    }
  }
  m.cells /= static_cast<double>(m.pixel_counter);
  return m;
}

GlcmFeatures glcm_features(const GlcmMatrix& m, const GlcmOptions& options) {
  const Eigen::Index n = m.cells.rows();
  const Eigen::ArrayXXd p = m.cells.array();
  // a indexes rows, b columns.
  const Eigen::ArrayXd levels = Eigen::ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
  const Eigen::ArrayXXd a = levels.replicate(1, n);
  const Eigen::ArrayXXd b = levels.transpose().replicate(n, 1);
  const Eigen::ArrayXXd diff2 = (a - b).square();

  GlcmFeatures f;
  f.pixel_counter = static_cast<double>(m.pixel_counter);
  f.angular_second_moment = p.square().sum();
  f.contrast = (diff2 * p).sum();
  f.idm = (p / (1.0 + diff2)).sum();
  f.entropy = -(p > 0.0).select(p * p.log(), 0.0).sum();

  const double mean_x = (a * p).sum();
  const double mean_y = (b * p).sum();
  const double var_x = ((a - mean_x).square() * p).sum();
  const double var_y = ((b - mean_y).square() * p).sum();
  const double covariance = ((a - mean_x) * (b - mean_y) * p).sum();
  const double denom = options.correlation == CorrelationForm::VarianceProduct
                           ? var_x * var_y
                           : std::sqrt(var_x) * std::sqrt(var_y);
  if (denom == 0.0) {
    if (!options.degenerate_as_zero) {
      throw Error(ErrorKind::DegenerateTexture, "zero marginal variance; correlation undefined");
    }
    f.correlation = 0.0;
  } else {
    f.correlation = covariance / denom;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Gabor
// ---------------------------------------------------------------------------

GaborBank::GaborBank(const GaborBankParams& params) : params_(params) {
  if (params.scales < 2 || params.orientations < 1 || params.half_window < 1 ||
      !(params.lower_frequency > 0.0 && params.lower_frequency < params.upper_frequency)) {
    throw Error(ErrorKind::InvalidArgument, "invalid Gabor bank parameters");
  }
  const double uh = params.upper_frequency;
  const double ln2 = std::numbers::ln2;
  scale_ratio_ = std::pow(uh / params.lower_frequency, 1.0 / (params.scales - 1));
  const double a = scale_ratio_;

  // Filter half-peak supports touch in both the radial and angular direction.
  const double sigma_u = (a - 1.0) * uh / ((a + 1.0) * std::sqrt(2.0 * ln2));
  const double sigma_v = std::tan(std::numbers::pi / (2.0 * params.orientations)) *
                         (uh - 2.0 * ln2 * sigma_u * sigma_u / uh) /
                         std::sqrt(2.0 * ln2 - std::pow(2.0 * ln2 * sigma_u / uh, 2));
  const double sigma_x = 1.0 / (2.0 * std::numbers::pi * sigma_u);
  const double sigma_y = 1.0 / (2.0 * std::numbers::pi * sigma_v);

  const int hw = params.half_window;
  const int size = 2 * hw + 1;
  real_.reserve(static_cast<std::size_t>(filter_count()));
  imag_.reserve(static_cast<std::size_t>(filter_count()));
  for (int m = 0; m < params.scales; ++m) {
    const double shrink = std::pow(a, -m);
    for (int n = 0; n < params.orientations; ++n) {
      const double theta = orientation_angle(n);
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      Eigen::ArrayXXd re(size, size);
      Eigen::ArrayXXd im(size, size);
      for (int dy = -hw; dy <= hw; ++dy) {
        for (int dx = -hw; dx <= hw; ++dx) {
          const double xr = shrink * (dx * c + dy * s);
          const double yr = shrink * (-dx * s + dy * c);
          const double envelope = shrink / (2.0 * std::numbers::pi * sigma_x * sigma_y) *
                                  std::exp(-0.5 * (xr * xr / (sigma_x * sigma_x) + yr * yr / (sigma_y * sigma_y)));
          const double phase = 2.0 * std::numbers::pi * uh * xr;
          re(dy + hw, dx + hw) = envelope * std::cos(phase);
          im(dy + hw, dx + hw) = envelope * std::sin(phase);
        }
      }
      re -= re.mean();
      real_.push_back(std::move(re));
      imag_.push_back(std::move(im));
    }
  }
}

double GaborBank::center_frequency(int scale) const {
  return params_.upper_frequency * std::pow(scale_ratio_, -scale);
}

double GaborBank::orientation_angle(int orientation) const {
  return orientation * std::numbers::pi / params_.orientations;
}

const GaborBank& default_gabor_bank() {
  static const GaborBank bank;
  return bank;
}

GaborVector gabor_features(const GrayRaster& g, const GaborBank& bank) {
  const int hw = bank.params().half_window;
  const int window = 2 * hw + 1;
  if (g.width() < window || g.height() < window) {
    throw Error(ErrorKind::ImageTooSmall, "Gabor needs at least " + std::to_string(window) + "x" +
                                              std::to_string(window) + " pixels");
  }
  const Eigen::ArrayXXd image = g.pixels.cast<double>();
  const Eigen::Index out_rows = g.height() - 2 * hw;
  const Eigen::Index out_cols = g.width() - 2 * hw;
  const double image_size = static_cast<double>(g.width()) * g.height();

  const int scales = bank.params().scales;
  const int orientations = bank.params().orientations;
  GaborVector features = GaborVector::Zero(2 * scales * orientations);
  Eigen::ArrayXXd re(out_rows, out_cols);
  Eigen::ArrayXXd im(out_rows, out_cols);
  for (int m = 0; m < scales; ++m) {
    for (int n = 0; n < orientations; ++n) {
      const auto& kr = bank.real(m, n);
      const auto& ki = bank.imag(m, n);
      re.setZero();
      im.setZero();
      // Output (y, x) sums image(y - dy, x - dx) * kernel(dy, dx); the
      // output origin sits hw pixels inside the image.
      for (int ky = 0; ky < window; ++ky) {
        for (int kx = 0; kx < window; ++kx) {
          const auto src = image.block(2 * hw - ky, 2 * hw - kx, out_rows, out_cols);
          re += kr(ky, kx) * src;
          im += ki(ky, kx) * src;
        }
      }
      const Eigen::ArrayXXd magnitude = (re.square() + im.square()).sqrt();
      const int slot = 2 * (m * orientations + n);
      const double mean = magnitude.sum() / image_size;
      features(slot) = mean;
      features(slot + 1) = std::sqrt((magnitude - mean).square().sum()) / image_size;
    }
  }
  return features;
}

// ---------------------------------------------------------------------------
// Tamura
// ---------------------------------------------------------------------------

namespace {

double coarseness(const Eigen::ArrayXXd& image, int max_exponent) {
  const Eigen::Index h = image.rows();
  const Eigen::Index w = image.cols();
  Eigen::ArrayXXd integral = Eigen::ArrayXXd::Zero(h + 1, w + 1);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      integral(y + 1, x + 1) = image(y, x) + integral(y, x + 1) + integral(y + 1, x) - integral(y, x);
    }
  }
  // Mean over the window [x - half, x + half) clipped to the image.
  auto window_mean = [&](Eigen::Index x, Eigen::Index y, Eigen::Index half) {
    const Eigen::Index x0 = std::max<Eigen::Index>(0, x - half);
    const Eigen::Index y0 = std::max<Eigen::Index>(0, y - half);
    const Eigen::Index x1 = std::min(w, x + half);
    const Eigen::Index y1 = std::min(h, y + half);
    const double sum = integral(y1, x1) - integral(y0, x1) - integral(y1, x0) + integral(y0, x0);
    return sum / static_cast<double>((x1 - x0) * (y1 - y0));
  };

  std::vector<Eigen::ArrayXXd> averages;
  for (int k = 1; k <= max_exponent; ++k) {
    const Eigen::Index half = Eigen::Index{1} << (k - 1);
    Eigen::ArrayXXd avg(h, w);
    for (Eigen::Index y = 0; y < h; ++y) {
      for (Eigen::Index x = 0; x < w; ++x) avg(y, x) = window_mean(x, y, half);
    }
    averages.push_back(std::move(avg));
  }

  double total = 0.0;
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double best_energy = -1.0;
      int best_k = 1;
      for (int k = 1; k <= max_exponent; ++k) {
        const Eigen::Index half = Eigen::Index{1} << (k - 1);
        const auto& avg = averages[static_cast<std::size_t>(k - 1)];
        double eh = 0.0;
        double ev = 0.0;
        if (x - half >= 0 && x + half < w) eh = std::abs(avg(y, x + half) - avg(y, x - half));
        if (y - half >= 0 && y + half < h) ev = std::abs(avg(y + half, x) - avg(y - half, x));
        const double energy = std::max(eh, ev);
        if (energy > best_energy) {
          best_energy = energy;
          best_k = k;
        }
      }
      total += static_cast<double>(1 << best_k);
    }
  }
  return total / static_cast<double>(h * w);
}

double tamura_contrast(const Eigen::ArrayXXd& image) {
  const double mean = image.mean();
  const Eigen::ArrayXXd centered = image - mean;
  const double variance = centered.square().mean();
  if (variance == 0.0) return 0.0;
  const double fourth = centered.square().square().mean();
  // sigma / kurtosis^(1/4) with kurtosis = mu4 / sigma^4.
  return variance / std::pow(fourth, 0.25);
}

}  // namespace

TamuraVector tamura_features(const GrayRaster& g, const TamuraOptions& options) {
  const int min_side = 1 << options.max_window_exponent;
  if (g.width() < min_side || g.height() < min_side) {
    throw Error(ErrorKind::ImageTooSmall, "Tamura needs at least " + std::to_string(min_side) + "x" +
                                              std::to_string(min_side) + " pixels");
  }
  const Eigen::ArrayXXd image = g.pixels.cast<double>();

  TamuraVector out = TamuraVector::Zero();
  out(0) = coarseness(image, options.max_window_exponent);
  out(1) = tamura_contrast(image);

  const Eigen::Index h = image.rows();
  const Eigen::Index w = image.cols();
  for (Eigen::Index y = 1; y + 1 < h; ++y) {
    for (Eigen::Index x = 1; x + 1 < w; ++x) {
      const double gx = (image(y - 1, x + 1) + 2.0 * image(y, x + 1) + image(y + 1, x + 1)) -
                        (image(y - 1, x - 1) + 2.0 * image(y, x - 1) + image(y + 1, x - 1));
      const double gy = (image(y + 1, x - 1) + 2.0 * image(y + 1, x) + image(y + 1, x + 1)) -
                        (image(y - 1, x - 1) + 2.0 * image(y - 1, x) + image(y - 1, x + 1));
      if ((std::abs(gx) + std::abs(gy)) / 2.0 < options.edge_threshold) continue;
      double theta = std::atan2(gy, gx);
      if (theta < 0.0) theta += std::numbers::pi;
      if (theta >= std::numbers::pi) theta -= std::numbers::pi;
      int bin = static_cast<int>(theta * kTamuraDirectionBins / std::numbers::pi);
      bin = std::clamp(bin, 0, kTamuraDirectionBins - 1);
      out(2 + bin) += 1.0;
    }
  }
  return out;
}

}  // namespace cbvr
