#include "cbvr/serialization.hpp"

#include "cbvr/error.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <vector>

namespace cbvr {

std::string format_real(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

namespace {

template <typename Range>
void append_reals(std::string& out, const Range& values) {
  for (const double v : values) {
    out += ' ';
    out += format_real(v);
  }
}

std::vector<std::string_view> tokenize(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorKind::MalformedFeatureString, what); }

double to_real(std::string_view token) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end) malformed("not a number: '" + std::string(token) + "'");
  return v;
}

std::int64_t to_count(std::string_view token) {
  std::int64_t v = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end || v < 0) malformed("not a count: '" + std::string(token) + "'");
  return v;
}

// Checks "<prefix> <n>" and that exactly n values follow; returns them.
std::vector<std::string_view> counted_body(std::string_view text, std::string_view prefix,
                                           std::int64_t* declared = nullptr) {
  auto tokens = tokenize(text);
  if (tokens.size() < 2 || tokens[0] != prefix) malformed("expected prefix '" + std::string(prefix) + "'");
  const std::int64_t n = to_count(tokens[1]);
  if (static_cast<std::int64_t>(tokens.size()) - 2 != n) {
    malformed(std::string(prefix) + " declares " + std::to_string(n) + " values, found " +
              std::to_string(tokens.size() - 2));
  }
  if (declared) *declared = n;
  return {tokens.begin() + 2, tokens.end()};
}

}  // namespace

std::string serialize(const ColorHistogram& h) {
  std::string out = "RGB 256";
  for (const auto b : h.bins) {
    out += ' ';
    out += std::to_string(b);
  }
  return out;
}

std::string serialize(const GlcmFeatures& f) {
  std::string out = format_real(f.pixel_counter);
  append_reals(out, std::array{f.angular_second_moment, f.contrast, f.correlation, f.idm, f.entropy});
  return out;
}

std::string serialize(const GaborVector& v) {
  std::string out = "gabor " + std::to_string(v.size());
  append_reals(out, v);
  return out;
}

std::string serialize(const TamuraVector& v) {
  std::string out = "Tamura " + std::to_string(v.size());
  append_reals(out, v);
  return out;
}

std::string serialize(const AutoCorrelogram& c) {
  std::string out = "ACC " + std::to_string(c.values.cols());
  // Row-major traversal gives color-major, distance-minor order.
  for (Eigen::Index color = 0; color < c.values.rows(); ++color) append_reals(out, c.values.row(color));
  return out;
}

std::string serialize(const NaiveSignature& s) {
  std::string out = "NaiveVector";
  for (int p = 0; p < NaiveSignature::kPoints; ++p) append_reals(out, s.points.row(p));
  return out;
}

ColorHistogram parse_histogram(std::string_view text) {
  std::int64_t n = 0;
  const auto body = counted_body(text, "RGB", &n);
  if (n != 256) malformed("RGB histogram must have 256 bins");
  ColorHistogram h;
  for (int i = 0; i < 256; ++i) h.bins(i) = to_count(body[static_cast<std::size_t>(i)]);
  h.total = h.bins.sum();
  return h;
}

GlcmFeatures parse_glcm(std::string_view text) {
  const auto tokens = tokenize(text);
  if (tokens.size() != 6) malformed("GLCM line needs 6 values, found " + std::to_string(tokens.size()));
  GlcmFeatures f;
  f.pixel_counter = to_real(tokens[0]);
  f.angular_second_moment = to_real(tokens[1]);
  f.contrast = to_real(tokens[2]);
  f.correlation = to_real(tokens[3]);
  f.idm = to_real(tokens[4]);
  f.entropy = to_real(tokens[5]);
  return f;
}

GaborVector parse_gabor(std::string_view text) {
  const auto body = counted_body(text, "gabor");
  GaborVector v(static_cast<Eigen::Index>(body.size()));
  for (std::size_t i = 0; i < body.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_real(body[i]);
  return v;
}

TamuraVector parse_tamura(std::string_view text) {
  std::int64_t n = 0;
  const auto body = counted_body(text, "Tamura", &n);
  if (n != kTamuraLength) malformed("Tamura vector must have 18 values");
  TamuraVector v;
  for (int i = 0; i < kTamuraLength; ++i) v(i) = to_real(body[static_cast<std::size_t>(i)]);
  return v;
}

AutoCorrelogram parse_correlogram(std::string_view text) {
  auto tokens = tokenize(text);
  if (tokens.size() < 2 || tokens[0] != "ACC") malformed("expected prefix 'ACC'");
  const std::int64_t distance = to_count(tokens[1]);
  if (distance < 1) malformed("ACC distance must be >= 1");
  if (static_cast<std::int64_t>(tokens.size()) - 2 != distance * kColorBins) {
    malformed("ACC " + std::to_string(distance) + " needs " + std::to_string(distance * kColorBins) + " values");
  }
  AutoCorrelogram c;
  c.values.resize(kColorBins, distance);
  std::size_t k = 2;
  for (int color = 0; color < kColorBins; ++color) {
    for (Eigen::Index d = 0; d < distance; ++d) c.values(color, d) = to_real(tokens[k++]);
  }
  return c;
}

NaiveSignature parse_naive(std::string_view text) {
  const auto tokens = tokenize(text);
  if (tokens.empty() || tokens[0] != "NaiveVector") malformed("expected prefix 'NaiveVector'");
  if (tokens.size() != 1 + 3 * NaiveSignature::kPoints) malformed("NaiveVector needs 75 values");
  NaiveSignature s;
  for (int p = 0; p < NaiveSignature::kPoints; ++p) {
    for (int c = 0; c < 3; ++c) s.points(p, c) = to_real(tokens[static_cast<std::size_t>(1 + 3 * p + c)]);
  }
  return s;
}

}  // namespace cbvr
