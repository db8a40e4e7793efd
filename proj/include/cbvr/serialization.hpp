#pragma once

#include "cbvr/retrieval.hpp"

#include <string>
#include <string_view>

namespace cbvr {

// Line formats, tokens separated by one space, reals in shortest round-trip
// form:
//   RGB 256 b0 ... b255
//   pixelCounter asm contrast correlation idm entropy
//   gabor <n> v1 ... vn
//   Tamura 18 v1 ... v18
//   ACC <d> v(c0,1) ... v(c0,d) v(c1,1) ... v(c255,d)
//   NaiveVector r1 g1 b1 ... r25 g25 b25
// Parsers accept any whitespace between tokens and throw
// MalformedFeatureString on a wrong prefix, count mismatch or bad token.

std::string format_real(double v);

std::string serialize(const ColorHistogram& h);
std::string serialize(const GlcmFeatures& f);
std::string serialize(const GaborVector& v);
std::string serialize(const TamuraVector& v);
std::string serialize(const AutoCorrelogram& c);
std::string serialize(const NaiveSignature& s);

ColorHistogram parse_histogram(std::string_view text);
GlcmFeatures parse_glcm(std::string_view text);
GaborVector parse_gabor(std::string_view text);
TamuraVector parse_tamura(std::string_view text);
AutoCorrelogram parse_correlogram(std::string_view text);
NaiveSignature parse_naive(std::string_view text);

}  // namespace cbvr
