#include "cbvr/error.hpp"
#include "cbvr/imaging.hpp"

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#ifdef CBVR_HAVE_PNG
#include <png.h>
#endif
#ifdef CBVR_HAVE_JPEG
#include <jpeglib.h>
#endif

namespace cbvr {

namespace {

class PnmReader {
 public:
  explicit PnmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Header integers are separated by whitespace; '#' starts a comment.
  int next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(ErrorKind::CorruptImage, "pnm header truncated or non-numeric");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > 1'000'000) throw Error(ErrorKind::CorruptImage, "pnm header value out of range");
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void end_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorKind::CorruptImage, "pnm header not terminated");
    }
    ++pos_;
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw Error(ErrorKind::CorruptImage, "pnm raster truncated");
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

Raster decode_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error(ErrorKind::UnsupportedFormat, "not a binary P5/P6 pixmap");
  }
  const bool color = bytes[1] == '6';
  PnmReader reader(bytes);
  const int width = reader.next_int();
  const int height = reader.next_int();
  const int maxval = reader.next_int();
  if (width <= 0 || height <= 0) throw Error(ErrorKind::CorruptImage, "pnm has zero dimension");
  if (maxval <= 0 || maxval > 255) {
    throw Error(ErrorKind::UnsupportedFormat, "pnm maxval must be in [1,255]");
  }
  reader.end_header();
  const int channels = color ? 3 : 1;
  const auto raster = reader.take(static_cast<std::size_t>(width) * height * channels);

  std::array<Plane<std::uint8_t>, 3> planes;
  for (auto& p : planes) p.resize(height, width);
  std::size_t k = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const int v = raster[k + (color ? c : 0)];
        planes[c](y, x) = static_cast<std::uint8_t>(maxval == 255 ? v : std::min(255, v * 255 / maxval));
      }
      k += channels;
    }
  }
  return Raster(std::move(planes[0]), std::move(planes[1]), std::move(planes[2]));
}

#ifdef CBVR_HAVE_PNG
Raster decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorKind::CorruptImage, std::string("png: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorKind::CorruptImage, std::string("png: ") + image.message);
  }
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  Raster out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto* p = &buffer[(static_cast<std::size_t>(y) * width + x) * 3];
      out.set(x, y, {p[0], p[1], p[2]});
    }
  }
  return out;
}
#endif

#ifdef CBVR_HAVE_JPEG
struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr info) {
  auto* mgr = reinterpret_cast<JpegErrorManager*>(info->err);
  (*info->err->format_message)(info, mgr->message);
  std::longjmp(mgr->jump, 1);
}

// Warnings such as a truncated stream are treated as corruption.
void jpeg_emit_message(j_common_ptr info, int level) {
  if (level < 0) jpeg_error_exit(info);
}

// Kept free of C++ objects with destructors between setjmp and longjmp.
bool decode_jpeg_into(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& buffer, int& width,
                      int& height, char* message) {
  jpeg_decompress_struct info;
  JpegErrorManager err;
  info.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_emit_message;
  if (setjmp(err.jump)) {
    std::snprintf(message, JMSG_LENGTH_MAX, "%s", err.message);
    jpeg_destroy_decompress(&info);
    return false;
  }
  jpeg_create_decompress(&info);
  jpeg_mem_src(&info, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&info, TRUE);
  info.out_color_space = JCS_RGB;
  jpeg_start_decompress(&info);
  width = static_cast<int>(info.output_width);
  height = static_cast<int>(info.output_height);
  buffer.resize(static_cast<std::size_t>(width) * height * 3);
  while (info.output_scanline < info.output_height) {
    JSAMPROW row = &buffer[static_cast<std::size_t>(info.output_scanline) * width * 3];
    jpeg_read_scanlines(&info, &row, 1);
  }
  jpeg_finish_decompress(&info);
  jpeg_destroy_decompress(&info);
  return true;
}

Raster decode_jpeg(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> buffer;
  int width = 0;
  int height = 0;
  char message[JMSG_LENGTH_MAX] = {};
  if (!decode_jpeg_into(bytes, buffer, width, height, message)) {
    throw Error(ErrorKind::CorruptImage, std::string("jpeg: ") + message);
  }
  Raster out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto* p = &buffer[(static_cast<std::size_t>(y) * width + x) * 3];
      out.set(x, y, {p[0], p[1], p[2]});
    }
  }
  return out;
}
#endif

std::optional<ImageFormat> sniff(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) return ImageFormat::Pnm;
  if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' && bytes[3] == 'G') {
    return ImageFormat::Png;
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) return ImageFormat::Jpeg;
  return std::nullopt;
}

}  // namespace

Raster load_frame(std::span<const std::uint8_t> bytes, std::optional<ImageFormat> format_hint) {
  if (bytes.empty()) throw Error(ErrorKind::CorruptImage, "empty image data");
  const auto format = format_hint ? format_hint : sniff(bytes);
  if (!format) throw Error(ErrorKind::UnsupportedFormat, "unrecognized image signature");
  switch (*format) {
    case ImageFormat::Pnm:
      return decode_pnm(bytes);
    case ImageFormat::Png:
#ifdef CBVR_HAVE_PNG
      return decode_png(bytes);
#else
      throw Error(ErrorKind::UnsupportedFormat, "built without PNG support");
#endif
    case ImageFormat::Jpeg:
#ifdef CBVR_HAVE_JPEG
      return decode_jpeg(bytes);
#else
      throw Error(ErrorKind::UnsupportedFormat, "built without JPEG support");
#endif
  }
  throw Error(ErrorKind::UnsupportedFormat, "unknown format");
}

Raster load_frame_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  const Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return load_frame(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.detail());
  }
}

Bytes encode_ppm(const Raster& r) {
  const std::string header = "P6\n" + std::to_string(r.width()) + " " + std::to_string(r.height()) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.reserve(out.size() + static_cast<std::size_t>(r.width()) * r.height() * 3);
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      const Rgb p = r.at(x, y);
      out.push_back(p.r);
      out.push_back(p.g);
      out.push_back(p.b);
    }
  }
  return out;
}

}  // namespace cbvr
