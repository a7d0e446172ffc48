#include "leafattack/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "leafattack/error.hpp"

namespace leafattack {

namespace {

constexpr std::size_t kMaxImageBytes = std::size_t{1} << 30;

[[noreturn]] void io_fail(const std::string& source, const std::string& what) {
  throw Error(ErrorKind::Io, source + ": " + what);
}

std::string lower_extension(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (!ext.empty() && ext.front() == '.') ext.erase(0, 1);
  return ext;
}

void check_size(const std::string& source, std::uint64_t width, std::uint64_t height,
                std::uint64_t channels) {
  if (width == 0 || height == 0) io_fail(source, "zero image dimension");
  if (width > static_cast<std::uint64_t>(std::numeric_limits<int>::max()) ||
      height > static_cast<std::uint64_t>(std::numeric_limits<int>::max()) ||
      width * height * channels > kMaxImageBytes) {
    io_fail(source, "image dimensions overflow the supported size");
  }
}

// --- PNM -----------------------------------------------------------------

class PnmHeaderReader {
 public:
  PnmHeaderReader(const std::string& bytes, const std::string& source)
      : bytes_(bytes), source_(source) {}

  std::uint64_t next_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      io_fail(source_, "malformed PNM header");
    }
    std::uint64_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<std::uint64_t>(bytes_[pos_] - '0');
      if (value > (std::uint64_t{1} << 40)) io_fail(source_, "PNM header value overflow");
      ++pos_;
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      io_fail(source_, "malformed PNM header");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  const std::string& source_;
  std::size_t pos_ = 2;
};

RasterImage decode_pnm(const std::string& bytes, const std::string& source) {
  const int channels = bytes[1] == '5' ? 1 : 3;
  PnmHeaderReader reader(bytes, source);
  const auto width = reader.next_number();
  const auto height = reader.next_number();
  const auto maxval = reader.next_number();
  if (maxval != 255) io_fail(source, "only 8-bit PNM (maxval 255) is supported");
  check_size(source, width, height, static_cast<std::uint64_t>(channels));
  const std::size_t offset = reader.raster_offset();
  const std::size_t need = static_cast<std::size_t>(width * height * static_cast<std::uint64_t>(channels));
  if (bytes.size() < offset + need) io_fail(source, "truncated PNM raster");
  std::vector<std::uint8_t> data(need);
  std::memcpy(data.data(), bytes.data() + offset, need);
  return RasterImage(static_cast<int>(width), static_cast<int>(height), channels, std::move(data));
}

std::string encode_pnm(const RasterImage& img, int channels) {
  std::string out = (channels == 1 ? "P5\n" : "P6\n") + std::to_string(img.width()) + " " +
                    std::to_string(img.height()) + "\n255\n";
  const auto data = img.data();
  out.append(reinterpret_cast<const char*>(data.data()), data.size());
  return out;
}

// --- PNG -----------------------------------------------------------------

RasterImage decode_png(const std::string& bytes, const std::string& source) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    io_fail(source, std::string("PNG decode failed: ") + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const int channels = color ? 3 : 1;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  try {
    check_size(source, image.width, image.height, static_cast<std::uint64_t>(channels));
  } catch (...) {
    png_image_free(&image);
    throw;
  }
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
  // Alpha, if present, is composited onto black.
  png_color background{0, 0, 0};
  if (!png_image_finish_read(&image, &background, data.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    io_fail(source, "PNG decode failed: " + msg);
  }
  return RasterImage(static_cast<int>(image.width), static_cast<int>(image.height), channels,
                     std::move(data));
}

std::string encode_png(const RasterImage& img) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  const auto data = img.data();
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, data.data(), 0, nullptr)) {
    throw Error(ErrorKind::Io, std::string("PNG encode failed: ") + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, data.data(), 0, nullptr)) {
    throw Error(ErrorKind::Io, std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) io_fail(path, "read failed");
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) io_fail(path, "cannot open for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) io_fail(path, "write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    io_fail(path, "rename into place failed");
  }
}

RasterImage decode_image(const std::string& bytes, const std::string& source_name) {
  static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSig, 8) == 0) {
    return decode_png(bytes, source_name);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return decode_pnm(bytes, source_name);
  }
  if (bytes.empty()) io_fail(source_name, "empty file");
  io_fail(source_name, "unsupported image format (expected PNG, PGM P5 or PPM P6)");
}

std::string encode_image(const RasterImage& img, const std::string& format) {
  if (format == "png") return encode_png(img);
  if (format == "pgm") {
    if (img.channels() != 1) throw Error(ErrorKind::Io, "PGM output requires a grayscale image");
    return encode_pnm(img, 1);
  }
  if (format == "ppm") {
    if (img.channels() != 3) throw Error(ErrorKind::Io, "PPM output requires an RGB image");
    return encode_pnm(img, 3);
  }
  throw Error(ErrorKind::Io, "unsupported output format '" + format + "'");
}

RasterImage read_image(const std::string& path) { return decode_image(read_file(path), path); }

void write_image(const RasterImage& img, const std::string& path) {
  const std::string ext = lower_extension(path);
  if (ext != "png" && ext != "pgm" && ext != "ppm") {
    io_fail(path, "unsupported output extension (use .png, .pgm or .ppm)");
  }
  write_file_atomic(path, encode_image(img, ext));
}

BinaryMask read_mask(const std::string& path) { return image_to_mask(read_image(path)); }

void write_mask(const BinaryMask& mask, const std::string& path) {
  write_image(mask_to_image(mask), path);
}

}  // namespace leafattack
