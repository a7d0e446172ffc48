#pragma once

#include <string>

#include "leafattack/raster.hpp"

namespace leafattack {

/// Reads PNG (8/16-bit gray or RGB, palette and alpha are flattened) and
/// binary PGM (P5) / PPM (P6) with maxval 255. The format is detected from the
/// file signature, not the extension.
RasterImage read_image(const std::string& path);

/// Writes PNG, PGM or PPM selected by extension (.png, .pgm, .ppm). PGM
/// requires a grayscale image and PPM an RGB one. The file is written to a
/// temporary sibling and renamed into place.
void write_image(const RasterImage& img, const std::string& path);

/// Masks persist as grayscale with 0 = false, 255 = true. Reading accepts any
/// supported image; channel 0 >= 128 is true.
BinaryMask read_mask(const std::string& path);
void write_mask(const BinaryMask& mask, const std::string& path);

/// Encodes to an in-memory buffer in the given format ("png", "pgm", "ppm").
std::string encode_image(const RasterImage& img, const std::string& format);
RasterImage decode_image(const std::string& bytes, const std::string& source_name = "<memory>");

/// Writes `contents` to `path` via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace leafattack
