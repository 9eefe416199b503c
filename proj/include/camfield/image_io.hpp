#pragma once

// 8-bit RGB PNG encode/decode for float images.

#include "camfield/panorama.hpp"

#include <filesystem>
#include <vector>

namespace camfield {

/// Quantises each channel with round(v * 255).
std::vector<unsigned char> encode_png(const RgbImage &image);
RgbImage decode_png(const std::vector<unsigned char> &bytes);

void write_png(const std::filesystem::path &path, const RgbImage &image);
/// Any colour type libpng understands is converted to RGB.
RgbImage read_png(const std::filesystem::path &path);

void write_bytes(const std::filesystem::path &path, const std::vector<unsigned char> &bytes);
std::vector<unsigned char> read_bytes(const std::filesystem::path &path);

} // namespace camfield
