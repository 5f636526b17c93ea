#pragma once

#include <array>
#include <filesystem>

#include "casiam/types.hpp"

namespace casiam {

/// Decodes PNG/JPEG/BMP into an RGB (or grayscale, for 1-channel files) image.
Image read_image(const std::filesystem::path& path);
/// Lossless PNG; values are rounded and clamped to [0, 255].
void write_png(const std::filesystem::path& path, const Image& image);
/// Burns a 2-px rectangle outline into an RGB copy of the image.
Image draw_box(const Image& image, const BoundingBox& box, std::array<float, 3> rgb);

}  // namespace casiam
