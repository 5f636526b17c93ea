#include "casiam/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "casiam/imaging.hpp"

namespace casiam {

namespace {

cv::Mat to_mat(const Image& image) {
  const int type = image.channels() == 3 ? CV_8UC3 : CV_8UC1;
  cv::Mat mat(image.height(), image.width(), type);
  for (int y = 0; y < image.height(); ++y) {
    auto* row = mat.ptr<unsigned char>(y);
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < image.channels(); ++c) {
        // OpenCV stores BGR.
        const int src_c = image.channels() == 3 ? 2 - c : 0;
        const float v = std::clamp(std::round(image.at(y, x, src_c)), 0.0f, 255.0f);
        row[x * image.channels() + c] = static_cast<unsigned char>(v);
      }
    }
  }
  return mat;
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
  const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (mat.empty()) throw InputError("cannot decode image " + path.string());
  cv::Mat bgr;
  if (mat.channels() == 1) {
    bgr = mat;
  } else if (mat.channels() == 4) {
    cv::cvtColor(mat, bgr, cv::COLOR_BGRA2BGR);
  } else {
    bgr = mat;
  }
  cv::Mat u8;
  if (bgr.depth() != CV_8U) {
    bgr.convertTo(u8, CV_8U, bgr.depth() == CV_16U ? 1.0 / 257.0 : 1.0);
  } else {
    u8 = bgr;
  }
  const int channels = u8.channels();
  Image image(u8.rows, u8.cols, channels);
  for (int y = 0; y < u8.rows; ++y) {
    const auto* row = u8.ptr<unsigned char>(y);
    for (int x = 0; x < u8.cols; ++x) {
      for (int c = 0; c < channels; ++c) {
        const int dst_c = channels == 3 ? 2 - c : 0;
        image.at(y, x, dst_c) = row[x * channels + c];
      }
    }
  }
  return image;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  if (!cv::imwrite(path.string(), to_mat(image))) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

Image draw_box(const Image& image, const BoundingBox& box, std::array<float, 3> rgb) {
  Image out = to_rgb(image);
  const int x0 = static_cast<int>(std::lround(box.cx - 0.5 * (box.w - 1)));
  const int y0 = static_cast<int>(std::lround(box.cy - 0.5 * (box.h - 1)));
  const int x1 = static_cast<int>(std::lround(box.cx + 0.5 * (box.w - 1)));
  const int y1 = static_cast<int>(std::lround(box.cy + 0.5 * (box.h - 1)));
  auto paint = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= out.width() || y >= out.height()) return;
    for (int c = 0; c < 3; ++c) out.at(y, x, c) = rgb[c];
  };
  for (int t = 0; t < 2; ++t) {
    for (int x = x0; x <= x1; ++x) {
      paint(x, y0 + t);
      paint(x, y1 - t);
    }
    for (int y = y0; y <= y1; ++y) {
      paint(x0 + t, y);
      paint(x1 - t, y);
    }
  }
  return out;
}

}  // namespace casiam
