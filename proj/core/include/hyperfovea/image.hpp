#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace hyperfovea {

// Row-major, interleaved channels, intensities in [0, 1].
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(std::size_t width, std::size_t height, std::size_t channels, float fill = 0.0f);
  ImageBuffer(std::size_t width, std::size_t height, std::size_t channels,
              std::vector<float> data);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }

  float at(std::size_t x, std::size_t y, std::size_t c) const noexcept {
    return data_[(y * width_ + x) * channels_ + c];
  }
  float& at(std::size_t x, std::size_t y, std::size_t c) noexcept {
    return data_[(y * width_ + x) * channels_ + c];
  }

  const std::vector<float>& data() const noexcept { return data_; }
  std::vector<float>& data() noexcept { return data_; }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t channels_ = 0;
  std::vector<float> data_;
};

// 8-bit quantization used by the file codecs: round(clamp(v, 0, 1) * 255).
std::vector<std::uint8_t> to_bytes(const ImageBuffer& image);
ImageBuffer from_bytes(std::size_t width, std::size_t height, std::size_t channels,
                       const std::vector<std::uint8_t>& bytes);

// Format chosen by extension: .png, .pgm, .ppm (binary P5/P6, maxval 255).
ImageBuffer load_image(const std::filesystem::path& path);
void save_image(const std::filesystem::path& path, const ImageBuffer& image);

ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageBuffer& image);
ImageBuffer read_pnm(const std::filesystem::path& path);
void write_pnm(const std::filesystem::path& path, const ImageBuffer& image);

// Bilinear resize with pixel-center alignment.
ImageBuffer resize_bilinear(const ImageBuffer& image, std::size_t width, std::size_t height);

// Grid lines, concentric rings and a color ramp; deterministic.
ImageBuffer make_test_chart(std::size_t width, std::size_t height);

}  // namespace hyperfovea
