#include "hyperfovea/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "hyperfovea/error.hpp"

namespace hyperfovea {

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height, std::size_t channels, float fill)
    : ImageBuffer(width, height, channels, std::vector<float>(width * height * channels, fill)) {}

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height, std::size_t channels,
                         std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::dimension_mismatch, "images must have 1 or 3 channels");
  }
  if (data_.size() != width * height * channels) {
    std::ostringstream msg;
    msg << "buffer holds " << data_.size() << " values, expected " << width * height * channels;
    throw Error(ErrorCode::dimension_mismatch, msg.str());
  }
}

std::vector<std::uint8_t> to_bytes(const ImageBuffer& image) {
  std::vector<std::uint8_t> bytes(image.data().size());
  std::transform(image.data().begin(), image.data().end(), bytes.begin(), [](float v) {
    const double clamped = std::clamp(static_cast<double>(v), 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
  });
  return bytes;
}

ImageBuffer from_bytes(std::size_t width, std::size_t height, std::size_t channels,
                       const std::vector<std::uint8_t>& bytes) {
  std::vector<float> data(bytes.size());
  std::transform(bytes.begin(), bytes.end(), data.begin(),
                 [](std::uint8_t b) { return static_cast<float>(b) / 255.0f; });
  return ImageBuffer(width, height, channels, std::move(data));
}

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// Skips whitespace and '#' comments between PNM header tokens.
std::size_t read_pnm_number(std::istream& in, const std::filesystem::path& path) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  std::size_t value = 0;
  if (!(in >> value)) throw Error(ErrorCode::io_error, "bad PNM header in " + path.string());
  return value;
}

}  // namespace

ImageBuffer read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw Error(ErrorCode::io_error, "cannot read PNG " + path.string() + ": " + image.message);
  }
  const std::size_t channels = (image.format & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::io_error, "cannot decode PNG " + path.string() + ": " + message);
  }
  return from_bytes(image.width, image.height, channels, bytes);
}

void write_png(const std::filesystem::path& path, const ImageBuffer& image) {
  if (image.empty()) throw Error(ErrorCode::dimension_mismatch, "cannot write an empty image");
  png_image out{};
  out.version = PNG_IMAGE_VERSION;
  out.width = static_cast<png_uint_32>(image.width());
  out.height = static_cast<png_uint_32>(image.height());
  out.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::vector<std::uint8_t> bytes = to_bytes(image);
  if (!png_image_write_to_file(&out, path.string().c_str(), 0, bytes.data(), 0, nullptr)) {
    throw Error(ErrorCode::io_error, "cannot write PNG " + path.string() + ": " + out.message);
  }
}

ImageBuffer read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  std::size_t channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw Error(ErrorCode::io_error, "unsupported PNM type in " + path.string());
  }
  const std::size_t width = read_pnm_number(in, path);
  const std::size_t height = read_pnm_number(in, path);
  const std::size_t maxval = read_pnm_number(in, path);
  if (maxval != 255) throw Error(ErrorCode::io_error, "only 8-bit PNM is supported");
  in.get();  // single whitespace before the raster
  std::vector<std::uint8_t> bytes(width * height * channels);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw Error(ErrorCode::io_error, "truncated raster in " + path.string());
  }
  return from_bytes(width, height, channels, bytes);
}

void write_pnm(const std::filesystem::path& path, const ImageBuffer& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << (image.channels() == 3 ? "P6" : "P5") << '\n'
      << image.width() << ' ' << image.height() << "\n255\n";
  const std::vector<std::uint8_t> bytes = to_bytes(image);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

ImageBuffer load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::io_error, "no such file: " + path.string());
  }
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
  throw Error(ErrorCode::io_error, "unsupported image extension: " + path.string());
}

void save_image(const std::filesystem::path& path, const ImageBuffer& image) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    write_png(path, image);
  } else if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
    write_pnm(path, image);
  } else {
    throw Error(ErrorCode::io_error, "unsupported image extension: " + path.string());
  }
}

ImageBuffer resize_bilinear(const ImageBuffer& image, std::size_t width, std::size_t height) {
  if (image.empty() || width == 0 || height == 0) {
    throw Error(ErrorCode::dimension_mismatch, "resize needs non-empty source and target");
  }
  if (width == image.width() && height == image.height()) return image;
  ImageBuffer out(width, height, image.channels());
  const double sx = static_cast<double>(image.width()) / static_cast<double>(width);
  const double sy = static_cast<double>(image.height()) / static_cast<double>(height);
  const double max_x = static_cast<double>(image.width() - 1);
  const double max_y = static_cast<double>(image.height() - 1);
  for (std::size_t y = 0; y < height; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, image.height() - 1);
    const double ty = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < width; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, image.width() - 1);
      const double tx = fx - static_cast<double>(x0);
      for (std::size_t c = 0; c < image.channels(); ++c) {
        const double top = (1.0 - tx) * image.at(x0, y0, c) + tx * image.at(x1, y0, c);
        const double bottom = (1.0 - tx) * image.at(x0, y1, c) + tx * image.at(x1, y1, c);
        out.at(x, y, c) = static_cast<float>((1.0 - ty) * top + ty * bottom);
      }
    }
  }
  return out;
}

ImageBuffer make_test_chart(std::size_t width, std::size_t height) {
  ImageBuffer chart(width, height, 3);
  const double cell = static_cast<double>(std::max(width, height)) / 16.0;
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double u = (static_cast<double>(x) + 0.5) / static_cast<double>(width);
      const double v = (static_cast<double>(y) + 0.5) / static_cast<double>(height);
      const double du = u - 0.5;
      const double dv = v - 0.5;
      const double ring = 0.5 + 0.5 * std::cos(2.0 * 3.14159265358979323846 * 12.0 *
                                               std::sqrt(du * du + dv * dv));
      const bool on_line = std::fmod(static_cast<double>(x), cell) < 1.0 ||
                           std::fmod(static_cast<double>(y), cell) < 1.0;
      const float base = on_line ? 0.0f : static_cast<float>(0.25 + 0.5 * ring);
      chart.at(x, y, 0) = on_line ? 0.0f : static_cast<float>(0.5 * base + 0.5 * u);
      chart.at(x, y, 1) = base;
      chart.at(x, y, 2) = on_line ? 0.0f : static_cast<float>(0.5 * base + 0.5 * v);
    }
  }
  return chart;
}

}  // namespace hyperfovea
