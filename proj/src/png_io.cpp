#include "depthbench/io/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace depthbench::io {

namespace {

// libpng reports errors by longjmp, so raw resources live in a context that
// is constructed before setjmp and cleaned up by its destructor.
struct PngContext {
  FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  png_bytep row = nullptr;
  bool writing = false;

  ~PngContext() {
    if (png) {
      if (writing)
        png_destroy_write_struct(&png, info ? &info : nullptr);
      else
        png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
    if (row) std::free(row);
    if (fp) std::fclose(fp);
  }
};

struct RawImage {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> bytes;  // packed rows, as decoded
};

RawImage read_png(const std::filesystem::path& path) {
  RawImage image;
  PngContext ctx;
  ctx.fp = std::fopen(path.c_str(), "rb");
  if (!ctx.fp) throw FormatError("cannot open PNG: " + path.string());

  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw FormatError("libpng init failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw FormatError("libpng init failed");

  if (setjmp(png_jmpbuf(ctx.png)))
    throw FormatError("corrupt PNG: " + path.string());

  png_init_io(ctx.png, ctx.fp);
  png_read_info(ctx.png, ctx.info);
  image.width = png_get_image_width(ctx.png, ctx.info);
  image.height = png_get_image_height(ctx.png, ctx.info);
  image.bit_depth = png_get_bit_depth(ctx.png, ctx.info);
  image.color_type = png_get_color_type(ctx.png, ctx.info);

  const std::size_t row_bytes = png_get_rowbytes(ctx.png, ctx.info);
  image.bytes.resize(row_bytes * image.height);
  ctx.row = static_cast<png_bytep>(std::malloc(row_bytes));
  if (!ctx.row) throw FormatError("out of memory reading PNG");
  for (png_uint_32 y = 0; y < image.height; ++y) {
    png_read_row(ctx.png, ctx.row, nullptr);
    std::copy(ctx.row, ctx.row + row_bytes, image.bytes.begin() + y * row_bytes);
  }
  png_read_end(ctx.png, nullptr);
  return image;
}

void write_png(const std::filesystem::path& path, png_uint_32 width,
               png_uint_32 height, int bit_depth, int color_type,
               const std::vector<std::uint8_t>& bytes) {
  PngContext ctx;
  ctx.writing = true;
  ctx.fp = std::fopen(path.c_str(), "wb");
  if (!ctx.fp) throw FormatError("cannot write PNG: " + path.string());

  ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw FormatError("libpng init failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw FormatError("libpng init failed");

  if (setjmp(png_jmpbuf(ctx.png)))
    throw FormatError("PNG write failed: " + path.string());

  png_init_io(ctx.png, ctx.fp);
  png_set_IHDR(ctx.png, ctx.info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);
  const std::size_t row_bytes = png_get_rowbytes(ctx.png, ctx.info);
  for (png_uint_32 y = 0; y < height; ++y)
    png_write_row(ctx.png, const_cast<png_bytep>(bytes.data() + y * row_bytes));
  png_write_end(ctx.png, nullptr);
}

}  // namespace

RgbImage load_rgb(const std::filesystem::path& path) {
  const RawImage raw = read_png(path);
  if (raw.color_type != PNG_COLOR_TYPE_RGB)
    throw FormatError("expected a 3-channel RGB PNG: " + path.string());
  if (raw.bit_depth != 8)
    throw FormatError("expected 8 bits per channel: " + path.string());

  RgbImage image(static_cast<Index>(raw.height), static_cast<Index>(raw.width));
  const std::size_t n = raw.bytes.size();
  for (std::size_t i = 0; i < n; ++i)
    image.values[i] = static_cast<float>(raw.bytes[i]) / 255.0f;
  return image;
}

void save_rgb(const RgbImage& image, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(image.values.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const float v = std::min(1.0f, std::max(0.0f, image.values[i]));
    bytes[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
  }
  write_png(path, static_cast<png_uint_32>(image.width),
            static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB, bytes);
}

DepthMap load_depth16(const std::filesystem::path& path, double unit_scale,
                      double max_depth) {
  if (!(unit_scale > 0.0)) throw ConfigError("unit_scale must be positive");
  const RawImage raw = read_png(path);
  if (raw.color_type != PNG_COLOR_TYPE_GRAY)
    throw FormatError("expected a single-channel PNG: " + path.string());
  if (raw.bit_depth != 16)
    throw FormatError("expected 16-bit depth PNG: " + path.string());

  const Index h = static_cast<Index>(raw.height);
  const Index w = static_cast<Index>(raw.width);
  DepthMap depth(h, w);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      // PNG samples are big-endian.
      const std::size_t o = static_cast<std::size_t>((y * w + x) * 2);
      const std::uint16_t sample =
          static_cast<std::uint16_t>((raw.bytes[o] << 8) | raw.bytes[o + 1]);
      const double meters = static_cast<double>(sample) * unit_scale;
      depth.values(y, x) = meters;
      depth.valid(y, x) = sample > 0 && meters <= max_depth;
    }
  return depth;
}

void save_depth16(const DepthMap& depth, const std::filesystem::path& path,
                  double unit_scale) {
  if (!(unit_scale > 0.0)) throw ConfigError("unit_scale must be positive");
  const Index h = depth.height(), w = depth.width();
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(h * w * 2));
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      std::uint16_t sample = 0;
      if (depth.valid(y, x)) {
        const double raw = std::round(depth.values(y, x) / unit_scale);
        sample = static_cast<std::uint16_t>(std::min(65535.0, std::max(0.0, raw)));
      }
      const std::size_t o = static_cast<std::size_t>((y * w + x) * 2);
      bytes[o] = static_cast<std::uint8_t>(sample >> 8);
      bytes[o + 1] = static_cast<std::uint8_t>(sample & 0xff);
    }
  write_png(path, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 16,
            PNG_COLOR_TYPE_GRAY, bytes);
}

}  // namespace depthbench::io
