#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <png.h>

#include "error.hpp"

namespace seabed {

struct Rgba8Image {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> pixels; // RGBA, rows top to bottom
};

inline std::vector<std::uint8_t> encode_png(const Rgba8Image& img) {
    if (img.pixels.size() != 4ull * img.width * img.height) fail(ErrorCode::SizeMismatch, "pixel buffer size");
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = img.width;
    image.height = img.height;
    image.format = PNG_FORMAT_RGBA;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels.data(), 0, nullptr))
        fail(ErrorCode::Io, std::string("png sizing failed: ") + image.message);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels.data(), 0, nullptr))
        fail(ErrorCode::Io, std::string("png encoding failed: ") + image.message);
    out.resize(size);
    return out;
}

inline Rgba8Image decode_png(std::span<const std::uint8_t> bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        fail(ErrorCode::Io, std::string("png header: ") + image.message);
    image.format = PNG_FORMAT_RGBA;
    Rgba8Image out{image.width, image.height, std::vector<std::uint8_t>(PNG_IMAGE_SIZE(image))};
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        png_image_free(&image);
        fail(ErrorCode::Io, std::string("png decode: ") + image.message);
    }
    return out;
}

} // namespace seabed
