#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "owbf/image.hpp"

namespace owbf {

// Binary P5 PGM, maxval 255 only. Any other maxval is rejected.
ImageF read_pgm(std::istream& in);
void write_pgm(const ImageF& image, std::ostream& out);

// Grayscale "Pf" PFM. Written little-endian (scale -1), rows bottom-up.
// Reading accepts either byte order as signalled by the scale sign.
ImageF read_pfm(std::istream& in);
void write_pfm(const ImageF& image, std::ostream& out);

// Dispatches on the file magic ("P5" or "Pf").
ImageF read_image(const std::filesystem::path& path);

// Dispatches on the extension: ".pgm" writes 8 bits, ".pfm" writes float.
void write_image(const ImageF& image, const std::filesystem::path& path);

// 8-bit quantization used by PGM export: clamp to [0, 255], round half away
// from zero.
std::uint8_t quantize_8bit(double value);

}  // namespace owbf
