#include "owbf/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "owbf/errors.hpp"

namespace owbf {

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (true) {
    while (c != EOF && std::isspace(c)) c = in.get();
    if (c == '#') {
      while (c != EOF && c != '\n' && c != '\r') c = in.get();
      continue;
    }
    break;
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (token.empty()) throw FormatError("truncated image header");
  if (c == '#') in.unget();
  // The single whitespace character after the last header field is consumed here.
  return token;
}

int header_int(std::istream& in, const char* field) {
  const std::string token = header_token(in);
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(token, &used);
  } catch (const std::exception&) {
    throw FormatError(std::string("malformed ") + field + " in image header: '" + token + "'");
  }
  if (used != token.size() || value <= 0 || value > (1 << 24)) {
    throw FormatError(std::string("malformed ") + field + " in image header: '" + token + "'");
  }
  return static_cast<int>(value);
}

std::string read_magic(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2) throw FormatError("truncated image header");
  return std::string(magic, 2);
}

ImageF read_pgm_body(std::istream& in) {
  const int width = header_int(in, "width");
  const int height = header_int(in, "height");
  const int maxval = header_int(in, "maxval");
  if (maxval != 255) {
    throw FormatError("unsupported PGM maxval " + std::to_string(maxval) + " (only 255)");
  }
  std::vector<unsigned char> bytes(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    throw FormatError("truncated PGM payload");
  }
  std::vector<double> data(bytes.begin(), bytes.end());
  return ImageF(width, height, std::move(data));
}

ImageF read_pfm_body(std::istream& in) {
  const int width = header_int(in, "width");
  const int height = header_int(in, "height");
  const std::string scale_token = header_token(in);
  double scale = 0.0;
  try {
    std::size_t used = 0;
    scale = std::stod(scale_token, &used);
    if (used != scale_token.size()) throw FormatError("");
  } catch (const std::exception&) {
    throw FormatError("malformed PFM scale '" + scale_token + "'");
  }
  if (scale == 0.0 || !std::isfinite(scale)) throw FormatError("malformed PFM scale");
  const bool little = scale < 0.0;
  const bool swap = little != (std::endian::native == std::endian::little);

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<std::uint32_t> words(count);
  in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(count * 4));
  if (static_cast<std::size_t>(in.gcount()) != count * 4) {
    throw FormatError("truncated PFM payload");
  }

  ImageF image(width, height);
  for (int y = 0; y < height; ++y) {
    // PFM stores the bottom row first.
    const std::uint32_t* src = words.data() + static_cast<std::size_t>(height - 1 - y) * width;
    auto dst = image.row(y);
    for (int x = 0; x < width; ++x) {
      std::uint32_t w = src[x];
      if (swap) w = __builtin_bswap32(w);
      const float v = std::bit_cast<float>(w);
      if (!std::isfinite(v)) throw FormatError("non-finite sample in PFM payload");
      dst[x] = v;
    }
  }
  return image;
}

}  // namespace

std::uint8_t quantize_8bit(double value) {
  const double clamped = std::clamp(value, 0.0, 255.0);
  return static_cast<std::uint8_t>(std::round(clamped));
}

ImageF read_pgm(std::istream& in) {
  if (read_magic(in) != "P5") throw FormatError("not a binary P5 PGM");
  return read_pgm_body(in);
}

ImageF read_pfm(std::istream& in) {
  const std::string magic = read_magic(in);
  if (magic == "PF") throw FormatError("color PFM is not supported");
  if (magic != "Pf") throw FormatError("not a grayscale Pf PFM");
  return read_pfm_body(in);
}

void write_pgm(const ImageF& image, std::ostream& out) {
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::vector<char> bytes(image.size());
  std::transform(image.pixels().begin(), image.pixels().end(), bytes.begin(),
                 [](double v) { return static_cast<char>(quantize_8bit(v)); });
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing PGM");
}

void write_pfm(const ImageF& image, std::ostream& out) {
  out << "Pf\n" << image.width() << ' ' << image.height() << "\n-1.0\n";
  std::vector<std::uint32_t> words(image.size());
  for (int y = 0; y < image.height(); ++y) {
    std::uint32_t* dst = words.data() + static_cast<std::size_t>(image.height() - 1 - y) * image.width();
    auto src = image.row(y);
    for (int x = 0; x < image.width(); ++x) {
      std::uint32_t w = std::bit_cast<std::uint32_t>(static_cast<float>(src[x]));
      if constexpr (std::endian::native == std::endian::big) w = __builtin_bswap32(w);
      dst[x] = w;
    }
  }
  out.write(reinterpret_cast<const char*>(words.data()), static_cast<std::streamsize>(words.size() * 4));
  if (!out) throw FormatError("failed writing PFM");
}

ImageF read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  const std::string magic = read_magic(in);
  if (magic == "P5") return read_pgm_body(in);
  if (magic == "Pf") return read_pfm_body(in);
  throw FormatError("unsupported image format in " + path.string() + " (expected P5 PGM or Pf PFM)");
}

void write_image(const ImageF& image, const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext != ".pgm" && ext != ".pfm") {
    throw FormatError("unsupported output extension '" + ext + "' (use .pgm or .pfm)");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  if (ext == ".pgm") {
    write_pgm(image, out);
  } else {
    write_pfm(image, out);
  }
}

}  // namespace owbf
