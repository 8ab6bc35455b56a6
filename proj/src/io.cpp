#include "mhdm/io.hpp"

#include "mhdm/errors.hpp"

#include <json.hpp>
#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace mhdm::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool has_png_signature(const std::string& bytes) {
  static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::memcmp(bytes.data(), sig, 8) == 0;
}

Image decode_png(const fs::path& path, const std::string& bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw IoError("'" + path.string() + "': " + image.message);
  }
  const bool sixteen = (image.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  image.format = sixteen ? PNG_FORMAT_LINEAR_Y : PNG_FORMAT_GRAY;
  const std::size_t rows = image.height;
  const std::size_t cols = image.width;
  Image out(rows, cols);
  if (sixteen) {
    std::vector<std::uint16_t> buf(rows * cols);
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
      throw IoError("'" + path.string() + "': " + image.message);
    }
    for (std::size_t k = 0; k < buf.size(); ++k) out.values()[k] = buf[k] / 65535.0;
  } else {
    std::vector<std::uint8_t> buf(rows * cols);
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
      throw IoError("'" + path.string() + "': " + image.message);
    }
    for (std::size_t k = 0; k < buf.size(); ++k) out.values()[k] = buf[k] / 255.0;
  }
  return out;
}

// Whitespace/comment aware PGM header tokenizer.
class PgmReader {
public:
  PgmReader(const std::string& bytes, const fs::path& path) : bytes_(bytes), path_(path) {}

  long next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw IoError("'" + path_.string() + "': malformed PGM");
    }
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_++] - '0');
    }
    return v;
  }
  // Binary data starts after exactly one whitespace byte following maxval.
  std::size_t binary_start() const { return pos_ + 1; }

private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 2;
};

Image decode_pgm(const fs::path& path, const std::string& bytes) {
  const bool ascii = bytes[1] == '2';
  PgmReader reader(bytes, path);
  const long cols = reader.next_int();
  const long rows = reader.next_int();
  const long maxval = reader.next_int();
  if (cols <= 0 || rows <= 0 || maxval <= 0 || maxval > 65535) {
    throw IoError("'" + path.string() + "': unsupported PGM header");
  }
  Image out(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  const double scale = 1.0 / static_cast<double>(maxval);
  auto values = out.values();
  if (ascii) {
    for (double& v : values) v = static_cast<double>(reader.next_int()) * scale;
    return out;
  }
  const std::size_t width = maxval > 255 ? 2 : 1;
  std::size_t pos = reader.binary_start();
  if (bytes.size() < pos + values.size() * width) throw IoError("'" + path.string() + "': truncated PGM");
  for (double& v : values) {
    unsigned sample = static_cast<unsigned char>(bytes[pos++]);
    if (width == 2) sample = (sample << 8) | static_cast<unsigned char>(bytes[pos++]);
    v = sample * scale;
  }
  return out;
}

double clamp01(double v) { return std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0); }

fs::path header_path(const fs::path& raw) { return fs::path(raw.string() + ".json"); }

} // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

Image read_image(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("input file '" + path.string() + "' does not exist");
  if (path.extension() == ".f64") return read_raw(path);
  const std::string bytes = read_bytes(path);
  if (has_png_signature(bytes)) return decode_png(path, bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) {
    return decode_pgm(path, bytes);
  }
  throw IoError("'" + path.string() + "': unrecognized image format (expected PNG, PGM or .f64)");
}

void write_png(const fs::path& path, const Image& img, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw InvalidArgument("write_png: bit depth must be 8 or 16");
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.cols());
  image.height = static_cast<png_uint_32>(img.rows());
  image.format = bit_depth == 16 ? PNG_FORMAT_LINEAR_Y : PNG_FORMAT_GRAY;

  std::vector<std::uint8_t> pixels8;
  std::vector<std::uint16_t> pixels16;
  const void* buffer = nullptr;
  if (bit_depth == 16) {
    pixels16.resize(img.size());
    for (std::size_t k = 0; k < img.size(); ++k) {
      pixels16[k] = static_cast<std::uint16_t>(std::lround(clamp01(img.values()[k]) * 65535.0));
    }
    buffer = pixels16.data();
  } else {
    pixels8.resize(img.size());
    for (std::size_t k = 0; k < img.size(); ++k) {
      pixels8[k] = static_cast<std::uint8_t>(std::lround(clamp01(img.values()[k]) * 255.0));
    }
    buffer = pixels8.data();
  }
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, buffer, 0, nullptr)) {
    throw IoError("'" + path.string() + "': " + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, buffer, 0, nullptr)) {
    throw IoError("'" + path.string() + "': " + image.message);
  }
  out.resize(size);
  write_file_atomic(path, out);
}

void write_pgm(const fs::path& path, const Image& img) {
  std::ostringstream out;
  out << "P2\n" << img.cols() << ' ' << img.rows() << "\n255\n";
  for (std::size_t i = 0; i < img.rows(); ++i) {
    for (std::size_t j = 0; j < img.cols(); ++j) {
      out << std::lround(clamp01(img(i, j)) * 255.0) << (j + 1 == img.cols() ? '\n' : ' ');
    }
  }
  write_file_atomic(path, out.str());
}

void write_raw(const fs::path& path, const Image& img) {
  std::string data(img.size() * sizeof(double), '\0');
  for (std::size_t k = 0; k < img.size(); ++k) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(img.values()[k]);
    for (int b = 0; b < 8; ++b) data[k * 8 + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  json header = {{"schema_version", kSchemaVersion},
                 {"rows", img.rows()},
                 {"cols", img.cols()},
                 {"dtype", "float64"},
                 {"byte_order", "little"},
                 {"layout", "row-major, origin at (0,0)"}};
  write_file_atomic(path, data);
  write_file_atomic(header_path(path), header.dump(2) + "\n");
}

Image read_raw(const fs::path& path) {
  const fs::path hpath = header_path(path);
  if (!fs::exists(hpath)) throw IoError("raw image header '" + hpath.string() + "' does not exist");
  json header;
  try {
    header = json::parse(read_bytes(hpath));
  } catch (const json::exception& e) {
    throw IoError("'" + hpath.string() + "': " + e.what());
  }
  if (header.value("dtype", "") != "float64" || header.value("byte_order", "") != "little") {
    throw IoError("'" + hpath.string() + "': unsupported raw layout");
  }
  const auto rows = header.at("rows").get<std::size_t>();
  const auto cols = header.at("cols").get<std::size_t>();
  const std::string data = read_bytes(path);
  if (data.size() != rows * cols * sizeof(double)) {
    throw IoError("'" + path.string() + "': size does not match its header");
  }
  Image img(rows, cols);
  for (std::size_t k = 0; k < img.size(); ++k) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(data[k * 8 + static_cast<std::size_t>(b)]);
    img.values()[k] = std::bit_cast<double>(bits);
  }
  return img;
}

std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string{};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config '" + path.string() + "' line " + std::to_string(lineno) + ": expected key = value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_config(const std::map<std::string, std::string>& values, RunConfig& cfg) {
  for (const auto& [key, value] : values) {
    auto as_double = [&]() {
      try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        throw InvalidArgument("config key '" + key + "': '" + value + "' is not a number");
      }
    };
    auto as_count = [&]() {
      const double v = as_double();
      if (v < 0 || v != std::floor(v)) throw InvalidArgument("config key '" + key + "' must be a non-negative integer");
      return static_cast<std::uint64_t>(v);
    };
    if (key == "r") cfg.r = as_double();
    else if (key == "s") cfg.s = as_double();
    else if (key == "lambda0") cfg.lambda0 = as_double();
    else if (key == "mu0") cfg.mu0 = as_double();
    else if (key == "decay") cfg.decay = as_double();
    else if (key == "tau") cfg.tau = as_double();
    else if (key == "delta") cfg.delta = as_double();
    else if (key == "max_iter") cfg.max_iter = as_count();
    else if (key == "min_iter") cfg.min_iter = as_count();
    else if (key == "seed") cfg.seed = as_count();
    else if (key == "pin_means") {
      if (value == "true" || value == "1") cfg.pin_means = true;
      else if (value == "false" || value == "0") cfg.pin_means = false;
      else throw InvalidArgument("config key 'pin_means': expected true or false");
    } else {
      throw InvalidArgument("config: unknown key '" + key + "'");
    }
  }
}

std::string config_to_text(const RunConfig& cfg) {
  std::ostringstream out;
  out << "r = " << format_double(cfg.r) << '\n'
      << "s = " << format_double(cfg.s) << '\n'
      << "lambda0 = " << format_double(cfg.lambda0) << '\n'
      << "mu0 = " << format_double(cfg.mu0) << '\n'
      << "decay = " << format_double(cfg.decay) << '\n'
      << "tau = " << format_double(cfg.tau) << '\n'
      << "delta = " << format_double(cfg.delta) << '\n'
      << "max_iter = " << cfg.max_iter << '\n'
      << "min_iter = " << cfg.min_iter << '\n'
      << "pin_means = " << (cfg.pin_means ? "true" : "false") << '\n'
      << "seed = " << cfg.seed << '\n';
  return out.str();
}

} // namespace mhdm::io
