#pragma once

// Image and run-artifact persistence for the command-line tool.

#include "mhdm/blind.hpp"
#include "mhdm/errors.hpp"
#include "mhdm/spectral.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace mhdm::io {

inline constexpr int kSchemaVersion = 1;

class IoError : public Error {
public:
  using Error::Error;
};

/// Reads a grayscale image and maps it to [0,1]:
///   * ASCII (P2) or binary (P5) PGM, 8 or 16 bit;
///   * 8 or 16 bit grayscale PNG (color PNGs are converted to luminance);
///   * `.f64` raw files written by write_raw (values kept as stored).
Image read_image(const std::filesystem::path& path);

/// Clamps to [0,1] and quantizes. bit_depth is 8 or 16.
void write_png(const std::filesystem::path& path, const Image& img, int bit_depth = 8);
void write_pgm(const std::filesystem::path& path, const Image& img);

/// Full-precision little-endian float64 dump plus a `<path>.json` header
/// (schema_version, rows, cols, dtype, byte_order).
void write_raw(const std::filesystem::path& path, const Image& img);
Image read_raw(const std::filesystem::path& path);

/// Writes `contents` to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double v);

/// Flat `key = value` text file; `#` starts a comment.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Applies recognized keys (r, s, lambda0, mu0, decay, tau, delta, max_iter,
/// min_iter, pin_means, seed) to cfg. Unknown keys raise InvalidArgument.
void apply_config(const std::map<std::string, std::string>& values, RunConfig& cfg);

/// Serializes cfg in the same key-value format.
std::string config_to_text(const RunConfig& cfg);

} // namespace mhdm::io
