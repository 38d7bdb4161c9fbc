#pragma once

#include "mfglab/array2d.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mfg::io {

/// Shortest decimal string that parses back to exactly v. Deterministic, so
/// repeated runs emit byte-identical tables.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// CSV (RFC 4180: CRLF row ends, fields quoted when they contain
// commas, quotes or line breaks, embedded quotes doubled).

std::string csv_escape(const std::string& field);

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string serialize() const;
};

// ---------------------------------------------------------------------------
// Content hashing (FNV-1a, 64 bit) and atomic file emission.

std::uint64_t fnv1a64(std::string_view bytes);
/// 16 lowercase hex digits of fnv1a64.
std::string hash_hex(std::string_view bytes);

/// Writes content to a temporary sibling and renames it over path, creating
/// parent directories first. Readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// ---------------------------------------------------------------------------
// SVG plots, self-contained (inline styles, no external references).

struct LineSeries {
    std::string name;
    std::vector<double> ys;
};

/// Polyline chart of one or more series against shared x values.
std::string svg_line_chart(const std::vector<double>& xs,
                           const std::vector<LineSeries>& series,
                           const std::string& title, const std::string& x_label,
                           const std::string& y_label);

/// Cell map of a matrix; rows are drawn bottom-up so (0,0) is the lower-left
/// cell. color(v) must return "#rrggbb"; pass {} for the built-in ramp.
std::string svg_cell_map(const Array2d& values,
                         const std::function<std::string(double)>& color,
                         const std::string& title, const std::string& x_label,
                         const std::string& y_label, double x_lo, double x_hi,
                         double y_lo, double y_hi);

/// Linear ramp between dark blue and warm yellow over [lo, hi].
std::string ramp_color(double v, double lo, double hi);

// ---------------------------------------------------------------------------
// Run manifest: one JSON document naming every emitted artifact.

struct FileRecord {
    std::string name;
    std::string hash;
    std::uint64_t bytes = 0;
};

struct RunManifest {
    std::string tool_version;
    std::string config_path;
    std::string config_echo; // raw config text, empty when none was read
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::vector<std::pair<std::string, bool>> checks; // (name, pass)
};

/// Collects artifacts for one run directory: every emit() writes atomically
/// and records name, byte count and content hash. write_manifest() emits
/// manifest.json listing all previously emitted files (the manifest cannot
/// hash itself and is excluded from its own list).
class Emitter {
  public:
    explicit Emitter(std::filesystem::path out_dir);

    void emit(const std::string& name, const std::string& content);
    void write_manifest(const RunManifest& meta) const;

    const std::filesystem::path& dir() const { return dir_; }
    const std::vector<FileRecord>& files() const { return files_; }

  private:
    std::filesystem::path dir_;
    std::vector<FileRecord> files_;
};

/// The manifest JSON body (UTF-8, keys sorted); exposed for tests.
std::string manifest_json(const RunManifest& meta, const std::vector<FileRecord>& files);

} // namespace mfg::io
