#include "mfglab/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mfg::io {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string csv_escape(const std::string& field) {
    const bool needs_quotes =
        field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string Csv::serialize() const {
    std::string out;
    auto append_row = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(row[i]);
        }
        out += "\r\n";
    };
    if (!header.empty()) append_row(header);
    for (const auto& row : rows) append_row(row);
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto parent = path.parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Frame {
    double width = 720.0, height = 480.0;
    double left = 70.0, right = 30.0, top = 40.0, bottom = 50.0;
    double plot_w() const { return width - left - right; }
    double plot_h() const { return height - top - bottom; }
};

void open_svg(std::ostringstream& os, const Frame& f, const std::string& title,
              const std::string& x_label, const std::string& y_label) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width
       << "\" height=\"" << f.height << "\" viewBox=\"0 0 " << f.width << " "
       << f.height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    os << "<text x=\"" << f.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"16\">"
       << xml_escape(title) << "</text>\n";
    os << "<text x=\"" << f.left + f.plot_w() / 2 << "\" y=\"" << f.height - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << xml_escape(x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << f.top + f.plot_h() / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
          "transform=\"rotate(-90 18 "
       << f.top + f.plot_h() / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
}

void axis_ticks(std::ostringstream& os, const Frame& f, double x_lo, double x_hi,
                double y_lo, double y_hi) {
    os << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.plot_w()
       << "\" height=\"" << f.plot_h()
       << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = static_cast<double>(k) / 4.0;
        const double px = f.left + fx * f.plot_w();
        const double py = f.top + f.plot_h() + 16.0;
        os << "<text x=\"" << px << "\" y=\"" << py
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
           << format_double(x_lo + fx * (x_hi - x_lo)) << "</text>\n";
        const double fy = static_cast<double>(k) / 4.0;
        const double qy = f.top + (1.0 - fy) * f.plot_h();
        os << "<text x=\"" << f.left - 6.0 << "\" y=\"" << qy + 3.0
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
           << format_double(y_lo + fy * (y_hi - y_lo)) << "</text>\n";
    }
}

} // namespace

std::string ramp_color(double v, double lo, double hi) {
    double t = (hi > lo) ? (v - lo) / (hi - lo) : 0.5;
    t = std::clamp(t, 0.0, 1.0);
    // dark blue (#20306f) to warm yellow (#f2c94c)
    const int r = static_cast<int>(std::lround(0x20 + t * (0xf2 - 0x20)));
    const int g = static_cast<int>(std::lround(0x30 + t * (0xc9 - 0x30)));
    const int b = static_cast<int>(std::lround(0x6f + t * (0x4c - 0x6f)));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string svg_line_chart(const std::vector<double>& xs,
                           const std::vector<LineSeries>& series,
                           const std::string& title, const std::string& x_label,
                           const std::string& y_label) {
    if (xs.empty() || series.empty())
        throw std::invalid_argument("svg_line_chart: empty data");
    double x_lo = xs.front(), x_hi = xs.front();
    for (double x : xs) { x_lo = std::min(x_lo, x); x_hi = std::max(x_hi, x); }
    double y_lo = series[0].ys.at(0), y_hi = y_lo;
    for (const auto& s : series) {
        if (s.ys.size() != xs.size())
            throw std::invalid_argument("svg_line_chart: series length mismatch");
        for (double y : s.ys) { y_lo = std::min(y_lo, y); y_hi = std::max(y_hi, y); }
    }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;

    const Frame f;
    std::ostringstream os;
    open_svg(os, f, title, x_label, y_label);
    axis_ticks(os, f, x_lo, x_hi, y_lo, y_hi);

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = palette[si % 6];
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double px = f.left + (xs[i] - x_lo) / (x_hi - x_lo) * f.plot_w();
            const double py =
                f.top + (1.0 - (series[si].ys[i] - y_lo) / (y_hi - y_lo)) * f.plot_h();
            os << px << "," << py << " ";
        }
        os << "\"/>\n";
        os << "<text x=\"" << f.left + 8.0 << "\" y=\"" << f.top + 16.0 + 14.0 * si
           << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">"
           << xml_escape(series[si].name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_cell_map(const Array2d& values,
                         const std::function<std::string(double)>& color,
                         const std::string& title, const std::string& x_label,
                         const std::string& y_label, double x_lo, double x_hi,
                         double y_lo, double y_hi) {
    if (values.rows() == 0 || values.cols() == 0)
        throw std::invalid_argument("svg_cell_map: empty matrix");
    double v_lo = values(0, 0), v_hi = v_lo;
    for (double v : values.data()) { v_lo = std::min(v_lo, v); v_hi = std::max(v_hi, v); }
    auto pick = color ? color : std::function<std::string(double)>(
                                    [v_lo, v_hi](double v) { return ramp_color(v, v_lo, v_hi); });

    const Frame f;
    std::ostringstream os;
    open_svg(os, f, title, x_label, y_label);
    const double cw = f.plot_w() / static_cast<double>(values.cols());
    const double ch = f.plot_h() / static_cast<double>(values.rows());
    for (std::size_t r = 0; r < values.rows(); ++r) {
        for (std::size_t c = 0; c < values.cols(); ++c) {
            const double px = f.left + cw * static_cast<double>(c);
            const double py = f.top + ch * static_cast<double>(values.rows() - 1 - r);
            os << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cw + 0.5
               << "\" height=\"" << ch + 0.5 << "\" fill=\"" << pick(values(r, c))
               << "\"/>\n";
        }
    }
    axis_ticks(os, f, x_lo, x_hi, y_lo, y_hi);
    os << "</svg>\n";
    return os.str();
}

Emitter::Emitter(std::filesystem::path out_dir) : dir_(std::move(out_dir)) {
    std::filesystem::create_directories(dir_);
}

void Emitter::emit(const std::string& name, const std::string& content) {
    write_file_atomic(dir_ / name, content);
    files_.push_back(FileRecord{name, hash_hex(content), content.size()});
}

std::string manifest_json(const RunManifest& meta, const std::vector<FileRecord>& files) {
    nlohmann::json j;
    j["tool_version"] = meta.tool_version;
    j["config_path"] = meta.config_path;
    j["config_echo"] = meta.config_echo;
    j["seed"] = meta.seed;
    j["wall_seconds"] = meta.wall_seconds;
    auto checks = nlohmann::json::array();
    for (const auto& [name, pass] : meta.checks)
        checks.push_back({{"name", name}, {"pass", pass}});
    j["checks"] = checks;
    auto list = nlohmann::json::array();
    for (const auto& f : files)
        list.push_back({{"bytes", f.bytes}, {"fnv1a64", f.hash}, {"name", f.name}});
    j["files"] = list;
    return j.dump(2) + "\n";
}

void Emitter::write_manifest(const RunManifest& meta) const {
    write_file_atomic(dir_ / "manifest.json", manifest_json(meta, files_));
}

} // namespace mfg::io
