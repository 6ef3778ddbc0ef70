#include "chiralflow/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chiralflow::io {

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size())
{
    add_row(header);
}

void CsvWriter::add_row(const std::vector<std::string>& fields)
{
    if (fields.size() != columns_) throw std::invalid_argument("CsvWriter: row has wrong number of fields");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) text_ += ',';
        text_ += csv_field(fields[i]);
    }
    text_ += "\r\n";
}

void CsvWriter::add_row(const std::vector<double>& values)
{
    std::vector<std::string> fields;
    fields.reserve(values.size());
    for (double v : values) fields.push_back(format_double(v));
    add_row(fields);
}

void CsvWriter::save(const std::filesystem::path& path) const
{
    write_text(path, text_);
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

namespace {

std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v, int digits = 6)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

} // namespace

std::string svg_line_chart(std::string_view title, std::string_view x_label,
                           const std::vector<double>& x, const std::vector<PlotSeries>& series)
{
    constexpr double width = 800, height = 450;
    constexpr double left = 70, right = 20, top = 40, bottom = 50;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    double xmin = x.empty() ? 0.0 : x.front(), xmax = x.empty() ? 1.0 : x.back();
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& s : series) {
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
    if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
    if (xmax == xmin) xmax = xmin + 1.0;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    auto px = [&](double v) { return left + (v - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return top + (ymax - v) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << xml_escape(title) << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (ymin < 0.0 && ymax > 0.0) {
        os << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << fmt(py(0.0))
           << "\" y2=\"" << fmt(py(0.0)) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << top + ph + 18
           << "\" text-anchor=\"middle\">" << fmt(xv, 4) << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << fmt(py(yv) + 4)
           << "\" text-anchor=\"end\">" << fmt(yv, 4) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">"
       << xml_escape(x_label) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& ser = series[s];
        os << "<polyline fill=\"none\" stroke=\"" << xml_escape(ser.color)
           << "\" stroke-width=\"1.2\" points=\"";
        const std::size_t n = std::min(ser.y.size(), x.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(ser.y[i])) continue;
            os << fmt(px(x[i])) << ',' << fmt(py(ser.y[i])) << ' ';
        }
        os << "\"/>\n";
        const double ly = top + 16 + 16.0 * static_cast<double>(s);
        os << "<line x1=\"" << left + pw - 150 << "\" x2=\"" << left + pw - 125 << "\" y1=\"" << ly - 4
           << "\" y2=\"" << ly - 4 << "\" stroke=\"" << xml_escape(ser.color) << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw - 120 << "\" y=\"" << ly << "\">" << xml_escape(ser.name)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace chiralflow::io
