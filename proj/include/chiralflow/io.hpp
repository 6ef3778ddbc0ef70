// io.hpp: CSV/JSON/SVG writers used by the runner

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace chiralflow::io {

// "%.17g"; non-finite values are written as nan / inf / -inf.
std::string format_double(double v);

// RFC 4180 quoting when the field contains a comma, quote or line break.
std::string csv_field(std::string_view s);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(const std::vector<std::string>& fields);
    void add_row(const std::vector<double>& values);

    std::string str() const { return text_; }
    void save(const std::filesystem::path& path) const;

private:
    std::size_t columns_;
    std::string text_;
};

void write_text(const std::filesystem::path& path, std::string_view text);

struct PlotSeries {
    std::string name;
    std::vector<double> y;
    std::string color;
};

// Minimal line chart: frame, axis ticks, one polyline per series, legend.
std::string svg_line_chart(std::string_view title, std::string_view x_label,
                           const std::vector<double>& x, const std::vector<PlotSeries>& series);

} // namespace chiralflow::io
