#include "gtdet/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "gtdet/errors.hpp"
#include "gtdet/fredholm.hpp"

namespace gtdet {

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "jsonl") return Format::Jsonl;
    throw ArgumentError("format must be 'csv' or 'jsonl', got '" + s + "'");
}

const char* extension(Format f) { return f == Format::Csv ? "csv" : "jsonl"; }

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

TableWriter::TableWriter(std::ostream& os, Format f, std::vector<std::string> columns)
    : os_(os), format_(f), columns_(std::move(columns)) {
    if (format_ == Format::Csv) {
        for (std::size_t i = 0; i < columns_.size(); ++i) os_ << (i ? "," : "") << columns_[i];
        os_ << '\n';
    }
}

void TableWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_.size()) throw InternalError("TableWriter: row width differs from the header");
    if (format_ == Format::Csv) {
        for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_number(values[i]);
    } else {
        // Hand-written so that number formatting matches the CSV exactly.
        os_ << '{';
        for (std::size_t i = 0; i < values.size(); ++i) {
            os_ << (i ? "," : "") << '"' << columns_[i] << "\":";
            os_ << (std::isfinite(values[i]) ? format_number(values[i]) : "null");
        }
        os_ << '}';
    }
    os_ << '\n';
}

Histogram make_histogram(const std::vector<double>& samples, std::size_t bins) {
    if (samples.empty()) throw ArgumentError("histogram: no samples");
    if (bins == 0) throw ArgumentError("histogram: bins must be >= 1");
    auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    double lo = *mn, hi = *mx;
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw ArgumentError("histogram: non-finite sample");
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
        bins = 1;
    }
    Histogram h;
    const double w = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(b == bins ? hi : lo + w * static_cast<double>(b));
    h.counts.assign(bins, 0);
    for (double x : samples) {
        auto b = static_cast<std::size_t>((x - lo) / w);
        h.counts[std::min(b, bins - 1)] += 1;
    }
    for (std::size_t c : h.counts) h.density.push_back(static_cast<double>(c) / (static_cast<double>(samples.size()) * w));
    return h;
}

void export_histogram(std::ostream& os, const std::vector<double>& samples, std::size_t bins,
                      const std::function<double(double)>& overlay, const std::string& overlay_name) {
    Histogram h = make_histogram(samples, bins);
    std::vector<std::string> cols{"left", "right", "count", "density"};
    if (overlay) cols.push_back(overlay_name.empty() ? "overlay" : overlay_name);
    TableWriter w(os, Format::Csv, cols);
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        std::vector<double> row{h.edges[b], h.edges[b + 1], static_cast<double>(h.counts[b]), h.density[b]};
        if (overlay) row.push_back(overlay(0.5 * (h.edges[b] + h.edges[b + 1])));
        w.row(row);
    }
}

double tw2_density(double s) {
    constexpr double h = 1e-3;
    if (s < kTw2MinArg + h) return 0.0;
    return (tw2_cdf(s + h).value - tw2_cdf(s - h).value) / (2.0 * h);
}

std::vector<double> parse_list(const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ArgumentError("cannot parse number '" + item + "' in '" + spec + "'");
        }
    }
    if (out.empty()) throw ArgumentError("empty list '" + spec + "'");
    return out;
}

std::vector<double> parse_grid(const std::string& spec) {
    std::string s = spec;
    std::replace(s.begin(), s.end(), ':', ',');
    auto v = parse_list(s);
    if (v.size() != 3) throw ArgumentError("grid must be 'a:b:step', got '" + spec + "'");
    const double a = v[0], b = v[1], step = v[2];
    if (!(step > 0.0) || !(b >= a)) throw ArgumentError("grid needs step > 0 and b >= a: '" + spec + "'");
    double count = std::floor((b - a) / step + 1e-9);
    if (count > 1e6) throw ArgumentError("grid has more than 10^6 points: '" + spec + "'");
    std::vector<double> out;
    for (long i = 0; i <= static_cast<long>(count); ++i) out.push_back(a + step * static_cast<double>(i));
    return out;
}

std::string output_directory(const std::string& cli_value) {
    if (!cli_value.empty()) return cli_value;
    if (const char* env = std::getenv("GTDET_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config;
    j["artifact_version"] = kArtifactVersion;
    j["wall_seconds"] = wall_seconds;
    j["exit_code"] = exit_code;
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : checks) {
        cs.push_back({{"id", c.id},
                      {"title", c.title},
                      {"pass", c.pass},
                      {"measured", std::isfinite(c.measured) ? nlohmann::json(c.measured) : nlohmann::json(nullptr)},
                      {"threshold", c.threshold},
                      {"seconds", c.seconds},
                      {"time_limit", c.time_limit},
                      {"detail", c.detail}});
    }
    j["checks"] = cs;
    j["error_estimates"] = error_estimates;
    j["outputs"] = outputs;
    return j;
}

}  // namespace gtdet
