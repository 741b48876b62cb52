#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gtdet/verify.hpp"

namespace gtdet {

enum class Format { Csv, Jsonl };
Format parse_format(const std::string& s);  // "csv" | "jsonl"
const char* extension(Format f);

// Rows of doubles under fixed column names; numbers are printed with 17 significant digits
// so identical inputs give byte-identical files.
class TableWriter {
public:
    TableWriter(std::ostream& os, Format f, std::vector<std::string> columns);
    void row(const std::vector<double>& values);

private:
    std::ostream& os_;
    Format format_;
    std::vector<std::string> columns_;
};

std::string format_number(double v);

// Equal-width bins on [min, max]; the last bin is closed. Constant samples get one bin of
// width 1 centred on the value. ArgumentError on empty input or bins == 0.
struct Histogram {
    std::vector<double> edges;  // bins + 1
    std::vector<std::size_t> counts;
    std::vector<double> density;  // counts / (n · width)
};
Histogram make_histogram(const std::vector<double>& samples, std::size_t bins);

// CSV: left, right, count, density[, overlay at the bin centre].
void export_histogram(std::ostream& os, const std::vector<double>& samples, std::size_t bins,
                      const std::function<double(double)>& overlay = {}, const std::string& overlay_name = "");

// F₂′ by a centred difference of tw2_cdf with step 1e-3; 0 below −8 + 1e-3.
double tw2_density(double s);

// "a:b:step" inclusive of b up to rounding; ArgumentError on step <= 0 or more than 10⁶ points.
std::vector<double> parse_grid(const std::string& spec);
// "1,2,3"
std::vector<double> parse_list(const std::string& spec);

// CLI value if non-empty, else $GTDET_OUTPUT_DIR, else ".".
std::string output_directory(const std::string& cli_value);

inline constexpr const char* kArtifactVersion = "1.0.0";

struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    double wall_seconds = 0.0;
    std::vector<CheckResult> checks;
    nlohmann::json error_estimates = nlohmann::json::object();
    std::vector<std::string> outputs;
    int exit_code = 0;

    nlohmann::json to_json() const;
};

}  // namespace gtdet
