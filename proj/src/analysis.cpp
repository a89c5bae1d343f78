#include "vulncat/analysis.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace vulncat {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 5> kPlatformOrder = {"Felix", "Knopflerfish", "Equinox", "Concierge",
                                                            "SFelix"};

bool contains(const std::vector<TaxonomyValue>& values, std::string_view text) {
    return std::any_of(values.begin(), values.end(), [&](const TaxonomyValue& v) { return v.text == text; });
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (const char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

Json histogram_object(const Histogram& histogram) {
    Json bins = Json::array();
    for (const auto& bin : histogram.bins) bins.push_back({{"value", bin.value}, {"count", bin.count}});
    return {{"dimension", std::string(dimension_name(histogram.dimension))},
            {"total", histogram.total()},
            {"bins", std::move(bins)}};
}

}  // namespace

std::size_t Histogram::total() const {
    std::size_t sum = 0;
    for (const auto& bin : bins) sum += bin.count;
    return sum;
}

std::size_t Histogram::count(std::string_view value) const {
    for (const auto& bin : bins) {
        if (bin.value == value) return bin.count;
    }
    return 0;
}

Histogram histogram(const Catalog& catalog, Dimension dimension, HistogramOptions options) {
    std::map<std::string, std::size_t> counts;
    for (const auto& [id, pattern] : catalog.entries) {
        for (auto& value : values_in(pattern, dimension)) ++counts[std::move(value)];
    }
    if (options.include_zero) {
        for (const auto value : base_values(dimension)) counts.try_emplace(std::string(value), 0);
    }
    Histogram out{dimension, {}};
    for (auto& [value, count] : counts) out.bins.push_back({value, count});
    std::stable_sort(out.bins.begin(), out.bins.end(),
                     [](const HistogramBin& a, const HistogramBin& b) { return a.count > b.count; });
    return out;
}

std::string_view cell_symbol(Cell cell) {
    switch (cell) {
        case Cell::Vulnerable: return "V";
        case Cell::Robust: return "R";
        case Cell::NotRelevant: break;
    }
    return "-";
}

std::optional<Cell> PlatformMatrix::at(std::string_view row_name, std::string_view column) const {
    const auto col = std::find(columns.begin(), columns.end(), column);
    if (col == columns.end()) return std::nullopt;
    for (const auto& row : rows) {
        if (row.name == row_name) return row.cells[static_cast<std::size_t>(col - columns.begin())];
    }
    return std::nullopt;
}

PlatformMatrix platform_matrix(const Catalog& catalog, const TaxonomyRegistry& registry) {
    std::set<std::string> platforms;
    for (const auto& [id, pattern] : catalog.entries) {
        for (const auto& value : values_in(pattern, Dimension::Platform)) platforms.insert(value);
    }
    for (auto& value : registry.extensions(Dimension::Platform)) platforms.insert(std::move(value));

    PlatformMatrix matrix;
    for (const auto preferred : kPlatformOrder) {
        if (platforms.erase(std::string(preferred))) matrix.columns.emplace_back(preferred);
    }
    matrix.columns.insert(matrix.columns.end(), platforms.begin(), platforms.end());

    for (const auto& [id, pattern] : catalog.entries) {
        MatrixRow row{id, pattern.reference.name, {}};
        const auto& impl = pattern.implementation;
        for (const auto& column : matrix.columns) {
            if (contains(impl.vulnerable_platforms, column)) row.cells.push_back(Cell::Vulnerable);
            else if (contains(impl.robust_platforms, column)) row.cells.push_back(Cell::Robust);
            else row.cells.push_back(Cell::NotRelevant);
        }
        matrix.rows.push_back(std::move(row));
    }
    return matrix;
}

std::vector<PlatformTally> platform_summary(const PlatformMatrix& matrix) {
    std::vector<PlatformTally> out;
    for (std::size_t c = 0; c < matrix.columns.size(); ++c) {
        PlatformTally tally{matrix.columns[c]};
        for (const auto& row : matrix.rows) {
            switch (row.cells[c]) {
                case Cell::Vulnerable: ++tally.vulnerable; break;
                case Cell::Robust: ++tally.robust; break;
                case Cell::NotRelevant: ++tally.not_relevant; break;
            }
        }
        out.push_back(std::move(tally));
    }
    return out;
}

MechanismCoverage mechanism_coverage(const Catalog& catalog) {
    MechanismCoverage out;
    out.existing = histogram(catalog, Dimension::ExistingMechanism);
    for (const auto& [id, pattern] : catalog.entries) {
        const auto& mechanisms = pattern.protection.existing_mechanisms;
        if (mechanisms.empty()) ++out.none_count;
        if (contains(mechanisms, kJavaPermissions)) ++out.java_permission_preventable_count;
    }
    return out;
}

CoverageSummary coverage_summary(const Catalog& catalog) {
    CoverageSummary out;
    long long sum = 0;
    for (const auto& [id, pattern] : catalog.entries) {
        const int coverage = pattern.implementation.test_coverage;
        if (out.count == 0) out.min = out.max = coverage;
        out.min = std::min(out.min, coverage);
        out.max = std::max(out.max, coverage);
        sum += coverage;
        if (coverage == 100) ++out.at_full;
        ++out.count;
    }
    if (out.count) out.mean = static_cast<double>(sum) / static_cast<double>(out.count);
    return out;
}

std::string format_mean(double mean) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.1f", mean);
    return buffer;
}

std::string aligned_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths(header.size(), 0);
    const auto measure = [&widths](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size() && i < widths.size(); ++i) {
            widths[i] = std::max(widths[i], cells[i].size());
        }
    };
    measure(header);
    for (const auto& row : rows) measure(row);

    std::string out;
    const auto emit = [&](const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < widths.size(); ++i) {
            const std::string cell = i < cells.size() ? cells[i] : std::string();
            if (i) line += "  ";
            line += cell;
            line.append(widths[i] - cell.size(), ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
    };
    emit(header);
    std::vector<std::string> rule;
    for (const auto width : widths) rule.emplace_back(width, '-');
    emit(rule);
    for (const auto& row : rows) emit(row);
    return out;
}

std::string histogram_table(const Histogram& histogram) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& bin : histogram.bins) rows.push_back({bin.value, std::to_string(bin.count)});
    return aligned_table({std::string(dimension_name(histogram.dimension)), "count"}, rows);
}

std::string histogram_json(const Histogram& histogram) { return histogram_object(histogram).dump(2) + "\n"; }

std::string histograms_json(const std::vector<Histogram>& histograms) {
    Json all = Json::array();
    for (const auto& histogram : histograms) all.push_back(histogram_object(histogram));
    return all.dump(2) + "\n";
}

std::string matrix_table(const PlatformMatrix& matrix) {
    std::vector<std::string> header{"Vulnerability"};
    header.insert(header.end(), matrix.columns.begin(), matrix.columns.end());
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : matrix.rows) {
        std::vector<std::string> cells{row.name};
        for (const auto cell : row.cells) cells.emplace_back(cell_symbol(cell));
        rows.push_back(std::move(cells));
    }
    return aligned_table(header, rows) + std::string(kMatrixLegend) + "\n";
}

std::string matrix_json(const PlatformMatrix& matrix) {
    Json rows = Json::array();
    for (const auto& row : matrix.rows) {
        Json cells = Json::array();
        for (const auto cell : row.cells) cells.push_back(std::string(cell_symbol(cell)));
        rows.push_back({{"identifier", identifier_text(row.identifier)}, {"name", row.name}, {"cells", cells}});
    }
    const Json out = {{"columns", matrix.columns}, {"rows", rows}, {"legend", std::string(kMatrixLegend)}};
    return out.dump(2) + "\n";
}

std::string matrix_csv(const PlatformMatrix& matrix) {
    std::ostringstream out;
    out << "Vulnerability";
    for (const auto& column : matrix.columns) out << ',' << csv_field(column);
    out << '\n';
    for (const auto& row : matrix.rows) {
        out << csv_field(row.name);
        for (const auto cell : row.cells) out << ',' << cell_symbol(cell);
        out << '\n';
    }
    return out.str();
}

std::string summary_table(const std::vector<PlatformTally>& tallies) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& tally : tallies) {
        rows.push_back({tally.platform, std::to_string(tally.vulnerable), std::to_string(tally.robust),
                        std::to_string(tally.not_relevant)});
    }
    return aligned_table({"platform", "vulnerable", "robust", "not relevant"}, rows);
}

std::string coverage_text(const CoverageSummary& summary, const MechanismCoverage& mechanisms) {
    std::ostringstream out;
    out << "test coverage: mean " << format_mean(summary.mean) << "%, min " << summary.min << "%, max "
        << summary.max << "%, " << summary.at_full << " of " << summary.count << " at 100%\n";
    out << "existing mechanisms: " << mechanisms.none_count << " entries with none, "
        << mechanisms.java_permission_preventable_count << " preventable by " << kJavaPermissions << "\n";
    return out.str();
}

}  // namespace vulncat
