#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vulncat/catalog.hpp"
#include "vulncat/taxonomy.hpp"

namespace vulncat {

struct HistogramBin {
    std::string value;
    std::size_t count = 0;

    bool operator==(const HistogramBin&) const = default;
};

/// Count descending, then value ascending.
struct Histogram {
    Dimension dimension = Dimension::Location;
    std::vector<HistogramBin> bins;

    std::size_t total() const;
    /// 0 for values without a bin.
    std::size_t count(std::string_view value) const;
    bool operator==(const Histogram&) const = default;
};

struct HistogramOptions {
    /// Adds the Base values that never occur, with count 0.
    bool include_zero = false;
};

/// One count per occurrence: an entry listing k values contributes k. The
/// platform dimension counts vulnerable and robust lists together.
Histogram histogram(const Catalog& catalog, Dimension dimension, HistogramOptions options = {});

enum class Cell { Vulnerable, Robust, NotRelevant };

/// "V", "R" or "-".
std::string_view cell_symbol(Cell cell);

struct MatrixRow {
    Identifier identifier;
    std::string name;
    std::vector<Cell> cells;
};

struct PlatformMatrix {
    std::vector<std::string> columns;
    std::vector<MatrixRow> rows;

    /// nullopt when the row name or column is unknown.
    std::optional<Cell> at(std::string_view row_name, std::string_view column) const;
};

inline constexpr std::string_view kMatrixLegend = "V: Platform is Vulnerable; R: Platform is Robust; - : not relevant";

/// Rows in identifier order. Columns are platforms seen in the catalog plus
/// registered platform extensions: Felix, Knopflerfish, Equinox, Concierge,
/// SFelix first, the rest alphabetically. A platform listed as both
/// vulnerable and robust reads V.
PlatformMatrix platform_matrix(const Catalog& catalog, const TaxonomyRegistry& registry);

struct PlatformTally {
    std::string platform;
    std::size_t vulnerable = 0;
    std::size_t robust = 0;
    std::size_t not_relevant = 0;

    bool operator==(const PlatformTally&) const = default;
};

std::vector<PlatformTally> platform_summary(const PlatformMatrix& matrix);

inline constexpr std::string_view kJavaPermissions = "Java Permissions";

struct MechanismCoverage {
    Histogram existing;
    /// Entries with no existing mechanism.
    std::size_t none_count = 0;
    /// Entries listing Java Permissions.
    std::size_t java_permission_preventable_count = 0;
};

MechanismCoverage mechanism_coverage(const Catalog& catalog);

struct CoverageSummary {
    std::size_t count = 0;
    double mean = 0.0;
    int min = 0;
    int max = 0;
    std::size_t at_full = 0;
};

/// All zeros on an empty catalog.
CoverageSummary coverage_summary(const Catalog& catalog);

/// Mean with one decimal, e.g. "78.4".
std::string format_mean(double mean);

/// Columns padded to their widest cell, separated by two spaces, with a
/// dashed rule under the header. Trailing spaces are trimmed.
std::string aligned_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

std::string histogram_table(const Histogram& histogram);
std::string histogram_json(const Histogram& histogram);
/// All histograms in one JSON array, in the given order.
std::string histograms_json(const std::vector<Histogram>& histograms);

std::string matrix_table(const PlatformMatrix& matrix);
std::string matrix_json(const PlatformMatrix& matrix);
/// Header `Vulnerability,<platforms...>`, one row per entry, LF line ends,
/// fields quoted when they contain a comma, quote or newline.
std::string matrix_csv(const PlatformMatrix& matrix);

std::string summary_table(const std::vector<PlatformTally>& tallies);
std::string coverage_text(const CoverageSummary& summary, const MechanismCoverage& mechanisms);

}  // namespace vulncat
