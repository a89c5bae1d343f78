#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vulncat/catalog.hpp"
#include "vulncat/diagnostic.hpp"
#include "vulncat/taxonomy.hpp"

namespace vulncat {

struct Paragraph {
    std::string text;
    bool operator==(const Paragraph&) const = default;
};

struct BulletItem {
    std::string label;
    std::string text;
    bool operator==(const BulletItem&) const = default;
};

struct BulletList {
    std::vector<BulletItem> items;
    bool operator==(const BulletList&) const = default;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    bool operator==(const Table&) const = default;
};

using Block = std::variant<Paragraph, BulletList, Table>;

struct Section {
    std::string heading;
    std::vector<Block> blocks;
    std::vector<Section> children;
    bool operator==(const Section&) const = default;
};

inline constexpr int kMaxSectionDepth = 4;

struct ReportDocument {
    std::string title;
    std::vector<Section> sections;
    bool operator==(const ReportDocument&) const = default;
};

/// Empty when the depth and table-shape invariants hold; otherwise a
/// description of the first violation.
std::optional<std::string> check_document(const ReportDocument& document);

inline constexpr std::string_view kCatalogPartHeading = "Vulnerability Catalog";
inline constexpr std::string_view kAnalysisPartHeading = "Catalog Analysis";

struct ReportOptions {
    std::string title = "OSGi Vulnerability Catalog";
    /// One histogram table per dimension, in this order.
    std::vector<Dimension> dimensions = {
        Dimension::Location,          Dimension::SourceEntity,      Dimension::Functionality,
        Dimension::Flaw,              Dimension::Target,            Dimension::ConsequenceType,
        Dimension::IntroductionTime,  Dimension::ExploitTime,       Dimension::ExistingMechanism,
        Dimension::PotentialMechanism,
    };
    bool include_zero = false;
};

/// Location groups of the catalog part, in book order.
std::vector<std::string> location_group_order();

/// Group heading for a location value; values outside the fixed mapping are
/// their own group.
std::string location_group(std::string_view location);

/// The four labelled blocks of one entry (Reference, Description,
/// Implementation, Protection), as heading and items.
std::vector<std::pair<std::string, std::vector<BulletItem>>> entry_fields(const VulnerabilityPattern& pattern);

struct BuildResult {
    std::optional<ReportDocument> document;
    /// The Error diagnostics that blocked the build; empty on success.
    std::vector<Diagnostic> diagnostics;
};

/// Gated on lint: any Error finding blocks the document.
BuildResult build_report_document(const Catalog& catalog, const TaxonomyRegistry& registry,
                                  const ReportOptions& options = {});

enum class RenderTarget { Markdown, Latex };

std::optional<RenderTarget> parse_render_target(std::string_view text);
/// "md" or "tex".
std::string_view target_extension(RenderTarget target);

std::string escape_markdown(std::string_view text);
std::string escape_latex(std::string_view text);

std::string render(const ReportDocument& document, RenderTarget target);

/// Debug dump of the document model.
std::string document_json(const ReportDocument& document);

struct GenerateOptions {
    ReportOptions report;
    bool dump_model = false;
};

struct GenerateResult {
    /// Files written, report first. Empty when the gate blocked.
    std::vector<std::filesystem::path> written;
    std::vector<Diagnostic> diagnostics;
};

/// Writes `<stem>.md` or `<stem>.tex` where stem is `output` without its
/// extension, plus `<stem>.report.json` when dumping. Nothing is written when
/// the gate blocks. Write failures are reported as E-IO.
GenerateResult generate(const Catalog& catalog, const TaxonomyRegistry& registry, RenderTarget target,
                        const std::filesystem::path& output, const GenerateOptions& options = {});

}  // namespace vulncat
