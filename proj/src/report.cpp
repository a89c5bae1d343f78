#include "vulncat/report.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "vulncat/analysis.hpp"
#include "vulncat/text.hpp"

namespace vulncat {

namespace {

using Json = nlohmann::ordered_json;

const std::vector<std::pair<std::string_view, std::string_view>> kLocationGroups = {
    {"Bundle Archive", "Bundle Archive"},
    {"Bundle Manifest", "Bundle Manifest"},
    {"Bundle Activator", "Bundle Activator"},
    {"Application Code - Native Code", "Bundle Code - Native"},
    {"Application Code - Java Code", "Bundle Code - Java"},
    {"Application Code - Java API", "Bundle Code - Java"},
    {"Application Code - OSGi API", "Bundle Code - OSGi API"},
    {"Bundle Fragment", "Bundle Fragments"},
};

std::string or_dash(std::string text) { return text.empty() ? std::string("-") : text; }

std::string joined(const std::vector<TaxonomyValue>& values) {
    std::vector<std::string> texts;
    for (const auto& value : values) texts.push_back(value.text);
    return or_dash(join(texts, "; "));
}

std::string dimension_heading(Dimension dimension) {
    std::string out(dimension_name(dimension));
    std::replace(out.begin(), out.end(), '-', ' ');
    bool start = true;
    for (auto& c : out) {
        if (start) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        start = c == ' ';
    }
    return out;
}

Section entry_section(const VulnerabilityPattern& pattern) {
    Section section{pattern.reference.name, {}, {}};
    const auto& locations = pattern.reference.locations;
    if (locations.size() > 1) {
        std::vector<std::string> others;
        for (std::size_t i = 1; i < locations.size(); ++i) others.push_back(locations[i].text);
        section.blocks.push_back(Paragraph{"Also located in: " + join(others, "; ")});
    }
    for (auto& [heading, items] : entry_fields(pattern)) {
        section.children.push_back({heading, {BulletList{std::move(items)}}, {}});
    }
    return section;
}

Section catalog_part(const Catalog& catalog) {
    std::map<std::string, std::vector<const VulnerabilityPattern*>> groups;
    for (const auto& [id, pattern] : catalog.entries) {
        const auto& locations = pattern.reference.locations;
        groups[locations.empty() ? std::string("Unlocated") : location_group(locations.front().text)].push_back(
            &pattern);
    }
    Section part{std::string(kCatalogPartHeading), {}, {}};
    const auto emit = [&](const std::string& heading) {
        const auto it = groups.find(heading);
        if (it == groups.end()) return;
        Section group{heading, {}, {}};
        for (const auto* pattern : it->second) group.children.push_back(entry_section(*pattern));
        part.children.push_back(std::move(group));
        groups.erase(it);
    };
    for (const auto& heading : location_group_order()) emit(heading);
    while (!groups.empty()) emit(groups.begin()->first);
    return part;
}

Section analysis_part(const Catalog& catalog, const TaxonomyRegistry& registry, const ReportOptions& options) {
    Section part{std::string(kAnalysisPartHeading), {}, {}};
    for (const auto dimension : options.dimensions) {
        const auto h = histogram(catalog, dimension, {options.include_zero});
        Table table{{dimension_heading(dimension), "Count"}, {}};
        for (const auto& bin : h.bins) table.rows.push_back({bin.value, std::to_string(bin.count)});
        part.children.push_back({dimension_heading(dimension), {std::move(table)}, {}});
    }

    const auto matrix = platform_matrix(catalog, registry);
    Table table{{"Vulnerability"}, {}};
    table.header.insert(table.header.end(), matrix.columns.begin(), matrix.columns.end());
    table.header.push_back("Any with Java Permissions");
    for (const auto& row : matrix.rows) {
        std::vector<std::string> cells{row.name};
        for (const auto cell : row.cells) cells.emplace_back(cell_symbol(cell));
        const auto& mechanisms = catalog.entries.at(row.identifier).protection.existing_mechanisms;
        const bool java = std::any_of(mechanisms.begin(), mechanisms.end(),
                                      [](const TaxonomyValue& v) { return v.text == kJavaPermissions; });
        cells.emplace_back(java ? "R" : "-");
        table.rows.push_back(std::move(cells));
    }
    part.children.push_back({"Platform Vulnerabilities", {std::move(table), Paragraph{std::string(kMatrixLegend)}}, {}});

    Table summary{{"Platform", "Vulnerable", "Robust", "Not relevant"}, {}};
    for (const auto& tally : platform_summary(matrix)) {
        summary.rows.push_back({tally.platform, std::to_string(tally.vulnerable), std::to_string(tally.robust),
                                std::to_string(tally.not_relevant)});
    }
    const auto coverage = coverage_summary(catalog);
    const auto mechanisms = mechanism_coverage(catalog);
    std::ostringstream text;
    text << "Test coverage over " << coverage.count << " entries: mean " << format_mean(coverage.mean) << "%, min "
         << coverage.min << "%, max " << coverage.max << "%, " << coverage.at_full << " at 100%. "
         << mechanisms.none_count << " entries have no existing mechanism; "
         << mechanisms.java_permission_preventable_count << " can be prevented by Java Permissions.";
    part.children.push_back({"Platform Summary", {std::move(summary), Paragraph{text.str()}}, {}});
    return part;
}

std::optional<std::string> check_section(const Section& section, int depth) {
    if (depth > kMaxSectionDepth) return "section \"" + section.heading + "\" is deeper than 4";
    for (const auto& block : section.blocks) {
        if (const auto* table = std::get_if<Table>(&block)) {
            for (const auto& row : table->rows) {
                if (row.size() != table->header.size()) return "table in \"" + section.heading + "\" is not rectangular";
            }
        }
    }
    for (const auto& child : section.children) {
        if (auto problem = check_section(child, depth + 1)) return problem;
    }
    return std::nullopt;
}

// Markdown

std::string md_cell(std::string_view text) {
    auto out = escape_markdown(text);
    return out.empty() ? std::string(" ") : out;
}

void md_section(std::ostream& out, const Section& section, int depth) {
    out << std::string(static_cast<std::size_t>(depth), '#') << ' ' << escape_markdown(section.heading) << "\n\n";
    for (const auto& block : section.blocks) {
        if (const auto* paragraph = std::get_if<Paragraph>(&block)) {
            out << escape_markdown(paragraph->text) << "\n\n";
        } else if (const auto* list = std::get_if<BulletList>(&block)) {
            for (const auto& item : list->items) {
                out << "- **" << escape_markdown(item.label) << ":** " << escape_markdown(item.text) << "\n";
            }
            out << "\n";
        } else if (const auto* table = std::get_if<Table>(&block)) {
            out << "|";
            for (const auto& cell : table->header) out << ' ' << md_cell(cell) << " |";
            out << "\n|";
            for (std::size_t i = 0; i < table->header.size(); ++i) out << " --- |";
            out << "\n";
            for (const auto& row : table->rows) {
                out << "|";
                for (const auto& cell : row) out << ' ' << md_cell(cell) << " |";
                out << "\n";
            }
            out << "\n";
        }
    }
    for (const auto& child : section.children) md_section(out, child, depth + 1);
}

// LaTeX

constexpr std::string_view kLatexSections[] = {"section", "subsection", "subsubsection", "paragraph"};

void tex_section(std::ostream& out, const Section& section, int depth) {
    out << "\\" << kLatexSections[depth - 1] << "{" << escape_latex(section.heading) << "}\n\n";
    for (const auto& block : section.blocks) {
        if (const auto* paragraph = std::get_if<Paragraph>(&block)) {
            out << escape_latex(paragraph->text) << "\n\n";
        } else if (const auto* list = std::get_if<BulletList>(&block)) {
            if (list->items.empty()) continue;
            out << "\\begin{itemize}\n";
            for (const auto& item : list->items) {
                out << "  \\item \\textbf{" << escape_latex(item.label) << ":} " << escape_latex(item.text) << "\n";
            }
            out << "\\end{itemize}\n\n";
        } else if (const auto* table = std::get_if<Table>(&block)) {
            if (table->header.empty()) continue;
            out << "\\begin{center}\n\\begin{tabular}{|p{6cm}|";
            for (std::size_t i = 1; i < table->header.size(); ++i) out << "c|";
            out << "}\n\\hline\n";
            const auto row_out = [&out](const std::vector<std::string>& cells, bool bold) {
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    if (i) out << " & ";
                    if (bold) out << "\\textbf{" << escape_latex(cells[i]) << "}";
                    else out << escape_latex(cells[i]);
                }
                out << " \\\\\n\\hline\n";
            };
            row_out(table->header, true);
            for (const auto& row : table->rows) row_out(row, false);
            out << "\\end{tabular}\n\\end{center}\n\n";
        }
    }
    for (const auto& child : section.children) tex_section(out, child, depth + 1);
}

Json section_json(const Section& section) {
    Json blocks = Json::array();
    for (const auto& block : section.blocks) {
        if (const auto* paragraph = std::get_if<Paragraph>(&block)) {
            blocks.push_back({{"type", "paragraph"}, {"text", paragraph->text}});
        } else if (const auto* list = std::get_if<BulletList>(&block)) {
            Json items = Json::array();
            for (const auto& item : list->items) items.push_back({{"label", item.label}, {"text", item.text}});
            blocks.push_back({{"type", "list"}, {"items", std::move(items)}});
        } else if (const auto* table = std::get_if<Table>(&block)) {
            blocks.push_back({{"type", "table"}, {"header", table->header}, {"rows", table->rows}});
        }
    }
    Json children = Json::array();
    for (const auto& child : section.children) children.push_back(section_json(child));
    return {{"heading", section.heading}, {"blocks", std::move(blocks)}, {"children", std::move(children)}};
}

bool write_file(const std::filesystem::path& path, const std::string& content, std::vector<Diagnostic>& diagnostics) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) {
        diagnostics.push_back(make_diagnostic(Severity::Error, codes::kIo, "cannot write " + path.string()));
        return false;
    }
    return true;
}

}  // namespace

std::optional<std::string> check_document(const ReportDocument& document) {
    for (const auto& section : document.sections) {
        if (auto problem = check_section(section, 1)) return problem;
    }
    return std::nullopt;
}

std::vector<std::string> location_group_order() {
    std::vector<std::string> out;
    for (const auto& [location, group] : kLocationGroups) {
        if (out.empty() || out.back() != group) out.emplace_back(group);
    }
    return out;
}

std::string location_group(std::string_view location) {
    for (const auto& [value, group] : kLocationGroups) {
        if (value == location) return std::string(group);
    }
    return std::string(location);
}

std::vector<std::pair<std::string, std::vector<BulletItem>>> entry_fields(const VulnerabilityPattern& pattern) {
    const auto& ref = pattern.reference;
    const auto& desc = pattern.description;
    const auto& impl = pattern.implementation;
    const auto& prot = pattern.protection;

    std::vector<BulletItem> reference{{"Vulnerability Name", or_dash(ref.name)}};
    if (ref.extends) reference.push_back({"Extends", *ref.extends});
    std::vector<std::string> sources;
    for (const auto& source : ref.sources) {
        std::vector<std::string> causes;
        for (const auto& cause : source.causes) causes.push_back(cause.value.text);
        sources.push_back(causes.empty() ? source.entity.text : source.entity.text + " (" + join(causes, "; ") + ")");
    }
    std::vector<std::string> consequences;
    for (const auto& consequence : ref.consequences) {
        std::vector<std::string> qualifiers;
        for (const auto& q : consequence.qualifiers) qualifiers.push_back(q.text);
        consequences.push_back(qualifiers.empty() ? consequence.base.text
                                                  : consequence.base.text + " - " + join(qualifiers, ", "));
    }
    reference.insert(reference.end(), {
        {"Identifier", identifier_text(ref.identifier)},
        {"Origin", or_dash(ref.origin)},
        {"Location of Exploit Code", joined(ref.locations)},
        {"Source", or_dash(join(sources, "; "))},
        {"Target", joined(ref.targets)},
        {"Consequence Type", or_dash(join(consequences, "; "))},
        {"Introduction Time", or_dash(ref.introduction_time.text)},
        {"Exploit Time", or_dash(ref.exploit_time.text)},
    });

    std::vector<BulletItem> description{
        {"Description", or_dash(desc.description)},
        {"Preconditions", or_dash(desc.preconditions)},
        {"Attack Process", or_dash(desc.attack_process)},
        {"Consequence Description", or_dash(desc.consequence_description)},
        {"See Also", or_dash(join(desc.see_also, "; "))},
    };

    std::vector<BulletItem> implementation{
        {"Code Reference", or_dash(impl.code_reference)},
        {"OSGi Profile", or_dash(impl.osgi_profile.text)},
        {"Date", date_text(impl.date)},
        {"Test Coverage", std::to_string(impl.test_coverage) + "%"},
        {"Known Vulnerable Platforms", joined(impl.vulnerable_platforms)},
        {"Known Robust Platforms", joined(impl.robust_platforms)},
    };

    std::vector<std::string> potential;
    for (const auto& mechanism : prot.potential_mechanisms) {
        potential.push_back(mechanism.note ? mechanism.name.text + " (" + *mechanism.note + ")" : mechanism.name.text);
    }
    std::vector<BulletItem> protection{
        {"Existing Mechanisms", joined(prot.existing_mechanisms)},
        {"Enforcement Point", prot.enforcement_point ? prot.enforcement_point->text : "-"},
        {"Potential Mechanisms", or_dash(join(potential, "; "))},
        {"Attack Prevention", joined(prot.attack_prevention)},
        {"Reaction", joined(prot.reaction)},
    };

    return {
        {"Vulnerability Reference", std::move(reference)},
        {"Vulnerability Description", std::move(description)},
        {"Vulnerability Implementation", std::move(implementation)},
        {"Protection", std::move(protection)},
    };
}

BuildResult build_report_document(const Catalog& catalog, const TaxonomyRegistry& registry,
                                  const ReportOptions& options) {
    BuildResult result;
    for (auto& d : lint(catalog, registry)) {
        if (d.severity == Severity::Error) result.diagnostics.push_back(std::move(d));
    }
    if (!result.diagnostics.empty()) return result;
    ReportDocument document{options.title, {}};
    document.sections.push_back(catalog_part(catalog));
    document.sections.push_back(analysis_part(catalog, registry, options));
    result.document = std::move(document);
    return result;
}

std::optional<RenderTarget> parse_render_target(std::string_view text) {
    if (text == "md" || text == "markdown") return RenderTarget::Markdown;
    if (text == "tex" || text == "latex") return RenderTarget::Latex;
    return std::nullopt;
}

std::string_view target_extension(RenderTarget target) { return target == RenderTarget::Markdown ? "md" : "tex"; }

std::string escape_markdown(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\\' || c == '|' || (c == '#' && i == 0)) out += '\\';
        out += c;
    }
    return out;
}

std::string escape_latex(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const char c : text) {
        switch (c) {
            case '#': case '$': case '%': case '&': case '_': case '{': case '}':
                out += '\\';
                out += c;
                break;
            case '~': out += "\\textasciitilde{}"; break;
            case '^': out += "\\textasciicircum{}"; break;
            case '\\': out += "\\textbackslash{}"; break;
            default: out += c;
        }
    }
    return out;
}

std::string render(const ReportDocument& document, RenderTarget target) {
    std::ostringstream out;
    if (target == RenderTarget::Markdown) {
        out << "# " << escape_markdown(document.title) << "\n\n";
        for (const auto& section : document.sections) md_section(out, section, 1);
    } else {
        out << "\\documentclass{article}\n"
               "\\usepackage[T1]{fontenc}\n"
               "\\usepackage[utf8]{inputenc}\n"
               "\\title{" << escape_latex(document.title) << "}\n"
               "\\date{}\n"
               "\\begin{document}\n"
               "\\maketitle\n\n";
        for (const auto& section : document.sections) tex_section(out, section, 1);
        out << "\\end{document}\n";
    }
    auto text = out.str();
    while (text.size() > 1 && text[text.size() - 1] == '\n' && text[text.size() - 2] == '\n') text.pop_back();
    return text;
}

std::string document_json(const ReportDocument& document) {
    Json sections = Json::array();
    for (const auto& section : document.sections) sections.push_back(section_json(section));
    const Json out = {{"title", document.title}, {"sections", std::move(sections)}};
    return out.dump(2) + "\n";
}

GenerateResult generate(const Catalog& catalog, const TaxonomyRegistry& registry, RenderTarget target,
                        const std::filesystem::path& output, const GenerateOptions& options) {
    GenerateResult result;
    auto built = build_report_document(catalog, registry, options.report);
    if (!built.document) {
        result.diagnostics = std::move(built.diagnostics);
        return result;
    }
    auto stem = output;
    stem.replace_extension();
    auto report_path = stem;
    report_path += "." + std::string(target_extension(target));
    if (!write_file(report_path, render(*built.document, target), result.diagnostics)) return result;
    result.written.push_back(report_path);
    if (options.dump_model) {
        auto dump_path = stem;
        dump_path += ".report.json";
        if (!write_file(dump_path, document_json(*built.document), result.diagnostics)) return result;
        result.written.push_back(dump_path);
    }
    return result;
}

}  // namespace vulncat
