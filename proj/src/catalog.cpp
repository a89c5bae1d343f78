#include "vulncat/catalog.hpp"

#include <algorithm>
#include <set>

#include "vulncat/parser.hpp"
#include "vulncat/text.hpp"

namespace vulncat {

namespace {

constexpr std::size_t kNearMissDistance = 3;

class CatalogBuilder {
public:
    explicit CatalogBuilder(Catalog& catalog) : catalog_(catalog) {}

    /// Adds a validated pattern. `origin` names the file (or position) for
    /// duplicate messages.
    void add(VulnerabilityPattern pattern, FieldLines lines, const std::string& origin) {
        const auto id = pattern.reference.identifier;
        const auto id_text = identifier_text(id);
        if (const auto it = origins_.find(id); it != origins_.end()) {
            catalog_.load_diagnostics.push_back(make_diagnostic(
                Severity::Error, codes::kDupId,
                "identifier " + id_text + " in " + origin + " already defined by " + it->second,
                {id_text, "identifier", line_of(lines, "identifier")}));
            return;
        }
        const auto name = normalize_whitespace(pattern.reference.name);
        if (const auto it = catalog_.name_index.find(name); it != catalog_.name_index.end()) {
            catalog_.load_diagnostics.push_back(make_diagnostic(
                Severity::Warning, codes::kDupName,
                "name \"" + name + "\" is also used by " + identifier_text(it->second),
                {id_text, "name", line_of(lines, "name")}));
        } else {
            catalog_.name_index.emplace(name, id);
        }
        origins_.emplace(id, origin);
        catalog_.field_lines.emplace(id, std::move(lines));
        catalog_.entries.emplace(id, std::move(pattern));
    }

    static std::optional<int> line_of(const FieldLines& lines, const std::string& key) {
        const auto it = lines.find(key);
        if (it == lines.end()) return std::nullopt;
        return it->second;
    }

private:
    Catalog& catalog_;
    std::map<Identifier, std::string> origins_;
};

std::optional<Identifier> resolve_name(const Catalog& catalog, std::string_view name) {
    const auto it = catalog.name_index.find(normalize_whitespace(name));
    if (it == catalog.name_index.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> nearest_entry_name(const Catalog& catalog, std::string_view name) {
    std::optional<std::string> best;
    std::size_t best_distance = kNearMissDistance + 1;
    // name_index iterates alphabetically, so the first minimum wins ties.
    for (const auto& [candidate, id] : catalog.name_index) {
        const auto distance = edit_distance(name, candidate);
        if (distance < best_distance) {
            best_distance = distance;
            best = candidate;
        }
    }
    return best;
}

std::optional<int> field_line(const Catalog& catalog, const Identifier& id, const std::string& field) {
    const auto it = catalog.field_lines.find(id);
    if (it == catalog.field_lines.end()) return std::nullopt;
    const auto line = it->second.find(field);
    if (line == it->second.end()) return std::nullopt;
    return line->second;
}

void lint_dangling(const Catalog& catalog, const std::vector<ReferenceEdge>& edges, std::string_view code,
                   const std::string& field, std::vector<Diagnostic>& out) {
    for (const auto& edge : edges) {
        if (edge.to) continue;
        const auto entry = identifier_text(edge.from);
        const auto line = field_line(catalog, edge.from, field);
        const auto label = field == "extends" ? "extends" : "see-also";
        out.push_back(make_diagnostic(Severity::Warning, code,
                                      std::string(label) + " names \"" + edge.name + "\", which is not a catalog entry",
                                      {entry, field, line}));
        if (auto suggestion = nearest_entry_name(catalog, edge.name)) {
            auto d = make_diagnostic(Severity::Warning, codes::kNearMissRef,
                                     "\"" + edge.name + "\" may mean \"" + *suggestion + "\"",
                                     {entry, field, line});
            d.suggestion = std::move(suggestion);
            out.push_back(std::move(d));
        }
    }
}

void lint_cycles(const Catalog& catalog, const ReferenceGraph& graph, std::vector<Diagnostic>& out) {
    std::map<Identifier, Identifier> parent;
    for (const auto& edge : graph.extends_edges) {
        if (edge.to) parent.emplace(edge.from, *edge.to);
    }
    std::set<Identifier> reported;
    for (const auto& [start, unused] : parent) {
        std::vector<Identifier> path;
        std::set<Identifier> on_path;
        std::optional<Identifier> current = start;
        while (current && !on_path.count(*current) && !reported.count(*current)) {
            path.push_back(*current);
            on_path.insert(*current);
            const auto it = parent.find(*current);
            current = it == parent.end() ? std::nullopt : std::optional<Identifier>(it->second);
        }
        if (!current || !on_path.count(*current)) {
            reported.insert(path.begin(), path.end());
            continue;
        }
        const auto cycle_start = std::find(path.begin(), path.end(), *current);
        std::vector<Identifier> cycle(cycle_start, path.end());
        std::vector<std::string> names;
        for (const auto& id : cycle) names.push_back(identifier_text(id));
        names.push_back(identifier_text(cycle.front()));
        const auto description = join(names, " -> ");
        for (const auto& id : cycle) {
            out.push_back(make_diagnostic(Severity::Error, codes::kExtendsCycle, "extends cycle " + description,
                                          {identifier_text(id), "extends", field_line(catalog, id, "extends")}));
        }
        reported.insert(path.begin(), path.end());
    }
}

}  // namespace

Catalog load_catalog(const std::filesystem::path& directory, const TaxonomyRegistry& registry) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(directory, ec)) throw CatalogError("not a readable directory: " + directory.string());

    std::vector<fs::path> files;
    fs::directory_iterator it(directory, ec);
    if (ec) throw CatalogError("cannot list " + directory.string() + ": " + ec.message());
    for (const auto& item : it) {
        if (item.path().extension() == ".vuln" && item.is_regular_file(ec)) files.push_back(item.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

    Catalog catalog;
    CatalogBuilder builder(catalog);
    for (const auto& file : files) {
        const auto file_name = file.filename().string();
        EntryText text;
        try {
            text = read_entry_file(file);
        } catch (const std::exception& error) {
            catalog.load_diagnostics.push_back(
                make_diagnostic(Severity::Error, codes::kIo, error.what(), {file_name, "", std::nullopt}));
            catalog.rejected_files.push_back(file);
            continue;
        }
        auto parsed = parse_entry(text, registry);
        auto diagnostics = std::move(parsed.diagnostics);
        if (parsed.pattern) {
            auto validation = validate_pattern(*parsed.pattern, registry, &parsed.lines);
            diagnostics.insert(diagnostics.end(), validation.begin(), validation.end());
        }
        const bool rejected = !parsed.pattern || has_errors(diagnostics);
        catalog.load_diagnostics.insert(catalog.load_diagnostics.end(), diagnostics.begin(), diagnostics.end());
        if (rejected) {
            catalog.rejected_files.push_back(file);
            continue;
        }
        const auto id_text = identifier_text(parsed.pattern->reference.identifier);
        if (file.stem().string() != id_text) {
            catalog.load_diagnostics.push_back(
                make_diagnostic(Severity::Info, codes::kFilenameMismatch,
                                "file " + file_name + " holds " + id_text + " (expected " + id_text + ".vuln)",
                                {id_text, "identifier", CatalogBuilder::line_of(parsed.lines, "identifier")}));
        }
        builder.add(std::move(*parsed.pattern), std::move(parsed.lines), file_name);
    }
    return catalog;
}

Catalog build_catalog(std::vector<VulnerabilityPattern> patterns, const TaxonomyRegistry& registry) {
    Catalog catalog;
    CatalogBuilder builder(catalog);
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        auto diagnostics = validate_pattern(patterns[i], registry);
        catalog.load_diagnostics.insert(catalog.load_diagnostics.end(), diagnostics.begin(), diagnostics.end());
        if (has_errors(diagnostics)) continue;
        builder.add(std::move(patterns[i]), {}, "pattern #" + std::to_string(i + 1));
    }
    return catalog;
}

ReferenceGraph resolve_references(const Catalog& catalog) {
    ReferenceGraph graph;
    for (const auto& [id, pattern] : catalog.entries) {
        for (const auto& name : pattern.description.see_also) {
            graph.see_also_edges.push_back({id, name, resolve_name(catalog, name)});
        }
        if (pattern.reference.extends) {
            graph.extends_edges.push_back(
                {id, *pattern.reference.extends, resolve_name(catalog, *pattern.reference.extends)});
        }
    }
    return graph;
}

std::vector<Diagnostic> lint(const Catalog& catalog, const TaxonomyRegistry& registry) {
    (void)registry;  // taxonomy findings were produced at load time
    std::vector<Diagnostic> out = catalog.load_diagnostics;
    const auto graph = resolve_references(catalog);
    lint_dangling(catalog, graph.see_also_edges, codes::kDanglingSeeAlso, "see-also", out);
    lint_dangling(catalog, graph.extends_edges, codes::kDanglingExtends, "extends", out);
    lint_cycles(catalog, graph, out);
    sort_diagnostics(out);
    return out;
}

const VulnerabilityPattern* get(const Catalog& catalog, std::string_view key) {
    if (const auto id = try_parse_identifier(trim(key))) {
        const auto it = catalog.entries.find(*id);
        if (it != catalog.entries.end()) return &it->second;
    }
    if (const auto id = resolve_name(catalog, key)) return &catalog.entries.at(*id);
    return nullptr;
}

}  // namespace vulncat
