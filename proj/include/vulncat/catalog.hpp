#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vulncat/diagnostic.hpp"
#include "vulncat/model.hpp"
#include "vulncat/taxonomy.hpp"

namespace vulncat {

/// Raised when the catalog directory itself cannot be read.
class CatalogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Identifier-ordered entries with a name index. Immutable after loading.
struct Catalog {
    std::map<Identifier, VulnerabilityPattern> entries;
    /// Whitespace-normalized name to identifier. Holds the first entry when
    /// names collide.
    std::map<std::string, Identifier> name_index;
    std::map<Identifier, FieldLines> field_lines;
    std::vector<Diagnostic> load_diagnostics;
    /// Files left out because of Error diagnostics, in load order.
    std::vector<std::filesystem::path> rejected_files;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

/// Reads every `*.vuln` file of `directory` (not recursive) in file-name
/// order. Per-file problems become diagnostics; an unreadable directory
/// throws CatalogError.
Catalog load_catalog(const std::filesystem::path& directory, const TaxonomyRegistry& registry);

/// Builds a catalog from in-memory patterns, validating each one the same way
/// load_catalog does. Patterns are taken in the given order for duplicate
/// resolution.
Catalog build_catalog(std::vector<VulnerabilityPattern> patterns, const TaxonomyRegistry& registry);

struct ReferenceEdge {
    Identifier from;
    std::string name;
    /// Empty when the name matches no entry.
    std::optional<Identifier> to;

    bool operator==(const ReferenceEdge&) const = default;
};

struct ReferenceGraph {
    std::vector<ReferenceEdge> see_also_edges;
    std::vector<ReferenceEdge> extends_edges;
};

/// Resolves see-also and extends names by exact match after whitespace
/// normalization. Edges are in identifier order, then list order.
ReferenceGraph resolve_references(const Catalog& catalog);

/// Load diagnostics plus cross-entry findings, sorted by entry then code.
std::vector<Diagnostic> lint(const Catalog& catalog, const TaxonomyRegistry& registry);

/// Identifier text first, then name. nullptr when nothing matches.
const VulnerabilityPattern* get(const Catalog& catalog, std::string_view key);

}  // namespace vulncat
