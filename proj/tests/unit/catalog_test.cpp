#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>

#include "paths.hpp"
#include "vulncat/catalog.hpp"
#include "vulncat/parser.hpp"

namespace vulncat {
namespace {

using testing::corpus_dir;
using testing::TempDir;

const TaxonomyRegistry& registry() {
    static const auto r = TaxonomyRegistry::with_defaults();
    return r;
}

const Catalog& corpus() {
    static const auto c = load_catalog(corpus_dir(), registry());
    return c;
}

std::size_t count_code(const std::vector<Diagnostic>& ds, std::string_view code) {
    return static_cast<std::size_t>(
        std::count_if(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.code == code; }));
}

std::size_t dangling(const std::vector<Diagnostic>& ds) {
    return count_code(ds, codes::kDanglingSeeAlso) + count_code(ds, codes::kDanglingExtends);
}

std::vector<VulnerabilityPattern> corpus_patterns() {
    std::vector<VulnerabilityPattern> out;
    for (const auto& [id, p] : corpus().entries) out.push_back(p);
    return out;
}

TEST(LoadCatalog, CorpusLoadsCleanly) {
    // 32 = number of rows of the platform table.
    EXPECT_EQ(corpus().size(), 32u);
    EXPECT_FALSE(has_errors(corpus().load_diagnostics));
    EXPECT_TRUE(corpus().rejected_files.empty());
    EXPECT_EQ(corpus().name_index.size(), 32u);
}

TEST(LoadCatalog, IterationIsIdentifierOrder) {
    std::vector<std::string> ids;
    for (const auto& [id, p] : corpus().entries) ids.push_back(identifier_text(id));
    EXPECT_EQ(ids.front(), "mb.archive.1");
    EXPECT_EQ(ids[3], "mb.java.1");
    EXPECT_EQ(ids[4], "mb.java.2");
    EXPECT_EQ(ids[12], "mb.java.10");
    EXPECT_EQ(ids.back(), "mb.osgi.14");
}

TEST(LoadCatalog, EmptyDirectory) {
    TempDir dir("empty");
    const auto catalog = load_catalog(dir.path(), registry());
    EXPECT_TRUE(catalog.empty());
    EXPECT_TRUE(catalog.load_diagnostics.empty());
}

TEST(LoadCatalog, MissingDirectoryThrows) {
    EXPECT_THROW(load_catalog("/nonexistent/catalog", registry()), CatalogError);
}

TEST(LoadCatalog, IgnoresOtherFiles) {
    TempDir dir("other");
    testing::copy_corpus(dir.path());
    testing::write_text(dir.path() / "README.txt", "not an entry");
    std::filesystem::create_directory(dir.path() / "nested.vuln");
    const auto catalog = load_catalog(dir.path(), registry());
    EXPECT_EQ(catalog.size(), 32u);
    EXPECT_EQ(catalog.load_diagnostics, corpus().load_diagnostics);
}

TEST(LoadCatalog, DuplicateIdentifierKeepsFirstFile) {
    TempDir dir("dup");
    testing::copy_corpus(dir.path());
    auto text = testing::read_text(corpus_dir() / "mb.osgi.4.vuln");
    text.replace(text.find("name = "), 7, "name = Copy of ");
    testing::write_text(dir.path() / "zz-copy.vuln", text);
    const auto catalog = load_catalog(dir.path(), registry());
    EXPECT_EQ(catalog.size(), 32u);
    ASSERT_EQ(count_code(catalog.load_diagnostics, codes::kDupId), 1u);
    EXPECT_EQ(catalog.entries.at({SourceRef::Osgi, 4}).reference.name, "Management Utility Freezing - Infinite Loop");
    EXPECT_TRUE(has_errors(lint(catalog, registry())));
}

TEST(LoadCatalog, DuplicateNameWarnsAndFilenameMismatchInforms) {
    TempDir dir("dupname");
    testing::copy_corpus(dir.path());
    auto text = testing::read_text(corpus_dir() / "mb.osgi.4.vuln");
    text.replace(text.find("Mb.osgi.4"), 9, "mb.osgi.40");
    testing::write_text(dir.path() / "zz-copy.vuln", text);  // loads after mb.osgi.4.vuln
    const auto catalog = load_catalog(dir.path(), registry());
    EXPECT_EQ(catalog.size(), 33u);
    EXPECT_EQ(count_code(catalog.load_diagnostics, codes::kDupName), 1u);
    EXPECT_EQ(count_code(catalog.load_diagnostics, codes::kFilenameMismatch), 1u);
    EXPECT_FALSE(has_errors(catalog.load_diagnostics));
    EXPECT_EQ(catalog.name_index.at("Management Utility Freezing - Infinite Loop"), (Identifier{SourceRef::Osgi, 4}));
}

TEST(LoadCatalog, InvalidFileIsExcludedAndRecorded) {
    TempDir dir("invalid");
    testing::copy_corpus(dir.path());
    auto text = testing::read_text(dir.path() / "mb.java.5.vuln");
    text.replace(text.find("test-coverage = "), 16, "test-coverage = 1");  // 100% -> 1100%
    testing::write_text(dir.path() / "mb.java.5.vuln", text);
    const auto catalog = load_catalog(dir.path(), registry());
    EXPECT_EQ(catalog.size(), 31u);
    ASSERT_EQ(catalog.rejected_files.size(), 1u);
    EXPECT_EQ(catalog.rejected_files[0].filename(), "mb.java.5.vuln");
    EXPECT_EQ(count_code(catalog.load_diagnostics, codes::kCoverageRange), 1u);
}

TEST(LoadCatalog, DeterministicRegardlessOfCreationOrder) {
    TempDir forward("fwd"), backward("bwd");
    std::vector<std::filesystem::path> files;
    for (const auto& item : std::filesystem::directory_iterator(corpus_dir())) files.push_back(item.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) std::filesystem::copy_file(f, forward.path() / f.filename());
    for (auto it = files.rbegin(); it != files.rend(); ++it) std::filesystem::copy_file(*it, backward.path() / it->filename());
    const auto a = load_catalog(forward.path(), registry());
    const auto b = load_catalog(backward.path(), registry());
    EXPECT_EQ(a.entries, b.entries);
    EXPECT_EQ(a.load_diagnostics, b.load_diagnostics);
    EXPECT_EQ(lint(a, registry()), lint(b, registry()));
}

TEST(LoadCatalog, CorpusLoadsWellUnderOneSecond) {
    const auto start = std::chrono::steady_clock::now();
    const auto catalog = load_catalog(corpus_dir(), registry());
    const auto elapsed = std::chrono::steady_clock::now() - start;
    EXPECT_EQ(catalog.size(), 32u);
    EXPECT_LT(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count(), 1000);
}

TEST(ResolveReferences, CorpusEdges) {
    const auto graph = resolve_references(corpus());
    const auto find = [](const std::vector<ReferenceEdge>& edges, Identifier from, const std::string& name) {
        return std::find_if(edges.begin(), edges.end(),
                            [&](const ReferenceEdge& e) { return e.from == from && e.name == name; });
    };
    const auto extends = find(graph.extends_edges, {SourceRef::Osgi, 5}, "Hanging Thread");
    ASSERT_NE(extends, graph.extends_edges.end());
    EXPECT_EQ(extends->to, (Identifier{SourceRef::Java, 4}));

    const auto ramping = find(graph.see_also_edges, {SourceRef::Java, 10}, "Ramping Memory Load Injection");
    ASSERT_NE(ramping, graph.see_also_edges.end());
    EXPECT_FALSE(ramping->to);

    EXPECT_TRUE(std::none_of(graph.see_also_edges.begin(), graph.see_also_edges.end(),
                             [](const ReferenceEdge& e) { return e.from == Identifier{SourceRef::Archive, 1}; }));

    EXPECT_EQ(graph.extends_edges.size(), 4u);
    for (const auto* edges : {&graph.extends_edges, &graph.see_also_edges}) {
        for (const auto& edge : *edges) {
            EXPECT_TRUE(corpus().entries.count(edge.from));
            if (edge.to) EXPECT_TRUE(corpus().entries.count(*edge.to));
        }
    }
}

TEST(Lint, CorpusFindings) {
    const auto ds = lint(corpus(), registry());
    EXPECT_FALSE(has_errors(ds));
    EXPECT_GE(count_code(ds, codes::kDanglingSeeAlso), 5u);
    EXPECT_EQ(count_code(ds, codes::kDanglingExtends), 0u);
    for (const auto name : {"Ramping Memory Load Injection", "Infinite Startup Loop", "Big Bundle Installer",
                            "Unvalid Activator Meta-data", "Exec.Kill"}) {
        EXPECT_TRUE(std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) {
            return d.code == codes::kDanglingSeeAlso && d.message.find("\"" + std::string(name) + "\"") != std::string::npos;
        })) << name;
    }
    const auto near = std::find_if(ds.begin(), ds.end(), [](const Diagnostic& d) {
        return d.code == codes::kNearMissRef && d.location.entry == "mb.osgi.7";
    });
    ASSERT_NE(near, ds.end());
    EXPECT_EQ(near->suggestion, "Launch a Hidden Bundle");
    auto sorted = ds;
    sort_diagnostics(sorted);
    EXPECT_EQ(sorted, ds);
}

TEST(Lint, ExtendsCycles) {
    auto patterns = corpus_patterns();
    // mb.java.4 "Hanging Thread" <- mb.osgi.5; close the loop.
    for (auto& p : patterns) {
        if (p.reference.identifier == Identifier{SourceRef::Java, 4}) {
            p.reference.extends = "Management Utility Freezing - Thread Hanging";
        }
        if (p.reference.identifier == Identifier{SourceRef::Archive, 3}) p.reference.extends = "Decompression Bomb";
    }
    const auto catalog = build_catalog(patterns, registry());
    const auto ds = lint(catalog, registry());
    std::vector<std::string> entries;
    for (const auto& d : ds) {
        if (d.code == codes::kExtendsCycle) entries.push_back(d.location.entry);
    }
    EXPECT_EQ(entries, (std::vector<std::string>{"mb.archive.3", "mb.java.4", "mb.osgi.5"}));
}

TEST(Lint, NoCycleForChains) {
    EXPECT_EQ(count_code(lint(corpus(), registry()), codes::kExtendsCycle), 0u);
}

TEST(Lint, DanglingExtendsGetsSuggestion) {
    auto patterns = corpus_patterns();
    patterns[0].reference.extends = "Hangin Thread";
    const auto ds = lint(build_catalog(patterns, registry()), registry());
    EXPECT_EQ(count_code(ds, codes::kDanglingExtends), 1u);
    EXPECT_TRUE(std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) {
        return d.code == codes::kNearMissRef && d.location.field == "extends" && d.suggestion == "Hanging Thread";
    }));
}

TEST(Lint, RemovingAnEntryNeverHidesDanglingReferences) {
    const auto all = corpus_patterns();
    const auto before = dangling(lint(corpus(), registry()));
    const auto graph = resolve_references(corpus());
    for (std::size_t i = 0; i < all.size(); ++i) {
        auto subset = all;
        const auto removed = subset[i].reference.identifier;
        subset.erase(subset.begin() + static_cast<std::ptrdiff_t>(i));
        std::size_t own = 0, incoming = 0;
        for (const auto* edges : {&graph.see_also_edges, &graph.extends_edges}) {
            for (const auto& e : *edges) {
                if (e.from == removed) own += e.to ? 0 : 1;
                else if (e.to == removed) ++incoming;
            }
        }
        const auto after = dangling(lint(build_catalog(subset, registry()), registry()));
        EXPECT_GE(after, before - own) << identifier_text(removed);
        EXPECT_EQ(after, before - own + incoming) << identifier_text(removed);
    }
}

TEST(Get, ByIdentifierThenName) {
    const auto* cycle = get(corpus(), "mb.osgi.9");
    ASSERT_NE(cycle, nullptr);
    EXPECT_EQ(cycle->reference.name, "Cycle Between Services");
    const auto* exit = get(corpus(), "System.exit");
    ASSERT_NE(exit, nullptr);
    EXPECT_EQ(exit->reference.identifier, (Identifier{SourceRef::Java, 1}));
    EXPECT_EQ(get(corpus(), "mb.osgi.99"), nullptr);
    EXPECT_EQ(get(corpus(), "Exec.Kill"), nullptr);
    EXPECT_NE(get(corpus(), "Mb.osgi.9"), nullptr);
    EXPECT_NE(get(corpus(), "  Cycle   Between Services "), nullptr);
}

}  // namespace
}  // namespace vulncat
