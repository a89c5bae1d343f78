#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "generator.hpp"
#include "paths.hpp"
#include "vulncat/parser.hpp"

namespace vulncat {
namespace {

using testing::corpus_dir;

const TaxonomyRegistry& registry() {
    static const auto r = TaxonomyRegistry::with_defaults();
    return r;
}

std::vector<std::filesystem::path> corpus_files() {
    std::vector<std::filesystem::path> files;
    for (const auto& item : std::filesystem::directory_iterator(corpus_dir())) files.push_back(item.path());
    std::sort(files.begin(), files.end());
    return files;
}

bool has_code(const std::vector<Diagnostic>& ds, std::string_view code) {
    return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.code == code; });
}

const Diagnostic* find_code(const std::vector<Diagnostic>& ds, std::string_view code) {
    const auto it = std::find_if(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.code == code; });
    return it == ds.end() ? nullptr : &*it;
}

// Smallest entry the parser accepts; tests splice lines into it.
std::string minimal_entry(const std::string& reference_extra = "", const std::string& protection_extra = "") {
    return "[reference]\n"
           "name = Sample\n"
           "identifier = mb.java.7\n"
           "origin = -\n"
           "location = Bundle Archive\n"
           "source = JVM - APIs (Thread API)\n"
           "target = Platform\n"
           "consequence-type = Unavailability\n"
           "introduction-time = Development\n"
           "exploit-time = Execution\n" +
           reference_extra +
           "\n[description]\n"
           "description = Something bad\n"
           "\n[implementation]\n"
           "osgi-profile = J2SE-1.5\n"
           "date = 2006-08-24\n"
           "test-coverage = 10%\n"
           "\n[protection]\n" +
           protection_extra;
}

std::string replace_line(std::string text, const std::string& key, const std::string& line) {
    std::istringstream in(text);
    std::string out, current;
    while (std::getline(in, current)) {
        if (current.rfind(key + " =", 0) == 0) current = line;
        out += current + "\n";
    }
    return out;
}

TEST(ParseEntry, WorkedExampleFields) {
    const auto parsed = parse_entry(read_entry_file(corpus_dir() / "mb.osgi.4.vuln"), registry());
    ASSERT_TRUE(parsed.pattern);
    const auto& p = *parsed.pattern;
    EXPECT_EQ(p.reference.name, "Management Utility Freezing - Infinite Loop");
    EXPECT_EQ(p.reference.identifier, (Identifier{SourceRef::Osgi, 4}));
    EXPECT_EQ(p.reference.extends, "Infinite Loop in Method Call");
    EXPECT_EQ(p.reference.exploit_time.text, "Bundle Start");
    EXPECT_EQ(p.implementation.test_coverage, 10);
    ASSERT_EQ(p.implementation.robust_platforms.size(), 1u);
    EXPECT_EQ(p.implementation.robust_platforms[0].text, "SFelix");
    ASSERT_EQ(p.reference.sources.size(), 1u);
    EXPECT_EQ(p.reference.sources[0].entity.text, "OSGi Platform - Life-Cycle Layer");
    ASSERT_EQ(p.reference.sources[0].causes.size(), 1u);
    EXPECT_EQ(p.reference.sources[0].causes[0].kind, CauseKind::Flaw);
    ASSERT_EQ(p.reference.consequences.size(), 2u);
    EXPECT_EQ(p.reference.consequences[1].base.text, "Unavailability");
    EXPECT_EQ(p.implementation.date, (Date{2006, 8, 24}));
    EXPECT_FALSE(p.protection.enforcement_point);
    ASSERT_EQ(p.protection.potential_mechanisms.size(), 3u);
    EXPECT_EQ(p.protection.potential_mechanisms[2].note,
              "launch the bundle activator in a separate thread to prevent startup hanging");
    EXPECT_EQ(parsed.lines.at("identifier"), 3);
}

TEST(ParseEntry, WholeCorpusParsesWithoutErrors) {
    const auto files = corpus_files();
    ASSERT_EQ(files.size(), 32u);
    for (const auto& file : files) {
        const auto parsed = parse_entry(read_entry_file(file), registry());
        EXPECT_TRUE(parsed.pattern) << file;
        for (const auto& d : parsed.diagnostics) ADD_FAILURE() << file << ": " << format_diagnostic(d);
    }
}

TEST(ParseEntry, ContinuationCommentsAndPlaceholders) {
    const auto text = minimal_entry("# a note\n", "reaction = Uninstall the malicious bundle;\n  Restart the platform\n");
    auto spliced = replace_line(text, "description", "description = first part\n  second\tpart\n# comment\n");
    const auto parsed = parse_entry({spliced}, registry());
    ASSERT_TRUE(parsed.pattern);
    EXPECT_EQ(parsed.pattern->description.description, "first part second part");
    EXPECT_EQ(parsed.pattern->reference.origin, "");
    ASSERT_EQ(parsed.pattern->protection.reaction.size(), 2u);
    EXPECT_EQ(parsed.pattern->protection.reaction[1].text, "Restart the platform");
    EXPECT_TRUE(parsed.pattern->description.see_also.empty());
}

TEST(ParseEntry, CrLfFilesReadLikeLf) {
    testing::TempDir dir("crlf");
    std::string crlf;
    for (const char c : minimal_entry()) {
        if (c == '\n') crlf += '\r';
        crlf += c;
    }
    testing::write_text(dir.path() / "e.vuln", crlf);
    const auto parsed = parse_entry(read_entry_file(dir.path() / "e.vuln"), registry());
    ASSERT_TRUE(parsed.pattern);
    EXPECT_EQ(*parsed.pattern, *parse_entry({minimal_entry()}, registry()).pattern);
}

TEST(ParseEntry, ReadEntryFileThrowsOnMissingFile) {
    EXPECT_THROW(read_entry_file("/nonexistent/x.vuln"), std::runtime_error);
}

TEST(ParseEntry, MissingSectionIsError) {
    auto text = minimal_entry();
    text = text.substr(0, text.find("[protection]"));
    const auto parsed = parse_entry({text}, registry());
    EXPECT_FALSE(parsed.pattern);
    const auto* d = find_code(parsed.diagnostics, codes::kSectionMissing);
    ASSERT_NE(d, nullptr);
    EXPECT_EQ(d->location.field, "protection");
    EXPECT_EQ(d->location.entry, "mb.java.7");
}

TEST(ParseEntry, DuplicateKeyIsErrorAtSecondLine) {
    const auto parsed = parse_entry({minimal_entry("target = Platform\n")}, registry());
    EXPECT_FALSE(parsed.pattern);
    const auto* d = find_code(parsed.diagnostics, codes::kKeyDup);
    ASSERT_NE(d, nullptr);
    EXPECT_EQ(d->location.line, 11);
}

TEST(ParseEntry, MissingRequiredKeys) {
    for (const auto key : {"identifier", "date", "test-coverage"}) {
        const auto text = replace_line(minimal_entry(), key, "");
        const auto parsed = parse_entry({text}, registry());
        EXPECT_FALSE(parsed.pattern) << key;
        const auto* d = find_code(parsed.diagnostics, codes::kFieldMissing);
        ASSERT_NE(d, nullptr) << key;
        EXPECT_EQ(d->location.field, key);
    }
}

TEST(ParseEntry, SyntaxErrors) {
    EXPECT_TRUE(has_code(parse_entry({"name = x\n" + minimal_entry()}, registry()).diagnostics, codes::kSyntax));
    EXPECT_TRUE(has_code(parse_entry({"  dangling\n" + minimal_entry()}, registry()).diagnostics, codes::kSyntax));
    EXPECT_TRUE(has_code(parse_entry({minimal_entry("no equals sign\n")}, registry()).diagnostics, codes::kSyntax));
}

TEST(ParseEntry, CollectsEveryErrorInOnePass) {
    auto text = replace_line(minimal_entry(), "identifier", "identifier = cve.java.7");
    text = replace_line(text, "test-coverage", "test-coverage = lots");
    text = replace_line(text, "date", "date = yesterday");
    const auto parsed = parse_entry({text}, registry());
    EXPECT_FALSE(parsed.pattern);
    EXPECT_TRUE(has_code(parsed.diagnostics, codes::kIdSyntax));
    EXPECT_TRUE(has_code(parsed.diagnostics, codes::kFieldSyntax));
    EXPECT_EQ(std::count_if(parsed.diagnostics.begin(), parsed.diagnostics.end(),
                            [](const Diagnostic& d) { return d.severity == Severity::Error; }),
              3);
}

TEST(ParseEntry, UnknownKeysAndSectionsArePreserved) {
    auto text = minimal_entry("reviewer = J. Doe\n") + "\n[provenance]\nsource = scraped\n";
    const auto parsed = parse_entry({text}, registry());
    ASSERT_TRUE(parsed.pattern);
    EXPECT_TRUE(has_code(parsed.diagnostics, codes::kUnknownKey));
    EXPECT_TRUE(has_code(parsed.diagnostics, codes::kUnknownSection));
    const std::vector<ExtraField> expected{{"reference", "reviewer", "J. Doe"}, {"provenance", "source", "scraped"}};
    EXPECT_EQ(parsed.pattern->extra_fields, expected);
    const auto serialized = serialize_entry(*parsed.pattern);
    EXPECT_NE(serialized.find("reviewer = J. Doe"), std::string::npos);
    EXPECT_NE(serialized.find("[provenance]\nsource = scraped\n"), std::string::npos);
}

TEST(ParseEntry, TaxonomyMembershipIsLeftToValidation) {
    const auto text = replace_line(minimal_entry(), "target", "target = Kernel");
    const auto parsed = parse_entry({text}, registry());
    ASSERT_TRUE(parsed.pattern);
    EXPECT_FALSE(has_code(parsed.diagnostics, codes::kTaxonomyUnknown));
    EXPECT_TRUE(has_code(validate_pattern(*parsed.pattern, registry()), codes::kTaxonomyUnknown));
}

TEST(ParseIdentifier, Examples) {
    EXPECT_EQ(parse_identifier("Mb.osgi.4").value, (Identifier{SourceRef::Osgi, 4}));
    for (const auto bad : {"cve.osgi.4", "mb.kernel.4", "mb.osgi.zero", "mb.osgi.0"}) {
        const auto parsed = parse_identifier(bad);
        EXPECT_FALSE(parsed) << bad;
        ASSERT_EQ(parsed.diagnostics.size(), 1u);
        EXPECT_EQ(parsed.diagnostics[0].code, codes::kIdSyntax);
    }
}

TEST(ParseSourceField, EntitiesAndCauses) {
    const auto parsed =
        parse_source_field("OS (Kill utility); JVM - Runtime API (Native Code Execution; No Algorithm Safety - Java)",
                           registry());
    ASSERT_TRUE(parsed);
    ASSERT_EQ(parsed.value->size(), 2u);
    const auto& second = (*parsed.value)[1];
    EXPECT_EQ(second.entity.text, "JVM - Runtime API");
    ASSERT_EQ(second.causes.size(), 2u);
    EXPECT_EQ(second.causes[0].kind, CauseKind::Functionality);
    EXPECT_EQ(second.causes[1].kind, CauseKind::Flaw);
}

TEST(ParseSourceField, MalformedShapes) {
    for (const auto bad : {"JVM - APIs (Thread API", "JVM - APIs (Thread API) trailing", "JVM - APIs", "(Thread API)",
                           "JVM - APIs ()"}) {
        const auto parsed = parse_source_field(bad, registry());
        EXPECT_FALSE(parsed) << bad;
        EXPECT_TRUE(has_code(parsed.diagnostics, codes::kParseSource)) << bad;
    }
}

TEST(ParseSourceField, UnknownCauseIsUnclassified) {
    const auto parsed = parse_source_field("JVM - APIs (Threed API)", registry());
    ASSERT_TRUE(parsed);
    EXPECT_EQ((*parsed.value)[0].causes[0].kind, CauseKind::Unclassified);
    const auto* d = find_code(parsed.diagnostics, codes::kTaxonomyUnknown);
    ASSERT_NE(d, nullptr);
    EXPECT_EQ(d->suggestion, "Thread API");
}

TEST(ParseConsequenceField, Qualifiers) {
    const auto parsed = parse_consequence_field("Undue Access - Package, Service; Unavailability", registry());
    ASSERT_TRUE(parsed);
    ASSERT_EQ(parsed.value->size(), 2u);
    EXPECT_EQ((*parsed.value)[0].base.text, "Undue Access");
    ASSERT_EQ((*parsed.value)[0].qualifiers.size(), 2u);
    EXPECT_EQ((*parsed.value)[0].qualifiers[1].text, "Service");
    EXPECT_TRUE((*parsed.value)[1].qualifiers.empty());
}

TEST(ParseConsequenceField, Rejections) {
    for (const auto bad : {"Explosion", "Undue Access - Kernel", "Undue Access - Package, Package", "Undue Access - "}) {
        const auto parsed = parse_consequence_field(bad, registry());
        EXPECT_FALSE(parsed) << bad;
        EXPECT_TRUE(has_code(parsed.diagnostics, codes::kParseConsequence)) << bad;
    }
}

TEST(ParsePotentialMechanisms, NotesAreOptional) {
    const auto parsed = parse_potential_mechanisms("Code static Analysis; Miscellaneous (check (twice) first)",
                                                   registry());
    ASSERT_TRUE(parsed);
    ASSERT_EQ(parsed.value->size(), 2u);
    EXPECT_FALSE((*parsed.value)[0].note);
    EXPECT_EQ((*parsed.value)[1].note, "check (twice) first");
    EXPECT_FALSE(parse_potential_mechanisms("Miscellaneous (unclosed", registry()));
}

TEST(ParseDate, Forms) {
    EXPECT_EQ(parse_date("2006-08-24").value, (Date{2006, 8, 24}));
    EXPECT_TRUE(parse_date("2006-08-24").diagnostics.empty());
    const auto dotted = parse_date("8.24.2006");
    EXPECT_EQ(dotted.value, (Date{2006, 8, 24}));
    EXPECT_TRUE(has_code(dotted.diagnostics, codes::kDateFormat));
    for (const auto bad : {"2006-02-30", "2006-8-24", "24/08/2006", "", "2006-08-24x", "13.1.2006"}) {
        const auto parsed = parse_date(bad);
        EXPECT_FALSE(parsed) << bad;
        EXPECT_TRUE(has_code(parsed.diagnostics, codes::kFieldSyntax)) << bad;
    }
}

TEST(ParseCoverage, Forms) {
    EXPECT_EQ(parse_coverage("10%").value, 10);
    EXPECT_EQ(parse_coverage("10").value, 10);
    EXPECT_EQ(parse_coverage(" 100 % ").value, 100);
    EXPECT_EQ(parse_coverage("101%").value, 101);  // range is a validation concern
    EXPECT_FALSE(parse_coverage("ten"));
    EXPECT_FALSE(parse_coverage("%"));
    EXPECT_FALSE(parse_coverage("10.5%"));
}

void expect_within_width(const std::string& text, const std::string& context) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.size() <= 78) continue;
        // Only a single word too long for the width may overflow.
        const auto body = line.rfind("  ", 0) == 0 ? line.substr(2) : line.substr(line.find(" = ") + 3);
        EXPECT_EQ(body.find(' '), std::string::npos) << context << ": " << line;
    }
}

TEST(Serialize, CorpusRoundTripIsIdentity) {
    for (const auto& file : corpus_files()) {
        const auto first = parse_entry(read_entry_file(file), registry());
        ASSERT_TRUE(first.pattern) << file;
        const auto text = serialize_entry(*first.pattern);
        const auto second = parse_entry({text}, registry());
        ASSERT_TRUE(second.pattern) << file;
        EXPECT_EQ(*second.pattern, *first.pattern) << file;
        EXPECT_EQ(serialize_entry(*second.pattern), text) << file;
        expect_within_width(text, file.string());
    }
}

TEST(Serialize, CorpusFilesAreCanonicalApartFromCommentsAndIdCase) {
    for (const auto& file : corpus_files()) {
        const auto raw = read_entry_file(file).raw;
        std::istringstream in(raw);
        std::string line, stripped;
        bool leading = true;
        while (std::getline(in, line)) {
            if (leading && (line.empty() || line[0] == '#')) continue;
            leading = false;
            if (line.rfind("identifier = Mb.", 0) == 0) line = "identifier = mb." + line.substr(16);
            stripped += line + "\n";
        }
        const auto parsed = parse_entry({raw}, registry());
        ASSERT_TRUE(parsed.pattern);
        EXPECT_EQ(serialize_entry(*parsed.pattern), stripped) << file;
    }
}

TEST(Serialize, GeneratedPatternsRoundTrip) {
    testing::PatternGenerator generator(20240611, registry());
    for (int i = 0; i < 600; ++i) {
        const Identifier id{static_cast<SourceRef>(i % 4), static_cast<unsigned>(1 + i)};
        const auto generated = generator.entry(id, "Generated Entry " + std::to_string(i));
        const auto text = serialize_entry(generated.pattern);
        const auto parsed = parse_entry({text}, registry());
        ASSERT_TRUE(parsed.pattern) << text << (parsed.diagnostics.empty() ? "" : format_diagnostic(parsed.diagnostics[0]));
        ASSERT_EQ(*parsed.pattern, generated.pattern) << text;
        ASSERT_EQ(serialize_entry(*parsed.pattern), text);
        ASSERT_FALSE(has_errors(validate_pattern(*parsed.pattern, registry()))) << text;
        expect_within_width(text, "generated");
    }
}

TEST(Serialize, LongValuesWrapWithTwoSpaceIndent) {
    auto p = *parse_entry({minimal_entry()}, registry()).pattern;
    std::string long_text;
    for (int i = 0; i < 40; ++i) long_text += (i ? " " : "") + std::string("word") + std::to_string(i);
    p.description.description = long_text;
    const auto text = serialize_entry(p);
    const auto start = text.find("description = ");
    ASSERT_NE(start, std::string::npos);
    std::istringstream in(text.substr(start));
    std::string line;
    std::getline(in, line);
    EXPECT_LE(line.size(), 78u);
    std::getline(in, line);
    EXPECT_EQ(line.rfind("  word", 0), 0u);
    EXPECT_LE(line.size(), 78u);
    EXPECT_EQ(parse_entry({text}, registry()).pattern->description.description, long_text);
}

TEST(Serialize, EmptyFieldsUseDash) {
    const auto text = serialize_entry(*parse_entry({minimal_entry()}, registry()).pattern);
    EXPECT_NE(text.find("origin = -\n"), std::string::npos);
    EXPECT_NE(text.find("see-also = -\n"), std::string::npos);
    EXPECT_NE(text.find("enforcement-point = -\n"), std::string::npos);
    EXPECT_EQ(text.find("extends"), std::string::npos);
    EXPECT_NE(text.find("test-coverage = 10%\n"), std::string::npos);
}

}  // namespace
}  // namespace vulncat
