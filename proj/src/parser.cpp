#include "vulncat/parser.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "vulncat/text.hpp"

namespace vulncat {

namespace {

using namespace std::string_view_literals;

constexpr std::array kSections = {"reference"sv, "description"sv, "implementation"sv, "protection"sv};

constexpr std::array kReferenceKeys = {
    "name"sv,   "identifier"sv, "extends"sv,          "origin"sv,            "location"sv,
    "source"sv, "target"sv,     "consequence-type"sv, "introduction-time"sv, "exploit-time"sv,
};
constexpr std::array kDescriptionKeys = {
    "description"sv, "preconditions"sv, "attack-process"sv, "consequence-description"sv, "see-also"sv,
};
constexpr std::array kImplementationKeys = {
    "code-reference"sv, "osgi-profile"sv,         "date"sv,
    "test-coverage"sv,  "vulnerable-platforms"sv, "robust-platforms"sv,
};
constexpr std::array kProtectionKeys = {
    "existing-mechanisms"sv, "enforcement-point"sv, "potential-mechanisms"sv, "attack-prevention"sv, "reaction"sv,
};

constexpr std::size_t kLineWidth = 78;

bool is_placeholder(std::string_view value) { return value.empty() || value == "-"; }

std::string or_placeholder(std::string value) { return value.empty() ? std::string("-") : value; }

Diagnostic field_error(std::string_view code, std::string message) {
    return make_diagnostic(Severity::Error, code, std::move(message));
}

/// Splits `Name (inner)` into name and inner text. nullopt when the shape is
/// wrong (text after the closing parenthesis, unbalanced parentheses).
struct Parenthesized {
    std::string head;
    std::optional<std::string> inner;
};

std::optional<Parenthesized> split_parenthesized(std::string_view piece) {
    const auto open = piece.find('(');
    const auto close_stray = piece.find(')');
    if (open == std::string_view::npos) {
        if (close_stray != std::string_view::npos) return std::nullopt;
        return Parenthesized{std::string(trim(piece)), std::nullopt};
    }
    int depth = 0;
    std::size_t close = std::string_view::npos;
    for (std::size_t i = open; i < piece.size(); ++i) {
        if (piece[i] == '(') ++depth;
        if (piece[i] == ')' && --depth == 0) {
            close = i;
            break;
        }
    }
    if (close == std::string_view::npos || !trim(piece.substr(close + 1)).empty()) return std::nullopt;
    if (close_stray < open) return std::nullopt;
    return Parenthesized{std::string(trim(piece.substr(0, open))),
                         normalize_whitespace(piece.substr(open + 1, close - open - 1))};
}

std::optional<std::vector<std::string>> split_list(std::string_view text, char separator) {
    if (is_placeholder(text)) return std::vector<std::string>{};
    auto parts = split_top_level(text, separator);
    if (!parts) return std::nullopt;
    for (const auto& part : *parts) {
        if (part.empty()) return std::nullopt;
    }
    return parts;
}

struct RawField {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

struct LineScan {
    std::vector<RawField> fields;
    std::vector<std::string> sections_seen;
    std::vector<Diagnostic> diagnostics;
};

LineScan scan_lines(std::string_view raw) {
    LineScan scan;
    std::string section;
    RawField* open_field = nullptr;
    int line_number = 0;
    std::size_t position = 0;
    while (position <= raw.size()) {
        auto end = raw.find('\n', position);
        if (end == std::string_view::npos) end = raw.size();
        std::string_view line = raw.substr(position, end - position);
        position = end + 1;
        ++line_number;
        if (end == raw.size() && line.empty()) break;

        if (trim(line).empty()) {
            open_field = nullptr;
            continue;
        }
        if (line.front() == '#') {
            open_field = nullptr;
            continue;
        }
        if (line.front() == ' ' || line.front() == '\t') {
            if (!open_field) {
                scan.diagnostics.push_back(make_diagnostic(Severity::Error, codes::kSyntax,
                                                           "continuation line without a key",
                                                           {"", "", line_number}));
                continue;
            }
            open_field->value += ' ';
            open_field->value += trim(line);
            continue;
        }
        const auto trimmed = trim(line);
        if (trimmed.front() == '[' && trimmed.back() == ']') {
            section = std::string(trim(trimmed.substr(1, trimmed.size() - 2)));
            open_field = nullptr;
            if (std::find(scan.sections_seen.begin(), scan.sections_seen.end(), section) == scan.sections_seen.end()) {
                scan.sections_seen.push_back(section);
                if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
                    scan.diagnostics.push_back(make_diagnostic(Severity::Warning, codes::kUnknownSection,
                                                               "unknown section [" + section + "] kept verbatim",
                                                               {"", section, line_number}));
                }
            }
            continue;
        }
        const auto equals = trimmed.find('=');
        if (equals == std::string_view::npos || trim(trimmed.substr(0, equals)).empty()) {
            scan.diagnostics.push_back(
                make_diagnostic(Severity::Error, codes::kSyntax, "expected `key = value`", {"", "", line_number}));
            open_field = nullptr;
            continue;
        }
        if (section.empty()) {
            scan.diagnostics.push_back(make_diagnostic(Severity::Error, codes::kSyntax, "key outside of a section",
                                                       {"", std::string(trim(trimmed.substr(0, equals))), line_number}));
            open_field = nullptr;
            continue;
        }
        scan.fields.push_back({section, std::string(trim(trimmed.substr(0, equals))),
                               std::string(trim(trimmed.substr(equals + 1))), line_number});
        open_field = &scan.fields.back();
    }
    for (auto& field : scan.fields) field.value = normalize_whitespace(field.value);
    return scan;
}

bool is_known_key(std::string_view section, std::string_view key) {
    const auto keys = section_keys(section);
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

/// Collects diagnostics for one entry, stamping location and line.
class EntryBuilder {
public:
    EntryBuilder(const TaxonomyRegistry& registry, std::map<std::string, const RawField*> fields)
        : registry_(registry), fields_(std::move(fields)) {}

    std::string entry_label;
    std::vector<Diagnostic> diagnostics;

    const RawField* find(std::string_view key) const {
        const auto it = fields_.find(std::string(key));
        return it == fields_.end() ? nullptr : it->second;
    }

    std::string value(std::string_view key) const {
        const auto* field = find(key);
        return field ? field->value : std::string();
    }

    std::string text(std::string_view key) const {
        auto v = value(key);
        return is_placeholder(v) ? std::string() : v;
    }

    void absorb(std::string_view key, std::vector<Diagnostic> found) {
        for (auto& d : found) {
            if (d.code == codes::kTaxonomyUnknown) continue;
            stamp(d, key);
            diagnostics.push_back(std::move(d));
        }
    }

    void fail(std::string_view key, std::string_view code, std::string message) {
        auto d = field_error(code, std::move(message));
        stamp(d, key);
        diagnostics.push_back(std::move(d));
    }

    bool require(std::string_view key) {
        if (find(key)) return true;
        fail(key, codes::kFieldMissing, "missing key `" + std::string(key) + "`");
        return false;
    }

    TaxonomyValue single(std::string_view key, Dimension dimension) const {
        return registry_.resolve(dimension, text(key));
    }

    std::optional<TaxonomyValue> optional_single(std::string_view key, Dimension dimension) const {
        const auto v = text(key);
        if (v.empty()) return std::nullopt;
        return registry_.resolve(dimension, v);
    }

    std::vector<TaxonomyValue> list(std::string_view key, Dimension dimension) {
        auto parts = split_list(value(key), ';');
        if (!parts) {
            fail(key, codes::kFieldSyntax, "malformed list");
            return {};
        }
        std::vector<TaxonomyValue> out;
        for (const auto& part : *parts) out.push_back(registry_.resolve(dimension, part));
        return out;
    }

    std::vector<std::string> names(std::string_view key) {
        auto parts = split_list(value(key), ';');
        if (!parts) {
            fail(key, codes::kFieldSyntax, "malformed list");
            return {};
        }
        return *parts;
    }

private:
    void stamp(Diagnostic& d, std::string_view key) const {
        d.location.entry = entry_label;
        d.location.field = std::string(key);
        if (const auto* field = find(key)) d.location.line = field->line;
    }

    const TaxonomyRegistry& registry_;
    std::map<std::string, const RawField*> fields_;
};

std::string wrap_line(std::string_view key, std::string_view value) {
    std::string first = std::string(key) + " =";
    if (value.empty()) return first + "\n";
    first += ' ';
    if (first.size() + value.size() <= kLineWidth) return first + std::string(value) + "\n";

    std::string out;
    std::string current = first;
    bool current_has_word = false;
    std::size_t start = 0;
    while (start <= value.size()) {
        auto space = value.find(' ', start);
        if (space == std::string_view::npos) space = value.size();
        const auto word = value.substr(start, space - start);
        start = space + 1;
        if (!current_has_word && out.empty() && current.size() + word.size() > kLineWidth) {
            // A word too long for the key line starts on a continuation line.
            out += std::string(key) + " =\n";
            current = "  ";
        } else if (current_has_word && current.size() + 1 + word.size() > kLineWidth) {
            out += current + "\n";
            current = "  ";
            current_has_word = false;
        }
        if (current_has_word) current += ' ';
        current += word;
        current_has_word = true;
        if (space == value.size()) break;
    }
    out += current + "\n";
    return out;
}

std::string join_values(const std::vector<TaxonomyValue>& values) {
    std::vector<std::string> texts;
    for (const auto& value : values) texts.push_back(value.text);
    return join(texts, "; ");
}

std::string source_text(const std::vector<SourceAttribution>& sources) {
    std::vector<std::string> parts;
    for (const auto& source : sources) {
        std::string part = source.entity.text;
        if (!source.causes.empty()) {
            std::vector<std::string> causes;
            for (const auto& cause : source.causes) causes.push_back(cause.value.text);
            part += " (" + join(causes, "; ") + ")";
        }
        parts.push_back(std::move(part));
    }
    return join(parts, "; ");
}

std::string consequence_text(const std::vector<Consequence>& consequences) {
    std::vector<std::string> parts;
    for (const auto& consequence : consequences) {
        std::string part = consequence.base.text;
        if (!consequence.qualifiers.empty()) {
            std::vector<std::string> qualifiers;
            for (const auto& q : consequence.qualifiers) qualifiers.push_back(q.text);
            part += " - " + join(qualifiers, ", ");
        }
        parts.push_back(std::move(part));
    }
    return join(parts, "; ");
}

std::string mechanism_text(const std::vector<PotentialMechanism>& mechanisms) {
    std::vector<std::string> parts;
    for (const auto& mechanism : mechanisms) {
        std::string part = mechanism.name.text;
        if (mechanism.note) part += " (" + *mechanism.note + ")";
        parts.push_back(std::move(part));
    }
    return join(parts, "; ");
}

}  // namespace

std::span<const std::string_view> section_names() { return kSections; }

std::span<const std::string_view> section_keys(std::string_view section) {
    if (section == "reference") return kReferenceKeys;
    if (section == "description") return kDescriptionKeys;
    if (section == "implementation") return kImplementationKeys;
    if (section == "protection") return kProtectionKeys;
    return {};
}

EntryText read_entry_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string raw;
    const std::string content = buffer.str();
    raw.reserve(content.size());
    for (std::size_t i = 0; i < content.size(); ++i) {
        if (content[i] == '\r') {
            raw.push_back('\n');
            if (i + 1 < content.size() && content[i + 1] == '\n') ++i;
        } else {
            raw.push_back(content[i]);
        }
    }
    return {std::move(raw), path.filename().string()};
}

Parsed<Identifier> parse_identifier(std::string_view text) {
    const auto trimmed = trim(text);
    if (auto id = try_parse_identifier(trimmed)) return {id, {}};
    return {std::nullopt,
            {field_error(codes::kIdSyntax, "malformed identifier \"" + std::string(trimmed) +
                                               "\" (expected mb.<archive|java|native|osgi>.<n>, n >= 1)")}};
}

Parsed<std::vector<SourceAttribution>> parse_source_field(std::string_view text, const TaxonomyRegistry& registry) {
    Parsed<std::vector<SourceAttribution>> result;
    const auto normalized = normalize_whitespace(text);
    auto pieces = split_list(normalized, ';');
    if (!pieces) {
        result.diagnostics.push_back(field_error(codes::kParseSource, "unbalanced parentheses or empty entity"));
        return result;
    }
    std::vector<SourceAttribution> sources;
    bool ok = true;
    for (const auto& piece : *pieces) {
        const auto shape = split_parenthesized(piece);
        if (!shape || shape->head.empty()) {
            result.diagnostics.push_back(field_error(codes::kParseSource, "malformed source \"" + piece + "\""));
            ok = false;
            continue;
        }
        SourceAttribution source{registry.resolve(Dimension::SourceEntity, shape->head), {}};
        if (!shape->inner) {
            result.diagnostics.push_back(
                field_error(codes::kParseSource, "source entity \"" + shape->head + "\" names no cause"));
            ok = false;
        } else {
            auto causes = split_list(*shape->inner, ';');
            if (!causes || causes->empty()) {
                result.diagnostics.push_back(
                    field_error(codes::kParseSource, "malformed cause list for \"" + shape->head + "\""));
                ok = false;
                continue;
            }
            for (const auto& cause_text : *causes) {
                auto as_functionality = registry.resolve(Dimension::Functionality, cause_text);
                if (as_functionality.status != ValueStatus::Unknown) {
                    source.causes.push_back({CauseKind::Functionality, std::move(as_functionality)});
                    continue;
                }
                auto as_flaw = registry.resolve(Dimension::Flaw, cause_text);
                if (as_flaw.status != ValueStatus::Unknown) {
                    source.causes.push_back({CauseKind::Flaw, std::move(as_flaw)});
                    continue;
                }
                auto d = field_error(codes::kTaxonomyUnknown,
                                     "\"" + as_functionality.text + "\" is neither a functionality nor a flaw");
                d.suggestion = registry.nearest(Dimension::Functionality, as_functionality.text);
                if (!d.suggestion) d.suggestion = registry.nearest(Dimension::Flaw, as_functionality.text);
                result.diagnostics.push_back(std::move(d));
                source.causes.push_back({CauseKind::Unclassified, std::move(as_functionality)});
            }
        }
        sources.push_back(std::move(source));
    }
    if (ok) result.value = std::move(sources);
    return result;
}

Parsed<std::vector<Consequence>> parse_consequence_field(std::string_view text, const TaxonomyRegistry& registry) {
    Parsed<std::vector<Consequence>> result;
    auto pieces = split_list(normalize_whitespace(text), ';');
    if (!pieces) {
        result.diagnostics.push_back(field_error(codes::kParseConsequence, "malformed consequence list"));
        return result;
    }
    std::vector<Consequence> consequences;
    bool ok = true;
    for (const auto& piece : *pieces) {
        const auto dash = piece.find(" - ");
        Consequence consequence;
        consequence.base = registry.resolve(Dimension::ConsequenceType, piece.substr(0, dash));
        if (consequence.base.status == ValueStatus::Unknown) {
            result.diagnostics.push_back(
                field_error(codes::kParseConsequence, "unknown consequence type \"" + consequence.base.text + "\""));
            ok = false;
        }
        if (dash != std::string::npos) {
            const auto qualifiers = split_list(piece.substr(dash + 3), ',');
            if (!qualifiers || qualifiers->empty()) {
                result.diagnostics.push_back(field_error(codes::kParseConsequence, "malformed qualifier list"));
                ok = false;
                continue;
            }
            std::set<std::string> seen;
            for (const auto& qualifier_text : *qualifiers) {
                auto qualifier = registry.resolve(Dimension::ConsequenceQualifier, qualifier_text);
                if (qualifier.status == ValueStatus::Unknown) {
                    result.diagnostics.push_back(
                        field_error(codes::kParseConsequence, "unknown qualifier \"" + qualifier.text + "\""));
                    ok = false;
                } else if (!seen.insert(qualifier.text).second) {
                    result.diagnostics.push_back(
                        field_error(codes::kParseConsequence, "duplicate qualifier \"" + qualifier.text + "\""));
                    ok = false;
                }
                consequence.qualifiers.push_back(std::move(qualifier));
            }
        }
        consequences.push_back(std::move(consequence));
    }
    if (ok) result.value = std::move(consequences);
    return result;
}

Parsed<std::vector<PotentialMechanism>> parse_potential_mechanisms(std::string_view text,
                                                                   const TaxonomyRegistry& registry) {
    Parsed<std::vector<PotentialMechanism>> result;
    auto pieces = split_list(normalize_whitespace(text), ';');
    if (!pieces) {
        result.diagnostics.push_back(field_error(codes::kFieldSyntax, "malformed mechanism list"));
        return result;
    }
    std::vector<PotentialMechanism> mechanisms;
    for (const auto& piece : *pieces) {
        const auto shape = split_parenthesized(piece);
        if (!shape || shape->head.empty()) {
            result.diagnostics.push_back(field_error(codes::kFieldSyntax, "malformed mechanism \"" + piece + "\""));
            continue;
        }
        PotentialMechanism mechanism{registry.resolve(Dimension::PotentialMechanism, shape->head), shape->inner};
        if (mechanism.note && mechanism.note->empty()) mechanism.note.reset();
        mechanisms.push_back(std::move(mechanism));
    }
    if (!has_errors(result.diagnostics)) result.value = std::move(mechanisms);
    return result;
}

Parsed<Date> parse_date(std::string_view text) {
    const auto trimmed = trim(text);
    const auto numbers = [](std::string_view s, char separator) -> std::optional<std::array<int, 3>> {
        std::array<int, 3> out{};
        std::size_t index = 0;
        std::size_t start = 0;
        while (index < 3) {
            auto end = s.find(separator, start);
            if (end == std::string_view::npos) end = s.size();
            const auto part = s.substr(start, end - start);
            if (part.empty() || part.size() > 4) return std::nullopt;
            const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out[index]);
            if (ec != std::errc{} || ptr != part.data() + part.size() || out[index] < 0) return std::nullopt;
            ++index;
            start = end + 1;
            if (end == s.size()) break;
        }
        if (index != 3 || start <= s.size()) return std::nullopt;
        return out;
    };

    Parsed<Date> result;
    std::optional<Date> date;
    if (const auto iso = numbers(trimmed, '-'); iso && trimmed.size() == 10) {
        date = Date{(*iso)[0], static_cast<unsigned>((*iso)[1]), static_cast<unsigned>((*iso)[2])};
    } else if (const auto dotted = numbers(trimmed, '.')) {
        date = Date{(*dotted)[2], static_cast<unsigned>((*dotted)[0]), static_cast<unsigned>((*dotted)[1])};
        if (is_valid_date(*date)) {
            result.diagnostics.push_back(make_diagnostic(Severity::Warning, codes::kDateFormat,
                                                         "dotted date \"" + std::string(trimmed) +
                                                             "\" read as " + date_text(*date)));
        }
    }
    if (!date || !is_valid_date(*date)) {
        result.diagnostics.push_back(
            field_error(codes::kFieldSyntax, "invalid date \"" + std::string(trimmed) + "\" (expected YYYY-MM-DD)"));
        return result;
    }
    result.value = date;
    return result;
}

Parsed<int> parse_coverage(std::string_view text) {
    auto trimmed = trim(text);
    if (!trimmed.empty() && trimmed.back() == '%') trimmed = trim(trimmed.substr(0, trimmed.size() - 1));
    int value = 0;
    const auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
    if (trimmed.empty() || ec != std::errc{} || ptr != trimmed.data() + trimmed.size()) {
        return {std::nullopt,
                {field_error(codes::kFieldSyntax, "invalid test coverage \"" + std::string(text) + "\"")}};
    }
    return {value, {}};
}

ParsedEntry parse_entry(const EntryText& text, const TaxonomyRegistry& registry) {
    ParsedEntry out;
    LineScan scan = scan_lines(text.raw);

    std::map<std::string, const RawField*> known;
    std::vector<ExtraField> extras;
    std::vector<Diagnostic> structure = std::move(scan.diagnostics);
    std::set<std::pair<std::string, std::string>> seen;

    for (const auto& field : scan.fields) {
        if (!seen.insert({field.section, field.key}).second) {
            structure.push_back(make_diagnostic(Severity::Error, codes::kKeyDup,
                                                "duplicate key `" + field.key + "` in [" + field.section + "]",
                                                {"", field.key, field.line}));
            continue;
        }
        if (is_known_key(field.section, field.key)) {
            known[field.key] = &field;
            out.lines[field.key] = field.line;
        } else {
            extras.push_back({field.section, field.key, field.value});
            structure.push_back(make_diagnostic(Severity::Warning, codes::kUnknownKey,
                                                "unknown key `" + field.key + "` in [" + field.section +
                                                    "] kept verbatim",
                                                {"", field.key, field.line}));
        }
    }

    // Known sections in canonical order, then unknown ones by first appearance.
    const auto section_rank = [&](const std::string& section) -> std::size_t {
        const auto known_it = std::find(kSections.begin(), kSections.end(), section);
        if (known_it != kSections.end()) return static_cast<std::size_t>(known_it - kSections.begin());
        const auto seen_it = std::find(scan.sections_seen.begin(), scan.sections_seen.end(), section);
        return kSections.size() + static_cast<std::size_t>(seen_it - scan.sections_seen.begin());
    };
    std::stable_sort(extras.begin(), extras.end(), [&](const ExtraField& a, const ExtraField& b) {
        return section_rank(a.section) < section_rank(b.section);
    });

    EntryBuilder b(registry, known);
    b.entry_label = text.origin;
    std::optional<Identifier> identifier;
    if (b.require("identifier")) {
        auto parsed = parse_identifier(b.value("identifier"));
        b.absorb("identifier", std::move(parsed.diagnostics));
        identifier = parsed.value;
        if (identifier) b.entry_label = identifier_text(*identifier);
    }
    for (auto& d : structure) {
        d.location.entry = b.entry_label;
        b.diagnostics.push_back(std::move(d));
    }
    for (const auto section : kSections) {
        if (std::find(scan.sections_seen.begin(), scan.sections_seen.end(), section) == scan.sections_seen.end()) {
            b.diagnostics.push_back(make_diagnostic(Severity::Error, codes::kSectionMissing,
                                                    "missing section [" + std::string(section) + "]",
                                                    {b.entry_label, std::string(section), std::nullopt}));
        }
    }

    VulnerabilityPattern p;
    auto& ref = p.reference;
    ref.name = b.text("name");
    if (identifier) ref.identifier = *identifier;
    if (auto extends = b.text("extends"); !extends.empty()) ref.extends = std::move(extends);
    ref.origin = b.text("origin");
    ref.locations = b.list("location", Dimension::Location);
    {
        auto parsed = parse_source_field(b.value("source"), registry);
        b.absorb("source", std::move(parsed.diagnostics));
        if (parsed.value) ref.sources = std::move(*parsed.value);
    }
    ref.targets = b.list("target", Dimension::Target);
    {
        auto parsed = parse_consequence_field(b.value("consequence-type"), registry);
        b.absorb("consequence-type", std::move(parsed.diagnostics));
        if (parsed.value) ref.consequences = std::move(*parsed.value);
    }
    ref.introduction_time = b.single("introduction-time", Dimension::IntroductionTime);
    ref.exploit_time = b.single("exploit-time", Dimension::ExploitTime);

    auto& desc = p.description;
    desc.description = b.text("description");
    desc.preconditions = b.text("preconditions");
    desc.attack_process = b.text("attack-process");
    desc.consequence_description = b.text("consequence-description");
    desc.see_also = b.names("see-also");

    auto& impl = p.implementation;
    impl.code_reference = b.text("code-reference");
    impl.osgi_profile = b.single("osgi-profile", Dimension::OsgiProfile);
    if (b.require("date")) {
        auto parsed = parse_date(b.value("date"));
        b.absorb("date", std::move(parsed.diagnostics));
        if (parsed.value) impl.date = *parsed.value;
    }
    if (b.require("test-coverage")) {
        auto parsed = parse_coverage(b.value("test-coverage"));
        b.absorb("test-coverage", std::move(parsed.diagnostics));
        if (parsed.value) impl.test_coverage = *parsed.value;
    }
    impl.vulnerable_platforms = b.list("vulnerable-platforms", Dimension::Platform);
    impl.robust_platforms = b.list("robust-platforms", Dimension::Platform);

    auto& prot = p.protection;
    prot.existing_mechanisms = b.list("existing-mechanisms", Dimension::ExistingMechanism);
    prot.enforcement_point = b.optional_single("enforcement-point", Dimension::EnforcementPoint);
    {
        auto parsed = parse_potential_mechanisms(b.value("potential-mechanisms"), registry);
        b.absorb("potential-mechanisms", std::move(parsed.diagnostics));
        if (parsed.value) prot.potential_mechanisms = std::move(*parsed.value);
    }
    prot.attack_prevention = b.list("attack-prevention", Dimension::AttackPrevention);
    prot.reaction = b.list("reaction", Dimension::Reaction);
    p.extra_fields = std::move(extras);

    out.diagnostics = std::move(b.diagnostics);
    std::stable_sort(out.diagnostics.begin(), out.diagnostics.end(), [](const Diagnostic& a, const Diagnostic& c) {
        return a.location.line.value_or(0) < c.location.line.value_or(0);
    });
    if (!has_errors(out.diagnostics)) out.pattern = std::move(p);
    return out;
}

std::string serialize_entry(const VulnerabilityPattern& pattern) {
    const auto& ref = pattern.reference;
    const auto& desc = pattern.description;
    const auto& impl = pattern.implementation;
    const auto& prot = pattern.protection;

    const auto value_of = [&](std::string_view key) -> std::string {
        if (key == "name") return or_placeholder(ref.name);
        if (key == "identifier") return identifier_text(ref.identifier);
        if (key == "extends") return ref.extends.value_or("");
        if (key == "origin") return or_placeholder(ref.origin);
        if (key == "location") return or_placeholder(join_values(ref.locations));
        if (key == "source") return or_placeholder(source_text(ref.sources));
        if (key == "target") return or_placeholder(join_values(ref.targets));
        if (key == "consequence-type") return or_placeholder(consequence_text(ref.consequences));
        if (key == "introduction-time") return or_placeholder(ref.introduction_time.text);
        if (key == "exploit-time") return or_placeholder(ref.exploit_time.text);
        if (key == "description") return or_placeholder(desc.description);
        if (key == "preconditions") return or_placeholder(desc.preconditions);
        if (key == "attack-process") return or_placeholder(desc.attack_process);
        if (key == "consequence-description") return or_placeholder(desc.consequence_description);
        if (key == "see-also") return or_placeholder(join(desc.see_also, "; "));
        if (key == "code-reference") return or_placeholder(impl.code_reference);
        if (key == "osgi-profile") return or_placeholder(impl.osgi_profile.text);
        if (key == "date") return date_text(impl.date);
        if (key == "test-coverage") return std::to_string(impl.test_coverage) + "%";
        if (key == "vulnerable-platforms") return or_placeholder(join_values(impl.vulnerable_platforms));
        if (key == "robust-platforms") return or_placeholder(join_values(impl.robust_platforms));
        if (key == "existing-mechanisms") return or_placeholder(join_values(prot.existing_mechanisms));
        if (key == "enforcement-point") return prot.enforcement_point ? prot.enforcement_point->text : "-";
        if (key == "potential-mechanisms") return or_placeholder(mechanism_text(prot.potential_mechanisms));
        if (key == "attack-prevention") return or_placeholder(join_values(prot.attack_prevention));
        if (key == "reaction") return or_placeholder(join_values(prot.reaction));
        return "-";
    };

    std::string out;
    for (std::size_t s = 0; s < kSections.size(); ++s) {
        if (s) out += '\n';
        out += "[" + std::string(kSections[s]) + "]\n";
        for (const auto key : section_keys(kSections[s])) {
            if (key == "extends" && !ref.extends) continue;
            out += wrap_line(key, value_of(key));
        }
        for (const auto& extra : pattern.extra_fields) {
            if (extra.section == kSections[s]) out += wrap_line(extra.key, extra.value);
        }
    }
    std::string current_section;
    for (const auto& extra : pattern.extra_fields) {
        if (std::find(kSections.begin(), kSections.end(), extra.section) != kSections.end()) continue;
        if (extra.section != current_section) {
            out += "\n[" + extra.section + "]\n";
            current_section = extra.section;
        }
        out += wrap_line(extra.key, extra.value);
    }
    return out;
}

}  // namespace vulncat
