#pragma once

#include "bpmont/bpmn.hpp"
#include "bpmont/ontology.hpp"
#include "bpmont/reference.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace bpmont::verify {

/// What a finding is about. The first two report vocabulary that has no
/// counterpart in the ontology; the cardinality rules report elements whose
/// attribute or child counts fall outside an inherited restriction; the
/// datatype rule reports attribute values outside their property's lexical
/// space.
enum class Rule {
    UnknownClass,
    UnknownProperty,
    AttributeCardinality,
    ChildCardinality,
    DatatypeMismatch,
};

std::string_view rule_name(Rule r);

enum class Severity { Error, Warning };

struct Finding {
    Rule rule;
    Severity severity;
    std::string path;     // element path, e.g. bpmn2:definitions/bpmn2:process[2]
    std::string subject;  // offending tag, attribute or property
    std::string detail;

    bool operator==(const Finding&) const = default;
};

/// Rules listed in `warnings` are reported with Severity::Warning.
struct Options {
    std::vector<Rule> warnings;
};

struct Report {
    std::string source;
    std::vector<Finding> findings;
    int elements_checked = 0;    // elements in a conformance namespace
    int attributes_checked = 0;  // their attributes, vendor ones excluded

    bool clean() const { return findings.empty(); }
    bool has_errors() const;
};

/// Checks a document against an ontology: every element in a conformance
/// namespace must map to a class (via the translation table, scoped by the
/// parent element's class), every attribute of such elements must map to a
/// declared property, and the class's own and inherited restrictions must
/// admit the element's attribute and child counts. Elements from other
/// namespaces are skipped but their subtrees are still visited.
Report verify(const bpmn::Document& doc, const onto::Ontology& ontology,
              const ref::TranslationTable& table = ref::TranslationTable::defaults(),
              const Options& options = {});

std::vector<Report> verify_corpus(
    const std::vector<std::pair<std::string, bpmn::Document>>& docs,
    const onto::Ontology& ontology,
    const ref::TranslationTable& table = ref::TranslationTable::defaults(),
    const Options& options = {});

/// One aligned row per finding, or a single "ok" line for a clean report.
std::string render_text(const Report& report);

/// One JSON object per line with keys detail, path, rule, severity, source,
/// subject. Clean reports render as an empty string.
std::string render_jsonl(const Report& report);

/// One line per report plus a totals line.
std::string render_summary(const std::vector<Report>& reports);

} // namespace bpmont::verify
