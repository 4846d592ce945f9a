#pragma once

#include "bpmont/error.hpp"
#include "bpmont/ontology.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace bpmont::ref {

struct NamespaceBinding {
    std::string prefix;
    std::string uri;
};

/// The namespaces whose elements are held to the reference ontology, with
/// the canonical prefix used for their IRIs. Elements from any other
/// namespace are out of scope for verification.
const std::vector<NamespaceBinding>& conformance_namespaces();
const std::string& model_ns();
const std::string& di_ns();

/// Canonical prefix for a conformance namespace URI; empty if out of scope.
std::string conformance_prefix(std::string_view uri);

struct TranslationRow {
    std::string scope;       // parent class local name, or "*" for any
    std::string serialized;  // element name as it appears in the file
    std::string standard;    // class local name in the reference ontology

    bool operator==(const TranslationRow&) const = default;
};

/// Maps serialized element names to reference-ontology class names. Lookup
/// prefers a row scoped to the parent element's class, then a global row,
/// and otherwise leaves the name unchanged.
class TranslationTable {
public:
    /// Three whitespace-separated columns per line: scope, serialized,
    /// standard. '#' starts a comment. Throws MalformedTable.
    static TranslationTable parse(std::string_view text);

    /// Built-in table covering the standard BPMN vocabulary.
    static const TranslationTable& defaults();

    std::string translate(std::string_view parent_class,
                          std::string_view serialized) const;

    /// Rows of `other` take precedence over existing ones.
    void merge_front(const TranslationTable& other);

    const std::vector<TranslationRow>& rows() const { return rows_; }

private:
    std::vector<TranslationRow> rows_;
};

/// The embedded BPMN 2.0 reference ontology. Deterministic: repeated calls
/// serialize to identical bytes.
onto::Ontology build_reference();

/// Adds every declaration of `extension` to `base`; name clashes are
/// reported as DuplicateIri / PrefixConflict. The result is validated.
onto::Ontology merge_extension(onto::Ontology base, const onto::Ontology& extension);

} // namespace bpmont::ref
