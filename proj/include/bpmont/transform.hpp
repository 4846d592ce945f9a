#pragma once

#include "bpmont/bpmn.hpp"
#include "bpmont/ontology.hpp"
#include "bpmont/reference.hpp"

#include <string>
#include <vector>

namespace bpmont::transform {

/// Prefix and namespace reserved for inversion metadata in model ontologies:
/// mo:child keeps the child order, mo:attrOrder the attribute spelling and
/// order, and the artificial class mo:document roots the tag hierarchy.
const std::string& metadata_prefix();
const std::string& metadata_ns();

/// Turns a BPMN file into a model ontology. The document is canonicalized
/// first, so prefix spelling and attribute order do not affect the result.
///
/// - one class per distinct tag, subclassed along element nesting, with the
///   root element's class under the artificial mo:document
/// - one named individual per element (local_1, local_2, ... per tag)
/// - attributes become data assertions, or object assertions when every
///   occurrence of the attribute resolves to an element id ("id" itself
///   always stays a data property)
/// - exact-cardinality restrictions, taken from each class's first
///   individual
///
/// Throws MissingNamespace for elements without a namespace and DuplicateId
/// for colliding ids.
onto::Ontology bpmn_to_owl(const bpmn::Document& doc);

/// Rebuilds the canonical document from a model ontology. Inverse of
/// bpmn_to_owl up to canonicalization:
///   owl_to_bpmn(bpmn_to_owl(d)) == canonicalize(d).
/// Throws MissingProvenance when the metadata does not cover the ontology
/// (no unique root, unreachable individuals, assertions outside
/// mo:attrOrder, or missing ids for referenced elements).
bpmn::Document owl_to_bpmn(const onto::Ontology& model);

struct ComparisonEntry {
    enum class Kind { UnknownClass, UnknownProperty, CardinalityConflict };
    Kind kind;
    std::string subject;
    std::string detail;

    bool operator==(const ComparisonEntry&) const = default;
};

std::string_view comparison_kind_name(ComparisonEntry::Kind k);

/// Checks the conformance-namespace part of a model ontology against the
/// reference: every class must translate to a reference class, every
/// property must be declared, and the observed exact cardinalities must
/// satisfy the reference restrictions. Other namespaces are ignored.
std::vector<ComparisonEntry> compare_to_reference(
    const onto::Ontology& model, const onto::Ontology& reference,
    const ref::TranslationTable& table = ref::TranslationTable::defaults());

} // namespace bpmont::transform
