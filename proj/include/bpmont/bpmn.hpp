#pragma once

#include "bpmont/error.hpp"
#include "bpmont/xml.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bpmont::bpmn {

/// One element of a BPMN file. Tags and attribute names are kept exactly as
/// written (prefix included); xmlns declarations are lifted into the
/// document-level namespace table and do not appear among the attributes.
struct Element {
    std::string tag;
    std::vector<xml::Attribute> attributes;
    std::vector<Element> children;
    std::string text;

    std::string prefix() const { return std::string(xml::split_qname(tag).first); }
    std::string local() const { return std::string(xml::split_qname(tag).second); }
    const std::string* attr(std::string_view name) const;

    bool operator==(const Element&) const = default;
};

/// A parsed BPMN file: the element tree plus a flat namespace table in order
/// of first appearance. The empty prefix entry is the default namespace.
/// Binding one prefix to two different URIs anywhere in the file is
/// rejected (NamespaceConflict), so the flat table is lossless for
/// conforming exports, which declare everything on the root.
struct Document {
    Element root;
    std::vector<std::pair<std::string, std::string>> namespaces;

    std::optional<std::string> uri_for(std::string_view prefix) const;
    /// Namespace URI of an element's tag; nullopt for unprefixed tags
    /// without a default namespace.
    std::optional<std::string> namespace_of(const Element& e) const;

    bool operator==(const Document&) const = default;
};

/// Throws MalformedXml, NamespaceConflict or UndeclaredPrefix.
Document parse_bpmn(std::string_view bytes);

/// All namespace declarations are emitted on the root, table order first,
/// then the root's own attributes. parse_bpmn(serialize_bpmn(d)) == d.
std::string serialize_bpmn(const Document& d);

/// Canonical form: every namespace URI in the table is sorted and assigned
/// the prefix ns0, ns1, ...; tags and prefixed attributes are rewritten;
/// attributes are sorted by (namespace URI, local name) with unprefixed
/// attributes first; element order, text and attribute values are kept.
/// Idempotent; invariant under prefix renaming and attribute reordering.
Document canonicalize(const Document& d);

/// id attribute value -> element. Throws DuplicateId. Pointers are valid
/// while the document is alive and unmodified.
using IdIndex = std::unordered_map<std::string, const Element*>;
IdIndex id_index(const Document& d);

} // namespace bpmont::bpmn
