#pragma once

#include "bpmont/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace bpmont::xml {

/// Raw XML tree: names kept exactly as written (prefix included), attribute
/// order preserved, xmlns declarations left in the attribute list. Namespace
/// resolution is the caller's concern.
///
/// Restrictions of this dialect: UTF-8 only, no DTD/XInclude/external
/// entities, no mixed content (an element has either element children or
/// text). Comments and processing instructions are dropped on parse;
/// whitespace-only text is insignificant and dropped.
struct Attribute {
    std::string name;  // as written, e.g. "id" or "xsi:type" or "xmlns:bpmn2"
    std::string value;

    bool operator==(const Attribute&) const = default;
};

struct Node {
    std::string name;  // as written, e.g. "bpmn2:task"
    std::vector<Attribute> attributes;
    std::vector<Node> children;
    std::string text;  // leaf text, byte-exact; empty if none

    const Attribute* find_attribute(std::string_view attr_name) const;
    bool operator==(const Node&) const = default;
};

/// Parses one XML document. Throws Error("MalformedXml", ...) with
/// line:column context on any syntax problem.
Node parse(std::string_view bytes);

/// Pretty-prints with 2-space indentation and a standard XML declaration.
/// Deterministic: equal trees yield identical bytes.
std::string serialize(const Node& root);

/// Escapes text content (&, <, >, and carriage return).
std::string escape_text(std::string_view raw);

/// Escapes an attribute value (&, <, >, quote, tab, LF, CR).
std::string escape_attribute(std::string_view raw);

/// Splits "pfx:local" into its prefix (empty if none) and local part.
std::pair<std::string, std::string> split_qname(std::string_view name);

} // namespace bpmont::xml
