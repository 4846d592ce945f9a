#include "bpmont/bpmn.hpp"

#include <algorithm>
#include <map>

namespace bpmont::bpmn {

const std::string* Element::attr(std::string_view name) const {
    for (const xml::Attribute& a : attributes)
        if (a.name == name) return &a.value;
    return nullptr;
}

std::optional<std::string> Document::uri_for(std::string_view prefix) const {
    for (const auto& [p, uri] : namespaces)
        if (p == prefix) return uri;
    return std::nullopt;
}

std::optional<std::string> Document::namespace_of(const Element& e) const {
    return uri_for(xml::split_qname(e.tag).first);
}

namespace {

void declare(Document& d, const std::string& prefix, const std::string& uri) {
    for (const auto& [p, u] : d.namespaces) {
        if (p != prefix) continue;
        if (u != uri)
            throw Error("NamespaceConflict",
                        "prefix '" + prefix + "' bound to both " + u + " and " + uri);
        return;
    }
    d.namespaces.emplace_back(prefix, uri);
}

Element strip(Document& d, const xml::Node& node) {
    Element e;
    e.tag = node.name;
    e.text = node.text;
    for (const xml::Attribute& a : node.attributes) {
        if (a.name == "xmlns") {
            declare(d, "", a.value);
        } else if (a.name.rfind("xmlns:", 0) == 0) {
            declare(d, a.name.substr(6), a.value);
        } else {
            e.attributes.push_back(a);
        }
    }
    for (const xml::Node& child : node.children) e.children.push_back(strip(d, child));
    return e;
}

void check_prefixes(const Document& d, const Element& e, const std::string& path) {
    auto known = [&d](std::string_view prefix) {
        return prefix.empty() || prefix == "xml" || d.uri_for(prefix).has_value();
    };
    std::string here = path + "/" + e.tag;
    if (!known(xml::split_qname(e.tag).first))
        throw Error("UndeclaredPrefix",
                    here + ": no namespace declaration for element prefix");
    for (const xml::Attribute& a : e.attributes)
        if (!known(xml::split_qname(a.name).first))
            throw Error("UndeclaredPrefix",
                        here + "/@" + a.name + ": no namespace declaration for prefix");
    for (const Element& child : e.children) check_prefixes(d, child, here);
}

} // namespace

Document parse_bpmn(std::string_view bytes) {
    xml::Node root = xml::parse(bytes);
    Document d;
    d.root = strip(d, root);
    check_prefixes(d, d.root, "");
    return d;
}

namespace {

xml::Node rebuild(const Element& e) {
    xml::Node n;
    n.name = e.tag;
    n.attributes = e.attributes;
    n.text = e.text;
    for (const Element& child : e.children) n.children.push_back(rebuild(child));
    return n;
}

} // namespace

std::string serialize_bpmn(const Document& d) {
    xml::Node root = rebuild(d.root);
    std::vector<xml::Attribute> attrs;
    for (const auto& [prefix, uri] : d.namespaces)
        attrs.push_back({prefix.empty() ? "xmlns" : "xmlns:" + prefix, uri});
    attrs.insert(attrs.end(), root.attributes.begin(), root.attributes.end());
    root.attributes = std::move(attrs);
    return xml::serialize(root);
}

namespace {

std::string remap_name(const std::string& name,
                       const std::map<std::string, std::string>& uri_to_prefix,
                       const Document& d) {
    auto [prefix, local] = xml::split_qname(name);
    if (prefix.empty() || prefix == "xml") return name;
    return uri_to_prefix.at(*d.uri_for(prefix)) + ":" + std::string(local);
}

Element canonicalize_element(const Element& e, const Document& d,
                             const std::map<std::string, std::string>& uri_to_prefix) {
    Element out;
    auto [tag_prefix, tag_local] = xml::split_qname(e.tag);
    if (tag_prefix.empty() && d.uri_for("")) {
        out.tag = uri_to_prefix.at(*d.uri_for("")) + ":" + std::string(tag_local);
    } else {
        out.tag = remap_name(e.tag, uri_to_prefix, d);
    }
    out.text = e.text;

    struct Keyed {
        std::string uri;
        std::string local;
        xml::Attribute attr;
    };
    std::vector<Keyed> keyed;
    for (const xml::Attribute& a : e.attributes) {
        auto [prefix, local] = xml::split_qname(a.name);
        // Unprefixed attributes carry no namespace, so they keep their name.
        std::string uri = prefix.empty() || prefix == "xml"
                              ? std::string()
                              : *d.uri_for(prefix);
        keyed.push_back({uri, std::string(local),
                         {remap_name(a.name, uri_to_prefix, d), a.value}});
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& x, const Keyed& y) {
        return std::tie(x.uri, x.local) < std::tie(y.uri, y.local);
    });
    for (size_t i = 1; i < keyed.size(); ++i)
        if (keyed[i].attr.name == keyed[i - 1].attr.name)
            throw Error("NamespaceConflict",
                        "attribute " + keyed[i].attr.name + " on " + out.tag +
                            " appears twice after prefix normalization");
    for (Keyed& k : keyed) out.attributes.push_back(std::move(k.attr));

    for (const Element& child : e.children)
        out.children.push_back(canonicalize_element(child, d, uri_to_prefix));
    return out;
}

} // namespace

Document canonicalize(const Document& d) {
    std::vector<std::string> uris;
    for (const auto& [prefix, uri] : d.namespaces) uris.push_back(uri);
    std::sort(uris.begin(), uris.end());
    uris.erase(std::unique(uris.begin(), uris.end()), uris.end());

    std::map<std::string, std::string> uri_to_prefix;
    Document out;
    for (size_t i = 0; i < uris.size(); ++i) {
        std::string prefix = "ns" + std::to_string(i);
        uri_to_prefix[uris[i]] = prefix;
        out.namespaces.emplace_back(prefix, uris[i]);
    }
    out.root = canonicalize_element(d.root, d, uri_to_prefix);
    return out;
}

namespace {

void index_element(const Element& e, IdIndex& out) {
    if (const std::string* id = e.attr("id")) {
        auto [it, inserted] = out.emplace(*id, &e);
        if (!inserted)
            throw Error("DuplicateId", "id '" + *id + "' is used by " + it->second->tag +
                                           " and " + e.tag);
    }
    for (const Element& child : e.children) index_element(child, out);
}

} // namespace

IdIndex id_index(const Document& d) {
    IdIndex out;
    index_element(d.root, out);
    return out;
}

} // namespace bpmont::bpmn
