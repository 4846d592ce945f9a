#include "bpmont/transform.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace bpmont::transform {

using onto::Cardinality;
using onto::DataAssertion;
using onto::Datatype;
using onto::Iri;
using onto::NamedIndividual;
using onto::ObjectAssertion;
using onto::OntoClass;
using onto::Ontology;
using onto::PropertyDecl;
using onto::PropertyKind;
using onto::Restriction;

const std::string& metadata_prefix() {
    static const std::string p = "mo";
    return p;
}

const std::string& metadata_ns() {
    static const std::string u = "urn:bpmont:model#";
    return u;
}

namespace {

struct ElementInfo {
    const bpmn::Element* element;
    Iri class_iri;
    Iri individual;
};

struct PropertyInfo {
    Iri iri;
    bool id_attr = false;     // spelled as a plain "id" attribute somewhere
    bool all_resolve = true;  // every value is an element id in this file
};

struct Collector {
    const bpmn::IdIndex& index;
    std::vector<ElementInfo> elements;
    std::map<const bpmn::Element*, size_t> element_pos;
    std::vector<Iri> class_order;
    std::map<std::string, std::vector<Iri>> class_supers;
    std::map<std::string, int> name_counters;
    std::vector<std::string> property_order;
    std::map<std::string, PropertyInfo> properties;
};

bool reaches_class(const Collector& c, const std::string& from, const std::string& target) {
    std::vector<std::string> stack{from};
    std::set<std::string> seen;
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        if (cur == target) return true;
        if (!seen.insert(cur).second) continue;
        auto it = c.class_supers.find(cur);
        if (it != c.class_supers.end())
            for (const Iri& s : it->second) stack.push_back(s.str());
    }
    return false;
}

// Nesting becomes a subclass edge unless that would close a cycle (an
// element type nested inside itself keeps its first position in the tree).
void add_nesting_edge(Collector& c, const Iri& cls, const Iri& parent) {
    std::vector<Iri>& supers = c.class_supers[cls.str()];
    if (std::find(supers.begin(), supers.end(), parent) != supers.end()) return;
    if (parent == cls || reaches_class(c, parent.str(), cls.str())) return;
    supers.push_back(parent);
}

Iri attr_property(const bpmn::Element& e, const xml::Attribute& a) {
    auto [ap, al] = xml::split_qname(a.name);
    std::string prefix = ap.empty() ? std::string(xml::split_qname(e.tag).first)
                                    : std::string(ap);
    return Iri{prefix, std::string(al)};
}

void walk(Collector& c, const bpmn::Element& e, const Iri* parent_class,
          const std::string& path) {
    auto [prefix, local] = xml::split_qname(e.tag);
    std::string here = path + "/" + e.tag;
    if (prefix.empty())
        throw Error("MissingNamespace", here + ": element has no namespace");
    Iri cls{std::string(prefix), std::string(local)};
    if (!c.class_supers.count(cls.str())) {
        c.class_order.push_back(cls);
        c.class_supers[cls.str()];
    }
    if (parent_class) add_nesting_edge(c, cls, *parent_class);

    int n = ++c.name_counters[e.tag];
    Iri individual{std::string(prefix), std::string(local) + "_" + std::to_string(n)};
    c.element_pos[&e] = c.elements.size();
    c.elements.push_back({&e, cls, individual});

    for (const xml::Attribute& a : e.attributes) {
        Iri prop = attr_property(e, a);
        auto [it, inserted] = c.properties.try_emplace(prop.str());
        if (inserted) {
            it->second.iri = prop;
            c.property_order.push_back(prop.str());
        }
        if (xml::split_qname(a.name).first.empty() &&
            xml::split_qname(a.name).second == "id")
            it->second.id_attr = true;
        if (!c.index.count(a.value)) it->second.all_resolve = false;
    }
    for (const bpmn::Element& child : e.children) walk(c, child, &cls, here);
}

} // namespace

onto::Ontology bpmn_to_owl(const bpmn::Document& input) {
    bpmn::Document doc = bpmn::canonicalize(input);
    bpmn::IdIndex index = bpmn::id_index(doc);
    Collector col{index};
    walk(col, doc.root, nullptr, "");

    Ontology o;
    o.header_iri = Iri{metadata_prefix(), "model"};
    o.declare_prefix(metadata_prefix(), metadata_ns());
    for (const auto& [prefix, uri] : doc.namespaces) o.declare_prefix(prefix, uri);
    o.annotations.emplace_back("rdfs:comment",
                               "model ontology derived from a BPMN 2.0 document");

    // Object properties first, then data properties, mirroring the file's
    // part order so the ontology is a serialize/parse fixed point.
    auto is_object = [&col](const PropertyInfo& pi) {
        return !pi.id_attr && pi.all_resolve;
    };
    PropertyDecl child_prop;
    child_prop.iri = Iri{metadata_prefix(), "child"};
    child_prop.kind = PropertyKind::Object;
    o.add_property(std::move(child_prop));
    for (const std::string& key : col.property_order) {
        const PropertyInfo& pi = col.properties.at(key);
        if (!is_object(pi)) continue;
        PropertyDecl p;
        p.iri = pi.iri;
        p.kind = PropertyKind::Object;
        o.add_property(std::move(p));
    }
    PropertyDecl order_prop;
    order_prop.iri = Iri{metadata_prefix(), "attrOrder"};
    order_prop.kind = PropertyKind::Data;
    order_prop.data_range = Datatype::String;
    o.add_property(std::move(order_prop));
    for (const std::string& key : col.property_order) {
        const PropertyInfo& pi = col.properties.at(key);
        if (is_object(pi)) continue;
        PropertyDecl p;
        p.iri = pi.iri;
        p.kind = PropertyKind::Data;
        p.data_range = Datatype::String;
        o.add_property(std::move(p));
    }

    OntoClass document_cls;
    document_cls.iri = Iri{metadata_prefix(), "document"};
    o.add_class(std::move(document_cls));
    const Iri root_class = col.elements.front().class_iri;
    for (const Iri& cls : col.class_order) {
        OntoClass c;
        c.iri = cls;
        if (cls == root_class) c.superclasses.push_back(Iri{metadata_prefix(), "document"});
        for (const Iri& super : col.class_supers.at(cls.str()))
            c.superclasses.push_back(super);
        o.add_class(std::move(c));
    }

    for (const ElementInfo& info : col.elements) {
        const bpmn::Element& e = *info.element;
        NamedIndividual ind;
        ind.iri = info.individual;
        ind.types = {info.class_iri};

        std::string attr_order;
        for (const xml::Attribute& a : e.attributes) {
            if (!attr_order.empty()) attr_order += ' ';
            attr_order += a.name;
            Iri prop = attr_property(e, a);
            if (!is_object(col.properties.at(prop.str())))
                ind.data_assertions.push_back({prop, a.value, Datatype::String});
        }
        ind.data_assertions.push_back(
            {Iri{metadata_prefix(), "attrOrder"}, attr_order, Datatype::String});
        for (const xml::Attribute& a : e.attributes) {
            Iri prop = attr_property(e, a);
            if (!is_object(col.properties.at(prop.str()))) continue;
            const bpmn::Element* target = index.at(a.value);
            ind.object_assertions.push_back(
                {prop, col.elements[col.element_pos.at(target)].individual});
        }
        for (const bpmn::Element& child : e.children)
            ind.object_assertions.push_back(
                {Iri{metadata_prefix(), "child"},
                 col.elements[col.element_pos.at(&child)].individual});
        if (!e.text.empty()) ind.text_content = e.text;
        o.add_individual(std::move(ind));
    }

    // Cardinalities are exact and observed: each class is described by its
    // first individual in document order.
    for (const Iri& cls : col.class_order) {
        const NamedIndividual* first = nullptr;
        for (const ElementInfo& info : col.elements) {
            if (info.class_iri == cls) {
                first = o.find_individual(info.individual);
                break;
            }
        }
        std::vector<std::pair<Iri, int>> counts;
        auto bump = [&counts](const Iri& prop) {
            for (auto& [p, n] : counts)
                if (p == prop) {
                    ++n;
                    return;
                }
            counts.emplace_back(prop, 1);
        };
        for (const DataAssertion& da : first->data_assertions) bump(da.property);
        for (const ObjectAssertion& oa : first->object_assertions) bump(oa.property);
        for (const auto& [prop, n] : counts) {
            const PropertyDecl* decl = o.find_property(prop);
            std::optional<Datatype> range;
            if (decl->kind == PropertyKind::Data) range = Datatype::String;
            o.add_restriction({cls, prop, Cardinality::exact(n), std::nullopt, range});
        }
    }

    o.validate();
    return o;
}

namespace {

struct Rebuilder {
    const Ontology& model;
    Iri child_prop;
    Iri order_prop;
    std::set<std::string> on_path;
    size_t visited = 0;

    std::string element_id(const NamedIndividual& ind) {
        Iri id_prop{ind.types.front().prefix, "id"};
        for (const DataAssertion& da : ind.data_assertions)
            if (da.property == id_prop) return da.value;
        throw Error("MissingProvenance",
                    ind.iri.str() + ": referenced element has no id assertion");
    }

    bpmn::Element rebuild(const NamedIndividual& ind) {
        if (!on_path.insert(ind.iri.str()).second)
            throw Error("MissingProvenance",
                        ind.iri.str() + ": child edges form a cycle");
        ++visited;

        bpmn::Element e;
        const Iri& cls = ind.types.front();
        e.tag = cls.prefix + ":" + cls.local;

        std::vector<bool> data_used(ind.data_assertions.size(), false);
        std::vector<bool> object_used(ind.object_assertions.size(), false);

        const DataAssertion* order = nullptr;
        for (size_t i = 0; i < ind.data_assertions.size(); ++i) {
            if (ind.data_assertions[i].property == order_prop) {
                order = &ind.data_assertions[i];
                data_used[i] = true;
                break;
            }
        }
        if (!order)
            throw Error("MissingProvenance",
                        ind.iri.str() + ": individual has no mo:attrOrder assertion");

        std::istringstream names(order->value);
        std::string name;
        while (names >> name) {
            auto [ap, al] = xml::split_qname(name);
            Iri prop{ap.empty() ? cls.prefix : std::string(ap), std::string(al)};
            bool found = false;
            for (size_t i = 0; i < ind.data_assertions.size() && !found; ++i) {
                if (data_used[i] || ind.data_assertions[i].property != prop) continue;
                e.attributes.push_back({name, ind.data_assertions[i].value});
                data_used[i] = true;
                found = true;
            }
            for (size_t i = 0; i < ind.object_assertions.size() && !found; ++i) {
                if (object_used[i] || ind.object_assertions[i].property != prop) continue;
                const NamedIndividual* target =
                    model.find_individual(ind.object_assertions[i].target);
                e.attributes.push_back({name, element_id(*target)});
                object_used[i] = true;
                found = true;
            }
            if (!found)
                throw Error("MissingProvenance",
                            ind.iri.str() + ": attribute " + name +
                                " in mo:attrOrder has no matching assertion");
        }

        for (size_t i = 0; i < ind.object_assertions.size(); ++i) {
            if (ind.object_assertions[i].property != child_prop) continue;
            object_used[i] = true;
            e.children.push_back(
                rebuild(*model.find_individual(ind.object_assertions[i].target)));
        }
        if (ind.text_content) e.text = *ind.text_content;

        for (size_t i = 0; i < data_used.size(); ++i)
            if (!data_used[i])
                throw Error("MissingProvenance",
                            ind.iri.str() + ": assertion " +
                                ind.data_assertions[i].property.str() +
                                " is not covered by mo:attrOrder");
        for (size_t i = 0; i < object_used.size(); ++i)
            if (!object_used[i])
                throw Error("MissingProvenance",
                            ind.iri.str() + ": assertion " +
                                ind.object_assertions[i].property.str() +
                                " is not covered by mo:attrOrder");

        on_path.erase(ind.iri.str());
        return e;
    }
};

} // namespace

bpmn::Document owl_to_bpmn(const onto::Ontology& model) {
    auto mo_uri = model.prefix_uri(metadata_prefix());
    if (!mo_uri || *mo_uri != metadata_ns())
        throw Error("MissingProvenance",
                    "ontology does not declare the mo metadata namespace");
    Iri child_prop{metadata_prefix(), "child"};

    std::set<std::string> targeted;
    for (const NamedIndividual& ind : model.individuals())
        for (const ObjectAssertion& oa : ind.object_assertions)
            if (oa.property == child_prop) targeted.insert(oa.target.str());

    const NamedIndividual* root = nullptr;
    for (const NamedIndividual& ind : model.individuals()) {
        if (targeted.count(ind.iri.str())) continue;
        if (root)
            throw Error("MissingProvenance", "more than one root individual: " +
                                                 root->iri.str() + " and " +
                                                 ind.iri.str());
        root = &ind;
    }
    if (!root)
        throw Error("MissingProvenance", "model ontology has no root individual");

    bpmn::Document out;
    for (const auto& [prefix, uri] : model.prefixes())
        if (prefix != metadata_prefix()) out.namespaces.emplace_back(prefix, uri);

    Rebuilder rb{model, child_prop, Iri{metadata_prefix(), "attrOrder"}};
    out.root = rb.rebuild(*root);
    if (rb.visited != model.individuals().size())
        throw Error("MissingProvenance",
                    "child edges do not reach every individual (" +
                        std::to_string(rb.visited) + " of " +
                        std::to_string(model.individuals().size()) + ")");
    return out;
}

std::string_view comparison_kind_name(ComparisonEntry::Kind k) {
    switch (k) {
    case ComparisonEntry::Kind::UnknownClass: return "unknown-class";
    case ComparisonEntry::Kind::UnknownProperty: return "unknown-property";
    case ComparisonEntry::Kind::CardinalityConflict: return "cardinality-conflict";
    }
    return "";
}

std::vector<ComparisonEntry> compare_to_reference(const onto::Ontology& model,
                                                  const onto::Ontology& reference,
                                                  const ref::TranslationTable& table) {
    std::vector<ComparisonEntry> out;
    auto conformance_prefix_of = [&model](const Iri& iri) -> std::string {
        auto uri = model.prefix_uri(iri.prefix);
        return uri ? ref::conformance_prefix(*uri) : std::string();
    };

    std::map<std::string, Iri> translated;
    for (const OntoClass& cls : model.classes()) {
        std::string cp = conformance_prefix_of(cls.iri);
        if (cp.empty()) continue;
        std::string scope = "*";
        if (!cls.superclasses.empty())
            scope = table.translate("*", cls.superclasses.front().local);
        Iri ref_iri{cp, table.translate(scope, cls.iri.local)};
        if (!reference.find_class(ref_iri)) {
            out.push_back({ComparisonEntry::Kind::UnknownClass, cls.iri.str(),
                           "no reference class " + ref_iri.str()});
        } else {
            translated.emplace(cls.iri.str(), ref_iri);
        }
    }

    for (const PropertyDecl& p : model.properties()) {
        std::string cp = conformance_prefix_of(p.iri);
        if (cp.empty()) continue;
        Iri ref_iri{cp, p.iri.local};
        if (!reference.find_property(ref_iri))
            out.push_back({ComparisonEntry::Kind::UnknownProperty, p.iri.str(),
                           "no reference property " + ref_iri.str()});
    }

    for (const Restriction& r : model.restrictions()) {
        auto subject = translated.find(r.subject_class.str());
        if (subject == translated.end()) continue;
        std::string cp = conformance_prefix_of(r.on_property);
        if (cp.empty()) continue;
        Iri ref_prop{cp, r.on_property.local};
        if (!reference.find_property(ref_prop)) continue;
        if (r.cardinality.kind != Cardinality::Kind::Exact) continue;
        for (const Restriction& rr : reference.effective_restrictions(subject->second)) {
            if (rr.on_property != ref_prop || rr.on_class) continue;
            if (!rr.cardinality.admits(r.cardinality.lo))
                out.push_back(
                    {ComparisonEntry::Kind::CardinalityConflict,
                     r.subject_class.str() + "/" + r.on_property.str(),
                     "observed " + r.cardinality.str() + " but " +
                         rr.subject_class.str() + " requires " + rr.cardinality.str()});
        }
    }
    return out;
}

} // namespace bpmont::transform
