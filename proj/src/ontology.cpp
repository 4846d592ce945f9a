#include "bpmont/ontology.hpp"
#include "bpmont/xml.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

namespace bpmont::onto {

namespace {

const std::vector<std::pair<std::string, std::string>>& builtin_prefixes() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
        {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
        {"owl", "http://www.w3.org/2002/07/owl#"},
        {"xsd", "http://www.w3.org/2001/XMLSchema#"},
    };
    return table;
}

const std::string* builtin_uri(std::string_view prefix) {
    for (const auto& [p, uri] : builtin_prefixes())
        if (p == prefix) return &uri;
    return nullptr;
}

} // namespace

Iri parse_iri(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size())
        throw Error("MalformedIri", "expected prefix:local, got '" + std::string(text) + "'");
    return Iri{std::string(text.substr(0, colon)), std::string(text.substr(colon + 1))};
}

std::string_view datatype_name(Datatype t) {
    switch (t) {
    case Datatype::String: return "xsd:string";
    case Datatype::Integer: return "xsd:integer";
    case Datatype::Boolean: return "xsd:boolean";
    case Datatype::Idref: return "xsd:IDREF";
    case Datatype::AnyType: return "xsd:anyType";
    }
    return "xsd:string";
}

std::optional<Datatype> datatype_from_name(std::string_view name) {
    if (name == "xsd:string") return Datatype::String;
    if (name == "xsd:integer") return Datatype::Integer;
    if (name == "xsd:boolean") return Datatype::Boolean;
    if (name == "xsd:IDREF") return Datatype::Idref;
    if (name == "xsd:anyType") return Datatype::AnyType;
    return std::nullopt;
}

bool literal_matches(Datatype t, std::string_view literal) {
    switch (t) {
    case Datatype::String:
    case Datatype::AnyType:
        return true;
    case Datatype::Idref:
        return !literal.empty();
    case Datatype::Boolean:
        return literal == "true" || literal == "false";
    case Datatype::Integer: {
        if (!literal.empty() && (literal.front() == '+' || literal.front() == '-'))
            literal.remove_prefix(1);
        if (literal.empty()) return false;
        return std::all_of(literal.begin(), literal.end(),
                           [](unsigned char c) { return c >= '0' && c <= '9'; });
    }
    }
    return false;
}

bool Cardinality::admits(int n) const {
    switch (kind) {
    case Kind::Exact: return n == lo;
    case Kind::Min: return n >= lo;
    case Kind::Max: return n <= hi;
    case Kind::Range: return n >= lo && n <= hi;
    }
    return false;
}

std::string Cardinality::str() const {
    switch (kind) {
    case Kind::Exact: return "exactly " + std::to_string(lo);
    case Kind::Min: return "at least " + std::to_string(lo);
    case Kind::Max: return "at most " + std::to_string(hi);
    case Kind::Range:
        return "between " + std::to_string(lo) + " and " + std::to_string(hi);
    }
    return "";
}

const Iri& owl_thing() {
    static const Iri thing{"owl", "Thing"};
    return thing;
}

void Ontology::declare_prefix(const std::string& prefix, const std::string& uri) {
    if (prefix.empty() || uri.empty())
        throw Error("InvariantViolation", "prefix and namespace URI must be non-empty");
    if (const std::string* fixed = builtin_uri(prefix)) {
        if (*fixed != uri)
            throw Error("PrefixConflict",
                        "built-in prefix '" + prefix + "' is bound to " + *fixed);
        return;
    }
    for (const auto& [p, u] : prefixes_) {
        if (p == prefix) {
            if (u != uri)
                throw Error("PrefixConflict",
                            "prefix '" + prefix + "' already bound to " + u);
            return;
        }
    }
    prefixes_.emplace_back(prefix, uri);
}

std::optional<std::string> Ontology::prefix_uri(std::string_view prefix) const {
    if (const std::string* fixed = builtin_uri(prefix)) return *fixed;
    for (const auto& [p, u] : prefixes_)
        if (p == prefix) return u;
    return std::nullopt;
}

bool Ontology::reaches(const Iri& from, const Iri& target) const {
    std::vector<Iri> stack{from};
    std::set<Iri> seen;
    while (!stack.empty()) {
        Iri cur = stack.back();
        stack.pop_back();
        if (cur == target) return true;
        if (!seen.insert(cur).second) continue;
        if (const OntoClass* c = find_class(cur))
            for (const Iri& super : c->superclasses) stack.push_back(super);
    }
    return false;
}

void Ontology::add_class(OntoClass cls) {
    if (class_index_.count(cls.iri.str()))
        throw Error("DuplicateIri", "class " + cls.iri.str() + " already declared");
    for (const Iri& super : cls.superclasses)
        if (super == cls.iri || reaches(super, cls.iri))
            throw Error("CycleIntroduced",
                        "class " + cls.iri.str() + " would inherit from itself via " +
                            super.str());
    classes_.push_back(std::move(cls));
    class_index_[classes_.back().iri.str()] = classes_.size() - 1;
}

void Ontology::add_property(PropertyDecl prop) {
    if (property_index_.count(prop.iri.str()))
        throw Error("DuplicateIri", "property " + prop.iri.str() + " already declared");
    if (prop.kind == PropertyKind::Data && !prop.data_range)
        throw Error("InvariantViolation",
                    "data property " + prop.iri.str() + " requires a datatype range");
    if (prop.kind == PropertyKind::Data && prop.object_range)
        throw Error("InvariantViolation",
                    "data property " + prop.iri.str() + " cannot have a class range");
    if (prop.kind == PropertyKind::Object && prop.data_range)
        throw Error("InvariantViolation",
                    "object property " + prop.iri.str() + " cannot have a datatype range");
    properties_.push_back(std::move(prop));
    property_index_[properties_.back().iri.str()] = properties_.size() - 1;
}

void Ontology::add_restriction(Restriction r) {
    if (r.on_class && r.on_data_range)
        throw Error("InvariantViolation",
                    "restriction on " + r.subject_class.str() + "/" + r.on_property.str() +
                        " sets both onClass and onDataRange");
    if (r.cardinality.lo < 0 || r.cardinality.hi < 0)
        throw Error("InvariantViolation", "cardinality bounds must be non-negative");
    if (r.cardinality.kind == Cardinality::Kind::Range && r.cardinality.lo > r.cardinality.hi)
        throw Error("InvariantViolation", "cardinality range lower bound exceeds upper bound");
    restrictions_.push_back(std::move(r));
}

void Ontology::add_individual(NamedIndividual ind) {
    if (individual_index_.count(ind.iri.str()))
        throw Error("DuplicateIri", "individual " + ind.iri.str() + " already declared");
    if (ind.types.empty())
        throw Error("InvariantViolation",
                    "individual " + ind.iri.str() + " must have at least one type");
    individuals_.push_back(std::move(ind));
    individual_index_[individuals_.back().iri.str()] = individuals_.size() - 1;
}

const OntoClass* Ontology::find_class(const Iri& iri) const {
    auto it = class_index_.find(iri.str());
    return it == class_index_.end() ? nullptr : &classes_[it->second];
}

const PropertyDecl* Ontology::find_property(const Iri& iri) const {
    auto it = property_index_.find(iri.str());
    return it == property_index_.end() ? nullptr : &properties_[it->second];
}

const NamedIndividual* Ontology::find_individual(const Iri& iri) const {
    auto it = individual_index_.find(iri.str());
    return it == individual_index_.end() ? nullptr : &individuals_[it->second];
}

NamedIndividual* Ontology::mutable_individual(const Iri& iri) {
    auto it = individual_index_.find(iri.str());
    return it == individual_index_.end() ? nullptr : &individuals_[it->second];
}

OntoClass* Ontology::mutable_class(const Iri& iri) {
    auto it = class_index_.find(iri.str());
    return it == class_index_.end() ? nullptr : &classes_[it->second];
}

std::vector<Iri> Ontology::superclass_closure(const Iri& cls) const {
    if (cls == owl_thing()) return {};
    if (!find_class(cls))
        throw Error("UnknownClass", "no class named " + cls.str());
    std::vector<Iri> out;
    std::set<Iri> visited{cls};
    std::vector<Iri> queue;
    size_t head = 0;
    for (const Iri& s : find_class(cls)->superclasses) queue.push_back(s);
    while (head < queue.size()) {
        Iri cur = queue[head++];
        if (cur == owl_thing() || !visited.insert(cur).second) continue;
        out.push_back(cur);
        if (const OntoClass* c = find_class(cur))
            for (const Iri& s : c->superclasses) queue.push_back(s);
    }
    out.push_back(owl_thing());
    return out;
}

std::vector<Restriction> Ontology::effective_restrictions(const Iri& cls) const {
    std::vector<Iri> order{cls};
    for (Iri& a : superclass_closure(cls))
        if (a != owl_thing()) order.push_back(std::move(a));
    std::vector<Restriction> out;
    auto shape_seen = [&out](const Restriction& r) {
        return std::any_of(out.begin(), out.end(), [&r](const Restriction& have) {
            return have.on_property == r.on_property && have.cardinality == r.cardinality &&
                   have.on_class == r.on_class && have.on_data_range == r.on_data_range;
        });
    };
    for (const Iri& subject : order)
        for (const Restriction& r : restrictions_)
            if (r.subject_class == subject && !shape_seen(r)) out.push_back(r);
    return out;
}

void Ontology::validate() const {
    auto check_prefix = [this](const Iri& iri, const std::string& path) {
        if (!prefix_uri(iri.prefix))
            throw Error("InvariantViolation",
                        path + ": prefix '" + iri.prefix + "' is not declared");
    };
    check_prefix(header_iri, "/header");
    for (const OntoClass& c : classes_) {
        std::string path = "/classes/" + c.iri.str();
        check_prefix(c.iri, path);
        for (const Iri& super : c.superclasses) {
            check_prefix(super, path);
            if (super != owl_thing() && !find_class(super))
                throw Error("UnresolvedSuperclass",
                            path + ": superclass " + super.str() + " is not declared");
        }
    }
    for (const PropertyDecl& p : properties_) {
        std::string path = "/properties/" + p.iri.str();
        check_prefix(p.iri, path);
        if (p.object_range) {
            check_prefix(*p.object_range, path);
            if (!find_class(*p.object_range))
                throw Error("UnresolvedReference",
                            path + ": range class " + p.object_range->str() +
                                " is not declared");
        }
    }
    for (size_t i = 0; i < restrictions_.size(); ++i) {
        const Restriction& r = restrictions_[i];
        std::string path = "/restrictions/" + std::to_string(i);
        check_prefix(r.subject_class, path);
        check_prefix(r.on_property, path);
        if (!find_class(r.subject_class))
            throw Error("UnresolvedReference",
                        path + ": subject class " + r.subject_class.str() + " is not declared");
        const PropertyDecl* prop = find_property(r.on_property);
        if (!prop)
            throw Error("UnresolvedReference",
                        path + ": property " + r.on_property.str() + " is not declared");
        if (r.on_class) {
            check_prefix(*r.on_class, path);
            if (!find_class(*r.on_class))
                throw Error("UnresolvedReference",
                            path + ": onClass target " + r.on_class->str() +
                                " is not declared");
            if (prop->kind != PropertyKind::Object)
                throw Error("InvariantViolation",
                            path + ": onClass requires an object property, " +
                                r.on_property.str() + " is a data property");
        }
        if (r.on_data_range && prop->kind != PropertyKind::Data)
            throw Error("InvariantViolation",
                        path + ": onDataRange requires a data property, " +
                            r.on_property.str() + " is an object property");
    }
    for (const NamedIndividual& ind : individuals_) {
        std::string path = "/individuals/" + ind.iri.str();
        check_prefix(ind.iri, path);
        if (ind.types.empty())
            throw Error("InvariantViolation", path + ": individual has no type");
        for (const Iri& t : ind.types) {
            check_prefix(t, path);
            if (!find_class(t))
                throw Error("UnresolvedReference",
                            path + ": type " + t.str() + " is not declared");
        }
        for (size_t i = 0; i < ind.data_assertions.size(); ++i) {
            const DataAssertion& da = ind.data_assertions[i];
            std::string apath = path + "/data_assertions/" + std::to_string(i);
            check_prefix(da.property, apath);
            const PropertyDecl* prop = find_property(da.property);
            if (!prop)
                throw Error("UnresolvedReference",
                            apath + ": property " + da.property.str() + " is not declared");
            if (prop->kind != PropertyKind::Data)
                throw Error("InvariantViolation",
                            apath + ": " + da.property.str() +
                                " is an object property but is asserted with a literal");
            if (!literal_matches(da.datatype, da.value))
                throw Error("InvariantViolation",
                            apath + ": literal '" + da.value + "' does not match " +
                                std::string(datatype_name(da.datatype)));
        }
        for (size_t i = 0; i < ind.object_assertions.size(); ++i) {
            const ObjectAssertion& oa = ind.object_assertions[i];
            std::string apath = path + "/object_assertions/" + std::to_string(i);
            check_prefix(oa.property, apath);
            check_prefix(oa.target, apath);
            const PropertyDecl* prop = find_property(oa.property);
            if (!prop)
                throw Error("UnresolvedReference",
                            apath + ": property " + oa.property.str() + " is not declared");
            if (prop->kind != PropertyKind::Object)
                throw Error("InvariantViolation",
                            apath + ": " + oa.property.str() +
                                " is a data property but is asserted with a resource");
            if (!find_individual(oa.target))
                throw Error("UnresolvedReference",
                            apath + ": target " + oa.target.str() + " is not declared");
        }
    }
}

namespace {

xml::Node resource_node(const std::string& name, const std::string& value) {
    xml::Node n;
    n.name = name;
    n.attributes.push_back({"rdf:resource", value});
    return n;
}

xml::Node cardinality_node(const char* name, int value) {
    xml::Node n;
    n.name = name;
    n.attributes.push_back({"rdf:datatype", "xsd:nonNegativeInteger"});
    n.text = std::to_string(value);
    return n;
}

void append_cardinality(xml::Node& restriction, const Cardinality& c) {
    switch (c.kind) {
    case Cardinality::Kind::Exact:
        restriction.children.push_back(cardinality_node("owl:qualifiedCardinality", c.lo));
        break;
    case Cardinality::Kind::Min:
        restriction.children.push_back(cardinality_node("owl:minQualifiedCardinality", c.lo));
        break;
    case Cardinality::Kind::Max:
        restriction.children.push_back(cardinality_node("owl:maxQualifiedCardinality", c.hi));
        break;
    case Cardinality::Kind::Range:
        restriction.children.push_back(cardinality_node("owl:minQualifiedCardinality", c.lo));
        restriction.children.push_back(cardinality_node("owl:maxQualifiedCardinality", c.hi));
        break;
    }
}

} // namespace

std::string serialize(const Ontology& ont) {
    ont.validate();
    xml::Node root;
    root.name = "rdf:RDF";
    for (const auto& [prefix, uri] : builtin_prefixes())
        root.attributes.push_back({"xmlns:" + prefix, uri});
    for (const auto& [prefix, uri] : ont.prefixes())
        root.attributes.push_back({"xmlns:" + prefix, uri});

    xml::Node header;
    header.name = "owl:Ontology";
    header.attributes.push_back({"rdf:about", ont.header_iri.str()});
    for (const auto& [key, value] : ont.annotations) {
        xml::Node a;
        a.name = key;
        a.text = value;
        header.children.push_back(std::move(a));
    }
    root.children.push_back(std::move(header));

    for (const PropertyDecl& p : ont.properties()) {
        if (p.kind != PropertyKind::Object) continue;
        xml::Node n;
        n.name = "owl:ObjectProperty";
        n.attributes.push_back({"rdf:about", p.iri.str()});
        if (p.object_range)
            n.children.push_back(resource_node("rdfs:range", p.object_range->str()));
        root.children.push_back(std::move(n));
    }
    for (const PropertyDecl& p : ont.properties()) {
        if (p.kind != PropertyKind::Data) continue;
        xml::Node n;
        n.name = "owl:DatatypeProperty";
        n.attributes.push_back({"rdf:about", p.iri.str()});
        n.children.push_back(
            resource_node("rdfs:range", std::string(datatype_name(*p.data_range))));
        root.children.push_back(std::move(n));
    }

    // Consecutive restrictions on the same class share one carrier block.
    const auto& rs = ont.restrictions();
    for (size_t i = 0; i < rs.size();) {
        xml::Node carrier;
        carrier.name = "owl:Class";
        carrier.attributes.push_back({"rdf:about", rs[i].subject_class.str()});
        size_t j = i;
        for (; j < rs.size() && rs[j].subject_class == rs[i].subject_class; ++j) {
            xml::Node restriction;
            restriction.name = "owl:Restriction";
            restriction.children.push_back(
                resource_node("owl:onProperty", rs[j].on_property.str()));
            append_cardinality(restriction, rs[j].cardinality);
            if (rs[j].on_class)
                restriction.children.push_back(
                    resource_node("owl:onClass", rs[j].on_class->str()));
            if (rs[j].on_data_range)
                restriction.children.push_back(resource_node(
                    "owl:onDataRange", std::string(datatype_name(*rs[j].on_data_range))));
            xml::Node sub;
            sub.name = "rdfs:subClassOf";
            sub.children.push_back(std::move(restriction));
            carrier.children.push_back(std::move(sub));
        }
        i = j;
        root.children.push_back(std::move(carrier));
    }

    for (const NamedIndividual& ind : ont.individuals()) {
        xml::Node n;
        n.name = "owl:NamedIndividual";
        n.attributes.push_back({"rdf:about", ind.iri.str()});
        for (const Iri& t : ind.types)
            n.children.push_back(resource_node("rdf:type", t.str()));
        for (const DataAssertion& da : ind.data_assertions) {
            xml::Node a;
            a.name = da.property.str();
            a.attributes.push_back({"rdf:datatype", std::string(datatype_name(da.datatype))});
            a.text = da.value;
            n.children.push_back(std::move(a));
        }
        for (const ObjectAssertion& oa : ind.object_assertions)
            n.children.push_back(resource_node(oa.property.str(), oa.target.str()));
        if (ind.text_content) {
            xml::Node v;
            v.name = "rdf:value";
            v.text = *ind.text_content;
            n.children.push_back(std::move(v));
        }
        root.children.push_back(std::move(n));
    }

    for (const OntoClass& c : ont.classes()) {
        xml::Node n;
        n.name = "owl:Class";
        n.attributes.push_back({"rdf:about", c.iri.str()});
        for (const Iri& super : c.superclasses)
            n.children.push_back(resource_node("rdfs:subClassOf", super.str()));
        for (const auto& [key, value] : c.annotations) {
            xml::Node a;
            a.name = key;
            a.text = value;
            n.children.push_back(std::move(a));
        }
        root.children.push_back(std::move(n));
    }

    return xml::serialize(root);
}

namespace {

const xml::Attribute* require_attr(const xml::Node& node, const char* name,
                                   const std::string& path) {
    const xml::Attribute* a = node.find_attribute(name);
    if (!a)
        throw Error("InvariantViolation", path + ": missing " + name + " attribute");
    return a;
}

int parse_nonneg(const std::string& text, const std::string& path) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 0)
        throw Error("InvariantViolation",
                    path + ": '" + text + "' is not a non-negative integer");
    return value;
}

Datatype parse_datatype(const std::string& name, const std::string& path) {
    auto dt = datatype_from_name(name);
    if (!dt)
        throw Error("InvariantViolation", path + ": unknown datatype " + name);
    return *dt;
}

Restriction parse_restriction(const xml::Node& node, const Iri& subject,
                              const std::string& path) {
    Restriction r;
    r.subject_class = subject;
    bool have_property = false, have_exact = false;
    std::optional<int> min_card, max_card;
    for (const xml::Node& child : node.children) {
        if (child.name == "owl:onProperty") {
            if (have_property)
                throw Error("InvariantViolation", path + ": duplicate owl:onProperty");
            r.on_property = parse_iri(require_attr(child, "rdf:resource", path)->value);
            have_property = true;
        } else if (child.name == "owl:qualifiedCardinality") {
            require_attr(child, "rdf:datatype", path);
            r.cardinality = Cardinality::exact(parse_nonneg(child.text, path));
            have_exact = true;
        } else if (child.name == "owl:minQualifiedCardinality") {
            require_attr(child, "rdf:datatype", path);
            min_card = parse_nonneg(child.text, path);
        } else if (child.name == "owl:maxQualifiedCardinality") {
            require_attr(child, "rdf:datatype", path);
            max_card = parse_nonneg(child.text, path);
        } else if (child.name == "owl:onClass") {
            r.on_class = parse_iri(require_attr(child, "rdf:resource", path)->value);
        } else if (child.name == "owl:onDataRange") {
            r.on_data_range = parse_datatype(
                require_attr(child, "rdf:resource", path)->value, path);
        } else {
            throw Error("InvariantViolation",
                        path + ": unexpected element " + child.name + " in restriction");
        }
    }
    if (!have_property)
        throw Error("InvariantViolation", path + ": restriction without owl:onProperty");
    if (have_exact && (min_card || max_card))
        throw Error("InvariantViolation",
                    path + ": exact cardinality cannot be combined with bounds");
    if (!have_exact) {
        if (min_card && max_card)
            r.cardinality = Cardinality::between(*min_card, *max_card);
        else if (min_card)
            r.cardinality = Cardinality::at_least(*min_card);
        else if (max_card)
            r.cardinality = Cardinality::at_most(*max_card);
        else
            throw Error("InvariantViolation", path + ": restriction without a cardinality");
    }
    if (r.on_class && r.on_data_range)
        throw Error("InvariantViolation",
                    path + ": restriction sets both onClass and onDataRange");
    return r;
}

bool is_restriction_carrier(const xml::Node& node) {
    if (node.name != "owl:Class") return false;
    for (const xml::Node& child : node.children)
        if (child.name == "rdfs:subClassOf" && !child.children.empty()) return true;
    return false;
}

} // namespace

Ontology parse(std::string_view bytes) {
    xml::Node root = xml::parse(bytes);
    if (root.name != "rdf:RDF")
        throw Error("InvariantViolation",
                    "root element must be rdf:RDF, got " + root.name);
    Ontology ont;
    for (const xml::Attribute& attr : root.attributes) {
        if (attr.name == "xmlns")
            throw Error("InvariantViolation", "default namespace declarations are not supported");
        if (attr.name.rfind("xmlns:", 0) != 0)
            throw Error("InvariantViolation",
                        "unexpected attribute " + attr.name + " on rdf:RDF");
        ont.declare_prefix(attr.name.substr(6), attr.value);
    }

    // Parts must appear in file order: header, object properties, data
    // properties, restriction blocks, individuals, class declarations.
    enum Part { Header = 0, ObjProps, DataProps, Restrictions, Individuals, Classes };
    int part = Header;
    bool have_header = false;
    auto advance = [&part](int target, const std::string& path) {
        if (target < part)
            throw Error("InvariantViolation", path + ": ontology parts are out of order");
        part = target;
    };

    for (size_t idx = 0; idx < root.children.size(); ++idx) {
        const xml::Node& node = root.children[idx];
        std::string path = "/" + node.name + "[" + std::to_string(idx) + "]";

        if (node.name == "owl:Ontology") {
            if (have_header)
                throw Error("InvariantViolation", path + ": duplicate ontology header");
            if (part != Header)
                throw Error("InvariantViolation", path + ": header must come first");
            ont.header_iri = parse_iri(require_attr(node, "rdf:about", path)->value);
            for (const xml::Node& child : node.children) {
                if (!child.children.empty() || !child.attributes.empty())
                    throw Error("InvariantViolation",
                                path + ": header annotations must be plain text elements");
                ont.annotations.emplace_back(child.name, child.text);
            }
            have_header = true;
            part = ObjProps;
            continue;
        }
        if (!have_header)
            throw Error("InvariantViolation", path + ": missing ontology header");

        if (node.name == "owl:ObjectProperty") {
            advance(ObjProps, path);
            PropertyDecl p;
            p.iri = parse_iri(require_attr(node, "rdf:about", path)->value);
            p.kind = PropertyKind::Object;
            for (const xml::Node& child : node.children) {
                if (child.name != "rdfs:range" || p.object_range)
                    throw Error("InvariantViolation",
                                path + ": object property allows one rdfs:range child");
                p.object_range = parse_iri(require_attr(child, "rdf:resource", path)->value);
            }
            ont.add_property(std::move(p));
        } else if (node.name == "owl:DatatypeProperty") {
            advance(DataProps, path);
            PropertyDecl p;
            p.iri = parse_iri(require_attr(node, "rdf:about", path)->value);
            p.kind = PropertyKind::Data;
            for (const xml::Node& child : node.children) {
                if (child.name != "rdfs:range" || p.data_range)
                    throw Error("InvariantViolation",
                                path + ": data property allows one rdfs:range child");
                p.data_range = parse_datatype(
                    require_attr(child, "rdf:resource", path)->value, path);
            }
            if (!p.data_range)
                throw Error("InvariantViolation",
                            path + ": data property requires an rdfs:range child");
            ont.add_property(std::move(p));
        } else if (is_restriction_carrier(node)) {
            advance(Restrictions, path);
            Iri subject = parse_iri(require_attr(node, "rdf:about", path)->value);
            for (const xml::Node& child : node.children) {
                if (child.name != "rdfs:subClassOf" || child.children.size() != 1 ||
                    child.children[0].name != "owl:Restriction")
                    throw Error("InvariantViolation",
                                path + ": restriction block children must be "
                                       "rdfs:subClassOf/owl:Restriction");
                ont.add_restriction(parse_restriction(child.children[0], subject, path));
            }
        } else if (node.name == "owl:NamedIndividual") {
            advance(Individuals, path);
            NamedIndividual ind;
            ind.iri = parse_iri(require_attr(node, "rdf:about", path)->value);
            for (const xml::Node& child : node.children) {
                if (!child.children.empty())
                    throw Error("InvariantViolation",
                                path + ": assertion " + child.name +
                                    " must not contain elements");
                if (child.name == "rdf:type") {
                    ind.types.push_back(
                        parse_iri(require_attr(child, "rdf:resource", path)->value));
                } else if (child.name == "rdf:value") {
                    if (ind.text_content)
                        throw Error("InvariantViolation", path + ": duplicate rdf:value");
                    ind.text_content = child.text;
                } else if (const xml::Attribute* res = child.find_attribute("rdf:resource")) {
                    ind.object_assertions.push_back(
                        {parse_iri(child.name), parse_iri(res->value)});
                } else {
                    DataAssertion da;
                    da.property = parse_iri(child.name);
                    da.value = child.text;
                    if (const xml::Attribute* dt = child.find_attribute("rdf:datatype"))
                        da.datatype = parse_datatype(dt->value, path);
                    ind.data_assertions.push_back(std::move(da));
                }
            }
            ont.add_individual(std::move(ind));
        } else if (node.name == "owl:Class") {
            advance(Classes, path);
            OntoClass c;
            c.iri = parse_iri(require_attr(node, "rdf:about", path)->value);
            for (const xml::Node& child : node.children) {
                if (child.name == "rdfs:subClassOf") {
                    c.superclasses.push_back(
                        parse_iri(require_attr(child, "rdf:resource", path)->value));
                } else if (child.children.empty() && child.attributes.empty()) {
                    c.annotations.emplace_back(child.name, child.text);
                } else {
                    throw Error("InvariantViolation",
                                path + ": unexpected element " + child.name +
                                    " in class declaration");
                }
            }
            ont.add_class(std::move(c));
        } else {
            throw Error("InvariantViolation", path + ": unexpected element " + node.name);
        }
    }
    if (!have_header)
        throw Error("InvariantViolation", "ontology file has no owl:Ontology header");
    ont.validate();
    return ont;
}

std::string_view difference_kind_name(Difference::Kind k) {
    switch (k) {
    case Difference::Kind::Class: return "class";
    case Difference::Kind::ObjectProperty: return "object-property";
    case Difference::Kind::DataProperty: return "data-property";
    case Difference::Kind::SubclassEdge: return "subclass-edge";
    case Difference::Kind::Restriction: return "restriction";
    case Difference::Kind::Individual: return "individual";
    case Difference::Kind::Header: return "header";
    case Difference::Kind::Annotation: return "annotation";
    case Difference::Kind::Prefix: return "prefix";
    case Difference::Kind::Ordering: return "ordering";
    }
    return "";
}

std::string_view difference_side_name(Difference::Side s) {
    switch (s) {
    case Difference::Side::OnlyInA: return "only-in-a";
    case Difference::Side::OnlyInB: return "only-in-b";
    case Difference::Side::Mismatch: return "mismatch";
    }
    return "";
}

namespace {

std::string render_restriction(const Restriction& r) {
    std::string s = r.subject_class.str() + " " + r.on_property.str() + " " +
                    r.cardinality.str();
    if (r.on_class) s += " class " + r.on_class->str();
    if (r.on_data_range) s += " " + std::string(datatype_name(*r.on_data_range));
    return s;
}

template <typename T, typename KeyFn>
void key_set_diff(const std::vector<T>& a, const std::vector<T>& b, KeyFn key,
                  Difference::Kind kind, std::vector<Difference>& out) {
    std::set<std::string> in_a, in_b;
    for (const T& x : a) in_a.insert(key(x));
    for (const T& x : b) in_b.insert(key(x));
    for (const std::string& k : in_a)
        if (!in_b.count(k)) out.push_back({kind, Difference::Side::OnlyInA, k, ""});
    for (const std::string& k : in_b)
        if (!in_a.count(k)) out.push_back({kind, Difference::Side::OnlyInB, k, ""});
}

template <typename T, typename KeyFn>
void order_diff(const std::vector<T>& a, const std::vector<T>& b, KeyFn key,
                const char* what, std::vector<Difference>& out) {
    std::set<std::string> in_a, in_b;
    for (const T& x : a) in_a.insert(key(x));
    for (const T& x : b) in_b.insert(key(x));
    std::vector<std::string> seq_a, seq_b;
    for (const T& x : a)
        if (in_b.count(key(x))) seq_a.push_back(key(x));
    for (const T& x : b)
        if (in_a.count(key(x))) seq_b.push_back(key(x));
    if (seq_a != seq_b)
        out.push_back({Difference::Kind::Ordering, Difference::Side::Mismatch, what,
                       "declaration order differs"});
}

} // namespace

std::vector<Difference> diff(const Ontology& a, const Ontology& b) {
    std::vector<Difference> out;
    using Side = Difference::Side;
    using Kind = Difference::Kind;

    if (a.header_iri != b.header_iri)
        out.push_back({Kind::Header, Side::Mismatch, a.header_iri.str(),
                       "header is " + b.header_iri.str() + " in b"});
    if (a.annotations != b.annotations)
        out.push_back({Kind::Annotation, Side::Mismatch, "ontology",
                       "header annotations differ"});

    key_set_diff(a.prefixes(), b.prefixes(),
                 [](const auto& p) { return p.first; }, Kind::Prefix, out);
    for (const auto& [prefix, uri] : a.prefixes()) {
        auto other = b.prefix_uri(prefix);
        if (other && *other != uri)
            out.push_back({Kind::Prefix, Side::Mismatch, prefix,
                           uri + " vs " + *other});
    }
    order_diff(a.prefixes(), b.prefixes(), [](const auto& p) { return p.first; },
               "prefixes", out);

    auto class_key = [](const OntoClass& c) { return c.iri.str(); };
    key_set_diff(a.classes(), b.classes(), class_key, Kind::Class, out);
    order_diff(a.classes(), b.classes(), class_key, "classes", out);
    for (const OntoClass& ca : a.classes()) {
        const OntoClass* cb = b.find_class(ca.iri);
        if (!cb) continue;
        std::set<std::string> edges_a, edges_b;
        for (const Iri& s : ca.superclasses) edges_a.insert(s.str());
        for (const Iri& s : cb->superclasses) edges_b.insert(s.str());
        for (const std::string& e : edges_a)
            if (!edges_b.count(e))
                out.push_back({Kind::SubclassEdge, Side::OnlyInA,
                               ca.iri.str() + " -> " + e, ""});
        for (const std::string& e : edges_b)
            if (!edges_a.count(e))
                out.push_back({Kind::SubclassEdge, Side::OnlyInB,
                               ca.iri.str() + " -> " + e, ""});
        if (edges_a == edges_b && ca.superclasses != cb->superclasses)
            out.push_back({Kind::Class, Side::Mismatch, ca.iri.str(),
                           "superclass order differs"});
        if (ca.annotations != cb->annotations)
            out.push_back({Kind::Class, Side::Mismatch, ca.iri.str(),
                           "annotations differ"});
    }

    auto prop_kind = [](const PropertyDecl& p) {
        return p.kind == PropertyKind::Object ? Kind::ObjectProperty : Kind::DataProperty;
    };
    auto prop_key = [](const PropertyDecl& p) { return p.iri.str(); };
    {
        std::set<std::string> in_b;
        for (const PropertyDecl& p : b.properties()) in_b.insert(prop_key(p));
        for (const PropertyDecl& p : a.properties())
            if (!in_b.count(prop_key(p)))
                out.push_back({prop_kind(p), Side::OnlyInA, prop_key(p), ""});
        std::set<std::string> in_a;
        for (const PropertyDecl& p : a.properties()) in_a.insert(prop_key(p));
        for (const PropertyDecl& p : b.properties())
            if (!in_a.count(prop_key(p)))
                out.push_back({prop_kind(p), Side::OnlyInB, prop_key(p), ""});
    }
    order_diff(a.properties(), b.properties(), prop_key, "properties", out);
    for (const PropertyDecl& pa : a.properties()) {
        const PropertyDecl* pb = b.find_property(pa.iri);
        if (!pb || pa == *pb) continue;
        std::string detail = pa.kind != pb->kind ? "property kind differs" : "range differs";
        out.push_back({prop_kind(pa), Side::Mismatch, pa.iri.str(), detail});
    }

    {
        std::map<std::string, int> counts;
        for (const Restriction& r : a.restrictions()) counts[render_restriction(r)]++;
        for (const Restriction& r : b.restrictions()) counts[render_restriction(r)]--;
        for (const auto& [tuple, n] : counts) {
            for (int i = 0; i < n; ++i)
                out.push_back({Kind::Restriction, Side::OnlyInA, tuple, ""});
            for (int i = 0; i < -n; ++i)
                out.push_back({Kind::Restriction, Side::OnlyInB, tuple, ""});
        }
        bool multiset_equal =
            std::all_of(counts.begin(), counts.end(),
                        [](const auto& kv) { return kv.second == 0; });
        if (multiset_equal && a.restrictions() != b.restrictions())
            out.push_back({Kind::Ordering, Side::Mismatch, "restrictions",
                           "declaration order differs"});
    }

    auto ind_key = [](const NamedIndividual& i) { return i.iri.str(); };
    key_set_diff(a.individuals(), b.individuals(), ind_key, Kind::Individual, out);
    order_diff(a.individuals(), b.individuals(), ind_key, "individuals", out);
    for (const NamedIndividual& ia : a.individuals()) {
        const NamedIndividual* ib = b.find_individual(ia.iri);
        if (!ib || ia == *ib) continue;
        std::string detail;
        if (ia.types != ib->types) detail = "types differ";
        else if (ia.data_assertions != ib->data_assertions) detail = "data assertions differ";
        else if (ia.object_assertions != ib->object_assertions)
            detail = "object assertions differ";
        else detail = "text content differs";
        out.push_back({Kind::Individual, Side::Mismatch, ia.iri.str(), detail});
    }

    if (out.empty() && !(a == b))
        out.push_back({Kind::Ordering, Side::Mismatch, "ontology",
                       "ontologies differ in ordering"});
    return out;
}

} // namespace bpmont::onto
