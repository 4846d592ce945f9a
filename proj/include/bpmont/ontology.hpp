#pragma once

#include "bpmont/error.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bpmont::onto {

/// Compact IRI: a declared namespace prefix plus a local name,
/// rendered as "prefix:local".
struct Iri {
    std::string prefix;
    std::string local;

    std::string str() const { return prefix + ":" + local; }
    bool operator==(const Iri&) const = default;
    auto operator<=>(const Iri&) const = default;
};

/// Parses "prefix:local"; throws on a missing colon or empty local part.
Iri parse_iri(std::string_view text);

enum class Datatype { String, Integer, Boolean, Idref, AnyType };

std::string_view datatype_name(Datatype t);                  // xsd curie, e.g. "xsd:string"
std::optional<Datatype> datatype_from_name(std::string_view name);

/// Lexical validity of a literal under a datatype (no value-space semantics).
bool literal_matches(Datatype t, std::string_view literal);

struct OntoClass {
    Iri iri;
    std::vector<Iri> superclasses;  // empty = directly under owl:Thing
    std::vector<std::pair<std::string, std::string>> annotations;  // (curie key, text)

    bool operator==(const OntoClass&) const = default;
};

enum class PropertyKind { Object, Data };

struct PropertyDecl {
    Iri iri;
    PropertyKind kind = PropertyKind::Data;
    std::optional<Datatype> data_range;  // data properties
    std::optional<Iri> object_range;     // object properties, optional

    bool operator==(const PropertyDecl&) const = default;
};

struct Cardinality {
    enum class Kind { Exact, Min, Max, Range };
    Kind kind = Kind::Exact;
    int lo = 0;  // Exact/Min/Range lower bound; unused for Max
    int hi = 0;  // Max/Range upper bound; unused otherwise

    static Cardinality exact(int n) { return {Kind::Exact, n, n}; }
    static Cardinality at_least(int n) { return {Kind::Min, n, 0}; }
    static Cardinality at_most(int n) { return {Kind::Max, 0, n}; }
    static Cardinality between(int lo, int hi) { return {Kind::Range, lo, hi}; }

    /// True when a count of `n` occurrences satisfies this cardinality.
    bool admits(int n) const;
    std::string str() const;

    bool operator==(const Cardinality&) const = default;
};

/// A cardinality restriction on one property of one class. Exactly one of
/// on_class (child-element kind) and on_data_range (attribute kind) may be
/// present; a restriction with neither is attribute kind without a datatype.
struct Restriction {
    Iri subject_class;
    Iri on_property;
    Cardinality cardinality;
    std::optional<Iri> on_class;
    std::optional<Datatype> on_data_range;

    bool is_child_kind() const { return on_class.has_value(); }
    bool operator==(const Restriction&) const = default;
};

struct DataAssertion {
    Iri property;
    std::string value;
    Datatype datatype = Datatype::String;

    bool operator==(const DataAssertion&) const = default;
};

struct ObjectAssertion {
    Iri property;
    Iri target;

    bool operator==(const ObjectAssertion&) const = default;
};

struct NamedIndividual {
    Iri iri;
    std::vector<Iri> types;  // non-empty
    std::vector<DataAssertion> data_assertions;
    std::vector<ObjectAssertion> object_assertions;
    std::optional<std::string> text_content;

    bool operator==(const NamedIndividual&) const = default;
};

/// The root class; never stored in an ontology's class collection.
const Iri& owl_thing();

/// An OWL-style ontology: classes, properties, cardinality restrictions and
/// named individuals, all keyed by compact IRI, with declaration order
/// preserved everywhere (serialization is order-sensitive).
///
/// Build by mutation, then call validate(); treat as immutable afterwards.
class Ontology {
public:
    Iri header_iri{"onto", "unnamed"};
    std::vector<std::pair<std::string, std::string>> annotations;

    /// Declares prefix -> namespace URI. Built-in prefixes (rdf, rdfs, owl,
    /// xsd) are implicit and may not be redeclared to a different URI.
    void declare_prefix(const std::string& prefix, const std::string& uri);
    const std::vector<std::pair<std::string, std::string>>& prefixes() const { return prefixes_; }
    std::optional<std::string> prefix_uri(std::string_view prefix) const;

    /// Throws DuplicateIri or CycleIntroduced. Superclass references may be
    /// forward (declared later); validate() reports unresolved leftovers.
    void add_class(OntoClass cls);
    void add_property(PropertyDecl prop);
    void add_restriction(Restriction r);
    void add_individual(NamedIndividual ind);

    const OntoClass* find_class(const Iri& iri) const;
    const PropertyDecl* find_property(const Iri& iri) const;
    const NamedIndividual* find_individual(const Iri& iri) const;

    const std::vector<OntoClass>& classes() const { return classes_; }
    const std::vector<PropertyDecl>& properties() const { return properties_; }
    const std::vector<Restriction>& restrictions() const { return restrictions_; }
    const std::vector<NamedIndividual>& individuals() const { return individuals_; }

    NamedIndividual* mutable_individual(const Iri& iri);
    OntoClass* mutable_class(const Iri& iri);

    /// Every distinct transitive superclass, breadth-first with declaration
    /// order as tie-break, excluding the class itself, owl:Thing last.
    std::vector<Iri> superclass_closure(const Iri& cls) const;

    /// Own restrictions first, then inherited ones in closure order.
    /// Duplicates (same property, cardinality and target) are dropped.
    std::vector<Restriction> effective_restrictions(const Iri& cls) const;

    /// Full referential-closure check; throws UnresolvedSuperclass,
    /// UnresolvedReference or InvariantViolation with an element path.
    void validate() const;

    bool operator==(const Ontology&) const = default;

private:
    std::vector<std::pair<std::string, std::string>> prefixes_;
    std::vector<OntoClass> classes_;
    std::vector<PropertyDecl> properties_;
    std::vector<Restriction> restrictions_;
    std::vector<NamedIndividual> individuals_;
    std::unordered_map<std::string, size_t> class_index_;
    std::unordered_map<std::string, size_t> property_index_;
    std::unordered_map<std::string, size_t> individual_index_;

    bool reaches(const Iri& from, const Iri& target) const;
};

/// Canonical file form. Part order: RDF wrapper opening (vocabulary and
/// namespace declarations), ontology header tag, object properties, data
/// properties, restriction blocks, named individuals, class declarations,
/// closing wrapper. Byte-identical output for equal ontologies.
std::string serialize(const Ontology& ont);

/// Inverse of serialize. Throws MalformedXml, UnresolvedReference or
/// InvariantViolation (with a path).
Ontology parse(std::string_view bytes);

struct Difference {
    enum class Kind {
        Class, ObjectProperty, DataProperty, SubclassEdge,
        Restriction, Individual, Header, Annotation, Prefix, Ordering
    };
    enum class Side { OnlyInA, OnlyInB, Mismatch };

    Kind kind;
    Side side;
    std::string subject;  // rendered IRI or tuple
    std::string detail;

    bool operator==(const Difference&) const = default;
};

std::string_view difference_kind_name(Difference::Kind k);
std::string_view difference_side_name(Difference::Side s);

/// Structural diff; empty result iff a == b (and iff the serialized forms
/// are byte-equal).
std::vector<Difference> diff(const Ontology& a, const Ontology& b);

} // namespace bpmont::onto
