#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bpmont/error.hpp"
#include "bpmont/ontology.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <string>

using namespace bpmont;
using namespace bpmont::onto;

static std::string code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

static Iri iri(const std::string& local, const std::string& prefix = "ex") {
    return Iri{prefix, local};
}

static Ontology fresh() {
    Ontology o;
    o.header_iri = iri("o");
    o.declare_prefix("ex", "urn:example#");
    return o;
}

static OntoClass cls(const std::string& local, std::vector<std::string> supers = {}) {
    OntoClass c;
    c.iri = iri(local);
    for (const auto& s : supers) c.superclasses.push_back(iri(s));
    return c;
}

static PropertyDecl data_prop(const std::string& local, Datatype dt = Datatype::String) {
    PropertyDecl p;
    p.iri = iri(local);
    p.kind = PropertyKind::Data;
    p.data_range = dt;
    return p;
}

static PropertyDecl object_prop(const std::string& local,
                                std::optional<std::string> range = {}) {
    PropertyDecl p;
    p.iri = iri(local);
    p.kind = PropertyKind::Object;
    if (range) p.object_range = iri(*range);
    return p;
}

// A small but representative ontology touching every serialized part.
static Ontology sample() {
    Ontology o;
    o.header_iri = iri("sample");
    o.declare_prefix("ex", "urn:example#");
    o.annotations.emplace_back("rdfs:comment", "sample ontology");
    o.add_class(cls("Base"));
    o.add_class(cls("Thing1", {"Base"}));
    o.add_class(cls("Thing2", {"Base"}));
    o.add_property(object_prop("holds", std::string("Thing2")));
    o.add_property(data_prop("label"));
    o.add_property(data_prop("count", Datatype::Integer));
    o.add_restriction({iri("Thing1"), iri("label"),
                       Cardinality::at_most(1), std::nullopt, Datatype::String});
    o.add_restriction({iri("Thing1"), iri("holds"),
                       Cardinality::at_least(0), iri("Thing2"), std::nullopt});
    o.add_restriction({iri("Base"), iri("count"),
                       Cardinality::exact(1), std::nullopt, std::nullopt});
    NamedIndividual a;
    a.iri = iri("a1");
    a.types = {iri("Thing1")};
    a.data_assertions = {{iri("label"), "first", Datatype::String},
                         {iri("count"), "3", Datatype::Integer}};
    NamedIndividual b;
    b.iri = iri("b1");
    b.types = {iri("Thing2"), iri("Base")};
    b.text_content = "payload";
    o.add_individual(std::move(a));
    o.mutable_individual(iri("a1"))->object_assertions.push_back(
        {iri("holds"), iri("b1")});
    o.add_individual(std::move(b));
    return o;
}

TEST_CASE("serialize and parse invert each other") {
    Ontology o = sample();
    std::string bytes = serialize(o);
    Ontology back = parse(bytes);
    CHECK(back == o);
    CHECK(diff(o, back).empty());
    CHECK(serialize(back) == bytes);
}

TEST_CASE("serialized parts appear in the documented order") {
    std::string bytes = serialize(sample());
    size_t header = bytes.find("<owl:Ontology");
    size_t obj = bytes.find("<owl:ObjectProperty");
    size_t data = bytes.find("<owl:DatatypeProperty");
    size_t restriction = bytes.find("<owl:Restriction");
    size_t individual = bytes.find("<owl:NamedIndividual");
    size_t classes = bytes.rfind("<owl:Class");
    REQUIRE(header != std::string::npos);
    CHECK(header < obj);
    CHECK(obj < data);
    CHECK(data < restriction);
    CHECK(restriction < individual);
    CHECK(individual < classes);
    CHECK(bytes.find("xmlns:rdf=") < bytes.find("xmlns:ex="));
}

TEST_CASE("duplicate declarations are rejected") {
    Ontology o = sample();
    CHECK(code_of([&] { o.add_class(cls("Base")); }) == "DuplicateIri");
    CHECK(code_of([&] { o.add_property(data_prop("label")); }) == "DuplicateIri");
    NamedIndividual dup;
    dup.iri = iri("a1");
    dup.types = {iri("Base")};
    CHECK(code_of([&] { o.add_individual(dup); }) == "DuplicateIri");
}

TEST_CASE("cycles are rejected at the add that would close them") {
    Ontology o = fresh();
    o.add_class(cls("X", {"Y"}));  // forward reference is fine
    CHECK(code_of([&] { o.add_class(cls("Y", {"X"})); }) == "CycleIntroduced");
    CHECK(code_of([&] { o.add_class(cls("Z", {"Z"})); }) == "CycleIntroduced");
    o.add_class(cls("Y"));  // still addable after the failed attempt
    o.validate();
}

TEST_CASE("validate reports unresolved names") {
    {
        Ontology o = fresh();
        o.add_class(cls("X", {"Missing"}));
        CHECK(code_of([&] { o.validate(); }) == "UnresolvedSuperclass");
        CHECK(code_of([&] { serialize(o); }) == "UnresolvedSuperclass");
    }
    {
        Ontology o = fresh();
        o.add_class(cls("X"));
        o.add_restriction({iri("X"), iri("nosuch"), Cardinality::exact(1),
                           std::nullopt, std::nullopt});
        CHECK(code_of([&] { o.validate(); }) == "UnresolvedReference");
    }
    {
        Ontology o = fresh();
        o.add_class(cls("X"));
        NamedIndividual i;
        i.iri = iri("i1");
        i.types = {iri("Nope")};
        o.add_individual(std::move(i));
        CHECK(code_of([&] { o.validate(); }) == "UnresolvedReference");
    }
    {
        Ontology o = sample();
        o.mutable_individual(iri("a1"))->object_assertions.push_back(
            {iri("holds"), iri("ghost")});
        CHECK(code_of([&] { o.validate(); }) == "UnresolvedReference");
    }
}

TEST_CASE("structural invariants are enforced") {
    Ontology o = sample();
    CHECK(code_of([&] {
              o.add_restriction({iri("Base"), iri("label"), Cardinality::exact(1),
                                 iri("Thing1"), Datatype::String});
          }) == "InvariantViolation");
    CHECK(code_of([&] {
              PropertyDecl p;
              p.iri = iri("broken");
              p.kind = PropertyKind::Data;
              o.add_property(p);
          }) == "InvariantViolation");
    CHECK(code_of([&] {
              o.add_restriction({iri("Base"), iri("label"),
                                 Cardinality::between(3, 1), std::nullopt, std::nullopt});
          }) == "InvariantViolation");

    // literal must match the asserted datatype
    Ontology bad = sample();
    bad.mutable_individual(iri("a1"))->data_assertions.push_back(
        {iri("count"), "many", Datatype::Integer});
    CHECK(code_of([&] { bad.validate(); }) == "InvariantViolation");

    // data assertion through an object property
    Ontology bad2 = sample();
    bad2.mutable_individual(iri("a1"))->data_assertions.push_back(
        {iri("holds"), "x", Datatype::String});
    CHECK(code_of([&] { bad2.validate(); }) == "InvariantViolation");

    CHECK(code_of([&] { o.declare_prefix("ex", "urn:other#"); }) == "PrefixConflict");
    CHECK(code_of([&] { o.declare_prefix("owl", "urn:other#"); }) == "PrefixConflict");
}

TEST_CASE("superclass closure is breadth-first with owl:Thing last") {
    Ontology o = fresh();
    o.add_class(cls("A"));
    o.add_class(cls("B", {"A"}));
    o.add_class(cls("C", {"A"}));
    o.add_class(cls("D", {"B", "C"}));

    auto closure = o.superclass_closure(iri("D"));
    REQUIRE(closure.size() == 4);
    CHECK(closure[0] == iri("B"));
    CHECK(closure[1] == iri("C"));
    CHECK(closure[2] == iri("A"));
    CHECK(closure[3] == owl_thing());

    CHECK(o.superclass_closure(iri("A")) == std::vector<Iri>{owl_thing()});
    CHECK(o.superclass_closure(owl_thing()).empty());
    CHECK(code_of([&] { o.superclass_closure(iri("Nope")); }) == "UnknownClass");
}

// Oracle: reachability computed independently by fixed-point set expansion.
TEST_CASE("closure matches a brute-force reachability oracle on random DAGs") {
    std::mt19937 rng(20240817);
    for (int round = 0; round < 25; ++round) {
        const int n = 12;
        Ontology o = fresh();
        std::vector<std::vector<int>> supers(n);
        for (int i = 0; i < n; ++i) {
            OntoClass c;
            c.iri = iri("C" + std::to_string(i));
            if (i > 0) {
                std::uniform_int_distribution<int> count(0, 3);
                std::uniform_int_distribution<int> pick(0, i - 1);
                int k = std::min(count(rng), i);
                std::set<int> chosen;
                while ((int)chosen.size() < k) chosen.insert(pick(rng));
                for (int s : chosen) {
                    supers[i].push_back(s);
                    c.superclasses.push_back(iri("C" + std::to_string(s)));
                }
            }
            o.add_class(std::move(c));
        }
        // fixed-point expansion over the edge list
        for (int i = 0; i < n; ++i) {
            std::set<int> reach(supers[i].begin(), supers[i].end());
            bool grew = true;
            while (grew) {
                grew = false;
                for (int r : std::set<int>(reach))
                    for (int s : supers[r])
                        if (reach.insert(s).second) grew = true;
            }
            auto closure = o.superclass_closure(iri("C" + std::to_string(i)));
            REQUIRE(!closure.empty());
            CHECK(closure.back() == owl_thing());
            std::set<std::string> got;
            for (size_t k = 0; k + 1 < closure.size(); ++k) {
                CHECK(got.insert(closure[k].str()).second);  // no duplicates
            }
            std::set<std::string> expect;
            for (int r : reach) expect.insert("ex:C" + std::to_string(r));
            CHECK(got == expect);
        }
    }
}

TEST_CASE("effective restrictions inherit and deduplicate across a diamond") {
    Ontology o = fresh();
    o.add_class(cls("A"));
    o.add_class(cls("B", {"A"}));
    o.add_class(cls("C", {"A"}));
    o.add_class(cls("D", {"B", "C"}));
    o.add_property(data_prop("p"));
    o.add_property(data_prop("q", Datatype::Integer));

    // same shape on both parents: must come back once
    o.add_restriction({iri("B"), iri("p"), Cardinality::exact(1),
                       std::nullopt, Datatype::String});
    o.add_restriction({iri("C"), iri("p"), Cardinality::exact(1),
                       std::nullopt, Datatype::String});
    o.add_restriction({iri("A"), iri("q"), Cardinality::at_most(1),
                       std::nullopt, std::nullopt});
    o.add_restriction({iri("D"), iri("q"), Cardinality::exact(2),
                       std::nullopt, std::nullopt});

    auto eff = o.effective_restrictions(iri("D"));
    REQUIRE(eff.size() == 3);
    CHECK(eff[0].subject_class == iri("D"));  // own restriction first
    CHECK(eff[0].cardinality == Cardinality::exact(2));
    CHECK(eff[1].subject_class == iri("B"));  // first carrier in closure order
    CHECK(eff[1].on_property == iri("p"));
    CHECK(eff[2].subject_class == iri("A"));
    CHECK(eff[2].cardinality == Cardinality::at_most(1));

    CHECK(o.effective_restrictions(iri("A")).size() == 1);
}

TEST_CASE("cardinality satisfaction") {
    CHECK(Cardinality::exact(1).admits(1));
    CHECK(!Cardinality::exact(1).admits(0));
    CHECK(Cardinality::at_least(1).admits(5));
    CHECK(!Cardinality::at_least(1).admits(0));
    CHECK(Cardinality::at_most(1).admits(0));
    CHECK(!Cardinality::at_most(1).admits(2));
    CHECK(Cardinality::between(1, 3).admits(2));
    CHECK(!Cardinality::between(1, 3).admits(4));
}

TEST_CASE("diff is empty exactly when serialized bytes are equal") {
    Ontology a = sample();
    Ontology b = sample();
    CHECK(diff(a, b).empty());
    CHECK(serialize(a) == serialize(b));

    auto expect_differs = [&](const std::function<void(Ontology&)>& mutate,
                              Difference::Kind kind) {
        Ontology m = sample();
        mutate(m);
        auto ds = diff(a, m);
        REQUIRE(!ds.empty());
        bool found = false;
        for (const auto& d : ds) found = found || d.kind == kind;
        CHECK(found);
        CHECK(serialize(a) != serialize(m));
        CHECK(diff(m, m).empty());
    };

    expect_differs([](Ontology& m) { m.header_iri = iri("other"); },
                   Difference::Kind::Header);
    expect_differs([](Ontology& m) { m.annotations.clear(); },
                   Difference::Kind::Annotation);
    expect_differs([](Ontology& m) { m.declare_prefix("zz", "urn:zz#"); },
                   Difference::Kind::Prefix);
    expect_differs([](Ontology& m) { m.add_class(cls("Extra")); },
                   Difference::Kind::Class);
    expect_differs([](Ontology& m) { m.mutable_class(iri("Thing2"))->superclasses.clear(); },
                   Difference::Kind::SubclassEdge);
    expect_differs([](Ontology& m) { m.add_property(data_prop("extra")); },
                   Difference::Kind::DataProperty);
    expect_differs([](Ontology& m) { m.add_property(object_prop("extra")); },
                   Difference::Kind::ObjectProperty);
    expect_differs(
        [](Ontology& m) {
            m.add_restriction({iri("Base"), iri("label"), Cardinality::exact(2),
                               std::nullopt, std::nullopt});
        },
        Difference::Kind::Restriction);
    expect_differs(
        [](Ontology& m) {
            m.mutable_individual(iri("b1"))->text_content = "changed";
        },
        Difference::Kind::Individual);
}

TEST_CASE("diff reports pure reordering") {
    Ontology a = fresh(), b = fresh();
    a.add_class(cls("X"));
    a.add_class(cls("Y"));
    b.add_class(cls("Y"));
    b.add_class(cls("X"));
    auto ds = diff(a, b);
    REQUIRE(!ds.empty());
    CHECK(ds[0].kind == Difference::Kind::Ordering);
    CHECK(serialize(a) != serialize(b));
}

TEST_CASE("parse enforces the part order") {
    std::string bytes =
        "<rdf:RDF xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\" "
        "xmlns:rdfs=\"http://www.w3.org/2000/01/rdf-schema#\" "
        "xmlns:owl=\"http://www.w3.org/2002/07/owl#\" "
        "xmlns:xsd=\"http://www.w3.org/2001/XMLSchema#\" "
        "xmlns:ex=\"urn:example#\">"
        "<owl:Ontology rdf:about=\"ex:o\"/>"
        "<owl:Class rdf:about=\"ex:X\"/>"
        "<owl:ObjectProperty rdf:about=\"ex:p\"/>"
        "</rdf:RDF>";
    CHECK(code_of([&] { parse(bytes); }) == "InvariantViolation");

    std::string headerless =
        "<rdf:RDF xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\">"
        "<owl:Class rdf:about=\"rdf:X\"/>"
        "</rdf:RDF>";
    CHECK(code_of([&] { parse(headerless); }) == "InvariantViolation");
}

TEST_CASE("parse validates referential closure") {
    std::string bytes =
        "<rdf:RDF xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\" "
        "xmlns:owl=\"http://www.w3.org/2002/07/owl#\" "
        "xmlns:rdfs=\"http://www.w3.org/2000/01/rdf-schema#\" "
        "xmlns:ex=\"urn:example#\">"
        "<owl:Ontology rdf:about=\"ex:o\"/>"
        "<owl:NamedIndividual rdf:about=\"ex:i\">"
        "<rdf:type rdf:resource=\"ex:Ghost\"/>"
        "</owl:NamedIndividual>"
        "</rdf:RDF>";
    CHECK(code_of([&] { parse(bytes); }) == "UnresolvedReference");
}

TEST_CASE("owl:Thing may be written as an explicit superclass") {
    Ontology o = fresh();
    OntoClass c;
    c.iri = iri("X");
    c.superclasses.push_back(owl_thing());
    o.add_class(std::move(c));
    o.validate();
    Ontology back = parse(serialize(o));
    CHECK(back == o);
    CHECK(back.superclass_closure(iri("X")) == std::vector<Iri>{owl_thing()});
}
