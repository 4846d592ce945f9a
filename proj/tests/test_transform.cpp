#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bpmont/bpmn.hpp"
#include "bpmont/error.hpp"
#include "bpmont/reference.hpp"
#include "bpmont/transform.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace bpmont;
using namespace bpmont::transform;

static std::string code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

static const char* kCollab =
    "<bpmn2:definitions xmlns:bpmn2=\"http://www.omg.org/spec/BPMN/20100524/MODEL\" "
    "xmlns:acme=\"urn:acme:flow\" id=\"d1\" targetNamespace=\"urn:models\">\n"
    "  <bpmn2:collaboration id=\"c1\" name=\"Deal\">\n"
    "    <bpmn2:participant id=\"pa1\" name=\"Buyer\" processRef=\"p1\"/>\n"
    "    <bpmn2:participant id=\"pa2\" name=\"Seller\" processRef=\"p2\"/>\n"
    "    <bpmn2:messageFlow id=\"mf1\" name=\"order\" sourceRef=\"t1\" targetRef=\"t2\"/>\n"
    "  </bpmn2:collaboration>\n"
    "  <bpmn2:process id=\"p1\" isExecutable=\"true\">\n"
    "    <bpmn2:sendTask id=\"t1\" name=\"Send order\" acme:color=\"red\">\n"
    "      <bpmn2:documentation>first leg</bpmn2:documentation>\n"
    "    </bpmn2:sendTask>\n"
    "  </bpmn2:process>\n"
    "  <bpmn2:process id=\"p2\" isExecutable=\"true\">\n"
    "    <bpmn2:receiveTask id=\"t2\" name=\"Take order\"/>\n"
    "  </bpmn2:process>\n"
    "</bpmn2:definitions>\n";

static std::string via_ontology(const bpmn::Document& d) {
    return bpmn::serialize_bpmn(owl_to_bpmn(bpmn_to_owl(d)));
}

TEST_CASE("a document survives the trip through its model ontology") {
    bpmn::Document d = bpmn::parse_bpmn(kCollab);
    CHECK(via_ontology(d) == bpmn::serialize_bpmn(bpmn::canonicalize(d)));
}

TEST_CASE("the model mirrors tags as classes and nesting as subclassing") {
    bpmn::Document d = bpmn::parse_bpmn(kCollab);
    onto::Ontology m = bpmn_to_owl(d);

    CHECK(m.prefix_uri("mo") == metadata_ns());
    // single sorted URI table: urn:acme:flow < .../MODEL is false, check both
    REQUIRE(m.prefix_uri("ns0"));
    REQUIRE(m.prefix_uri("ns1"));

    std::string model = "http://www.omg.org/spec/BPMN/20100524/MODEL";
    std::string bp = (*m.prefix_uri("ns0") == model) ? "ns0" : "ns1";
    const onto::OntoClass* defs = m.find_class({bp, "definitions"});
    REQUIRE(defs);
    REQUIRE(defs->superclasses.size() == 1);
    CHECK(defs->superclasses[0] == onto::Iri{"mo", "document"});

    const onto::OntoClass* task = m.find_class({bp, "sendTask"});
    REQUIRE(task);
    REQUIRE(task->superclasses.size() == 1);
    CHECK(task->superclasses[0] == onto::Iri{bp, "process"});

    // the second participant element gets the second counter
    const onto::NamedIndividual* pa2 = m.find_individual({bp, "participant_2"});
    REQUIRE(pa2);
    CHECK(pa2->types == std::vector<onto::Iri>{{bp, "participant"}});

    // documentation text is kept on the individual
    const onto::NamedIndividual* doc = m.find_individual({bp, "documentation_1"});
    REQUIRE(doc);
    CHECK(doc->text_content == "first leg");
}

TEST_CASE("attributes resolve to object assertions only by consensus") {
    bpmn::Document d = bpmn::parse_bpmn(kCollab);
    onto::Ontology m = bpmn_to_owl(d);
    std::string model = "http://www.omg.org/spec/BPMN/20100524/MODEL";
    std::string bp = (*m.prefix_uri("ns0") == model) ? "ns0" : "ns1";

    // every processRef and sourceRef/targetRef value is an element id here
    CHECK(m.find_property({bp, "processRef"})->kind == onto::PropertyKind::Object);
    CHECK(m.find_property({bp, "sourceRef"})->kind == onto::PropertyKind::Object);
    // id values point at their own element, but id stays a data property
    CHECK(m.find_property({bp, "id"})->kind == onto::PropertyKind::Data);
    CHECK(m.find_property({bp, "name"})->kind == onto::PropertyKind::Data);

    const onto::NamedIndividual* pa1 = m.find_individual({bp, "participant_1"});
    REQUIRE(pa1);
    bool linked = false;
    for (const auto& oa : pa1->object_assertions)
        if (oa.property == onto::Iri{bp, "processRef"} &&
            oa.target == onto::Iri{bp, "process_1"})
            linked = true;
    CHECK(linked);

    // one unresolvable value anywhere demotes the property to data
    bpmn::Document d2 = bpmn::parse_bpmn(
        "<a:r xmlns:a=\"urn:x\" id=\"r\"><a:c id=\"c\" ref=\"r\"/>"
        "<a:c id=\"c2\" ref=\"nowhere\"/></a:r>");
    onto::Ontology m2 = bpmn_to_owl(d2);
    CHECK(m2.find_property({"ns0", "ref"})->kind == onto::PropertyKind::Data);
    CHECK(via_ontology(d2) == bpmn::serialize_bpmn(bpmn::canonicalize(d2)));
}

TEST_CASE("derived cardinalities are exact counts from the first example") {
    bpmn::Document d = bpmn::parse_bpmn(kCollab);
    onto::Ontology m = bpmn_to_owl(d);
    std::string model = "http://www.omg.org/spec/BPMN/20100524/MODEL";
    std::string bp = (*m.prefix_uri("ns0") == model) ? "ns0" : "ns1";

    for (const onto::Restriction& r : m.restrictions())
        CHECK(r.cardinality.kind == onto::Cardinality::Kind::Exact);

    // collaboration_1 has two participant children and one messageFlow,
    // all through mo:child, so the class asks for exactly 3
    int child_count = -1;
    for (const onto::Restriction& r : m.restrictions())
        if (r.subject_class == onto::Iri{bp, "collaboration"} &&
            r.on_property == onto::Iri{"mo", "child"})
            child_count = r.cardinality.lo;
    CHECK(child_count == 3);

    // sendTask_1 carries the vendor attribute, and it defines the class
    bool vendor_rule = false;
    for (const onto::Restriction& r : m.restrictions())
        if (r.subject_class == onto::Iri{bp, "sendTask"} &&
            r.on_property.local == "color")
            vendor_rule = true;
    CHECK(vendor_rule);
}

TEST_CASE("vendor extension subtrees ride along unchanged") {
    const char* ext =
        "<bpmn2:definitions xmlns:bpmn2=\"http://www.omg.org/spec/BPMN/20100524/MODEL\" "
        "xmlns:acme=\"urn:acme:flow\" id=\"d\" targetNamespace=\"urn:m\">"
        "<bpmn2:process id=\"p\"><bpmn2:task id=\"t\" name=\"Work\">"
        "<bpmn2:extensionElements>"
        "<acme:settings retry=\"3\"><acme:note>keep this</acme:note></acme:settings>"
        "</bpmn2:extensionElements>"
        "</bpmn2:task></bpmn2:process></bpmn2:definitions>";
    bpmn::Document d = bpmn::parse_bpmn(ext);
    CHECK(via_ontology(d) == bpmn::serialize_bpmn(bpmn::canonicalize(d)));

    onto::Ontology m = bpmn_to_owl(d);
    std::string acme = "urn:acme:flow";
    std::string ap = (*m.prefix_uri("ns0") == acme) ? "ns0" : "ns1";
    CHECK(m.find_class({ap, "settings"}));
    const onto::NamedIndividual* note = m.find_individual({ap, "note_1"});
    REQUIRE(note);
    CHECK(note->text_content == "keep this");
}

TEST_CASE("elements without any namespace are rejected") {
    bpmn::Document d;
    d.root.tag = "definitions";  // no default namespace declared
    CHECK(code_of([&] { bpmn_to_owl(d); }) == "MissingNamespace");
}

TEST_CASE("model ontologies serialize and parse back unchanged") {
    bpmn::Document d = bpmn::parse_bpmn(kCollab);
    onto::Ontology m = bpmn_to_owl(d);
    CHECK(onto::parse(onto::serialize(m)) == m);
}

namespace {

struct DocGen {
    std::mt19937 rng;
    int next_id = 0;
    std::vector<std::string> ids;

    explicit DocGen(unsigned seed) : rng(seed) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    bpmn::Element element(int depth) {
        static const char* locals[] = {"alpha", "beta", "gamma"};
        bpmn::Element e;
        std::string local = locals[pick(3)];
        e.tag = pick(2) ? "g:" + local : local;

        if (pick(3)) {  // most elements carry an id
            std::string id = "e" + std::to_string(next_id++);
            e.attributes.push_back({"id", id});
            ids.push_back(id);
        }
        if (pick(2)) e.attributes.push_back({"k", "v" + std::to_string(pick(9))});
        if (!ids.empty() && pick(2))
            e.attributes.push_back({"ref", pick(4) ? ids[pick((int)ids.size())]
                                                   : "dangling"});
        if (pick(2)) e.attributes.push_back({"g:extra", "x"});

        int kids = depth < 3 ? pick(4) : 0;
        if (kids == 0 && pick(3) == 0) {
            e.text = "text " + std::to_string(pick(100));
        } else {
            for (int i = 0; i < kids; ++i) e.children.push_back(element(depth + 1));
        }
        return e;
    }

    bpmn::Document document() {
        bpmn::Document d;
        d.namespaces = {{"", "urn:gen:base"}, {"g", "urn:gen:other"}};
        d.root = element(0);
        if (!d.root.attr("id")) {
            d.root.attributes.insert(d.root.attributes.begin(), {"id", "root"});
            ids.push_back("root");
        }
        return d;
    }
};

} // namespace

TEST_CASE("random documents all take the same round trip") {
    for (unsigned seed = 1; seed <= 30; ++seed) {
        DocGen gen(seed);
        bpmn::Document d = gen.document();
        CAPTURE(seed);
        onto::Ontology m = bpmn_to_owl(d);
        CHECK(bpmn::serialize_bpmn(owl_to_bpmn(m)) ==
              bpmn::serialize_bpmn(bpmn::canonicalize(d)));
        CHECK(onto::parse(onto::serialize(m)) == m);
        for (const onto::Restriction& r : m.restrictions())
            CHECK(r.cardinality.kind == onto::Cardinality::Kind::Exact);
    }
}

TEST_CASE("reconstruction refuses ontologies with broken provenance") {
    bpmn::Document d = bpmn::parse_bpmn(kCollab);
    std::string model = "http://www.omg.org/spec/BPMN/20100524/MODEL";

    SUBCASE("an individual without attribute order metadata") {
        onto::Ontology m = bpmn_to_owl(d);
        std::string bp = (*m.prefix_uri("ns0") == model) ? "ns0" : "ns1";
        onto::NamedIndividual* ind = m.mutable_individual({bp, "participant_1"});
        REQUIRE(ind);
        std::erase_if(ind->data_assertions, [](const onto::DataAssertion& da) {
            return da.property == onto::Iri{"mo", "attrOrder"};
        });
        CHECK(code_of([&] { owl_to_bpmn(m); }) == "MissingProvenance");
    }

    SUBCASE("an assertion the attribute order does not cover") {
        onto::Ontology m = bpmn_to_owl(d);
        std::string bp = (*m.prefix_uri("ns0") == model) ? "ns0" : "ns1";
        onto::NamedIndividual* ind = m.mutable_individual({bp, "participant_1"});
        REQUIRE(ind);
        ind->data_assertions.push_back({{bp, "name"}, "ghost", onto::Datatype::String});
        CHECK(code_of([&] { owl_to_bpmn(m); }) == "MissingProvenance");
    }

    SUBCASE("a second root individual") {
        onto::Ontology m = bpmn_to_owl(d);
        std::string bp = (*m.prefix_uri("ns0") == model) ? "ns0" : "ns1";
        onto::NamedIndividual extra;
        extra.iri = {bp, "stray_1"};
        extra.types = {{bp, "participant"}};
        extra.data_assertions.push_back(
            {{"mo", "attrOrder"}, "", onto::Datatype::String});
        m.add_individual(std::move(extra));
        CHECK(code_of([&] { owl_to_bpmn(m); }) == "MissingProvenance");
    }

    SUBCASE("a child edge that loops") {
        onto::Ontology m = bpmn_to_owl(d);
        std::string bp = (*m.prefix_uri("ns0") == model) ? "ns0" : "ns1";
        onto::NamedIndividual* ind = m.mutable_individual({bp, "receiveTask_1"});
        REQUIRE(ind);
        ind->object_assertions.push_back({{"mo", "child"}, ind->iri});
        CHECK(code_of([&] { owl_to_bpmn(m); }) == "MissingProvenance");
    }

    SUBCASE("an ontology that never came from a document") {
        onto::Ontology plain;
        plain.header_iri = {"ex", "o"};
        plain.declare_prefix("ex", "urn:ex#");
        CHECK(code_of([&] { owl_to_bpmn(plain); }) == "MissingProvenance");
    }
}

TEST_CASE("a standard document compares clean against the reference") {
    const char* clean =
        "<bpmn2:definitions xmlns:bpmn2=\"http://www.omg.org/spec/BPMN/20100524/MODEL\" "
        "id=\"d1\" name=\"deal\" targetNamespace=\"urn:models\">"
        "<bpmn2:collaboration id=\"c1\" name=\"Deal\">"
        "<bpmn2:participant id=\"pa1\" name=\"Buyer\" processRef=\"p1\"/>"
        "<bpmn2:messageFlow id=\"mf1\" name=\"order\" sourceRef=\"s1\" targetRef=\"p1\"/>"
        "</bpmn2:collaboration>"
        "<bpmn2:process id=\"p1\" isExecutable=\"true\">"
        "<bpmn2:startEvent id=\"s1\" name=\"go\"/>"
        "<bpmn2:task id=\"t1\" name=\"Work\"/>"
        "<bpmn2:sequenceFlow id=\"f1\" sourceRef=\"s1\" targetRef=\"t1\"/>"
        "</bpmn2:process></bpmn2:definitions>";
    onto::Ontology m = bpmn_to_owl(bpmn::parse_bpmn(clean));
    std::vector<ComparisonEntry> entries =
        compare_to_reference(m, ref::build_reference());
    for (const ComparisonEntry& e : entries) {
        CAPTURE(e.subject);
        CAPTURE(e.detail);
    }
    CHECK(entries.empty());
}

TEST_CASE("unknown vocabulary in the conformance namespace is reported") {
    const char* odd =
        "<bpmn2:definitions xmlns:bpmn2=\"http://www.omg.org/spec/BPMN/20100524/MODEL\" "
        "id=\"d1\" targetNamespace=\"urn:models\">"
        "<bpmn2:process id=\"p1\">"
        "<bpmn2:scriptTask id=\"st1\" name=\"hack\"/>"
        "<bpmn2:task id=\"t1\" bpmn2:priority=\"high\"/>"
        "</bpmn2:process></bpmn2:definitions>";
    onto::Ontology m = bpmn_to_owl(bpmn::parse_bpmn(odd));
    std::vector<ComparisonEntry> entries =
        compare_to_reference(m, ref::build_reference());

    bool unknown_class = false, unknown_property = false;
    for (const ComparisonEntry& e : entries) {
        if (e.kind == ComparisonEntry::Kind::UnknownClass &&
            e.subject.find("scriptTask") != std::string::npos)
            unknown_class = true;
        if (e.kind == ComparisonEntry::Kind::UnknownProperty &&
            e.subject.find("priority") != std::string::npos)
            unknown_property = true;
    }
    CHECK(unknown_class);
    CHECK(unknown_property);
    CHECK(entries.size() == 2);
}

TEST_CASE("observed cardinalities outside the reference bounds are reported") {
    onto::Ontology m;
    m.header_iri = {"ns0", "model"};
    m.declare_prefix("ns0", "http://www.omg.org/spec/BPMN/20100524/MODEL");
    onto::OntoClass cls;
    cls.iri = {"ns0", "messageFlow"};
    m.add_class(std::move(cls));
    onto::PropertyDecl name;
    name.iri = {"ns0", "name"};
    name.kind = onto::PropertyKind::Data;
    name.data_range = onto::Datatype::String;
    m.add_property(std::move(name));
    m.add_restriction({{"ns0", "messageFlow"},
                       {"ns0", "name"},
                       onto::Cardinality::exact(0),
                       std::nullopt,
                       onto::Datatype::String});
    m.validate();

    std::vector<ComparisonEntry> entries =
        compare_to_reference(m, ref::build_reference());
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].kind == ComparisonEntry::Kind::CardinalityConflict);
    CHECK(entries[0].subject == "ns0:messageFlow/ns0:name");
    CHECK(entries[0].detail.find("exactly 0") != std::string::npos);
    CHECK(comparison_kind_name(entries[0].kind) == "cardinality-conflict");
}
