#include "bpmont/reference.hpp"

#include <sstream>

namespace bpmont::ref {

const std::vector<NamespaceBinding>& conformance_namespaces() {
    static const std::vector<NamespaceBinding> table = {
        {"bpmn2", "http://www.omg.org/spec/BPMN/20100524/MODEL"},
        {"bpmndi", "http://www.omg.org/spec/BPMN/20100524/DI"},
    };
    return table;
}

const std::string& model_ns() { return conformance_namespaces()[0].uri; }
const std::string& di_ns() { return conformance_namespaces()[1].uri; }

std::string conformance_prefix(std::string_view uri) {
    for (const NamespaceBinding& b : conformance_namespaces())
        if (b.uri == uri) return b.prefix;
    return "";
}

TranslationTable TranslationTable::parse(std::string_view text) {
    TranslationTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream fields(line);
        TranslationRow row;
        if (!(fields >> row.scope)) continue;  // blank line
        std::string extra;
        if (!(fields >> row.serialized >> row.standard) || (fields >> extra))
            throw Error("MalformedTable",
                        "line " + std::to_string(lineno) +
                            ": expected 'scope serialized standard'");
        table.rows_.push_back(std::move(row));
    }
    return table;
}

std::string TranslationTable::translate(std::string_view parent_class,
                                        std::string_view serialized) const {
    for (const TranslationRow& row : rows_)
        if (row.scope == parent_class && row.serialized == serialized)
            return row.standard;
    for (const TranslationRow& row : rows_)
        if (row.scope == "*" && row.serialized == serialized) return row.standard;
    return std::string(serialized);
}

void TranslationTable::merge_front(const TranslationTable& other) {
    rows_.insert(rows_.begin(), other.rows_.begin(), other.rows_.end());
}

const TranslationTable& TranslationTable::defaults() {
    static const TranslationTable table = parse(R"(# serialized name -> reference class
# scope '*' applies everywhere; otherwise the parent element's class
* definitions Definitions
* collaboration Collaboration
* participant Participant
* participantMultiplicity ParticipantMultiplicity
* process Process
* laneSet LaneSet
* lane Lane
* flowNodeRef FlowNodeRef
* startEvent StartEvent
* endEvent EndEvent
* task Task
* sendTask SendTask
* receiveTask ReceiveTask
* userTask UserTask
* exclusiveGateway ExclusiveGateway
* eventBasedGateway EventBasedGateway
* intermediateThrowEvent IntermediateThrowEvent
* intermediateCatchEvent IntermediateCatchEvent
* messageEventDefinition MessageEventDefinition
* sequenceFlow SequenceFlow
* messageFlow MessageFlow
* message Message
* dataObject DataObject
* dataStore DataStore
* itemDefinition ItemDefinition
* extensionElements ExtensionDefinition
* documentation Documentation
* incoming Incoming
* outgoing Outgoing
* category Category
* partnerEntity PartnerEntity
* partnerRole PartnerRole
* endPoint EndPoint
* interface Interface
# reference-holding children of participant serialize with a Ref suffix
Participant endPointRef EndPoint
Participant interfaceRef Interface
Participant partnerEntityRef PartnerEntity
Participant partnerRoleRef PartnerRole
Lane childLaneSet LaneSet
)");
    return table;
}

namespace {

using onto::Cardinality;
using onto::Datatype;
using onto::Iri;
using onto::OntoClass;
using onto::Ontology;
using onto::PropertyDecl;
using onto::PropertyKind;
using onto::Restriction;

Iri model(const char* local) { return Iri{"bpmn2", local}; }
Iri di(const char* local) { return Iri{"bpmndi", local}; }

void cls(Ontology& o, const Iri& iri, std::vector<Iri> supers = {}) {
    OntoClass c;
    c.iri = iri;
    c.superclasses = std::move(supers);
    o.add_class(std::move(c));
}

void object_prop(Ontology& o, const Iri& iri, std::optional<Iri> range = {}) {
    PropertyDecl p;
    p.iri = iri;
    p.kind = PropertyKind::Object;
    p.object_range = std::move(range);
    o.add_property(std::move(p));
}

void data_prop(Ontology& o, const Iri& iri, Datatype dt) {
    PropertyDecl p;
    p.iri = iri;
    p.kind = PropertyKind::Data;
    p.data_range = dt;
    o.add_property(std::move(p));
}

// attribute-kind restriction: met by an XML attribute, never carries onClass
void attr_rule(Ontology& o, const Iri& subject, const Iri& prop, Cardinality card,
               std::optional<Datatype> range = {}) {
    o.add_restriction({subject, prop, card, std::nullopt, range});
}

// child-kind restriction: met by child elements of the linked class
void child_rule(Ontology& o, const Iri& subject, const Iri& prop, Cardinality card,
                const Iri& target) {
    o.add_restriction({subject, prop, card, target, std::nullopt});
}

} // namespace

onto::Ontology build_reference() {
    Ontology o;
    o.header_iri = model("ReferenceOntology");
    for (const NamespaceBinding& b : conformance_namespaces())
        o.declare_prefix(b.prefix, b.uri);
    o.annotations.emplace_back("rdfs:comment",
                               "Reference ontology for BPMN 2.0 collaboration models");

    // --- classes ---
    cls(o, model("BaseElement"));
    cls(o, model("RootElement"), {model("BaseElement")});
    cls(o, model("Definitions"), {model("BaseElement")});
    cls(o, model("Documentation"), {model("BaseElement")});
    cls(o, model("ExtensionDefinition"), {model("BaseElement")});
    cls(o, model("Collaboration"), {model("RootElement")});
    cls(o, model("Process"), {model("RootElement")});
    cls(o, model("Message"), {model("RootElement")});
    cls(o, model("ItemDefinition"), {model("RootElement")});
    cls(o, model("Category"), {model("RootElement")});
    cls(o, model("EndPoint"), {model("RootElement")});
    cls(o, model("Interface"), {model("RootElement")});
    cls(o, model("PartnerEntity"), {model("RootElement")});
    cls(o, model("PartnerRole"), {model("RootElement")});
    cls(o, model("DataStore"), {model("RootElement")});
    cls(o, model("Participant"), {model("BaseElement")});
    cls(o, model("ParticipantMultiplicity"), {model("BaseElement")});
    cls(o, model("LaneSet"), {model("BaseElement")});
    cls(o, model("Lane"), {model("BaseElement")});
    cls(o, model("FlowNodeRef"), {model("BaseElement")});
    cls(o, model("FlowNode"), {model("BaseElement")});
    cls(o, model("Task"), {model("FlowNode")});
    cls(o, model("SendTask"), {model("Task")});
    cls(o, model("ReceiveTask"), {model("Task")});
    cls(o, model("UserTask"), {model("Task")});
    cls(o, model("StartEvent"), {model("FlowNode")});
    cls(o, model("EndEvent"), {model("FlowNode")});
    cls(o, model("IntermediateThrowEvent"), {model("FlowNode")});
    cls(o, model("IntermediateCatchEvent"), {model("FlowNode")});
    cls(o, model("ExclusiveGateway"), {model("FlowNode")});
    cls(o, model("EventBasedGateway"), {model("FlowNode")});
    cls(o, model("MessageEventDefinition"), {model("BaseElement")});
    cls(o, model("SequenceFlow"), {model("BaseElement")});
    cls(o, model("MessageFlow"), {model("BaseElement")});
    cls(o, model("DataObject"), {model("BaseElement")});
    cls(o, model("Incoming"), {model("BaseElement")});
    cls(o, model("Outgoing"), {model("BaseElement")});
    cls(o, di("BPMNDiagram"), {model("BaseElement")});
    cls(o, di("BPMNPlane"), {model("BaseElement")});
    cls(o, di("BPMNShape"), {model("BaseElement")});
    cls(o, di("BPMNEdge"), {model("BaseElement")});
    cls(o, di("BPMNLabel"), {model("BaseElement")});

    // --- object properties (reference-holding children) ---
    object_prop(o, model("processRef"), model("Process"));
    object_prop(o, model("endPointRef"), model("EndPoint"));
    object_prop(o, model("interfaceRef"), model("Interface"));
    object_prop(o, model("participantMultiplicity"), model("ParticipantMultiplicity"));
    object_prop(o, model("partnerEntityRef"), model("PartnerEntity"));
    object_prop(o, model("partnerRoleRef"), model("PartnerRole"));
    object_prop(o, model("participant"), model("Participant"));
    object_prop(o, model("messageFlow"), model("MessageFlow"));
    object_prop(o, model("laneSet"), model("LaneSet"));
    object_prop(o, model("childLaneSet"), model("LaneSet"));
    object_prop(o, model("lane"), model("Lane"));
    object_prop(o, model("flowNodeRef"), model("FlowNodeRef"));
    object_prop(o, model("incoming"), model("Incoming"));
    object_prop(o, model("outgoing"), model("Outgoing"));
    object_prop(o, model("messageEventDefinition"), model("MessageEventDefinition"));

    // --- data properties (attributes) ---
    data_prop(o, model("id"), Datatype::String);
    data_prop(o, model("name"), Datatype::String);
    data_prop(o, model("targetNamespace"), Datatype::String);
    data_prop(o, model("exporter"), Datatype::String);
    data_prop(o, model("exporterVersion"), Datatype::String);
    data_prop(o, model("expressionLanguage"), Datatype::String);
    data_prop(o, model("typeLanguage"), Datatype::String);
    data_prop(o, model("isExecutable"), Datatype::Boolean);
    data_prop(o, model("isClosed"), Datatype::Boolean);
    data_prop(o, model("sourceRef"), Datatype::Idref);
    data_prop(o, model("targetRef"), Datatype::Idref);
    data_prop(o, model("messageRef"), Datatype::Idref);
    data_prop(o, model("default"), Datatype::Idref);
    data_prop(o, model("capacity"), Datatype::Integer);
    data_prop(o, model("isUnlimited"), Datatype::Boolean);
    data_prop(o, model("minimum"), Datatype::Integer);
    data_prop(o, model("maximum"), Datatype::Integer);
    data_prop(o, model("structureRef"), Datatype::String);
    data_prop(o, model("isCollection"), Datatype::Boolean);
    data_prop(o, di("id"), Datatype::String);
    data_prop(o, di("name"), Datatype::String);
    data_prop(o, di("bpmnElement"), Datatype::Idref);
    data_prop(o, di("isHorizontal"), Datatype::Boolean);

    // --- restrictions ---
    attr_rule(o, model("BaseElement"), model("id"), Cardinality::at_most(1),
              Datatype::String);

    attr_rule(o, model("Definitions"), model("targetNamespace"),
              Cardinality::at_least(1), Datatype::String);
    attr_rule(o, model("Definitions"), model("name"), Cardinality::at_most(1),
              Datatype::String);
    attr_rule(o, model("Definitions"), model("exporter"), Cardinality::at_most(1),
              Datatype::String);
    attr_rule(o, model("Definitions"), model("exporterVersion"),
              Cardinality::at_most(1), Datatype::String);

    attr_rule(o, model("Collaboration"), model("name"), Cardinality::at_least(1),
              Datatype::String);
    attr_rule(o, model("Collaboration"), model("isClosed"), Cardinality::at_most(1),
              Datatype::Boolean);
    child_rule(o, model("Collaboration"), model("participant"),
               Cardinality::at_least(1), model("Participant"));
    child_rule(o, model("Collaboration"), model("messageFlow"),
               Cardinality::at_least(0), model("MessageFlow"));

    attr_rule(o, model("Participant"), model("name"), Cardinality::at_most(1),
              Datatype::String);
    child_rule(o, model("Participant"), model("endPointRef"),
               Cardinality::at_least(0), model("EndPoint"));
    child_rule(o, model("Participant"), model("interfaceRef"),
               Cardinality::at_least(0), model("Interface"));
    child_rule(o, model("Participant"), model("participantMultiplicity"),
               Cardinality::at_most(1), model("ParticipantMultiplicity"));
    attr_rule(o, model("Participant"), model("processRef"), Cardinality::at_most(1));
    child_rule(o, model("Participant"), model("partnerEntityRef"),
               Cardinality::at_least(0), model("PartnerEntity"));
    child_rule(o, model("Participant"), model("partnerRoleRef"),
               Cardinality::at_least(0), model("PartnerRole"));

    attr_rule(o, model("ParticipantMultiplicity"), model("minimum"),
              Cardinality::at_most(1), Datatype::Integer);
    attr_rule(o, model("ParticipantMultiplicity"), model("maximum"),
              Cardinality::at_most(1), Datatype::Integer);

    attr_rule(o, model("Process"), model("name"), Cardinality::at_most(1),
              Datatype::String);
    attr_rule(o, model("Process"), model("isExecutable"), Cardinality::at_most(1),
              Datatype::Boolean);
    child_rule(o, model("Process"), model("laneSet"), Cardinality::at_least(0),
               model("LaneSet"));

    attr_rule(o, model("LaneSet"), model("name"), Cardinality::at_most(1),
              Datatype::String);
    child_rule(o, model("LaneSet"), model("lane"), Cardinality::at_least(1),
               model("Lane"));

    attr_rule(o, model("Lane"), model("name"), Cardinality::at_most(1),
              Datatype::String);
    child_rule(o, model("Lane"), model("flowNodeRef"), Cardinality::at_least(0),
               model("FlowNodeRef"));
    child_rule(o, model("Lane"), model("childLaneSet"), Cardinality::at_most(1),
               model("LaneSet"));

    attr_rule(o, model("FlowNode"), model("name"), Cardinality::at_most(1),
              Datatype::String);
    child_rule(o, model("FlowNode"), model("incoming"), Cardinality::at_least(0),
               model("Incoming"));
    child_rule(o, model("FlowNode"), model("outgoing"), Cardinality::at_least(0),
               model("Outgoing"));

    child_rule(o, model("StartEvent"), model("messageEventDefinition"),
               Cardinality::at_most(1), model("MessageEventDefinition"));
    child_rule(o, model("EndEvent"), model("messageEventDefinition"),
               Cardinality::at_most(1), model("MessageEventDefinition"));
    child_rule(o, model("IntermediateThrowEvent"), model("messageEventDefinition"),
               Cardinality::at_most(1), model("MessageEventDefinition"));
    child_rule(o, model("IntermediateCatchEvent"), model("messageEventDefinition"),
               Cardinality::at_most(1), model("MessageEventDefinition"));

    attr_rule(o, model("MessageEventDefinition"), model("messageRef"),
              Cardinality::at_most(1), Datatype::Idref);

    attr_rule(o, model("SendTask"), model("messageRef"), Cardinality::at_most(1),
              Datatype::Idref);
    attr_rule(o, model("ReceiveTask"), model("messageRef"), Cardinality::at_most(1),
              Datatype::Idref);

    attr_rule(o, model("ExclusiveGateway"), model("default"), Cardinality::at_most(1),
              Datatype::Idref);

    attr_rule(o, model("SequenceFlow"), model("sourceRef"), Cardinality::exact(1),
              Datatype::Idref);
    attr_rule(o, model("SequenceFlow"), model("targetRef"), Cardinality::exact(1),
              Datatype::Idref);
    attr_rule(o, model("SequenceFlow"), model("name"), Cardinality::at_most(1),
              Datatype::String);

    attr_rule(o, model("MessageFlow"), model("name"), Cardinality::at_least(1),
              Datatype::String);
    attr_rule(o, model("MessageFlow"), model("sourceRef"), Cardinality::exact(1),
              Datatype::Idref);
    attr_rule(o, model("MessageFlow"), model("targetRef"), Cardinality::exact(1),
              Datatype::Idref);
    attr_rule(o, model("MessageFlow"), model("messageRef"), Cardinality::at_most(1),
              Datatype::Idref);

    attr_rule(o, model("Message"), model("name"), Cardinality::at_least(1),
              Datatype::String);
    attr_rule(o, model("Category"), model("name"), Cardinality::at_least(1),
              Datatype::String);

    attr_rule(o, model("DataObject"), model("name"), Cardinality::at_most(1),
              Datatype::String);

    attr_rule(o, model("DataStore"), model("name"), Cardinality::at_least(1),
              Datatype::String);
    attr_rule(o, model("DataStore"), model("capacity"), Cardinality::at_most(1),
              Datatype::Integer);
    attr_rule(o, model("DataStore"), model("isUnlimited"), Cardinality::at_most(1),
              Datatype::Boolean);

    attr_rule(o, model("ItemDefinition"), model("structureRef"),
              Cardinality::at_most(1), Datatype::String);
    attr_rule(o, model("ItemDefinition"), model("isCollection"),
              Cardinality::at_most(1), Datatype::Boolean);

    attr_rule(o, di("BPMNDiagram"), di("name"), Cardinality::at_most(1),
              Datatype::String);
    attr_rule(o, di("BPMNPlane"), di("bpmnElement"), Cardinality::at_most(1),
              Datatype::Idref);
    attr_rule(o, di("BPMNShape"), di("bpmnElement"), Cardinality::exact(1),
              Datatype::Idref);
    attr_rule(o, di("BPMNShape"), di("isHorizontal"), Cardinality::at_most(1),
              Datatype::Boolean);
    attr_rule(o, di("BPMNEdge"), di("bpmnElement"), Cardinality::exact(1),
              Datatype::Idref);

    o.validate();
    return o;
}

onto::Ontology merge_extension(onto::Ontology base, const onto::Ontology& extension) {
    for (const auto& [prefix, uri] : extension.prefixes())
        base.declare_prefix(prefix, uri);
    for (const onto::OntoClass& c : extension.classes()) base.add_class(c);
    for (const onto::PropertyDecl& p : extension.properties()) base.add_property(p);
    for (const onto::Restriction& r : extension.restrictions()) base.add_restriction(r);
    for (const onto::NamedIndividual& i : extension.individuals()) base.add_individual(i);
    base.validate();
    return base;
}

} // namespace bpmont::ref
