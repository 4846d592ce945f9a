#include "bpmont/sbpm.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace bpmont::sbpm {

using onto::Datatype;
using onto::Iri;
using onto::NamedIndividual;
using onto::Ontology;
using onto::PropertyDecl;
using onto::PropertyKind;

std::string_view state_kind_name(StateKind k) {
    switch (k) {
    case StateKind::Function: return "function";
    case StateKind::Send: return "send";
    case StateKind::Receive: return "receive";
    }
    return "";
}

const Subject* ProcessModel::find_subject(std::string_view name) const {
    for (const Subject& s : subjects)
        if (s.name == name) return &s;
    return nullptr;
}

const Message* ProcessModel::find_message(std::string_view name) const {
    for (const Message& m : messages)
        if (m.name == name) return &m;
    return nullptr;
}

const std::string& sbpm_prefix() {
    static const std::string p = "sbpm";
    return p;
}

const std::string& sbpm_ns() {
    static const std::string u = "urn:sbpm:reference#";
    return u;
}

void validate_model(const ProcessModel& m) {
    auto fail = [](const std::string& msg) { throw Error("InvariantViolation", msg); };
    if (m.subjects.empty()) fail("process model has no subjects");

    std::set<std::string> message_names;
    for (const Message& msg : m.messages) {
        if (msg.name.empty()) fail("message without a name");
        if (!message_names.insert(msg.name).second)
            fail("duplicate message " + msg.name);
    }

    std::set<std::string> subject_names;
    for (const Subject& s : m.subjects) {
        if (s.name.empty()) fail("subject without a name");
        if (!subject_names.insert(s.name).second)
            fail("duplicate subject " + s.name);
    }

    for (const Subject& s : m.subjects) {
        if (s.external) {
            if (!s.states.empty())
                fail("external subject " + s.name + " must not have a behavior");
            continue;
        }
        if (s.states.empty()) fail("subject " + s.name + " has no states");

        std::set<std::string> ids;
        int starts = 0;
        for (const State& st : s.states) {
            if (st.id.empty()) fail("state without an id in subject " + s.name);
            if (!ids.insert(st.id).second)
                fail("duplicate state " + st.id + " in subject " + s.name);
            if (st.start) ++starts;
        }
        if (starts != 1)
            fail("subject " + s.name + " needs exactly one start state, has " +
                 std::to_string(starts));

        for (const State& st : s.states) {
            std::string where = s.name + "/" + st.id;
            if (st.transitions.empty() && st.kind != StateKind::Function)
                fail("end state " + where + " must be a function state");
            std::set<std::string> alternatives;
            for (const Transition& t : st.transitions) {
                if (!ids.count(t.to))
                    fail("transition from " + where + " targets unknown state " +
                         t.to);
                if (st.kind == StateKind::Function) {
                    if (!t.message.empty() || !t.counterpart.empty())
                        fail("function state " + where +
                             " must not carry a message");
                    continue;
                }
                if (t.message.empty())
                    fail(std::string(state_kind_name(st.kind)) + " state " + where +
                         " needs a message on every transition");
                if (!message_names.count(t.message))
                    fail("state " + where + " uses unknown message " + t.message);
                if (t.counterpart.empty() || !subject_names.count(t.counterpart))
                    fail("state " + where + " has no valid counterpart subject");
                if (st.kind == StateKind::Receive &&
                    !alternatives.insert(t.message + "\n" + t.counterpart).second)
                    fail("receive state " + where + " repeats the alternative " +
                         t.message + " from " + t.counterpart);
            }
        }
    }
}

namespace {

const std::string* attr(const bpmn::Element& e, const char* name) {
    return e.attr(name);
}

std::string attr_or(const bpmn::Element& e, const char* name,
                    const std::string& fallback) {
    const std::string* v = e.attr(name);
    return v ? *v : fallback;
}

std::string id_of(const bpmn::Element& e) {
    return attr_or(e, "id", e.local());
}

bool has_message_definition(const bpmn::Element& e) {
    for (const bpmn::Element& c : e.children)
        if (c.local() == "messageEventDefinition") return true;
    return false;
}

void reject_foreign_event_definitions(const bpmn::Element& e,
                                      const std::string& path) {
    for (const bpmn::Element& c : e.children) {
        std::string local = c.local();
        if (local.size() > 15 &&
            local.compare(local.size() - 15, 15, "EventDefinition") == 0 &&
            local != "messageEventDefinition")
            throw Error("UnsupportedElement",
                        c.tag + " at " + path + " has no subject oriented mapping");
    }
}

struct SequenceEdge {
    std::string id;
    std::string name;
    std::string source;
    std::string target;
};

struct MessageEdge {
    std::string name;
    std::string source;
    std::string target;
    std::string payload;
};

struct Builder {
    const bpmn::Document& doc;
    ProcessModel model;
    std::map<std::string, std::string> owner;  // participant/node id -> subject
    std::vector<MessageEdge> message_edges;

    std::string subject_of(const std::string& endpoint,
                           const std::string& what) const {
        auto it = owner.find(endpoint);
        if (it == owner.end())
            throw Error("UnresolvedReference",
                        what + " endpoint " + endpoint +
                            " is not owned by any participant");
        return it->second;
    }

    // The single message edge leaving (sending=true) or entering a node.
    const MessageEdge& edge_at(const std::string& node, bool sending,
                               const std::string& path) const {
        const MessageEdge* found = nullptr;
        for (const MessageEdge& e : message_edges) {
            if ((sending ? e.source : e.target) != node) continue;
            if (found)
                throw Error("UnsupportedElement",
                            "element at " + path +
                                " touches more than one message flow");
            found = &e;
        }
        if (!found)
            throw Error("UnresolvedReference",
                        "element at " + path + " has no message flow attached");
        return *found;
    }
};

// One process being rewritten into a behavior.
struct FlowGraph {
    std::string pid;
    std::map<std::string, const bpmn::Element*> nodes;
    std::vector<SequenceEdge> edges;
    std::map<std::string, std::vector<const SequenceEdge*>> out;
    std::set<std::string> absorbed;  // catch elements folded into a gateway

    std::string path_of(const std::string& node) const { return pid + "/" + node; }

    const bpmn::Element& node(const std::string& id) const {
        auto it = nodes.find(id);
        if (it == nodes.end())
            throw Error("UnresolvedReference",
                        "sequence flow endpoint " + id + " in process " + pid +
                            " does not exist");
        return *it->second;
    }

    const std::vector<const SequenceEdge*>& outgoing(const std::string& id) const {
        static const std::vector<const SequenceEdge*> none;
        auto it = out.find(id);
        return it == out.end() ? none : it->second;
    }

    // Skips through merge gateways (exclusive, single outgoing edge).
    std::string resolve(std::string id) const {
        for (size_t guard = 0; guard <= edges.size(); ++guard) {
            const bpmn::Element& e = node(id);
            if (e.local() == "exclusiveGateway" && outgoing(id).size() == 1) {
                id = outgoing(id)[0]->target;
                continue;
            }
            return id;
        }
        throw Error("InvariantViolation",
                    "gateways in process " + pid + " form a cycle");
    }

    bool is_split(const std::string& id) const {
        return node(id).local() == "exclusiveGateway" && outgoing(id).size() > 1;
    }
};

const std::set<std::string>& supported_nodes() {
    static const std::set<std::string> s{
        "startEvent",          "endEvent",
        "task",                "userTask",
        "sendTask",            "receiveTask",
        "intermediateThrowEvent", "intermediateCatchEvent",
        "exclusiveGateway",    "eventBasedGateway",
    };
    return s;
}

FlowGraph index_process(const bpmn::Element& proc) {
    FlowGraph g;
    g.pid = id_of(proc);
    for (const bpmn::Element& c : proc.children) {
        std::string local = c.local();
        if (local == "sequenceFlow") {
            g.edges.push_back({id_of(c), attr_or(c, "name", ""),
                               attr_or(c, "sourceRef", ""),
                               attr_or(c, "targetRef", "")});
            continue;
        }
        if (local == "documentation" || local == "dataObject" ||
            local == "extensionElements")
            continue;
        if (!supported_nodes().count(local))
            throw Error("UnsupportedElement",
                        c.tag + " at " + g.path_of(id_of(c)) +
                            " has no subject oriented mapping");
        g.nodes.emplace(id_of(c), &c);
    }
    for (const SequenceEdge& e : g.edges) {
        g.node(e.source);
        g.node(e.target);
        g.out[e.source].push_back(&e);
    }
    // successors of an event-based gateway are absorbed into it
    for (const auto& [id, elem] : g.nodes) {
        if (elem->local() != "eventBasedGateway") continue;
        if (g.outgoing(id).empty())
            throw Error("UnsupportedElement",
                        "eventBasedGateway at " + g.path_of(id) +
                            " has no outgoing flow");
        for (const SequenceEdge* e : g.outgoing(id)) {
            const bpmn::Element& t = g.node(e->target);
            bool catching = (t.local() == "intermediateCatchEvent" &&
                             has_message_definition(t)) ||
                            t.local() == "receiveTask";
            if (!catching)
                throw Error("UnsupportedElement",
                            t.tag + " at " + g.path_of(e->target) +
                                " cannot follow an event-based gateway");
            g.absorbed.insert(e->target);
        }
    }
    return g;
}

// Where a sequence edge lands after merge gateways, checked to be a state.
std::string state_target(const FlowGraph& g, const std::string& raw,
                         const std::set<std::string>& stateful) {
    std::string id = g.resolve(raw);
    if (g.is_split(id))
        throw Error("UnsupportedElement",
                    "chained decision gateway at " + g.path_of(id));
    if (!stateful.count(id))
        throw Error("UnsupportedElement",
                    g.node(id).tag + " at " + g.path_of(id) +
                        " cannot be a transition target");
    return id;
}

std::vector<State> build_behavior(const bpmn::Element& proc,
                                  const Builder& b) {
    FlowGraph g = index_process(proc);

    // which nodes become states
    std::set<std::string> stateful;
    for (const auto& [id, elem] : g.nodes) {
        if (g.absorbed.count(id)) continue;
        std::string local = elem->local();
        std::string path = g.path_of(id);
        if (local == "task" || local == "userTask" || local == "sendTask" ||
            local == "receiveTask" || local == "endEvent" ||
            local == "eventBasedGateway") {
            stateful.insert(id);
        } else if (local == "intermediateThrowEvent" ||
                   local == "intermediateCatchEvent") {
            reject_foreign_event_definitions(*elem, path);
            if (!has_message_definition(*elem))
                throw Error("UnsupportedElement",
                            elem->tag + " at " + path +
                                " needs a message event definition");
            stateful.insert(id);
        } else if (local == "startEvent") {
            reject_foreign_event_definitions(*elem, path);
            if (has_message_definition(*elem)) stateful.insert(id);
        }
    }

    std::vector<State> states;
    for (const bpmn::Element& c : proc.children) {  // document order
        std::string id = id_of(c);
        if (!stateful.count(id) || c.local() == "sequenceFlow") continue;
        std::string local = c.local();
        std::string path = g.path_of(id);

        State st;
        st.id = id;
        st.task = attr_or(c, "name", "");
        if (local == "task" || local == "userTask" || local == "endEvent") {
            st.kind = StateKind::Function;
        } else if (local == "sendTask" || local == "intermediateThrowEvent") {
            st.kind = StateKind::Send;
        } else {
            st.kind = StateKind::Receive;  // receiveTask, catch, EBG, msg start
        }
        if (local == "startEvent") st.start = true;

        if (local == "endEvent") {
            reject_foreign_event_definitions(c, path);
            if (has_message_definition(c))
                throw Error("UnsupportedElement",
                            c.tag + " at " + path +
                                " must end without sending; use a send task");
            if (!g.outgoing(id).empty())
                throw Error("UnsupportedElement",
                            "endEvent at " + path + " has an outgoing flow");
            states.push_back(std::move(st));
            continue;
        }

        if (local == "eventBasedGateway") {
            for (const SequenceEdge* e : g.outgoing(id)) {
                const std::string& catch_id = e->target;
                const MessageEdge& msg =
                    b.edge_at(catch_id, false, g.path_of(catch_id));
                const auto& onward = g.outgoing(catch_id);
                if (onward.size() != 1)
                    throw Error("UnsupportedElement",
                                "element at " + g.path_of(catch_id) +
                                    " needs exactly one outgoing flow");
                Transition t;
                t.to = state_target(g, onward[0]->target, stateful);
                t.label = onward[0]->name;
                t.message = msg.name;
                t.counterpart = b.subject_of(msg.source, "message flow");
                st.transitions.push_back(std::move(t));
            }
            states.push_back(std::move(st));
            continue;
        }

        // plain states: expand decision gateways behind function states
        const auto& out = g.outgoing(id);
        if (st.kind == StateKind::Receive && out.size() > 1)
            throw Error("UnsupportedElement",
                        "receive state at " + path +
                            " must have a single outgoing flow");
        for (const SequenceEdge* e : out) {
            std::string tgt = g.resolve(e->target);
            if (g.is_split(tgt)) {
                if (st.kind != StateKind::Function)
                    throw Error("UnsupportedElement",
                                "decision gateway at " + g.path_of(tgt) +
                                    " must follow a function state");
                for (const SequenceEdge* branch : g.outgoing(tgt)) {
                    Transition t;
                    t.to = state_target(g, branch->target, stateful);
                    t.label = branch->name;
                    st.transitions.push_back(std::move(t));
                }
            } else {
                Transition t;
                t.to = state_target(g, e->target, stateful);
                t.label = e->name;
                st.transitions.push_back(std::move(t));
            }
        }
        if (st.kind != StateKind::Function) {
            const MessageEdge& msg =
                b.edge_at(id, st.kind == StateKind::Send, path);
            for (Transition& t : st.transitions) {
                t.message = msg.name;
                t.counterpart = b.subject_of(
                    st.kind == StateKind::Send ? msg.target : msg.source,
                    "message flow");
            }
        }
        states.push_back(std::move(st));
    }

    // plain start events mark their successor state
    for (const auto& [id, elem] : g.nodes) {
        if (elem->local() != "startEvent" || has_message_definition(*elem))
            continue;
        const auto& out = g.outgoing(id);
        if (out.size() != 1)
            throw Error("UnsupportedElement",
                        "startEvent at " + g.path_of(id) +
                            " needs exactly one outgoing flow");
        std::string first = g.resolve(out[0]->target);
        if (g.is_split(first))
            throw Error("UnsupportedElement",
                        "decision gateway at " + g.path_of(first) +
                            " cannot follow a start event");
        bool marked = false;
        for (State& st : states)
            if (st.id == first) {
                st.start = true;
                marked = true;
            }
        if (!marked)
            throw Error("UnsupportedElement",
                        "startEvent at " + g.path_of(id) +
                            " does not lead to a state");
    }

    return states;
}

} // namespace

ProcessModel transform_collaboration(const bpmn::Document& doc) {
    Builder b{doc};

    const bpmn::Element* collab = nullptr;
    std::map<std::string, const bpmn::Element*> processes;
    std::map<std::string, const bpmn::Element*> bpmn_messages;
    for (const bpmn::Element& c : doc.root.children) {
        std::string local = c.local();
        if (local == "collaboration" && !collab) collab = &c;
        if (local == "process") processes.emplace(id_of(c), &c);
        if (local == "message") bpmn_messages.emplace(id_of(c), &c);
    }
    if (!collab)
        throw Error("UnsupportedElement",
                    "document has no collaboration to transform");
    b.model.name = attr_or(*collab, "name", "collaboration");

    // participants become subjects
    struct Pending {
        std::string name;
        const bpmn::Element* process;
    };
    std::vector<Pending> pending;
    for (const bpmn::Element& c : collab->children) {
        if (c.local() != "participant") continue;
        Subject s;
        s.name = attr_or(c, "name", id_of(c));
        const bpmn::Element* proc = nullptr;
        if (const std::string* ref = attr(c, "processRef")) {
            auto it = processes.find(*ref);
            if (it != processes.end()) proc = it->second;
        }
        s.external = proc == nullptr;
        for (const bpmn::Element& pc : c.children)
            if (pc.local() == "participantMultiplicity") s.multi = true;
        if (b.owner.count(id_of(c)) ||
            std::any_of(b.model.subjects.begin(), b.model.subjects.end(),
                        [&](const Subject& other) { return other.name == s.name; }))
            throw Error("DuplicateId", "subject " + s.name + " appears twice");
        b.owner.emplace(id_of(c), s.name);
        if (proc) {
            b.owner.emplace(id_of(*proc), s.name);
            for (const bpmn::Element& n : proc->children)
                if (const std::string* nid = attr(n, "id"))
                    b.owner.emplace(*nid, s.name);
        }
        pending.push_back({s.name, proc});
        b.model.subjects.push_back(std::move(s));
    }

    // message flows become messages
    for (const bpmn::Element& c : collab->children) {
        if (c.local() != "messageFlow") continue;
        MessageEdge e;
        e.name = attr_or(c, "name", "");
        if (e.name.empty())
            throw Error("InvariantViolation",
                        "messageFlow " + id_of(c) + " needs a name");
        e.source = attr_or(c, "sourceRef", "");
        e.target = attr_or(c, "targetRef", "");
        if (const std::string* ref = attr(c, "messageRef")) {
            auto it = bpmn_messages.find(*ref);
            if (it != bpmn_messages.end())
                e.payload = attr_or(*it->second, "name", "");
        }
        if (!b.model.find_message(e.name))
            b.model.messages.push_back({e.name, e.payload});
        b.message_edges.push_back(std::move(e));
    }

    for (size_t i = 0; i < pending.size(); ++i)
        if (pending[i].process)
            b.model.subjects[i].states = build_behavior(*pending[i].process, b);

    validate_model(b.model);
    return b.model;
}

namespace {

Iri sref(const char* local) { return Iri{sbpm_prefix(), local}; }

void add_object_property(Ontology& o, const char* local) {
    PropertyDecl p;
    p.iri = sref(local);
    p.kind = PropertyKind::Object;
    o.add_property(std::move(p));
}

void add_data_property(Ontology& o, const char* local) {
    PropertyDecl p;
    p.iri = sref(local);
    p.kind = PropertyKind::Data;
    p.data_range = Datatype::String;
    o.add_property(std::move(p));
}

void add_sbpm_class(Ontology& o, const char* local, const char* super = nullptr) {
    onto::OntoClass c;
    c.iri = sref(local);
    if (super) c.superclasses.push_back(sref(super));
    o.add_class(std::move(c));
}

void assert_data(NamedIndividual& ind, const char* prop, const std::string& value) {
    if (!value.empty())
        ind.data_assertions.push_back({sref(prop), value, Datatype::String});
}

void assert_object(NamedIndividual& ind, const char* prop, const Iri& target) {
    ind.object_assertions.push_back({sref(prop), target});
}

} // namespace

onto::Ontology emit_sbpm_owl(const ProcessModel& m) {
    validate_model(m);
    Ontology o;
    o.header_iri = sref("model");
    o.declare_prefix(sbpm_prefix(), sbpm_ns());
    o.annotations.emplace_back("rdfs:comment", "subject oriented process model");

    for (const char* p : {"hasSubject", "hasMessage", "hasBehavior", "hasState",
                          "hasTransition", "startState", "endState",
                          "sendsMessage", "receivesMessage", "hasSender",
                          "hasReceiver", "fromState", "toState"})
        add_object_property(o, p);
    for (const char* p : {"name", "stateId", "taskName", "label", "payloadSchema"})
        add_data_property(o, p);

    add_sbpm_class(o, "ProcessModel");
    add_sbpm_class(o, "Subject");
    add_sbpm_class(o, "ExternalSubject", "Subject");
    add_sbpm_class(o, "MultiSubject", "Subject");
    add_sbpm_class(o, "Message");
    add_sbpm_class(o, "Behavior");
    add_sbpm_class(o, "State");
    add_sbpm_class(o, "FunctionState", "State");
    add_sbpm_class(o, "SendState", "State");
    add_sbpm_class(o, "ReceiveState", "State");
    add_sbpm_class(o, "Transition");

    o.add_restriction({sref("Behavior"), sref("startState"),
                       onto::Cardinality::exact(1), sref("State"), std::nullopt});
    o.add_restriction({sref("Transition"), sref("fromState"),
                       onto::Cardinality::exact(1), sref("State"), std::nullopt});
    o.add_restriction({sref("Transition"), sref("toState"),
                       onto::Cardinality::exact(1), sref("State"), std::nullopt});

    std::map<std::string, Iri> subject_iri;
    std::map<std::string, Iri> message_iri;
    std::map<std::string, Iri> state_iri;  // "subject\nstate id"
    for (size_t i = 0; i < m.subjects.size(); ++i)
        subject_iri.emplace(m.subjects[i].name,
                            Iri{sbpm_prefix(), "subject_" + std::to_string(i + 1)});
    for (size_t i = 0; i < m.messages.size(); ++i)
        message_iri.emplace(m.messages[i].name,
                            Iri{sbpm_prefix(), "message_" + std::to_string(i + 1)});
    int state_counter = 0;
    for (const Subject& s : m.subjects)
        for (const State& st : s.states)
            state_iri.emplace(s.name + "\n" + st.id,
                              Iri{sbpm_prefix(),
                                  "state_" + std::to_string(++state_counter)});

    NamedIndividual root;
    root.iri = sref("process_1");
    root.types = {sref("ProcessModel")};
    assert_data(root, "name", m.name);
    for (const Subject& s : m.subjects)
        assert_object(root, "hasSubject", subject_iri.at(s.name));
    for (const Message& msg : m.messages)
        assert_object(root, "hasMessage", message_iri.at(msg.name));
    o.add_individual(std::move(root));

    for (const Message& msg : m.messages) {
        NamedIndividual ind;
        ind.iri = message_iri.at(msg.name);
        ind.types = {sref("Message")};
        assert_data(ind, "name", msg.name);
        assert_data(ind, "payloadSchema", msg.payload_schema);
        o.add_individual(std::move(ind));
    }

    int transition_counter = 0;
    for (size_t i = 0; i < m.subjects.size(); ++i) {
        const Subject& s = m.subjects[i];
        NamedIndividual ind;
        ind.iri = subject_iri.at(s.name);
        if (s.external && s.multi)
            ind.types = {sref("ExternalSubject"), sref("MultiSubject")};
        else if (s.external)
            ind.types = {sref("ExternalSubject")};
        else if (s.multi)
            ind.types = {sref("MultiSubject")};
        else
            ind.types = {sref("Subject")};
        assert_data(ind, "name", s.name);
        Iri behavior{sbpm_prefix(), "behavior_" + std::to_string(i + 1)};
        if (!s.external) assert_object(ind, "hasBehavior", behavior);
        o.add_individual(std::move(ind));
        if (s.external) continue;

        NamedIndividual beh;
        beh.iri = behavior;
        beh.types = {sref("Behavior")};
        for (const State& st : s.states)
            assert_object(beh, "hasState", state_iri.at(s.name + "\n" + st.id));
        for (const State& st : s.states)
            if (st.start)
                assert_object(beh, "startState",
                              state_iri.at(s.name + "\n" + st.id));
        for (const State& st : s.states)
            if (st.transitions.empty())
                assert_object(beh, "endState",
                              state_iri.at(s.name + "\n" + st.id));
        o.add_individual(std::move(beh));

        for (const State& st : s.states) {
            NamedIndividual sind;
            sind.iri = state_iri.at(s.name + "\n" + st.id);
            switch (st.kind) {
            case StateKind::Function: sind.types = {sref("FunctionState")}; break;
            case StateKind::Send: sind.types = {sref("SendState")}; break;
            case StateKind::Receive: sind.types = {sref("ReceiveState")}; break;
            }
            assert_data(sind, "stateId", st.id);
            assert_data(sind, "taskName", st.task);
            std::vector<Iri> transition_iris;
            for (size_t k = 0; k < st.transitions.size(); ++k)
                transition_iris.push_back(
                    Iri{sbpm_prefix(),
                        "transition_" + std::to_string(++transition_counter)});
            for (const Iri& t : transition_iris)
                assert_object(sind, "hasTransition", t);
            o.add_individual(std::move(sind));

            for (size_t k = 0; k < st.transitions.size(); ++k) {
                const Transition& t = st.transitions[k];
                NamedIndividual tind;
                tind.iri = transition_iris[k];
                tind.types = {sref("Transition")};
                assert_data(tind, "label", t.label);
                assert_object(tind, "fromState",
                              state_iri.at(s.name + "\n" + st.id));
                assert_object(tind, "toState", state_iri.at(s.name + "\n" + t.to));
                if (st.kind == StateKind::Send) {
                    assert_object(tind, "sendsMessage", message_iri.at(t.message));
                    assert_object(tind, "hasReceiver",
                                  subject_iri.at(t.counterpart));
                } else if (st.kind == StateKind::Receive) {
                    assert_object(tind, "receivesMessage",
                                  message_iri.at(t.message));
                    assert_object(tind, "hasSender", subject_iri.at(t.counterpart));
                }
                o.add_individual(std::move(tind));
            }
        }
    }

    o.validate();
    return o;
}

namespace {

struct Loader {
    const Ontology& ont;

    const NamedIndividual& individual(const Iri& iri) const {
        const NamedIndividual* ind = ont.find_individual(iri);
        if (!ind)
            throw Error("UnresolvedReference", "missing individual " + iri.str());
        return *ind;
    }

    bool has_type(const NamedIndividual& ind, const char* cls) const {
        for (const Iri& t : ind.types)
            if (t == sref(cls)) return true;
        return false;
    }

    std::string data(const NamedIndividual& ind, const char* prop) const {
        for (const onto::DataAssertion& da : ind.data_assertions)
            if (da.property == sref(prop)) return da.value;
        return "";
    }

    std::vector<Iri> objects(const NamedIndividual& ind, const char* prop) const {
        std::vector<Iri> out;
        for (const onto::ObjectAssertion& oa : ind.object_assertions)
            if (oa.property == sref(prop)) out.push_back(oa.target);
        return out;
    }

    Iri single(const NamedIndividual& ind, const char* prop) const {
        std::vector<Iri> all = objects(ind, prop);
        if (all.size() != 1)
            throw Error("InvariantViolation",
                        ind.iri.str() + " needs exactly one " +
                            sref(prop).str());
        return all[0];
    }
};

} // namespace

ProcessModel load_sbpm_owl(const onto::Ontology& ont) {
    auto ns = ont.prefix_uri(sbpm_prefix());
    if (!ns || *ns != sbpm_ns())
        throw Error("UnresolvedReference",
                    "ontology does not declare the subject oriented vocabulary");
    Loader L{ont};

    const NamedIndividual* root = nullptr;
    for (const NamedIndividual& ind : ont.individuals()) {
        if (!L.has_type(ind, "ProcessModel")) continue;
        if (root)
            throw Error("InvariantViolation",
                        "more than one process model individual");
        root = &ind;
    }
    if (!root)
        throw Error("UnresolvedReference", "no process model individual found");

    ProcessModel m;
    m.name = L.data(*root, "name");

    for (const Iri& t : L.objects(*root, "hasMessage")) {
        const NamedIndividual& ind = L.individual(t);
        if (!L.has_type(ind, "Message"))
            throw Error("InvariantViolation", t.str() + " is not a Message");
        m.messages.push_back({L.data(ind, "name"), L.data(ind, "payloadSchema")});
    }

    std::map<std::string, std::string> subject_name;  // individual iri -> name
    std::map<std::string, std::string> message_name;
    for (const Iri& t : L.objects(*root, "hasMessage"))
        message_name.emplace(t.str(), L.data(L.individual(t), "name"));
    for (const Iri& t : L.objects(*root, "hasSubject"))
        subject_name.emplace(t.str(), L.data(L.individual(t), "name"));

    for (const Iri& siri : L.objects(*root, "hasSubject")) {
        const NamedIndividual& sind = L.individual(siri);
        Subject s;
        s.name = L.data(sind, "name");
        s.external = L.has_type(sind, "ExternalSubject");
        s.multi = L.has_type(sind, "MultiSubject");
        if (!s.external && !s.multi && !L.has_type(sind, "Subject"))
            throw Error("InvariantViolation", siri.str() + " is not a Subject");

        std::vector<Iri> behaviors = L.objects(sind, "hasBehavior");
        if (s.external) {
            if (!behaviors.empty())
                throw Error("InvariantViolation",
                            "external subject " + s.name + " has a behavior");
            m.subjects.push_back(std::move(s));
            continue;
        }
        if (behaviors.size() != 1)
            throw Error("InvariantViolation",
                        "subject " + s.name + " needs exactly one behavior");
        const NamedIndividual& beh = L.individual(behaviors[0]);
        if (!L.has_type(beh, "Behavior"))
            throw Error("InvariantViolation",
                        behaviors[0].str() + " is not a Behavior");

        std::map<std::string, std::string> state_id;  // state iri -> stateId
        for (const Iri& stiri : L.objects(beh, "hasState"))
            state_id.emplace(stiri.str(), L.data(L.individual(stiri), "stateId"));
        Iri start = L.single(beh, "startState");
        if (!state_id.count(start.str()))
            throw Error("InvariantViolation",
                        "start state of " + s.name + " is not in the behavior");

        for (const Iri& stiri : L.objects(beh, "hasState")) {
            const NamedIndividual& sti = L.individual(stiri);
            State st;
            st.id = L.data(sti, "stateId");
            st.task = L.data(sti, "taskName");
            st.start = stiri == start;
            if (L.has_type(sti, "FunctionState"))
                st.kind = StateKind::Function;
            else if (L.has_type(sti, "SendState"))
                st.kind = StateKind::Send;
            else if (L.has_type(sti, "ReceiveState"))
                st.kind = StateKind::Receive;
            else
                throw Error("InvariantViolation",
                            stiri.str() + " has no state kind");

            for (const Iri& tiri : L.objects(sti, "hasTransition")) {
                const NamedIndividual& tind = L.individual(tiri);
                if (!L.has_type(tind, "Transition"))
                    throw Error("InvariantViolation",
                                tiri.str() + " is not a Transition");
                if (!(L.single(tind, "fromState") == stiri))
                    throw Error("InvariantViolation",
                                tiri.str() + " does not start at its state");
                Transition t;
                Iri to = L.single(tind, "toState");
                auto it = state_id.find(to.str());
                if (it == state_id.end())
                    throw Error("InvariantViolation",
                                tiri.str() + " leaves the behavior");
                t.to = it->second;
                t.label = L.data(tind, "label");
                if (st.kind == StateKind::Send) {
                    t.message = message_name[L.single(tind, "sendsMessage").str()];
                    t.counterpart =
                        subject_name[L.single(tind, "hasReceiver").str()];
                } else if (st.kind == StateKind::Receive) {
                    t.message =
                        message_name[L.single(tind, "receivesMessage").str()];
                    t.counterpart = subject_name[L.single(tind, "hasSender").str()];
                }
                st.transitions.push_back(std::move(t));
            }
            s.states.push_back(std::move(st));
        }
        m.subjects.push_back(std::move(s));
    }

    validate_model(m);
    return m;
}

} // namespace bpmont::sbpm
