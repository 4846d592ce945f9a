#pragma once

#include "bpmont/bpmn.hpp"
#include "bpmont/error.hpp"
#include "bpmont/ontology.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace bpmont::sbpm {

/// Subject-oriented view of a collaboration: communicating subjects, each
/// with a behavior made of function, send and receive states.

enum class StateKind { Function, Send, Receive };
std::string_view state_kind_name(StateKind k);

struct Transition {
    std::string to;           // target state id within the same behavior
    std::string label;        // decision label on function/send states
    std::string message;      // message name on send/receive states
    std::string counterpart;  // receiver (send) or sender (receive) subject

    bool operator==(const Transition&) const = default;
};

struct State {
    std::string id;  // unique within the behavior (the BPMN element id)
    StateKind kind = StateKind::Function;
    std::string task;  // display name of the work item
    bool start = false;
    std::vector<Transition> transitions;  // empty marks an end state

    bool operator==(const State&) const = default;
};

struct Subject {
    std::string name;
    bool external = false;  // black box: no behavior, only message contact
    bool multi = false;     // instance count chosen at run time
    std::vector<State> states;

    bool operator==(const Subject&) const = default;
};

struct Message {
    std::string name;
    std::string payload_schema;  // free-form content description

    bool operator==(const Message&) const = default;
};

struct ProcessModel {
    std::string name;
    std::vector<Subject> subjects;
    std::vector<Message> messages;

    const Subject* find_subject(std::string_view name) const;
    const Message* find_message(std::string_view name) const;

    bool operator==(const ProcessModel&) const = default;
};

/// Structural soundness: unique subject and state names, resolvable
/// transition targets, messages and counterparts, one start state per
/// behavior, send/receive transitions carry a message, function ones do
/// not, and only function states may be terminal. Throws
/// InvariantViolation.
void validate_model(const ProcessModel& m);

/// Maps a collaboration onto subjects. Participants become subjects
/// (external when their process is not in the file), message flows become
/// messages, tasks become function states, send/receive tasks and message
/// events become send/receive states, exclusive gateways fold into the
/// preceding function state as labeled transitions, event-based gateways
/// become receive states with one alternative per absorbed catch element,
/// plain start events mark their successor, and end events become empty
/// function states. Anything else in the flow throws UnsupportedElement.
ProcessModel transform_collaboration(const bpmn::Document& doc);

const std::string& sbpm_prefix();  // "sbpm"
const std::string& sbpm_ns();      // urn:sbpm:reference#

/// Writes the model with the subject-oriented vocabulary (ProcessModel,
/// Subject, Behavior, the three state classes, Transition, Message).
/// Deterministic; load_sbpm_owl inverts it.
onto::Ontology emit_sbpm_owl(const ProcessModel& m);

/// Inverse of emit_sbpm_owl; the result is validated. Throws
/// UnresolvedReference or InvariantViolation.
ProcessModel load_sbpm_owl(const onto::Ontology& ont);

} // namespace bpmont::sbpm
