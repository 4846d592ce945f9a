#pragma once

#include "bpmont/error.hpp"
#include "bpmont/sbpm.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace bpmont::engine {

/// A point where a run needs outside input: a function or send state with
/// more than one outgoing transition. Options are the transition labels
/// (falling back to the target state id for unlabeled transitions).
struct DecisionPoint {
    std::string id;  // "<subject>/<state>"
    std::string subject;
    std::string state;
    std::vector<std::string> options;

    bool operator==(const DecisionPoint&) const = default;
};

/// An executable model: validated, with its decision points enumerated in
/// (subject, state) order.
struct ProcessDefinition {
    sbpm::ProcessModel model;
    std::vector<DecisionPoint> decision_points;
};

/// Throws ModelInvalid (all problems in one message) or InvariantViolation.
ProcessDefinition compile(const sbpm::ProcessModel& m);

/// Outside input for one run. Choices are consumed per decision point in
/// order; running out raises ScenarioMissingChoice. Multi subjects get
/// `multi_counts[name]` instances (default 1). Payloads are attached to
/// sent messages by message name.
struct Scenario {
    std::map<std::string, std::vector<std::string>> choices;
    std::map<std::string, std::string> payloads;
    std::map<std::string, int> multi_counts;
    int max_steps = 1000;
};

/// Reads {"choices": {...}, "payloads": {...}, "multi_counts": {...},
/// "max_steps": n}; all keys optional. Throws MalformedScenario.
Scenario scenario_from_json(std::string_view text);

enum class Terminal { Completed, Deadlock, StepLimit };
std::string_view terminal_name(Terminal t);

struct RunResult {
    Terminal terminal = Terminal::Completed;
    int steps = 0;
    int unconsumed = 0;  // messages never picked up
    std::vector<std::string> waiting;  // instances blocked in a receive state
    std::string trace;  // one JSON object per line, footer last
};

/// Deterministic execution: every internal subject runs as one instance
/// (multi subjects as several), each with a FIFO message pool. The lowest
/// instance name that can act performs one step per tick. Send steps
/// deliver to the counterpart's pool (round robin across a multi subject's
/// instances); receive steps block until a pooled message matches one of
/// the state's alternatives. Throws ScenarioMissingChoice.
RunResult run(const ProcessDefinition& def, const Scenario& scenario);

/// Re-runs the scenario and compares the produced trace byte for byte.
bool replay_check(const ProcessDefinition& def, const Scenario& scenario,
                  std::string_view trace);

} // namespace bpmont::engine
