#include "bpmont/engine.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace bpmont::engine {

using nlohmann::json;
using sbpm::State;
using sbpm::StateKind;
using sbpm::Subject;
using sbpm::Transition;

namespace {

std::string option_key(const Transition& t) {
    return t.label.empty() ? t.to : t.label;
}

} // namespace

ProcessDefinition compile(const sbpm::ProcessModel& m) {
    sbpm::validate_model(m);
    ProcessDefinition def{m, {}};
    std::vector<std::string> problems;
    bool has_internal = false;
    for (const Subject& s : m.subjects) {
        if (s.external)
            continue;
        has_internal = true;
        for (const State& st : s.states) {
            if (st.transitions.size() < 2 || st.kind == StateKind::Receive)
                continue;
            DecisionPoint dp;
            dp.subject = s.name;
            dp.state = st.id;
            dp.id = s.name + "/" + st.id;
            for (const Transition& t : st.transitions) {
                std::string key = option_key(t);
                if (std::find(dp.options.begin(), dp.options.end(), key) != dp.options.end())
                    problems.push_back("decision " + dp.id + " repeats option " + key);
                dp.options.push_back(std::move(key));
            }
            def.decision_points.push_back(std::move(dp));
        }
    }
    if (!has_internal)
        problems.insert(problems.begin(), "model has no internal subject to run");
    if (!problems.empty()) {
        std::string joined;
        for (const std::string& p : problems) {
            if (!joined.empty())
                joined += "; ";
            joined += p;
        }
        throw Error("ModelInvalid", joined);
    }
    std::sort(def.decision_points.begin(), def.decision_points.end(),
              [](const DecisionPoint& a, const DecisionPoint& b) {
                  return std::tie(a.subject, a.state) < std::tie(b.subject, b.state);
              });
    return def;
}

Scenario scenario_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error("MalformedScenario", e.what());
    }
    if (!doc.is_object())
        throw Error("MalformedScenario", "scenario must be a JSON object");
    Scenario sc;
    for (const auto& [key, value] : doc.items()) {
        if (key == "choices") {
            if (!value.is_object())
                throw Error("MalformedScenario", "choices must map decision ids to arrays");
            for (const auto& [decision, list] : value.items()) {
                if (!list.is_array())
                    throw Error("MalformedScenario", "choices for " + decision + " must be an array");
                for (const json& item : list) {
                    if (!item.is_string())
                        throw Error("MalformedScenario", "choices for " + decision + " must be strings");
                    sc.choices[decision].push_back(item.get<std::string>());
                }
            }
        } else if (key == "payloads") {
            if (!value.is_object())
                throw Error("MalformedScenario", "payloads must map message names to strings");
            for (const auto& [message, payload] : value.items()) {
                if (!payload.is_string())
                    throw Error("MalformedScenario", "payload for " + message + " must be a string");
                sc.payloads[message] = payload.get<std::string>();
            }
        } else if (key == "multi_counts") {
            if (!value.is_object())
                throw Error("MalformedScenario", "multi_counts must map subject names to integers");
            for (const auto& [subject, count] : value.items()) {
                if (!count.is_number_integer() || count.get<int>() < 1)
                    throw Error("MalformedScenario", "multi_counts for " + subject + " must be a positive integer");
                sc.multi_counts[subject] = count.get<int>();
            }
        } else if (key == "max_steps") {
            if (!value.is_number_integer() || value.get<int>() < 1)
                throw Error("MalformedScenario", "max_steps must be a positive integer");
            sc.max_steps = value.get<int>();
        } else {
            throw Error("MalformedScenario", "unknown scenario key " + key);
        }
    }
    return sc;
}

std::string_view terminal_name(Terminal t) {
    switch (t) {
    case Terminal::Completed: return "completed";
    case Terminal::Deadlock: return "deadlock";
    case Terminal::StepLimit: return "step-limit";
    }
    return "";
}

namespace {

struct Envelope {
    std::string from_instance;
    std::string from_subject;
    std::string message;
    std::string payload;
};

struct Instance {
    std::string id;
    const Subject* subject = nullptr;
    const State* state = nullptr;
    bool done = false;
    std::deque<Envelope> pool;
};

class Runner {
public:
    Runner(const ProcessDefinition& def, const Scenario& scenario)
        : def_(def), scenario_(scenario) {}

    RunResult go() {
        spawn();
        for (Instance& inst : instances_)
            emit_entered(inst);
        RunResult r;
        while (true) {
            Instance* next = pick_runnable();
            if (all_done()) {
                r.terminal = Terminal::Completed;
                break;
            }
            if (!next) {
                r.terminal = Terminal::Deadlock;
                break;
            }
            if (steps_ == scenario_.max_steps) {
                r.terminal = Terminal::StepLimit;
                break;
            }
            step(*next);
            ++steps_;
        }
        r.steps = steps_;
        for (const Instance& inst : instances_) {
            r.unconsumed += static_cast<int>(inst.pool.size());
            if (!inst.done && inst.state->kind == StateKind::Receive)
                r.waiting.push_back(inst.id);
        }
        json footer;
        footer["terminal"] = terminal_name(r.terminal);
        footer["steps"] = r.steps;
        footer["unconsumed"] = r.unconsumed;
        footer["waiting"] = r.waiting;
        trace_ << footer.dump() << '\n';
        r.trace = trace_.str();
        return r;
    }

private:
    void spawn() {
        for (const auto& [name, count] : scenario_.multi_counts) {
            const Subject* s = def_.model.find_subject(name);
            if (!s)
                throw Error("MalformedScenario", "multi_counts names unknown subject " + name);
            if (!s->multi)
                throw Error("MalformedScenario", name + " is not a multi subject");
        }
        for (const Subject& s : def_.model.subjects) {
            if (s.external)
                continue;
            int count = 1;
            if (s.multi) {
                auto it = scenario_.multi_counts.find(s.name);
                if (it != scenario_.multi_counts.end())
                    count = it->second;
            }
            const State* start = nullptr;
            for (const State& st : s.states)
                if (st.start)
                    start = &st;
            for (int k = 0; k < count; ++k) {
                Instance inst;
                inst.id = s.multi ? s.name + "#" + std::to_string(k) : s.name;
                inst.subject = &s;
                inst.state = start;
                instances_.push_back(std::move(inst));
            }
        }
        std::sort(instances_.begin(), instances_.end(),
                  [](const Instance& a, const Instance& b) { return a.id < b.id; });
    }

    bool all_done() const {
        return std::all_of(instances_.begin(), instances_.end(),
                           [](const Instance& i) { return i.done; });
    }

    // The envelope a receive state would consume: the oldest pooled message
    // matching any alternative, ties broken by alternative order.
    std::deque<Envelope>::iterator match(Instance& inst, const Transition** alt) {
        for (auto it = inst.pool.begin(); it != inst.pool.end(); ++it) {
            for (const Transition& t : inst.state->transitions) {
                if (t.message == it->message && t.counterpart == it->from_subject) {
                    if (alt)
                        *alt = &t;
                    return it;
                }
            }
        }
        return inst.pool.end();
    }

    bool runnable(Instance& inst) {
        if (inst.done)
            return false;
        if (inst.state->kind != StateKind::Receive)
            return true;
        return match(inst, nullptr) != inst.pool.end();
    }

    Instance* pick_runnable() {
        for (Instance& inst : instances_)
            if (runnable(inst))
                return &inst;
        return nullptr;
    }

    const State* state_by_id(const Subject& s, const std::string& id) const {
        for (const State& st : s.states)
            if (st.id == id)
                return &st;
        return nullptr;
    }

    const Transition& choose(Instance& inst) {
        const auto& transitions = inst.state->transitions;
        if (transitions.size() == 1)
            return transitions.front();
        std::string decision = inst.subject->name + "/" + inst.state->id;
        auto it = scenario_.choices.find(decision);
        size_t cursor = cursors_[decision]++;
        if (it == scenario_.choices.end() || cursor >= it->second.size())
            throw Error("ScenarioMissingChoice",
                        "decision " + decision + " needs a choice for occurrence " +
                            std::to_string(cursor + 1));
        const std::string& key = it->second[cursor];
        for (const Transition& t : transitions)
            if (option_key(t) == key) {
                json e;
                e["event"] = "DecisionTaken";
                e["seq"] = ++seq_;
                e["instance"] = inst.id;
                e["decision"] = decision;
                e["choice"] = key;
                trace_ << e.dump() << '\n';
                return t;
            }
        throw Error("ScenarioMissingChoice",
                    "choice " + key + " matches no option at decision " + decision);
    }

    void deliver(Instance& sender, const Transition& t) {
        Envelope env;
        env.from_instance = sender.id;
        env.from_subject = sender.subject->name;
        env.message = t.message;
        auto pit = scenario_.payloads.find(t.message);
        if (pit != scenario_.payloads.end())
            env.payload = pit->second;
        const Subject* target = def_.model.find_subject(t.counterpart);
        std::string to = t.counterpart;
        if (!target->external) {
            std::vector<Instance*> pool;
            for (Instance& inst : instances_)
                if (inst.subject == target)
                    pool.push_back(&inst);
            Instance* receiver = pool[static_cast<size_t>(
                round_robin_[t.counterpart]++ % static_cast<int>(pool.size()))];
            to = receiver->id;
            receiver->pool.push_back(env);
        }
        json e;
        e["event"] = "MessageSent";
        e["seq"] = ++seq_;
        e["from"] = sender.id;
        e["to"] = to;
        e["message"] = env.message;
        e["payload"] = env.payload;
        trace_ << e.dump() << '\n';
    }

    void emit_entered(const Instance& inst) {
        json e;
        e["event"] = "StateEntered";
        e["seq"] = ++seq_;
        e["instance"] = inst.id;
        e["state"] = inst.state->id;
        e["kind"] = sbpm::state_kind_name(inst.state->kind);
        trace_ << e.dump() << '\n';
    }

    void move(Instance& inst, const Transition& t) {
        inst.state = state_by_id(*inst.subject, t.to);
        emit_entered(inst);
    }

    void step(Instance& inst) {
        switch (inst.state->kind) {
        case StateKind::Function: {
            if (inst.state->transitions.empty()) {
                json e;
                e["event"] = "SubjectEnded";
                e["seq"] = ++seq_;
                e["instance"] = inst.id;
                e["state"] = inst.state->id;
                trace_ << e.dump() << '\n';
                inst.done = true;
                return;
            }
            move(inst, choose(inst));
            return;
        }
        case StateKind::Send: {
            const Transition& t = choose(inst);
            deliver(inst, t);
            move(inst, t);
            return;
        }
        case StateKind::Receive: {
            const Transition* alt = nullptr;
            auto it = match(inst, &alt);
            Envelope env = *it;
            inst.pool.erase(it);
            json e;
            e["event"] = "MessageReceived";
            e["seq"] = ++seq_;
            e["from"] = env.from_instance;
            e["to"] = inst.id;
            e["message"] = env.message;
            e["payload"] = env.payload;
            trace_ << e.dump() << '\n';
            move(inst, *alt);
            return;
        }
        }
    }

    const ProcessDefinition& def_;
    const Scenario& scenario_;
    std::vector<Instance> instances_;
    std::map<std::string, size_t> cursors_;
    std::map<std::string, int> round_robin_;
    std::ostringstream trace_;
    int seq_ = 0;
    int steps_ = 0;
};

} // namespace

RunResult run(const ProcessDefinition& def, const Scenario& scenario) {
    return Runner(def, scenario).go();
}

bool replay_check(const ProcessDefinition& def, const Scenario& scenario,
                  std::string_view trace) {
    return run(def, scenario).trace == trace;
}

} // namespace bpmont::engine
