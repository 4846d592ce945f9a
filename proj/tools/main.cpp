#include "bpmont/bpmn.hpp"
#include "bpmont/engine.hpp"
#include "bpmont/error.hpp"
#include "bpmont/ontology.hpp"
#include "bpmont/reference.hpp"
#include "bpmont/sbpm.hpp"
#include "bpmont/transform.hpp"
#include "bpmont/verify.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

using namespace bpmont;

namespace {

// Exit codes: 0 success, 1 negative verdict (findings, mismatch, untransformable
// model, deadlock, step limit), 2 operational failure (unreadable or malformed
// input, bad scenario).
constexpr int kOk = 0;
constexpr int kVerdict = 1;
constexpr int kFailure = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("FileUnreadable", "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("FileUnreadable", "cannot write " + path);
    out << text;
}

onto::Ontology load_verification_ontology(const std::string& extension_path) {
    onto::Ontology ontology = ref::build_reference();
    if (!extension_path.empty())
        ontology = ref::merge_extension(std::move(ontology), onto::parse(read_file(extension_path)));
    return ontology;
}

ref::TranslationTable load_table(const std::string& table_path) {
    ref::TranslationTable table = ref::TranslationTable::defaults();
    if (!table_path.empty()) {
        ref::TranslationTable user = ref::TranslationTable::parse(read_file(table_path));
        user.merge_front(table);
        return user;
    }
    return table;
}

verify::Options warning_options(const std::vector<std::string>& names) {
    verify::Options options;
    for (const std::string& name : names) {
        bool known = false;
        for (verify::Rule r : {verify::Rule::UnknownClass, verify::Rule::UnknownProperty,
                               verify::Rule::AttributeCardinality, verify::Rule::ChildCardinality,
                               verify::Rule::DatatypeMismatch}) {
            if (verify::rule_name(r) == name) {
                options.warnings.push_back(r);
                known = true;
            }
        }
        if (!known)
            throw Error("UnknownRule", "no verification rule named " + name);
    }
    return options;
}

int cmd_convert(const std::string& input, const std::string& output) {
    bpmn::Document doc = bpmn::parse_bpmn(read_file(input));
    write_output(output, onto::serialize(transform::bpmn_to_owl(doc)));
    return kOk;
}

int cmd_verify(const std::vector<std::string>& inputs, const std::string& extension_path,
               const std::string& table_path, const std::string& format,
               const std::vector<std::string>& warn_names) {
    onto::Ontology ontology = load_verification_ontology(extension_path);
    ref::TranslationTable table = load_table(table_path);
    verify::Options options = warning_options(warn_names);

    std::vector<std::pair<std::string, bpmn::Document>> docs;
    for (const std::string& path : inputs)
        docs.emplace_back(path, bpmn::parse_bpmn(read_file(path)));
    std::vector<verify::Report> reports = verify::verify_corpus(docs, ontology, table, options);

    bool errors = false;
    for (const verify::Report& report : reports) {
        errors = errors || report.has_errors();
        std::cout << (format == "jsonl" ? verify::render_jsonl(report)
                                        : verify::render_text(report));
    }
    if (format == "text" && reports.size() > 1)
        std::cout << verify::render_summary(reports);
    return errors ? kVerdict : kOk;
}

int cmd_roundtrip(const std::vector<std::string>& inputs) {
    int rc = kOk;
    for (const std::string& path : inputs) {
        bpmn::Document doc = bpmn::parse_bpmn(read_file(path));
        std::string before = bpmn::serialize_bpmn(bpmn::canonicalize(doc));
        onto::Ontology model = transform::bpmn_to_owl(doc);
        std::string after = bpmn::serialize_bpmn(transform::owl_to_bpmn(model));
        if (before == after) {
            std::cout << path << ": round trip ok (" << before.size() << " bytes)\n";
            continue;
        }
        rc = kVerdict;
        size_t at = 0;
        while (at < before.size() && at < after.size() && before[at] == after[at])
            ++at;
        size_t from = at < 40 ? 0 : at - 40;
        std::cout << path << ": round trip differs at byte " << at << "\n"
                  << "  canonical: ..." << before.substr(from, 80) << "\n"
                  << "  recovered: ..." << after.substr(from, 80) << "\n";
    }
    return rc;
}

int cmd_transform(const std::string& input, const std::string& output) {
    bpmn::Document doc = bpmn::parse_bpmn(read_file(input));
    try {
        sbpm::ProcessModel model = sbpm::transform_collaboration(doc);
        write_output(output, onto::serialize(sbpm::emit_sbpm_owl(model)));
    } catch (const Error& e) {
        std::string code = e.code();
        if (code == "UnsupportedElement" || code == "InvariantViolation" ||
            code == "UnresolvedReference") {
            std::cerr << "error: " << e.what() << "\n";
            return kVerdict;
        }
        throw;
    }
    return kOk;
}

int cmd_run(const std::string& input, const std::string& scenario_path,
            const std::string& output) {
    sbpm::ProcessModel model = sbpm::load_sbpm_owl(onto::parse(read_file(input)));
    engine::ProcessDefinition def = engine::compile(model);
    engine::Scenario scenario;
    if (!scenario_path.empty())
        scenario = engine::scenario_from_json(read_file(scenario_path));
    engine::RunResult r = engine::run(def, scenario);
    write_output(output, r.trace);
    std::cerr << terminal_name(r.terminal) << " after " << r.steps << " step(s)";
    if (!r.waiting.empty()) {
        std::cerr << ", waiting:";
        for (const std::string& w : r.waiting)
            std::cerr << " " << w;
    }
    std::cerr << "\n";
    return r.terminal == engine::Terminal::Completed ? kOk : kVerdict;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"BPMN 2.0 / ontology toolchain: derive model ontologies, verify "
                 "documents against a reference ontology, transform collaborations "
                 "into subject oriented models, and execute them deterministically"};
    app.require_subcommand(1);

    std::string input, output, extension_path, table_path, scenario_path;
    std::string format = "text";
    std::vector<std::string> inputs, warn_names;

    CLI::App* convert = app.add_subcommand(
        "convert", "derive the model ontology of a BPMN document");
    convert->add_option("input", input, "BPMN file")->required()->check(CLI::ExistingFile);
    convert->add_option("-o,--output", output, "output file (default stdout)");

    CLI::App* verify_cmd = app.add_subcommand(
        "verify", "check BPMN documents against the reference ontology");
    verify_cmd->add_option("inputs", inputs, "BPMN files")
        ->required()
        ->check(CLI::ExistingFile);
    verify_cmd->add_option("--extension", extension_path,
                           "ontology file merged onto the reference");
    verify_cmd->add_option("--table", table_path,
                           "extra translation rows (scope serialized standard)");
    verify_cmd->add_option("--format", format, "text or jsonl")
        ->check(CLI::IsMember({"text", "jsonl"}));
    verify_cmd->add_option("--warn", warn_names,
                           "downgrade a rule to a warning (repeatable)");

    CLI::App* roundtrip = app.add_subcommand(
        "roundtrip", "check that documents survive the ontology round trip");
    roundtrip->add_option("inputs", inputs, "BPMN files")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* transform_cmd = app.add_subcommand(
        "transform", "turn a BPMN collaboration into a subject oriented model");
    transform_cmd->add_option("input", input, "BPMN file")->required()->check(CLI::ExistingFile);
    transform_cmd->add_option("-o,--output", output, "output file (default stdout)");

    CLI::App* run_cmd = app.add_subcommand(
        "run", "execute a subject oriented model and write its trace");
    run_cmd->add_option("input", input, "subject oriented ontology file")
        ->required()
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--scenario", scenario_path, "scenario JSON file")
        ->check(CLI::ExistingFile);
    run_cmd->add_option("-o,--output", output, "trace file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kFailure;
    }

    try {
        if (*convert)
            return cmd_convert(input, output);
        if (*verify_cmd)
            return cmd_verify(inputs, extension_path, table_path, format, warn_names);
        if (*roundtrip)
            return cmd_roundtrip(inputs);
        if (*transform_cmd)
            return cmd_transform(input, output);
        if (*run_cmd)
            return cmd_run(input, scenario_path, output);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
