#include "bpmont/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <sstream>

namespace bpmont::verify {

using onto::Iri;

std::string_view rule_name(Rule r) {
    switch (r) {
    case Rule::UnknownClass: return "unknown-class";
    case Rule::UnknownProperty: return "unknown-property";
    case Rule::AttributeCardinality: return "attribute-cardinality";
    case Rule::ChildCardinality: return "child-cardinality";
    case Rule::DatatypeMismatch: return "datatype-mismatch";
    }
    return "";
}

bool Report::has_errors() const {
    return std::any_of(findings.begin(), findings.end(), [](const Finding& f) {
        return f.severity == Severity::Error;
    });
}

namespace {

struct Walker {
    const bpmn::Document& doc;
    const onto::Ontology& ont;
    const ref::TranslationTable& table;
    const Options& options;
    Report report;

    Severity severity_of(Rule r) const {
        for (Rule w : options.warnings)
            if (w == r) return Severity::Warning;
        return Severity::Error;
    }

    void add(Rule r, const std::string& path, std::string subject,
             std::string detail) {
        report.findings.push_back(
            {r, severity_of(r), path, std::move(subject), std::move(detail)});
    }

    std::string conformance_of(const bpmn::Element& e) const {
        auto uri = doc.namespace_of(e);
        return uri ? ref::conformance_prefix(*uri) : std::string();
    }

    // Unprefixed attributes live in their element's namespace. Attributes
    // from other namespaces (vendor, xsi) are out of scope.
    std::string attribute_conformance(const bpmn::Element& e,
                                      const xml::Attribute& a) const {
        auto [prefix, local] = xml::split_qname(a.name);
        if (prefix.empty()) return conformance_of(e);
        auto uri = doc.uri_for(prefix);
        return uri ? ref::conformance_prefix(*uri) : std::string();
    }

    bool subclass_matches(const Iri& cls, const Iri& wanted) const {
        if (cls == wanted) return true;
        std::vector<Iri> closure = ont.superclass_closure(cls);
        return std::find(closure.begin(), closure.end(), wanted) != closure.end();
    }

    void check_attributes(const bpmn::Element& e, const std::string& path) {
        for (const xml::Attribute& a : e.attributes) {
            std::string cp = attribute_conformance(e, a);
            if (cp.empty()) continue;
            ++report.attributes_checked;
            Iri prop{cp, std::string(xml::split_qname(a.name).second)};
            const onto::PropertyDecl* decl = ont.find_property(prop);
            if (!decl) {
                add(Rule::UnknownProperty, path, a.name,
                    "no ontology property " + prop.str() + " for this attribute");
                continue;
            }
            if (decl->kind == onto::PropertyKind::Data && decl->data_range &&
                !onto::literal_matches(*decl->data_range, a.value))
                add(Rule::DatatypeMismatch, path, a.name,
                    "value \"" + a.value + "\" is not a valid " +
                        std::string(onto::datatype_name(*decl->data_range)));
        }
    }

    void check_restrictions(const bpmn::Element& e, const std::string& path,
                            const Iri& cls_iri, const std::string& scope) {
        for (const onto::Restriction& r : ont.effective_restrictions(cls_iri)) {
            if (r.is_child_kind()) {
                int n = 0;
                for (const bpmn::Element& child : e.children) {
                    std::string cp = conformance_of(child);
                    if (cp.empty()) continue;
                    Iri child_cls{cp, table.translate(scope, child.local())};
                    if (ont.find_class(child_cls) &&
                        subclass_matches(child_cls, *r.on_class))
                        ++n;
                }
                if (!r.cardinality.admits(n))
                    add(Rule::ChildCardinality, path, r.on_property.str(),
                        "has " + std::to_string(n) + " " + r.on_class->local +
                            " child(ren), needs " + r.cardinality.str());
            } else {
                int n = 0;
                for (const xml::Attribute& a : e.attributes) {
                    std::string cp = attribute_conformance(e, a);
                    if (cp.empty()) continue;
                    if (Iri{cp, std::string(xml::split_qname(a.name).second)} ==
                        r.on_property)
                        ++n;
                }
                if (!r.cardinality.admits(n))
                    add(Rule::AttributeCardinality, path, r.on_property.str(),
                        "has " + std::to_string(n) + ", needs " +
                            r.cardinality.str());
            }
        }
    }

    void walk(const bpmn::Element& e, const std::string& path,
              const std::string& scope) {
        std::string cp = conformance_of(e);
        std::string my_scope = "*";
        if (!cp.empty()) {
            ++report.elements_checked;
            my_scope = table.translate(scope, e.local());
            Iri cls_iri{cp, my_scope};
            if (!ont.find_class(cls_iri))
                add(Rule::UnknownClass, path, e.tag,
                    "no ontology class " + cls_iri.str() + " for this element");
            else
                check_restrictions(e, path, cls_iri, my_scope);
            check_attributes(e, path);
        }
        std::map<std::string, int> ordinal;
        for (const bpmn::Element& child : e.children) {
            int n = ++ordinal[child.tag];
            walk(child, path + "/" + child.tag + "[" + std::to_string(n) + "]",
                 my_scope);
        }
    }
};

} // namespace

Report verify(const bpmn::Document& doc, const onto::Ontology& ontology,
              const ref::TranslationTable& table, const Options& options) {
    Walker w{doc, ontology, table, options};
    w.walk(doc.root, doc.root.tag, "*");
    return std::move(w.report);
}

std::vector<Report> verify_corpus(
    const std::vector<std::pair<std::string, bpmn::Document>>& docs,
    const onto::Ontology& ontology, const ref::TranslationTable& table,
    const Options& options) {
    std::vector<Report> out;
    out.reserve(docs.size());
    for (const auto& [label, doc] : docs) {
        Report r = verify(doc, ontology, table, options);
        r.source = label;
        out.push_back(std::move(r));
    }
    return out;
}

std::string render_text(const Report& report) {
    std::ostringstream out;
    if (report.findings.empty()) {
        out << report.source << ": ok (" << report.elements_checked
            << " elements, " << report.attributes_checked << " attributes)\n";
        return out.str();
    }
    out << report.source << ": " << report.findings.size() << " finding(s)\n";
    size_t rule_w = 0, path_w = 0, subject_w = 0;
    for (const Finding& f : report.findings) {
        rule_w = std::max(rule_w, rule_name(f.rule).size());
        path_w = std::max(path_w, f.path.size());
        subject_w = std::max(subject_w, f.subject.size());
    }
    for (const Finding& f : report.findings) {
        std::string sev = f.severity == Severity::Error ? "error" : "warning";
        out << "  " << sev << std::string(8 - sev.size(), ' ');
        std::string rule(rule_name(f.rule));
        out << rule << std::string(rule_w - rule.size() + 2, ' ');
        out << f.path << std::string(path_w - f.path.size() + 2, ' ');
        out << f.subject << std::string(subject_w - f.subject.size() + 2, ' ');
        out << f.detail << "\n";
    }
    return out.str();
}

std::string render_jsonl(const Report& report) {
    std::ostringstream out;
    for (const Finding& f : report.findings) {
        nlohmann::json j{
            {"source", report.source},
            {"severity", f.severity == Severity::Error ? "error" : "warning"},
            {"rule", std::string(rule_name(f.rule))},
            {"path", f.path},
            {"subject", f.subject},
            {"detail", f.detail},
        };
        out << j.dump() << "\n";
    }
    return out.str();
}

std::string render_summary(const std::vector<Report>& reports) {
    std::ostringstream out;
    int clean = 0;
    for (const Report& r : reports) {
        int errors = 0, warnings = 0;
        for (const Finding& f : r.findings)
            (f.severity == Severity::Error ? errors : warnings)++;
        if (r.findings.empty()) {
            out << r.source << ": ok\n";
            ++clean;
        } else {
            out << r.source << ": " << errors << " error(s), " << warnings
                << " warning(s)\n";
        }
    }
    out << reports.size() << " document(s), " << clean << " clean, "
        << reports.size() - static_cast<size_t>(clean) << " with findings\n";
    return out.str();
}

} // namespace bpmont::verify
