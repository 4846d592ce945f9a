#include "bpmont/xml.hpp"

#include <cctype>
#include <charconv>

namespace bpmont::xml {

namespace {

struct Cursor {
    std::string_view input;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    bool eof() const { return pos >= input.size(); }
    char peek() const { return input[pos]; }

    bool starts_with(std::string_view s) const { return input.substr(pos, s.size()) == s; }

    char advance() {
        char c = input[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    void skip(size_t n) {
        for (size_t i = 0; i < n && !eof(); ++i) advance();
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw Error("MalformedXml",
                    what + " at line " + std::to_string(line) + ":" + std::to_string(col));
    }
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':'
        || static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
    return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

void skip_whitespace(Cursor& cur) {
    while (!cur.eof() && is_space(cur.peek())) cur.advance();
}

std::string parse_name(Cursor& cur) {
    if (cur.eof() || !is_name_start(cur.peek())) cur.fail("expected a name");
    std::string name;
    while (!cur.eof() && is_name_char(cur.peek())) name.push_back(cur.advance());
    return name;
}

void append_codepoint(std::string& out, unsigned long cp, Cursor& cur) {
    if (cp == 0 || cp > 0x10FFFF) cur.fail("character reference out of range");
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Consumes one reference after the leading '&'.
void parse_reference(Cursor& cur, std::string& out) {
    if (cur.starts_with("amp;")) { cur.skip(4); out.push_back('&'); return; }
    if (cur.starts_with("lt;"))  { cur.skip(3); out.push_back('<'); return; }
    if (cur.starts_with("gt;"))  { cur.skip(3); out.push_back('>'); return; }
    if (cur.starts_with("quot;")) { cur.skip(5); out.push_back('"'); return; }
    if (cur.starts_with("apos;")) { cur.skip(5); out.push_back('\''); return; }
    if (!cur.eof() && cur.peek() == '#') {
        cur.advance();
        int base = 10;
        if (!cur.eof() && (cur.peek() == 'x' || cur.peek() == 'X')) {
            base = 16;
            cur.advance();
        }
        std::string digits;
        while (!cur.eof() && cur.peek() != ';') digits.push_back(cur.advance());
        if (cur.eof()) cur.fail("unterminated character reference");
        cur.advance(); // ';'
        unsigned long cp = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, base);
        if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty())
            cur.fail("invalid character reference");
        append_codepoint(out, cp, cur);
        return;
    }
    cur.fail("unknown entity reference (no DTD support)");
}

std::string parse_attribute_value(Cursor& cur) {
    if (cur.eof() || (cur.peek() != '"' && cur.peek() != '\'')) cur.fail("expected quoted value");
    char quote = cur.advance();
    std::string value;
    while (true) {
        if (cur.eof()) cur.fail("unterminated attribute value");
        char c = cur.peek();
        if (c == quote) {
            cur.advance();
            return value;
        }
        if (c == '<') cur.fail("'<' in attribute value");
        if (c == '&') {
            cur.advance();
            parse_reference(cur, value);
            continue;
        }
        value.push_back(cur.advance());
    }
}

// Skips comments and processing instructions; true if something was skipped.
bool skip_misc(Cursor& cur) {
    if (cur.starts_with("<!--")) {
        cur.skip(4);
        while (!cur.starts_with("-->")) {
            if (cur.eof()) cur.fail("unterminated comment");
            cur.advance();
        }
        cur.skip(3);
        return true;
    }
    if (cur.starts_with("<?")) {
        cur.skip(2);
        while (!cur.starts_with("?>")) {
            if (cur.eof()) cur.fail("unterminated processing instruction");
            cur.advance();
        }
        cur.skip(2);
        return true;
    }
    return false;
}

bool whitespace_only(std::string_view s) {
    for (char c : s)
        if (!is_space(c)) return false;
    return true;
}

Node parse_element(Cursor& cur); // forward

// Parses element content up to and including the matching end tag.
void parse_content(Cursor& cur, Node& node) {
    std::string text;
    bool had_cdata = false;
    while (true) {
        if (cur.eof()) cur.fail("unexpected end of input inside <" + node.name + ">");
        if (cur.starts_with("</")) {
            cur.skip(2);
            std::string name = parse_name(cur);
            if (name != node.name)
                cur.fail("mismatched end tag </" + name + "> for <" + node.name + ">");
            skip_whitespace(cur);
            if (cur.eof() || cur.peek() != '>') cur.fail("expected '>'");
            cur.advance();
            break;
        }
        if (cur.starts_with("<![CDATA[")) {
            cur.skip(9);
            while (!cur.starts_with("]]>")) {
                if (cur.eof()) cur.fail("unterminated CDATA section");
                text.push_back(cur.advance());
            }
            cur.skip(3);
            had_cdata = true;
            continue;
        }
        if (skip_misc(cur)) continue;
        if (cur.starts_with("<!")) cur.fail("declarations are not supported");
        if (cur.peek() == '<') {
            node.children.push_back(parse_element(cur));
            continue;
        }
        if (cur.peek() == '&') {
            cur.advance();
            parse_reference(cur, text);
            continue;
        }
        text.push_back(cur.advance());
    }
    if (!node.children.empty()) {
        if (!whitespace_only(text) || had_cdata)
            cur.fail("mixed content is not supported in <" + node.name + ">");
        return;
    }
    if (whitespace_only(text) && !had_cdata) return;
    node.text = std::move(text);
}

Node parse_element(Cursor& cur) {
    if (cur.eof() || cur.peek() != '<') cur.fail("expected '<'");
    cur.advance();
    Node node;
    node.name = parse_name(cur);
    while (true) {
        bool had_space = !cur.eof() && is_space(cur.peek());
        skip_whitespace(cur);
        if (cur.eof()) cur.fail("unterminated start tag");
        if (cur.starts_with("/>")) {
            cur.skip(2);
            return node;
        }
        if (cur.peek() == '>') {
            cur.advance();
            parse_content(cur, node);
            return node;
        }
        if (!had_space) cur.fail("expected whitespace before attribute");
        Attribute attr;
        attr.name = parse_name(cur);
        skip_whitespace(cur);
        if (cur.eof() || cur.peek() != '=') cur.fail("expected '=' after attribute name");
        cur.advance();
        skip_whitespace(cur);
        attr.value = parse_attribute_value(cur);
        for (const auto& existing : node.attributes)
            if (existing.name == attr.name)
                cur.fail("duplicate attribute '" + attr.name + "'");
        node.attributes.push_back(std::move(attr));
    }
}

void check_xml_declaration(Cursor& cur) {
    if (!cur.starts_with("<?xml")) return;
    size_t end = cur.input.find("?>", cur.pos);
    if (end == std::string_view::npos) cur.fail("unterminated XML declaration");
    std::string_view decl = cur.input.substr(cur.pos, end - cur.pos);
    size_t enc = decl.find("encoding");
    if (enc != std::string_view::npos) {
        std::string lowered(decl.substr(enc));
        for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (lowered.find("utf-8") == std::string::npos)
            cur.fail("only UTF-8 input is supported");
    }
    cur.skip(end + 2 - cur.pos);
}

void write_node(const Node& node, std::string& out, int depth) {
    out.append(static_cast<size_t>(depth) * 2, ' ');
    out.push_back('<');
    out.append(node.name);
    for (const auto& attr : node.attributes) {
        out.push_back(' ');
        out.append(attr.name);
        out.append("=\"");
        out.append(escape_attribute(attr.value));
        out.push_back('"');
    }
    if (node.children.empty() && node.text.empty()) {
        out.append("/>\n");
        return;
    }
    if (node.children.empty()) {
        out.push_back('>');
        out.append(escape_text(node.text));
        out.append("</");
        out.append(node.name);
        out.append(">\n");
        return;
    }
    out.append(">\n");
    for (const auto& child : node.children) write_node(child, out, depth + 1);
    out.append(static_cast<size_t>(depth) * 2, ' ');
    out.append("</");
    out.append(node.name);
    out.append(">\n");
}

} // namespace

const Attribute* Node::find_attribute(std::string_view attr_name) const {
    for (const auto& attr : attributes)
        if (attr.name == attr_name) return &attr;
    return nullptr;
}

Node parse(std::string_view bytes) {
    Cursor cur{bytes};
    if (cur.starts_with("\xEF\xBB\xBF")) cur.skip(3);
    check_xml_declaration(cur);
    while (true) {
        skip_whitespace(cur);
        if (cur.eof()) cur.fail("no root element");
        if (cur.starts_with("<!DOCTYPE") || cur.starts_with("<!doctype"))
            cur.fail("DTD is not supported");
        if (skip_misc(cur)) continue;
        break;
    }
    Node root = parse_element(cur);
    while (!cur.eof()) {
        skip_whitespace(cur);
        if (cur.eof()) break;
        if (skip_misc(cur)) continue;
        cur.fail("content after root element");
    }
    return root;
}

std::string serialize(const Node& root) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    write_node(root, out, 0);
    return out;
}

std::string escape_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out.append("&amp;"); break;
            case '<': out.append("&lt;"); break;
            case '>': out.append("&gt;"); break;
            case '\r': out.append("&#13;"); break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string escape_attribute(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out.append("&amp;"); break;
            case '<': out.append("&lt;"); break;
            case '>': out.append("&gt;"); break;
            case '"': out.append("&quot;"); break;
            case '\t': out.append("&#9;"); break;
            case '\n': out.append("&#10;"); break;
            case '\r': out.append("&#13;"); break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::pair<std::string, std::string> split_qname(std::string_view name) {
    size_t colon = name.find(':');
    if (colon == std::string_view::npos) return {"", std::string(name)};
    return {std::string(name.substr(0, colon)), std::string(name.substr(colon + 1))};
}

} // namespace bpmont::xml
