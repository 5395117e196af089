#include "doctrina/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "doctrina/bases.hpp"
#include "json.hpp"

namespace doctrina {

namespace {

bool same(const RawCategory& a, const RawCategory& b) {
    if (a.objects != b.objects || a.identities != b.identities) return false;
    if (a.morphisms.size() != b.morphisms.size() || a.compositions.size() != b.compositions.size()) return false;
    for (std::size_t i = 0; i < a.morphisms.size(); ++i) {
        const auto &x = a.morphisms[i], &y = b.morphisms[i];
        if (x.name != y.name || x.source != y.source || x.target != y.target) return false;
    }
    for (std::size_t i = 0; i < a.compositions.size(); ++i) {
        const auto &x = a.compositions[i], &y = b.compositions[i];
        if (x.g != y.g || x.f != y.f || x.result != y.result) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Text format: statements end at a newline, blocks are "head {" ... "}".

struct Token {
    std::string text;
    bool quoted = false;
    int line = 0;
    bool is(const char* s) const { return !quoted && text == s; }
};

const std::string kPunct = "{}:,=";

bool is_special(char ch) {
    return std::isspace(static_cast<unsigned char>(ch)) || kPunct.find(ch) != std::string::npos || ch == '"' ||
           ch == '#';
}

[[noreturn]] void parse_error(int line, const std::string& msg) {
    throw Error("ParseError", "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::vector<Token>> tokenize(const std::string& text) {
    std::vector<std::vector<Token>> lines;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::vector<Token> toks;
        std::size_t i = 0;
        while (i < raw.size()) {
            const char ch = raw[i];
            if (std::isspace(static_cast<unsigned char>(ch))) {
                ++i;
            } else if (ch == '#') {
                break;
            } else if (ch == '"') {
                std::string s;
                ++i;
                bool closed = false;
                while (i < raw.size()) {
                    if (raw[i] == '\\' && i + 1 < raw.size()) {
                        s += raw[i + 1];
                        i += 2;
                    } else if (raw[i] == '"') {
                        closed = true;
                        ++i;
                        break;
                    } else {
                        s += raw[i++];
                    }
                }
                if (!closed) parse_error(line, "unterminated string");
                toks.push_back({s, true, line});
            } else if (kPunct.find(ch) != std::string::npos) {
                toks.push_back({std::string(1, ch), false, line});
                ++i;
            } else {
                std::string s;
                while (i < raw.size() && !is_special(raw[i])) s += raw[i++];
                toks.push_back({s, false, line});
            }
        }
        if (!toks.empty()) lines.push_back(std::move(toks));
    }
    return lines;
}

struct Statement {
    std::vector<Token> words;
    std::vector<Statement> body;  // non-empty only for blocks
    bool block = false;
    int line = 0;
};

class TextParser {
public:
    explicit TextParser(const std::string& text) : lines_(tokenize(text)) {}

    std::vector<Statement> parse_all() {
        auto out = parse_until_close(false);
        return out;
    }

private:
    std::vector<std::vector<Token>> lines_;
    std::size_t pos_ = 0;

    std::vector<Statement> parse_until_close(bool nested) {
        std::vector<Statement> out;
        while (pos_ < lines_.size()) {
            auto toks = lines_[pos_++];
            if (toks.size() == 1 && toks[0].is("}")) {
                if (!nested) parse_error(toks[0].line, "unmatched '}'");
                return out;
            }
            Statement st;
            st.line = toks[0].line;
            if (toks.back().is("{")) {
                toks.pop_back();
                st.block = true;
                st.words = toks;
                st.body = parse_until_close(true);
            } else {
                for (const auto& t : toks)
                    if (t.is("{") || t.is("}")) parse_error(t.line, "braces must end a line or stand alone");
                st.words = toks;
            }
            out.push_back(std::move(st));
        }
        if (nested) parse_error(lines_.empty() ? 0 : lines_.back().back().line, "missing '}'");
        return out;
    }
};

// Cursor over the words of one statement.
struct Words {
    const Statement& st;
    std::size_t i = 0;

    bool done() const { return i >= st.words.size(); }
    const Token& peek() const {
        if (done()) parse_error(st.line, "unexpected end of statement");
        return st.words[i];
    }
    std::string name() {
        const auto& t = peek();
        if (!t.quoted && t.text.size() == 1 && kPunct.find(t.text[0]) != std::string::npos)
            parse_error(t.line, "expected a name, found '" + t.text + "'");
        ++i;
        return t.text;
    }
    void expect(const char* s) {
        const auto& t = peek();
        if (!t.is(s)) parse_error(t.line, std::string("expected '") + s + "', found '" + t.text + "'");
        ++i;
    }
    bool accept(const char* s) {
        if (!done() && peek().is(s)) {
            ++i;
            return true;
        }
        return false;
    }
    // name (',' name)* up to the end of the statement; empty list allowed.
    std::vector<std::string> list() {
        std::vector<std::string> out;
        if (done()) return out;
        out.push_back(name());
        while (accept(",")) out.push_back(name());
        end();
        return out;
    }
    void end() const {
        if (!done()) parse_error(peek().line, "unexpected '" + peek().text + "'");
    }
};

std::string keyword(const Statement& st) {
    if (st.words.empty() || st.words[0].quoted) parse_error(st.line, "expected a keyword");
    return st.words[0].text;
}

void parse_category(const Statement& st, Words& head, InstanceFile& out) {
    NamedCategory c;
    c.name = head.name();
    head.end();
    for (const auto& s : st.body) {
        Words w{s};
        const std::string k = w.name();
        if (k == "objects") {
            w.expect(":");
            for (auto& o : w.list()) c.raw.objects.push_back(o);
        } else if (k == "morphism") {
            RawCategory::Morphism m;
            m.name = w.name();
            w.expect(":");
            m.source = w.name();
            w.expect("->");
            m.target = w.name();
            w.end();
            c.raw.morphisms.push_back(m);
        } else if (k == "identity") {
            const auto o = w.name();
            w.expect(":");
            const auto m = w.name();
            w.end();
            c.raw.identities.emplace_back(o, m);
        } else if (k == "compose") {
            RawCategory::Composite e;
            e.g = w.name();
            e.f = w.name();
            w.expect("=");
            e.result = w.name();
            w.end();
            c.raw.compositions.push_back(e);
        } else {
            parse_error(s.line, "unknown category entry '" + k + "'");
        }
    }
    out.categories.push_back(std::move(c));
}

void parse_finsets(const Statement& st, Words& head, InstanceFile& out) {
    RawFinSets r;
    r.name = head.name();
    head.end();
    for (const auto& s : st.body) {
        Words w{s};
        const std::string k = w.name();
        w.expect(":");
        if (k == "sizes") {
            for (const auto& v : w.list()) {
                std::size_t used = 0;
                int n = -1;
                try {
                    n = std::stoi(v, &used);
                } catch (const std::exception&) {
                }
                if (n < 0 || used != v.size()) parse_error(s.line, "expected a cardinality, found '" + v + "'");
                r.sizes.push_back(n);
            }
        } else if (k == "stable") {
            const auto v = w.name();
            w.end();
            if (v != "yes" && v != "no") parse_error(s.line, "expected yes or no, found '" + v + "'");
            r.stable = v == "yes";
        } else {
            parse_error(s.line, "unknown sets entry '" + k + "'");
        }
    }
    out.finsets.push_back(std::move(r));
}

void parse_semilattice(const Statement& st, Words& head, InstanceFile& out) {
    NamedSemilattice l;
    l.name = head.name();
    head.end();
    for (const auto& s : st.body) {
        Words w{s};
        const std::string k = w.name();
        if (k == "elements") {
            w.expect(":");
            l.raw.elements = w.list();
        } else if (k == "leq") {
            const auto x = w.name();
            const auto y = w.name();
            w.end();
            l.raw.leq.emplace_back(x, y);
        } else {
            parse_error(s.line, "unknown semilattice entry '" + k + "'");
        }
    }
    out.semilattices.push_back(std::move(l));
}

void parse_structure(const Statement& st, Words& head, InstanceFile& out) {
    RawStructure r;
    r.name = head.name();
    head.expect("on");
    r.category = head.name();
    head.end();
    for (const auto& s : st.body) {
        Words w{s};
        const std::string k = w.name();
        if (k == "terminal") {
            w.expect(":");
            r.terminal = w.name();
            w.end();
        } else if (k == "product") {
            RawProduct p;
            p.a = w.name();
            p.b = w.name();
            w.expect("=");
            p.vertex = w.name();
            w.expect(":");
            p.pr1 = w.name();
            w.expect(",");
            p.pr2 = w.name();
            w.end();
            r.products.push_back(p);
        } else if (k == "pullback") {
            RawPullback p;
            p.f = w.name();
            p.g = w.name();
            w.expect("=");
            p.vertex = w.name();
            w.expect(":");
            p.to_c = w.name();
            w.expect(",");
            p.to_a = w.name();
            w.end();
            r.pullbacks.push_back(p);
        } else {
            parse_error(s.line, "unknown structure entry '" + k + "'");
        }
    }
    out.structures.push_back(std::move(r));
}

void parse_class(const Statement& st, Words& head, InstanceFile& out) {
    RawClass r;
    r.name = head.name();
    head.expect("on");
    r.category = head.name();
    head.end();
    for (const auto& s : st.body) {
        Words w{s};
        const std::string k = w.name();
        w.expect(":");
        if (k == "preset") {
            r.preset = w.name();
            w.end();
        } else if (k == "members") {
            r.members = w.list();
        } else {
            parse_error(s.line, "unknown class entry '" + k + "'");
        }
    }
    out.classes.push_back(std::move(r));
}

void parse_doctrine(const Statement& st, Words& head, InstanceFile& out) {
    RawDoctrine r;
    r.name = head.name();
    head.expect("on");
    r.on = head.name();
    head.end();
    for (const auto& s : st.body) {
        Words w{s};
        const std::string k = w.name();
        const auto subject = w.name();
        w.expect(":");
        if (k == "fibre") {
            const auto l = w.name();
            w.end();
            r.fibres.emplace_back(subject, l);
        } else if (k == "reindex") {
            r.reindex.emplace_back(subject, w.list());
        } else {
            parse_error(s.line, "unknown doctrine entry '" + k + "'");
        }
    }
    out.doctrines.push_back(std::move(r));
}

void parse_selection(const Statement& st, Words& head, InstanceFile& out) {
    RawSelection r;
    r.name = head.name();
    head.expect("of");
    r.doctrine = head.name();
    head.end();
    for (const auto& s : st.body) {
        Words w{s};
        const std::string k = w.name();
        if (k != "at") parse_error(s.line, "unknown selection entry '" + k + "'");
        const auto o = w.name();
        w.expect(":");
        r.elements.emplace_back(o, w.list());
    }
    out.selections.push_back(std::move(r));
}

void parse_bundle(const Statement& st, Words& head, InstanceFile& out) {
    RawBundle r;
    r.name = head.name();
    head.end();
    for (const auto& s : st.body) {
        Words w{s};
        const std::string k = w.name();
        w.expect(":");
        const auto v = w.name();
        w.end();
        if (k == "doctrine") r.doctrine = v;
        else if (k == "selection") r.selection = v;
        else if (k == "semilattice") r.semilattice = v;
        else if (k == "description") r.description = v;
        else parse_error(s.line, "unknown bundle entry '" + k + "'");
    }
    out.bundles.push_back(std::move(r));
}

// ---------------------------------------------------------------------------
// Serialization helpers

std::string quote(const std::string& s) {
    bool plain = !s.empty() && s != "->" && s != "on" && s != "of";
    for (char ch : s)
        if (is_special(ch)) plain = false;
    if (plain) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + quote(xs[i]);
    return out;
}

using nlohmann::ordered_json;

ordered_json strings(const std::vector<std::string>& xs) { return ordered_json(xs); }

std::vector<std::string> get_strings(const ordered_json& j) {
    std::vector<std::string> out;
    for (const auto& x : j) out.push_back(x.get<std::string>());
    return out;
}

std::optional<std::string> opt(const ordered_json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<std::string>();
}

}  // namespace

bool operator==(const InstanceFile& a, const InstanceFile& b) {
    if (a.categories.size() != b.categories.size()) return false;
    for (std::size_t i = 0; i < a.categories.size(); ++i)
        if (a.categories[i].name != b.categories[i].name || !same(a.categories[i].raw, b.categories[i].raw))
            return false;
    if (a.finsets != b.finsets || a.semilattices.size() != b.semilattices.size()) return false;
    for (std::size_t i = 0; i < a.semilattices.size(); ++i)
        if (a.semilattices[i].name != b.semilattices[i].name ||
            a.semilattices[i].raw.elements != b.semilattices[i].raw.elements ||
            a.semilattices[i].raw.leq != b.semilattices[i].raw.leq)
            return false;
    return a.structures == b.structures && a.classes == b.classes && a.doctrines == b.doctrines &&
           a.selections == b.selections && a.bundles == b.bundles;
}

InstanceFile parse_instance_text(const std::string& text) {
    InstanceFile out;
    TextParser parser(text);
    for (const auto& st : parser.parse_all()) {
        const std::string k = keyword(st);
        if (!st.block) parse_error(st.line, "expected a block after '" + k + "'");
        Words head{st, 1};
        if (k == "category") parse_category(st, head, out);
        else if (k == "sets") parse_finsets(st, head, out);
        else if (k == "semilattice") parse_semilattice(st, head, out);
        else if (k == "structure") parse_structure(st, head, out);
        else if (k == "class") parse_class(st, head, out);
        else if (k == "doctrine") parse_doctrine(st, head, out);
        else if (k == "selection") parse_selection(st, head, out);
        else if (k == "bundle") parse_bundle(st, head, out);
        else parse_error(st.line, "unknown block '" + k + "'");
    }
    return out;
}

InstanceFile parse_instance_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("ParseError", std::string("json: ") + e.what());
    }
    InstanceFile out;
    try {
        if (j.value("schema", "") != "doctrina-instance/1") throw Error("ParseError", "json: unknown schema");
        for (const auto& c : j.value("categories", ordered_json::array())) {
            NamedCategory nc;
            nc.name = c.at("name").get<std::string>();
            nc.raw.objects = get_strings(c.at("objects"));
            for (const auto& m : c.at("morphisms"))
                nc.raw.morphisms.push_back({m.at("name"), m.at("source"), m.at("target")});
            for (const auto& id : c.value("identities", ordered_json::array()))
                nc.raw.identities.emplace_back(id.at("object"), id.at("morphism"));
            for (const auto& e : c.value("compose", ordered_json::array()))
                nc.raw.compositions.push_back({e.at("g"), e.at("f"), e.at("result")});
            out.categories.push_back(std::move(nc));
        }
        for (const auto& c : j.value("sets", ordered_json::array()))
            out.finsets.push_back({c.at("name"), c.at("sizes").get<std::vector<int>>(), c.value("stable", false)});
        for (const auto& l : j.value("semilattices", ordered_json::array())) {
            NamedSemilattice nl;
            nl.name = l.at("name").get<std::string>();
            nl.raw.elements = get_strings(l.at("elements"));
            for (const auto& p : l.value("leq", ordered_json::array()))
                nl.raw.leq.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
            out.semilattices.push_back(std::move(nl));
        }
        for (const auto& s : j.value("structures", ordered_json::array())) {
            RawStructure r{s.at("name"), s.at("category"), opt(s, "terminal"), {}, {}};
            for (const auto& p : s.value("products", ordered_json::array()))
                r.products.push_back({p.at("a"), p.at("b"), p.at("vertex"), p.at("pr1"), p.at("pr2")});
            for (const auto& p : s.value("pullbacks", ordered_json::array()))
                r.pullbacks.push_back({p.at("f"), p.at("g"), p.at("vertex"), p.at("to_c"), p.at("to_a")});
            out.structures.push_back(std::move(r));
        }
        for (const auto& c : j.value("classes", ordered_json::array()))
            out.classes.push_back(
                {c.at("name"), c.at("category"), opt(c, "preset"), get_strings(c.value("members", ordered_json::array()))});
        for (const auto& d : j.value("doctrines", ordered_json::array())) {
            RawDoctrine r{d.at("name"), d.at("on"), {}, {}};
            for (const auto& f : d.at("fibres")) r.fibres.emplace_back(f.at("object"), f.at("semilattice"));
            for (const auto& t : d.value("reindex", ordered_json::array()))
                r.reindex.emplace_back(t.at("morphism"), get_strings(t.at("images")));
            out.doctrines.push_back(std::move(r));
        }
        for (const auto& s : j.value("selections", ordered_json::array())) {
            RawSelection r{s.at("name"), s.at("doctrine"), {}};
            for (const auto& e : s.at("elements")) r.elements.emplace_back(e.at("object"), get_strings(e.at("elements")));
            out.selections.push_back(std::move(r));
        }
        for (const auto& b : j.value("bundles", ordered_json::array()))
            out.bundles.push_back({b.at("name"), b.value("description", ""), opt(b, "doctrine"), opt(b, "selection"),
                                   opt(b, "semilattice")});
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("json: ") + e.what());
    }
    return out;
}

InstanceFile parse_instance(const std::string& text) {
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        if (ch == '{') return parse_instance_json(text);
        break;
    }
    return parse_instance_text(text);
}

InstanceFile load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("ParseError", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

std::string serialize_text(const InstanceFile& f) {
    std::ostringstream o;
    for (const auto& c : f.categories) {
        o << "category " << quote(c.name) << " {\n";
        o << "  objects: " << join(c.raw.objects) << "\n";
        for (const auto& m : c.raw.morphisms)
            o << "  morphism " << quote(m.name) << ": " << quote(m.source) << " -> " << quote(m.target) << "\n";
        for (const auto& [obj, m] : c.raw.identities) o << "  identity " << quote(obj) << ": " << quote(m) << "\n";
        for (const auto& e : c.raw.compositions)
            o << "  compose " << quote(e.g) << " " << quote(e.f) << " = " << quote(e.result) << "\n";
        o << "}\n\n";
    }
    for (const auto& c : f.finsets) {
        o << "sets " << quote(c.name) << " {\n  sizes: ";
        for (std::size_t i = 0; i < c.sizes.size(); ++i) o << (i ? ", " : "") << c.sizes[i];
        o << "\n  stable: " << (c.stable ? "yes" : "no") << "\n}\n\n";
    }
    for (const auto& l : f.semilattices) {
        o << "semilattice " << quote(l.name) << " {\n";
        o << "  elements: " << join(l.raw.elements) << "\n";
        for (const auto& [x, y] : l.raw.leq) o << "  leq " << quote(x) << " " << quote(y) << "\n";
        o << "}\n\n";
    }
    for (const auto& s : f.structures) {
        o << "structure " << quote(s.name) << " on " << quote(s.category) << " {\n";
        if (s.terminal) o << "  terminal: " << quote(*s.terminal) << "\n";
        for (const auto& p : s.products)
            o << "  product " << quote(p.a) << " " << quote(p.b) << " = " << quote(p.vertex) << ": " << quote(p.pr1)
              << ", " << quote(p.pr2) << "\n";
        for (const auto& p : s.pullbacks)
            o << "  pullback " << quote(p.f) << " " << quote(p.g) << " = " << quote(p.vertex) << ": "
              << quote(p.to_c) << ", " << quote(p.to_a) << "\n";
        o << "}\n\n";
    }
    for (const auto& c : f.classes) {
        o << "class " << quote(c.name) << " on " << quote(c.category) << " {\n";
        if (c.preset) o << "  preset: " << quote(*c.preset) << "\n";
        if (!c.members.empty()) o << "  members: " << join(c.members) << "\n";
        o << "}\n\n";
    }
    for (const auto& d : f.doctrines) {
        o << "doctrine " << quote(d.name) << " on " << quote(d.on) << " {\n";
        for (const auto& [obj, l] : d.fibres) o << "  fibre " << quote(obj) << ": " << quote(l) << "\n";
        for (const auto& [m, images] : d.reindex) o << "  reindex " << quote(m) << ": " << join(images) << "\n";
        o << "}\n\n";
    }
    for (const auto& s : f.selections) {
        o << "selection " << quote(s.name) << " of " << quote(s.doctrine) << " {\n";
        for (const auto& [obj, xs] : s.elements) o << "  at " << quote(obj) << ": " << join(xs) << "\n";
        o << "}\n\n";
    }
    for (const auto& b : f.bundles) {
        o << "bundle " << quote(b.name) << " {\n";
        if (!b.description.empty()) o << "  description: " << quote(b.description) << "\n";
        if (b.doctrine) o << "  doctrine: " << quote(*b.doctrine) << "\n";
        if (b.selection) o << "  selection: " << quote(*b.selection) << "\n";
        if (b.semilattice) o << "  semilattice: " << quote(*b.semilattice) << "\n";
        o << "}\n\n";
    }
    return o.str();
}

std::string serialize_json(const InstanceFile& f) {
    ordered_json j;
    j["schema"] = "doctrina-instance/1";
    j["categories"] = ordered_json::array();
    for (const auto& c : f.categories) {
        ordered_json x;
        x["name"] = c.name;
        x["objects"] = strings(c.raw.objects);
        x["morphisms"] = ordered_json::array();
        for (const auto& m : c.raw.morphisms)
            x["morphisms"].push_back({{"name", m.name}, {"source", m.source}, {"target", m.target}});
        x["identities"] = ordered_json::array();
        for (const auto& [obj, m] : c.raw.identities) x["identities"].push_back({{"object", obj}, {"morphism", m}});
        x["compose"] = ordered_json::array();
        for (const auto& e : c.raw.compositions) x["compose"].push_back({{"g", e.g}, {"f", e.f}, {"result", e.result}});
        j["categories"].push_back(x);
    }
    j["sets"] = ordered_json::array();
    for (const auto& c : f.finsets) j["sets"].push_back({{"name", c.name}, {"sizes", c.sizes}, {"stable", c.stable}});
    j["semilattices"] = ordered_json::array();
    for (const auto& l : f.semilattices) {
        ordered_json leq = ordered_json::array();
        for (const auto& [x, y] : l.raw.leq) leq.push_back({x, y});
        j["semilattices"].push_back({{"name", l.name}, {"elements", strings(l.raw.elements)}, {"leq", leq}});
    }
    j["structures"] = ordered_json::array();
    for (const auto& s : f.structures) {
        ordered_json x{{"name", s.name}, {"category", s.category}};
        if (s.terminal) x["terminal"] = *s.terminal;
        x["products"] = ordered_json::array();
        for (const auto& p : s.products)
            x["products"].push_back({{"a", p.a}, {"b", p.b}, {"vertex", p.vertex}, {"pr1", p.pr1}, {"pr2", p.pr2}});
        x["pullbacks"] = ordered_json::array();
        for (const auto& p : s.pullbacks)
            x["pullbacks"].push_back({{"f", p.f}, {"g", p.g}, {"vertex", p.vertex}, {"to_c", p.to_c}, {"to_a", p.to_a}});
        j["structures"].push_back(x);
    }
    j["classes"] = ordered_json::array();
    for (const auto& c : f.classes) {
        ordered_json x{{"name", c.name}, {"category", c.category}};
        if (c.preset) x["preset"] = *c.preset;
        x["members"] = strings(c.members);
        j["classes"].push_back(x);
    }
    j["doctrines"] = ordered_json::array();
    for (const auto& d : f.doctrines) {
        ordered_json x{{"name", d.name}, {"on", d.on}, {"fibres", ordered_json::array()}, {"reindex", ordered_json::array()}};
        for (const auto& [obj, l] : d.fibres) x["fibres"].push_back({{"object", obj}, {"semilattice", l}});
        for (const auto& [m, images] : d.reindex) x["reindex"].push_back({{"morphism", m}, {"images", strings(images)}});
        j["doctrines"].push_back(x);
    }
    j["selections"] = ordered_json::array();
    for (const auto& s : f.selections) {
        ordered_json x{{"name", s.name}, {"doctrine", s.doctrine}, {"elements", ordered_json::array()}};
        for (const auto& [obj, xs] : s.elements) x["elements"].push_back({{"object", obj}, {"elements", strings(xs)}});
        j["selections"].push_back(x);
    }
    j["bundles"] = ordered_json::array();
    for (const auto& b : f.bundles) {
        ordered_json x{{"name", b.name}, {"description", b.description}};
        if (b.doctrine) x["doctrine"] = *b.doctrine;
        if (b.selection) x["selection"] = *b.selection;
        if (b.semilattice) x["semilattice"] = *b.semilattice;
        j["bundles"].push_back(x);
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Resolution

namespace {

constexpr double kMaxSetsArrows = 4096;

template <class Map>
const typename Map::mapped_type& lookup(const Map& m, const std::string& name, const std::string& kind) {
    auto it = m.find(name);
    if (it == m.end()) throw Error("UnresolvedRef", kind + " '" + name + "'");
    return it->second;
}

// Identity composites may be left out of a hand-written category.
RawCategory with_unit_composites(RawCategory raw) {
    std::map<std::string, std::string> id_of;
    for (const auto& [o, m] : raw.identities) id_of[o] = m;
    std::set<std::pair<std::string, std::string>> given;
    for (const auto& e : raw.compositions) given.insert({e.g, e.f});
    for (const auto& m : raw.morphisms) {
        auto s = id_of.find(m.source), t = id_of.find(m.target);
        if (s != id_of.end() && !given.count({m.name, s->second})) {
            raw.compositions.push_back({m.name, s->second, m.name});
            given.insert({m.name, s->second});
        }
        if (t != id_of.end() && !given.count({t->second, m.name})) {
            raw.compositions.push_back({t->second, m.name, m.name});
            given.insert({t->second, m.name});
        }
    }
    return raw;
}

LeftClass preset_class(const std::string& preset, const StructurePtr& s) {
    const auto& c = s->category();
    if (preset == "all") return all_morphisms(c);
    if (preset == "identities") return identities_class(c);
    if (preset == "isos") return isos_class(c);
    if (preset == "monos") return monos_class(c);
    if (preset == "projections") return projections_class(*s);
    throw Error("UnresolvedRef", "class preset '" + preset + "'");
}

}  // namespace

const Bundle& Instance::bundle(const std::string& name) const {
    for (const auto& b : bundles)
        if (b.name == name) return b;
    throw Error("UnresolvedRef", "bundle '" + name + "'");
}

Instance resolve_instance(const InstanceFile& f) {
    Instance in;
    for (const auto& c : f.categories) {
        auto cat = std::make_shared<const FinCategory>(validate_category(with_unit_composites(c.raw)));
        in.categories[c.name] = cat;
        in.structures[c.name] = std::make_shared<const ChosenStructure>(cat);
    }
    for (const auto& c : f.finsets) {
        double arrows = 0;
        for (int a : c.sizes)
            for (int b : c.sizes) arrows += std::pow(static_cast<double>(b), a);
        if (arrows > kMaxSetsArrows)
            throw Error("SizeCap", "sets '" + c.name + "' would have " + std::to_string(static_cast<long long>(arrows)) +
                                       " arrows");
        auto cat = std::make_shared<const FinCategory>(finite_sets(c.sizes, c.stable).category);
        in.categories[c.name] = cat;
        in.structures[c.name] = std::make_shared<const ChosenStructure>(cat);
    }
    for (const auto& l : f.semilattices) in.semilattices[l.name] = validate_semilattice(l.raw);
    for (const auto& s : f.structures) {
        const auto& cat = lookup(in.categories, s.category, "category");
        auto cs = std::make_shared<ChosenStructure>(cat);
        if (s.terminal) cs->set_terminal(cat->object(*s.terminal));
        for (const auto& p : s.products)
            cs->set_product(cat->object(p.a), cat->object(p.b),
                            {cat->object(p.vertex), cat->morphism(p.pr1), cat->morphism(p.pr2)});
        for (const auto& p : s.pullbacks)
            cs->set_pullback(cat->morphism(p.f), cat->morphism(p.g),
                             {cat->object(p.vertex), cat->morphism(p.to_c), cat->morphism(p.to_a)});
        in.structures[s.name] = cs;
    }
    for (const auto& c : f.classes) {
        const auto& s = lookup(in.structures, c.category, "category");
        LeftClass l;
        if (c.preset) {
            l = preset_class(*c.preset, s);
        } else {
            l.members.assign(s->category().num_morphisms(), false);
            for (const auto& m : c.members) l.members[s->category().morphism(m)] = true;
        }
        l.name = c.name;
        in.classes[c.name] = l;
    }
    for (const auto& d : f.doctrines) {
        const auto& s = lookup(in.structures, d.on, "structure");
        std::vector<std::pair<std::string, InfSemilattice>> fibres;
        for (const auto& [obj, l] : d.fibres) {
            s->category().object(obj);
            fibres.emplace_back(obj, lookup(in.semilattices, l, "semilattice"));
        }
        in.doctrines[d.name] = doctrine_from_tables(s, fibres, d.reindex);
    }
    for (const auto& sel : f.selections) {
        const auto& p = lookup(in.doctrines, sel.doctrine, "doctrine");
        Selection out(p.base().num_objects());
        for (const auto& [obj, xs] : sel.elements) {
            const ObjId a = p.base().object(obj);
            for (const auto& x : xs) out[a].push_back(p.fibre(a).element(x));
        }
        in.selections[sel.name] = out;
    }
    std::set<std::string> covered;
    for (const auto& b : f.bundles) {
        Bundle out{b.name, b.description, std::nullopt, std::nullopt, std::nullopt};
        if (b.doctrine) {
            out.doctrine = lookup(in.doctrines, *b.doctrine, "doctrine");
            covered.insert(*b.doctrine);
        }
        if (b.selection) out.sub = lookup(in.selections, *b.selection, "selection");
        if (b.semilattice) {
            out.semilattice = lookup(in.semilattices, *b.semilattice, "semilattice");
            covered.insert(*b.semilattice);
        }
        in.bundles.push_back(std::move(out));
    }
    for (const auto& d : f.doctrines)
        if (!covered.count(d.name)) in.bundles.push_back({d.name, "", in.doctrines.at(d.name), std::nullopt, std::nullopt});
    for (const auto& d : f.doctrines)
        for (const auto& fibre : d.fibres) covered.insert(fibre.second);
    for (const auto& l : f.semilattices)
        if (!covered.count(l.name))
            in.bundles.push_back({l.name, "", std::nullopt, std::nullopt, in.semilattices.at(l.name)});
    return in;
}

InstanceFile export_bundles(const std::vector<Bundle>& bundles) {
    InstanceFile f;
    for (const auto& b : bundles) {
        RawBundle rb{b.name, b.description, std::nullopt, std::nullopt, std::nullopt};
        if (b.doctrine) {
            const auto& p = *b.doctrine;
            const auto& c = p.base();
            f.categories.push_back({b.name, c.to_raw()});
            RawDoctrine d{b.name, b.name, {}, {}};
            for (ObjId a = 0; a < c.num_objects(); ++a) {
                const std::string lname = b.name + "/" + c.object_name(a);
                f.semilattices.push_back({lname, p.fibre(a).to_raw()});
                d.fibres.emplace_back(c.object_name(a), lname);
            }
            for (MorId m = 0; m < c.num_morphisms(); ++m) {
                if (c.is_identity(m)) continue;
                std::vector<std::string> images;
                const auto& src = p.fibre(c.source(m));
                for (ElemId x = 0; x < p.fibre(c.target(m)).size(); ++x) images.push_back(src.name(p.reindex(m, x)));
                d.reindex.emplace_back(c.morphism_name(m), images);
            }
            f.doctrines.push_back(d);
            rb.doctrine = b.name;
            if (b.sub) {
                RawSelection s{b.name, b.name, {}};
                for (ObjId a = 0; a < c.num_objects(); ++a) {
                    std::vector<std::string> xs;
                    for (ElemId x : (*b.sub)[a]) xs.push_back(p.fibre(a).name(x));
                    s.elements.emplace_back(c.object_name(a), xs);
                }
                f.selections.push_back(s);
                rb.selection = b.name;
            }
        }
        if (b.semilattice) {
            const std::string lname = b.doctrine ? b.name + "/values" : b.name;
            f.semilattices.push_back({lname, b.semilattice->to_raw()});
            rb.semilattice = lname;
        }
        f.bundles.push_back(rb);
    }
    return f;
}

}  // namespace doctrina
