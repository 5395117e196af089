#include "doctrina/cli.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "doctrina/analysis.hpp"
#include "doctrina/bases.hpp"
#include "doctrina/examples.hpp"
#include "doctrina/io.hpp"
#include "json.hpp"

namespace doctrina {

namespace {

using json = nlohmann::ordered_json;

struct Options {
    std::string klass;
    std::size_t budget = kDefaultBudget;
    std::size_t cap = kDefaultCap;
    std::string format = "text";
    std::string instance;
    std::string output;
};

// Verdicts in increasing severity; the report keeps the worst one seen.
enum class Verdict { Pass, Unverifiable, Fail };

struct Report {
    std::vector<std::string> command;
    Verdict verdict = Verdict::Pass;
    std::vector<std::string> lines;
    json result = json::object();
    std::vector<Violation> witnesses;
    std::vector<std::string> unverifiable;
    std::optional<Error> error;

    void line(std::string s) { lines.push_back(std::move(s)); }
    void worsen(Verdict v) {
        if (v > verdict) verdict = v;
    }
    void expect(bool ok, const std::string& what) {
        line(what + (ok ? ": yes" : ": no"));
        if (!ok) worsen(Verdict::Fail);
    }
    void missing(const std::string& what) {
        unverifiable.push_back(what);
        worsen(Verdict::Unverifiable);
    }
    void add_witnesses(const std::vector<Violation>& vs) { witnesses.insert(witnesses.end(), vs.begin(), vs.end()); }
};

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
    return out;
}

// ---------------------------------------------------------------------------
// Name resolution: an instance file first, then the built-in pack.

class Context {
public:
    explicit Context(const Options& o) : opts_(o) {
        if (!o.instance.empty()) instance_ = resolve_instance(load_instance(o.instance));
    }

    const Options& opts() const { return opts_; }

    Bundle bundle(const std::string& name) const {
        if (instance_)
            for (const auto& b : instance_->bundles)
                if (b.name == name) return b;
        if (auto b = find_example(name)) return *b;
        throw Error("UnresolvedRef", "bundle '" + name + "'");
    }

    Doctrine doctrine(const std::string& ref) const {
        for (const std::string prefix : {"Ψ_", "Psi_", "Υ_", "Upsilon_", "Sub_"}) {
            if (ref.rfind(prefix, 0) != 0) continue;
            auto s = structure(ref.substr(prefix.size()));
            const auto& c = s->category();
            if (prefix == "Ψ_" || prefix == "Psi_") return weak_subobjects_doctrine(s, all_morphisms(c));
            if (prefix == "Sub_") return m_subobjects_doctrine(s, monos_class(c));
            return trivial_doctrine(s);
        }
        auto b = bundle(ref);
        if (!b.doctrine) throw Error("MissingStructure", "bundle '" + ref + "' has no doctrine");
        return *b.doctrine;
    }

    StructurePtr structure(const std::string& name) const {
        if (instance_) {
            auto it = instance_->structures.find(name);
            if (it != instance_->structures.end()) return it->second;
        }
        if (auto c = find_category(name)) return structure_of(std::move(*c));
        throw Error("UnresolvedRef", "category '" + name + "'");
    }

    LeftClass klass(const Doctrine& p, const std::string& name) const {
        const auto& c = p.base();
        if (name.empty() || name == "all" || name == "full") return all_morphisms(c);
        if (name == "pure" || name == "projections") return projections_class(p.structure());
        if (name == "identities") return identities_class(c);
        if (name == "isos") return isos_class(c);
        if (name == "monos") return monos_class(c);
        if (name == "comprehensions") return comprehension_class(p);
        if (instance_) {
            auto it = instance_->classes.find(name);
            if (it != instance_->classes.end()) {
                if (it->second.members.size() != static_cast<std::size_t>(c.num_morphisms()))
                    throw Error("UnresolvedRef", "class '" + name + "' lives over another category");
                return it->second;
            }
        }
        throw Error("UnresolvedRef", "class '" + name + "'");
    }

    std::vector<Bundle> corpus() const { return instance_ ? instance_->bundles : full_corpus(); }

private:
    Options opts_;
    std::optional<Instance> instance_;
};

// ---------------------------------------------------------------------------
// Shared printing

json names_of(const FinCategory& c) {
    json xs = json::array();
    for (ObjId a = 0; a < c.num_objects(); ++a) xs.push_back(c.object_name(a));
    return xs;
}

void describe_category(Report& r, const std::string& label, const FinCategory& c) {
    const auto skel = skeleton_objects(c);
    r.line(label + ": " + std::to_string(c.num_objects()) + " objects, " + std::to_string(c.num_morphisms()) +
           " arrows, skeleton " + std::to_string(skel.size()));
    std::vector<std::string> names;
    for (ObjId a : skel) names.push_back(c.object_name(a));
    r.line("  skeleton objects: " + join(names, ", "));
    r.result[label] = {{"objects", c.num_objects()},
                       {"arrows", c.num_morphisms()},
                       {"skeleton", skel.size()},
                       {"skeleton_objects", names},
                       {"object_names", names_of(c)}};
}

json describe_doctrine(Report& r, const Doctrine& p) {
    const auto& c = p.base();
    json fibres = json::object();
    std::vector<std::string> parts;
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        fibres[c.object_name(a)] = p.fibre(a).size();
        parts.push_back(c.object_name(a) + "=" + std::to_string(p.fibre(a).size()));
    }
    r.line("base: " + std::to_string(c.num_objects()) + " objects, " + std::to_string(c.num_morphisms()) + " arrows");
    r.line("fibre sizes: " + join(parts, " "));
    return {{"objects", c.num_objects()}, {"arrows", c.num_morphisms()}, {"fibres", fibres}};
}

std::string split_text(const Doctrine& p, ObjId a, ElemId x, const SplitWitness& w) {
    const auto& c = p.base();
    std::string s = p.fibre(a).name(x) + " at " + c.object_name(a);
    if (w.via != kNoMorphism && !c.is_identity(w.via)) s += " via " + c.morphism_name(w.via);
    return s + ": (" + c.morphism_name(w.g) + ", " + p.fibre(c.source(w.g)).name(w.beta) + ")";
}

json selection_json(const Doctrine& p, const Selection& sel) {
    json out = json::object();
    for (ObjId a = 0; a < p.base().num_objects(); ++a) {
        json xs = json::array();
        for (ElemId x : sel[a]) xs.push_back(p.fibre(a).name(x));
        out[p.base().object_name(a)] = xs;
    }
    return out;
}

void print_selection(Report& r, const std::string& label, const Doctrine& p, const Selection& sel) {
    for (ObjId a = 0; a < p.base().num_objects(); ++a) {
        std::vector<std::string> xs;
        for (ElemId x : sel[a]) xs.push_back(p.fibre(a).name(x));
        r.line(label + " at " + p.base().object_name(a) + ": " + (xs.empty() ? "(none)" : join(xs, ", ")));
    }
}

// ---------------------------------------------------------------------------
// Verbs

void cmd_check(const Context& ctx, const std::vector<std::string>& names, Report& r) {
    std::vector<Bundle> bundles;
    if (names.empty()) bundles = ctx.corpus();
    for (const auto& n : names) bundles.push_back(ctx.bundle(n));
    json out = json::array();
    for (const auto& b : bundles) {
        json entry{{"bundle", b.name}};
        if (b.doctrine) {
            const auto& p = *b.doctrine;
            const auto v = doctrine_violations(p);
            const auto lambda = ctx.klass(p, ctx.opts().klass);
            const auto lc = verify_left_class(p.structure(), lambda);
            const auto ex = check_lambda_existential(p, lambda);
            std::vector<std::string> sizes;
            for (ObjId a = 0; a < p.base().num_objects(); ++a) sizes.push_back(std::to_string(p.fibre(a).size()));
            r.line(b.name + ": doctrine over " + std::to_string(p.base().num_objects()) + " objects and " +
                   std::to_string(p.base().num_morphisms()) + " arrows, fibres " + join(sizes, "/"));
            r.expect(v.empty(), "  " + b.name + " doctrine laws");
            r.add_witnesses(v);
            r.expect(lc.ok(), "  " + b.name + " left class " + lambda.name);
            r.add_witnesses(lc.counterexamples);
            r.line("  " + b.name + " existential along " + lambda.name + ": " + (ex.ok() ? "yes" : "no"));
            for (const auto& u : ex.unverifiable) r.unverifiable.push_back(b.name + ": " + u);
            entry["doctrine_laws"] = v.empty();
            entry["left_class"] = lc.ok();
            entry["existential"] = ex.ok();
        }
        if (b.sub) {
            r.line("  " + b.name + " selection: " + std::to_string(b.sub->size()) + " objects");
            entry["selection"] = true;
        }
        if (b.semilattice) {
            const auto& l = *b.semilattice;
            bool distributive = true;
            try {
                FiniteFrame f(l);
            } catch (const Error&) {
                distributive = false;
            }
            r.line(b.name + ": semilattice with " + std::to_string(l.size()) + " elements" +
                   (distributive ? ", a frame" : ", not distributive"));
            entry["semilattice"] = l.size();
            entry["frame"] = distributive;
        }
        out.push_back(entry);
    }
    r.result["bundles"] = out;
}

void cmd_complete(const Context& ctx, const std::string& name, Report& r) {
    const auto p = ctx.doctrine(name);
    const std::string k = ctx.opts().klass.empty() ? "full" : ctx.opts().klass;
    const auto lambda = ctx.klass(p, k);
    require_left_class(p.structure(), lambda);
    const auto e = existential_completion(p, lambda, ctx.opts().cap);
    r.line("completion of " + name + " along " + k);
    r.result["doctrine"] = describe_doctrine(r, e.doctrine);
    const auto ex = check_lambda_existential(e.doctrine, e.lambda);
    r.expect(ex.ok(), "existential along " + k);
    r.add_witnesses(ex.counterexamples);
    for (const auto& u : ex.unverifiable) r.missing(u);

    Bundle out{name + "^" + k, "existential completion of " + name + " along " + k, e.doctrine,
               Selection(e.eta.begin(), e.eta.end()), std::nullopt};
    const auto file = export_bundles({out});
    if (!ctx.opts().output.empty()) {
        std::ofstream f(ctx.opts().output);
        if (!f) throw Error("Usage", "cannot write '" + ctx.opts().output + "'");
        f << (ctx.opts().format == "json" ? serialize_json(file) : serialize_text(file));
        r.line("wrote " + ctx.opts().output);
        r.result["output"] = ctx.opts().output;
    } else {
        const auto text = serialize_text(file);
        r.line("instance:");
        std::istringstream in(text);
        for (std::string l; std::getline(in, l);)
            if (!l.empty()) r.line("  " + l);
        r.result["instance"] = text;
    }
}

void cmd_construct(const Context& ctx, const std::string& kind, const std::string& name, Report& r) {
    const auto cap = ctx.opts().cap;
    if (kind == "reglex" || kind == "exlex" || kind == "exreg") {
        auto s = ctx.structure(name);
        if (kind == "reglex") {
            describe_category(r, "reglex", reg_lex_direct(*s, cap));
        } else if (kind == "exlex") {
            auto psi = weak_subobjects_doctrine(s, all_morphisms(s->category()));
            describe_category(r, "exlex", *exact_completion(psi, cap).category);
        } else {
            describe_category(r, "exreg", *ex_reg(s, cap).category);
        }
        return;
    }
    const auto p = ctx.doctrine(name);
    if (kind == "groth") {
        describe_category(r, "groth", groth_category(p, cap)->category());
    } else if (kind == "pred") {
        auto prd = predicates_category(p, cap);
        describe_category(r, "pred", prd.category());
        for (ObjId a : prd.reflection.unverified) r.missing("no square or equality at " + p.base().object_name(a));
    } else if (kind == "comprehension") {
        auto cc = comprehension_completion(p, cap);
        describe_category(r, "groth", cc.groth->category());
        r.result["doctrine"] = describe_doctrine(r, cc.doctrine);
    } else if (kind == "extensional") {
        auto er = extensional_reflection(p);
        describe_category(r, "extensional", er.structure->category());
        r.result["doctrine"] = describe_doctrine(r, er.doctrine);
        for (ObjId a : er.unverified) r.missing("no square or equality at " + p.base().object_name(a));
    } else if (kind == "reg") {
        describe_category(r, "reg", *regular_completion(p, cap).reg.category);
    } else if (kind == "exact") {
        describe_category(r, "exact", *exact_completion(p, cap).category);
    } else {
        throw Error("Usage", "unknown construction '" + kind + "'");
    }
}

void cmd_analyze(const Context& ctx, const std::string& kind, const std::string& name, Report& r) {
    const auto p = ctx.doctrine(name);
    const auto& c = p.base();
    if (kind == "epsilon" || kind == "epsilon-iff") {
        const auto e = check_epsilon_operators(p);
        json table = json::array();
        for (const auto& entry : e.table) {
            const auto& l = p.fibre(require_product(p.structure(), entry.a, entry.b).vertex);
            const std::string eps = entry.epsilon ? c.morphism_name(*entry.epsilon) : "none";
            r.line("epsilon " + c.object_name(entry.a) + " " + c.object_name(entry.b) + " " + l.name(entry.alpha) +
                   ": " + eps);
            table.push_back({{"a", c.object_name(entry.a)},
                             {"b", c.object_name(entry.b)},
                             {"alpha", l.name(entry.alpha)},
                             {"epsilon", eps}});
        }
        r.result["table"] = table;
        r.add_witnesses(e.witnesses);
        for (const auto& m : e.missing) r.missing("no product " + m);
        r.result["equipped"] = e.equipped;
        if (kind == "epsilon") {
            if (e.missing.empty()) r.expect(e.equipped, "equipped with epsilon operators");
            else r.line(std::string("equipped on the available products: ") + (e.equipped ? "yes" : "no"));
            return;
        }
        const bool pure = iso_to_pure_completion(p, ctx.opts().cap);
        r.line(std::string("equipped with epsilon operators: ") + (e.equipped ? "yes" : "no"));
        r.line(std::string("isomorphic to its pure completion: ") + (pure ? "yes" : "no"));
        r.result["iso_to_pure"] = pure;
        if (e.missing.empty()) r.expect(e.equipped == pure, "the two verdicts agree");
        return;
    }
    const std::string k = ctx.opts().klass.empty() ? "all" : ctx.opts().klass;
    const auto lambda = ctx.klass(p, k);
    r.line("class: " + k);
    if (kind == "free") {
        const auto fr = free_elements(p, lambda);
        const auto fs = existential_free_subdoctrine(p, lambda);
        print_selection(r, "free", p, fs.selection);
        r.result["free"] = selection_json(p, fs.selection);
        for (ObjId a = 0; a < c.num_objects(); ++a)
            for (ElemId x = 0; x < p.fibre(a).size(); ++x)
                if (!fr.free[a][x] && fr.witness[a][x])
                    r.line("not free: " + split_text(p, a, x, *fr.witness[a][x]));
        r.expect(fs.has_tops, "tops free");
        r.expect(fs.meet_closed, "closed under meets");
        r.expect(fs.reindex_closed, "closed under reindexing");
        r.add_witnesses(fs.witnesses);
    } else if (kind == "choice") {
        const auto ch = check_choice_rules(p, lambda);
        r.expect(ch.lambda_rc, "lambda rule of choice");
        r.expect(ch.rc, "rule of choice");
        r.expect(ch.erc, "extended rule of choice");
        if (ch.ruc) r.expect(*ch.ruc, "rule of unique choice");
        if (ch.erc_prd) r.line(std::string("extended rule of choice on predicates: ") + (*ch.erc_prd ? "yes" : "no"));
        r.result["lambda_rc"] = ch.lambda_rc;
        r.result["rc"] = ch.rc;
        r.result["erc"] = ch.erc;
        r.result["ruc"] = ch.ruc ? json(*ch.ruc) : json(nullptr);
        r.result["erc_prd"] = ch.erc_prd ? json(*ch.erc_prd) : json(nullptr);
        r.add_witnesses(ch.witnesses);
        for (const auto& u : ch.unverifiable) r.missing(u);
    } else if (kind == "characterize") {
        CharacterizationOptions o;
        o.cap = ctx.opts().cap;
        const auto v = characterize_completion(p, lambda, o);
        r.expect(v.existential, "existential");
        r.expect(v.rule_of_choice, "(a) tops are free");
        r.expect(v.meet_closed, "(b) free elements closed under meets");
        r.expect(v.enough, "(c) every element is an existential of a free one");
        print_selection(r, "free", p, v.free.selection);
        if (v.yes() && v.unverifiable.empty()) r.expect(v.reconstruction_ok, "reconstruction is an isomorphism");
        r.result["completion"] = v.yes();
        r.result["reconstruction"] = v.reconstruction_ok;
        r.add_witnesses(v.witnesses);
        for (const auto& u : v.unverifiable) r.missing(u);
    } else {
        throw Error("Usage", "unknown analysis '" + kind + "'");
    }
}

// A category expression: a name, or op(argument) with op one of reg, exact,
// groth, pred, base on a doctrine, or reglex, exlex, exreg on a category.
FinCategory category_ref(const Context& ctx, const std::string& ref) {
    const auto open = ref.find('(');
    if (open == std::string::npos || ref.back() != ')') return ctx.structure(ref)->category();
    const std::string op = ref.substr(0, open), arg = ref.substr(open + 1, ref.size() - open - 2);
    const auto cap = ctx.opts().cap;
    if (op == "reglex") return reg_lex_direct(*ctx.structure(arg), cap);
    if (op == "exreg") return *ex_reg(ctx.structure(arg), cap).category;
    if (op == "exlex") {
        auto s = ctx.structure(arg);
        return *exact_completion(weak_subobjects_doctrine(s, all_morphisms(s->category())), cap).category;
    }
    const auto p = ctx.doctrine(arg);
    if (op == "reg") return *regular_completion(p, cap).reg.category;
    if (op == "exact" || op == "T") return *exact_completion(p, cap).category;
    if (op == "groth") return groth_category(p, cap)->category();
    if (op == "pred") return predicates_category(p, cap).category();
    if (op == "base") return p.base();
    throw Error("Usage", "unknown category operation '" + op + "'");
}

void cmd_equiv(const Context& ctx, const std::string& a, const std::string& b, Report& r) {
    const auto c = category_ref(ctx, a);
    const auto d = category_ref(ctx, b);
    describe_category(r, "left", c);
    describe_category(r, "right", d);
    const auto res = search_equivalence(c, d, ctx.opts().budget);
    r.result["nodes"] = res.nodes;
    if (res.status == SearchStatus::BudgetExhausted) {
        r.missing("search budget exhausted after " + std::to_string(res.nodes) + " nodes");
        r.result["equivalent"] = nullptr;
        return;
    }
    const bool found = res.status == SearchStatus::Found;
    r.expect(found, "equivalent");
    r.result["equivalent"] = found;
    if (found) {
        json map = json::object();
        for (ObjId x = 0; x < c.num_objects(); ++x) {
            const auto y = d.object_name(res.witness->functor.object_map[x]);
            r.line("  " + c.object_name(x) + " |-> " + y);
            map[c.object_name(x)] = y;
        }
        r.result["object_map"] = map;
    } else if (!res.reason.empty()) {
        r.witnesses.push_back({"equivalence", res.reason});
    }
}

void cmd_suite(const Context& ctx, const std::string& id, const std::vector<std::string>& names, Report& r) {
    std::vector<std::string> ids;
    if (id == "all") ids = theorem_ids();
    else ids.push_back(id);
    std::vector<Bundle> bundles;
    if (names.empty()) bundles = ctx.corpus();
    for (const auto& n : names) bundles.push_back(ctx.bundle(n));
    const bool listed = !names.empty();

    json runs = json::array();
    int passed = 0, failed = 0;
    for (const auto& t : ids) {
        for (const auto& b : bundles) {
            const bool fits = theorem_needs_semilattice(t) ? b.semilattice.has_value() : b.doctrine.has_value();
            // An explicitly named bundle is always run so a mismatch is reported.
            if (!fits && !listed) continue;
            const auto rep = run_theorem_suite(b, t, ctx.opts().budget, ctx.opts().cap);
            r.line(t + " " + b.name + ": " + (rep.pass ? "pass" : "FAIL"));
            for (const auto& ch : rep.checks) r.line("  " + ch);
            for (const auto& w : rep.witnesses) r.witnesses.push_back({t + " " + b.name + " " + w.law, w.witness});
            for (const auto& u : rep.unverifiable) r.missing(t + " " + b.name + " " + u);
            if (!rep.pass) r.worsen(Verdict::Fail);
            (rep.pass ? passed : failed)++;
            runs.push_back({{"theorem", t},
                            {"bundle", b.name},
                            {"pass", rep.pass},
                            {"checks", rep.checks},
                            {"unverifiable", rep.unverifiable}});
        }
    }
    r.line("runs: " + std::to_string(passed + failed) + ", passed " + std::to_string(passed) + ", failed " +
           std::to_string(failed));
    r.result["runs"] = runs;
    r.result["passed"] = passed;
    r.result["failed"] = failed;
}

// ---------------------------------------------------------------------------
// Output

std::string verdict_name(const Report& r) {
    if (r.error) return "error";
    switch (r.verdict) {
        case Verdict::Pass: return "pass";
        case Verdict::Unverifiable: return "unverifiable";
        case Verdict::Fail: return "fail";
    }
    return "fail";
}

int exit_code(const Report& r) {
    if (r.error) {
        switch (r.error->error_class()) {
            case ErrorClass::Input: return 3;
            case ErrorClass::Unverifiable: return 2;
            case ErrorClass::Invalid: return 1;
        }
    }
    switch (r.verdict) {
        case Verdict::Pass: return 0;
        case Verdict::Fail: return 1;
        case Verdict::Unverifiable: return 2;
    }
    return 1;
}

std::string render(const Report& r, const std::string& format, long long ms) {
    if (format == "json") {
        json j;
        j["schema"] = "doctrina-report/1";
        j["command"] = r.command;
        j["verdict"] = verdict_name(r);
        j["exit"] = exit_code(r);
        j["result"] = r.result;
        j["witnesses"] = json::array();
        for (const auto& w : r.witnesses) j["witnesses"].push_back({{"law", w.law}, {"witness", w.witness}});
        j["unverifiable"] = r.unverifiable;
        if (r.error) {
            j["error"] = {{"code", r.error->code()}, {"detail", r.error->detail()}};
            json vs = json::array();
            for (const auto& v : r.error->violations()) vs.push_back({{"law", v.law}, {"witness", v.witness}});
            j["error"]["violations"] = vs;
        }
        j["timing_ms"] = ms;
        return j.dump(2) + "\n";
    }
    std::ostringstream o;
    o << "command: doctrina " << join(r.command, " ") << "\n";
    for (const auto& l : r.lines) o << l << "\n";
    for (const auto& w : r.witnesses) o << "witness: " << w.law << ": " << w.witness << "\n";
    for (const auto& u : r.unverifiable) o << "unverifiable: " << u << "\n";
    if (r.error) {
        o << "error: " << r.error->code() << (r.error->detail().empty() ? "" : ": " + r.error->detail()) << "\n";
        for (const auto& v : r.error->violations()) o << "  violation: " << v.law << ": " << v.witness << "\n";
    }
    o << "verdict: " << verdict_name(r) << "\n";
    o << "time: " << ms << " ms\n";
    return o.str();
}

std::size_t parse_cap(const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || v == 0) throw Error("Usage", "DOCTRINA_CAP must be a positive integer");
    return static_cast<std::size_t>(v);
}

}  // namespace

CommandResult run_cli(const std::vector<std::string>& args, const std::optional<std::string>& env_cap) {
    CLI::App app{"Finite models of Lawvere doctrines and their completions", "doctrina"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opts;
    std::size_t cap_flag = 0;
    app.add_option("--class", opts.klass, "Left class: all, pure, full, identities, isos, monos, comprehensions or a name");
    app.add_option("--budget", opts.budget, "Node budget of equivalence searches")->check(CLI::PositiveNumber);
    app.add_option("--cap", cap_flag, "Size cap on constructed fibres and categories")->check(CLI::PositiveNumber);
    app.add_option("--format", opts.format, "Report format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--instance", opts.instance, "Instance file to read bundles and categories from");

    std::vector<std::string> names;
    std::string kind, first, second;

    auto* check = app.add_subcommand("check", "Validate bundles (all of them when none is named)");
    check->add_option("bundles", names);
    auto* complete = app.add_subcommand("complete", "Existential completion of a doctrine along --class");
    complete->add_option("doctrine", first)->required();
    complete->add_option("-o,--output", opts.output, "Write the completed doctrine as an instance file");
    auto* construct = app.add_subcommand("construct", "Build a derived category and summarize it");
    construct->add_option("kind", kind)
        ->required()
        ->check(CLI::IsMember({"groth", "pred", "comprehension", "extensional", "reg", "exact", "reglex", "exlex", "exreg"}));
    construct->add_option("source", first)->required();
    auto* analyze = app.add_subcommand("analyze", "Free elements, choice rules, epsilon operators, characterization");
    analyze->add_option("kind", kind)
        ->required()
        ->check(CLI::IsMember({"free", "choice", "epsilon", "characterize", "epsilon-iff"}));
    analyze->add_option("doctrine", first)->required();
    auto* equiv = app.add_subcommand("equiv", "Decide equivalence of two category expressions");
    equiv->add_option("left", first)->required();
    equiv->add_option("right", second)->required();
    auto* suite = app.add_subcommand("suite", "Run a theorem check (or all) on bundles (all fitting ones by default)");
    suite->add_option("theorem", first)->required();
    suite->add_option("bundles", names);
    auto* examples = app.add_subcommand("examples", "Print the example pack as an instance file");
    examples->add_option("bundles", names);
    examples->add_option("-o,--output", opts.output, "Write to a file instead");

    CommandResult out;
    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out.out = app.help();
        return out;
    } catch (const CLI::ParseError& e) {
        out.exit_code = 3;
        out.err = std::string("usage error: ") + e.what() + "\n" + app.help();
        return out;
    }

    Report r;
    r.command = args;
    const auto start = std::chrono::steady_clock::now();
    try {
        if (cap_flag) opts.cap = cap_flag;
        else if (env_cap) opts.cap = parse_cap(*env_cap);
        Context ctx(opts);
        if (*examples) {
            std::vector<Bundle> bundles;
            if (names.empty()) bundles = example_pack();
            for (const auto& n : names) bundles.push_back(ctx.bundle(n));
            const auto file = export_bundles(bundles);
            const auto text = opts.format == "json" ? serialize_json(file) : serialize_text(file);
            if (opts.output.empty()) {
                out.out = text;
                return out;
            }
            std::ofstream f(opts.output);
            if (!f) throw Error("Usage", "cannot write '" + opts.output + "'");
            f << text;
            r.line("wrote " + std::to_string(bundles.size()) + " bundles to " + opts.output);
        } else if (*check) {
            cmd_check(ctx, names, r);
        } else if (*complete) {
            cmd_complete(ctx, first, r);
        } else if (*construct) {
            cmd_construct(ctx, kind, first, r);
        } else if (*analyze) {
            cmd_analyze(ctx, kind, first, r);
        } else if (*equiv) {
            cmd_equiv(ctx, first, second, r);
        } else if (*suite) {
            cmd_suite(ctx, first, names, r);
        }
    } catch (const Error& e) {
        r.error = e;
    }
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    out.out = render(r, opts.format, ms);
    out.exit_code = exit_code(r);
    return out;
}

std::string without_timing(const std::string& report) {
    std::istringstream in(report);
    std::string out;
    for (std::string l; std::getline(in, l);) {
        if (l.rfind("time: ", 0) == 0 || l.find("\"timing_ms\":") != std::string::npos) continue;
        out += l + "\n";
    }
    return out;
}

}  // namespace doctrina
