#include "doctrina/doctrine.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>

namespace doctrina {

struct Doctrine::Cache {
    std::mutex mutex;
    std::vector<char> computed;
    std::vector<std::optional<std::vector<ElemId>>> exists;
};

Doctrine::Doctrine(StructurePtr structure, std::vector<LatticePtr> fibres, std::vector<std::vector<ElemId>> reindex)
    : structure_(std::move(structure)),
      fibres_(std::move(fibres)),
      reindex_(std::move(reindex)),
      cache_(std::make_shared<Cache>()) {
    cache_->computed.assign(reindex_.size(), 0);
    cache_->exists.resize(reindex_.size());
}

MonotoneMap Doctrine::reindex_map(MorId f) const {
    return MonotoneMap{fibres_[base().target(f)], fibres_[base().source(f)], reindex_[f]};
}

const std::vector<ElemId>* Doctrine::exists_table(MorId f) const {
    std::lock_guard lock(cache_->mutex);
    if (!cache_->computed[f]) {
        auto r = left_adjoint_of(reindex_map(f));
        if (r.adjoint) cache_->exists[f] = std::move(r.adjoint->table);
        cache_->computed[f] = 1;
    }
    return cache_->exists[f] ? &*cache_->exists[f] : nullptr;
}

ElemId Doctrine::exists(MorId f, ElemId x) const {
    const auto* t = exists_table(f);
    if (!t) throw Error("NoAdjoint", "reindexing along " + base().morphism_name(f) + " has no left adjoint");
    return (*t)[x];
}

std::size_t Doctrine::total_elements() const {
    std::size_t n = 0;
    for (const auto& f : fibres_) n += f->size();
    return n;
}

std::vector<Violation> doctrine_violations(const Doctrine& p) {
    std::vector<Violation> v;
    const auto& c = p.base();
    if (static_cast<int>(p.fibres().size()) != c.num_objects() ||
        static_cast<int>(p.reindex_tables().size()) != c.num_morphisms()) {
        v.push_back({"Shape", "fibre or reindex table count does not match the base"});
        return v;
    }
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
        const auto& t = p.reindex_table(f);
        const auto& src = p.fibre(c.target(f));
        const auto& dst = p.fibre(c.source(f));
        bool typed = static_cast<int>(t.size()) == src.size();
        for (ElemId y : t) typed = typed && y >= 0 && y < dst.size();
        if (!typed) v.push_back({"Shape", "reindex table of " + c.morphism_name(f)});
    }
    if (!v.empty()) return v;
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        const auto& t = p.reindex_table(c.identity(a));
        for (ElemId x = 0; x < p.fibre(a).size(); ++x)
            if (t[x] != x) {
                v.push_back({"NotFunctorial", "(" + c.morphism_name(c.identity(a)) + ") is not the identity"});
                break;
            }
    }
    for (MorId f = 0; f < c.num_morphisms(); ++f)
        for (ObjId b = 0; b < c.num_objects(); ++b)
            for (MorId g : c.hom(c.target(f), b)) {
                const MorId gf = c.compose(g, f);
                for (ElemId x = 0; x < p.fibre(b).size(); ++x)
                    if (p.reindex(gf, x) != p.reindex(f, p.reindex(g, x))) {
                        v.push_back({"NotFunctorial", "(" + c.morphism_name(g) + ", " + c.morphism_name(f) + ")"});
                        break;
                    }
            }
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
        const auto m = p.reindex_map(f);
        if (!m.is_monotone()) v.push_back({"NotMonotone", c.morphism_name(f)});
        const auto& s = *m.source;
        bool meets = true;
        for (ElemId x = 0; x < s.size() && meets; ++x)
            for (ElemId y = 0; y < s.size() && meets; ++y)
                if (m(s.meet(x, y)) != m.target->meet(m(x), m(y))) {
                    v.push_back({"NotMeetPreserving", "(" + c.morphism_name(f) + ", " + s.name(x) + ", " + s.name(y) + ")"});
                    meets = false;
                }
        if (!m.preserves_top()) v.push_back({"NotTopPreserving", c.morphism_name(f)});
    }
    return v;
}

Doctrine validate_doctrine(StructurePtr structure, std::vector<LatticePtr> fibres,
                           std::vector<std::vector<ElemId>> reindex) {
    Doctrine p(std::move(structure), std::move(fibres), std::move(reindex));
    auto v = doctrine_violations(p);
    if (!v.empty()) throw Error(v.front().law, "doctrine laws violated", v);
    return p;
}

Doctrine trivial_doctrine(StructurePtr structure) {
    const auto& c = structure->category();
    auto point = std::make_shared<const InfSemilattice>(chain({"top"}));
    std::vector<LatticePtr> fibres(c.num_objects(), point);
    std::vector<std::vector<ElemId>> reindex(c.num_morphisms(), std::vector<ElemId>{0});
    return Doctrine(std::move(structure), std::move(fibres), std::move(reindex));
}

PosetReflection reflect_preorder(int n, const std::vector<char>& leq, const std::function<std::string(int)>& name_of) {
    PosetReflection r;
    r.klass.assign(n, -1);
    auto at = [&](int i, int j) { return leq[static_cast<std::size_t>(i) * n + j] != 0; };
    for (int i = 0; i < n; ++i) {
        if (r.klass[i] >= 0) continue;
        const int k = static_cast<int>(r.representative.size());
        r.representative.push_back(i);
        for (int j = i; j < n; ++j)
            if (r.klass[j] < 0 && at(i, j) && at(j, i)) r.klass[j] = k;
    }
    const int k = static_cast<int>(r.representative.size());
    std::vector<std::string> names;
    for (int c = 0; c < k; ++c) names.push_back(name_of(r.representative[c]));
    std::vector<char> order(static_cast<std::size_t>(k) * k, 0);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) order[static_cast<std::size_t>(a) * k + b] = at(r.representative[a], r.representative[b]);
    r.poset = std::make_shared<const InfSemilattice>(InfSemilattice::from_relation(std::move(names), std::move(order)));
    return r;
}

Doctrine weak_subobjects_doctrine(StructurePtr structure, const LeftClass& lambda) {
    require_left_class(*structure, lambda);
    const auto& c = structure->category();
    const int no = c.num_objects();
    // arrows[A] = Λ-arrows into A; index_of[g] = position of g in arrows[cod g].
    std::vector<std::vector<MorId>> arrows(no);
    std::vector<int> index_of(c.num_morphisms(), -1);
    for (MorId g = 0; g < c.num_morphisms(); ++g)
        if (lambda.contains(g)) {
            index_of[g] = static_cast<int>(arrows[c.target(g)].size());
            arrows[c.target(g)].push_back(g);
        }
    std::vector<PosetReflection> refl(no);
    std::vector<LatticePtr> fibres(no);
    for (ObjId a = 0; a < no; ++a) {
        const auto& list = arrows[a];
        const int n = static_cast<int>(list.size());
        std::vector<char> leq(static_cast<std::size_t>(n) * n, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (MorId w : c.hom(c.source(list[i]), c.source(list[j])))
                    if (c.compose(list[j], w) == list[i]) {
                        leq[static_cast<std::size_t>(i) * n + j] = 1;
                        break;
                    }
        refl[a] = reflect_preorder(n, leq, [&](int i) { return "[" + c.morphism_name(list[i]) + "]"; });
        fibres[a] = refl[a].poset;
        const auto& fib = *fibres[a];
        if (refl[a].klass[index_of[c.identity(a)]] != fib.top())
            throw Error("Internal", "identity is not the top weak subobject");
        // The meet computed in the reflected order must be the pullback composite.
        for (int i = 0; i < fib.size(); ++i)
            for (int j = 0; j < fib.size(); ++j) {
                const MorId g = list[refl[a].representative[i]], h = list[refl[a].representative[j]];
                const auto pb = require_pullback(*structure, h, g);
                const MorId composite = c.compose(g, pb.to_a);
                if (!lambda.contains(composite) || refl[a].klass[index_of[composite]] != fib.meet(i, j))
                    throw Error("Internal", "pullback composite is not the meet of weak subobjects");
            }
    }
    std::vector<std::vector<ElemId>> reindex(c.num_morphisms());
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
        const ObjId a = c.target(f), a2 = c.source(f);
        const auto& list = arrows[a];
        auto& table = reindex[f];
        table.assign(fibres[a]->size(), -1);
        for (int i = 0; i < static_cast<int>(list.size()); ++i) {
            const auto pb = require_pullback(*structure, list[i], f);
            const ElemId image = refl[a2].klass[index_of[pb.to_a]];
            ElemId& slot = table[refl[a].klass[i]];
            if (slot >= 0 && slot != image)
                throw Error("Internal", "pullback of weak subobjects depends on the representative");
            slot = image;
        }
    }
    return validate_doctrine(std::move(structure), std::move(fibres), std::move(reindex));
}

Doctrine m_subobjects_doctrine(StructurePtr structure, const LeftClass& monos) {
    const auto& c = structure->category();
    std::vector<Violation> v;
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
        if (monos.contains(f) && !is_mono(c, f)) v.push_back({"not-mono", c.morphism_name(f)});
        if (!monos.contains(f) && is_iso(c, f)) v.push_back({"missing-iso", c.morphism_name(f)});
    }
    if (!v.empty()) throw Error("NotStableSystem", "class '" + monos.name + "'", v);
    auto report = verify_left_class(*structure, monos);
    if (!report.ok()) {
        for (const auto& cx : report.counterexamples)
            if (cx.law == "pullback-missing")
                throw Error("MissingStructure", "class '" + monos.name + "' needs absent pullbacks", report.counterexamples);
        throw Error("NotStableSystem", "class '" + monos.name + "'", report.counterexamples);
    }
    return weak_subobjects_doctrine(std::move(structure), monos);
}

AdjointResult exists_along(const Doctrine& p, MorId f) { return left_adjoint_of(p.reindex_map(f)); }

ExistentialReport check_lambda_existential(const Doctrine& p, const LeftClass& lambda) {
    ExistentialReport r;
    const auto& c = p.base();
    const auto& s = p.structure();
    auto mname = [&](MorId f) { return c.morphism_name(f); };
    for (MorId f : lambda.list())
        if (!p.exists_table(f)) {
            r.adjoints = false;
            auto res = exists_along(p, f);
            std::string w = mname(f);
            if (res.failing) w += " at " + p.fibre(c.target(f)).name(res.failing->first);
            r.counterexamples.push_back({"adjoint", w});
        }
    for (MorId g : lambda.list()) {
        const auto* eg = p.exists_table(g);
        const ObjId x = c.source(g), a = c.target(g);
        for (ObjId a2 = 0; a2 < c.num_objects(); ++a2)
            for (MorId f : c.hom(a2, a)) {
                auto pb = s.pullback(g, f);
                if (!pb) {
                    r.unverifiable.push_back("(" + mname(g) + ", " + mname(f) + ")");
                    continue;
                }
                const MorId g2 = pb->to_a, f2 = pb->to_c;
                const auto* eg2 = p.exists_table(g2);
                if (!eg || !eg2) {
                    if (eg && !eg2) {
                        r.bcc = false;
                        r.counterexamples.push_back({"BCC", "(" + mname(g) + ", " + mname(f) + ") base change lacks ∃"});
                    }
                    continue;
                }
                for (ElemId b = 0; b < p.fibre(x).size(); ++b)
                    if ((*eg2)[p.reindex(f2, b)] != p.reindex(f, (*eg)[b])) {
                        r.bcc = false;
                        r.counterexamples.push_back(
                            {"BCC", "(" + mname(g) + ", " + mname(f) + ", " + p.fibre(x).name(b) + ")"});
                        break;
                    }
            }
    }
    for (MorId f : lambda.list()) {
        const auto* ef = p.exists_table(f);
        if (!ef) continue;
        const auto& fa = p.fibre(c.target(f));
        const auto& fx = p.fibre(c.source(f));
        bool ok = true;
        for (ElemId alpha = 0; alpha < fa.size() && ok; ++alpha)
            for (ElemId beta = 0; beta < fx.size() && ok; ++beta)
                if ((*ef)[fx.meet(p.reindex(f, alpha), beta)] != fa.meet(alpha, (*ef)[beta])) {
                    ok = false;
                    r.fr = false;
                    r.counterexamples.push_back({"FR", "(" + mname(f) + ", " + fa.name(alpha) + ", " + fx.name(beta) + ")"});
                }
    }
    return r;
}

namespace {

// L(α) = P_{pr1}(α) ∧ δ must be left adjoint to P_Δ.
bool condition_one(const Doctrine& p, ObjId a, const ProductCone& sq, MorId diag, ElemId delta) {
    const auto& fa = p.fibre(a);
    const auto& faa = p.fibre(sq.vertex);
    for (ElemId alpha = 0; alpha < fa.size(); ++alpha) {
        const ElemId l = faa.meet(p.reindex(sq.pr1, alpha), delta);
        for (ElemId beta = 0; beta < faa.size(); ++beta)
            if (faa.leq(l, beta) != fa.leq(alpha, p.reindex(diag, beta))) return false;
    }
    return true;
}

struct EArrow {
    MorId e;      // X×A → (X×A)×A
    MorId pr12;   // (X×A)×A → X×A
    MorId pr23;   // (X×A)×A → A×A
    ObjId xa;     // X×A
    ObjId xaa;    // (X×A)×A
};

bool condition_two(const Doctrine& p, const EArrow& e, ElemId delta) {
    const auto& f1 = p.fibre(e.xa);
    const auto& f2 = p.fibre(e.xaa);
    const ElemId d = p.reindex(e.pr23, delta);
    for (ElemId alpha = 0; alpha < f1.size(); ++alpha) {
        const ElemId l = f2.meet(p.reindex(e.pr12, alpha), d);
        for (ElemId beta = 0; beta < f2.size(); ++beta)
            if (f2.leq(l, beta) != f1.leq(alpha, p.reindex(e.e, beta))) return false;
    }
    return true;
}

}  // namespace

ElementaryResult find_elementary_structure(const Doctrine& p) {
    const auto& c = p.base();
    const auto& s = p.structure();
    ElementaryResult result;
    ElementaryWitness w;
    w.delta.assign(c.num_objects(), std::nullopt);
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        auto sq = s.product(a, a);
        if (!sq) {
            w.unverified.push_back(a);
            continue;
        }
        const MorId diag = *s.pair(*sq, c.identity(a), c.identity(a));
        std::vector<EArrow> es;
        for (ObjId x = 0; x < c.num_objects(); ++x) {
            auto inner = s.product(x, a);
            if (!inner) continue;
            auto outer = s.product(inner->vertex, a);
            if (!outer) continue;
            EArrow e;
            e.xa = inner->vertex;
            e.xaa = outer->vertex;
            e.e = *s.pair(*outer, c.identity(inner->vertex), inner->pr2);
            e.pr12 = outer->pr1;
            e.pr23 = *s.pair(*sq, c.compose(inner->pr2, outer->pr1), outer->pr2);
            es.push_back(e);
        }
        std::vector<ElemId> passing;
        for (ElemId delta = 0; delta < p.fibre(sq->vertex).size(); ++delta) {
            if (!condition_one(p, a, *sq, diag, delta)) continue;
            bool ok = true;
            for (const auto& e : es)
                if (!condition_two(p, e, delta)) {
                    ok = false;
                    break;
                }
            if (ok) passing.push_back(delta);
        }
        if (passing.size() > 1)
            throw Error("AmbiguousDelta", "object " + c.object_name(a) + " admits several equality predicates");
        if (passing.empty()) {
            result.obstructed = a;
            return result;
        }
        w.delta[a] = passing.front();
        w.checked_e_arrows += static_cast<int>(es.size());
    }
    result.witness = std::move(w);
    return result;
}

Subdoctrine restrict_subdoctrine(const Doctrine& p, const Selection& selection) {
    const auto& c = p.base();
    if (static_cast<int>(selection.size()) != c.num_objects())
        throw Error("InvalidSelection", "selection must list every object");
    std::vector<std::vector<int>> position(c.num_objects());
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        position[a].assign(p.fibre(a).size(), -1);
        auto sel = selection[a];
        std::sort(sel.begin(), sel.end());
        sel.erase(std::unique(sel.begin(), sel.end()), sel.end());
        for (std::size_t i = 0; i < sel.size(); ++i) position[a][sel[i]] = static_cast<int>(i);
    }
    for (ObjId a = 0; a < c.num_objects(); ++a)
        if (position[a][p.fibre(a).top()] < 0) throw Error("MissingTop", c.object_name(a));
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        const auto& f = p.fibre(a);
        for (ElemId x : selection[a])
            for (ElemId y : selection[a])
                if (position[a][f.meet(x, y)] < 0)
                    throw Error("NotClosedUnderMeet", c.object_name(a) + ": (" + f.name(x) + ", " + f.name(y) + ")");
    }
    for (MorId f = 0; f < c.num_morphisms(); ++f)
        for (ElemId x : selection[c.target(f)])
            if (position[c.source(f)][p.reindex(f, x)] < 0)
                throw Error("NotClosedUnderReindex",
                            "(" + c.morphism_name(f) + ", " + p.fibre(c.target(f)).name(x) + ")");
    Subdoctrine out;
    std::vector<LatticePtr> fibres;
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        std::vector<ElemId> sel;
        for (ElemId x = 0; x < p.fibre(a).size(); ++x)
            if (position[a][x] >= 0) sel.push_back(x);
        const int n = static_cast<int>(sel.size());
        std::vector<std::string> names;
        std::vector<char> leq(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i) {
            names.push_back(p.fibre(a).name(sel[i]));
            for (int j = 0; j < n; ++j) leq[static_cast<std::size_t>(i) * n + j] = p.fibre(a).leq(sel[i], sel[j]);
        }
        fibres.push_back(std::make_shared<const InfSemilattice>(InfSemilattice::from_relation(names, std::move(leq))));
        out.inclusion.push_back(std::move(sel));
    }
    std::vector<std::vector<ElemId>> reindex(c.num_morphisms());
    for (MorId f = 0; f < c.num_morphisms(); ++f)
        for (ElemId x : out.inclusion[c.target(f)]) reindex[f].push_back(position[c.source(f)][p.reindex(f, x)]);
    out.doctrine = validate_doctrine(p.structure_ptr(), std::move(fibres), std::move(reindex));
    return out;
}

Selection tops_selection(const Doctrine& p) {
    Selection s;
    for (ObjId a = 0; a < p.base().num_objects(); ++a) s.push_back({p.fibre(a).top()});
    return s;
}

Selection all_selection(const Doctrine& p) {
    Selection s;
    for (ObjId a = 0; a < p.base().num_objects(); ++a) {
        std::vector<ElemId> all(p.fibre(a).size());
        std::iota(all.begin(), all.end(), 0);
        s.push_back(std::move(all));
    }
    return s;
}

}  // namespace doctrina
