#include "doctrina/completion.hpp"

#include <algorithm>
#include <map>
#include <functional>
#include <numeric>

namespace doctrina {

namespace {

std::string pair_name(const FinCategory& c, MorId f, MorId g) {
    return "(" + c.morphism_name(f) + ", " + c.morphism_name(g) + ")";
}

bool is_bijective_order_iso(const InfSemilattice& s, const InfSemilattice& t, const std::vector<ElemId>& table) {
    if (s.size() != t.size() || static_cast<int>(table.size()) != s.size()) return false;
    std::vector<char> hit(t.size(), 0);
    for (ElemId x : table) {
        if (x < 0 || x >= t.size() || hit[x]) return false;
        hit[x] = 1;
    }
    for (ElemId x = 0; x < s.size(); ++x)
        for (ElemId y = 0; y < s.size(); ++y)
            if (s.leq(x, y) != t.leq(table[x], table[y])) return false;
    return true;
}

// Subposet of `f` on `keep` (ascending), names inherited.
LatticePtr subposet(const InfSemilattice& f, const std::vector<ElemId>& keep) {
    const int n = static_cast<int>(keep.size());
    std::vector<std::string> names;
    std::vector<char> leq(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        names.push_back(f.name(keep[i]));
        for (int j = 0; j < n; ++j) leq[static_cast<std::size_t>(i) * n + j] = f.leq(keep[i], keep[j]);
    }
    return std::make_shared<const InfSemilattice>(InfSemilattice::from_relation(std::move(names), std::move(leq)));
}

[[noreturn]] void internal(const std::string& what) { throw Error("Internal", what); }

}  // namespace

DoctrineMorphism fibrewise_morphism(const FinCategory& base, std::vector<std::vector<ElemId>> components) {
    DoctrineMorphism m;
    m.functor.object_map.resize(base.num_objects());
    std::iota(m.functor.object_map.begin(), m.functor.object_map.end(), 0);
    m.functor.morphism_map.resize(base.num_morphisms());
    std::iota(m.functor.morphism_map.begin(), m.functor.morphism_map.end(), 0);
    m.components = std::move(components);
    return m;
}

MorphismReport check_doctrine_morphism(const Doctrine& p, const Doctrine& r, const DoctrineMorphism& m,
                                       const LeftClass* lambda) {
    MorphismReport rep;
    const auto& c = p.base();
    const auto& d = r.base();
    auto fv = check_functor(c, d, m.functor);
    if (!fv.empty()) {
        rep.functor = false;
        rep.violations.insert(rep.violations.end(), fv.begin(), fv.end());
        return rep;
    }
    auto comp = [&](ObjId a, ElemId x) { return m.components[a][x]; };
    std::vector<char> total(c.num_objects(), 1);
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        const auto& fa = p.fibre(a);
        if (static_cast<int>(m.components[a].size()) != fa.size()) internal("component of wrong size");
        for (ElemId x = 0; x < fa.size(); ++x)
            if (comp(a, x) < 0) total[a] = 0;
        if (!total[a]) {
            rep.defined = false;
            rep.fibrewise_iso = false;
            rep.violations.push_back({"undefined", c.object_name(a)});
            continue;
        }
        const auto& ra = r.fibre(m.functor.object_map[a]);
        if (comp(a, fa.top()) != ra.top()) {
            rep.preserves_tops = false;
            rep.violations.push_back({"top", c.object_name(a)});
        }
        for (ElemId x = 0; x < fa.size(); ++x)
            for (ElemId y = 0; y < fa.size(); ++y)
                if (comp(a, fa.meet(x, y)) != ra.meet(comp(a, x), comp(a, y))) {
                    if (rep.preserves_meets)
                        rep.violations.push_back({"meet", c.object_name(a) + ": (" + fa.name(x) + ", " + fa.name(y) + ")"});
                    rep.preserves_meets = false;
                }
        if (!is_bijective_order_iso(fa, ra, m.components[a])) rep.fibrewise_iso = false;
    }
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
        const ObjId a = c.source(f), b = c.target(f);
        if (!total[a] || !total[b]) continue;
        const MorId ff = m.functor.morphism_map[f];
        for (ElemId y = 0; y < p.fibre(b).size(); ++y)
            if (comp(a, p.reindex(f, y)) != r.reindex(ff, comp(b, y))) {
                rep.natural = false;
                rep.violations.push_back({"naturality", c.morphism_name(f) + " at " + p.fibre(b).name(y)});
                break;
            }
        if (!lambda || !lambda->contains(f)) continue;
        const auto* ep = p.exists_table(f);
        const auto* er = r.exists_table(ff);
        if (!ep || !er) {
            rep.preserves_exists = false;
            rep.violations.push_back({"exists", c.morphism_name(f) + " has no adjoint on one side"});
            continue;
        }
        for (ElemId x = 0; x < p.fibre(a).size(); ++x)
            if (comp(b, (*ep)[x]) != (*er)[comp(a, x)]) {
                rep.preserves_exists = false;
                rep.violations.push_back({"exists", c.morphism_name(f) + " at " + p.fibre(a).name(x)});
                break;
            }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Generalized existential completion

ExistentialCompletion existential_completion(const Doctrine& p, const LeftClass& lambda, std::size_t cap) {
    const auto& s = p.structure();
    const auto& c = p.base();
    require_left_class(s, lambda);
    const int no = c.num_objects();
    ExistentialCompletion out;
    out.lambda = lambda;
    out.raw_pairs.resize(no);
    // offset[g] = index of (g, 0) among the raw pairs of cod g.
    std::vector<int> offset(c.num_morphisms(), -1);
    for (MorId g : lambda.list()) {
        auto& list = out.raw_pairs[c.target(g)];
        offset[g] = static_cast<int>(list.size());
        for (ElemId beta = 0; beta < p.fibre(c.source(g)).size(); ++beta) list.push_back({g, beta});
    }
    for (ObjId a = 0; a < no; ++a)
        if (out.raw_pairs[a].size() > cap)
            throw Error("SizeCap", "completion fibre over " + c.object_name(a) + " has " +
                                       std::to_string(out.raw_pairs[a].size()) + " raw pairs (cap " +
                                       std::to_string(cap) + ")");
    auto raw_index = [&](MorId g, ElemId beta) { return offset[g] + beta; };

    std::vector<PosetReflection> refl(no);
    std::vector<LatticePtr> fibres(no);
    out.raw_class.resize(no);
    out.representatives.resize(no);
    for (ObjId a = 0; a < no; ++a) {
        const auto& list = out.raw_pairs[a];
        const int n = static_cast<int>(list.size());
        std::vector<char> leq(static_cast<std::size_t>(n) * n, 0);
        for (int i = 0; i < n; ++i) {
            const auto [h, alpha] = list[i];
            const auto& fb = p.fibre(c.source(h));
            for (int j = 0; j < n; ++j) {
                const auto [f, gamma] = list[j];
                for (MorId w : c.hom(c.source(h), c.source(f)))
                    if (c.compose(f, w) == h && fb.leq(alpha, p.reindex(w, gamma))) {
                        leq[static_cast<std::size_t>(i) * n + j] = 1;
                        break;
                    }
            }
        }
        refl[a] = reflect_preorder(n, leq, [&](int i) {
            return "(" + c.morphism_name(list[i].arrow) + "," + p.fibre(c.source(list[i].arrow)).name(list[i].element) + ")";
        });
        fibres[a] = refl[a].poset;
        out.raw_class[a] = refl[a].klass;
        for (int rep : refl[a].representative) out.representatives[a].push_back(list[rep]);
    }

    // Reindexing by pullback, checked to be independent of the representative.
    std::vector<std::vector<ElemId>> reindex(c.num_morphisms());
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
        const ObjId a = c.target(f), a2 = c.source(f);
        auto& table = reindex[f];
        table.assign(fibres[a]->size(), -1);
        for (std::size_t i = 0; i < out.raw_pairs[a].size(); ++i) {
            const auto [g, beta] = out.raw_pairs[a][i];
            const auto pb = require_pullback(s, g, f);
            if (!lambda.contains(pb.to_a)) internal("base change of " + c.morphism_name(g) + " left the class");
            const ElemId image = refl[a2].klass[raw_index(pb.to_a, p.reindex(pb.to_c, beta))];
            ElemId& slot = table[refl[a].klass[i]];
            if (slot >= 0 && slot != image)
                internal("completion reindexing along " + c.morphism_name(f) + " depends on the representative");
            slot = image;
        }
    }

    // Meets are pullback composites; the top is (id, ⊤).
    for (ObjId a = 0; a < no; ++a) {
        const auto& fib = *fibres[a];
        if (refl[a].klass[raw_index(c.identity(a), p.fibre(a).top())] != fib.top())
            internal("(id, top) is not the top of the completion fibre over " + c.object_name(a));
        for (ElemId x = 0; x < fib.size(); ++x)
            for (ElemId y = 0; y < fib.size(); ++y) {
                const auto [g, beta] = out.representatives[a][x];
                const auto [h, gamma] = out.representatives[a][y];
                const auto pb = require_pullback(s, h, g);
                const MorId composite = c.compose(g, pb.to_a);
                const ElemId e = p.fibre(pb.vertex).meet(p.reindex(pb.to_a, beta), p.reindex(pb.to_c, gamma));
                if (!lambda.contains(composite) || refl[a].klass[raw_index(composite, e)] != fib.meet(x, y))
                    internal("meet in the completion over " + c.object_name(a) + " is not the pullback composite");
            }
    }

    out.doctrine = validate_doctrine(p.structure_ptr(), std::move(fibres), std::move(reindex));
    const auto& q = out.doctrine;

    // η: α ↦ (id, α), an embedding natural in A.
    out.eta.resize(no);
    for (ObjId a = 0; a < no; ++a)
        for (ElemId alpha = 0; alpha < p.fibre(a).size(); ++alpha)
            out.eta[a].push_back(refl[a].klass[raw_index(c.identity(a), alpha)]);
    {
        auto eta_check = check_doctrine_morphism(p, q, fibrewise_morphism(c, out.eta), nullptr);
        if (!eta_check.ok()) internal("η is not a doctrine morphism: " + eta_check.violations.front().witness);
        for (ObjId a = 0; a < no; ++a) {
            const auto& fa = p.fibre(a);
            for (ElemId x = 0; x < fa.size(); ++x)
                for (ElemId y = 0; y < fa.size(); ++y)
                    if (fa.leq(x, y) != q.fibre(a).leq(out.eta[a][x], out.eta[a][y]))
                        internal("η does not reflect the order over " + c.object_name(a));
        }
    }

    // Prenex form: every class is ∃_g η(β) for its representative (g, β).
    for (ObjId a = 0; a < no; ++a)
        for (ElemId x = 0; x < q.fibre(a).size(); ++x) {
            const auto [g, beta] = out.representatives[a][x];
            const auto* eg = q.exists_table(g);
            if (!eg || (*eg)[out.eta[c.source(g)][beta]] != x)
                internal("completion element " + q.fibre(a).name(x) + " is not ∃ of its representative");
        }

    if (check_lambda_existential(p, lambda).ok()) {
        std::vector<std::vector<ElemId>> eps(no);
        for (ObjId a = 0; a < no; ++a) {
            eps[a].assign(q.fibre(a).size(), -1);
            for (std::size_t i = 0; i < out.raw_pairs[a].size(); ++i) {
                const auto [g, beta] = out.raw_pairs[a][i];
                const ElemId v = p.exists(g, beta);
                ElemId& slot = eps[a][refl[a].klass[i]];
                if (slot >= 0 && slot != v) internal("ε is not constant on a completion class");
                slot = v;
            }
            for (ElemId alpha = 0; alpha < p.fibre(a).size(); ++alpha)
                if (eps[a][out.eta[a][alpha]] != alpha) internal("ε∘η is not the identity");
            for (ElemId x = 0; x < q.fibre(a).size(); ++x)
                if (!q.fibre(a).leq(x, out.eta[a][eps[a][x]])) internal("id ≤ η∘ε fails");
        }
        out.epsilon = std::move(eps);
    }
    return out;
}

ExistentialCompletion pure_completion(const Doctrine& p, std::size_t cap) {
    return existential_completion(p, projections_class(p.structure()), cap);
}

ExistentialCompletion full_completion(const Doctrine& p, std::size_t cap) {
    return existential_completion(p, all_morphisms(p.base()), cap);
}

// ---------------------------------------------------------------------------
// Grothendieck category

std::optional<MorId> GrothCategory::arrow_over(MorId f, ObjId from, ObjId to) const {
    const auto& c = structure->category();
    (void)c;
    const ObjId b = base_object[to];
    const MorId k = arrows_over[f][static_cast<std::size_t>(element[from]) * fibre_size[b] + element[to]];
    if (k < 0) return std::nullopt;
    return k;
}

FunctorData GrothCategory::forgetful() const { return FunctorData{base_object, underlying}; }

std::shared_ptr<const GrothCategory> groth_category(const Doctrine& p, std::size_t cap) {
    const auto& c = p.base();
    auto g = std::make_shared<GrothCategory>();
    std::vector<std::string> objects;
    g->object_at.resize(c.num_objects());
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        g->fibre_size.push_back(p.fibre(a).size());
        for (ElemId x = 0; x < p.fibre(a).size(); ++x) {
            g->object_at[a].push_back(static_cast<ObjId>(objects.size()));
            g->base_object.push_back(a);
            g->element.push_back(x);
            objects.push_back("(" + c.object_name(a) + "," + p.fibre(a).name(x) + ")");
        }
    }
    if (objects.size() > cap) throw Error("SizeCap", "Grothendieck category has " + std::to_string(objects.size()) + " objects");
    std::vector<FinCategory::MorphismSpec> specs;
    g->arrows_over.resize(c.num_morphisms());
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
        const ObjId a = c.source(f), b = c.target(f);
        const auto& fa = p.fibre(a);
        const auto& fb = p.fibre(b);
        g->arrows_over[f].assign(static_cast<std::size_t>(fa.size()) * fb.size(), -1);
        for (ElemId x = 0; x < fa.size(); ++x)
            for (ElemId y = 0; y < fb.size(); ++y)
                if (fa.leq(x, p.reindex(f, y))) {
                    g->arrows_over[f][static_cast<std::size_t>(x) * fb.size() + y] = static_cast<MorId>(specs.size());
                    g->underlying.push_back(f);
                    specs.push_back({c.morphism_name(f) + ":" + objects[g->object_at[a][x]] + "->" + objects[g->object_at[b][y]],
                                     g->object_at[a][x], g->object_at[b][y]});
                }
    }
    if (specs.size() > cap * 16) throw Error("SizeCap", "Grothendieck category has " + std::to_string(specs.size()) + " arrows");
    std::vector<MorId> ids;
    for (ObjId o = 0; o < static_cast<ObjId>(objects.size()); ++o) {
        const ObjId a = g->base_object[o];
        ids.push_back(g->arrows_over[c.identity(a)][static_cast<std::size_t>(g->element[o]) * g->fibre_size[a] + g->element[o]]);
    }
    auto cat = std::make_shared<const FinCategory>(FinCategory::generate(
        objects, specs, ids, [&](MorId k2, MorId k1) {
            const MorId f = c.compose(g->underlying[k2], g->underlying[k1]);
            const ObjId from = specs[k1].source, to = specs[k2].target;
            return g->arrows_over[f][static_cast<std::size_t>(g->element[from]) * g->fibre_size[g->base_object[to]] +
                                     g->element[to]];
        }));
    auto structure = std::make_shared<ChosenStructure>(cat);

    // Limits of 𝒢 computed from those of the base; each proposal is verified.
    const auto base = p.structure_ptr();
    const GrothCategory snapshot = *g;
    ChosenStructure::Resolver resolver;
    resolver.terminal = [base, p, snapshot]() -> std::optional<ObjId> {
        auto t = base->terminal();
        if (!t) return std::nullopt;
        return snapshot.object_of(*t, p.fibre(*t).top());
    };
    resolver.product = [base, p, snapshot](ObjId x, ObjId y) -> std::optional<ProductCone> {
        auto cone = base->product(snapshot.base_object[x], snapshot.base_object[y]);
        if (!cone) return std::nullopt;
        const ElemId v = p.fibre(cone->vertex).meet(p.reindex(cone->pr1, snapshot.element[x]),
                                                    p.reindex(cone->pr2, snapshot.element[y]));
        const ObjId vo = snapshot.object_of(cone->vertex, v);
        auto p1 = snapshot.arrow_over(cone->pr1, vo, x);
        auto p2 = snapshot.arrow_over(cone->pr2, vo, y);
        if (!p1 || !p2) return std::nullopt;
        return ProductCone{vo, *p1, *p2};
    };
    resolver.pullback = [base, p, snapshot, cat](MorId kf, MorId kg) -> std::optional<PullbackSpan> {
        auto span = base->pullback(snapshot.underlying[kf], snapshot.underlying[kg]);
        if (!span) return std::nullopt;
        const ObjId zc = cat->source(kf), za = cat->source(kg);
        const ElemId v = p.fibre(span->vertex).meet(p.reindex(span->to_c, snapshot.element[zc]),
                                                    p.reindex(span->to_a, snapshot.element[za]));
        const ObjId vo = snapshot.object_of(span->vertex, v);
        auto l1 = snapshot.arrow_over(span->to_c, vo, zc);
        auto l2 = snapshot.arrow_over(span->to_a, vo, za);
        if (!l1 || !l2) return std::nullopt;
        return PullbackSpan{vo, *l1, *l2};
    };
    structure->set_resolver(std::move(resolver));
    g->structure = structure;
    return g;
}

LeftClass lift_class(const GrothCategory& g, const LeftClass& lambda) {
    LeftClass out{"U^-1(" + lambda.name + ")", {}};
    for (MorId f : g.underlying) out.members.push_back(lambda.contains(f));
    return out;
}

ComprehensionCompletion comprehension_completion(const Doctrine& p, std::size_t cap) {
    ComprehensionCompletion out;
    out.groth = groth_category(p, cap);
    const auto& g = *out.groth;
    const auto& gc = g.category();
    std::vector<LatticePtr> fibres;
    std::vector<std::vector<int>> position(gc.num_objects());
    for (ObjId o = 0; o < gc.num_objects(); ++o) {
        const auto& fa = p.fibre(g.base_object[o]);
        std::vector<ElemId> keep;
        position[o].assign(fa.size(), -1);
        for (ElemId x = 0; x < fa.size(); ++x)
            if (fa.leq(x, g.element[o])) {
                position[o][x] = static_cast<int>(keep.size());
                keep.push_back(x);
            }
        fibres.push_back(subposet(fa, keep));
        out.inclusion.push_back(std::move(keep));
    }
    std::vector<std::vector<ElemId>> reindex(gc.num_morphisms());
    for (MorId k = 0; k < gc.num_morphisms(); ++k) {
        const ObjId from = gc.source(k), to = gc.target(k);
        const MorId f = g.underlying[k];
        const auto& fa = p.fibre(g.base_object[from]);
        for (ElemId x : out.inclusion[to])
            reindex[k].push_back(position[from][fa.meet(p.reindex(f, x), g.element[from])]);
    }
    out.doctrine = validate_doctrine(g.structure, std::move(fibres), std::move(reindex));
    return out;
}

// ---------------------------------------------------------------------------
// Extensional reflection

ExtensionalReflection extensional_reflection(const Doctrine& p) {
    const auto& c = p.base();
    const auto& s = p.structure();
    auto el = find_elementary_structure(p);
    if (!el.found()) throw Error("NotElementary", "no equality predicate on " + c.object_name(*el.obstructed));
    const auto& delta = el.witness->delta;
    const int nm = c.num_morphisms();
    ExtensionalReflection out;

    // Provable equality where δ_B and B×B are available.
    std::vector<char> checkable(c.num_objects(), 0);
    std::vector<std::vector<MorId>> related(nm);
    for (ObjId b = 0; b < c.num_objects(); ++b) {
        auto sq = s.product(b, b);
        checkable[b] = sq && delta[b];
        bool parallel = false;
        for (ObjId a = 0; a < c.num_objects(); ++a) {
            const auto& hom = c.hom(a, b);
            parallel = parallel || hom.size() > 1;
            if (!checkable[b] || hom.size() < 2) continue;
            for (MorId f : hom)
                for (MorId g : hom) {
                    auto fg = s.pair(*sq, f, g);
                    if (!fg) internal("pairing of " + pair_name(c, f, g) + " missing from a product");
                    if (p.reindex(*fg, *delta[b]) == p.fibre(a).top()) related[f].push_back(g);
                }
        }
        if (parallel && !checkable[b]) out.unverified.push_back(b);
    }

    // Congruence generated by the checkable pairs; elsewhere it is only inferred.
    std::vector<int> parent(nm);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    auto unite = [&](int x, int y) {
        x = find(x), y = find(y);
        if (x == y) return false;
        parent[std::max(x, y)] = std::min(x, y);
        return true;
    };
    for (MorId f = 0; f < nm; ++f)
        for (MorId g : related[f]) unite(f, g);
    for (bool changed = true; changed;) {
        changed = false;
        for (MorId f = 0; f < nm; ++f) {
            const MorId r = find(f);
            if (r == f) continue;
            for (ObjId x = 0; x < c.num_objects(); ++x) {
                for (MorId h : c.hom(c.target(f), x)) changed |= unite(c.compose(h, f), c.compose(h, r));
                for (MorId k : c.hom(x, c.source(f))) changed |= unite(c.compose(f, k), c.compose(r, k));
            }
        }
    }
    std::vector<Violation> v;
    for (MorId f = 0; f < nm && v.empty(); ++f) {
        const MorId r = find(f);
        if (r == f) continue;
        if (checkable[c.target(f)] && std::find(related[r].begin(), related[r].end(), f) == related[r].end())
            v.push_back({"congruence", pair_name(c, r, f)});
        if (p.reindex_table(f) != p.reindex_table(r)) v.push_back({"descent", pair_name(c, r, f)});
    }
    for (MorId f = 0; f < nm && v.empty(); ++f)
        for (MorId g : related[f])
            if (find(f) != find(g)) v.push_back({"equivalence", pair_name(c, f, g)});
    if (!v.empty()) throw Error("NotACongruence", v.front().law + " fails on " + v.front().witness, v);

    out.klass.assign(nm, -1);
    std::vector<int> dense(nm, -1);
    int next = 0;
    for (MorId f = 0; f < nm; ++f) {
        const int r = find(f);
        if (dense[r] < 0) dense[r] = next++;
        out.klass[f] = dense[r];
    }
    auto cat = std::make_shared<const FinCategory>(quotient_category(c, out.klass, &out.representative));
    auto structure = std::make_shared<ChosenStructure>(cat);
    const auto base = p.structure_ptr();
    const auto klass = out.klass;
    const auto rep = out.representative;
    ChosenStructure::Resolver resolver;
    resolver.terminal = [base]() { return base->terminal(); };
    resolver.product = [base, klass](ObjId a, ObjId b) -> std::optional<ProductCone> {
        auto cone = base->product(a, b);
        if (!cone) return std::nullopt;
        return ProductCone{cone->vertex, klass[cone->pr1], klass[cone->pr2]};
    };
    resolver.pullback = [base, klass, rep](MorId f, MorId g) -> std::optional<PullbackSpan> {
        auto span = base->pullback(rep[f], rep[g]);
        if (!span) return std::nullopt;
        return PullbackSpan{span->vertex, klass[span->to_c], klass[span->to_a]};
    };
    structure->set_resolver(std::move(resolver));
    out.structure = structure;
    std::vector<std::vector<ElemId>> reindex;
    for (MorId r : out.representative) reindex.push_back(p.reindex_table(r));
    out.doctrine = validate_doctrine(structure, p.fibres(), std::move(reindex));
    return out;
}

PredicatesCategory predicates_category(const Doctrine& p, std::size_t cap) {
    auto cc = comprehension_completion(p, cap);
    auto refl = extensional_reflection(cc.doctrine);
    return PredicatesCategory{std::move(cc), std::move(refl)};
}

// ---------------------------------------------------------------------------
// Comprehensions

bool is_comprehension(const Doctrine& p, MorId cm, ElemId alpha, bool strict) {
    const auto& c = p.base();
    const ObjId x = c.source(cm), a = c.target(cm);
    if (p.reindex(cm, alpha) != p.fibre(x).top()) return false;
    for (ObjId y = 0; y < c.num_objects(); ++y)
        for (MorId f : c.hom(y, a)) {
            if (p.reindex(f, alpha) != p.fibre(y).top()) continue;
            int count = 0;
            for (MorId m : c.hom(y, x))
                if (c.compose(cm, m) == f) ++count;
            if (count == 0 || (strict && count > 1)) return false;
        }
    return true;
}

ComprehensionSearch find_comprehension(const Doctrine& p, ObjId a, ElemId alpha) {
    const auto& c = p.base();
    ComprehensionSearch out;
    std::vector<MorId> stricts;
    for (MorId m = 0; m < c.num_morphisms(); ++m) {
        if (c.target(m) != a) continue;
        if (!out.weak && is_comprehension(p, m, alpha, false)) out.weak = m;
        if (is_comprehension(p, m, alpha, true)) stricts.push_back(m);
    }
    if (!stricts.empty()) out.strict = stricts.front();
    for (std::size_t i = 1; i < stricts.size(); ++i) {
        bool iso = false;
        for (MorId m : c.hom(c.source(stricts[i]), c.source(stricts[0])))
            if (c.compose(stricts[0], m) == stricts[i] && is_iso(c, m)) iso = true;
        if (!iso)
            throw Error("AmbiguousComprehension", c.morphism_name(stricts[0]) + " and " + c.morphism_name(stricts[i]) +
                                                      " both classify " + p.fibre(a).name(alpha));
    }
    return out;
}

ComprehensionReport check_comprehension_properties(const Doctrine& p) {
    const auto& c = p.base();
    ComprehensionReport r;
    r.comprehension.resize(c.num_objects());
    for (ObjId a = 0; a < c.num_objects(); ++a)
        for (ElemId x = 0; x < p.fibre(a).size(); ++x) {
            auto found = find_comprehension(p, a, x);
            if (!found.strict) {
                if (r.has_all) r.witnesses.push_back({"strict", c.object_name(a) + ": " + p.fibre(a).name(x)});
                r.has_all = false;
            }
            if (!found.weak) {
                if (r.has_all_weak) r.witnesses.push_back({"weak", c.object_name(a) + ": " + p.fibre(a).name(x)});
                r.has_all_weak = false;
            }
            r.comprehension[a].push_back(found);
        }
    auto chosen = [&](ObjId a, ElemId x) -> std::optional<MorId> {
        const auto& f = r.comprehension[a][x];
        return f.strict ? f.strict : f.weak;
    };
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        const auto& fa = p.fibre(a);
        for (ElemId x = 0; x < fa.size(); ++x) {
            auto cx = chosen(a, x);
            if (!cx) {
                r.full = r.composable = false;
                continue;
            }
            for (ElemId y = 0; y < fa.size(); ++y) {
                auto cy = chosen(a, y);
                if (!cy || fa.leq(x, y)) continue;
                for (MorId m : c.hom(c.source(*cx), c.source(*cy)))
                    if (c.compose(*cy, m) == *cx) {
                        if (r.full) r.witnesses.push_back({"full", c.object_name(a) + ": (" + fa.name(x) + ", " + fa.name(y) + ")"});
                        r.full = false;
                        break;
                    }
            }
            const ObjId dom = c.source(*cx);
            for (ElemId b = 0; b < p.fibre(dom).size(); ++b) {
                auto cb = chosen(dom, b);
                if (!cb) continue;
                const MorId composite = c.compose(*cx, *cb);
                bool classified = false;
                for (ElemId g = 0; g < fa.size() && !classified; ++g)
                    classified = is_comprehension(p, composite, g, r.has_all);
                if (!classified) {
                    if (r.composable)
                        r.witnesses.push_back({"composable", c.object_name(a) + ": " + fa.name(x) + " then " + p.fibre(dom).name(b)});
                    r.composable = false;
                }
            }
        }
    }
    ElementaryResult el;
    try {
        el = find_elementary_structure(p);
    } catch (const Error&) {
        return r;
    }
    if (!el.found()) return r;
    bool diag = true;
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        auto d = p.structure().diagonal(a);
        if (!d || !el.witness->delta[a]) {
            r.unverified_diagonals.push_back(a);
            continue;
        }
        if (!is_comprehension(p, *d, *el.witness->delta[a], true)) {
            if (diag) r.witnesses.push_back({"diagonal", c.object_name(a)});
            diag = false;
        }
    }
    r.comprehensive_diagonals = diag;
    return r;
}

LeftClass comprehension_class(const Doctrine& p) {
    const auto& c = p.base();
    LeftClass out{"comp", std::vector<bool>(c.num_morphisms(), false)};
    for (MorId m = 0; m < c.num_morphisms(); ++m)
        for (ElemId x = 0; x < p.fibre(c.target(m)).size() && !out.members[m]; ++x)
            out.members[m] = is_comprehension(p, m, x, true);
    return out;
}

// ---------------------------------------------------------------------------
// Comparisons with weak subobjects doctrines

namespace {

// Records comps[a][alpha] = value, reporting a conflict once.
void assign(std::vector<std::vector<ElemId>>& comps, ObjId a, ElemId alpha, ElemId value, bool& ok,
            std::vector<Violation>& w, const std::string& where) {
    ElemId& slot = comps[a][alpha];
    if (slot >= 0 && slot != value) {
        if (ok) w.push_back({"not-well-defined", where});
        ok = false;
        return;
    }
    slot = value;
}

void finish_verdict(const Doctrine& p, const Doctrine& psi, const DoctrineMorphism& m, const LeftClass& lambda,
                    std::vector<char>& fibre_iso, bool& verdict, std::vector<Violation>& w) {
    const auto& c = p.base();
    fibre_iso.assign(c.num_objects(), 0);
    bool all = true;
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        const auto& comp = m.components[a];
        fibre_iso[a] = std::find(comp.begin(), comp.end(), -1) == comp.end() &&
                       is_bijective_order_iso(p.fibre(a), psi.fibre(m.functor.object_map[a]), comp);
        if (!fibre_iso[a]) {
            w.push_back({"fibre", c.object_name(a) + ": " + std::to_string(p.fibre(a).size()) + " elements against " +
                                      std::to_string(psi.fibre(m.functor.object_map[a]).size())});
            all = false;
        }
    }
    auto rep = check_doctrine_morphism(p, psi, m, &lambda);
    if (!rep.ok())
        for (const auto& v : rep.violations)
            if (v.law != "undefined") w.push_back(v);
    verdict = verdict && all && rep.ok();
}

}  // namespace

Comparison build_comparison_groth(const Doctrine& p, const Selection& sel, const LeftClass& lambda, std::size_t cap) {
    const auto& c = p.base();
    auto sub = restrict_subdoctrine(p, sel);
    Comparison out;
    out.sub = sub.doctrine;
    out.groth = groth_category(sub.doctrine, cap);
    const auto& g = *out.groth;
    const auto& gc = g.category();
    const auto lifted = lift_class(g, lambda);
    out.psi = weak_subobjects_doctrine(g.structure, lifted);
    const auto& psi = out.psi;
    std::vector<ObjId> top_of(c.num_objects());
    for (ObjId a = 0; a < c.num_objects(); ++a) top_of[a] = g.object_of(a, sub.doctrine.fibre(a).top());
    auto& m = out.morphism;
    m.functor.object_map = top_of;
    for (MorId f = 0; f < c.num_morphisms(); ++f)
        m.functor.morphism_map.push_back(*g.arrow_over(f, top_of[c.source(f)], top_of[c.target(f)]));
    m.components.resize(c.num_objects());
    for (ObjId a = 0; a < c.num_objects(); ++a) m.components[a].assign(p.fibre(a).size(), -1);
    out.verdict = true;
    auto psi_exists_top = [&](MorId k) { return psi.exists(k, psi.fibre(gc.source(k)).top()); };
    for (MorId f : lambda.list()) {
        const ObjId a = c.target(f), b = c.source(f);
        const auto* ef = p.exists_table(f);
        if (!ef) {
            out.verdict = false;
            out.witnesses.push_back({"exists", "no left adjoint along " + c.morphism_name(f)});
            continue;
        }
        for (ElemId beta = 0; beta < sub.doctrine.fibre(b).size(); ++beta) {
            const auto k = g.arrow_over(f, g.object_of(b, beta), top_of[a]);
            assign(m.components, a, (*ef)[sub.inclusion[b][beta]], psi_exists_top(*k), out.verdict, out.witnesses,
                   c.morphism_name(f) + " at " + sub.doctrine.fibre(b).name(beta));
        }
    }
    // (L̄, l̄)∘(id, ι) = (L, l): ι(β) goes to the comprehension map id: (A,β) → (A,⊤).
    for (ObjId a = 0; a < c.num_objects(); ++a)
        for (ElemId beta = 0; beta < sub.doctrine.fibre(a).size(); ++beta) {
            const auto k = g.arrow_over(c.identity(a), g.object_of(a, beta), top_of[a]);
            if (m.components[a][sub.inclusion[a][beta]] != psi_exists_top(*k)) {
                out.verdict = false;
                out.witnesses.push_back({"NonCommuting", c.object_name(a) + ": " + sub.doctrine.fibre(a).name(beta)});
            }
        }
    finish_verdict(p, psi, m, lambda, out.fibre_iso, out.verdict, out.witnesses);
    return out;
}

PredComparison build_comparison_pred(const Doctrine& p, const Selection& sel, std::size_t cap) {
    const auto& c = p.base();
    auto sub = restrict_subdoctrine(p, sel);
    PredComparison out{predicates_category(sub.doctrine, cap), sub.doctrine, {}, {}, {}, false, false, std::nullopt, {}};
    const auto& g = *out.prd.completion.groth;
    const auto& refl = out.prd.reflection;
    const auto& prd = out.prd.category();
    out.psi = weak_subobjects_doctrine(refl.structure, all_morphisms(prd));
    const auto& psi = out.psi;
    const auto lambda = projections_class(p.structure());
    std::vector<ObjId> top_of(c.num_objects());
    for (ObjId a = 0; a < c.num_objects(); ++a) top_of[a] = g.object_of(a, sub.doctrine.fibre(a).top());
    auto& m = out.morphism;
    m.functor.object_map = top_of;
    for (MorId f = 0; f < c.num_morphisms(); ++f)
        m.functor.morphism_map.push_back(refl.klass[*g.arrow_over(f, top_of[c.source(f)], top_of[c.target(f)])]);
    m.components.resize(c.num_objects());
    for (ObjId a = 0; a < c.num_objects(); ++a) m.components[a].assign(p.fibre(a).size(), -1);
    out.verdict = true;
    auto psi_exists_top = [&](MorId k) {
        const MorId kk = refl.klass[k];
        return psi.exists(kk, psi.fibre(prd.source(kk)).top());
    };
    for (MorId f : lambda.list()) {
        const ObjId a = c.target(f), b = c.source(f);
        const auto* ef = p.exists_table(f);
        if (!ef) {
            out.verdict = false;
            out.witnesses.push_back({"exists", "no left adjoint along " + c.morphism_name(f)});
            continue;
        }
        for (ElemId beta = 0; beta < sub.doctrine.fibre(b).size(); ++beta) {
            const auto k = g.arrow_over(f, g.object_of(b, beta), top_of[a]);
            assign(m.components, a, (*ef)[sub.inclusion[b][beta]], psi_exists_top(*k), out.verdict, out.witnesses,
                   c.morphism_name(f) + " at " + sub.doctrine.fibre(b).name(beta));
        }
    }
    for (ObjId a = 0; a < c.num_objects(); ++a)
        for (ElemId beta = 0; beta < sub.doctrine.fibre(a).size(); ++beta) {
            const auto k = g.arrow_over(c.identity(a), g.object_of(a, beta), top_of[a]);
            if (m.components[a][sub.inclusion[a][beta]] != psi_exists_top(*k)) {
                out.verdict = false;
                out.witnesses.push_back({"NonCommuting", c.object_name(a) + ": " + sub.doctrine.fibre(a).name(beta)});
            }
        }
    finish_verdict(p, psi, m, lambda, out.fibre_iso, out.verdict, out.witnesses);
    auto props = check_comprehension_properties(refl.doctrine);
    out.weak_comprehensions = props.has_all_weak;
    out.comprehensive_diagonals = props.comprehensive_diagonals;
    return out;
}

}  // namespace doctrina
