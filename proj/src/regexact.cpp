#include "doctrina/regexact.hpp"

#include <algorithm>
#include <set>

#include "doctrina/bases.hpp"

namespace doctrina {

namespace {

MorId pairing(const ChosenStructure& s, const ProductCone& cone, MorId f, MorId g) {
    auto m = s.pair(cone, f, g);
    if (!m) fail("Internal", "pairing into a verified product failed");
    return *m;
}

void check_cap(std::size_t n, std::size_t cap, const std::string& what) {
    if (n > cap) throw Error("SizeCap", what + " exceeds the cap of " + std::to_string(cap));
}

std::string obj_pair(const FinCategory& c, ObjId a, ObjId b) { return c.object_name(a) + "," + c.object_name(b); }

// Arrows of a category grouped by hom, keyed by a per-arrow label.
struct HomIndex {
    std::map<std::tuple<ObjId, ObjId, ElemId>, MorId> at;
    MorId find(ObjId a, ObjId b, ElemId x) const {
        auto it = at.find({a, b, x});
        return it == at.end() ? kNoMorphism : it->second;
    }
};

// Relational composition only needs ∃ along projections, but without BCC and
// FR there it stops being associative, so both completions refuse such P.
void require_existential(const Doctrine& p) {
    auto r = check_lambda_existential(p, projections_class(p.structure()));
    if (!r.ok()) throw Error("NotExistential", "not existential along projections", r.counterexamples);
}

}  // namespace

// ---------------------------------------------------------------------------
// Relations

Relations::Relations(Doctrine q) : q_(std::move(q)) {
    auto e = find_elementary_structure(q_);
    if (!e.found()) {
        const std::string where = e.obstructed ? q_.base().object_name(*e.obstructed) : std::string("?");
        throw Error("NotElementary", "no equality predicate at " + where);
    }
    delta_ = e.witness->delta;
}

ElemId Relations::delta(ObjId a) const {
    if (!delta_[a]) missing_structure("no " + q_.base().object_name(a) + "×" + q_.base().object_name(a));
    return *delta_[a];
}

ObjId Relations::product(ObjId a, ObjId b) const { return require_product(q_.structure(), a, b).vertex; }

const Relations::Triple& Relations::triple(ObjId a, ObjId b, ObjId c) const {
    auto key = std::make_tuple(a, b, c);
    if (auto it = triples_.find(key); it != triples_.end()) return it->second;
    const auto& s = q_.structure();
    auto t = s.triple(a, b, c);
    if (!t) {
        const auto& cat = s.category();
        missing_structure("no triple product (" + obj_pair(cat, a, b) + "," + cat.object_name(c) + ")");
    }
    Triple out;
    out.vertex = t->outer.vertex;
    out.m12 = pairing(s, require_product(s, a, b), t->pr1, t->pr2);
    out.m13 = pairing(s, require_product(s, a, c), t->pr1, t->pr3);
    out.m23 = pairing(s, require_product(s, b, c), t->pr2, t->pr3);
    return triples_.emplace(key, out).first->second;
}

bool Relations::entire(ObjId a, ObjId b, ElemId phi) const {
    const auto cone = require_product(q_.structure(), a, b);
    return q_.exists(cone.pr1, phi) == q_.fibre(a).top();
}

bool Relations::functional(ObjId a, ObjId b, ElemId phi) const {
    const auto& t = triple(a, b, b);
    const auto& f = q_.fibre(t.vertex);
    const ElemId lhs = f.meet(q_.reindex(t.m12, phi), q_.reindex(t.m13, phi));
    return f.leq(lhs, q_.reindex(t.m23, delta(b)));
}

ElemId Relations::compose(ObjId a, ObjId b, ObjId c, ElemId phi, ElemId psi) const {
    const auto& t = triple(a, b, c);
    const auto& f = q_.fibre(t.vertex);
    return q_.exists(t.m13, f.meet(q_.reindex(t.m12, phi), q_.reindex(t.m23, psi)));
}

ElemId Relations::graph(MorId f) const {
    const auto& s = q_.structure();
    const auto& c = s.category();
    const ObjId a = c.source(f), b = c.target(f);
    const auto ab = require_product(s, a, b);
    const auto bb = require_product(s, b, b);
    return q_.reindex(pairing(s, bb, c.compose(f, ab.pr1), ab.pr2), delta(b));
}

// ---------------------------------------------------------------------------
// Ef

RelationCategory effective_relations(const Relations& rel, std::size_t cap) {
    const auto& q = rel.doctrine();
    const auto& c = q.base();
    const int n = c.num_objects();
    std::vector<std::string> objects;
    for (ObjId a = 0; a < n; ++a) objects.push_back(c.object_name(a));

    std::vector<FinCategory::MorphismSpec> specs;
    RelationCategory out;
    HomIndex index;
    for (ObjId a = 0; a < n; ++a)
        for (ObjId b = 0; b < n; ++b) {
            const ObjId ab = rel.product(a, b);
            const auto& f = q.fibre(ab);
            for (ElemId x = 0; x < f.size(); ++x) {
                if (!rel.entire(a, b, x) || !rel.functional(a, b, x)) continue;
                index.at[{a, b, x}] = static_cast<MorId>(specs.size());
                specs.push_back({f.name(x) + ":" + c.object_name(a) + "->" + c.object_name(b), a, b});
                out.relation.push_back(x);
                check_cap(specs.size(), cap, "Ef arrow count");
            }
        }
    std::vector<MorId> ids;
    for (ObjId a = 0; a < n; ++a) {
        const MorId id = index.find(a, a, rel.delta(a));
        if (id == kNoMorphism)
            throw Error("Internal", "δ at " + c.object_name(a) + " is not an entire functional relation");
        ids.push_back(id);
    }
    auto compose = [&](MorId g, MorId f) {
        const ObjId a = specs[f].source, b = specs[f].target, cc = specs[g].target;
        const ElemId x = rel.compose(a, b, cc, out.relation[f], out.relation[g]);
        const MorId m = index.find(a, cc, x);
        if (m == kNoMorphism)
            throw Error("Internal", "relational composite " + specs[g].name + " ∘ " + specs[f].name +
                                        " is not entire and functional");
        return m;
    };
    out.category = std::make_shared<const FinCategory>(FinCategory::generate(objects, specs, ids, compose));
    return out;
}

RegularCompletion regular_completion(const Doctrine& p, std::size_t cap) {
    require_existential(p);
    RegularCompletion out;
    out.comprehension = comprehension_completion(p, cap);
    Relations rel(out.comprehension.doctrine);
    out.reg = effective_relations(rel, cap);
    const auto& cat = *out.reg.category;
    for (MorId k = 0; k < cat.num_morphisms(); ++k) {
        const ObjId prod = rel.product(cat.source(k), cat.target(k));
        out.base_relation.push_back(out.comprehension.inclusion[prod][out.reg.relation[k]]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// reg/lex

FinCategory reg_lex_direct(const ChosenStructure& s, std::size_t cap) {
    const auto& c = s.category();
    const int m = c.num_morphisms();
    std::vector<PullbackSpan> kernel;
    for (MorId f = 0; f < m; ++f) kernel.push_back(require_pullback(s, f, f));

    std::vector<std::string> objects;
    for (MorId f = 0; f < m; ++f) objects.push_back(c.morphism_name(f));
    std::vector<FinCategory::MorphismSpec> specs;
    std::vector<MorId> chosen;  // representative base arrow of each new arrow
    HomIndex index;             // keyed by (f, g, g∘m)
    for (MorId f = 0; f < m; ++f)
        for (MorId g = 0; g < m; ++g)
            for (MorId x : c.hom(c.source(f), c.source(g))) {
                const MorId gx = c.compose(g, x);
                if (c.compose(gx, kernel[f].to_c) != c.compose(gx, kernel[f].to_a)) continue;
                if (index.find(f, g, gx) != kNoMorphism) continue;
                index.at[{f, g, gx}] = static_cast<MorId>(specs.size());
                specs.push_back({"[" + c.morphism_name(x) + "]:" + objects[f] + "->" + objects[g], f, g});
                chosen.push_back(x);
                check_cap(specs.size(), cap, "reg/lex arrow count");
            }
    std::vector<MorId> ids;
    for (MorId f = 0; f < m; ++f) ids.push_back(index.find(f, f, f));
    auto compose = [&](MorId b, MorId a) {
        const MorId from = specs[a].source, to = specs[b].target;
        const MorId r = index.find(from, to, c.compose(to, c.compose(chosen[b], chosen[a])));
        if (r == kNoMorphism) throw Error("Internal", "reg/lex composite is not compatible with a kernel pair");
        return r;
    };
    return FinCategory::generate(objects, specs, ids, compose);
}

// ---------------------------------------------------------------------------
// T_P

bool is_per(const Relations& rel, ObjId a, ElemId rho) {
    const auto& q = rel.doctrine();
    const auto& t = rel.triple(a, a, a);
    const ObjId aa = rel.product(a, a);
    const auto& faa = q.fibre(aa);
    const auto& s = q.structure();
    const auto cone = require_product(s, a, a);
    const MorId swap = pairing(s, cone, cone.pr2, cone.pr1);
    if (!faa.leq(rho, q.reindex(swap, rho))) return false;
    const auto& ft = q.fibre(t.vertex);
    return ft.leq(ft.meet(q.reindex(t.m12, rho), q.reindex(t.m23, rho)), q.reindex(t.m13, rho));
}

std::array<bool, 5> per_arrow_conditions(const Relations& rel, const PerObject& x, const PerObject& y, ElemId phi) {
    const auto& q = rel.doctrine();
    const auto& s = q.structure();
    const ObjId a = x.carrier, b = y.carrier;
    const auto ab = require_product(s, a, b);
    const auto aa = require_product(s, a, a);
    const auto bb = require_product(s, b, b);
    const auto& fab = q.fibre(ab.vertex);
    std::array<bool, 5> ok{};

    const MorId p11 = pairing(s, aa, ab.pr1, ab.pr1);
    const MorId p22 = pairing(s, bb, ab.pr2, ab.pr2);
    ok[0] = fab.leq(phi, fab.meet(q.reindex(p11, x.rho), q.reindex(p22, y.rho)));

    const auto& aab = rel.triple(a, a, b);
    const auto& f1 = q.fibre(aab.vertex);
    ok[1] = f1.leq(f1.meet(q.reindex(aab.m12, x.rho), q.reindex(aab.m13, phi)), q.reindex(aab.m23, phi));

    const auto& abb = rel.triple(a, b, b);
    const auto& f2 = q.fibre(abb.vertex);
    ok[2] = f2.leq(f2.meet(q.reindex(abb.m23, y.rho), q.reindex(abb.m12, phi)), q.reindex(abb.m13, phi));
    ok[3] = f2.leq(f2.meet(q.reindex(abb.m12, phi), q.reindex(abb.m13, phi)), q.reindex(abb.m23, y.rho));

    const MorId diag = pairing(s, aa, q.base().identity(a), q.base().identity(a));
    ok[4] = q.fibre(a).leq(q.reindex(diag, x.rho), q.exists(ab.pr1, phi));
    return ok;
}

ExactCompletion exact_completion(const Doctrine& p, std::size_t cap) {
    // T_P needs no equality predicate of its own, but the relation calculus
    // shares the triple-product bookkeeping; P is elementary in every use.
    require_existential(p);
    Relations rel(p);
    const auto& c = p.base();
    ExactCompletion out;
    std::vector<std::string> objects;
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        const auto& f = p.fibre(rel.product(a, a));
        for (ElemId r = 0; r < f.size(); ++r)
            if (is_per(rel, a, r)) {
                out.objects.push_back({a, r});
                objects.push_back("(" + c.object_name(a) + "," + f.name(r) + ")");
                check_cap(objects.size(), cap, "PER count");
            }
    }
    const int n = static_cast<int>(out.objects.size());
    std::vector<FinCategory::MorphismSpec> specs;
    HomIndex index;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto& x = out.objects[i];
            const auto& y = out.objects[j];
            const auto& f = p.fibre(rel.product(x.carrier, y.carrier));
            for (ElemId phi = 0; phi < f.size(); ++phi) {
                auto ok = per_arrow_conditions(rel, x, y, phi);
                if (!std::all_of(ok.begin(), ok.end(), [](bool b) { return b; })) continue;
                index.at[{i, j, phi}] = static_cast<MorId>(specs.size());
                specs.push_back({f.name(phi) + ":" + objects[i] + "->" + objects[j], i, j});
                out.relation.push_back(phi);
                check_cap(specs.size(), cap, "T_P arrow count");
            }
        }
    std::vector<MorId> ids;
    for (int i = 0; i < n; ++i) {
        const MorId id = index.find(i, i, out.objects[i].rho);
        if (id == kNoMorphism) throw Error("Internal", "the PER " + objects[i] + " fails (i)–(v) as its own identity");
        ids.push_back(id);
    }
    auto compose = [&](MorId g, MorId f) {
        const ObjId i = specs[f].source, j = specs[f].target, k = specs[g].target;
        const ElemId x = rel.compose(out.objects[i].carrier, out.objects[j].carrier, out.objects[k].carrier,
                                     out.relation[f], out.relation[g]);
        const MorId r = index.find(i, k, x);
        if (r == kNoMorphism)
            throw Error("Internal", "composite " + specs[g].name + " ∘ " + specs[f].name + " fails (i)–(v)");
        return r;
    };
    out.category = std::make_shared<const FinCategory>(FinCategory::generate(objects, specs, ids, compose));
    return out;
}

ExactCompletion ex_reg(StructurePtr a, std::size_t cap) {
    auto sub = m_subobjects_doctrine(a, monos_class(a->category()));
    auto r = check_lambda_existential(sub, all_morphisms(a->category()));
    if (!r.ok()) throw Error("NotRegular", "subobjects are not existential along every arrow", r.counterexamples);
    return exact_completion(sub, cap);
}

// ---------------------------------------------------------------------------
// Comparison functors

FunctorVerdict verify_functor_equivalence(const FinCategory& c, const FinCategory& d, const FunctorData& f) {
    FunctorVerdict v;
    v.functor = f;
    v.witnesses = check_functor(c, d, f);
    v.is_functor = v.witnesses.empty();
    if (!v.is_functor) return v;
    v.full = v.faithful = true;
    for (ObjId x = 0; x < c.num_objects(); ++x)
        for (ObjId y = 0; y < c.num_objects(); ++y) {
            std::set<MorId> image;
            for (MorId k : c.hom(x, y))
                if (!image.insert(f.morphism_map[k]).second && v.faithful) {
                    v.faithful = false;
                    v.witnesses.push_back({"faithful", "two arrows " + obj_pair(c, x, y) + " share an image"});
                }
            const auto& target = d.hom(f.object_map[x], f.object_map[y]);
            if (image.size() < target.size() && v.full) {
                v.full = false;
                for (MorId t : target)
                    if (!image.count(t)) {
                        v.witnesses.push_back({"full", d.morphism_name(t) + " has no preimage"});
                        break;
                    }
            }
        }
    v.essentially_surjective = true;
    for (ObjId y = 0; y < d.num_objects(); ++y) {
        bool hit = false;
        for (ObjId x = 0; x < c.num_objects() && !hit; ++x) {
            const ObjId fx = f.object_map[x];
            for (MorId k : d.hom(fx, y))
                if (is_iso(d, k)) {
                    hit = true;
                    break;
                }
        }
        if (!hit) {
            v.essentially_surjective = false;
            v.witnesses.push_back({"essentially-surjective", d.object_name(y) + " is not isomorphic to an image"});
            break;
        }
    }
    return v;
}

namespace {

// The push-forward n: Ψ over 𝒢_{P'} → P. An element of Ψ(X) is the class of
// an arrow f: (B, β) → X of 𝒢_{P'}, and goes to ∃_{Uf}(ιβ).
struct PushForward {
    const Doctrine& p;
    Subdoctrine sub;
    std::shared_ptr<const GrothCategory> groth;
    Doctrine psi;

    PushForward(const Doctrine& p_, const Selection& sel, std::size_t cap)
        : p(p_), sub(restrict_subdoctrine(p_, sel)), groth(groth_category(sub.doctrine, cap)) {
        psi = weak_subobjects_doctrine(groth->structure, all_morphisms(groth->category()));
    }

    ElemId operator()(ObjId x, ElemId xi) const {
        const auto& gc = groth->category();
        const auto& name = psi.fibre(x).name(xi);  // "[arrow]"
        const MorId f = gc.morphism(name.substr(1, name.size() - 2));
        const ObjId from = gc.source(f);
        const ElemId beta = sub.inclusion[groth->base_object[from]][groth->element[from]];
        return p.exists(groth->underlying[f], beta);
    }
};

// The source is always a full existential completion; when P is not even
// existential there is no target category and the verdict is a plain no.
std::optional<FunctorVerdict> refuse_target(const Doctrine& p) {
    auto r = check_lambda_existential(p, all_morphisms(p.base()));
    if (r.ok()) return std::nullopt;
    FunctorVerdict v;
    v.witnesses.push_back({"target", "P is not existential along every arrow"});
    v.witnesses.insert(v.witnesses.end(), r.counterexamples.begin(), r.counterexamples.end());
    return v;
}

}  // namespace

FunctorVerdict build_reg_functor(const Doctrine& p, const Selection& sel, std::size_t cap) {
    if (auto refused = refuse_target(p)) return *refused;
    PushForward n(p, sel, cap);
    auto source = regular_completion(n.psi, cap);
    auto target = regular_completion(p, cap);
    const auto& sc = *source.reg.category;
    const auto& tc = *target.reg.category;
    const auto& sg = *source.comprehension.groth;  // 𝒢_Ψ, over 𝒢_{P'}
    const auto& tg = *target.comprehension.groth;  // 𝒢_P

    FunctorData f;
    for (ObjId o = 0; o < sc.num_objects(); ++o) {
        const ObjId x = sg.base_object[o];
        f.object_map.push_back(tg.object_of(n.groth->base_object[x], n(x, sg.element[o])));
    }
    // Arrows of Reg(P) by (source, target, element of P(A×B)).
    std::map<std::tuple<ObjId, ObjId, ElemId>, MorId> lookup;
    for (MorId k = 0; k < tc.num_morphisms(); ++k)
        lookup[{tc.source(k), tc.target(k), target.base_relation[k]}] = k;
    std::vector<Violation> undefined;
    for (MorId k = 0; k < sc.num_morphisms(); ++k) {
        const ObjId xy = sg.base_object[require_product(source.comprehension.doctrine.structure(), sc.source(k),
                                                        sc.target(k)).vertex];
        const ElemId image = n(xy, source.base_relation[k]);
        auto it = lookup.find({f.object_map[sc.source(k)], f.object_map[sc.target(k)], image});
        if (it == lookup.end()) {
            undefined.push_back({"defined", sc.morphism_name(k) + " is sent to a relation outside Reg(P)"});
            f.morphism_map.push_back(kNoMorphism);
        } else {
            f.morphism_map.push_back(it->second);
        }
    }
    if (!undefined.empty()) {
        FunctorVerdict v;
        v.functor = f;
        v.witnesses = undefined;
        return v;
    }
    return verify_functor_equivalence(sc, tc, f);
}

FunctorVerdict build_exact_functor(const Doctrine& p, const Selection& sel, std::size_t cap) {
    if (auto refused = refuse_target(p)) return *refused;
    PushForward n(p, sel, cap);
    auto source = exact_completion(n.psi, cap);
    auto target = exact_completion(p, cap);
    const auto& sc = *source.category;
    const auto& tc = *target.category;
    const auto& gs = n.groth->structure;

    std::map<std::pair<ObjId, ElemId>, ObjId> per_at;
    for (ObjId o = 0; o < tc.num_objects(); ++o) per_at[{target.objects[o].carrier, target.objects[o].rho}] = o;
    FunctorData f;
    std::vector<Violation> undefined;
    for (ObjId o = 0; o < sc.num_objects(); ++o) {
        const auto& per = source.objects[o];
        const ObjId xx = require_product(*gs, per.carrier, per.carrier).vertex;
        auto it = per_at.find({n.groth->base_object[per.carrier], n(xx, per.rho)});
        if (it == per_at.end()) {
            undefined.push_back({"defined", sc.object_name(o) + " is not sent to a PER"});
            f.object_map.push_back(-1);
        } else {
            f.object_map.push_back(it->second);
        }
    }
    std::map<std::tuple<ObjId, ObjId, ElemId>, MorId> lookup;
    for (MorId k = 0; k < tc.num_morphisms(); ++k) lookup[{tc.source(k), tc.target(k), target.relation[k]}] = k;
    for (MorId k = 0; k < sc.num_morphisms() && undefined.empty(); ++k) {
        const auto& x = source.objects[sc.source(k)];
        const auto& y = source.objects[sc.target(k)];
        const ObjId xy = require_product(*gs, x.carrier, y.carrier).vertex;
        auto it = lookup.find({f.object_map[sc.source(k)], f.object_map[sc.target(k)], n(xy, source.relation[k])});
        if (it == lookup.end()) {
            undefined.push_back({"defined", sc.morphism_name(k) + " is sent outside T_P"});
            f.morphism_map.push_back(kNoMorphism);
        } else {
            f.morphism_map.push_back(it->second);
        }
    }
    if (!undefined.empty()) {
        FunctorVerdict v;
        v.functor = f;
        v.witnesses = undefined;
        return v;
    }
    return verify_functor_equivalence(sc, tc, f);
}

}  // namespace doctrina
