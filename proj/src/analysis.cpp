#include "doctrina/analysis.hpp"

#include <algorithm>

#include "doctrina/bases.hpp"

namespace doctrina {

namespace {

// Sections h of g (g·h = id), lowest id first.
std::vector<MorId> sections_of(const FinCategory& c, MorId g) {
    std::vector<MorId> out;
    const ObjId b = c.target(g);
    for (MorId h : c.hom(b, c.source(g)))
        if (c.compose(g, h) == c.identity(b)) out.push_back(h);
    return out;
}

// Splitting of α ∈ P(B) along the arrows of Λ into B, using precomputed sections.
SplitResult split_with(const Doctrine& p, const LeftClass& lambda, ObjId b, ElemId alpha,
                       const std::vector<std::vector<MorId>>& sections) {
    const auto& c = p.base();
    const auto& fb = p.fibre(b);
    for (ObjId a = 0; a < c.num_objects(); ++a)
        for (MorId g : c.hom(a, b)) {
            if (!lambda.contains(g)) continue;
            const auto* ex = p.exists_table(g);
            if (!ex) continue;
            for (ElemId beta = 0; beta < p.fibre(a).size(); ++beta) {
                if (!fb.leq(alpha, (*ex)[beta])) continue;
                bool found = false;
                for (MorId h : sections[g])
                    if (fb.leq(alpha, p.reindex(h, beta))) {
                        found = true;
                        break;
                    }
                if (!found) return {false, SplitWitness{g, beta, kNoMorphism}};
            }
        }
    return {};
}

std::vector<std::vector<MorId>> all_sections(const FinCategory& c) {
    std::vector<std::vector<MorId>> s(c.num_morphisms());
    for (MorId g = 0; g < c.num_morphisms(); ++g) s[g] = sections_of(c, g);
    return s;
}

std::string split_text(const Doctrine& p, ObjId b, ElemId alpha, const SplitWitness& w) {
    const auto& c = p.base();
    std::string s = p.fibre(b).name(alpha) + " at " + c.object_name(b);
    if (w.via != kNoMorphism && !c.is_identity(w.via)) s += " via " + c.morphism_name(w.via);
    return s + ": (" + c.morphism_name(w.g) + ", " + p.fibre(c.source(w.g)).name(w.beta) + ")";
}

bool same_selection(const Selection& a, const Selection& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto x = a[i], y = b[i];
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        if (x != y) return false;
    }
    return true;
}

bool fibre_bijection(const InfSemilattice& a, const InfSemilattice& b, const std::vector<ElemId>& table) {
    if (a.size() != b.size()) return false;
    std::vector<char> hit(b.size(), 0);
    for (ElemId x = 0; x < a.size(); ++x) {
        if (table[x] < 0 || hit[table[x]]) return false;
        hit[table[x]] = 1;
    }
    for (ElemId x = 0; x < a.size(); ++x)
        for (ElemId y = 0; y < a.size(); ++y)
            if (a.leq(x, y) != b.leq(table[x], table[y])) return false;
    return true;
}

}  // namespace

SplitResult is_existential_splitting(const Doctrine& p, const LeftClass& lambda, ObjId b, ElemId alpha) {
    const auto& c = p.base();
    std::vector<std::vector<MorId>> sections(c.num_morphisms());
    for (MorId g = 0; g < c.num_morphisms(); ++g)
        if (c.target(g) == b && lambda.contains(g)) sections[g] = sections_of(c, g);
    return split_with(p, lambda, b, alpha, sections);
}

SplitResult is_existential_free(const Doctrine& p, const LeftClass& lambda, ObjId a, ElemId alpha) {
    const auto& c = p.base();
    const auto sections = all_sections(c);
    for (ObjId b = 0; b < c.num_objects(); ++b)
        for (MorId f : c.hom(b, a)) {
            auto r = split_with(p, lambda, b, p.reindex(f, alpha), sections);
            if (!r.holds) {
                r.witness->via = f;
                return r;
            }
        }
    return {};
}

FreeElementReport free_elements(const Doctrine& p, const LeftClass& lambda) {
    const auto& c = p.base();
    const auto sections = all_sections(c);
    const int n = c.num_objects();
    FreeElementReport rep;
    rep.splitting.resize(n);
    rep.free.resize(n);
    rep.witness.resize(n);
    std::vector<std::vector<std::optional<SplitWitness>>> split_witness(n);
    for (ObjId b = 0; b < n; ++b) {
        const int k = p.fibre(b).size();
        rep.splitting[b].assign(k, 1);
        split_witness[b].resize(k);
        for (ElemId x = 0; x < k; ++x) {
            auto r = split_with(p, lambda, b, x, sections);
            rep.splitting[b][x] = r.holds;
            split_witness[b][x] = r.witness;
        }
    }
    for (ObjId a = 0; a < n; ++a) {
        const int k = p.fibre(a).size();
        rep.free[a].assign(k, 1);
        rep.witness[a].resize(k);
        for (ElemId x = 0; x < k; ++x) {
            if (!rep.splitting[a][x]) {
                rep.free[a][x] = 0;
                rep.witness[a][x] = split_witness[a][x];
                rep.witness[a][x]->via = c.identity(a);
                continue;
            }
            for (ObjId b = 0; b < n && rep.free[a][x]; ++b)
                for (MorId f : c.hom(b, a)) {
                    const ElemId y = p.reindex(f, x);
                    if (rep.splitting[b][y]) continue;
                    rep.free[a][x] = 0;
                    rep.witness[a][x] = split_witness[b][y];
                    rep.witness[a][x]->via = f;
                    break;
                }
        }
    }
    return rep;
}

FreeSubdoctrine existential_free_subdoctrine(const Doctrine& p, const LeftClass& lambda) {
    const auto& c = p.base();
    const auto fr = free_elements(p, lambda);
    FreeSubdoctrine out;
    out.selection.resize(c.num_objects());
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        const auto& fa = p.fibre(a);
        for (ElemId x = 0; x < fa.size(); ++x)
            if (fr.free[a][x]) out.selection[a].push_back(x);
        if (!fr.free[a][fa.top()]) {
            out.has_tops = false;
            out.witnesses.push_back({"top", split_text(p, a, fa.top(), *fr.witness[a][fa.top()])});
        }
        for (ElemId x : out.selection[a])
            for (ElemId y : out.selection[a])
                if (out.meet_closed && !fr.free[a][fa.meet(x, y)]) {
                    out.meet_closed = false;
                    out.witnesses.push_back({"meet", c.object_name(a) + ": (" + fa.name(x) + ", " + fa.name(y) + ")"});
                }
    }
    // Freeness is stable under reindexing by definition; recheck the selection anyway.
    for (MorId f = 0; f < c.num_morphisms() && out.reindex_closed; ++f)
        for (ElemId x : out.selection[c.target(f)])
            if (!fr.free[c.source(f)][p.reindex(f, x)]) {
                out.reindex_closed = false;
                out.witnesses.push_back({"reindex", c.morphism_name(f) + " at " + p.fibre(c.target(f)).name(x)});
                break;
            }
    return out;
}

ChoiceReport check_choice_rules(const Doctrine& p, const LeftClass& lambda) {
    const auto& c = p.base();
    const auto& s = p.structure();
    const int n = c.num_objects();
    const auto sections = all_sections(c);
    ChoiceReport rep;

    // Λ-RC and ERC: every top splits along Λ, respectively along every arrow.
    const auto all = all_morphisms(c);
    for (ObjId a = 0; a < n; ++a) {
        const ElemId t = p.fibre(a).top();
        auto r = split_with(p, lambda, a, t, sections);
        if (!r.holds) {
            if (rep.lambda_rc) rep.witnesses.push_back({"lambda-rc", split_text(p, a, t, *r.witness)});
            rep.lambda_rc = false;
        }
        auto e = split_with(p, all, a, t, sections);
        if (!e.holds) {
            if (rep.erc) rep.witnesses.push_back({"erc", split_text(p, a, t, *e.witness)});
            rep.erc = false;
        }
    }

    // RC along the chosen product projections.
    for (ObjId a = 0; a < n; ++a)
        for (ObjId b = 0; b < n; ++b) {
            const auto cone = s.product(a, b);
            if (!cone) {
                rep.unverifiable.push_back("rc: no product " + c.object_name(a) + " x " + c.object_name(b));
                continue;
            }
            const auto* ex = p.exists_table(cone->pr1);
            if (!ex) {
                rep.unverifiable.push_back("rc: no adjoint along " + c.morphism_name(cone->pr1));
                continue;
            }
            const auto& fp = p.fibre(cone->vertex);
            for (ElemId phi = 0; phi < fp.size(); ++phi) {
                if ((*ex)[phi] != p.fibre(a).top()) continue;
                bool found = false;
                for (MorId f : c.hom(a, b)) {
                    const auto m = s.pair(*cone, c.identity(a), f);
                    if (m && p.reindex(*m, phi) == p.fibre(a).top()) {
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    if (rep.rc)
                        rep.witnesses.push_back({"rc", c.object_name(a) + " x " + c.object_name(b) + ": " + fp.name(phi)});
                    rep.rc = false;
                }
            }
        }

    // RUC: entire functional relations have graphs.
    try {
        Relations rel(p);
        bool ruc = true;
        for (ObjId a = 0; a < n; ++a)
            for (ObjId b = 0; b < n; ++b) {
                const auto cone = s.product(a, b);
                if (!cone || !s.product(b, b) || !s.triple(a, b, b)) {
                    rep.unverifiable.push_back("ruc: " + c.object_name(a) + ", " + c.object_name(b));
                    continue;
                }
                const auto& fp = p.fibre(cone->vertex);
                for (ElemId phi = 0; phi < fp.size(); ++phi) {
                    bool ef = false;
                    try {
                        ef = rel.entire(a, b, phi) && rel.functional(a, b, phi);
                    } catch (const Error& e) {
                        if (e.code() != "NoAdjoint") throw;
                        rep.unverifiable.push_back("ruc: no adjoint at " + c.object_name(a) + ", " + c.object_name(b));
                        break;
                    }
                    if (!ef) continue;
                    bool found = false;
                    for (MorId f : c.hom(a, b)) {
                        const auto m = s.pair(*cone, c.identity(a), f);
                        if (m && p.reindex(*m, phi) == p.fibre(a).top()) {
                            found = true;
                            break;
                        }
                    }
                    if (!found) {
                        if (ruc)
                            rep.witnesses.push_back(
                                {"ruc", c.object_name(a) + " x " + c.object_name(b) + ": " + fp.name(phi)});
                        ruc = false;
                    }
                }
            }
        rep.ruc = ruc;
    } catch (const Error& e) {
        if (e.code() != "NotElementary") throw;
        rep.unverifiable.push_back("ruc: no equality predicates");
    }

    // ERC up to the extensional equality of arrows: g f ∼ id.
    try {
        const auto x = extensional_reflection(p);
        bool erc = true;
        for (ObjId a = 0; a < n; ++a)
            for (ObjId b = 0; b < n; ++b)
                for (MorId g : c.hom(b, a)) {
                    const auto* ex = p.exists_table(g);
                    if (!ex) continue;
                    for (ElemId phi = 0; phi < p.fibre(b).size(); ++phi) {
                        if ((*ex)[phi] != p.fibre(a).top()) continue;
                        bool found = false;
                        for (MorId f : c.hom(a, b))
                            if (x.klass[c.compose(g, f)] == x.klass[c.identity(a)] &&
                                p.reindex(f, phi) == p.fibre(b).top()) {
                                found = true;
                                break;
                            }
                        if (!found) {
                            if (erc)
                                rep.witnesses.push_back(
                                    {"erc-prd", "(" + c.morphism_name(g) + ", " + p.fibre(b).name(phi) + ")"});
                            erc = false;
                        }
                    }
                }
        rep.erc_prd = erc;
        for (ObjId o : x.unverified) rep.unverifiable.push_back("erc-prd: equality unchecked at " + c.object_name(o));
    } catch (const Error& e) {
        if (e.code() != "NotElementary" && e.code() != "NotACongruence") throw;
        rep.unverifiable.push_back("erc-prd: " + e.code());
    }
    return rep;
}

EpsilonReport check_epsilon_operators(const Doctrine& p) {
    const auto& c = p.base();
    const auto& s = p.structure();
    EpsilonReport rep;
    for (ObjId a = 0; a < c.num_objects(); ++a)
        for (ObjId b = 0; b < c.num_objects(); ++b) {
            const auto cone = s.product(a, b);
            if (!cone) {
                rep.missing.push_back(c.object_name(a) + " x " + c.object_name(b));
                continue;
            }
            const auto* ex = p.exists_table(cone->pr1);
            const auto& fp = p.fibre(cone->vertex);
            if (!ex) {
                rep.equipped = false;
                rep.witnesses.push_back({"adjoint", c.morphism_name(cone->pr1)});
                continue;
            }
            for (ElemId alpha = 0; alpha < fp.size(); ++alpha) {
                EpsilonEntry entry{a, b, alpha, std::nullopt};
                for (MorId f : c.hom(a, b)) {
                    const auto m = s.pair(*cone, c.identity(a), f);
                    if (m && p.reindex(*m, alpha) == (*ex)[alpha]) {
                        entry.epsilon = f;
                        break;
                    }
                }
                if (!entry.epsilon) {
                    if (rep.equipped)
                        rep.witnesses.push_back(
                            {"epsilon", c.object_name(a) + " x " + c.object_name(b) + ": " + fp.name(alpha)});
                    rep.equipped = false;
                }
                rep.table.push_back(entry);
            }
        }
    return rep;
}

bool iso_to_pure_completion(const Doctrine& p, std::size_t cap) {
    const auto q = pure_completion(p, cap);
    for (ObjId a = 0; a < p.base().num_objects(); ++a)
        if (q.doctrine.fibre(a).size() != p.fibre(a).size()) return false;
    return true;
}

CharacterizationVerdict characterize_completion(const Doctrine& p, const LeftClass& lambda,
                                                const CharacterizationOptions& options) {
    const auto& c = p.base();
    const int n = c.num_objects();
    CharacterizationVerdict v;

    const auto ex = check_lambda_existential(p, lambda);
    v.existential = ex.ok();
    for (const auto& w : ex.counterexamples) v.witnesses.push_back({"existential/" + w.law, w.witness});
    for (const auto& u : ex.unverifiable) v.unverifiable.push_back(u);

    const auto fr = free_elements(p, lambda);
    v.free = existential_free_subdoctrine(p, lambda);

    // (a) every top is free.
    for (ObjId a = 0; a < n; ++a) {
        const ElemId t = p.fibre(a).top();
        if (!fr.free[a][t]) {
            if (v.rule_of_choice) v.witnesses.push_back({"a", split_text(p, a, t, *fr.witness[a][t])});
            v.rule_of_choice = false;
        }
    }
    // (b) meets of free elements are free.
    v.meet_closed = v.free.meet_closed;
    for (const auto& w : v.free.witnesses)
        if (w.law == "meet") v.witnesses.push_back({"b", w.witness});

    // (c) every α is ∃_g β for some g ∈ Λ and β free.
    std::vector<ObjId> scope = options.enough_at;
    if (scope.empty())
        for (ObjId a = 0; a < n; ++a) scope.push_back(a);
    for (ObjId a : scope) {
        const auto& fa = p.fibre(a);
        std::vector<char> covered(fa.size(), 0);
        for (ObjId b = 0; b < n; ++b)
            for (MorId g : c.hom(b, a)) {
                if (!lambda.contains(g)) continue;
                const auto* e = p.exists_table(g);
                if (!e) continue;
                for (ElemId beta : v.free.selection[b]) covered[(*e)[beta]] = 1;
            }
        for (ElemId x = 0; x < fa.size(); ++x)
            if (!covered[x]) {
                if (v.enough) v.witnesses.push_back({"c", fa.name(x) + " at " + c.object_name(a)});
                v.enough = false;
            }
    }

    if (!v.yes() || !options.reconstruct) return v;
    try {
        const auto sub = restrict_subdoctrine(p, v.free.selection);
        const auto comp = existential_completion(sub.doctrine, lambda, options.cap);
        std::vector<std::vector<ElemId>> rho(n);
        for (ObjId a = 0; a < n; ++a)
            for (const auto& pair : comp.representatives[a]) {
                const auto* e = p.exists_table(pair.arrow);
                const ElemId beta = sub.inclusion[c.source(pair.arrow)][pair.element];
                rho[a].push_back(e ? (*e)[beta] : -1);
            }
        auto m = fibrewise_morphism(c, rho);
        const auto rep = check_doctrine_morphism(comp.doctrine, p, m, &lambda);
        v.fibre_iso.assign(n, 0);
        bool all_iso = true;
        for (ObjId a = 0; a < n; ++a) {
            v.fibre_iso[a] = fibre_bijection(comp.doctrine.fibre(a), p.fibre(a), rho[a]);
            all_iso = all_iso && v.fibre_iso[a];
        }
        for (const auto& w : rep.violations) v.witnesses.push_back({"reconstruction/" + w.law, w.witness});
        v.reconstruction_ok = rep.ok() && all_iso;
        v.reconstruction = std::move(m);
    } catch (const Error& e) {
        if (e.error_class() != ErrorClass::Unverifiable) throw;
        v.unverifiable.push_back("reconstruction: " + e.code() + " " + e.detail());
    }
    return v;
}

namespace {

bool equivalent_within(const FinCategory& a, const FinCategory& b, std::size_t budget) {
    const auto r = search_equivalence(a, b, budget);
    if (r.status == SearchStatus::BudgetExhausted) throw Error("BudgetExceeded", r.reason);
    return r.status == SearchStatus::Found;
}

}  // namespace

bool morita_regular(const Doctrine& p, const Doctrine& q, std::size_t budget, std::size_t cap) {
    const auto rp = regular_completion(p, cap);
    const auto rq = regular_completion(q, cap);
    return equivalent_within(*rp.reg.category, *rq.reg.category, budget);
}

bool morita_exact(const Doctrine& p, const Doctrine& q, std::size_t budget, std::size_t cap) {
    const auto tp = exact_completion(p, cap);
    const auto tq = exact_completion(q, cap);
    return equivalent_within(*tp.category, *tq.category, budget);
}

Doctrine localic_doctrine(const FiniteFrame& frame, const std::vector<int>& sizes) {
    auto fs = finite_sets(sizes, true);
    auto s = structure_of(fs.category);
    return power_doctrine(fs, s, frame.carrier());
}

bool selections_agree(const Selection& a, const Selection& b) { return same_selection(a, b); }

}  // namespace doctrina
