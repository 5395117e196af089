#include "doctrina/fincat.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace doctrina {

// ---------------------------------------------------------------------------
// FinCategory

void FinCategory::index() {
    const std::size_t no = object_names_.size();
    homs_.assign(no * no, {});
    for (MorId f = 0; f < num_morphisms(); ++f) homs_[source_[f] * no + target_[f]].push_back(f);
    object_index_.clear();
    morphism_index_.clear();
    for (ObjId a = 0; a < num_objects(); ++a) object_index_.emplace(object_names_[a], a);
    for (MorId f = 0; f < num_morphisms(); ++f) morphism_index_.emplace(morphism_names_[f], f);
}

std::vector<Violation> FinCategory::check_laws() const {
    std::vector<Violation> out;
    const int n = num_morphisms();
    auto name = [&](MorId f) { return morphism_names_[f]; };
    for (ObjId a = 0; a < num_objects(); ++a) {
        MorId i = identity_[a];
        if (i < 0 || source_[i] != a || target_[i] != a)
            out.push_back({"MissingIdentity", object_names_[a]});
    }
    if (!out.empty()) return out;
    for (MorId f = 0; f < n; ++f)
        for (MorId g = 0; g < n; ++g) {
            if (target_[f] != source_[g]) continue;
            MorId h = compose(g, f);
            if (h < 0) {
                out.push_back({"IncompleteComposition", "(" + name(g) + ", " + name(f) + ")"});
            } else if (source_[h] != source_[f] || target_[h] != target_[g]) {
                out.push_back({"IllTypedComposition",
                               "(" + name(g) + ", " + name(f) + ") -> " + name(h)});
            }
        }
    if (!out.empty()) return out;
    for (MorId f = 0; f < n; ++f) {
        if (compose(f, identity_[source_[f]]) != f)
            out.push_back({"UnitViolation", "(" + name(f) + ", " + name(identity_[source_[f]]) + ")"});
        if (compose(identity_[target_[f]], f) != f)
            out.push_back({"UnitViolation", "(" + name(identity_[target_[f]]) + ", " + name(f) + ")"});
    }
    for (MorId f = 0; f < n; ++f)
        for (ObjId c = 0; c < num_objects(); ++c)
            for (MorId g : hom(target_[f], c)) {
                MorId gf = compose(g, f);
                for (ObjId d = 0; d < num_objects(); ++d)
                    for (MorId h : hom(c, d)) {
                        if (compose(compose(h, g), f) != compose(h, gf)) {
                            out.push_back({"NonAssociative",
                                           "(" + name(h) + ", " + name(g) + ", " + name(f) + ")"});
                            if (out.size() > 16) return out;
                        }
                    }
            }
    return out;
}

FinCategory FinCategory::generate(std::vector<std::string> objects, std::vector<MorphismSpec> morphisms,
                                  std::vector<MorId> identities,
                                  const std::function<MorId(MorId, MorId)>& compose) {
    FinCategory c;
    c.object_names_ = std::move(objects);
    for (auto& m : morphisms) {
        c.morphism_names_.push_back(std::move(m.name));
        c.source_.push_back(m.source);
        c.target_.push_back(m.target);
    }
    c.identity_ = std::move(identities);
    const std::size_t n = c.morphism_names_.size();
    c.table_.assign(n * n, kNoMorphism);
    c.index();
    for (MorId f = 0; f < static_cast<MorId>(n); ++f)
        for (ObjId b = 0; b < c.num_objects(); ++b)
            for (MorId g : c.hom(c.target_[f], b)) c.table_[g * n + f] = compose(g, f);
    if (c.object_index_.size() != c.object_names_.size() ||
        c.morphism_index_.size() != c.morphism_names_.size())
        throw Error("InvalidCategory", "duplicate identifiers in generated category");
    auto v = c.check_laws();
    if (!v.empty()) throw Error("InvalidCategory", "generated category violates category laws", v);
    return c;
}

std::optional<ObjId> FinCategory::find_object(const std::string& name) const {
    auto it = object_index_.find(name);
    if (it == object_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<MorId> FinCategory::find_morphism(const std::string& name) const {
    auto it = morphism_index_.find(name);
    if (it == morphism_index_.end()) return std::nullopt;
    return it->second;
}

ObjId FinCategory::object(const std::string& name) const {
    if (auto o = find_object(name)) return *o;
    throw Error("UnresolvedRef", "object '" + name + "'");
}

MorId FinCategory::morphism(const std::string& name) const {
    if (auto m = find_morphism(name)) return *m;
    throw Error("UnresolvedRef", "morphism '" + name + "'");
}

bool FinCategory::is_preorder() const {
    return std::all_of(homs_.begin(), homs_.end(), [](const auto& h) { return h.size() <= 1; });
}

RawCategory FinCategory::to_raw() const {
    RawCategory raw;
    raw.objects = object_names_;
    for (MorId f = 0; f < num_morphisms(); ++f)
        raw.morphisms.push_back({morphism_names_[f], object_names_[source_[f]], object_names_[target_[f]]});
    for (ObjId a = 0; a < num_objects(); ++a)
        raw.identities.emplace_back(object_names_[a], morphism_names_[identity_[a]]);
    for (MorId f = 0; f < num_morphisms(); ++f)
        for (ObjId b = 0; b < num_objects(); ++b)
            for (MorId g : hom(target_[f], b))
                raw.compositions.push_back({morphism_names_[g], morphism_names_[f], morphism_names_[compose(g, f)]});
    return raw;
}

FinCategory validate_category(const RawCategory& raw) {
    FinCategory c;
    std::vector<Violation> v;
    std::unordered_map<std::string, ObjId> objs;
    for (const auto& o : raw.objects) {
        if (!objs.emplace(o, static_cast<ObjId>(objs.size())).second) v.push_back({"DuplicateObject", o});
        c.object_names_.push_back(o);
    }
    auto obj = [&](const std::string& name) -> ObjId {
        auto it = objs.find(name);
        if (it == objs.end()) throw Error("UnresolvedRef", "object '" + name + "'");
        return it->second;
    };
    std::unordered_map<std::string, MorId> mors;
    for (const auto& m : raw.morphisms) {
        if (!mors.emplace(m.name, static_cast<MorId>(mors.size())).second) v.push_back({"DuplicateMorphism", m.name});
        c.morphism_names_.push_back(m.name);
        c.source_.push_back(obj(m.source));
        c.target_.push_back(obj(m.target));
    }
    if (!v.empty()) throw Error("InvalidCategory", "duplicate identifiers", v);
    auto mor = [&](const std::string& name) -> MorId {
        auto it = mors.find(name);
        if (it == mors.end()) throw Error("UnresolvedRef", "morphism '" + name + "'");
        return it->second;
    };
    c.identity_.assign(c.object_names_.size(), kNoMorphism);
    for (const auto& [o, m] : raw.identities) c.identity_[obj(o)] = mor(m);
    const std::size_t n = c.morphism_names_.size();
    c.table_.assign(n * n, kNoMorphism);
    for (const auto& e : raw.compositions) {
        MorId g = mor(e.g), f = mor(e.f), h = mor(e.result);
        if (c.target_[f] != c.source_[g]) {
            v.push_back({"IllTypedComposition", "(" + e.g + ", " + e.f + ") not composable"});
            continue;
        }
        MorId& slot = c.table_[g * n + f];
        if (slot != kNoMorphism && slot != h)
            v.push_back({"ConflictingComposition", "(" + e.g + ", " + e.f + ")"});
        slot = h;
    }
    c.index();
    auto laws = c.check_laws();
    v.insert(v.end(), laws.begin(), laws.end());
    if (!v.empty()) throw Error("InvalidCategory", "category laws violated", v);
    return c;
}

// ---------------------------------------------------------------------------
// Monos and isos

bool is_mono(const FinCategory& c, MorId f) {
    for (ObjId x = 0; x < c.num_objects(); ++x) {
        const auto& h = c.hom(x, c.source(f));
        std::set<MorId> images;
        for (MorId g : h)
            if (!images.insert(c.compose(f, g)).second) return false;
    }
    return true;
}

std::optional<MorId> inverse(const FinCategory& c, MorId f) {
    for (MorId g : c.hom(c.target(f), c.source(f)))
        if (c.compose(g, f) == c.identity(c.source(f)) && c.compose(f, g) == c.identity(c.target(f)))
            return g;
    return std::nullopt;
}

bool is_iso(const FinCategory& c, MorId f) { return inverse(c, f).has_value(); }

// ---------------------------------------------------------------------------
// Universal properties by enumeration

namespace {

// Checks that m ↦ (l1∘m, l2∘m) is injective on hom(X, P) for every X and that
// |hom(X,P)| equals the number of competing cones, given by `cones`.
bool mediates_uniquely(const FinCategory& c, ObjId p, MorId l1, MorId l2, const std::vector<long>& cones) {
    const long n = c.num_morphisms();
    std::vector<long> keys;
    for (ObjId x = 0; x < c.num_objects(); ++x) {
        const auto& h = c.hom(x, p);
        if (static_cast<long>(h.size()) != cones[x]) return false;
        keys.clear();
        for (MorId m : h) keys.push_back(c.compose(l1, m) * n + c.compose(l2, m));
        std::sort(keys.begin(), keys.end());
        if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) return false;
    }
    return true;
}

std::vector<long> product_cones(const FinCategory& c, ObjId a, ObjId b) {
    std::vector<long> cones(c.num_objects());
    for (ObjId x = 0; x < c.num_objects(); ++x)
        cones[x] = static_cast<long>(c.hom(x, a).size()) * static_cast<long>(c.hom(x, b).size());
    return cones;
}

std::vector<long> pullback_cones(const FinCategory& c, MorId f, MorId g) {
    std::vector<long> cones(c.num_objects(), 0);
    std::vector<long> count(c.num_morphisms(), 0);
    const ObjId cc = c.source(f), aa = c.source(g);
    for (ObjId x = 0; x < c.num_objects(); ++x) {
        for (MorId a : c.hom(x, aa)) ++count[c.compose(g, a)];
        for (MorId m : c.hom(x, cc)) cones[x] += count[c.compose(f, m)];
        for (MorId a : c.hom(x, aa)) count[c.compose(g, a)] = 0;
    }
    return cones;
}

bool counts_match(const FinCategory& c, ObjId p, const std::vector<long>& cones) {
    for (ObjId x = 0; x < c.num_objects(); ++x)
        if (static_cast<long>(c.hom(x, p).size()) != cones[x]) return false;
    return true;
}

}  // namespace

bool is_product(const FinCategory& c, ObjId a, ObjId b, const ProductCone& cone) {
    if (c.source(cone.pr1) != cone.vertex || c.source(cone.pr2) != cone.vertex || c.target(cone.pr1) != a ||
        c.target(cone.pr2) != b)
        return false;
    return mediates_uniquely(c, cone.vertex, cone.pr1, cone.pr2, product_cones(c, a, b));
}

bool is_pullback(const FinCategory& c, MorId f, MorId g, const PullbackSpan& s) {
    if (c.target(f) != c.target(g)) return false;
    if (c.source(s.to_c) != s.vertex || c.source(s.to_a) != s.vertex || c.target(s.to_c) != c.source(f) ||
        c.target(s.to_a) != c.source(g))
        return false;
    if (c.compose(f, s.to_c) != c.compose(g, s.to_a)) return false;
    return mediates_uniquely(c, s.vertex, s.to_c, s.to_a, pullback_cones(c, f, g));
}

bool is_terminal(const FinCategory& c, ObjId t) {
    for (ObjId x = 0; x < c.num_objects(); ++x)
        if (c.hom(x, t).size() != 1) return false;
    return true;
}

std::optional<ProductCone> search_product(const FinCategory& c, ObjId a, ObjId b) {
    auto cones = product_cones(c, a, b);
    for (ObjId p = 0; p < c.num_objects(); ++p) {
        if (!counts_match(c, p, cones)) continue;
        for (MorId p1 : c.hom(p, a))
            for (MorId p2 : c.hom(p, b))
                if (mediates_uniquely(c, p, p1, p2, cones)) return ProductCone{p, p1, p2};
    }
    return std::nullopt;
}

std::optional<PullbackSpan> search_pullback(const FinCategory& c, MorId f, MorId g) {
    if (c.target(f) != c.target(g)) return std::nullopt;
    auto cones = pullback_cones(c, f, g);
    for (ObjId p = 0; p < c.num_objects(); ++p) {
        if (!counts_match(c, p, cones)) continue;
        for (MorId l1 : c.hom(p, c.source(f)))
            for (MorId l2 : c.hom(p, c.source(g)))
                if (c.compose(f, l1) == c.compose(g, l2) && mediates_uniquely(c, p, l1, l2, cones))
                    return PullbackSpan{p, l1, l2};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// ChosenStructure

struct ChosenStructure::Cache {
    std::mutex mutex;
    bool terminal_known = false;
    std::optional<ObjId> terminal;
    std::map<std::pair<ObjId, ObjId>, std::optional<ProductCone>> products;
    std::map<std::pair<MorId, MorId>, std::optional<PullbackSpan>> pullbacks;
    std::optional<std::vector<bool>> projections;
};

ChosenStructure::ChosenStructure(std::shared_ptr<const FinCategory> category)
    : category_(std::move(category)), cache_(std::make_unique<Cache>()) {}

ChosenStructure::~ChosenStructure() = default;

void ChosenStructure::set_resolver(Resolver resolver) { resolver_ = std::move(resolver); }

void ChosenStructure::set_terminal(ObjId t) {
    if (!is_terminal(*category_, t))
        throw Error("InvalidStructure", "tabled terminal '" + category_->object_name(t) + "' is not terminal");
    tabled_terminal_ = t;
}

void ChosenStructure::set_product(ObjId a, ObjId b, const ProductCone& cone) {
    if (!is_product(*category_, a, b, cone))
        throw Error("InvalidStructure", "tabled product of '" + category_->object_name(a) + "' and '" +
                                            category_->object_name(b) + "' fails its universal property");
    tabled_products_[{a, b}] = cone;
}

void ChosenStructure::set_pullback(MorId f, MorId g, const PullbackSpan& span) {
    if (!is_pullback(*category_, f, g, span))
        throw Error("InvalidStructure", "tabled pullback of '" + category_->morphism_name(f) + "' and '" +
                                            category_->morphism_name(g) + "' fails its universal property");
    tabled_pullbacks_[{f, g}] = span;
}

std::optional<ObjId> ChosenStructure::terminal() const {
    if (tabled_terminal_) return tabled_terminal_;
    std::lock_guard lock(cache_->mutex);
    if (!cache_->terminal_known) {
        if (resolver_.terminal)
            if (auto t = resolver_.terminal(); t && is_terminal(*category_, *t)) {
                cache_->terminal = t;
                cache_->terminal_known = true;
                return t;
            }
        for (ObjId t = 0; t < category_->num_objects(); ++t)
            if (is_terminal(*category_, t)) {
                cache_->terminal = t;
                break;
            }
        cache_->terminal_known = true;
    }
    return cache_->terminal;
}

std::optional<MorId> ChosenStructure::terminal_arrow(ObjId a) const {
    auto t = terminal();
    if (!t) return std::nullopt;
    return category_->hom(a, *t).front();
}

std::optional<ProductCone> ChosenStructure::product(ObjId a, ObjId b) const {
    if (auto it = tabled_products_.find({a, b}); it != tabled_products_.end()) return it->second;
    std::lock_guard lock(cache_->mutex);
    auto [it, inserted] = cache_->products.try_emplace({a, b});
    if (inserted) {
        std::optional<ProductCone> cone;
        if (resolver_.product) cone = resolver_.product(a, b);
        if (cone && !is_product(*category_, a, b, *cone)) cone.reset();
        it->second = cone ? cone : search_product(*category_, a, b);
    }
    return it->second;
}

std::optional<PullbackSpan> ChosenStructure::pullback(MorId f, MorId g) const {
    if (auto it = tabled_pullbacks_.find({f, g}); it != tabled_pullbacks_.end()) return it->second;
    std::lock_guard lock(cache_->mutex);
    auto [it, inserted] = cache_->pullbacks.try_emplace({f, g});
    if (inserted) {
        std::optional<PullbackSpan> span;
        if (resolver_.pullback) span = resolver_.pullback(f, g);
        if (span && !is_pullback(*category_, f, g, *span)) span.reset();
        it->second = span ? span : search_pullback(*category_, f, g);
    }
    return it->second;
}

std::optional<MorId> ChosenStructure::pair(const ProductCone& cone, MorId f, MorId g) const {
    const auto& c = *category_;
    if (c.source(f) != c.source(g)) return std::nullopt;
    for (MorId m : c.hom(c.source(f), cone.vertex))
        if (c.compose(cone.pr1, m) == f && c.compose(cone.pr2, m) == g) return m;
    return std::nullopt;
}

std::optional<MorId> ChosenStructure::diagonal(ObjId a) const {
    auto p = product(a, a);
    if (!p) return std::nullopt;
    MorId id = category_->identity(a);
    return pair(*p, id, id);
}

std::optional<ChosenStructure::TripleProduct> ChosenStructure::triple(ObjId a, ObjId b, ObjId c) const {
    auto inner = product(a, b);
    if (!inner) return std::nullopt;
    auto outer = product(inner->vertex, c);
    if (!outer) return std::nullopt;
    const auto& cat = *category_;
    return TripleProduct{*inner, *outer, cat.compose(inner->pr1, outer->pr1), cat.compose(inner->pr2, outer->pr1),
                         outer->pr2};
}

const std::vector<bool>& ChosenStructure::projection_members() const {
    std::lock_guard lock(cache_->mutex);
    if (!cache_->projections) {
        const auto& c = *category_;
        std::vector<bool> members(c.num_morphisms(), false);
        for (MorId p = 0; p < c.num_morphisms(); ++p) {
            const ObjId x = c.source(p), a = c.target(p);
            for (ObjId b = 0; b < c.num_objects() && !members[p]; ++b) {
                auto cones = product_cones(c, a, b);
                if (!counts_match(c, x, cones)) continue;
                for (MorId q : c.hom(x, b))
                    if (mediates_uniquely(c, x, p, q, cones)) {
                        members[p] = true;
                        break;
                    }
            }
        }
        cache_->projections = std::move(members);
    }
    return *cache_->projections;
}

PullbackSpan require_pullback(const ChosenStructure& s, MorId f, MorId g) {
    if (auto p = s.pullback(f, g)) return *p;
    const auto& c = s.category();
    missing_structure("no pullback of " + c.morphism_name(f) + " and " + c.morphism_name(g));
}

ProductCone require_product(const ChosenStructure& s, ObjId a, ObjId b) {
    if (auto p = s.product(a, b)) return *p;
    const auto& c = s.category();
    missing_structure("no product of " + c.object_name(a) + " and " + c.object_name(b));
}

// ---------------------------------------------------------------------------
// Left classes

std::vector<MorId> LeftClass::list() const {
    std::vector<MorId> out;
    for (MorId f = 0; f < static_cast<MorId>(members.size()); ++f)
        if (members[f]) out.push_back(f);
    return out;
}

LeftClass all_morphisms(const FinCategory& c) { return {"all", std::vector<bool>(c.num_morphisms(), true)}; }

LeftClass identities_class(const FinCategory& c) {
    LeftClass l{"identities", std::vector<bool>(c.num_morphisms(), false)};
    for (ObjId a = 0; a < c.num_objects(); ++a) l.members[c.identity(a)] = true;
    return l;
}

LeftClass isos_class(const FinCategory& c) {
    LeftClass l{"isos", std::vector<bool>(c.num_morphisms(), false)};
    for (MorId f = 0; f < c.num_morphisms(); ++f) l.members[f] = is_iso(c, f);
    return l;
}

LeftClass monos_class(const FinCategory& c) {
    LeftClass l{"monos", std::vector<bool>(c.num_morphisms(), false)};
    for (MorId f = 0; f < c.num_morphisms(); ++f) l.members[f] = is_mono(c, f);
    return l;
}

LeftClass projections_class(const ChosenStructure& s) { return {"projections", s.projection_members()}; }

LeftClassReport verify_left_class(const ChosenStructure& s, const LeftClass& lambda) {
    const auto& c = s.category();
    LeftClassReport r;
    if (static_cast<int>(lambda.members.size()) != c.num_morphisms())
        throw Error("InvalidClass", "class '" + lambda.name + "' has the wrong number of membership flags");
    for (ObjId a = 0; a < c.num_objects(); ++a)
        if (!lambda.contains(c.identity(a))) {
            r.identities = false;
            r.counterexamples.push_back({"identity", c.morphism_name(c.identity(a))});
        }
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
        if (!lambda.contains(f)) continue;
        for (ObjId b = 0; b < c.num_objects(); ++b)
            for (MorId g : c.hom(c.target(f), b))
                if (lambda.contains(g) && !lambda.contains(c.compose(g, f))) {
                    r.composition = false;
                    r.counterexamples.push_back(
                        {"composition", "(" + c.morphism_name(g) + ", " + c.morphism_name(f) + ")"});
                }
    }
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
        if (!lambda.contains(f)) continue;
        for (ObjId x = 0; x < c.num_objects(); ++x)
            for (MorId g : c.hom(x, c.target(f))) {
                auto p = s.pullback(f, g);
                if (!p) {
                    r.pullback_stability = false;
                    r.counterexamples.push_back({"pullback-missing", "(" + c.morphism_name(f) + ", " +
                                                                         c.morphism_name(g) + ")"});
                } else if (!lambda.contains(p->to_a)) {
                    r.pullback_stability = false;
                    r.counterexamples.push_back({"pullback-stability", "(" + c.morphism_name(f) + ", " +
                                                                           c.morphism_name(g) + ")"});
                }
            }
    }
    return r;
}

void require_left_class(const ChosenStructure& s, const LeftClass& lambda) {
    auto r = verify_left_class(s, lambda);
    if (r.ok()) return;
    const bool missing = std::any_of(r.counterexamples.begin(), r.counterexamples.end(),
                                     [](const Violation& v) { return v.law == "pullback-missing"; });
    if (missing && r.identities && r.composition)
        throw Error("MissingStructure", "class '" + lambda.name + "' needs pullbacks absent from the base",
                    r.counterexamples);
    throw Error("NotALeftClass", "class '" + lambda.name + "'", r.counterexamples);
}

// ---------------------------------------------------------------------------
// Functors and equivalences

std::vector<Violation> check_functor(const FinCategory& c, const FinCategory& d, const FunctorData& F) {
    std::vector<Violation> v;
    if (static_cast<int>(F.object_map.size()) != c.num_objects() ||
        static_cast<int>(F.morphism_map.size()) != c.num_morphisms()) {
        v.push_back({"shape", "functor tables have the wrong size"});
        return v;
    }
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
        MorId g = F.morphism_map[f];
        if (g < 0 || g >= d.num_morphisms() || d.source(g) != F.object_map[c.source(f)] ||
            d.target(g) != F.object_map[c.target(f)])
            v.push_back({"typing", c.morphism_name(f)});
    }
    if (!v.empty()) return v;
    for (ObjId a = 0; a < c.num_objects(); ++a)
        if (F.morphism_map[c.identity(a)] != d.identity(F.object_map[a]))
            v.push_back({"identity", c.object_name(a)});
    for (MorId f = 0; f < c.num_morphisms(); ++f)
        for (ObjId b = 0; b < c.num_objects(); ++b)
            for (MorId g : c.hom(c.target(f), b))
                if (F.morphism_map[c.compose(g, f)] != d.compose(F.morphism_map[g], F.morphism_map[f]))
                    v.push_back({"composition", "(" + c.morphism_name(g) + ", " + c.morphism_name(f) + ")"});
    return v;
}

std::vector<Violation> verify_equivalence_witness(const FinCategory& c, const FinCategory& d,
                                                  const EquivalenceWitness& w) {
    auto v = check_functor(c, d, w.functor);
    if (!v.empty()) return v;
    const auto& F = w.functor;
    const int no = c.num_objects();
    if (static_cast<int>(w.fullness.size()) != no * no) {
        v.push_back({"fullness", "certificate has the wrong shape"});
        return v;
    }
    for (ObjId x = 0; x < no; ++x)
        for (ObjId y = 0; y < no; ++y) {
            const auto& target_hom = d.hom(F.object_map[x], F.object_map[y]);
            const auto& cert = w.fullness[x * no + y];
            if (cert.size() != target_hom.size()) {
                v.push_back({"fullness", "(" + c.object_name(x) + ", " + c.object_name(y) + ")"});
                continue;
            }
            for (std::size_t i = 0; i < cert.size(); ++i)
                if (c.source(cert[i]) != x || c.target(cert[i]) != y || F.morphism_map[cert[i]] != target_hom[i])
                    v.push_back({"fullness", c.morphism_name(cert[i])});
            std::set<MorId> images;
            for (MorId f : c.hom(x, y))
                if (!images.insert(F.morphism_map[f]).second)
                    v.push_back({"faithfulness", c.morphism_name(f)});
        }
    if (static_cast<int>(w.essential_surjectivity.size()) != d.num_objects()) {
        v.push_back({"essential-surjectivity", "certificate has the wrong shape"});
        return v;
    }
    for (ObjId e = 0; e < d.num_objects(); ++e) {
        auto [x, iso] = w.essential_surjectivity[e];
        if (x < 0 || x >= no || iso < 0 || d.source(iso) != F.object_map[x] || d.target(iso) != e ||
            !is_iso(d, iso))
            v.push_back({"essential-surjectivity", d.object_name(e)});
    }
    return v;
}

namespace {

struct SkeletonData {
    std::vector<ObjId> reps;
    std::vector<int> rep_index;    // object -> index into reps
    std::vector<MorId> to_rep;     // x -> rep(x), an isomorphism
    std::vector<MorId> from_rep;   // rep(x) -> x, its inverse
};

SkeletonData skeleton_data(const FinCategory& c) {
    SkeletonData s;
    s.rep_index.assign(c.num_objects(), -1);
    s.to_rep.assign(c.num_objects(), kNoMorphism);
    s.from_rep.assign(c.num_objects(), kNoMorphism);
    for (ObjId x = 0; x < c.num_objects(); ++x) {
        for (std::size_t i = 0; i < s.reps.size() && s.rep_index[x] < 0; ++i)
            for (MorId f : c.hom(x, s.reps[i]))
                if (auto g = inverse(c, f)) {
                    s.rep_index[x] = static_cast<int>(i);
                    s.to_rep[x] = f;
                    s.from_rep[x] = *g;
                    break;
                }
        if (s.rep_index[x] < 0) {
            s.rep_index[x] = static_cast<int>(s.reps.size());
            s.reps.push_back(x);
            s.to_rep[x] = s.from_rep[x] = c.identity(x);
        }
    }
    return s;
}

class SkeletonIsoSearch {
public:
    SkeletonIsoSearch(const FinCategory& c, const FinCategory& d, const std::vector<ObjId>& sc,
                      const std::vector<ObjId>& sd, std::size_t budget)
        : c_(c), d_(d), sc_(sc), sd_(sd), budget_(budget) {
        for (ObjId x : sc_)
            for (ObjId y : sc_)
                for (MorId f : c_.hom(x, y)) morphisms_.push_back(f);
        std::stable_sort(morphisms_.begin(), morphisms_.end(),
                         [&](MorId a, MorId b) { return c_.is_identity(a) && !c_.is_identity(b); });
        in_skeleton_.assign(c_.num_objects(), false);
        for (ObjId x : sc_) in_skeleton_[x] = true;
    }

    bool run() {
        obj_map_.assign(c_.num_objects(), -1);
        used_obj_.assign(d_.num_objects(), false);
        return assign_object(0);
    }

    bool exhausted() const { return exhausted_; }
    std::size_t nodes() const { return nodes_; }
    const std::vector<ObjId>& object_map() const { return obj_map_; }
    const std::vector<MorId>& morphism_map() const { return mor_map_; }

private:
    bool tick() {
        if (++nodes_ > budget_) {
            exhausted_ = true;
            return false;
        }
        return true;
    }

    bool assign_object(std::size_t i) {
        if (i == sc_.size()) return assign_morphisms();
        const ObjId x = sc_[i];
        for (ObjId y : sd_) {
            if (used_obj_[y]) continue;
            if (!tick()) return false;
            bool ok = true;
            obj_map_[x] = y;
            for (std::size_t j = 0; j <= i && ok; ++j) {
                const ObjId x2 = sc_[j], y2 = obj_map_[x2];
                ok = c_.hom(x, x2).size() == d_.hom(y, y2).size() && c_.hom(x2, x).size() == d_.hom(y2, y).size();
            }
            if (ok) {
                used_obj_[y] = true;
                if (assign_object(i + 1)) return true;
                used_obj_[y] = false;
                if (exhausted_) return false;
            }
            obj_map_[x] = -1;
        }
        return false;
    }

    bool assign_morphisms() {
        mor_map_.assign(c_.num_morphisms(), kNoMorphism);
        used_mor_.assign(d_.num_morphisms(), false);
        assigned_.clear();
        return assign_morphism(0);
    }

    bool consistent(MorId m) const {
        const MorId fm = mor_map_[m];
        for (MorId a : assigned_) {
            if (c_.target(a) == c_.source(m)) {
                MorId comp = c_.compose(m, a);
                if (mor_map_[comp] != kNoMorphism && mor_map_[comp] != d_.compose(fm, mor_map_[a])) return false;
            }
            if (c_.source(a) == c_.target(m)) {
                MorId comp = c_.compose(a, m);
                if (mor_map_[comp] != kNoMorphism && mor_map_[comp] != d_.compose(mor_map_[a], fm)) return false;
            }
            if (c_.source(a) == c_.source(m) && a != m)
                for (MorId b : assigned_)
                    if (c_.source(b) == c_.target(a) && c_.target(b) == c_.target(m) && c_.compose(b, a) == m &&
                        d_.compose(mor_map_[b], mor_map_[a]) != fm)
                        return false;
        }
        return true;
    }

    bool assign_morphism(std::size_t i) {
        if (i == morphisms_.size()) return true;
        const MorId m = morphisms_[i];
        const ObjId fx = obj_map_[c_.source(m)], fy = obj_map_[c_.target(m)];
        std::vector<MorId> candidates;
        if (c_.is_identity(m))
            candidates.push_back(d_.identity(fx));
        else
            for (MorId g : d_.hom(fx, fy))
                if (!used_mor_[g] && !d_.is_identity(g)) candidates.push_back(g);
        for (MorId g : candidates) {
            if (used_mor_[g]) continue;
            if (!tick()) return false;
            mor_map_[m] = g;
            if (consistent(m)) {
                used_mor_[g] = true;
                assigned_.push_back(m);
                if (assign_morphism(i + 1)) return true;
                assigned_.pop_back();
                used_mor_[g] = false;
                if (exhausted_) return false;
            }
            mor_map_[m] = kNoMorphism;
        }
        return false;
    }

    const FinCategory& c_;
    const FinCategory& d_;
    const std::vector<ObjId>& sc_;
    const std::vector<ObjId>& sd_;
    std::size_t budget_;
    std::size_t nodes_ = 0;
    bool exhausted_ = false;
    std::vector<MorId> morphisms_;
    std::vector<bool> in_skeleton_;
    std::vector<ObjId> obj_map_;
    std::vector<bool> used_obj_;
    std::vector<MorId> mor_map_;
    std::vector<bool> used_mor_;
    std::vector<MorId> assigned_;
};

}  // namespace

std::vector<ObjId> skeleton_objects(const FinCategory& c) { return skeleton_data(c).reps; }

EquivalenceResult search_equivalence(const FinCategory& c, const FinCategory& d, std::size_t budget) {
    EquivalenceResult result;
    const auto skc = skeleton_data(c);
    const auto skd = skeleton_data(d);
    if (skc.reps.size() != skd.reps.size()) {
        result.status = SearchStatus::ProvenAbsent;
        result.reason = "skeleton sizes differ (" + std::to_string(skc.reps.size()) + " vs " +
                        std::to_string(skd.reps.size()) + ")";
        return result;
    }
    SkeletonIsoSearch search(c, d, skc.reps, skd.reps, budget);
    const bool found = search.run();
    result.nodes = search.nodes();
    if (!found) {
        result.status = search.exhausted() ? SearchStatus::BudgetExhausted : SearchStatus::ProvenAbsent;
        result.reason = search.exhausted() ? "budget exhausted" : "no isomorphism between skeletons";
        return result;
    }
    EquivalenceWitness w;
    const auto& om = search.object_map();
    const auto& mm = search.morphism_map();
    w.functor.object_map.resize(c.num_objects());
    w.functor.morphism_map.resize(c.num_morphisms());
    for (ObjId x = 0; x < c.num_objects(); ++x) w.functor.object_map[x] = om[skc.reps[skc.rep_index[x]]];
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
        const MorId inner = c.compose(c.compose(skc.to_rep[c.target(f)], f), skc.from_rep[c.source(f)]);
        w.functor.morphism_map[f] = mm[inner];
    }
    const int no = c.num_objects();
    w.fullness.resize(static_cast<std::size_t>(no) * no);
    for (ObjId x = 0; x < no; ++x)
        for (ObjId y = 0; y < no; ++y)
            for (MorId h : d.hom(w.functor.object_map[x], w.functor.object_map[y])) {
                MorId pre = kNoMorphism;
                for (MorId f : c.hom(x, y))
                    if (w.functor.morphism_map[f] == h) pre = f;
                w.fullness[x * no + y].push_back(pre);
            }
    for (ObjId e = 0; e < d.num_objects(); ++e) {
        const ObjId rep_d = skd.reps[skd.rep_index[e]];
        ObjId source = -1;
        for (ObjId r : skc.reps)
            if (om[r] == rep_d) source = r;
        // F(source) = rep_d; compose with rep_d → e.
        w.essential_surjectivity.emplace_back(source, skd.from_rep[e]);
    }
    auto v = verify_equivalence_witness(c, d, w);
    if (!v.empty()) throw Error("Internal", "equivalence witness failed its own verification", v);
    result.status = SearchStatus::Found;
    result.witness = std::move(w);
    return result;
}

FinCategory full_subcategory(const FinCategory& c, const std::vector<ObjId>& objects) {
    std::vector<int> obj_index(c.num_objects(), -1);
    std::vector<std::string> names;
    for (ObjId x : objects) {
        obj_index[x] = static_cast<int>(names.size());
        names.push_back(c.object_name(x));
    }
    std::vector<int> mor_index(c.num_morphisms(), -1);
    std::vector<MorId> back;
    std::vector<FinCategory::MorphismSpec> specs;
    for (MorId f = 0; f < c.num_morphisms(); ++f)
        if (obj_index[c.source(f)] >= 0 && obj_index[c.target(f)] >= 0) {
            mor_index[f] = static_cast<int>(specs.size());
            back.push_back(f);
            specs.push_back({c.morphism_name(f), obj_index[c.source(f)], obj_index[c.target(f)]});
        }
    std::vector<MorId> ids;
    for (ObjId x : objects) ids.push_back(mor_index[c.identity(x)]);
    return FinCategory::generate(std::move(names), std::move(specs), std::move(ids),
                                 [&](MorId g, MorId f) { return mor_index[c.compose(back[g], back[f])]; });
}

FinCategory quotient_category(const FinCategory& c, const std::vector<int>& klass,
                              std::vector<MorId>* representative_of_class) {
    const int classes = klass.empty() ? 0 : *std::max_element(klass.begin(), klass.end()) + 1;
    std::vector<MorId> rep(classes, kNoMorphism);
    for (MorId f = 0; f < c.num_morphisms(); ++f)
        if (rep[klass[f]] == kNoMorphism) rep[klass[f]] = f;
    std::vector<Violation> v;
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
        MorId r = rep[klass[f]];
        if (c.source(r) != c.source(f) || c.target(r) != c.target(f))
            v.push_back({"NotACongruence", "class of " + c.morphism_name(f) + " mixes hom-sets"});
    }
    for (MorId f = 0; f < c.num_morphisms() && v.empty(); ++f)
        for (ObjId b = 0; b < c.num_objects(); ++b)
            for (MorId g : c.hom(c.target(f), b))
                if (klass[c.compose(g, f)] != klass[c.compose(rep[klass[g]], rep[klass[f]])])
                    v.push_back({"NotACongruence", "(" + c.morphism_name(g) + ", " + c.morphism_name(f) + ")"});
    if (!v.empty()) throw Error("NotACongruence", "identification does not respect composition", v);
    std::vector<std::string> objects;
    for (ObjId x = 0; x < c.num_objects(); ++x) objects.push_back(c.object_name(x));
    std::vector<FinCategory::MorphismSpec> specs;
    for (int k = 0; k < classes; ++k) specs.push_back({c.morphism_name(rep[k]), c.source(rep[k]), c.target(rep[k])});
    std::vector<MorId> ids;
    for (ObjId x = 0; x < c.num_objects(); ++x) ids.push_back(klass[c.identity(x)]);
    if (representative_of_class) *representative_of_class = rep;
    return FinCategory::generate(std::move(objects), std::move(specs), std::move(ids),
                                 [&](MorId g, MorId f) { return klass[c.compose(rep[g], rep[f])]; });
}

}  // namespace doctrina
