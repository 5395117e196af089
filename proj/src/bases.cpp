#include "doctrina/bases.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace doctrina {

FinCategory poset_category(const std::vector<std::string>& objects, const std::vector<std::pair<std::string, std::string>>& leq,
                           const std::vector<std::pair<std::string, std::string>>& arrow_names) {
    const int n = static_cast<int>(objects.size());
    std::map<std::string, int> idx;
    for (int i = 0; i < n; ++i) idx[objects[i]] = i;
    std::vector<char> rel(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) rel[i * n + i] = 1;
    for (const auto& [a, b] : leq) rel[idx.at(a) * n + idx.at(b)] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (rel[i * n + k] && rel[k * n + j]) rel[i * n + j] = 1;
    std::map<std::string, std::string> rename(arrow_names.begin(), arrow_names.end());
    std::vector<FinCategory::MorphismSpec> specs;
    std::vector<int> arrow(static_cast<std::size_t>(n) * n, -1);
    std::vector<MorId> ids(n);
    for (int i = 0; i < n; ++i) {
        ids[i] = static_cast<MorId>(specs.size());
        arrow[i * n + i] = ids[i];
        specs.push_back({"id_" + objects[i], i, i});
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && rel[i * n + j]) {
                std::string key = objects[i] + "<" + objects[j];
                auto it = rename.find(key);
                arrow[i * n + j] = static_cast<MorId>(specs.size());
                specs.push_back({it == rename.end() ? key : it->second, i, j});
            }
    std::vector<ObjId> src, tgt;
    for (const auto& s : specs) {
        src.push_back(s.source);
        tgt.push_back(s.target);
    }
    return FinCategory::generate(objects, std::move(specs), std::move(ids),
                                 [&](MorId g, MorId f) { return arrow[src[f] * n + tgt[g]]; });
}

FinCategory poset_category(const InfSemilattice& order) {
    std::vector<std::pair<std::string, std::string>> leq;
    for (auto [x, y] : order.covers()) leq.emplace_back(order.name(x), order.name(y));
    return poset_category(order.names(), leq);
}

FinCategory c2_category() { return poset_category({"a", "b"}, {{"a", "b"}}, {{"a<b", "u"}}); }

FinCategory terminal_category() { return poset_category({"1"}, {}); }

FinCategory discrete_category(int n) {
    std::vector<std::string> objs;
    for (int i = 0; i < n; ++i) objs.push_back("d" + std::to_string(i));
    return poset_category(objs, {});
}

FinCategory chain_category(int n) {
    std::vector<std::string> objs;
    std::vector<std::pair<std::string, std::string>> leq;
    for (int i = 0; i < n; ++i) objs.push_back("c" + std::to_string(i));
    for (int i = 0; i + 1 < n; ++i) leq.emplace_back(objs[i], objs[i + 1]);
    return poset_category(objs, leq);
}

namespace {

void all_functions(int from, int to, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == from) {
        out.push_back(cur);
        return;
    }
    for (int v = 0; v < to; ++v) {
        cur.push_back(v);
        all_functions(from, to, cur, out);
        cur.pop_back();
    }
}

bool stable_function(const std::vector<int>& f, int to, const std::set<int>& admissible) {
    for (unsigned mask = 0; mask < (1u << to); ++mask) {
        if (!admissible.count(__builtin_popcount(mask))) continue;
        int pre = 0;
        for (int v : f) pre += (mask >> v) & 1;
        if (!admissible.count(pre)) return false;
    }
    return true;
}

}  // namespace

FinSets finite_sets(const std::vector<int>& sizes, bool stable) {
    FinSets out;
    out.sizes = sizes;
    const std::set<int> admissible(sizes.begin(), sizes.end());
    const int n = static_cast<int>(sizes.size());
    std::vector<std::string> objects;
    for (int s : sizes) {
        std::string name = std::to_string(s);
        while (std::find(objects.begin(), objects.end(), name) != objects.end()) name += "'";
        objects.push_back(name);
    }
    std::vector<FinCategory::MorphismSpec> specs;
    std::map<std::pair<std::pair<int, int>, std::vector<int>>, MorId> lookup;
    std::vector<MorId> ids(n, kNoMorphism);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            std::vector<std::vector<int>> fs;
            std::vector<int> cur;
            all_functions(sizes[a], sizes[b], cur, fs);
            for (auto& f : fs) {
                if (stable && !stable_function(f, sizes[b], admissible)) continue;
                std::string name = "m" + objects[a] + "_" + objects[b] + "_";
                for (int v : f) name += std::to_string(v);
                const MorId id = static_cast<MorId>(specs.size());
                bool identity = a == b;
                for (int i = 0; i < static_cast<int>(f.size()) && identity; ++i) identity = f[i] == i;
                if (identity) ids[a] = id;
                lookup[{{a, b}, f}] = id;
                specs.push_back({name, a, b});
                out.functions.push_back(f);
            }
        }
    std::vector<ObjId> src, tgt;
    for (const auto& s : specs) {
        src.push_back(s.source);
        tgt.push_back(s.target);
    }
    out.category = FinCategory::generate(objects, std::move(specs), std::move(ids), [&](MorId g, MorId f) {
        std::vector<int> h;
        for (int v : out.functions[f]) h.push_back(out.functions[g][v]);
        auto it = lookup.find({{src[f], tgt[g]}, h});
        return it == lookup.end() ? kNoMorphism : it->second;
    });
    return out;
}

std::shared_ptr<const ChosenStructure> structure_of(FinCategory c) {
    return std::make_shared<const ChosenStructure>(std::make_shared<const FinCategory>(std::move(c)));
}

Doctrine power_doctrine(const FinSets& sets, std::shared_ptr<const ChosenStructure> structure,
                        const InfSemilattice& values) {
    const auto& c = structure->category();
    const int k = values.size();
    std::vector<LatticePtr> fibres;
    std::vector<std::vector<std::vector<int>>> tuples;  // per object: list of value tuples
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        const int n = sets.sizes[a];
        std::vector<std::vector<int>> ts;
        std::vector<int> cur;
        all_functions(n, k, cur, ts);
        std::vector<std::string> names;
        for (const auto& t : ts) {
            std::string s = "(";
            for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + values.name(t[i]);
            names.push_back(s + ")");
        }
        const int m = static_cast<int>(ts.size());
        std::vector<char> leq(static_cast<std::size_t>(m) * m, 0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                bool le = true;
                for (int x = 0; x < n && le; ++x) le = values.leq(ts[i][x], ts[j][x]);
                leq[static_cast<std::size_t>(i) * m + j] = le;
            }
        fibres.push_back(std::make_shared<const InfSemilattice>(InfSemilattice::from_relation(names, std::move(leq))));
        tuples.push_back(std::move(ts));
    }
    std::vector<std::vector<ElemId>> reindex(c.num_morphisms());
    for (MorId f = 0; f < c.num_morphisms(); ++f) {
        const auto& fn = sets.functions[f];
        const auto& src_tuples = tuples[c.target(f)];
        const auto& dst_tuples = tuples[c.source(f)];
        for (const auto& t : src_tuples) {
            std::vector<int> pulled;
            for (int v : fn) pulled.push_back(t[v]);
            reindex[f].push_back(static_cast<ElemId>(std::find(dst_tuples.begin(), dst_tuples.end(), pulled) -
                                                     dst_tuples.begin()));
        }
    }
    return validate_doctrine(std::move(structure), std::move(fibres), std::move(reindex));
}

Doctrine doctrine_from_tables(std::shared_ptr<const ChosenStructure> structure,
                              const std::vector<std::pair<std::string, InfSemilattice>>& fibres,
                              const std::vector<std::pair<std::string, std::vector<std::string>>>& tables) {
    const auto& c = structure->category();
    std::vector<LatticePtr> fs(c.num_objects());
    for (const auto& [obj, lat] : fibres) fs[c.object(obj)] = std::make_shared<const InfSemilattice>(lat);
    for (ObjId a = 0; a < c.num_objects(); ++a)
        if (!fs[a]) throw Error("UnresolvedRef", "no fibre for object '" + c.object_name(a) + "'");
    std::vector<std::vector<ElemId>> reindex(c.num_morphisms());
    for (ObjId a = 0; a < c.num_objects(); ++a) {
        auto& t = reindex[c.identity(a)];
        for (ElemId x = 0; x < fs[a]->size(); ++x) t.push_back(x);
    }
    for (const auto& [mor, images] : tables) {
        const MorId f = c.morphism(mor);
        const auto& dst = *fs[c.source(f)];
        auto& t = reindex[f];
        t.clear();
        for (const auto& name : images) t.push_back(dst.element(name));
    }
    for (MorId f = 0; f < c.num_morphisms(); ++f)
        if (static_cast<int>(reindex[f].size()) != fs[c.target(f)]->size())
            throw Error("UnresolvedRef", "no reindexing table for '" + c.morphism_name(f) + "'");
    return validate_doctrine(std::move(structure), std::move(fs), std::move(reindex));
}

Doctrine two_chain_over_b() {
    return doctrine_from_tables(structure_of(c2_category()), {{"a", chain({"top"})}, {"b", chain({"bot", "top"})}},
                                {{"u", {"top", "top"}}});
}

Doctrine two_chain_over_a() {
    return doctrine_from_tables(structure_of(c2_category()), {{"a", chain({"bot", "top"})}, {"b", chain({"top"})}},
                                {{"u", {"top"}}});
}

Doctrine terminal_doctrine(const InfSemilattice& values) {
    return doctrine_from_tables(structure_of(terminal_category()), {{"1", values}}, {});
}

}  // namespace doctrina
