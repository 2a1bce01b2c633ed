#include "slac/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slac::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

int resolve_value(const Template& tpl, const json& j, const std::string& where) {
    int v = -1;
    if (j.is_number_integer()) v = j.get<int>();
    else if (j.is_string()) v = tpl.value_id(j.get<std::string>());
    else fail(where + ": domain value must be an integer or a value name");
    if (v < 0 || v >= tpl.domain_size)
        fail(where + ": '" + j.dump() + "' is not a domain value");
    return v;
}

DomainSet resolve_value_set(const Template& tpl, const json& j, const std::string& where) {
    if (!j.is_array()) fail(where + ": expected an array of domain values");
    DomainSet out;
    for (const json& e : j) out.add(resolve_value(tpl, e, where));
    return out;
}

json value_set_to_json(const Template& tpl, DomainSet s) {
    json out = json::array();
    s.for_each([&](int v) { out.push_back(tpl.value_name(v)); });
    return out;
}

}  // namespace

Template parse_template(const json& j) {
    if (!j.is_object()) fail("template: expected a JSON object");
    Template tpl;
    if (!j.contains("domain")) fail("template: missing 'domain'");
    const json& dom = j.at("domain");
    if (dom.is_number_integer()) {
        tpl.domain_size = dom.get<int>();
    } else if (dom.is_array()) {
        for (const json& name : dom) {
            if (!name.is_string()) fail("template: domain names must be strings");
            tpl.value_names.push_back(name.get<std::string>());
        }
        tpl.domain_size = static_cast<int>(tpl.value_names.size());
    } else {
        fail("template: 'domain' must be a size or an array of names");
    }
    if (tpl.domain_size <= 0) fail("template: domain must be non-empty");
    if (tpl.domain_size > 64) fail("template: domain size exceeds the 64-value limit");
    if (tpl.value_names.empty())
        for (int v = 0; v < tpl.domain_size; ++v) tpl.value_names.push_back(std::to_string(v));

    if (!j.contains("relations") || !j.at("relations").is_object())
        fail("template: missing 'relations' object");
    for (const auto& [name, rj] : j.at("relations").items()) {
        if (!rj.is_object() || !rj.contains("arity") || !rj.contains("tuples"))
            fail("template: relation '" + name + "' needs 'arity' and 'tuples'");
        Relation rel;
        rel.arity = rj.at("arity").get<int>();
        for (const json& t : rj.at("tuples")) {
            if (!t.is_array() || static_cast<int>(t.size()) != rel.arity)
                fail("template: relation '" + name + "' has a tuple of wrong length");
            std::vector<int> tuple;
            for (const json& e : t) tuple.push_back(resolve_value(tpl, e, "relation '" + name + "'"));
            rel.tuples.push_back(std::move(tuple));
        }
        tpl.relation_names.push_back(name);
        tpl.relations.push_back(std::move(rel));
    }
    tpl.finalize();
    return tpl;
}

Instance parse_instance(const json& j, const Template& tpl) {
    if (!j.is_object()) fail("instance: expected a JSON object");
    Instance inst;
    if (!j.contains("variables") || !j.at("variables").is_array())
        fail("instance: missing 'variables' array");
    for (const json& v : j.at("variables")) {
        if (!v.is_string()) fail("instance: variable names must be strings");
        inst.variable_names.push_back(v.get<std::string>());
    }
    std::unordered_map<std::string, int> vidx;
    for (size_t i = 0; i < inst.variable_names.size(); ++i) {
        if (!vidx.emplace(inst.variable_names[i], static_cast<int>(i)).second)
            fail("instance: duplicate variable '" + inst.variable_names[i] + "'");
    }

    if (j.contains("constraints")) {
        for (const json& cj : j.at("constraints")) {
            if (!cj.is_object() || !cj.contains("scope") || !cj.contains("relation"))
                fail("instance: every constraint needs 'scope' and 'relation'");
            Constraint con;
            std::string rname = cj.at("relation").get<std::string>();
            con.relation = tpl.relation_id(rname);
            if (con.relation < 0) fail("instance: unknown relation '" + rname + "'");
            for (const json& s : cj.at("scope")) {
                std::string vname = s.get<std::string>();
                auto it = vidx.find(vname);
                if (it == vidx.end()) fail("instance: scope references undeclared variable '" + vname + "'");
                con.scope.push_back(it->second);
            }
            inst.constraints.push_back(std::move(con));
        }
    }

    inst.potatoes.assign(inst.variable_names.size(), tpl.full_domain());
    if (j.contains("potatoes")) {
        if (!j.at("potatoes").is_object()) fail("instance: 'potatoes' must be an object");
        for (const auto& [vname, pj] : j.at("potatoes").items()) {
            auto it = vidx.find(vname);
            if (it == vidx.end()) fail("instance: potato for undeclared variable '" + vname + "'");
            inst.potatoes[it->second] = resolve_value_set(tpl, pj, "potato of '" + vname + "'");
        }
    }
    inst.finalize(tpl);
    return inst;
}

json emit_template(const Template& tpl) {
    json rels = json::object();
    for (size_t r = 0; r < tpl.relations.size(); ++r) {
        json tuples = json::array();
        for (const auto& t : tpl.relations[r].tuples) {
            json tj = json::array();
            for (int v : t) tj.push_back(tpl.value_name(v));
            tuples.push_back(tj);
        }
        rels[tpl.relation_names[r]] = {{"arity", tpl.relations[r].arity}, {"tuples", tuples}};
    }
    json names = json::array();
    for (const std::string& n : tpl.value_names) names.push_back(n);
    return {{"domain", names}, {"relations", rels}};
}

json emit_instance(const Template& tpl, const Instance& inst) {
    json vars = json::array();
    for (const std::string& v : inst.variable_names) vars.push_back(v);
    json cons = json::array();
    for (const Constraint& c : inst.constraints) {
        json scope = json::array();
        for (int v : c.scope) scope.push_back(inst.variable_names[v]);
        cons.push_back({{"scope", scope}, {"relation", tpl.relation_names[c.relation]}});
    }
    return {{"variables", vars},
            {"constraints", cons},
            {"potatoes", emit_potatoes(tpl, inst, inst.potatoes)}};
}

json emit_potatoes(const Template& tpl, const Instance& inst, const PotatoMap& pots) {
    json out = json::object();
    for (int x = 0; x < inst.n_vars(); ++x)
        out[inst.variable_names[x]] = value_set_to_json(tpl, pots[x]);
    return out;
}

namespace {

json emit_step(const Template& tpl, const Instance& inst, int constraint, json extra) {
    const Constraint& con = inst.constraints[constraint];
    json scope = json::array();
    for (int v : con.scope) scope.push_back(inst.variable_names[v]);
    extra["relation"] = tpl.relation_names[con.relation];
    extra["scope"] = scope;
    return extra;
}

// Certificates name constraints structurally; re-find them instead of
// trusting indices.
int find_constraint(const Instance& inst, const Template& tpl, const json& j,
                    const std::string& where) {
    std::string rname = j.at("relation").get<std::string>();
    int rel = tpl.relation_id(rname);
    if (rel < 0) fail(where + ": unknown relation '" + rname + "'");
    std::vector<int> scope;
    for (const json& s : j.at("scope")) {
        int v = -1;
        auto it = inst.variable_index.find(s.get<std::string>());
        if (it != inst.variable_index.end()) v = it->second;
        if (v < 0) fail(where + ": unknown variable in scope");
        scope.push_back(v);
    }
    for (size_t c = 0; c < inst.constraints.size(); ++c)
        if (inst.constraints[c].relation == rel && inst.constraints[c].scope == scope)
            return static_cast<int>(c);
    fail(where + ": the instance has no such constraint");
}

}  // namespace

json emit_witness(const Template& tpl, const Instance& inst, const Witness& w) {
    json out;
    out["kind"] = w.kind == Witness::Kind::path ? "path" : "tree";
    if (w.has_seed && w.seed_value >= 0) {
        out["seed"] = {{"variable", inst.variable_names[w.seed_var]},
                       {"value", tpl.value_name(w.seed_value)}};
    }
    out["context_potatoes"] = emit_potatoes(tpl, inst, w.context);
    out["truncated"] = w.truncated;

    if (w.kind == Witness::Kind::path) {
        switch (w.path_source) {
            case Witness::PathSource::seed: out["source"] = "seed"; break;
            case Witness::PathSource::potato: out["source"] = "potato"; break;
            case Witness::PathSource::projection: out["source"] = "projection"; break;
        }
        out["source_set"] = value_set_to_json(tpl, w.source_set);
        if (w.path_source == Witness::PathSource::projection)
            out["origin"] = emit_step(tpl, inst, w.origin_constraint, {{"position", w.origin_pos}});
        out["begin"] = inst.variable_names[w.path.begin_var];
        json steps = json::array();
        for (const Step& s : w.path.steps)
            steps.push_back(emit_step(tpl, inst, s.constraint,
                                      {{"from", s.begin_pos}, {"to", s.end_pos}}));
        out["steps"] = steps;
    } else {
        json nodes = json::array();
        for (size_t n = 0; n < w.tree.nodes.size(); ++n)
            nodes.push_back({{"id", n}, {"variable", inst.variable_names[w.tree.nodes[n].image]}});
        json cons = json::array();
        for (const auto& cn : w.tree.cons) {
            json children = json::array();
            for (const auto& [pos, node] : cn.children)
                children.push_back({{"position", pos}, {"node", node}});
            cons.push_back(emit_step(tpl, inst, cn.constraint,
                                     {{"parent_node", cn.parent_node},
                                      {"parent_position", cn.parent_pos},
                                      {"children", children}}));
        }
        out["nodes"] = nodes;
        out["constraints"] = cons;
        out["root"] = 0;
        json leaves = json::array();
        for (int l : w.tree.leaves) leaves.push_back(l);
        out["leaves"] = leaves;
    }
    return out;
}

Witness parse_witness(const json& j, const Template& tpl, const Instance& inst) {
    if (!j.is_object() || !j.contains("kind")) fail("witness: expected an object with 'kind'");
    Witness w;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "path") w.kind = Witness::Kind::path;
    else if (kind == "tree") w.kind = Witness::Kind::tree;
    else fail("witness: kind must be 'path' or 'tree'");

    if (j.contains("seed") && j.at("seed").is_object()) {
        w.has_seed = true;
        std::string vname = j.at("seed").at("variable").get<std::string>();
        w.seed_var = inst.var_id(vname);
        if (w.seed_var < 0) fail("witness: seed names an undeclared variable");
        w.seed_value = resolve_value(tpl, j.at("seed").at("value"), "witness seed");
    }

    w.context.assign(inst.n_vars(), tpl.full_domain());
    if (!j.contains("context_potatoes")) fail("witness: missing 'context_potatoes'");
    for (const auto& [vname, pj] : j.at("context_potatoes").items()) {
        int v = inst.var_id(vname);
        if (v < 0) fail("witness: context names an undeclared variable");
        w.context[v] = resolve_value_set(tpl, pj, "witness context of '" + vname + "'");
    }
    w.truncated = j.value("truncated", false);

    if (w.kind == Witness::Kind::path) {
        std::string source = j.value("source", "seed");
        if (source == "seed") w.path_source = Witness::PathSource::seed;
        else if (source == "potato") w.path_source = Witness::PathSource::potato;
        else if (source == "projection") w.path_source = Witness::PathSource::projection;
        else fail("witness: bad path source");
        if (j.contains("source_set"))
            w.source_set = resolve_value_set(tpl, j.at("source_set"), "witness source_set");
        else if (w.has_seed)
            w.source_set = DomainSet::single(w.seed_value);
        if (w.path_source == Witness::PathSource::projection) {
            w.origin_constraint = find_constraint(inst, tpl, j.at("origin"), "witness origin");
            w.origin_pos = j.at("origin").at("position").get<int>();
        }
        int begin = inst.var_id(j.at("begin").get<std::string>());
        if (begin < 0) fail("witness: bad begin variable");
        std::vector<Step> steps;
        for (const json& sj : j.at("steps")) {
            Step s;
            s.constraint = find_constraint(inst, tpl, sj, "witness step");
            s.begin_pos = sj.at("from").get<int>();
            s.end_pos = sj.at("to").get<int>();
            steps.push_back(s);
        }
        w.path = make_path(inst, begin, std::move(steps));  // validates the chain
    } else {
        for (const json& nj : j.at("nodes")) {
            int v = inst.var_id(nj.at("variable").get<std::string>());
            if (v < 0) fail("witness: tree node names an undeclared variable");
            w.tree.nodes.push_back({v});
        }
        for (const json& cj : j.at("constraints")) {
            TreePattern::ConsNode cn;
            cn.constraint = find_constraint(inst, tpl, cj, "witness tree constraint");
            cn.parent_node = cj.at("parent_node").get<int>();
            cn.parent_pos = cj.at("parent_position").get<int>();
            int arity = static_cast<int>(inst.constraints[cn.constraint].scope.size());
            if (cn.parent_node < 0 || cn.parent_node >= static_cast<int>(w.tree.nodes.size()) ||
                cn.parent_pos < 0 || cn.parent_pos >= arity)
                fail("witness: tree constraint out of range");
            for (const json& ch : cj.at("children")) {
                int pos = ch.at("position").get<int>();
                int node = ch.at("node").get<int>();
                if (pos < 0 || pos >= arity || node <= cn.parent_node ||
                    node >= static_cast<int>(w.tree.nodes.size()))
                    fail("witness: tree child out of range");
                if (inst.constraints[cn.constraint].scope[pos] != w.tree.nodes[node].image)
                    fail("witness: tree child image does not match the constraint scope");
                cn.children.push_back({pos, node});
            }
            if (inst.constraints[cn.constraint].scope[cn.parent_pos] !=
                w.tree.nodes[cn.parent_node].image)
                fail("witness: tree parent image does not match the constraint scope");
            w.tree.cons.push_back(std::move(cn));
        }
        for (const json& lj : j.value("leaves", json::array())) {
            int l = lj.get<int>();
            if (l < 0 || l >= static_cast<int>(w.tree.nodes.size()))
                fail("witness: leaf out of range");
            w.tree.leaves.push_back(l);
        }
        w.tree.truncated = w.truncated;
    }
    return w;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        fail("malformed JSON in '" + path + "': " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) fail("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open '" + path + "'");
    uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::ostringstream hex;
    hex << std::hex << h;
    return hex.str();
}

}  // namespace slac::io
