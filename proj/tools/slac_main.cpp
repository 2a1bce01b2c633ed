#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slac/datalog.hpp"
#include "slac/json_io.hpp"
#include "slac/oracle.hpp"
#include "slac/patterns.hpp"
#include "slac/singleton.hpp"

using namespace slac;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string g_command_line;

constexpr int kExitOk = 0;
constexpr int kExitContradiction = 10;
constexpr int kExitInputError = 2;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

struct LoadedProblem {
    Template tpl;
    Instance inst;
    json file_info;
    double parse_ms = 0;
};

LoadedProblem load_problem(const std::string& template_path, const std::string& instance_path) {
    Timer t;
    LoadedProblem p;
    p.tpl = io::parse_template(io::load_json_file(template_path));
    p.inst = io::parse_instance(io::load_json_file(instance_path), p.tpl);
    auto diags = validate(p.tpl, p.inst);
    if (!diags.empty()) {
        std::string msg = "instance failed validation:";
        for (const auto& d : diags) msg += "\n  " + d;
        throw std::invalid_argument(msg);
    }
    p.file_info = {
        {"template", {{"path", template_path}, {"digest", io::file_digest(template_path)}}},
        {"instance", {{"path", instance_path}, {"digest", io::file_digest(instance_path)}}},
    };
    p.parse_ms = t.ms();
    return p;
}

json removals_json(const Template& tpl, const Instance& inst,
                   const std::vector<Removal>& removals) {
    json out = json::array();
    for (const Removal& r : removals)
        out.push_back({{"variable", inst.variable_names[r.variable]},
                       {"value", tpl.value_name(r.value)}});
    return out;
}

void emit_report(const std::string& path, json report) {
    if (!path.empty()) io::write_json_file(path, report);
}

void print_potatoes(const Template& tpl, const Instance& inst, const PotatoMap& pots) {
    std::cout << "potatoes:";
    for (int x = 0; x < inst.n_vars(); ++x) {
        std::cout << " " << inst.variable_names[x] << "=";
        std::string sep = "{";
        if (pots[x].empty()) std::cout << "{";
        pots[x].for_each([&](int a) {
            std::cout << sep << tpl.value_name(a);
            sep = ",";
        });
        std::cout << "}";
    }
    std::cout << "\n";
}

struct CheckArgs {
    std::string method;
    std::string template_path, instance_path, json_out;
    bool want_witness = false;
    std::string seed_var;
    std::string seed_val;
    int max_cycle_len = 6;
    int threads = 1;
    bool frozen = false;
};

int run_check(const CheckArgs& args) {
    LoadedProblem p = load_problem(args.template_path, args.instance_path);
    const Template& tpl = p.tpl;
    const Instance& inst = p.inst;

    int seed_var = -1, seed_val = -1;
    if (!args.seed_var.empty()) {
        seed_var = inst.var_id(args.seed_var);
        if (seed_var < 0) throw std::invalid_argument("unknown --seed-var '" + args.seed_var + "'");
        seed_val = tpl.value_id(args.seed_val);
        if (seed_val < 0 && !args.seed_val.empty()) {
            try {
                seed_val = std::stoi(args.seed_val);
            } catch (...) {
            }
        }
        if (seed_val < 0 || seed_val >= tpl.domain_size)
            throw std::invalid_argument("bad --seed-val '" + args.seed_val + "'");
    }

    json report;
    report["command"] = g_command_line;
    report["method"] = args.method;
    report.update(p.file_info);
    SweepMode mode = (args.frozen || args.threads > 1) ? SweepMode::frozen : SweepMode::sequential;
    report["mode"] = {{"sweep", mode == SweepMode::frozen ? "frozen" : "sequential"},
                      {"threads", args.threads}};

    Timer run_timer;
    bool contradiction = false;
    json result;

    if (args.method == "ac") {
        AcResult res = ac_fixpoint(tpl, inst);
        contradiction = res.contradiction;
        result["contradiction"] = contradiction;
        result["potatoes"] = io::emit_potatoes(tpl, inst, res.potatoes);
        std::vector<Removal> removals;
        for (int x = 0; x < inst.n_vars(); ++x)
            (inst.potatoes[x] - res.potatoes[x]).for_each([&](int a) {
                removals.push_back({x, a, std::nullopt});
            });
        result["removals"] = removals_json(tpl, inst, removals);
        if (contradiction && args.want_witness) {
            Witness w = extract_witness(tpl, inst, inst.potatoes, res.trace);
            result["witness"] = io::emit_witness(tpl, inst, w);
            result["witness_verified"] = revalidate_witness(tpl, inst, w);
        }
        print_potatoes(tpl, inst, res.potatoes);
    } else if (args.method == "lac") {
        PotatoMap pots = inst.potatoes;
        std::vector<Fact> seeds;
        if (seed_var >= 0) {
            // probe semantics: the seed restricts the instance, exactly as in
            // the slac inner loop
            pots[seed_var] = pots[seed_var] & DomainSet::single(seed_val);
            seeds.push_back({seed_var, pots[seed_var]});
        }
        LacResult res = lac_closure(tpl, inst, pots, seeds, {});
        contradiction = res.contradiction;
        result["contradiction"] = contradiction;
        PotatoMap strongest(inst.n_vars());
        for (int x = 0; x < inst.n_vars(); ++x) strongest[x] = res.facts.strongest(x, pots[x]);
        result["potatoes"] = io::emit_potatoes(tpl, inst, strongest);
        if (contradiction && args.want_witness) {
            Witness w = extract_witness(tpl, inst, pots, res.trace);
            result["witness"] = io::emit_witness(tpl, inst, w);
            result["witness_verified"] = revalidate_witness(tpl, inst, w);
        }
        print_potatoes(tpl, inst, strongest);
    } else if (args.method == "sac" || args.method == "slac") {
        SingletonOptions opts;
        opts.mode = mode;
        opts.threads = args.threads;
        opts.keep_witnesses = args.want_witness;
        SingletonReport rep = args.method == "sac" ? sac_fixpoint(tpl, inst, opts)
                                                   : slac_fixpoint(tpl, inst, opts);
        contradiction = rep.contradiction;
        result["contradiction"] = contradiction;
        result["sweeps"] = rep.sweeps;
        result["potatoes"] = io::emit_potatoes(tpl, inst, rep.final_potatoes);
        result["removals"] = removals_json(tpl, inst, rep.removals);
        if (contradiction && args.want_witness) {
            // surface the most recent substantive probe witness; fall back to
            // a trivial one (empty context potato) if that is all there is
            const Witness* pick = nullptr;
            for (auto it = rep.removals.rbegin(); it != rep.removals.rend(); ++it) {
                if (!it->witness) continue;
                if (!pick) pick = &*it->witness;
                if (it->witness->kind == Witness::Kind::path && it->witness->path.length() == 0)
                    continue;
                pick = &*it->witness;
                break;
            }
            if (pick) {
                result["witness"] = io::emit_witness(tpl, inst, *pick);
                result["witness_verified"] = revalidate_witness(tpl, inst, *pick);
            }
        }
        std::cout << "sweeps: " << rep.sweeps << ", removals: " << rep.removals.size() << "\n";
        print_potatoes(tpl, inst, rep.final_potatoes);
    } else if (args.method == "pq") {
        auto sub = one_consistent_subinstance(tpl, inst);
        if (!sub) {
            contradiction = true;
            result["contradiction"] = true;
            result["note"] = "arc consistency refutes the instance before any pq check";
            std::cout << "arc consistency refutes the instance\n";
        } else {
            long checked = 0;
            bool passes = true;
            json failure;
            for (int x = 0; x < sub->n_vars() && passes; ++x) {
                auto cycles = enumerate_cycles(*sub, x, args.max_cycle_len);
                for (size_t i = 0; i < cycles.size() && passes; ++i) {
                    for (size_t k = 0; k < cycles.size() && passes; ++k) {
                        DomainSet values = seed_var >= 0
                                               ? (x == seed_var ? DomainSet::single(seed_val)
                                                                : DomainSet{})
                                               : sub->potatoes[x];
                        bool stop = false;
                        values.for_each([&](int a) {
                            if (stop) return;
                            ++checked;
                            PqResult pr = pq_check(tpl, *sub, sub->potatoes, x, a, cycles[i],
                                                   cycles[k]);
                            if (!pr.passes) {
                                passes = false;
                                stop = true;
                                failure = {{"variable", sub->variable_names[x]},
                                           {"value", tpl.value_name(a)},
                                           {"p_steps", cycles[i].length()},
                                           {"q_steps", cycles[k].length()},
                                           {"stabilized", pr.stabilized.to_string()}};
                            }
                        });
                    }
                }
            }
            contradiction = !passes;
            result["contradiction"] = contradiction;
            result["checked"] = checked;
            result["max_cycle_len"] = args.max_cycle_len;
            if (!passes) result["failure"] = failure;
            std::cout << "pq condition " << (passes ? "holds" : "fails") << " over " << checked
                      << " (variable, value, cycle pair) checks\n";
        }
    } else {
        throw std::invalid_argument("unknown method '" + args.method + "'");
    }

    report["result"] = std::move(result);
    report["timing_ms"] = {{"parse", p.parse_ms}, {"run", run_timer.ms()}};
    emit_report(args.json_out, report);
    std::cout << (contradiction ? "contradiction" : "no contradiction") << "\n";
    return contradiction ? kExitContradiction : kExitOk;
}

int run_solve(const std::string& template_path, const std::string& instance_path,
              const std::string& json_out) {
    LoadedProblem p = load_problem(template_path, instance_path);
    Timer run_timer;
    SolveResult sr = solve_with_slac(p.tpl, p.inst);
    bool found = sr.solution.has_value();
    Assignment solution = found ? *sr.solution : Assignment{};
    long decisions = sr.decisions;

    json report;
    report["command"] = g_command_line;
    report.update(p.file_info);
    json result;
    result["satisfiable"] = found;
    result["decisions"] = decisions;
    if (found) {
        json asg = json::object();
        for (int x = 0; x < p.inst.n_vars(); ++x)
            asg[p.inst.variable_names[x]] = p.tpl.value_name(solution[x]);
        result["solution"] = asg;
        std::cout << "solution:";
        for (int x = 0; x < p.inst.n_vars(); ++x)
            std::cout << " " << p.inst.variable_names[x] << "=" << p.tpl.value_name(solution[x]);
        std::cout << "\n";
    } else {
        std::cout << "UNSAT\n";
    }
    report["result"] = std::move(result);
    report["timing_ms"] = {{"parse", p.parse_ms}, {"run", run_timer.ms()}};
    emit_report(json_out, report);
    return found ? kExitOk : kExitContradiction;
}

int run_gen_datalog(const std::string& template_path, const std::string& method,
                    const std::string& out_path) {
    Template tpl = io::parse_template(io::load_json_file(template_path));
    datalog::Program prog =
        method == "lac" ? datalog::generate_lac_program(tpl) : datalog::generate_ac_program(tpl);
    std::string text = datalog::emit_program(tpl, prog);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::invalid_argument("cannot open '" + out_path + "' for writing");
        out << text;
    }
    return kExitOk;
}

int run_witness_verify(const std::string& witness_path, const std::string& template_path,
                       const std::string& instance_path) {
    LoadedProblem p = load_problem(template_path, instance_path);
    Witness w = io::parse_witness(io::load_json_file(witness_path), p.tpl, p.inst);
    bool ok = revalidate_witness(p.tpl, p.inst, w);
    if (ok) {
        std::cout << "witness verified: propagation from the recorded source is empty\n";
        return kExitOk;
    }
    std::cout << "witness did NOT verify\n";
    return kExitContradiction;
}

struct BenchRow {
    std::string method;
    std::string instance;
    int vars;
    int constraints;
    int sweeps;
    size_t removals;
    double wall_ms;
};

Instance bench_random_instance(const Template& tpl, std::mt19937& rng, int n_vars, int n_cons) {
    Instance inst;
    for (int i = 0; i < n_vars; ++i) inst.variable_names.push_back("v" + std::to_string(i));
    std::uniform_int_distribution<int> rel(0, static_cast<int>(tpl.relations.size()) - 1);
    std::uniform_int_distribution<int> var(0, n_vars - 1);
    for (int c = 0; c < n_cons; ++c) {
        Constraint con;
        con.relation = rel(rng);
        for (int pp = 0; pp < tpl.relations[con.relation].arity; ++pp)
            con.scope.push_back(var(rng));
        inst.constraints.push_back(std::move(con));
    }
    inst.finalize(tpl);
    return inst;
}

int run_bench(const std::string& suite_dir, int repeat, uint32_t rng_seed,
              const std::string& csv_path, int threads) {
    struct Item {
        std::string name;
        Template tpl;
        Instance inst;
    };
    std::vector<Item> items;

    // file pairs: NAME.instance.json next to NAME.template.json
    std::vector<fs::path> entries;
    for (const auto& e : fs::directory_iterator(suite_dir)) entries.push_back(e.path());
    std::sort(entries.begin(), entries.end());
    for (const auto& path : entries) {
        std::string name = path.filename().string();
        const std::string suffix = ".instance.json";
        if (name.size() <= suffix.size() || name.substr(name.size() - suffix.size()) != suffix)
            continue;
        std::string stem = name.substr(0, name.size() - suffix.size());
        fs::path tpath = path.parent_path() / (stem + ".template.json");
        if (!fs::exists(tpath))
            throw std::invalid_argument("no template file for suite instance '" + name + "'");
        Item item;
        item.name = stem;
        item.tpl = io::parse_template(io::load_json_file(tpath.string()));
        item.inst = io::parse_instance(io::load_json_file(path.string()), item.tpl);
        items.push_back(std::move(item));
    }

    // generated families: generate.json = [{name, template, count, variables, constraints}]
    fs::path genfile = fs::path(suite_dir) / "generate.json";
    if (fs::exists(genfile)) {
        std::mt19937 rng(rng_seed);
        for (const json& g : io::load_json_file(genfile.string())) {
            std::string tpath = g.at("template").get<std::string>();
            fs::path resolved = fs::path(tpath).is_absolute() ? fs::path(tpath)
                                                              : fs::path(suite_dir) / tpath;
            Template tpl = io::parse_template(io::load_json_file(resolved.string()));
            int count = g.value("count", 1);
            for (int i = 0; i < count; ++i) {
                Item item;
                item.name = g.at("name").get<std::string>() + "-" + std::to_string(i);
                item.inst = bench_random_instance(tpl, rng, g.at("variables").get<int>(),
                                                  g.at("constraints").get<int>());
                item.tpl = tpl;
                items.push_back(std::move(item));
            }
        }
    }
    if (items.empty()) throw std::invalid_argument("bench suite is empty");

    std::vector<BenchRow> rows;
    for (const Item& item : items) {
        for (std::string method : {"ac", "lac", "sac", "slac"}) {
            BenchRow row{method, item.name, item.inst.n_vars(),
                         static_cast<int>(item.inst.constraints.size()), 0, 0, 0.0};
            double best = -1;
            for (int r = 0; r < repeat; ++r) {
                Timer t;
                if (method == "ac") {
                    EngineOptions eo;
                    eo.keep_trace = false;
                    AcResult res = ac_fixpoint(item.tpl, item.inst, item.inst.potatoes, eo);
                    row.removals = 0;
                    for (int x = 0; x < item.inst.n_vars(); ++x)
                        row.removals += (item.inst.potatoes[x] - res.potatoes[x]).count();
                } else if (method == "lac") {
                    EngineOptions eo;
                    eo.keep_trace = false;
                    lac_closure(item.tpl, item.inst, item.inst.potatoes, {}, eo);
                } else {
                    SingletonOptions opts;
                    opts.keep_witnesses = false;
                    opts.threads = threads;
                    opts.mode = threads > 1 ? SweepMode::frozen : SweepMode::sequential;
                    SingletonReport rep = method == "sac" ? sac_fixpoint(item.tpl, item.inst, opts)
                                                          : slac_fixpoint(item.tpl, item.inst, opts);
                    row.sweeps = rep.sweeps;
                    row.removals = rep.removals.size();
                }
                double ms = t.ms();
                if (best < 0 || ms < best) best = ms;
            }
            row.wall_ms = best;
            rows.push_back(row);
        }
    }

    std::printf("%-6s %-24s %6s %6s %7s %9s %10s\n", "method", "instance", "vars", "cons",
                "sweeps", "removals", "wall_ms");
    for (const BenchRow& r : rows)
        std::printf("%-6s %-24s %6d %6d %7d %9zu %10.3f\n", r.method.c_str(), r.instance.c_str(),
                    r.vars, r.constraints, r.sweeps, r.removals, r.wall_ms);

    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw std::invalid_argument("cannot open '" + csv_path + "' for writing");
        csv << "method,instance,vars,constraints,sweeps,removals,wall_ms\n";
        for (const BenchRow& r : rows)
            csv << r.method << "," << r.instance << "," << r.vars << "," << r.constraints << ","
                << r.sweeps << "," << r.removals << "," << r.wall_ms << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 0; i < argc; ++i) {
        if (i) g_command_line += " ";
        g_command_line += argv[i];
    }
    CLI::App app{"finite-domain constraint consistency toolkit"};
    app.require_subcommand(1);

    CheckArgs check_args;
    CLI::App* check = app.add_subcommand("check", "run a consistency engine on an instance");
    check->add_option("--method", check_args.method, "ac | lac | sac | slac | pq")->required();
    check->add_option("--template", check_args.template_path, "template JSON file")->required();
    check->add_option("--instance", check_args.instance_path, "instance JSON file")->required();
    check->add_flag("--witness", check_args.want_witness, "emit a contradiction certificate");
    check->add_option("--json", check_args.json_out, "write the run report to this file");
    check->add_option("--seed-var", check_args.seed_var, "probe variable (lac and pq)");
    check->add_option("--seed-val", check_args.seed_val, "probe value (lac and pq)");
    check->add_option("--max-cycle-len", check_args.max_cycle_len,
                      "cycle length bound for pq checks (default 6)");
    check->add_option("--threads", check_args.threads, "probe threads; >1 implies frozen sweeps");
    check->add_flag("--frozen", check_args.frozen, "apply removals at sweep end");

    std::string solve_template, solve_instance, solve_json;
    CLI::App* solve = app.add_subcommand("solve", "decide the instance by slac plus backtracking");
    solve->add_option("--template", solve_template)->required();
    solve->add_option("--instance", solve_instance)->required();
    solve->add_option("--json", solve_json);

    std::string gen_template, gen_method = "ac", gen_out;
    CLI::App* gen = app.add_subcommand("gen-datalog", "emit the consistency program for a template");
    gen->add_option("--template", gen_template)->required();
    gen->add_option("--method", gen_method, "ac | lac");
    gen->add_option("--out", gen_out, "output file (default stdout)");

    std::string wv_witness, wv_template, wv_instance;
    CLI::App* wv = app.add_subcommand("witness-verify", "re-check a contradiction certificate");
    wv->add_option("--witness", wv_witness)->required();
    wv->add_option("--template", wv_template)->required();
    wv->add_option("--instance", wv_instance)->required();

    std::string bench_suite, bench_csv;
    int bench_repeat = 3;
    uint32_t bench_seed = 1;
    int bench_threads = 1;
    CLI::App* bench = app.add_subcommand("bench", "time every engine over a suite directory");
    bench->add_option("--suite", bench_suite, "directory of *.instance.json/*.template.json pairs")
        ->required();
    bench->add_option("--repeat", bench_repeat, "repetitions per engine (best time wins)");
    bench->add_option("--rng-seed", bench_seed, "seed for generated suite instances");
    bench->add_option("--csv", bench_csv, "also write rows as CSV");
    bench->add_option("--threads", bench_threads, "probe threads for sac/slac");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitInputError;
    }

    try {
        if (check->parsed()) return run_check(check_args);
        if (solve->parsed()) return run_solve(solve_template, solve_instance, solve_json);
        if (gen->parsed()) {
            if (gen_method != "ac" && gen_method != "lac")
                throw std::invalid_argument("gen-datalog: method must be ac or lac");
            return run_gen_datalog(gen_template, gen_method, gen_out);
        }
        if (wv->parsed()) return run_witness_verify(wv_witness, wv_template, wv_instance);
        if (bench->parsed())
            return run_bench(bench_suite, bench_repeat, bench_seed, bench_csv, bench_threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
