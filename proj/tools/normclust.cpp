// normclust: generate, solve, verify and benchmark minimum-norm capacitated
// k-clustering instances.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "normclust/bicriteria.hpp"
#include "normclust/find_assignment.hpp"
#include "normclust/metric.hpp"
#include "normclust/mnckc.hpp"
#include "normclust/oracle.hpp"
#include "normclust/props.hpp"
#include "normclust/solution.hpp"
#include "normclust/topcn.hpp"

namespace nc = normclust;

namespace {

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text << "\n";
}

int thread_count() {
    const char* env = std::getenv("NORMCLUST_THREADS");
    if (!env) return 1;
    int n = std::atoi(env);
    return n >= 1 ? n : 1;
}

struct SolveOptions {
    std::string alg = "exact";
    nc::Rat eps = nc::Rat(1, 5);
    nc::Rat c = 1;
    double c_prime = 4.0;
    double c_double = 4.0;
    long color_budget = -1;
    long guess_budget = -1;
    int rounds_per_guess = 32;
    std::uint64_t seed = 1;
    std::string open_list;  // for assign
};

nc::Solution dispatch_solve(const nc::Instance& inst, const SolveOptions& opt) {
    nc::Rng rng(opt.seed);
    if (opt.alg == "exact") {
        nc::ExactResult res = nc::exact_solve(inst);
        nc::Solution sol;
        sol.feasible = res.feasible;
        if (!res.feasible) {
            sol.infeasible_reason = "no capacity-respecting solution";
        } else {
            sol.open = res.opt_open_set;
            sol.assign = res.opt_assignment;
            sol.value = res.opt_value;
        }
        sol.record.algorithm = "exact";
        sol.record.instance_hash = nc::instance_hash(inst);
        sol.record.guesses_examined = res.subsets_examined;
        return sol;
    }
    if (opt.alg == "mnckc") {
        nc::MnckcConfig cfg;
        cfg.eps = opt.eps;
        cfg.c_prime = opt.c_prime;
        cfg.c_double = opt.c_double;
        cfg.color_budget = opt.color_budget;
        if (opt.guess_budget > 0) cfg.guess_budget = opt.guess_budget;
        nc::Rng sub = rng.split("mnckc");
        return nc::run_mnckc(inst, cfg, sub);
    }
    if (opt.alg == "topcn") {
        nc::TopcnConfig cfg;
        cfg.c = opt.c;
        cfg.eps = opt.eps;
        cfg.c_prime = opt.c_prime;
        cfg.rounds_per_guess = opt.rounds_per_guess;
        if (opt.guess_budget > 0) cfg.guess_budget = opt.guess_budget;
        nc::Rng sub = rng.split("topcn");
        return nc::run_topcn(inst, cfg, sub);
    }
    if (opt.alg == "bicriteria") {
        nc::TopcnConfig cfg;
        cfg.c = opt.c;
        cfg.eps = opt.eps;
        cfg.c_prime = opt.c_prime;
        cfg.rounds_per_guess = opt.rounds_per_guess;
        if (opt.guess_budget > 0) cfg.guess_budget = opt.guess_budget;
        nc::Rng sub = rng.split("bicriteria");
        nc::BiCriteriaResult res = nc::run_bicriteria(inst, cfg, sub);
        if (!res.found) {
            nc::Solution sol;
            sol.infeasible_reason = res.failure;
            sol.record.algorithm = "bicriteria";
            return sol;
        }
        return res.solution;
    }
    if (opt.alg == "seed3") {
        nc::Rng sub = rng.split("seed3");
        nc::Solution sol = nc::simple_three_approx(inst, opt.eps, sub);
        sol.record.instance_hash = nc::instance_hash(inst);
        return sol;
    }
    if (opt.alg == "assign") {
        std::vector<int> open;
        std::stringstream ss(opt.open_list);
        std::string item;
        while (std::getline(ss, item, ',')) open.push_back(std::stoi(item));
        std::sort(open.begin(), open.end());
        open.erase(std::unique(open.begin(), open.end()), open.end());
        nc::AssignResult res = nc::find_assignment(inst, open, opt.eps);
        nc::Solution sol;
        sol.record.algorithm = "assign";
        sol.record.instance_hash = nc::instance_hash(inst);
        if (res.status != nc::AssignStatus::Ok) {
            sol.infeasible_reason = "no feasible assignment for the open set";
            return sol;
        }
        sol.feasible = true;
        sol.open = open;
        sol.assign = res.assign;
        sol.value = res.value;
        return sol;
    }
    throw CLI::ValidationError("unknown algorithm " + opt.alg);
}

struct BenchRow {
    std::uint64_t seed;
    bool feasible;
    bool truncated;
    std::string value;
    std::string oracle;
    double ratio;  // -1 when oracle missing
    long wall_ms;
    std::string result_json;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimum-norm capacitated k-clustering solvers"};
    app.require_subcommand(1);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate an instance");
    nc::GenParams gp;
    std::string gen_norm = "l1", gen_out = "-", gen_spread = "1/10", gen_linf;
    std::uint64_t gen_seed = 1;
    gen->add_option("--kind", gp.kind, "euclidean | random_metric | clustered");
    gen->add_option("--nf", gp.n_facilities, "facilities");
    gen->add_option("--nc", gp.n_clients, "clients");
    gen->add_option("--k", gp.k, "open facilities");
    gen->add_option("--dim", gp.dim, "euclidean dimension");
    gen->add_option("--centers", gp.centers, "clustered centers");
    gen->add_option("--spread", gen_spread, "clustered spread (rational in (0,1))");
    gen->add_option("--cap-min", gp.cap_min, "min capacity (0 = uncapacitated)");
    gen->add_option("--cap-max", gp.cap_max, "max capacity");
    gen->add_option("--norm", gen_norm, "linf|l1|lp:P|topl:L|ordered:w1,w2,...");
    gen->add_option("--linf-budget", gen_linf, "optional L-infinity budget");
    gen->add_option("--seed", gen_seed, "seed");
    gen->add_option("--out", gen_out, "output path (- = stdout)");

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "solve an instance");
    SolveOptions so;
    std::string solve_in = "-", solve_out = "-", solve_eps = "1/5", solve_c = "1";
    solve->add_option("--alg", so.alg, "exact|mnckc|topcn|bicriteria|seed3|assign");
    bool solve_json = false;
    solve->add_flag("--json", solve_json, "read stdin, write stdout");
    solve->add_option("--in", solve_in, "instance JSON path (- = stdin)");
    solve->add_option("--out", solve_out, "result path");
    solve->add_option("--eps", solve_eps, "epsilon (rational)");
    solve->add_option("--c", solve_c, "top-cn parameter c (rational)");
    solve->add_option("--cprime", so.c_prime, "star sampling constant");
    solve->add_option("--cdouble", so.c_double, "representative sampling constant");
    solve->add_option("--color-budget", so.color_budget, "random coloring budget");
    solve->add_option("--guess-budget", so.guess_budget, "guess budget");
    solve->add_option("--rounds-per-guess", so.rounds_per_guess, "roundings per pivot guess");
    solve->add_option("--seed", so.seed, "seed");
    solve->add_option("--open", so.open_list, "open facilities for --alg assign (comma list)");
    std::string solve_linf;
    solve->add_option("--linf-budget", solve_linf, "override the instance budget (bicriteria)");

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "re-check a result against its instance");
    std::string ver_inst, ver_result;
    verify->add_option("--instance", ver_inst, "instance JSON")->required();
    verify->add_option("--result", ver_result, "result JSON")->required();

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "seed sweep with oracle ratios");
    SolveOptions bo;
    nc::GenParams bgp;
    std::string bench_norm = "l1", bench_csv, bench_md, bench_eps = "1/5", bench_c = "1";
    int bench_seeds = 10;
    std::uint64_t bench_seed0 = 1;
    bool bench_oracle = true;
    bench->add_option("--alg", bo.alg, "algorithm");
    bench->add_option("--kind", bgp.kind, "generator kind");
    bench->add_option("--nf", bgp.n_facilities, "facilities");
    bench->add_option("--nc", bgp.n_clients, "clients");
    bench->add_option("--k", bgp.k, "open facilities");
    bench->add_option("--cap-min", bgp.cap_min, "min capacity");
    bench->add_option("--cap-max", bgp.cap_max, "max capacity");
    bench->add_option("--norm", bench_norm, "norm spec");
    bench->add_option("--seeds", bench_seeds, "number of seeds");
    bench->add_option("--seed0", bench_seed0, "first seed");
    bench->add_option("--eps", bench_eps, "epsilon");
    bench->add_option("--c", bench_c, "top-cn c");
    bench->add_option("--rounds-per-guess", bo.rounds_per_guess, "roundings per guess");
    bench->add_option("--guess-budget", bo.guess_budget, "guess budget");
    bench->add_flag("--no-oracle,!--oracle", bench_oracle, "skip oracle ratios");
    bench->add_option("--out-csv", bench_csv, "CSV output path");
    bench->add_option("--out-md", bench_md, "Markdown table output path");

    // ---- props ----
    auto* props = app.add_subcommand("props", "run the invariant suites");
    long props_trials = 1000;
    std::uint64_t props_seed = 1;
    props->add_option("--trials", props_trials, "trials per suite");
    props->add_option("--seed", props_seed, "seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            gp.spread = nc::rat_from_string(gen_spread);
            nc::NormSpec spec = nc::norm_spec_from_string(gen_norm);
            gp.norm_kind = spec.kind;
            gp.norm_p = spec.p;
            gp.norm_ell = spec.ell;
            gp.norm_weights = spec.weights;
            if (!gen_linf.empty()) gp.linf_budget = nc::rat_from_string(gen_linf);
            nc::Instance inst = nc::generate_instance(gp, gen_seed);
            write_output(gen_out, nc::instance_to_json(inst));
            return 0;
        }
        if (*solve) {
            if (solve_json) solve_in = solve_out = "-";
            so.eps = nc::rat_from_string(solve_eps);
            so.c = nc::rat_from_string(solve_c);
            nc::Instance inst = nc::instance_from_json(read_input(solve_in));
            if (!solve_linf.empty()) inst.linf_budget = nc::rat_from_string(solve_linf);
            nc::Solution sol = dispatch_solve(inst, so);
            sol.record.seed = so.seed;
            sol.record.config = so.alg + " eps=" + nc::rat_to_string(so.eps);
            write_output(solve_out, nc::solution_to_json(inst, sol));
            if (sol.feasible) {
                nc::VerifyReport rep = nc::verify_result(inst, sol);
                if (!rep.ok) {
                    for (const auto& issue : rep.issues) std::cerr << "invariant: " << issue << "\n";
                    return 3;
                }
            }
            return sol.feasible ? 0 : 2;
        }
        if (*verify) {
            nc::Instance inst = nc::instance_from_json(read_input(ver_inst));
            nc::Solution sol = nc::solution_from_json(read_input(ver_result));
            nc::VerifyReport rep = nc::verify_result(inst, sol);
            if (rep.ok) {
                std::cout << "ok\n";
                return 0;
            }
            for (const auto& issue : rep.issues) std::cout << "violation: " << issue << "\n";
            return 1;
        }
        if (*bench) {
            bo.eps = nc::rat_from_string(bench_eps);
            bo.c = nc::rat_from_string(bench_c);
            nc::NormSpec spec = nc::norm_spec_from_string(bench_norm);
            bgp.norm_kind = spec.kind;
            bgp.norm_p = spec.p;
            bgp.norm_ell = spec.ell;
            bgp.norm_weights = spec.weights;

            std::vector<BenchRow> rows(bench_seeds);
            std::atomic<int> next{0};
            auto worker = [&]() {
                for (;;) {
                    int idx = next.fetch_add(1);
                    if (idx >= bench_seeds) return;
                    std::uint64_t seed = bench_seed0 + idx;
                    nc::Instance inst = nc::generate_instance(bgp, seed);
                    SolveOptions local = bo;
                    local.seed = seed;
                    auto t0 = std::chrono::steady_clock::now();
                    nc::Solution sol = dispatch_solve(inst, local);
                    auto t1 = std::chrono::steady_clock::now();
                    sol.record.seed = seed;
                    sol.record.config = local.alg;
                    BenchRow row;
                    row.seed = seed;
                    row.feasible = sol.feasible;
                    row.truncated = sol.record.truncated;
                    row.value = sol.feasible ? nc::rat_to_string(sol.value) : "-";
                    row.ratio = -1;
                    row.wall_ms = static_cast<long>(
                        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
                    if (sol.feasible) {
                        nc::VerifyReport rep = nc::verify_result(inst, sol);
                        if (!rep.ok) {
                            std::cerr << "bench: verify failed for seed " << seed << "\n";
                            std::exit(4);
                        }
                    }
                    if (bench_oracle) {
                        nc::ExactResult oracle = nc::exact_solve(inst);
                        if (oracle.feasible) {
                            row.oracle = nc::rat_to_string(oracle.opt_value);
                            if (sol.feasible && sol.value < oracle.opt_value) {
                                std::cerr << "bench: value below the optimum for seed " << seed
                                          << "\n";
                                std::exit(5);
                            }
                            if (sol.feasible && oracle.opt_value > 0)
                                row.ratio = nc::rat_to_double(sol.value / oracle.opt_value);
                            else if (sol.feasible && sol.value == 0)
                                row.ratio = 1.0;
                        } else {
                            row.oracle = "infeasible";
                        }
                    }
                    row.result_json = nc::solution_to_json(inst, sol);
                    rows[idx] = std::move(row);
                }
            };
            int workers = std::min(thread_count(), bench_seeds);
            std::vector<std::thread> threads;
            for (int w = 1; w < workers; ++w) threads.emplace_back(worker);
            worker();
            for (auto& th : threads) th.join();

            std::ostringstream csv;
            csv << "seed,feasible,truncated,value,oracle,ratio,wall_ms\n";
            double worst = 0;
            int with_ratio = 0;
            for (const auto& row : rows) {
                csv << row.seed << "," << (row.feasible ? 1 : 0) << "," << (row.truncated ? 1 : 0)
                    << "," << row.value << "," << row.oracle << ",";
                if (row.ratio >= 0) {
                    csv << row.ratio;
                    worst = std::max(worst, row.ratio);
                    ++with_ratio;
                }
                csv << "," << row.wall_ms << "\n";
            }
            std::ostringstream md;
            md << "| seed | value | oracle | ratio | truncated |\n";
            md << "|---|---|---|---|---|\n";
            for (const auto& row : rows) {
                md << "| " << row.seed << " | " << row.value << " | " << row.oracle << " | ";
                if (row.ratio >= 0) md << row.ratio;
                md << " | " << (row.truncated ? "yes" : "") << " |\n";
            }
            md << "\nmax ratio over " << with_ratio << " rows: " << worst << "\n";
            if (!bench_csv.empty()) write_output(bench_csv, csv.str());
            if (!bench_md.empty()) write_output(bench_md, md.str());
            if (bench_csv.empty() && bench_md.empty()) std::cout << csv.str();
            return 0;
        }
        if (*props) {
            auto reports = nc::run_all_props(props_trials, props_seed);
            bool ok = true;
            for (const auto& rep : reports) {
                std::cout << (rep.ok() ? "[pass] " : "[FAIL] ") << rep.name << " (" << rep.trials
                          << " trials, " << rep.violations << " violations)\n";
                for (const auto& s : rep.samples) std::cout << "        " << s << "\n";
                ok = ok && rep.ok();
            }
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
