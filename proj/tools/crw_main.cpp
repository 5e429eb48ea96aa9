// crw: command-line front end for the coalescing-walk toolkit.
//
//   crw gen      --family cycle --size 16              edge list on stdout
//   crw exact    --family hypercube --size 4           exact quantities (JSON)
//   crw simulate --family star --size 64 --kind coalescence --trials 500 --seed 1
//   crw verify   --family torus --dim 2 --size 4       bound report (CSV)
//   crw scale    --config sweep.ini                    fits across a sweep
//   crw all      --config sweep.ini                    full pipeline
//
// Exit status: 0 all explicit checks passed, 2 an explicit check failed,
// 1 runtime or usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "crw/bounds.hpp"
#include "crw/errors.hpp"
#include "crw/experiment.hpp"
#include "crw/graph.hpp"
#include "crw/markov.hpp"
#include "crw/simulate.hpp"

namespace {

struct GraphArgs {
    std::string family = "cycle";
    std::size_t size = 0;
    std::size_t dim = 0;
    std::size_t degree = 0;
    double alpha = 1.0;
    double alpha_floor = 4.0;
    std::string edges;
    std::uint64_t graph_seed = 0;

    void attach(CLI::App* app) {
        app->add_option("--family", family, "Graph family");
        app->add_option("--size", size, "Family size knob (n, levels, dim or side)");
        app->add_option("--dim", dim, "Torus/grid dimension");
        app->add_option("--degree", degree, "random_regular degree");
        app->add_option("--alpha", alpha, "lower_bound alpha");
        app->add_option("--alpha-floor", alpha_floor, "lower_bound alpha floor");
        app->add_option("--edges", edges, "Read the graph from an edge-list file instead");
        app->add_option("--graph-seed", graph_seed, "Seed for random families");
    }

    crw::Graph build() const {
        if (!edges.empty()) {
            std::ifstream in(edges);
            if (!in) {
                throw crw::Error("cannot open " + edges);
            }
            std::stringstream buf;
            buf << in.rdbuf();
            return crw::load_edge_list(buf.str());
        }
        return crw::generate(spec(), graph_seed);
    }

    crw::FamilySpec spec() const {
        crw::FamilySpec base;
        base.dim = dim;
        base.degree = degree;
        base.alpha = alpha;
        base.alpha_floor = alpha_floor;
        return crw::FamilySpec::sized(crw::family_from_string(family), size, base);
    }

    bool vertex_transitive() const {
        return edges.empty() && crw::is_vertex_transitive(crw::family_from_string(family));
    }
};

crw::MeasuredQuantities exact_quantities(const crw::Graph& g, bool vt) {
    auto mq = crw::MeasuredQuantities::for_graph(g, vt);
    const crw::MarkovOptions opt;
    mq.t_hit = crw::t_hit(g, opt);
    if (g.n() <= opt.meeting_limit) {
        const auto mr = crw::meeting_exact(g, opt);
        mq.t_meet = mr.t_meet;
        mq.t_meet_pi = mr.t_meet_pi;
    }
    mq.t_mix = crw::mixing_time(g, crw::kInvE, opt);
    mq.t_sep = double(crw::separation_time(g, crw::kInvE, opt));
    mq.lambda2 = crw::spectral(g, opt).lambda2;
    auto cs = crw::collision_stats(g, std::max<std::size_t>(mq.t_mix->upper, 1));
    cs.t_mix_method = mq.t_mix->method;
    mq.collision = cs;
    return mq;
}

nlohmann::ordered_json quantities_json(const crw::MeasuredQuantities& mq) {
    nlohmann::ordered_json j;
    j["n"] = mq.n;
    j["gamma"] = mq.gamma;
    if (mq.pi_min) j["pi_min"] = *mq.pi_min;
    if (mq.t_hit) j["t_hit"] = *mq.t_hit;
    if (mq.t_meet) j["t_meet"] = *mq.t_meet;
    if (mq.t_meet_pi) j["t_meet_pi"] = *mq.t_meet_pi;
    if (mq.t_mix) {
        j["t_mix"] = {{"lower", mq.t_mix->lower},
                      {"upper", mq.t_mix->upper},
                      {"method", std::string(crw::to_string(mq.t_mix->method))}};
    }
    if (mq.t_sep) j["t_sep"] = *mq.t_sep;
    if (mq.lambda2) j["lambda2"] = *mq.lambda2;
    if (mq.collision) {
        j["c_max"] = mq.collision->c_max;
        j["c_min"] = mq.collision->c_min;
        j["r_max"] = mq.collision->r_max;
    }
    return j;
}

struct ConfigOverrides {
    std::string path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<crw::Steps> cap;
    std::optional<std::string> output;
    std::vector<std::string> quantities;

    void attach(CLI::App* app) {
        app->add_option("--config", path, "Experiment config (INI)")->required();
        app->add_option("--seed", seed, "Master seed (overrides the config)");
        app->add_option("--trials", trials, "Trials per Monte Carlo quantity");
        app->add_option("--cap", cap, "Step cap per trial (0 = 50 n^3)");
        app->add_option("--output", output, "Output directory");
        app->add_option("--quantities", quantities, "Quantities to compute")->delimiter(',');
    }

    crw::ExperimentConfig load() const {
        auto cfg = crw::load_config(path);
        if (seed) cfg.seed = seed;
        if (trials) cfg.trials = *trials;
        if (cap) cfg.cap = *cap;
        if (output) cfg.output = *output;
        if (!quantities.empty()) cfg.quantities = quantities;
        return cfg;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coalescing random walks: exact quantities, simulation and bound checks"};
    app.require_subcommand(1);

    // gen
    GraphArgs gen_args;
    bool gen_check = false;
    auto* gen = app.add_subcommand("gen", "Emit a generated graph as an edge list");
    gen_args.attach(gen);
    gen->add_flag("--check", gen_check, "Print structural diagnostics to stderr");

    // exact
    GraphArgs exact_args;
    auto* exact = app.add_subcommand("exact", "Exact Markov-chain quantities as JSON");
    exact_args.attach(exact);

    // simulate
    GraphArgs sim_args;
    std::string kind = "coalescence";
    std::size_t sim_trials = 200;
    std::uint64_t sim_seed = 0;
    crw::Steps sim_cap = 0;
    crw::Vertex sim_u = 0;
    crw::Vertex sim_v = 1;
    bool plain_voter = false;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate as JSON");
    sim_args.attach(simulate);
    simulate->add_option("--kind", kind, "meeting | meeting_stationary | coalescence | voter");
    simulate->add_option("--trials", sim_trials, "Number of trials");
    simulate->add_option("--seed", sim_seed, "Master seed")->required();
    simulate->add_option("--cap", sim_cap, "Step cap per trial (0 = 50 n^3)");
    simulate->add_option("--u", sim_u, "meeting: first start vertex");
    simulate->add_option("--v", sim_v, "meeting: second start vertex");
    simulate->add_flag("--non-lazy", plain_voter, "voter: copy a neighbour every round");

    // verify
    GraphArgs verify_args;
    std::optional<std::uint64_t> verify_seed;
    std::size_t verify_trials = 200;
    bool verify_json = false;
    auto* verify = app.add_subcommand("verify", "Check explicit bounds on one graph");
    verify_args.attach(verify);
    verify->add_option("--seed", verify_seed, "Also estimate t_coal with this seed");
    verify->add_option("--trials", verify_trials, "Trials for the t_coal estimate");
    verify->add_flag("--json", verify_json, "Emit JSON instead of CSV");

    // scale / all
    ConfigOverrides scale_cfg;
    auto* scale = app.add_subcommand("scale", "Run a sweep and print scaling fits");
    scale_cfg.attach(scale);
    ConfigOverrides all_cfg;
    auto* all = app.add_subcommand("all", "Run the full pipeline and write artifacts");
    all_cfg.attach(all);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*gen) {
            const auto g = gen_args.build();
            std::cout << crw::to_edge_list(g);
            if (gen_check) {
                const auto d = crw::validate(g);
                std::fprintf(stderr, "n=%zu m=%zu deg=[%u,%u] gamma=%g connected=%d bipartite=%d\n",
                             d.n, d.m, d.deg_min, d.deg_max, d.gamma, d.connected, d.bipartite);
                if (gen_args.edges.empty() && gen_args.spec().family == crw::Family::lower_bound) {
                    const auto spec = gen_args.spec();
                    const auto es = crw::expander_spectrum(
                        g, crw::lower_bound_layout(spec.n, spec.alpha, spec.alpha_floor));
                    std::fprintf(stderr, "expander: degree %zu, lambda %.4f, Ramanujan bound %.4f\n",
                                 es.degree, es.lambda, es.ramanujan_bound);
                }
            }
            return 0;
        }
        if (*exact) {
            const auto g = exact_args.build();
            std::cout << quantities_json(exact_quantities(g, exact_args.vertex_transitive())).dump(2)
                      << '\n';
            return 0;
        }
        if (*simulate) {
            const auto g = sim_args.build();
            crw::SimParams p;
            p.kind = crw::sim_kind_from_string(kind);
            p.u = sim_u;
            p.v = sim_v;
            p.lazy_voter = !plain_voter;
            const crw::Steps cap = sim_cap == 0 ? crw::default_cap(g.n()) : sim_cap;
            const auto e = crw::estimate(g, p, sim_trials, sim_seed, cap);
            nlohmann::ordered_json j;
            j["kind"] = kind;
            j["n"] = g.n();
            j["mean"] = e.mean;
            j["stderr"] = e.stderr_;
            j["ci95"] = {e.ci95_lo, e.ci95_hi};
            j["trials"] = e.trials;
            j["censored"] = e.censored_count;
            j["seed"] = sim_seed;
            std::cout << j.dump(2) << '\n';
            return 0;
        }
        if (*verify) {
            const auto g = verify_args.build();
            auto mq = exact_quantities(g, verify_args.vertex_transitive());
            if (verify_seed) {
                crw::SimParams p;
                mq.t_coal_estimate =
                    crw::estimate(g, p, verify_trials, *verify_seed, crw::default_cap(g.n()));
            }
            const auto report = crw::verify_relations(mq, {.require_exact = false});
            std::cout << (verify_json ? report.to_json() + "\n" : report.to_csv());
            return report.all_explicit_passed() ? 0 : 2;
        }
        if (*scale || *all) {
            auto cfg = (*scale ? scale_cfg : all_cfg).load();
            cfg.write = all->parsed();
            const auto res = crw::run(cfg);
            if (*scale) {
                std::cout << (res.fits_csv.empty() ? std::string("no fits (need >= 4 sizes)\n")
                                                   : res.fits_csv);
            } else {
                std::cerr << "wrote " << res.points.size() << " records to " << cfg.output.string()
                          << "\n";
                if (res.explicit_failures > 0) {
                    std::cerr << res.explicit_failures << " explicit check(s) failed\n";
                }
            }
            return res.exit_code();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
