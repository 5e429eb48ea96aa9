#include "crw/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "crw/errors.hpp"
#include "crw/markov.hpp"
#include "crw/rng.hpp"

namespace crw {

namespace {

const std::vector<std::string> kExact{"t_hit", "t_meet", "t_meet_pi", "t_mix",
                                      "t_sep", "lambda2", "collision"};
const std::vector<std::string> kMonteCarlo{"t_coal", "voter", "t_meet_mc"};

// Quantities that make sense to fit against n.
const std::set<std::string> kFittable{"t_hit", "t_meet", "t_meet_pi", "t_mix", "t_sep",
                                      "t_coal", "voter", "t_meet_mc"};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    const auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        T out;
        if constexpr (std::is_floating_point_v<T>) {
            out = static_cast<T>(std::stod(value, &used));
        } else {
            if (!value.empty() && value[0] == '-') {
                throw std::invalid_argument("negative");
            }
            out = static_cast<T>(std::stoull(value, &used, 0));
        }
        if (used != value.size()) {
            throw std::invalid_argument("trailing text");
        }
        return out;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + value + "'");
    }
}

Sweep parse_sweep(const std::string& section, const boost::property_tree::ptree& tree) {
    Sweep sw;
    bool have_family = false;
    for (const auto& [key, node] : tree) {
        const std::string value = trim(node.data());
        const std::string where = section + "." + key;
        if (key == "family") {
            try {
                sw.base.family = family_from_string(value);
            } catch (const InvalidSpec& e) {
                throw ConfigError(where + ": " + e.what());
            }
            have_family = true;
        } else if (key == "sizes") {
            for (const auto& item : split_list(value)) {
                sw.sizes.push_back(parse_number<std::size_t>(where, item));
            }
        } else if (key == "dim") {
            sw.base.dim = parse_number<std::size_t>(where, value);
        } else if (key == "degree") {
            sw.base.degree = parse_number<std::size_t>(where, value);
        } else if (key == "alpha") {
            sw.base.alpha = parse_number<double>(where, value);
        } else if (key == "alpha_floor") {
            sw.base.alpha_floor = parse_number<double>(where, value);
        } else if (key == "model") {
            sw.model = scaling_model_from_string(value);
        } else {
            throw ConfigError("unknown key '" + where + "'");
        }
    }
    if (!have_family) {
        throw ConfigError("section [" + section + "] has no family");
    }
    return sw;
}

std::string file_stem(std::size_t sweep, const FamilySpec& spec) {
    std::string s = "s" + std::to_string(sweep) + "_";
    for (char c : spec.label()) {
        s += std::isalnum(static_cast<unsigned char>(c)) || c == '.' ? c : '_';
    }
    while (!s.empty() && s.back() == '_') {
        s.pop_back();
    }
    return s;
}

// Stable small code per quantity, used to derive per-quantity seeds.
std::uint64_t quantity_code(std::string_view q) {
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (char c : q) {
        h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
    }
    return h;
}

nlohmann::ordered_json estimate_json(const Estimate& e, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["mean"] = e.mean;
    j["stderr"] = e.stderr_;
    j["ci95"] = {e.ci95_lo, e.ci95_hi};
    j["trials"] = e.trials;
    j["censored"] = e.censored_count;
    j["censored_warning"] = e.censored_warning;
    j["seed"] = seed;
    return j;
}

struct Row {
    std::string quantity;
    double value;
    double stderr_ = 0.0;
    std::size_t trials = 0;
    std::size_t censored = 0;
    std::uint64_t seed = 0;
};

std::vector<Row> rows_of(const PointResult& p) {
    const auto& mq = p.measured;
    std::vector<Row> rows;
    auto add = [&](const char* q, const std::optional<double>& v) {
        if (v) {
            rows.push_back({q, *v});
        }
    };
    add("t_hit", mq.t_hit);
    add("t_meet", mq.t_meet);
    add("t_meet_pi", mq.t_meet_pi);
    if (mq.t_mix) {
        rows.push_back({"t_mix", double(mq.t_mix->upper)});
        if (!mq.t_mix->exact()) {
            rows.push_back({"t_mix_lower", double(mq.t_mix->lower)});
        }
    }
    add("t_sep", mq.t_sep);
    add("lambda2", mq.lambda2);
    if (mq.collision) {
        rows.push_back({"c_max", mq.collision->c_max});
        rows.push_back({"c_min", mq.collision->c_min});
        rows.push_back({"r_max", mq.collision->r_max});
    }
    for (const auto& q : kMonteCarlo) {
        if (auto it = p.estimates.find(q); it != p.estimates.end()) {
            const auto& [e, seed] = it->second;
            rows.push_back({q, e.mean, e.stderr_, e.trials, e.censored_count, seed});
        }
    }
    return rows;
}

SimParams sim_params(SimKind kind) {
    SimParams p;
    p.kind = kind;
    return p;
}

PointResult run_point(const ExperimentConfig& cfg, const std::vector<std::string>& quantities,
                      std::size_t sweep_index, const Sweep& sw, std::size_t size) {
    const std::uint64_t master = cfg.seed.value_or(0);
    const auto want = [&](std::string_view q) {
        return std::find(quantities.begin(), quantities.end(), q) != quantities.end();
    };

    PointResult p;
    p.spec = FamilySpec::sized(sw.base.family, size, sw.base);
    p.graph_seed = rng::keyed(master, quantity_code("graph"), sweep_index, size);
    const Graph g = generate(p.spec, p.graph_seed);
    p.n = g.n();
    p.m = g.m();
    MeasuredQuantities& mq = p.measured;
    mq = MeasuredQuantities::for_graph(g, is_vertex_transitive(p.spec.family));
    if (p.spec.family == Family::lower_bound) {
        p.expander = expander_spectrum(
            g, lower_bound_layout(p.spec.n, p.spec.alpha, p.spec.alpha_floor));
    }

    const MarkovOptions mopt;
    if (want("t_hit")) {
        mq.t_hit = t_hit(g, mopt);
    }
    if ((want("t_meet") || want("t_meet_pi")) && g.n() <= mopt.meeting_limit) {
        const MeetingResult mr = meeting_exact(g, mopt);
        mq.t_meet = mr.t_meet;
        mq.t_meet_pi = mr.t_meet_pi;
    }
    if (want("t_mix") || want("collision")) {
        mq.t_mix = mixing_time(g, kInvE, mopt);
    }
    if (want("t_sep")) {
        mq.t_sep = double(separation_time(g, kInvE, mopt));
    }
    if (want("lambda2")) {
        mq.lambda2 = spectral(g, mopt).lambda2;
    }
    if (want("collision")) {
        CollisionStats cs = collision_stats(g, std::max<std::size_t>(mq.t_mix->upper, 1));
        cs.t_mix_method = mq.t_mix->method;
        mq.collision = cs;
    }

    const Steps cap = cfg.cap == 0 ? default_cap(g.n()) : cfg.cap;
    auto run_mc = [&](const std::string& q, SimParams params) {
        const std::uint64_t seed = rng::keyed(master, quantity_code(q), sweep_index, size);
        p.estimates[q] = {estimate(g, params, cfg.trials, seed, cap), seed};
    };
    if (want("t_coal")) {
        run_mc("t_coal", sim_params(SimKind::coalescence));
        mq.t_coal_estimate = p.estimates["t_coal"].first;
    }
    if (want("voter")) {
        run_mc("voter", sim_params(SimKind::voter));
    }
    if (want("t_meet_mc")) {
        run_mc("t_meet_mc", sim_params(SimKind::meeting_stationary));
    }

    p.bounds = verify_relations(mq, VerifyOptions{.require_exact = false});
    return p;
}

} // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> expand_quantities(std::span<const std::string> names) {
    std::vector<std::string> out;
    auto push = [&](const std::string& q) {
        if (std::find(out.begin(), out.end(), q) == out.end()) {
            out.push_back(q);
        }
    };
    for (const auto& name : names) {
        if (name == "exact" || name == "all") {
            std::for_each(kExact.begin(), kExact.end(), push);
        }
        if (name == "all") {
            std::for_each(kMonteCarlo.begin(), kMonteCarlo.end(), push);
        }
        if (name == "exact" || name == "all") {
            continue;
        }
        if (std::find(kExact.begin(), kExact.end(), name) == kExact.end() &&
            std::find(kMonteCarlo.begin(), kMonteCarlo.end(), name) == kMonteCarlo.end()) {
            throw ConfigError("unknown quantity '" + name + "'");
        }
        push(name);
    }
    return out;
}

bool is_monte_carlo(std::string_view quantity) noexcept {
    return std::find(kMonteCarlo.begin(), kMonteCarlo.end(), quantity) != kMonteCarlo.end();
}

void ExperimentConfig::validate() const {
    const auto qs = expand_quantities(quantities);
    if (qs.empty()) {
        throw ConfigError("no quantities requested");
    }
    const bool mc = std::any_of(qs.begin(), qs.end(), [](const auto& q) { return is_monte_carlo(q); });
    if (mc && !seed) {
        throw ConfigError("Monte Carlo quantities need an explicit seed");
    }
    if (mc && trials < 2) {
        throw ConfigError("Monte Carlo quantities need trials >= 2");
    }
    if (sweeps.empty()) {
        throw ConfigError("no sweeps configured");
    }
    for (const auto& sw : sweeps) {
        if (sw.sizes.empty()) {
            throw ConfigError("sweep over " + std::string(to_string(sw.base.family)) +
                              " has no sizes");
        }
        for (std::size_t i = 1; i < sw.sizes.size(); ++i) {
            if (sw.sizes[i] <= sw.sizes[i - 1]) {
                throw ConfigError("sweep sizes must be strictly increasing");
            }
        }
    }
}

ExperimentConfig parse_config(std::string_view text) {
    boost::property_tree::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(e.what());
    }

    ExperimentConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ConfigError("key '" + section + "' outside any section");
        }
        if (section == "experiment") {
            for (const auto& [key, node] : body) {
                const std::string value = trim(node.data());
                const std::string where = "experiment." + key;
                if (key == "seed") {
                    cfg.seed = parse_number<std::uint64_t>(where, value);
                } else if (key == "trials") {
                    cfg.trials = parse_number<std::size_t>(where, value);
                } else if (key == "cap") {
                    cfg.cap = parse_number<Steps>(where, value);
                } else if (key == "quantities") {
                    cfg.quantities = split_list(value);
                } else if (key == "output") {
                    cfg.output = value;
                } else {
                    throw ConfigError("unknown key '" + where + "'");
                }
            }
        } else if (section.rfind("sweep", 0) == 0) {
            cfg.sweeps.push_back(parse_sweep(section, body));
        } else {
            throw ConfigError("unknown section [" + section + "]");
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string PointResult::to_json() const {
    nlohmann::ordered_json j;
    j["family"] = std::string(crw::to_string(spec.family));
    j["label"] = spec.label();
    j["n"] = n;
    j["m"] = m;
    j["graph_seed"] = graph_seed;
    nlohmann::ordered_json q;
    q["gamma"] = measured.gamma;
    q["vertex_transitive"] = measured.vertex_transitive;
    auto opt = [&](const char* key, const std::optional<double>& v) {
        if (v) {
            q[key] = *v;
        }
    };
    opt("pi_min", measured.pi_min);
    opt("pi_norm_sq", measured.pi_norm_sq);
    opt("t_hit", measured.t_hit);
    opt("t_meet", measured.t_meet);
    opt("t_meet_pi", measured.t_meet_pi);
    if (measured.t_mix) {
        q["t_mix"] = {{"lower", measured.t_mix->lower},
                      {"upper", measured.t_mix->upper},
                      {"method", std::string(crw::to_string(measured.t_mix->method))}};
    }
    opt("t_sep", measured.t_sep);
    opt("lambda2", measured.lambda2);
    if (measured.collision) {
        const auto& c = *measured.collision;
        q["collision"] = {{"c_max", c.c_max},
                          {"c_min", c.c_min},
                          {"r_max", c.r_max},
                          {"window", c.t_mix_used},
                          {"window_method", std::string(crw::to_string(c.t_mix_method))}};
    }
    j["measured"] = std::move(q);
    if (expander) {
        j["expander"] = {{"degree", expander->degree},
                         {"lambda", expander->lambda},
                         {"ramanujan_bound", expander->ramanujan_bound}};
    }
    nlohmann::ordered_json est = nlohmann::ordered_json::object();
    for (const auto& [name, e] : estimates) {
        est[name] = estimate_json(e.first, e.second);
    }
    j["estimates"] = std::move(est);
    j["bounds"] = nlohmann::ordered_json::parse(bounds.to_json());
    return j.dump(2) + "\n";
}

std::string csv_rows(const PointResult& p) {
    std::string out;
    const std::string family(to_string(p.spec.family));
    for (const auto& r : rows_of(p)) {
        out += family + ',' + std::to_string(p.n) + ',' + std::to_string(p.m) + ',' + r.quantity +
               ',' + fmt(r.value) + ',' + fmt(r.stderr_) + ',' + std::to_string(r.trials) + ',' +
               std::to_string(r.censored) + ',' + std::to_string(r.seed) + '\n';
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out.write(content.data(), std::streamsize(content.size()));
        if (!out) {
            throw Error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

RunResult run(const ExperimentConfig& config) {
    config.validate();
    const auto quantities = expand_quantities(config.quantities);
    if (config.write) {
        std::filesystem::create_directories(config.output);
    }

    RunResult res;
    res.csv = std::string(kCsvHeader) + '\n';
    for (std::size_t si = 0; si < config.sweeps.size(); ++si) {
        const Sweep& sw = config.sweeps[si];
        const std::size_t first = res.points.size();
        for (std::size_t size : sw.sizes) {
            PointResult p;
            try {
                p = run_point(config, quantities, si, sw, size);
            } catch (const Error& e) {
                throw Error(FamilySpec::sized(sw.base.family, size, sw.base).label() + ": " +
                            e.what());
            }
            if (config.write) {
                write_atomic(config.output / (file_stem(si, p.spec) + ".json"), p.to_json());
            }
            res.csv += csv_rows(p);
            res.explicit_failures += p.bounds.explicit_failures();
            res.points.push_back(std::move(p));
        }

        // Fits for every quantity present at every size of this sweep.
        std::map<std::string, std::vector<std::pair<double, double>>> series;
        for (std::size_t i = first; i < res.points.size(); ++i) {
            for (const auto& r : rows_of(res.points[i])) {
                if (kFittable.count(r.quantity) && r.value > 0.0) {
                    series[r.quantity].emplace_back(double(res.points[i].n), r.value);
                }
            }
        }
        for (const auto& q : quantities) {
            auto it = series.find(q);
            if (it == series.end() || it->second.size() != sw.sizes.size() ||
                it->second.size() < 4) {
                continue;
            }
            res.fits.push_back({std::string(to_string(sw.base.family)), q,
                                fit_scaling(it->second, sw.model)});
        }
    }

    if (!res.fits.empty()) {
        res.fits_csv = "family,quantity,model,exponent,stderr,r_squared,ratio_min,ratio_max,points\n";
        for (const auto& f : res.fits) {
            res.fits_csv += f.family + ',' + f.quantity + ',' + std::string(to_string(f.fit.model)) +
                            ',' + fmt(f.fit.exponent) + ',' + fmt(f.fit.stderr_) + ',' +
                            fmt(f.fit.r_squared) + ',' + fmt(f.fit.ratio_min) + ',' +
                            fmt(f.fit.ratio_max) + ',' + std::to_string(f.fit.points) + '\n';
        }
    }
    if (config.write) {
        write_atomic(config.output / "results.csv", res.csv);
        if (!res.fits_csv.empty()) {
            write_atomic(config.output / "fits.csv", res.fits_csv);
        }
    }
    return res;
}

} // namespace crw
