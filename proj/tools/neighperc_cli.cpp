// Command-line surface of the percolation laboratory. Every run emits a JSON
// envelope {manifest, inputs, result}; manifest fields are sufficient to
// replay the run (wall clock aside, outputs are byte-identical across
// replays). Exit codes: 0 success, 2 argument errors, 3 guard violations.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "neighperc/enhance.hpp"
#include "neighperc/estimate.hpp"
#include "neighperc/oracle.hpp"
#include "neighperc/render.hpp"

using json = nlohmann::ordered_json;
using namespace neighperc;

namespace {

std::string iso_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("NEIGHPERC_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

json estimate_json(const Estimate& e) {
    return json{{"mean", e.mean},
                {"stderr", e.stderr_},
                {"ci95", {e.ci_lo, e.ci_hi}},
                {"trials", e.trials}};
}

json edge_json(const DirectedDualEdge& e) {
    return json{{"tail", {e.tail.a, e.tail.b}}, {"dir", std::string(1, kDirChar[static_cast<int>(e.dir)])}};
}

json record_json(const ExplorationRecord& rec) {
    json steps = json::array();
    int n = 0;
    for (const auto& s : rec.steps)
        steps.push_back(json{{"step", ++n}, {"edge", edge_json(s.edge)}, {"open", s.open}});
    json pivotal = json::array();
    for (const auto& ev : rec.pivotal_events)
        pivotal.push_back(json{{"step", ev.step},
                               {"edge", edge_json(ev.edge)},
                               {"open", ev.open},
                               {"auto_open", ev.auto_open},
                               {"pending", ev.pending}});
    json clusters = json::array();
    for (const auto& cl : rec.clusters) {
        json cj = json::array();
        for (const auto& v : cl) cj.push_back({v.a, v.b});
        clusters.push_back(cj);
    }
    json visited = json::array();
    for (const auto& v : rec.visited) visited.push_back({v.a, v.b});
    return json{{"start", {rec.start.a, rec.start.b}},
                {"termination",
                 rec.termination == Termination::Stopped ? "stopped" : "window_escaped"},
                {"steps", steps},
                {"visited", visited},
                {"pivotal_events", pivotal},
                {"pivotal_times", rec.pivotal_times},
                {"clusters", clusters}};
}

struct ModelArgs {
    std::string model = "2dp";
    int d = 2;
    std::string p, eps, rho;

    void attach(CLI::App* cmd) {
        cmd->add_option("--model", model,
                        "model family: 2dp | iid | aon | ns-ew | corner | iso2")
            ->default_val("2dp");
        cmd->add_option("--d", d, "dimension (2dp/iid/aon only)")->default_val(2);
        cmd->add_option("--p", p, "edge parameter as a rational, e.g. 9/20 or 0.45");
        cmd->add_option("--eps", eps, "planar 2dp shortcut: p = 1/2 + eps/4");
        cmd->add_option("--rho", rho, "iso2 corner-pair mass in [0,1/4]");
    }

    ModelSpec build() const {
        if (model == "2dp") {
            if (!eps.empty()) return ModelSpec::two_eps(parse_rat(eps));
            if (!p.empty()) return ModelSpec::k_neighbor(d, parse_rat(p));
            return ModelSpec::two_eps(Rat(0));
        }
        if (model == "iid") return ModelSpec::iid(p.empty() ? Rat(1, 2) : parse_rat(p), d);
        if (model == "aon")
            return ModelSpec::all_or_none(p.empty() ? Rat(1, 2) : parse_rat(p), d);
        if (model == "ns-ew") return ModelSpec::ns_ew(p.empty() ? Rat(1, 2) : parse_rat(p));
        if (model == "corner") return ModelSpec::corner(p.empty() ? Rat(1, 2) : parse_rat(p));
        if (model == "iso2")
            return ModelSpec::iso_degree_two(rho.empty() ? Rat(1, 6) : parse_rat(rho));
        throw std::invalid_argument("unknown model: " + model);
    }

    json inputs() const {
        json j{{"model", model}, {"d", d}};
        if (!p.empty()) j["p"] = p;
        if (!eps.empty()) j["eps"] = eps;
        if (!rho.empty()) j["rho"] = rho;
        return j;
    }
};

struct Output {
    std::string path;
    std::string format = "json";

    void attach(CLI::App* cmd) {
        cmd->add_option("--out", path, "write the result to a file instead of stdout");
        cmd->add_option("--format", format, "json (default) or csv")->default_val("json");
    }

    void emit(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open output file: " + path);
            out << text;
        }
    }
};

// Flattens the envelope into comment header lines plus key,value rows; array
// results become one row per entry.
std::string to_csv(const json& envelope) {
    std::ostringstream os;
    os << "# command=" << envelope["manifest"]["command"].get<std::string>() << "\n";
    os << "# seed=" << envelope["manifest"]["seed"] << "\n";
    const json& result = envelope["result"];
    std::function<void(const std::string&, const json&)> walk = [&](const std::string& prefix,
                                                                    const json& node) {
        if (node.is_object()) {
            for (auto it = node.begin(); it != node.end(); ++it)
                walk(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value());
        } else if (node.is_array()) {
            int i = 0;
            for (const auto& item : node) walk(prefix + "[" + std::to_string(i++) + "]", item);
        } else {
            os << prefix << "," << node.dump() << "\n";
        }
    };
    walk("", result);
    return os.str();
}

int emit_envelope(const Output& output, const std::string& command, const json& params,
                  std::uint64_t seed, const json& inputs, const json& result) {
    json envelope{{"manifest",
                   {{"command", command},
                    {"parameters", params},
                    {"seed", seed},
                    {"version", NEIGHPERC_VERSION},
                    {"git_describe", NEIGHPERC_GIT_DESCRIBE},
                    {"wall_clock_utc", iso_now()}}},
                  {"inputs", inputs},
                  {"result", result}};
    if (output.format == "csv")
        output.emit(to_csv(envelope));
    else
        output.emit(envelope.dump(2) + "\n");
    return 0;
}

std::vector<Rat> parse_rat_list(const std::string& text) {
    std::vector<Rat> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_rat(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"neighperc: directed lattice percolation laboratory"};
    app.require_subcommand(1);

    std::uint64_t seed = default_seed();
    app.add_option("--seed", seed, "master seed (default: NEIGHPERC_SEED or 0)");
    int threads = 0;
    app.add_option("--threads", threads, "worker thread cap (results are unaffected)");

    ModelArgs model;
    Output output;

    // --- sample ---------------------------------------------------------
    auto* sample = app.add_subcommand("sample", "sample a configuration and print its grid");
    int radius = 8;
    model.attach(sample);
    output.attach(sample);
    sample->add_option("--radius", radius, "window radius")->default_val(8);

    // --- explore --------------------------------------------------------
    auto* explore = app.add_subcommand("explore", "run the dual exploration of a forward set");
    std::string start = "0,0";
    std::string svg_path;
    model.attach(explore);
    output.attach(explore);
    explore->add_option("--radius", radius, "window radius")->default_val(16);
    explore->add_option("--start", start, "dual start vertex a,b")->default_val("0,0");
    explore->add_option("--svg", svg_path, "also render the trace to this SVG file");

    // --- survival -------------------------------------------------------
    auto* surv = app.add_subcommand("survival", "escape probability of the origin's forward set");
    int n = 64;
    long long trials = 10000;
    model.attach(surv);
    output.attach(surv);
    surv->add_option("--n", n, "window radius")->default_val(64);
    surv->add_option("--trials", trials, "Monte Carlo trials")->default_val(10000);

    // --- tail -----------------------------------------------------------
    auto* tail = app.add_subcommand("tail", "dual forward-set size tail curve");
    int n_max = 100;
    model.attach(tail);
    output.attach(tail);
    tail->add_option("--n-max", n_max, "largest size bin")->default_val(100);
    tail->add_option("--trials", trials, "Monte Carlo trials")->default_val(100000);

    // --- pc ---------------------------------------------------------------
    auto* pc = app.add_subcommand("pc", "bisection bracket for the critical parameter");
    std::string tol = "1/100", lo = "1/4", hi = "3/4";
    model.attach(pc);
    output.attach(pc);
    pc->add_option("--n", n, "window radius")->default_val(128);
    pc->add_option("--trials", trials, "trials per probe")->default_val(4000);
    pc->add_option("--tol", tol, "bracket width target (rational)")->default_val("1/100");
    pc->add_option("--lo", lo, "initial lower endpoint")->default_val("1/4");
    pc->add_option("--hi", hi, "initial upper endpoint")->default_val("3/4");

    // --- crossing ---------------------------------------------------------
    auto* cross = app.add_subcommand("crossing", "left-right crossing of [0,3L]x[0,L]");
    int L = 32;
    model.attach(cross);
    output.attach(cross);
    cross->add_option("--L", L, "rectangle scale")->default_val(32);
    cross->add_option("--trials", trials, "Monte Carlo trials")->default_val(10000);

    // --- annulus ----------------------------------------------------------
    auto* ann = app.add_subcommand("annulus", "winding cycle around the origin in an annulus");
    bool with_glue = false;
    model.attach(ann);
    output.attach(ann);
    ann->add_option("--L", L, "annulus scale")->default_val(32);
    ann->add_option("--trials", trials, "Monte Carlo trials")->default_val(10000);
    ann->add_flag("--with-glue", with_glue, "also estimate the glued-crossings lower bound");

    // --- compare ----------------------------------------------------------
    auto* cmp = app.add_subcommand("compare", "survival of the five degree-two-level models");
    output.attach(cmp);
    cmp->add_option("--n", n, "window radius")->default_val(128);
    cmp->add_option("--trials", trials, "trials per model")->default_val(20000);

    // --- rho-sweep --------------------------------------------------------
    auto* sweep = app.add_subcommand("rho-sweep", "isotropic degree-two family sweep");
    std::string rhos = "0,1/6,1/4";
    output.attach(sweep);
    sweep->add_option("--rhos", rhos, "comma-separated rho values")->default_val("0,1/6,1/4");
    sweep->add_option("--n", n, "window radius")->default_val(64);
    sweep->add_option("--trials", trials, "trials per rho")->default_val(10000);

    // --- russo ------------------------------------------------------------
    auto* russo = app.add_subcommand("russo", "pivotal-count derivative estimators");
    std::string rp = "1/2", rq = "3/10", fd_h = "1/50";
    long long fd_trials = 0;
    output.attach(russo);
    russo->add_option("--p", rp, "plain-edge level")->default_val("1/2");
    russo->add_option("--q", rq, "diagonal-edge level")->default_val("3/10");
    russo->add_option("--n", n, "box radius (guarded to 16)")->default_val(6);
    russo->add_option("--trials", trials, "samples for the pivotal sweeps")->default_val(20000);
    russo->add_option("--fd-h", fd_h, "finite-difference step")->default_val("1/50");
    russo->add_option("--fd-trials", fd_trials,
                      "samples for the finite differences (default 4x trials)");

    // --- oracle -----------------------------------------------------------
    auto* orc = app.add_subcommand("oracle", "exact rational quantities");
    std::string scenario;
    int saw_n = -1, escape_radius = -1;
    model.attach(orc);
    output.attach(orc);
    orc->add_option("--scenario", scenario,
                    "conditional scenario: unconditioned | w-closed | w-open | s-closed | "
                    "s-open | ws-open");
    orc->add_option("--saw", saw_n, "self-avoiding walk count of this length");
    orc->add_option("--escape-radius", escape_radius,
                    "exact escape probability by exhaustive enumeration");

    // --- render -----------------------------------------------------------
    auto* render = app.add_subcommand("render", "deterministic SVG of a configuration or trace");
    std::string what = "explore";
    std::string render_out = "render.svg";
    model.attach(render);
    render->add_option("--radius", radius, "window radius (guarded to 128)")->default_val(16);
    render->add_option("--what", what, "config | explore")->default_val("explore");
    render->add_option("--out", render_out, "output SVG path")->default_val("render.svg");

    CLI11_PARSE(app, argc, argv);

    try {
        if (threads > 0) set_worker_threads(threads);

        if (sample->parsed()) {
            ModelSpec spec = model.build();
            Configuration cfg = sample_configuration(spec, {0, 0, radius}, seed);
            json params = model.inputs();
            params["radius"] = radius;
            std::vector<std::string> lines;
            std::istringstream grid(cfg.debug_text());
            for (std::string line; std::getline(grid, line);) lines.push_back(line);
            return emit_envelope(output, "sample", params, seed, params,
                                 json{{"spec", spec.name()}, {"grid", lines}});
        }
        if (explore->parsed()) {
            ModelSpec spec = model.build();
            Configuration cfg = sample_configuration(spec, {0, 0, radius}, seed);
            auto comma = start.find(',');
            DualVertex x{std::stoi(start.substr(0, comma)), std::stoi(start.substr(comma + 1))};
            ExplorationRecord rec = explore_dual_forward(cfg, x, cfg.window);
            if (!svg_path.empty()) {
                std::ofstream svg(svg_path, std::ios::binary);
                svg << render_exploration_svg(cfg, rec);
            }
            json params = model.inputs();
            params["radius"] = radius;
            params["start"] = start;
            return emit_envelope(output, "explore", params, seed, params, record_json(rec));
        }
        if (surv->parsed()) {
            ModelSpec spec = model.build();
            json params = model.inputs();
            params["n"] = n;
            params["trials"] = trials;
            Estimate est = survival(spec, n, trials, seed);
            return emit_envelope(output, "survival", params, seed, params,
                                 json{{"spec", spec.name()}, {"survival", estimate_json(est)}});
        }
        if (tail->parsed()) {
            ModelSpec spec = model.build();
            json params = model.inputs();
            params["n_max"] = n_max;
            params["trials"] = trials;
            auto curve = dual_tail(spec, n_max, trials, seed);
            return emit_envelope(output, "tail", params, seed, params,
                                 json{{"spec", spec.name()}, {"tail", curve}});
        }
        if (pc->parsed()) {
            json params = model.inputs();
            params["n"] = n;
            params["trials"] = trials;
            params["tol"] = tol;
            ModelArgs family_args = model;
            auto family = [&](Rat p) {
                if (family_args.model == "2dp") return ModelSpec::k_neighbor(family_args.d, p);
                if (family_args.model == "iid") return ModelSpec::iid(p, family_args.d);
                if (family_args.model == "aon")
                    return ModelSpec::all_or_none(p, family_args.d);
                if (family_args.model == "ns-ew") return ModelSpec::ns_ew(p);
                if (family_args.model == "corner") return ModelSpec::corner(p);
                throw std::invalid_argument("pc: unsupported family " + family_args.model);
            };
            PcResult res =
                estimate_pc(family, parse_rat(lo), parse_rat(hi), n, trials, parse_rat(tol), seed);
            return emit_envelope(output, "pc", params, seed, params,
                                 json{{"bracket", {res.lo.str(), res.hi.str()}},
                                      {"bracket_float", {res.lo.to_double(), res.hi.to_double()}},
                                      {"n", res.n},
                                      {"criterion", res.criterion},
                                      {"trials_per_probe", res.trials_per_probe}});
        }
        if (cross->parsed()) {
            ModelSpec spec = model.build();
            json params = model.inputs();
            params["L"] = L;
            params["trials"] = trials;
            Estimate est = crossing(spec, L, trials, seed);
            return emit_envelope(output, "crossing", params, seed, params,
                                 json{{"spec", spec.name()}, {"crossing", estimate_json(est)}});
        }
        if (ann->parsed()) {
            ModelSpec spec = model.build();
            json params = model.inputs();
            params["L"] = L;
            params["trials"] = trials;
            json result{{"spec", spec.name()},
                        {"cycle", estimate_json(annulus_cycle(spec, L, trials, seed))}};
            if (with_glue)
                result["glue"] = estimate_json(annulus_cycle_glue(spec, L, trials, seed));
            return emit_envelope(output, "annulus", params, seed, params, result);
        }
        if (cmp->parsed()) {
            json params{{"n", n}, {"trials", trials}};
            json rows = json::array();
            for (const auto& row : theta_comparison(n, trials, seed))
                rows.push_back(json{{"model", row.model}, {"survival", estimate_json(row.estimate)}});
            return emit_envelope(output, "compare", params, seed, params, json{{"rows", rows}});
        }
        if (sweep->parsed()) {
            json params{{"rhos", rhos}, {"n", n}, {"trials", trials}};
            json rows = json::array();
            for (const auto& [rho, est] : theta_vs_rho(parse_rat_list(rhos), n, trials, seed))
                rows.push_back(json{{"rho", rho.str()}, {"survival", estimate_json(est)}});
            return emit_envelope(output, "rho-sweep", params, seed, params, json{{"rows", rows}});
        }
        if (russo->parsed()) {
            json params{{"p", rp}, {"q", rq}, {"n", n}, {"trials", trials}, {"fd_h", fd_h}};
            Rat p = parse_rat(rp), q = parse_rat(rq), h = parse_rat(fd_h);
            auto [dp, dq] = russo_estimates(p, q, n, trials, seed);
            long long ft = fd_trials > 0 ? fd_trials : 4 * trials;
            Estimate fdp = theta_finite_difference(p, q, n, h, false, ft, derive(seed, 101));
            Estimate fdq = theta_finite_difference(p, q, n, h, true, ft, derive(seed, 102));
            return emit_envelope(output, "russo", params, seed, params,
                                 json{{"dp", estimate_json(dp)},
                                      {"dq", estimate_json(dq)},
                                      {"fd_p", estimate_json(fdp)},
                                      {"fd_q", estimate_json(fdq)}});
        }
        if (orc->parsed()) {
            json params = model.inputs();
            if (saw_n >= 0) {
                params["saw"] = saw_n;
                return emit_envelope(output, "oracle", params, seed, params,
                                     json{{"count", saw_count(saw_n)}});
            }
            if (escape_radius >= 0) {
                params["escape_radius"] = escape_radius;
                ModelSpec spec = model.build();
                BigRat p = exhaustive_escape_probability(spec, escape_radius);
                return emit_envelope(output, "oracle", params, seed, params,
                                     json{{"spec", spec.name()},
                                          {"probability", bigrat_str(p)},
                                          {"probability_float", static_cast<double>(p)}});
            }
            if (scenario.empty())
                throw std::invalid_argument("oracle: need --scenario, --saw or --escape-radius");
            params["scenario"] = scenario;
            ConditionalScenario sc{model.build(), SiblingStatus::Unexplored,
                                   SiblingStatus::Unexplored, SiblingStatus::Unexplored};
            if (scenario == "w-closed") sc.west = SiblingStatus::RevealedClosed;
            else if (scenario == "w-open") sc.west = SiblingStatus::RevealedOpen;
            else if (scenario == "s-closed") sc.south = SiblingStatus::RevealedClosed;
            else if (scenario == "s-open") sc.south = SiblingStatus::RevealedOpen;
            else if (scenario == "ws-open") {
                sc.west = SiblingStatus::RevealedOpen;
                sc.south = SiblingStatus::RevealedOpen;
            } else if (scenario != "unconditioned")
                throw std::invalid_argument("oracle: unknown scenario " + scenario);
            BigRat p = conditional_dual_probability(sc);
            return emit_envelope(output, "oracle", params, seed, params,
                                 json{{"spec", sc.spec.name()},
                                      {"probability", bigrat_str(p)},
                                      {"probability_float", static_cast<double>(p)}});
        }
        if (render->parsed()) {
            ModelSpec spec = model.build();
            Configuration cfg = sample_configuration(spec, {0, 0, radius}, seed);
            std::string svg;
            if (what == "config") {
                svg = render_config_svg(cfg);
            } else if (what == "explore") {
                ExplorationRecord rec = explore_dual_forward(cfg, {0, 0}, cfg.window);
                svg = render_exploration_svg(cfg, rec);
            } else {
                throw std::invalid_argument("render: unknown target " + what);
            }
            std::ofstream out_file(render_out, std::ios::binary);
            if (!out_file) throw std::runtime_error("cannot open " + render_out);
            out_file << svg;
            std::cout << "wrote " << render_out << " (" << svg.size() << " bytes)\n";
            return 0;
        }
    } catch (const std::domain_error& e) {
        std::cerr << "guard violation: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
