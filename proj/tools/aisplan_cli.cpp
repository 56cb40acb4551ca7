#include "config_file.hpp"

#include "aisplan/ais.hpp"
#include "aisplan/ais_io.hpp"
#include "aisplan/envs.hpp"
#include "aisplan/error.hpp"
#include "aisplan/model_io.hpp"
#include "aisplan/planning.hpp"
#include "aisplan/planning_io.hpp"
#include "aisplan/porl.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace aisplan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

struct ModelArgs {
    std::string model_path;
    std::string env;
};

void add_model_options(CLI::App* cmd, ModelArgs& m) {
    auto* mp = cmd->add_option("--model", m.model_path, "model file (JSON or legacy POMDP format)");
    auto* ev = cmd->add_option("--env", m.env, "builtin environment: tiger, voicemail, cheese_maze, bandit");
    mp->excludes(ev);
}

PomdpModel resolve_model(const ModelArgs& m) {
    if (!m.model_path.empty()) return load_model(m.model_path);
    if (!m.env.empty()) return env_by_name(m.env).model;
    throw ModelError("one of --model or --env is required");
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ModelError("cannot write " + path);
    f << text;
}

/// belief-quant:n=20[,kernel=quantized] | exact-belief | constant | file:PATH
AisGenerator build_ais(const PomdpModel& m, const std::string& spec, std::size_t horizon, bool stationary,
                       IpmKind kind) {
    std::string name = spec, args;
    if (auto c = spec.find(':'); c != std::string::npos) {
        name = spec.substr(0, c);
        args = spec.substr(c + 1);
    }
    if (name == "file") return parse_generator(read_text_file(args), &m);
    std::size_t n = 0;
    BeliefQuantOptions opt;
    std::stringstream ss(args);
    std::string kv;
    while (std::getline(ss, kv, ',')) {
        if (kv.empty()) continue;
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ModelError("AIS option \"" + kv + "\" is not key=value");
        std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
        if (k == "n") {
            try {
                n = std::stoul(v);
            } catch (const std::exception&) {
                throw ModelError("AIS option n must be a nonnegative integer");
            }
        } else if (k == "kernel") {
            if (v == "exact") opt.kernel = BeliefKernel::ExactUpdate;
            else if (v == "quantized") opt.kernel = BeliefKernel::QuantizedUpdate;
            else throw ModelError("AIS kernel must be exact or quantized");
        } else {
            throw ModelError("unknown AIS option \"" + k + "\"");
        }
    }
    const std::size_t h = stationary ? 0 : horizon;
    if (name == "belief-quant") {
        if (n == 0) throw ModelError("belief-quant needs n >= 1 (use exact-belief for no quantization)");
        return build_belief_quant_ais(m, h, n, kind, opt);
    }
    if (name == "exact-belief") return build_belief_quant_ais(m, h, 0, kind, opt);
    if (name == "constant") {
        std::vector<double> r(m.n_actions);
        for (std::size_t a = 0; a < m.n_actions; ++a) r[a] = expected_reward(m, m.initial_belief, a);
        if (stationary) throw ModelError("constant AIS is finite-horizon only");
        return constant_generator(m, horizon, r);
    }
    throw ModelError("unknown AIS spec \"" + spec + "\" (allowed: belief-quant:n=N, exact-belief, constant, file:PATH)");
}

void check_format(const std::string& f) {
    if (f != "csv" && f != "json") throw ModelError("unknown format \"" + f + "\" (allowed: csv, json)");
}

// ---------------------------------------------------------------------------

struct SolveArgs {
    ModelArgs model;
    std::size_t horizon = 0;
    bool infinite = false;
    std::string ais;
    double tol = 1e-8;
    std::string format = "csv";
    std::string out;
};

int run_solve(const SolveArgs& a) {
    check_format(a.format);
    PomdpModel m = resolve_model(a.model);
    if (a.infinite) {
        if (a.ais.empty()) throw ModelError("--infinite needs --ais");
        AisGenerator gen = build_ais(m, a.ais, 0, true, IpmKind::BoundedLipschitz);
        ValueIterationResult vi = ais_value_iteration(gen, a.tol);
        if (a.format == "json") {
            auto j = nlohmann::json::parse(value_tables_json(vi.tables));
            j["residual"] = vi.residual;
            j["iterations"] = vi.iterations;
            write_output(a.out, j.dump(2) + "\n");
        } else {
            write_output(a.out, value_tables_csv(vi.tables));
        }
        std::cerr << "residual " << format_number(vi.residual) << " after " << vi.iterations << " iterations\n";
        return kExitOk;
    }
    if (a.horizon == 0) throw ModelError("--horizon must be positive (or use --infinite)");
    ValueTables v = a.ais.empty() ? history_dp(m, a.horizon)
                                  : ais_dp(build_ais(m, a.ais, a.horizon, false, IpmKind::BoundedLipschitz), a.horizon);
    write_output(a.out, a.format == "json" ? value_tables_json(v) : value_tables_csv(v));
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct MeasureArgs {
    ModelArgs model;
    std::string ais;
    std::size_t horizon = 3;
    std::string fclass = "bl";
    double mmd_exponent = 1.0;
    bool check_declared = false;
    std::string format = "json";
    std::string out;
};

int run_measure(const MeasureArgs& a) {
    check_format(a.format);
    const IpmKind kind = parse_ipm_kind(a.fclass);
    PomdpModel m = resolve_model(a.model);
    if (a.ais.empty()) throw ModelError("--ais is required");
    AisGenerator gen = build_ais(m, a.ais, a.horizon, false, kind);
    MeasureOptions opt;
    opt.mmd_exponent = a.mmd_exponent;
    AisCertificate c = measure_ais(m, gen, a.horizon, kind, opt);
    if (a.format == "json") {
        nlohmann::json j;
        j["certificate"] = nlohmann::json::parse(serialize_certificate(c));
        if (gen.declared) j["declared"] = nlohmann::json::parse(serialize_certificate(*gen.declared));
        write_output(a.out, j.dump(2) + "\n");
    } else {
        write_output(a.out, certificate_csv(c));
    }
    if (a.check_declared) {
        if (!gen.declared || gen.declared->kind != kind) throw ModelError("generator declares no certificate for this class");
        for (std::size_t t = 0; t < c.stages(); ++t)
            if (c.eps[t] > gen.declared->eps[t] + 1e-9 || c.delta[t] > gen.declared->delta[t] + 1e-9) {
                std::cerr << "stage " << t + 1 << ": measured certificate exceeds the declared one\n";
                return kExitViolation;
            }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct BoundArgs {
    std::string certificate;
    std::string values;
    std::vector<double> rho;
    double discount = 1.0;
    bool discount_set = false;
    std::string variant = "primary";
    bool stationary = false;
    std::string format = "csv";
    std::string out;
};

int run_bound(const BoundArgs& a) {
    check_format(a.format);
    const BoundVariant variant = parse_bound_variant(a.variant);
    if (a.certificate.empty()) throw ModelError("--certificate is required");
    AisCertificate cert = parse_certificate(read_text_file(a.certificate));
    std::vector<double> rho = a.rho;
    double discount = a.discount;
    if (!a.values.empty()) {
        if (!rho.empty()) throw ModelError("give either --values or --rho, not both");
        auto j = nlohmann::json::parse(read_text_file(a.values), nullptr, false);
        if (j.is_discarded()) throw ParseError("values file is not valid JSON");
        if (!a.discount_set) discount = j.value("discount", 1.0);
        const bool stat = j.value("stationary", false);
        for (const auto& st : j.at("stages")) {
            std::vector<double> v = st.at("value").get<std::vector<double>>();
            if (cert.kind != IpmKind::TotalVariation)
                throw Unsupported("--values only supports the tv class; pass --rho for other classes");
            rho.push_back(0.5 * span(v));
        }
        if (!stat) {
            // rho_t is taken at stage t+1.
            rho.erase(rho.begin());
            rho.push_back(0.0);
        }
    }
    BoundReport r;
    if (a.stationary) {
        if (rho.size() != 1) throw ModelError("stationary bound needs exactly one rho value");
        r = stationary_bound(cert, rho[0], discount);
    } else {
        r = alpha_bounds(cert, rho, discount, variant);
    }
    write_output(a.out, a.format == "json" ? bound_report_json(r) : bound_report_csv(r));
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
    std::string scenario;
    ScenarioParams p;
    std::string format = "csv";
    std::string out;
};

int run_compare(const CompareArgs& a) {
    check_format(a.format);
    const Scenario s = parse_scenario(a.scenario);
    Comparison c = compare_bounds(s, a.p);
    write_output(a.out, a.format == "json" ? comparison_json(c) : comparison_csv(c));
    if ((s == Scenario::Abel || s == Scenario::FrancoisLavet) && !(c.ais_bound < c.literature_bound)) {
        std::cerr << "AIS bound is not below the literature bound\n";
        return kExitViolation;
    }
    if (s == Scenario::DeepMdp && std::abs(c.ais_bound - c.literature_bound) > 1e-12 * std::max(1.0, c.literature_bound)) {
        std::cerr << "DeepMDP expressions disagree\n";
        return kExitViolation;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct LearnArgs {
    ModelArgs model;
    std::string config;
    TrainConfig cfg;
    std::string loss = "kl";
    std::vector<std::uint64_t> seeds;
    unsigned jobs = 1;
    std::string out;
    std::string checkpoint;
};

int run_learn(const LearnArgs& a) {
    LearnArgs args = a;
    args.cfg.loss = parse_loss_kind(a.loss);
    args.cfg.validate();
    PomdpModel m = resolve_model(a.model);
    std::vector<std::uint64_t> seeds = a.seeds.empty() ? std::vector<std::uint64_t>{a.cfg.seed} : a.seeds;
    if (args.jobs == 0) throw ModelError("--jobs must be positive");
    std::vector<TrainResult> results(seeds.size());
    std::vector<std::string> errors(seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < seeds.size();) {
            TrainConfig c = args.cfg;
            c.seed = seeds[i];
            try {
                results[i] = train(m, c);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n_threads = std::min<unsigned>(args.jobs, static_cast<unsigned>(seeds.size()));
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < seeds.size(); ++i)
        if (!errors[i].empty()) throw Error("seed " + std::to_string(seeds[i]) + ": " + errors[i]);

    std::ostringstream os;
    if (seeds.size() == 1) {
        os << curve_csv(results[0].curve);
    } else {
        os << "seed,iteration,mean_return,stderr,ais_loss\n";
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            std::string body = curve_csv(results[i].curve);
            std::stringstream ls(body);
            std::string line;
            std::getline(ls, line); // header
            while (std::getline(ls, line)) os << seeds[i] << "," << line << "\n";
        }
    }
    write_output(a.out, os.str());
    const std::size_t h = std::min<std::size_t>(args.cfg.rollout, 4);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        double best = 0;
        for (std::size_t act = 0; act < m.n_actions; ++act)
            best = std::max(best, action_probability(m, results[i].ais, results[i].policy, act, h));
        std::cerr << "seed " << seeds[i] << ": final mean return "
                  << format_number(results[i].curve.empty() ? 0.0 : results[i].curve.back().mean_return)
                  << ", greedy probability " << format_number(best) << "\n";
        if (!a.checkpoint.empty()) {
            std::string path = seeds.size() == 1 ? a.checkpoint : a.checkpoint + ".seed" + std::to_string(seeds[i]);
            write_output(path, checkpoint_json(results[i], m.discount));
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
    ModelArgs model;
    std::string ais;
    std::size_t horizon = 3;
    std::string fclass = "tv";
    std::string out;
};

int run_report(const ReportArgs& a) {
    const IpmKind kind = parse_ipm_kind(a.fclass);
    if (kind == IpmKind::Mmd) throw Unsupported("report needs a class with a computable Minkowski functional");
    PomdpModel m = resolve_model(a.model);
    if (a.ais.empty()) throw ModelError("--ais is required");
    AisGenerator gen = build_ais(m, a.ais, a.horizon, false, kind);
    HistoryTree tree(m, a.horizon);
    AisCertificate cert = measure_ais(tree, gen, kind);
    ValueTables hv = history_dp(tree);
    ValueTables av = ais_dp(gen, a.horizon);
    BoundReport br = alpha_bounds(cert, gen, av);
    ValueGap gap = value_gap(tree, hv, gen, av);
    ValueTables pv = history_policy_eval(tree, lift_policy(gen, greedy_policy(av)));
    std::vector<double> pgap = history_gap(hv, pv);
    nlohmann::json j;
    j["measured"] = nlohmann::json::parse(serialize_certificate(cert));
    if (gen.declared) j["declared"] = nlohmann::json::parse(serialize_certificate(*gen.declared));
    j["bound"] = nlohmann::json::parse(bound_report_json(br));
    j["value_gap"] = gap.value;
    j["q_gap"] = gap.q;
    j["policy_gap"] = pgap;
    bool ok = true;
    for (std::size_t t = 0; t < a.horizon; ++t)
        ok = ok && gap.value[t] <= br.alpha[t] + 1e-9 && gap.q[t] <= br.alpha[t] + 1e-9 &&
             pgap[t] <= br.policy_bound[t] + 1e-9;
    j["bounds_hold"] = ok;
    write_output(a.out, j.dump(2) + "\n");
    if (!ok) {
        std::cerr << "bound violation detected\n";
        return kExitViolation;
    }
    return kExitOk;
}

struct ExportArgs {
    std::string env;
    std::string out;
};

int run_export(const ExportArgs& a) {
    write_output(a.out, serialize_model(env_by_name(a.env).model));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact and compressed planning for finite partially observed models", "aisplan"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "aisplan 0.1.0");

    SolveArgs solve;
    auto* cs = app.add_subcommand("solve", "exact history DP, AIS DP, or AIS value iteration");
    add_model_options(cs, solve.model);
    cs->add_option("--horizon,-T", solve.horizon, "finite horizon T");
    cs->add_flag("--infinite", solve.infinite, "discounted infinite horizon (value iteration)");
    cs->add_option("--ais", solve.ais, "AIS spec: belief-quant:n=N[,kernel=exact|quantized], exact-belief, constant, file:PATH");
    cs->add_option("--tol", solve.tol, "value-iteration tolerance")->capture_default_str();
    cs->add_option("--format", solve.format, "csv or json")->capture_default_str();
    cs->add_option("--out,-o", solve.out, "output file (default stdout)");

    MeasureArgs meas;
    auto* cm = app.add_subcommand("measure", "measure the (eps, delta) certificate of an AIS");
    add_model_options(cm, meas.model);
    cm->add_option("--ais", meas.ais, "AIS spec (see solve)");
    cm->add_option("--horizon,-T", meas.horizon, "measurement horizon")->capture_default_str();
    cm->add_option("--fclass", meas.fclass, "tv, kantorovich, bl or mmd")->capture_default_str();
    cm->add_option("--mmd-exponent", meas.mmd_exponent, "MMD distance exponent in (0, 2]")->capture_default_str();
    cm->add_flag("--check-declared", meas.check_declared, "exit 1 if the measured certificate exceeds the declared one");
    cm->add_option("--format", meas.format, "csv or json")->capture_default_str();
    cm->add_option("--out,-o", meas.out, "output file (default stdout)");

    BoundArgs bnd;
    auto* cb = app.add_subcommand("bound", "alpha error bounds from a certificate");
    cb->add_option("--certificate", bnd.certificate, "certificate JSON (from measure)");
    cb->add_option("--values", bnd.values, "AIS value tables JSON (from solve --format json)");
    cb->add_option("--rho", bnd.rho, "Minkowski functionals rho_t, one per stage")->delimiter(',');
    auto* dopt = cb->add_option("--discount", bnd.discount, "discount factor");
    cb->add_option("--variant", bnd.variant, "primary or alt")->capture_default_str();
    cb->add_flag("--stationary", bnd.stationary, "infinite-horizon alpha from the largest eps and delta");
    cb->add_option("--format", bnd.format, "csv or json")->capture_default_str();
    cb->add_option("--out,-o", bnd.out, "output file (default stdout)");

    CompareArgs cmp;
    auto* cc = app.add_subcommand("compare", "compare AIS bounds with literature bounds");
    cc->add_option("--scenario", cmp.scenario, "abel, deepmdp, francois-lavet or lifelong")->required();
    cc->add_option("--eps", cmp.p.eps, "approximation error eps");
    cc->add_option("--delta", cmp.p.delta, "transition error delta (deepmdp)");
    cc->add_option("--gamma", cmp.p.discount, "discount factor")->capture_default_str();
    cc->add_option("--states", cmp.p.n_states, "|S|");
    cc->add_option("--abstract-states", cmp.p.n_abstract, "|S_hat|");
    cc->add_option("--span-r", cmp.p.span_r, "Span(r)")->capture_default_str();
    cc->add_option("--sup-r", cmp.p.sup_r, "sup norm of r")->capture_default_str();
    cc->add_option("--lr", cmp.p.L_r, "reward Lipschitz constant (deepmdp)");
    cc->add_option("--lp", cmp.p.L_p, "kernel Lipschitz constant (deepmdp)");
    cc->add_option("--lipschitz", cmp.p.lipschitz, "kernel Lipschitz constant in the action embedding (lifelong)");
    cc->add_option("--eta", cmp.p.eta, "action-set diameter (lifelong)");
    cc->add_option("--zeta", cmp.p.zeta, "KL slack (lifelong)");
    cc->add_option("--format", cmp.format, "csv or json")->capture_default_str();
    cc->add_option("--out,-o", cmp.out, "output file (default stdout)");

    LearnArgs lrn;
    auto* cl = app.add_subcommand("learn", "train a tabular AIS and policy from simulated rollouts");
    add_model_options(cl, lrn.model);
    cl->add_option("--config", lrn.config, "TOML-style file of key = value pairs; flags override it");
    cl->add_option("--k", lrn.cfg.k, "latent alphabet size")->capture_default_str();
    cl->add_option("--lambda", lrn.cfg.lambda, "reward-loss weight in [0, 1]")->capture_default_str();
    cl->add_option("--loss", lrn.loss, "kl or mmd")->capture_default_str();
    cl->add_option("--rollout", lrn.cfg.rollout, "rollout length T")->capture_default_str();
    cl->add_option("--episodes", lrn.cfg.episodes, "training iterations K")->capture_default_str();
    cl->add_option("--a0", lrn.cfg.a0, "AIS learning-rate scale")->capture_default_str();
    cl->add_option("--b0", lrn.cfg.b0, "policy learning-rate scale")->capture_default_str();
    cl->add_option("--c0", lrn.cfg.c0, "critic learning-rate scale")->capture_default_str();
    cl->add_flag("--critic", lrn.cfg.critic, "actor-critic variant with a TD critic");
    cl->add_option("--seed", lrn.cfg.seed, "random seed")->capture_default_str();
    cl->add_option("--seeds", lrn.seeds, "several seeds, comma separated")->delimiter(',');
    cl->add_option("--jobs,-j", lrn.jobs, "seeds trained in parallel")->capture_default_str();
    cl->add_option("--eval-every", lrn.cfg.eval_every, "evaluation interval")->capture_default_str();
    cl->add_option("--eval-episodes", lrn.cfg.eval_episodes, "rollouts per evaluation")->capture_default_str();
    cl->add_option("--init-scale", lrn.cfg.init_scale, "std of the initial latent logits")->capture_default_str();
    cl->add_option("--out,-o", lrn.out, "learning-curve CSV (default stdout)");
    cl->add_option("--checkpoint", lrn.checkpoint, "checkpoint JSON path");

    ReportArgs rep;
    auto* cr = app.add_subcommand("report", "measure, bound and validate an AIS against exact DP");
    add_model_options(cr, rep.model);
    cr->add_option("--ais", rep.ais, "AIS spec (see solve)");
    cr->add_option("--horizon,-T", rep.horizon, "horizon")->capture_default_str();
    cr->add_option("--fclass", rep.fclass, "tv, kantorovich or bl")->capture_default_str();
    cr->add_option("--out,-o", rep.out, "output file (default stdout)");

    ExportArgs exp;
    auto* ce = app.add_subcommand("export-env", "write a builtin environment as model JSON");
    ce->add_option("--env", exp.env, "tiger, voicemail, cheese_maze or bandit")->required();
    ce->add_option("--out,-o", exp.out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (cs->parsed()) return run_solve(solve);
        if (cm->parsed()) return run_measure(meas);
        if (cb->parsed()) {
            bnd.discount_set = dopt->count() > 0;
            return run_bound(bnd);
        }
        if (cc->parsed()) return run_compare(cmp);
        if (cl->parsed()) {
            if (!lrn.config.empty()) apply_config_file(*cl, lrn.config);
            return run_learn(lrn);
        }
        if (cr->parsed()) return run_report(rep);
        if (ce->parsed()) return run_export(exp);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
