// Command-line front end: demos, gradient checks, spectral studies,
// over-smoothing diagnostics, cost reports, and scaling benchmarks.
//
// Exit codes: 0 success, 1 check failure, 2 usage/config error, 3 numeric
// failure. Reports are deterministic for a fixed seed and carry the seed so
// any run can be regenerated exactly.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hgfe/bench.hpp"
#include "hgfe/gradcheck.hpp"
#include "hgfe/hgfe.hpp"
#include "hgfe/spectral.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
using namespace hgfe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct RunConfig {
    std::uint64_t seed = 1;
    std::size_t w = 8;
    std::size_t C = 8;
    std::size_t d = 4;
    std::size_t H = 16;
    std::size_t W = 16;
    std::size_t B = 1;
    std::string norm = "plain";
    std::string act = "sigmoid";
    std::string residual = "input";
    std::string out_path;
    std::string format;  // per-command default when empty
};

afm::NormMode parse_norm(const std::string& s) {
    if (s == "plain") return afm::NormMode::PlainSoftmax;
    if (s == "sigmoid-softmax") return afm::NormMode::SigmoidSoftmax;
    throw ContractError("unknown normalization mode: " + s);
}

afm::OutAct parse_act(const std::string& s) {
    if (s == "sigmoid") return afm::OutAct::Sigmoid;
    if (s == "identity") return afm::OutAct::Identity;
    throw ContractError("unknown output activation: " + s);
}

block::ResidualMode parse_residual(const std::string& s) {
    if (s == "input") return block::ResidualMode::FromInput;
    if (s == "local") return block::ResidualMode::FromLocal;
    if (s == "off") return block::ResidualMode::Off;
    throw ContractError("unknown residual mode: " + s);
}

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->set_help_flag("--help", "Print help");  // frees -h / --h for the height flag
    cmd->add_option("--seed", cfg.seed, "Random seed carried into the report");
    cmd->add_option("--w", cfg.w, "Window size")->check(CLI::PositiveNumber);
    cmd->add_option("--c", cfg.C, "Channels")->check(CLI::PositiveNumber);
    cmd->add_option("--d", cfg.d, "Attention embedding width")->check(CLI::PositiveNumber);
    cmd->add_option("--h", cfg.H, "Feature map height")->check(CLI::PositiveNumber);
    cmd->add_option("--wdt", cfg.W, "Feature map width")->check(CLI::PositiveNumber);
    cmd->add_option("--b", cfg.B, "Batch size")->check(CLI::PositiveNumber);
    cmd->add_option("--norm", cfg.norm, "Attention normalization")
        ->check(CLI::IsMember({"plain", "sigmoid-softmax"}));
    cmd->add_option("--act", cfg.act, "Output activation")
        ->check(CLI::IsMember({"sigmoid", "identity"}));
    cmd->add_option("--residual", cfg.residual, "Residual wiring")
        ->check(CLI::IsMember({"input", "local", "off"}));
    cmd->add_option("--out", cfg.out_path, "Write the report to this path instead of stdout");
    cmd->add_option("--format", cfg.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(cfg.out_path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + cfg.out_path);
    os << text;
}

// key,value flattening for the commands whose natural shape is a JSON object
std::string json_as_csv(const json& j) {
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& [k, v] : j.items()) os << k << "," << v.dump() << "\n";
    return os.str();
}

void emit_json(const RunConfig& cfg, const json& j) {
    if (cfg.format == "csv")
        emit(cfg, json_as_csv(j));
    else
        emit(cfg, j.dump(2) + "\n");
}

double checksum(const Tensor& t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.numel(); ++i) acc += t[i] * static_cast<double>(i % 97 + 1);
    return acc;
}

int cmd_demo(const RunConfig& cfg) {
    block::HgfeConfig bc;
    bc.norm = parse_norm(cfg.norm);
    bc.act = parse_act(cfg.act);
    bc.residual = parse_residual(cfg.residual);
    afm::OpCounter intra_counter, inter_counter;
    bc.intra_counter = &intra_counter;
    bc.inter_counter = &inter_counter;

    block::HgfeParams params = block::HgfeParams::init(cfg.C, cfg.d, cfg.w, cfg.seed);
    Tensor F = init_range(cfg.seed + 7, {cfg.B, cfg.C, cfg.H, cfg.W}, -1.0, 1.0);
    window::WindowGrid grid = window::make_grid(F, cfg.w);
    Tensor out = block::hgfe_forward(F, params, bc);
    if (!out.all_finite()) throw NumericError("demo: non-finite output");

    // gating vectors of the first window and of sample 0's supernode graph
    Tensor first_window = window::window_to_nodes(window::partition_windows(F, grid)[0]);
    Tensor alpha_intra = afm::gating_of(first_window, params.intra);
    Tensor local = window::intra_window_forward(F, params.intra, cfg.w,
                                                {bc.norm, bc.act, nullptr});
    Tensor pooled = supernode::pool_supernodes(window::partition_windows(local, grid), grid);
    Tensor super0({grid.windows_per_sample(), cfg.C});
    for (std::size_t m = 0; m < grid.windows_per_sample(); ++m)
        for (std::size_t c = 0; c < cfg.C; ++c) super0.at(m, c) = pooled[m * cfg.C + c];
    Tensor alpha_inter = afm::gating_of(super0, params.inter);

    // row-stochasticity of the first window's fused attention
    double max_dev = 0.0;
    {
        ad::Tape tape;
        ad::Var h = tape.leaf(first_window);
        afm::AfmVars vars = afm::AfmVars::leaves(tape, params.intra);
        ad::Var alpha = afm::gating_vector(afm::channel_summary(h), vars);
        ad::Var low = afm::branch_logits(h, vars.Wq_low, vars.Wk_low, vars.a_low, 0.01);
        ad::Var high = afm::branch_logits(h, vars.Wq_high, vars.Wk_high, vars.a_high, 0.01);
        for (ad::Var a : afm::fuse_and_normalize(low, high, alpha, bc.norm)) {
            const Tensor& A = a.val();
            for (std::size_t i = 0; i < A.rows(); ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < A.cols(); ++j) s += A.at(i, j);
                max_dev = std::max(max_dev, std::abs(s - 1.0));
            }
        }
    }

    json j;
    j["command"] = "demo";
    j["seed"] = cfg.seed;
    j["input_shape"] = F.shape();
    j["output_shape"] = out.shape();
    j["w"] = cfg.w;
    j["norm"] = cfg.norm;
    j["act"] = cfg.act;
    j["residual"] = cfg.residual;
    j["alpha_intra"] = alpha_intra.data();
    j["alpha_inter"] = alpha_inter.data();
    j["attention_row_sum_max_dev"] = max_dev;
    j["intra_pairwise_ops"] = intra_counter.pairwise;
    j["inter_pairwise_ops"] = inter_counter.pairwise;
    j["output_checksum"] = checksum(out);
    emit_json(cfg, j);
    return kExitOk;
}

int cmd_gradcheck(const RunConfig& cfg, bool corrupt) {
    const double tol = 1e-5;
    json j;
    j["command"] = "gradcheck";
    j["seed"] = cfg.seed;
    j["tolerance"] = tol;
    bool all_pass = true;

    auto record = [&](const char* key, const GradCheckReport& rep) {
        json entries = json::array();
        for (const auto& e : rep.entries) {
            entries.push_back({{"name", e.name},
                               {"max_abs_err", e.max_abs_err},
                               {"max_rel_err", e.max_rel_err}});
        }
        j[key] = {{"pass", rep.pass}, {"entries", entries}};
        all_pass = all_pass && rep.pass;
    };

    {
        afm::AfmParams p = afm::AfmParams::init(4, 3, cfg.seed);
        Tensor H = init_range(cfg.seed + 2, {9, 4}, -1.0, 1.0);
        ScalarFn loss = [&H, corrupt](ad::Tape& t, const std::map<std::string, ad::Var>& m) {
            afm::AfmVars vars = afm::AfmVars::from_named(m, "", 0.01);
            ad::Var out = afm::afm_forward(t.leaf(H), vars, {});
            if (corrupt) out = ad::scale(ad::sigmoid(out), 1.0);  // extra nonlinearity
            return ad::sum_all(out);
        };
        GradCheckReport rep = grad_check(loss, p.named(), tol);
        if (corrupt) {
            // negative-control hook: falsify one analytic entry
            for (auto& e : rep.entries) e.max_rel_err += 1.0;
            rep.pass = false;
        }
        record("afm", rep);
    }
    {
        std::size_t w = 3;
        block::HgfeParams p = block::HgfeParams::init(3, 2, w, cfg.seed + 3);
        ParamMap params = p.named();
        params["F"] = init_range(cfg.seed + 4, {1, 3, 6, 6}, -1.0, 1.0);
        ScalarFn loss = [w](ad::Tape&, const std::map<std::string, ad::Var>& m) {
            block::HgfeVars vars;
            vars.intra = afm::AfmVars::from_named(m, "intra.", 0.01);
            vars.inter = afm::AfmVars::from_named(m, "inter.", 0.01);
            vars.proj = supernode::ProjVars{m.at("proj.Wproj"), m.at("proj.bproj")};
            return ad::sum_all(block::hgfe_forward(m.at("F"), vars, w, {}));
        };
        record("hgfe", grad_check(loss, params, tol));
    }
    j["pass"] = all_pass;
    emit_json(cfg, j);
    return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_spectral(const RunConfig& cfg, std::size_t n_nodes, bool fail_numeric) {
    if (n_nodes > 256) throw ContractError("spectral: graph size must be <= 256");
    if (fail_numeric) throw NumericError("forced failure (test hook)");
    auto adj = spectral::GraphAdjacency::random_connected(n_nodes, 0.3, cfg.seed);
    spectral::NormalizedLaplacian L = spectral::normalized_laplacian(adj);
    spectral::SpectralBasis eig = spectral::eigendecompose(L);

    auto g_low = [](double lam) { return std::exp(-2.0 * lam); };
    auto g_high = [](double lam) { return lam / 2.0; };

    std::ostringstream os;
    os.precision(17);
    os << "# section,filter_or_alpha,K,max_error_or_lambda,response\n";
    os << "# approx rows: max |chebyshev_apply - spectral_filter_exact| over a seeded signal\n";
    std::vector<double> x(n_nodes);
    SplitMix64 rng(cfg.seed + 5);
    for (double& v : x) v = rng.next_unit() - 0.5;
    for (int which = 0; which < 2; ++which) {
        const spectral::FilterFn g = which == 0 ? spectral::FilterFn(g_low)
                                                : spectral::FilterFn(g_high);
        const char* name = which == 0 ? "low" : "high";
        std::vector<double> exact = spectral::spectral_filter_exact(eig, g, x);
        for (std::size_t K : {0, 2, 4, 8, 16, 24}) {
            spectral::ChebyshevCoeffs coeffs = spectral::fit_chebyshev(g, K, 2.0);
            std::vector<double> approx = spectral::chebyshev_apply(L, coeffs, x);
            double err = 0.0;
            for (std::size_t i = 0; i < n_nodes; ++i)
                err = std::max(err, std::abs(approx[i] - exact[i]));
            os << "approx," << name << "," << K << "," << err << ",\n";
        }
    }
    // interpolation sweep: responses sampled on the eigenvalue grid
    spectral::ChebyshevCoeffs low = spectral::fit_chebyshev(g_low, 24, 2.0);
    spectral::ChebyshevCoeffs high = spectral::fit_chebyshev(g_high, 24, 2.0);
    for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        spectral::ChebyshevCoeffs mix = spectral::interpolate_filter_coeffs(low, high, alpha);
        for (double lam : eig.lambda) {
            // response at lambda via the scalar three-term recurrence
            double t = 2.0 / mix.lambda_max * lam - 1.0;
            double t_prev = 1.0, t_cur = t, resp = mix.theta[0];
            for (std::size_t k = 1; k < mix.theta.size(); ++k) {
                resp += mix.theta[k] * t_cur;
                double t_next = 2.0 * t * t_cur - t_prev;
                t_prev = t_cur;
                t_cur = t_next;
            }
            os << "interp," << alpha << ",24," << lam << "," << resp << "\n";
        }
    }
    if (cfg.format == "json") {
        json j;
        j["command"] = "spectral";
        j["seed"] = cfg.seed;
        j["csv"] = os.str();
        emit(cfg, j.dump(2) + "\n");
    } else {
        emit(cfg, os.str());
    }
    return kExitOk;
}

int cmd_bench(const RunConfig& cfg, const std::vector<std::size_t>& sizes, std::size_t repeats) {
    bool use_f32 = false;
    if (const char* prec = std::getenv("HGFE_PRECISION")) {
        std::string p = prec;
        if (p == "f32")
            use_f32 = true;
        else if (p != "f64")
            throw ContractError("HGFE_PRECISION must be f32 or f64, got " + p);
    }
    std::vector<std::pair<std::size_t, std::size_t>> hw;
    for (std::size_t s : sizes) {
        if (s % cfg.w != 0)
            throw PartitionError("H=" + std::to_string(s) + " is not divisible by w=" +
                                 std::to_string(cfg.w));
        hw.emplace_back(s, s);
    }
    auto rows = bench::bench_scaling(hw, cfg.w, cfg.d, repeats, cfg.seed, use_f32);
    std::ostringstream os;
    os << "# H,W,full_count,supernode_count,ratio,flop_local,flop_global,"
          "full_time_ms,supernode_time_ms\n";
    for (const auto& r : rows) {
        block::CostReport fr = block::flop_estimate(cfg.B, cfg.C, r.H, r.W, cfg.w, cfg.d);
        os << r.H << "," << r.W << "," << r.full_count << "," << r.supernode_count << ","
           << r.full_count / r.supernode_count << "," << fr.flop_local_term << ","
           << fr.flop_global_term << "," << r.full_time_ms << "," << r.supernode_time_ms
           << "\n";
    }
    emit(cfg, os.str());
    return kExitOk;
}

int cmd_paramcount(const RunConfig& cfg, const std::string& convention) {
    block::AfmConvention conv = convention == "single" ? block::AfmConvention::SingleShared
                                                       : block::AfmConvention::TwoInstances;
    block::CostReport r = block::param_count(cfg.C, cfg.d, conv);
    json j;
    j["command"] = "paramcount";
    j["seed"] = cfg.seed;
    j["C"] = cfg.C;
    j["d"] = cfg.d;
    j["convention"] = convention;
    json breakdown = json::array();
    for (const auto& item : r.breakdown)
        breakdown.push_back({{"name", item.name}, {"count", item.count}});
    j["breakdown"] = breakdown;
    j["exact_total"] = r.exact_total;
    j["approx_formula"] = r.approx_formula;
    j["delta"] = r.delta;
    j["leading_ratio"] = r.leading_ratio;
    emit_json(cfg, j);
    return kExitOk;
}

int cmd_oversmooth(const RunConfig& cfg, std::size_t depth) {
    block::HgfeParams params = block::HgfeParams::init(cfg.C, cfg.d, cfg.w, cfg.seed);
    Tensor F = init_range(cfg.seed + 7, {cfg.B, cfg.C, cfg.H, cfg.W}, -1.0, 1.0);
    block::HgfeConfig bc;
    bc.norm = parse_norm(cfg.norm);
    bc.act = afm::OutAct::Identity;  // spread diagnostics are pre-activation
    auto spread = block::spread_profile(F, params, depth, bc);
    auto energy = block::dirichlet_profile(F, params, depth, bc);
    bool monotone = true;
    for (std::size_t t = 1; t < spread.size(); ++t)
        for (std::size_t c = 0; c < cfg.C; ++c)
            monotone = monotone && spread[t][c] <= spread[t - 1][c] + 1e-12;
    json j;
    j["command"] = "oversmooth";
    j["seed"] = cfg.seed;
    j["depth"] = depth;
    j["spread"] = spread;
    j["dirichlet_energy"] = energy;
    j["spread_monotone"] = monotone;
    emit_json(cfg, j);
    return monotone ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical windowed graph attention toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    bool corrupt = false;
    std::size_t spectral_nodes = 12;
    std::vector<std::size_t> bench_sizes{16, 32, 64};
    std::size_t bench_repeats = 3;
    std::string convention = "two";
    std::size_t depth = 4;

    CLI::App* demo = app.add_subcommand("demo", "Run the block once and report diagnostics");
    add_common_flags(demo, cfg);
    CLI::App* grad = app.add_subcommand("gradcheck", "Verify gradients by finite differences");
    add_common_flags(grad, cfg);
    grad->add_flag("--corrupt-gradient", corrupt, "Falsify the analytic gradient (test hook)")
        ->group("");  // hidden
    CLI::App* spec = app.add_subcommand("spectral", "Chebyshev filter approximation study");
    add_common_flags(spec, cfg);
    spec->add_option("--nodes", spectral_nodes, "Graph size")->check(CLI::Range(2, 256));
    bool fail_numeric = false;
    spec->add_flag("--fail-numeric", fail_numeric, "Force a numeric failure (test hook)")
        ->group("");  // hidden
    CLI::App* bench = app.add_subcommand("bench", "Attention scaling micro-benchmark");
    add_common_flags(bench, cfg);
    bench->add_option("--sizes", bench_sizes, "Square grid sizes to benchmark");
    bench->add_option("--repeats", bench_repeats, "Timing repeats per size")
        ->check(CLI::PositiveNumber);
    CLI::App* pc = app.add_subcommand("paramcount", "Exact vs approximate parameter counts");
    add_common_flags(pc, cfg);
    pc->add_option("--convention", convention, "AFM instancing convention")
        ->check(CLI::IsMember({"single", "two"}));
    CLI::App* os_cmd = app.add_subcommand("oversmooth", "Stacked-aggregation smoothing profile");
    add_common_flags(os_cmd, cfg);
    os_cmd->add_option("--depth", depth, "Aggregation depth")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (demo->parsed()) return cmd_demo(cfg);
        if (grad->parsed()) return cmd_gradcheck(cfg, corrupt);
        if (spec->parsed()) return cmd_spectral(cfg, spectral_nodes, fail_numeric);
        if (bench->parsed()) return cmd_bench(cfg, bench_sizes, bench_repeats);
        if (pc->parsed()) return cmd_paramcount(cfg, convention);
        if (os_cmd->parsed()) return cmd_oversmooth(cfg, depth);
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
