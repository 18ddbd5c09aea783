#include "mdqda/cli.hpp"

#include "mdqda/cases.hpp"
#include "mdqda/csv.hpp"
#include "mdqda/dnc.hpp"
#include "mdqda/error.hpp"
#include "mdqda/model_io.hpp"
#include "mdqda/monte_carlo.hpp"
#include "mdqda/oracles.hpp"
#include "mdqda/theory.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

namespace mdqda::cli {

namespace {

using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 42;

// Flags shared by `simulate` and `theory` that describe the populations.
struct PopulationFlags {
    std::string case_name = "1";
    std::optional<std::size_t> p;
    std::optional<double> ratio;
    std::size_t n = 0;
    std::optional<std::size_t> n2;
    std::string noise = "t5";
    std::string mean_mode = "equal";
    std::uint64_t seed = kDefaultSeed;
    std::string sigma1_path;
    std::string sigma2_path;
    std::string mu1_path;
    std::string mu2_path;

    void attach(CLI::App& app) {
        app.add_option("--case", case_name, "Covariance case 1..7 or custom")->capture_default_str();
        app.add_option("--p", p, "Dimension (overrides --ratio)");
        app.add_option("--ratio", ratio, "p/n; p = floor(ratio * n)");
        app.add_option("--n", n, "Class-1 sample size (also class 2 unless --n2)")->required();
        app.add_option("--n2", n2, "Class-2 sample size");
        app.add_option("--noise", noise, "normal or t<df>")->capture_default_str();
        app.add_option("--mean-mode", mean_mode, "equal or uniform")->capture_default_str();
        app.add_option("--seed", seed, "Master seed")->capture_default_str();
        app.add_option("--sigma1", sigma1_path, "Custom case: Sigma1 as a p x p CSV");
        app.add_option("--sigma2", sigma2_path, "Custom case: Sigma2 as a p x p CSV");
        app.add_option("--mu1", mu1_path, "Custom case: mu1 as one CSV row (default 0)");
        app.add_option("--mu2", mu2_path, "Custom case: mu2 as one CSV row (default 0)");
    }

    std::size_t n1() const { return n; }
    std::size_t n2_or_n() const { return n2.value_or(n); }

    std::size_t dimension(const std::optional<CovarianceCase>& custom) const {
        if (custom) return custom->p;
        if (p) return *p;
        if (!ratio) throw ValidationError("one of --p or --ratio is required");
        if (!(*ratio > 0.0 && *ratio < 1.0)) throw ValidationError("--ratio must lie in (0, 1)");
        return static_cast<std::size_t>(std::floor(*ratio * static_cast<double>(n)));
    }

    std::optional<CovarianceCase> custom_populations() const {
        if (parse_case(case_name) != CaseId::custom) return std::nullopt;
        if (sigma1_path.empty() || sigma2_path.empty()) {
            throw ValidationError("--case custom needs --sigma1 and --sigma2");
        }
        SpdMatrix s1(to_matrix(read_numeric_csv(sigma1_path)));
        SpdMatrix s2(to_matrix(read_numeric_csv(sigma2_path)));
        const auto pi = static_cast<Eigen::Index>(s1.dim());
        auto read_mu = [&](const std::string& path) -> Vector {
            if (path.empty()) return Vector::Zero(pi);
            const Matrix m = to_matrix(read_numeric_csv(path));
            if (m.size() != pi) throw ValidationError(path + ": mean has wrong length");
            return Eigen::Map<const Vector>(m.data(), pi);
        };
        return custom_case(read_mu(mu1_path), read_mu(mu2_path), std::move(s1), std::move(s2));
    }
};

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty()) return fallback;
    file.open(path);
    if (!file) throw ValidationError("cannot write " + path);
    return file;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json tagged(double value, const char* source) { return json{{"value", value}, {"source", source}}; }

json rate_json(const theory::RateLimit& r, const char* source) {
    return json{{"value", r.rate},  {"T", r.T},     {"Tt", r.Tt},
                {"psi", r.psi},     {"psit", r.psit}, {"degenerate", r.degenerate},
                {"source", source}};
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateFlags {
    PopulationFlags pop;
    std::size_t reps = 1000;
    std::string rules = "optimal,sample,generalized";
    std::string p0 = "auto";
    std::size_t groups = 2;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string out;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
    SimulationConfig cfg;
    cfg.custom = f.pop.custom_populations();
    cfg.case_id = parse_case(f.pop.case_name);
    cfg.p = f.pop.dimension(cfg.custom);
    cfg.mean_mode = parse_mean_mode(f.pop.mean_mode);
    cfg.n1 = f.pop.n1();
    cfg.n2 = f.pop.n2_or_n();
    cfg.reps = f.reps;
    cfg.seed = f.pop.seed;
    cfg.noise = Noise::parse(f.pop.noise);
    cfg.threads = f.threads;
    std::size_t p0 = 0;
    if (f.p0 != "auto") {
        try {
            p0 = std::stoul(f.p0);
        } catch (const std::exception&) {
            throw ValidationError("--p0 must be 'auto' or a positive integer");
        }
        if (p0 == 0) throw ValidationError("--p0 must be positive");
    }
    cfg.rules = parse_rules(f.rules, p0, f.groups);
    const auto estimates = run_monte_carlo(cfg);
    std::ofstream file;
    open_output(f.out, file, out) << results_csv(cfg, estimates);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// theory
// ---------------------------------------------------------------------------

struct TheoryFlags {
    PopulationFlags pop;
    std::size_t groups = 2;
    double eps = 0.05;
    std::string out;
};

int cmd_theory(const TheoryFlags& f, std::ostream& out) {
    auto custom = f.pop.custom_populations();
    const CaseId id = parse_case(f.pop.case_name);
    const std::size_t p = f.pop.dimension(custom);
    const std::size_t n1 = f.pop.n1();
    const std::size_t n2 = f.pop.n2_or_n();
    const Noise noise = Noise::parse(f.pop.noise);
    const double m4 = noise.fourth_moment();
    const CovarianceCase c =
        custom ? *custom : make_case(id, p, f.pop.seed, parse_mean_mode(f.pop.mean_mode), n1);

    const auto m = theory::moment_set(c.sigma1, c.sigma2, n1, n2, m4);
    const auto drift = theory::drift_terms(c.mu1, c.mu2, c.sigma1, c.sigma2);
    const auto constants = correction_constants(p, n1, n2);
    const auto gen = theory::psi_generalized(m);
    const auto opt = theory::psi_optimal(m);
    const auto smp = theory::psi_sample(m, constants, c.mu1, c.mu2, c.sigma1, c.sigma2);
    const auto diag = theory::separation_diagnostics(c.mu1, c.mu2, c.sigma1, c.sigma2, f.eps);

    json report;
    report["inputs"] = {{"case", case_name(id)}, {"p", p},       {"n1", n1},         {"n2", n2},
                        {"noise", noise.name()}, {"m4", m4},     {"H", f.groups},    {"eps", f.eps},
                        {"mean_mode", f.pop.mean_mode},          {"seed", f.pop.seed}};
    report["moments"] = {
        {"M1", tagged(m.M1, "M1 = (1/p) tr(Sigma1 Sigma2^-1)")},
        {"M2", tagged(m.M2, "M2 = (1/p) sum_i [(Sigma1^1/2 Sigma2^-1 Sigma1^1/2)_ii]^2")},
        {"M3", tagged(m.M3, "M3 = (1/p) tr(Sigma2 Sigma1^-1)")},
        {"M4", tagged(m.M4, "M4 = (1/p) sum_i [(Sigma2^1/2 Sigma1^-1 Sigma2^1/2)_ii]^2")},
        {"M5", tagged(m.M5, "M5 = (1/p) tr((Sigma1 Sigma2^-1)^2)")},
        {"M6", tagged(m.M6, "M6 = (1/p) tr((Sigma2 Sigma1^-1)^2)")},
        {"c1", tagged(m.c1, "c1 = p/n1")},
        {"c2", tagged(m.c2, "c2 = p/n2")},
    };
    report["drift"] = {
        {"T", tagged(drift.T, "T = -(1/sqrt p)[tr(I - Sigma1 Sigma2^-1) + log|Sigma1 Sigma2^-1|] + (1/sqrt p) d^T Sigma2^-1 d")},
        {"Tt", tagged(drift.Tt, "T~ = -(1/sqrt p)[tr(I - Sigma2 Sigma1^-1) + log|Sigma2 Sigma1^-1|] + (1/sqrt p) d^T Sigma1^-1 d")},
        {"T_S", tagged(smp.T_S, "T_S: sample-rule drift with s0n, m0n, l1n, l2n")},
        {"Tt_S", tagged(smp.Tt_S, "T~_S: sample-rule drift, classes swapped")},
    };
    report["variances"] = {
        {"psi2", tagged(gen.first, "psi^2 = (m4-3)(1-2M1+M2) + 2(1/(1-c1) - 2M1 + M5 + c2/(1-c2) M1^2)")},
        {"psit2", tagged(gen.second, "psi~^2 = (m4-3)(1-2M3+M4) + 2(1/(1-c2) - 2M3 + M6 + c1/(1-c1) M3^2)")},
        {"psi02", tagged(opt.first, "psi0^2 = (m4-3)(1-2M1+M2) + 2(1-2M1+M5)")},
        {"psit02", tagged(opt.second, "psi0~^2 = (m4-3)(1-2M3+M4) + 2(1-2M3+M6)")},
        {"psiS2", tagged(smp.psi2, "psiS^2 = (m4-3)(s0^2-2 s0 m0 M1+m0^2 M2) + 2[s0' - 2 s0 m0 M1 + m0^2 (M5 + c2/(1-c2) M1^2)]")},
        {"psitS2", tagged(smp.psit2, "psiS~^2 = (m4-3)(m0^2-2 s0 m0 M3+s0^2 M4) + 2[m0' - 2 s0 m0 M3 + s0^2 (M6 + c1/(1-c1) M3^2)]")},
    };

    json rates;
    rates["optimal"] = rate_json(theory::rate_limit(theory::Rule::optimal, drift.T, drift.Tt, opt),
                                 "1 - [Phi(T/psi0) + Phi(T~/psi0~)]/2");
    rates["generalized"] = rate_json(theory::rate_limit(theory::Rule::generalized, drift.T, drift.Tt, gen),
                                     "1 - [Phi(T/psi) + Phi(T~/psi~)]/2");
    rates["sample"] = rate_json(theory::rate_limit(theory::Rule::sample, smp.T_S, smp.Tt_S, {smp.psi2, smp.psit2}),
                                "1 - [Phi(T_S/psiS) + Phi(T~_S/psiS~)]/2");
    const std::string dnc_key = "dnc_samples(H=" + std::to_string(f.groups) + ")";
    try {
        const auto dnc = theory::psi_dnc_samples(m, f.groups);
        report["variances"]["psiD2"] = tagged(dnc.first, "psiD^2 = psi0^2 + (2/H)[c1H/(1-c1H) + c2H/(1-c2H) M1^2], ciH = ci H");
        report["variances"]["psitD2"] = tagged(dnc.second, "psiD~^2 = psi0~^2 + (2/H)[c2H/(1-c2H) + c1H/(1-c1H) M3^2]");
        auto r = theory::rate_limit(theory::Rule::dnc_samples, drift.T, drift.Tt, dnc);
        r.groups = f.groups;
        rates[dnc_key] = rate_json(r, "1 - [Phi(T/psiD) + Phi(T~/psiD~)]/2");
    } catch (const ValidationError& e) {
        rates[dnc_key] = {{"error", e.what()}};
    }
    report["rates"] = rates;
    report["diagnostics"] = {
        {"zeta1", tagged(diag.zeta1, "zeta1 = |mu1 - mu2|^2 / sqrt p")},
        {"zeta2", tagged(diag.zeta2, "zeta2 = s / sqrt p, s = #{lambda_i(Sigma1 Sigma2^-1) != 1}")},
        {"zeta_eps", tagged(diag.zeta_eps, "zeta(eps) = s(eps) / sqrt p, s(eps) = #{|lambda_i - 1| > eps}")},
        {"s", diag.s},
        {"s_eps", diag.s_eps},
    };
    report["regime"] = std::string(theory::to_string(theory::classify_regime(diag)));

    std::ofstream file;
    open_output(f.out, file, out) << report.dump(2) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// fit / predict
// ---------------------------------------------------------------------------

struct FitFlags {
    std::string train1;
    std::string train2;
    std::string variant = "generalized";
    std::string out;
};

int cmd_fit(const FitFlags& f, std::ostream& out) {
    const DataMatrix x1 = to_data_matrix(read_numeric_csv(f.train1));
    const DataMatrix x2 = to_data_matrix(read_numeric_csv(f.train2));
    const FittedQda model = fit(x1, x2, parse_variant(f.variant));
    if (f.out.empty()) {
        out << save_model(model) << '\n';
    } else {
        save_model_file(model, f.out);
    }
    return kExitOk;
}

struct PredictFlags {
    std::string model;
    std::string data;
    std::string out;
};

int cmd_predict(const PredictFlags& f, std::ostream& out) {
    const FittedQda model = load_model_file(f.model);
    const NumericTable table = read_numeric_csv(f.data);
    if (!table.rows.empty() && table.cols != model.dim()) {
        throw ValidationError(f.data + ": expected " + std::to_string(model.dim()) + " columns, found " +
                              std::to_string(table.cols));
    }
    const DataMatrix z = to_data_matrix(table);
    std::ostringstream buf;
    buf << "row_index,label,score\n";
    for (std::size_t i = 0; i < z.count(); ++i) {
        const double score = model.discriminant(z.columns().col(static_cast<Eigen::Index>(i)));
        buf << i << ',' << static_cast<int>(label_from_score(score)) << ',' << fmt17(score) << '\n';
    }
    std::ofstream file;
    open_output(f.out, file, out) << buf.str();
    return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

struct OracleFlags {
    std::string name;
    std::size_t p = 200;
    std::size_t n = 400;
    std::size_t reps = 50;
    std::uint64_t seed = kDefaultSeed;
    std::string noise = "normal";
    double v_scale = 1.0;
    std::string out;
};

int cmd_oracle(const OracleFlags& f, std::ostream& out) {
    json report;
    report["oracle"] = f.name;
    report["p"] = f.p;
    report["n"] = f.n;
    report["reps"] = f.reps;
    report["seed"] = f.seed;
    if (f.name == "rmt") {
        const auto pi = static_cast<Eigen::Index>(f.p);
        const Matrix v = f.v_scale * Matrix::Identity(pi, pi);
        const double target = rmt_diag_target(f.p, f.n, v);
        const double estimate = rmt_diag_oracle(f.p, f.n, v, f.reps, f.seed);
        report["v_scale"] = f.v_scale;
        report["target"] = target;
        report["estimate"] = estimate;
        report["relative_error"] = std::abs(estimate - target) / target;
    } else {
        const Noise noise = Noise::parse(f.noise);
        const auto s = clt_check(f.p, f.n, noise, f.reps, f.seed);
        report["noise"] = noise.name();
        report["target"] = s.target_variance;
        report["estimate"] = s.variance;
        report["relative_error"] = std::abs(s.variance - s.target_variance) / s.target_variance;
        report["mean"] = s.mean;
        report["std_err_mean"] = s.std_err_mean;
        report["skewness"] = s.skewness;
    }
    std::ofstream file;
    open_output(f.out, file, out) << report.dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quadratic discriminant analysis under moderate dimension"};
    app.name("mdqda");
    app.require_subcommand(1);

    SimulateFlags sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo misclassification rates (CSV)");
    sim.pop.attach(*simulate);
    simulate->add_option("--reps", sim.reps, "Replications")->capture_default_str();
    simulate->add_option("--rules", sim.rules,
                         "Comma list of optimal,sample,generalized,subgroup,componentwise,split_weighted,split_majority")
        ->capture_default_str();
    simulate->add_option("--p0", sim.p0, "Screening size: auto (3 floor(sqrt p)) or an integer")->capture_default_str();
    simulate->add_option("--H", sim.groups, "Groups for the sample-splitting rules")->capture_default_str();
    simulate->add_option("--threads", sim.threads, "Worker threads (results do not depend on it)");
    simulate->add_option("--out", sim.out, "Output path (default stdout)");

    TheoryFlags th;
    auto* theory_cmd = app.add_subcommand("theory", "Asymptotic rate limits and diagnostics (JSON)");
    th.pop.attach(*theory_cmd);
    theory_cmd->add_option("--H", th.groups, "Groups for the sample-splitting limit")->capture_default_str();
    theory_cmd->add_option("--eps", th.eps, "Eigenvalue deviation threshold for s(eps)")->capture_default_str();
    theory_cmd->add_option("--out", th.out, "Output path (default stdout)");

    FitFlags ff;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a model from two training CSVs");
    fit_cmd->add_option("--train1", ff.train1, "Class-1 observations, one per row")->required();
    fit_cmd->add_option("--train2", ff.train2, "Class-2 observations, one per row")->required();
    fit_cmd->add_option("--variant", ff.variant, "sample or generalized")
        ->check(CLI::IsMember({"sample", "generalized"}))
        ->capture_default_str();
    fit_cmd->add_option("--out", ff.out, "Model path (default stdout)");

    PredictFlags pf;
    auto* predict_cmd = app.add_subcommand("predict", "Classify rows of a CSV with a saved model");
    predict_cmd->add_option("--model", pf.model, "Model JSON")->required();
    predict_cmd->add_option("--data", pf.data, "Observations, one per row")->required();
    predict_cmd->add_option("--out", pf.out, "Output path (default stdout)");

    OracleFlags of;
    auto* oracle_cmd = app.add_subcommand("oracle", "Random-matrix numerical checks");
    oracle_cmd->add_option("name", of.name, "rmt or clt")->required()->check(CLI::IsMember({"rmt", "clt"}));
    oracle_cmd->add_option("--p", of.p, "Dimension")->capture_default_str();
    oracle_cmd->add_option("--n", of.n, "Sample size")->capture_default_str();
    oracle_cmd->add_option("--reps", of.reps, "Replications")->capture_default_str();
    oracle_cmd->add_option("--seed", of.seed, "Master seed")->capture_default_str();
    oracle_cmd->add_option("--noise", of.noise, "clt only: normal or t<df>")->capture_default_str();
    oracle_cmd->add_option("--v-scale", of.v_scale, "rmt only: V = v_scale * I")->capture_default_str();
    oracle_cmd->add_option("--out", of.out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim, out);
        if (theory_cmd->parsed()) return cmd_theory(th, out);
        if (fit_cmd->parsed()) return cmd_fit(ff, out);
        if (predict_cmd->parsed()) return cmd_predict(pf, out);
        if (oracle_cmd->parsed()) return cmd_oracle(of, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitUsage;
}

}  // namespace mdqda::cli
