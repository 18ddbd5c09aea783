#include "mdqda/cases.hpp"
#include "mdqda/csv.hpp"
#include "mdqda/error.hpp"
#include "mdqda/monte_carlo.hpp"
#include "mdqda/oracles.hpp"
#include "mdqda/sampling.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <set>
#include <sstream>

using namespace mdqda;
using namespace mdqda::testing;

namespace {

bool is_diagonal(const Matrix& m) { return (m - Matrix(m.diagonal().asDiagonal())).norm() == 0.0; }

SimulationConfig small_config() {
    SimulationConfig cfg;
    cfg.case_id = CaseId::case2;
    cfg.p = 8;
    cfg.n1 = 40;
    cfg.n2 = 30;
    cfg.reps = 60;
    cfg.seed = 5;
    cfg.noise = Noise::student_t(5);
    cfg.rules = parse_rules("optimal,sample,generalized,subgroup,componentwise,split_weighted,split_majority", 0, 2);
    return cfg;
}

// With z independent of (xbar, S) and normal data,
//   D1 = (1 + 1/n)(n - 1) X / Y,  X ~ chi2_p,  Y ~ chi2_{n-p}.
struct ExactClt {
    double mean;
    double variance;
};

ExactClt exact_clt(double p, double n) {
    const double k = (1.0 + 1.0 / n) * (n - 1.0);
    const double b = n - p;
    const double ratio_mean = p / (b - 2.0);
    const double ratio_var = p * (p + 2.0) / ((b - 2.0) * (b - 4.0)) - ratio_mean * ratio_mean;
    return {k * ratio_mean / std::sqrt(p) - std::sqrt(p) * n / (n - p), k * k * ratio_var / p};
}

}  // namespace

TEST_CASE("case constructions") {
    const auto c1 = make_case(CaseId::case1, 10, 1);
    CHECK((c1.sigma1.matrix() - Matrix::Identity(10, 10)).norm() == 0.0);
    CHECK((c1.sigma2.matrix() - 2.0 * Matrix::Identity(10, 10)).norm() == 0.0);
    CHECK(c1.mu1.norm() == 0.0);
    CHECK(c1.mu2.norm() == 0.0);

    const auto c5 = make_case(CaseId::case5, 100, 1);
    REQUIRE(is_diagonal(c5.sigma2.matrix()));
    for (Eigen::Index i = 0; i < 100; ++i) CHECK(c5.sigma2(i, i) == (i < 30 ? 4.0 : 1.0));
    CHECK((c5.sigma1.matrix() - Matrix::Identity(100, 100)).norm() == 0.0);

    const auto c6 = make_case(CaseId::case6, 50, 1);
    CHECK(c6.sigma2(20, 20) == 5.0);
    CHECK(c6.sigma2(21, 21) == 1.0);

    const auto c7 = make_case(CaseId::case7, 100, 9);
    REQUIRE(is_diagonal(c7.sigma2.matrix()));
    CHECK((c7.sigma2.matrix().diagonal().array() == 4.0).count() == 30);
    CHECK((c7.sigma2.matrix().diagonal().array() == 1.0).count() == 70);
    const auto c7b = make_case(CaseId::case7, 100, 10);
    CHECK((c7.sigma2.matrix() - c7b.sigma2.matrix()).norm() > 0.0);

    CHECK_THROWS_AS(make_case(CaseId::case1, 3, 1), ValidationError);
    CHECK_THROWS_AS(parse_case("8"), ValidationError);
    CHECK(parse_case("custom") == CaseId::custom);
    CHECK(hard_block_size(100) == 30);
    CHECK(hard_block_size(4) == 4);
}

TEST_CASE("cases 2-4 have the advertised spectra") {
    auto spectrum = [](const SpdMatrix& s) {
        return Eigen::SelfAdjointEigenSolver<Matrix>(s.matrix(), Eigen::EigenvaluesOnly).eigenvalues();
    };
    const auto c2 = make_case(CaseId::case2, 20, 1);
    CHECK(spectrum(c2.sigma1).minCoeff() > 0.0);
    for (CaseId id : {CaseId::case3, CaseId::case4}) {
        const auto c = make_case(id, 30, 3);
        const double lo = id == CaseId::case3 ? 1.5 : 2.5;
        const Vector ev = spectrum(c.sigma2);
        CHECK(ev.minCoeff() >= lo - 1e-9);
        CHECK(ev.maxCoeff() <= lo + 1.0 + 1e-9);
        CHECK((c.root2.matrix() * c.root2.matrix() - c.sigma2.matrix()).norm() <= 1e-9 * c.sigma2.matrix().norm());
        CHECK(case_is_random(id, MeanMode::equal));
    }
    CHECK_FALSE(case_is_random(CaseId::case1, MeanMode::equal));
    CHECK(case_is_random(CaseId::case1, MeanMode::uniform));
}

TEST_CASE("uniform mean mode") {
    const auto c = make_case(CaseId::case1, 50, 4, MeanMode::uniform);
    CHECK(c.mu1.norm() == 0.0);
    CHECK(c.mu2.cwiseAbs().maxCoeff() <= 0.6);
    CHECK(c.mu2.norm() > 0.0);
}

TEST_CASE("seeding is a pure function of (master, replication, stream)") {
    CHECK(stream_seed(1, 2, Stream::train1) == stream_seed(1, 2, Stream::train1));
    std::set<std::uint64_t> seen;
    for (std::uint64_t m = 0; m < 4; ++m) {
        for (std::uint64_t r = 0; r < 50; ++r) {
            for (Stream s : {Stream::train1, Stream::train2, Stream::test, Stream::case_randomness, Stream::oracle}) {
                seen.insert(stream_seed(m, r, s));
            }
        }
    }
    CHECK(seen.size() == 4 * 50 * 5);
    Rng a = make_rng(9, 3, Stream::test);
    Rng b = make_rng(9, 3, Stream::test);
    CHECK(a() == b());
}

TEST_CASE("standardized noise has unit variance and the right kurtosis") {
    for (Noise noise : {Noise::normal(), Noise::student_t(5), Noise::student_t(8)}) {
        Rng rng(51);
        const Matrix x = draw_standardized(10, 40000, noise, rng);
        const double n = static_cast<double>(x.size());
        const double mean = x.mean();
        const double var = x.array().square().sum() / n;
        CHECK(std::abs(mean) < 0.01);
        CHECK(var == doctest::Approx(1.0).epsilon(0.02));
        if (noise.kind == Noise::Kind::standard_normal) {
            CHECK(x.array().pow(4).sum() / n == doctest::Approx(3.0).epsilon(0.03));
        }
    }
    // t(8): m4 = 3 + 6/4 = 4.5, and its 8th moment is infinite, so only a loose check.
    Rng rng(52);
    const Matrix t8 = draw_standardized(10, 100000, Noise::student_t(8), rng);
    CHECK(t8.array().pow(4).mean() == doctest::Approx(Noise::student_t(8).fourth_moment()).epsilon(0.15));
}

TEST_CASE("draw_sample reproduces the population covariance") {
    Rng gen(53);
    const std::size_t p = 4;
    const PopulationSpec pop(random_vector(p, gen), random_spd(p, gen), Noise::normal());
    Rng rng(54);
    const DataMatrix x = draw_sample(pop, 50000, rng);
    CHECK((sample_mean(x) - pop.mu).norm() < 0.05);
    CHECK((sample_covariance(x).matrix() - pop.sigma.matrix()).norm() < 0.08 * pop.sigma.matrix().norm());

    // Diagonal fast path agrees with the dense path.
    Vector d(3);
    d << 1.0, 4.0, 9.0;
    const SpdMatrix diag = SpdMatrix::diagonal(d);
    Matrix dense = Matrix(d.cwiseSqrt().asDiagonal());
    dense(0, 1) = dense(1, 0) = 1e-300;  // defeats diagonal detection
    Matrix a = gaussian_matrix(3, 5, rng);
    Matrix b = a;
    AffineMap(sqrt_spd(diag), Vector::Ones(3)).apply(a);
    AffineMap(SpdMatrix(dense), Vector::Ones(3)).apply(b);
    CHECK((a - b).norm() <= 1e-12);
}

TEST_CASE("rule names and parsing") {
    CHECK(RuleSpec::parse("subgroup").name(100) == "subgroup(p0=30)");
    CHECK(RuleSpec::parse("componentwise", 7).name(100) == "componentwise(p0=7)");
    CHECK(RuleSpec::parse("weighted", 0, 5).name(100) == "split_weighted(H=5)");
    CHECK(RuleSpec::parse("majority", 0, 10).name(100) == "split_majority(H=10)");
    CHECK(parse_rules("optimal, sample ,generalized").size() == 3);
    CHECK_THROWS_AS(parse_rules("optimal,bogus"), ValidationError);
    CHECK_THROWS_AS(parse_rules(""), ValidationError);
}

TEST_CASE("Monte Carlo results are independent of the thread count") {
    SimulationConfig cfg = small_config();
    cfg.threads = 1;
    const auto one = run_monte_carlo(cfg);
    cfg.threads = 4;
    const auto four = run_monte_carlo(cfg);
    REQUIRE(one.size() == cfg.rules.size());
    CHECK(results_csv(cfg, one) == results_csv(cfg, four));
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].errors_2given1 == four[i].errors_2given1);
        CHECK(one[i].errors_1given2 == four[i].errors_1given2);
    }
}

TEST_CASE("adding a rule does not perturb another rule's estimate") {
    SimulationConfig cfg = small_config();
    const auto all = run_monte_carlo(cfg);
    cfg.rules = parse_rules("generalized");
    const auto alone = run_monte_carlo(cfg);
    CHECK(alone[0].rule == "generalized");
    CHECK(alone[0].errors_2given1 == all[2].errors_2given1);
    CHECK(alone[0].errors_1given2 == all[2].errors_1given2);
}

TEST_CASE("rate estimate bookkeeping") {
    SimulationConfig cfg = small_config();
    for (const auto& e : run_monte_carlo(cfg)) {
        CHECK(e.reps == cfg.reps);
        CHECK(e.p_2given1 == doctest::Approx(static_cast<double>(e.errors_2given1) / 60.0));
        CHECK(e.rate == doctest::Approx((e.p_2given1 + e.p_1given2) / 2.0));
        CHECK(e.std_err == doctest::Approx(std::sqrt(e.rate * (1.0 - e.rate) / 120.0)));
    }
}

TEST_CASE("results CSV format") {
    SimulationConfig cfg = small_config();
    cfg.rules = parse_rules("optimal,subgroup");
    const std::string csv = results_csv(cfg, run_monte_carlo(cfg));
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "case,rule,p,n1,n2,reps,seed,p_2given1,p_1given2,rate,std_err");
    std::getline(in, line);
    CHECK(line.rfind("2,optimal,8,40,30,60,5,", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("2,subgroup(p0=6),8,40,30,60,5,", 0) == 0);
    CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("configuration validation") {
    SimulationConfig cfg = small_config();
    cfg.reps = 0;
    CHECK_THROWS_AS(run_monte_carlo(cfg), ValidationError);
    cfg = small_config();
    cfg.n2 = 9;
    CHECK_THROWS_AS(run_monte_carlo(cfg), ValidationError);
    cfg = small_config();
    cfg.rules = parse_rules("split_weighted", 0, 5);
    CHECK_THROWS_WITH_AS(run_monte_carlo(cfg), doctest::Contains("split_weighted(H=5)"), ValidationError);
    cfg = small_config();
    cfg.case_id = CaseId::custom;
    CHECK_THROWS_AS(run_monte_carlo(cfg), ValidationError);
}

TEST_CASE("custom populations drive the simulation") {
    SimulationConfig cfg = small_config();
    cfg.case_id = CaseId::custom;
    cfg.custom = custom_case(Vector::Zero(8), Vector::Zero(8), SpdMatrix::identity(8), SpdMatrix::identity(8));
    cfg.rules = parse_rules("optimal");
    const auto est = run_monte_carlo(cfg);
    // Identical populations: the optimal discriminant is exactly zero, every
    // point goes to class 2.
    CHECK(est[0].p_2given1 == 1.0);
    CHECK(est[0].p_1given2 == 0.0);
    CHECK(est[0].rate == 0.5);
}

TEST_CASE("equal populations give rates near one half") {
    SimulationConfig cfg = small_config();
    cfg.case_id = CaseId::custom;
    Rng rng(55);
    const SpdMatrix s = random_spd(8, rng);
    cfg.custom = custom_case(Vector::Zero(8), Vector::Zero(8), s, s);
    cfg.reps = 800;
    cfg.rules = parse_rules("sample,generalized,componentwise");
    for (const auto& e : run_monte_carlo(cfg)) {
        CHECK(e.rate > 0.5 - 4.0 * 0.018);
        CHECK(e.rate < 0.5 + 4.0 * 0.018);
    }
}

TEST_CASE("diagonal limit oracle") {
    const Matrix id = Matrix::Identity(200, 200);
    CHECK(rmt_diag_target(200, 400, id) == doctest::Approx(4.0));
    CHECK(rmt_diag_target(200, 400, std::sqrt(2.0) * id) == doctest::Approx(16.0));
    CHECK(rmt_diag_oracle(200, 400, id, 20, 3) == doctest::Approx(4.0).epsilon(0.10));
    CHECK(rmt_diag_oracle(200, 400, std::sqrt(2.0) * id, 20, 3) == doctest::Approx(16.0).epsilon(0.10));
    CHECK(rmt_diag_oracle(20, 20000, Matrix::Identity(20, 20), 5, 3) == doctest::Approx(1.0).epsilon(0.05));
    CHECK_THROWS_AS(rmt_diag_oracle(20, 21, Matrix::Identity(20, 20), 5, 3), ValidationError);
}

TEST_CASE("quadratic-form statistic against its exact finite-sample law") {
    CHECK(clt_target_variance(250, 500, 3.0) == doctest::Approx(16.0));
    CHECK(clt_target_variance(100, 500, 3.0) == doctest::Approx(3.90625));
    CHECK(clt_target_variance(250, 500, 9.0) == doctest::Approx(40.0));

    const std::size_t p = 40;
    const std::size_t n = 100;
    const auto s = clt_check(p, n, Noise::normal(), 4000, 8);
    const ExactClt exact = exact_clt(static_cast<double>(p), static_cast<double>(n));
    CHECK(std::abs(s.mean - exact.mean) < 4.0 * s.std_err_mean);
    CHECK(s.variance == doctest::Approx(exact.variance).epsilon(0.10));
}

TEST_CASE("csv reader") {
    std::istringstream with_header("a,b\n1,2\n3.5,-4e-1\n");
    const auto t = read_numeric_csv(with_header, "mem");
    CHECK(t.cols == 2);
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    const DataMatrix x = to_data_matrix(t);
    CHECK(x.dim() == 2);
    CHECK(x.count() == 2);
    CHECK(x.columns()(1, 1) == doctest::Approx(-0.4));

    std::istringstream ragged("1,2\n3\n");
    CHECK_THROWS_WITH_AS(read_numeric_csv(ragged, "mem"), doctest::Contains("mem:2"), ValidationError);
    std::istringstream junk("1,2\n3,x\n");
    CHECK_THROWS_WITH_AS(read_numeric_csv(junk, "mem"), doctest::Contains("mem:2"), ValidationError);
}
