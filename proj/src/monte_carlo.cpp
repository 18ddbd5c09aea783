#include "mdqda/monte_carlo.hpp"

#include "mdqda/dnc.hpp"
#include "mdqda/sampling.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace mdqda {

namespace {

using Kind = RuleSpec::Kind;

std::size_t resolve_p0(const RuleSpec& r, std::size_t p) { return r.param == 0 ? default_p0(p) : r.param; }

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Counts {
    std::vector<std::size_t> e21;
    std::vector<std::size_t> e12;
};

// Everything a replication needs from the (possibly redrawn) case.
struct CaseState {
    CovarianceCase c;
    AffineMap map1;
    AffineMap map2;
    std::optional<OptimalQda> optimal;

    CaseState(CovarianceCase cc, const Noise& noise, bool need_optimal)
        : c(std::move(cc)), map1(c.root1, c.mu1), map2(c.root2, c.mu2) {
        if (need_optimal) optimal.emplace(c.population1(noise), c.population2(noise));
    }
};

class Replicator {
public:
    explicit Replicator(const SimulationConfig& cfg) : cfg_(cfg) {
        for (const auto& r : cfg.rules) {
            need_optimal_ |= r.kind == Kind::optimal;
            need_plain_ |= r.kind == Kind::sample || r.kind == Kind::generalized;
        }
        if (!case_is_random(cfg.case_id, cfg.mean_mode)) fixed_.emplace(build_case(0), cfg.noise, need_optimal_);
    }

    // Adds this replication's errors into `counts`.
    void run(std::size_t rep, Counts& counts) const {
        std::optional<CaseState> local;
        if (!fixed_) local.emplace(build_case(rep), cfg_.noise, need_optimal_);
        const CaseState& cs = fixed_ ? *fixed_ : *local;

        Rng rng1 = make_rng(cfg_.seed, rep, Stream::train1);
        Rng rng2 = make_rng(cfg_.seed, rep, Stream::train2);
        Rng rngt = make_rng(cfg_.seed, rep, Stream::test);
        const DataMatrix train1 = draw_sample(cs.map1, cfg_.noise, cfg_.n1, rng1);
        const DataMatrix train2 = draw_sample(cs.map2, cfg_.noise, cfg_.n2, rng2);
        const Vector z1 = draw_sample(cs.map1, cfg_.noise, 1, rngt).columns().col(0);
        const Vector z2 = draw_sample(cs.map2, cfg_.noise, 1, rngt).columns().col(0);

        std::optional<FittedQda> generalized;
        std::optional<FittedQda> sample;
        if (need_plain_) {
            auto constants = correction_constants(cfg_.p, cfg_.n1, cfg_.n2);
            ClassFit f1 = fit_class(train1, 1);
            ClassFit f2 = fit_class(train2, 2);
            sample.emplace(f1, f2, constants, Variant::sample);
            generalized.emplace(std::move(f1), std::move(f2), constants, Variant::generalized);
        }

        for (std::size_t r = 0; r < cfg_.rules.size(); ++r) {
            const RuleSpec& rule = cfg_.rules[r];
            ClassLabel l1 = ClassLabel::class1;
            ClassLabel l2 = ClassLabel::class2;
            switch (rule.kind) {
                case Kind::optimal:
                    l1 = cs.optimal->classify(z1);
                    l2 = cs.optimal->classify(z2);
                    break;
                case Kind::sample:
                    l1 = sample->classify(z1);
                    l2 = sample->classify(z2);
                    break;
                case Kind::generalized:
                    l1 = generalized->classify(z1);
                    l2 = generalized->classify(z2);
                    break;
                case Kind::subgroup: {
                    const SubgroupScreen s(train1, train2, resolve_p0(rule, cfg_.p));
                    l1 = s.classify(z1).label;
                    l2 = s.classify(z2).label;
                    break;
                }
                case Kind::componentwise: {
                    const ComponentwiseScreen s(train1, train2, resolve_p0(rule, cfg_.p));
                    l1 = s.classify(z1).label;
                    l2 = s.classify(z2).label;
                    break;
                }
                case Kind::split_weighted:
                case Kind::split_majority: {
                    const SampleSplitQda s(train1, train2, rule.param);
                    const bool weighted = rule.kind == Kind::split_weighted;
                    l1 = weighted ? s.classify_weighted(z1) : s.classify_majority(z1);
                    l2 = weighted ? s.classify_weighted(z2) : s.classify_majority(z2);
                    break;
                }
            }
            counts.e21[r] += l1 != ClassLabel::class1;
            counts.e12[r] += l2 != ClassLabel::class2;
        }
    }

private:
    CovarianceCase build_case(std::size_t rep) const {
        if (cfg_.case_id == CaseId::custom) return *cfg_.custom;
        Rng rng = make_rng(cfg_.seed, rep, Stream::case_randomness);
        return make_case(cfg_.case_id, cfg_.p, rng, cfg_.mean_mode, cfg_.n1);
    }

    const SimulationConfig& cfg_;
    bool need_optimal_ = false;
    bool need_plain_ = false;
    std::optional<CaseState> fixed_;
};

}  // namespace

std::string RuleSpec::name(std::size_t p) const {
    switch (kind) {
        case Kind::optimal: return "optimal";
        case Kind::sample: return "sample";
        case Kind::generalized: return "generalized";
        case Kind::subgroup: return "subgroup(p0=" + std::to_string(resolve_p0(*this, p)) + ")";
        case Kind::componentwise: return "componentwise(p0=" + std::to_string(resolve_p0(*this, p)) + ")";
        case Kind::split_weighted: return "split_weighted(H=" + std::to_string(param) + ")";
        case Kind::split_majority: return "split_majority(H=" + std::to_string(param) + ")";
    }
    return "unknown";
}

RuleSpec RuleSpec::parse(std::string_view text, std::size_t p0, std::size_t groups) {
    if (text == "optimal") return {Kind::optimal, 0};
    if (text == "sample") return {Kind::sample, 0};
    if (text == "generalized") return {Kind::generalized, 0};
    if (text == "subgroup") return {Kind::subgroup, p0};
    if (text == "componentwise") return {Kind::componentwise, p0};
    if (text == "split_weighted" || text == "weighted") return {Kind::split_weighted, groups};
    if (text == "split_majority" || text == "majority") return {Kind::split_majority, groups};
    throw ValidationError("unknown rule '" + std::string(text) + "'");
}

std::vector<RuleSpec> parse_rules(std::string_view list, std::size_t p0, std::size_t groups) {
    std::vector<RuleSpec> out;
    while (!list.empty()) {
        const auto comma = list.find(',');
        auto item = list.substr(0, comma);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
        if (!item.empty()) out.push_back(RuleSpec::parse(item, p0, groups));
        if (comma == std::string_view::npos) break;
        list.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ValidationError("no rules given");
    return out;
}

void validate(const SimulationConfig& cfg) {
    if (cfg.reps == 0) throw ValidationError("reps must be at least 1");
    if (cfg.rules.empty()) throw ValidationError("no rules given");
    if (cfg.case_id == CaseId::custom) {
        if (!cfg.custom) throw ValidationError("custom case requested without populations");
        if (cfg.custom->p != cfg.p) throw ValidationError("custom case dimension differs from p");
    } else if (cfg.p < 4) {
        throw ValidationError("cases need p >= 4");
    }
    for (const auto& r : cfg.rules) {
        if (!r.needs_fit()) continue;
        if (cfg.p + 1 >= std::min(cfg.n1, cfg.n2)) {
            throw ValidationError("rule " + r.name(cfg.p) + " needs p < min(n1, n2) - 1 (p=" + std::to_string(cfg.p) +
                                  ", n1=" + std::to_string(cfg.n1) + ", n2=" + std::to_string(cfg.n2) + ")");
        }
        switch (r.kind) {
            case Kind::subgroup:
            case Kind::componentwise:
                if (resolve_p0(r, cfg.p) > cfg.p) throw ValidationError("p0 exceeds p");
                break;
            case Kind::split_weighted:
            case Kind::split_majority:
                try {
                    (void)make_split_plan(cfg.p, cfg.n1, cfg.n2, r.param);
                } catch (const ValidationError& e) {
                    throw ValidationError("rule " + r.name(cfg.p) + ": " + e.what());
                }
                break;
            default: break;
        }
    }
}

std::vector<RateEstimate> run_monte_carlo(const SimulationConfig& cfg) {
    validate(cfg);
    const std::size_t nrules = cfg.rules.size();
    const Replicator replicator(cfg);

    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.reps)));
    std::vector<Counts> partial(workers, Counts{std::vector<std::size_t>(nrules, 0), std::vector<std::size_t>(nrules, 0)});
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex failure_mutex;
    std::size_t failed_rep = std::numeric_limits<std::size_t>::max();
    std::string failure_message;

    auto work = [&](unsigned w) {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= cfg.reps) return;
            try {
                replicator.run(rep, partial[w]);
            } catch (const std::exception& e) {
                std::lock_guard lock(failure_mutex);
                if (rep < failed_rep) {
                    failed_rep = rep;
                    failure_message = e.what();
                }
                failed.store(true);
            }
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    if (failed) throw ReplicationError(failed_rep, failure_message);

    std::vector<RateEstimate> out;
    out.reserve(nrules);
    const double reps = static_cast<double>(cfg.reps);
    for (std::size_t r = 0; r < nrules; ++r) {
        RateEstimate est;
        est.rule = cfg.rules[r].name(cfg.p);
        for (const auto& c : partial) {
            est.errors_2given1 += c.e21[r];
            est.errors_1given2 += c.e12[r];
        }
        est.p_2given1 = static_cast<double>(est.errors_2given1) / reps;
        est.p_1given2 = static_cast<double>(est.errors_1given2) / reps;
        est.rate = 0.5 * (est.p_2given1 + est.p_1given2);
        est.std_err = std::sqrt(est.rate * (1.0 - est.rate) / (2.0 * reps));
        est.reps = cfg.reps;
        est.seed = cfg.seed;
        out.push_back(std::move(est));
    }
    return out;
}

std::string results_csv_row(const SimulationConfig& cfg, const RateEstimate& est) {
    std::ostringstream row;
    row << case_name(cfg.case_id) << ',' << est.rule << ',' << cfg.p << ',' << cfg.n1 << ',' << cfg.n2 << ','
        << est.reps << ',' << est.seed << ',' << fmt6(est.p_2given1) << ',' << fmt6(est.p_1given2) << ','
        << fmt6(est.rate) << ',' << fmt6(est.std_err);
    return row.str();
}

std::string results_csv(const SimulationConfig& cfg, const std::vector<RateEstimate>& estimates) {
    std::string out(kResultsCsvHeader);
    out += '\n';
    for (const auto& e : estimates) {
        out += results_csv_row(cfg, e);
        out += '\n';
    }
    return out;
}

}  // namespace mdqda
