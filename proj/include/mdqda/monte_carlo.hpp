#pragma once

// Monte Carlo misclassification harness. Each replication draws fresh
// training sets and one test point per class from streams seeded by
// (seed, replication); all configured rules are scored on the same data.

#include "mdqda/cases.hpp"
#include "mdqda/error.hpp"
#include "mdqda/qda.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mdqda {

struct RuleSpec {
    enum class Kind { optimal, sample, generalized, subgroup, componentwise, split_weighted, split_majority };

    Kind kind = Kind::generalized;
    // p0 for the screening rules (0 = 3 floor(sqrt p)), H for the split rules.
    std::size_t param = 0;

    bool needs_fit() const noexcept { return kind != Kind::optimal; }
    // e.g. "generalized", "subgroup(p0=30)", "split_weighted(H=5)"; p is used
    // to resolve an automatic p0.
    std::string name(std::size_t p) const;

    // Parses a single name; `p0` and `groups` fill in parameters.
    static RuleSpec parse(std::string_view text, std::size_t p0 = 0, std::size_t groups = 2);
};

// Comma-separated list of rule names.
std::vector<RuleSpec> parse_rules(std::string_view list, std::size_t p0 = 0, std::size_t groups = 2);

struct SimulationConfig {
    CaseId case_id = CaseId::case1;
    std::size_t p = 0;
    MeanMode mean_mode = MeanMode::equal;
    std::optional<CovarianceCase> custom;  // required when case_id == custom
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::size_t reps = 1;
    std::uint64_t seed = 0;
    std::vector<RuleSpec> rules;
    Noise noise = Noise::normal();
    unsigned threads = 1;
};

// Throws ValidationError describing the first problem found.
void validate(const SimulationConfig& cfg);

struct RateEstimate {
    std::string rule;
    std::size_t errors_2given1 = 0;
    std::size_t errors_1given2 = 0;
    double p_2given1 = 0.0;
    double p_1given2 = 0.0;
    double rate = 0.0;     // (p_2given1 + p_1given2) / 2
    double std_err = 0.0;  // sqrt(rate (1 - rate) / (2 reps))
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

class ReplicationError : public NumericalError {
public:
    ReplicationError(std::size_t replication, const std::string& what)
        : NumericalError("replication " + std::to_string(replication) + ": " + what), replication_(replication) {}
    std::size_t replication() const noexcept { return replication_; }

private:
    std::size_t replication_;
};

std::vector<RateEstimate> run_monte_carlo(const SimulationConfig& cfg);

inline constexpr std::string_view kResultsCsvHeader = "case,rule,p,n1,n2,reps,seed,p_2given1,p_1given2,rate,std_err";
std::string results_csv_row(const SimulationConfig& cfg, const RateEstimate& est);
std::string results_csv(const SimulationConfig& cfg, const std::vector<RateEstimate>& estimates);

}  // namespace mdqda
