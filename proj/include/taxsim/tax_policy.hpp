#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "taxsim/economy.hpp"
#include "taxsim/llm_gateway.hpp"

namespace taxsim {

enum class TaxSystem { free_market, us_federal, saez, tax_agent };

TaxSystem parse_tax_system(std::string_view text);  // "free", "us_federal", "saez", "tax_agent"
std::string_view to_string(TaxSystem system);

/// What the government sees when it resets rates. Histories are indexed by
/// month, starting with a month-0 entry.
struct PolicyObservation {
    std::size_t month = 0;
    std::vector<double> incomes;  // last month's pre-tax incomes, 0 for non-workers
    std::vector<double> wealth;
    std::vector<TaxSchedule> schedule_history;
    std::vector<double> productivity_history;
    std::vector<double> equality_history;
};

// --- Saez optimal rates ---------------------------------------------------

enum class DensityEstimator { histogram, gaussian_kernel };

struct SaezParams {
    double elasticity = 0.25;          // e, also used as the uncompensated elasticity
    double density_bandwidth = 1000.0;  // only used by the kernel estimator
    double tail_threshold = kBracketThresholds.back();
    DensityEstimator density = DensityEstimator::histogram;

    void validate() const;
};

class TailEmptyError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// a = zbar / (zbar - z*) where zbar is the mean income above z*.
/// Throws TailEmptyError when no income exceeds z*.
double pareto_parameter(std::span<const double> incomes, double tail_threshold);

/// 1 / (1 + a * elasticity).
double top_rate(double pareto_a, double elasticity);

/// ((1 - G) + e z g) / (1 + e g), clamped to [0, 1].
double marginal_rate(double cdf, double density, double elasticity, double income);

/// Seven-bracket schedule from the current income distribution. Brackets
/// below the top are evaluated at their midpoint using the empirical CDF and
/// the configured density estimate over positive incomes; the top bracket
/// uses the Pareto formula with z* = params.tail_threshold (by default the
/// top bracket's lower threshold). If the tail is empty the top rate is
/// `previous_top_rate`. A degenerate distribution (all positive incomes
/// equal) falls back to 1 - G(z) everywhere.
///
/// Throws std::invalid_argument with fewer than two positive incomes.
TaxSchedule saez_schedule(std::span<const double> incomes, std::span<const double> thresholds,
                          const SaezParams& params, double previous_top_rate);

// --- LLM planner ------------------------------------------------------------

struct TaxAgentConfig {
    std::string model_id = "qwen-turbo-2024-09-19";
    double temperature = 0.2;
    int max_tokens = 256;
    int max_retries = 3;

    void validate() const;
};

class TaxReplyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string build_tax_prompt(const PolicyObservation& observation,
                             std::span<const double> thresholds);

/// First bracketed list of exactly seven numbers in `reply`; values are
/// clamped to [0, 1] and rounded half-up to the 0.01 grid.
std::vector<double> parse_tax_reply(std::string_view reply);

// --- Policies ---------------------------------------------------------------

class TaxPolicy {
public:
    virtual ~TaxPolicy() = default;

    /// A schedule over kBracketThresholds; never throws for well-formed
    /// observations except on fatal gateway errors.
    virtual TaxSchedule propose(const PolicyObservation& observation) = 0;

    [[nodiscard]] virtual TaxSystem system() const = 0;

    /// Times the policy kept the previous schedule because it could not
    /// produce a new one.
    [[nodiscard]] std::size_t fallback_count() const { return fallbacks_; }

protected:
    static const TaxSchedule& previous_schedule(const PolicyObservation& observation);
    std::size_t fallbacks_ = 0;
};

class FreeMarketPolicy final : public TaxPolicy {
public:
    TaxSchedule propose(const PolicyObservation&) override { return TaxSchedule::zero(); }
    [[nodiscard]] TaxSystem system() const override { return TaxSystem::free_market; }
};

class UsFederalPolicy final : public TaxPolicy {
public:
    TaxSchedule propose(const PolicyObservation&) override { return TaxSchedule::us_federal(); }
    [[nodiscard]] TaxSystem system() const override { return TaxSystem::us_federal; }
};

class SaezPolicy final : public TaxPolicy {
public:
    explicit SaezPolicy(SaezParams params);
    TaxSchedule propose(const PolicyObservation& observation) override;
    [[nodiscard]] TaxSystem system() const override { return TaxSystem::saez; }

private:
    SaezParams params_;
};

class TaxAgentPolicy final : public TaxPolicy {
public:
    TaxAgentPolicy(ChatGateway& gateway, TaxAgentConfig config);
    TaxSchedule propose(const PolicyObservation& observation) override;
    [[nodiscard]] TaxSystem system() const override { return TaxSystem::tax_agent; }

private:
    ChatGateway& gateway_;
    TaxAgentConfig config_;
};

/// `gateway` may be null unless `system` is tax_agent.
std::unique_ptr<TaxPolicy> make_policy(TaxSystem system, const SaezParams& saez,
                                       const TaxAgentConfig& agent, ChatGateway* gateway);

}  // namespace taxsim
