#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpt/estimate.hpp"
#include "qpt/metrics.hpp"
#include "qpt/pom.hpp"
#include "qpt/simulate.hpp"
#include "qpt/states.hpp"

namespace qpt {

enum class CampaignKind { bell, ensemble_average, single_state };
enum class Estimator { rd, ml };

const char* campaign_kind_label(CampaignKind k);
CampaignKind campaign_kind_from_label(const std::string& s);
const char* estimator_label(Estimator e);
Estimator estimator_from_label(const std::string& s);

struct CampaignConfig {
    CampaignKind kind = CampaignKind::bell;
    EnsembleSpec ensemble{};
    std::vector<long long> n_grid = default_n_grid();
    int runs_per_point = 100;
    int n_states = 100;  // ensemble_average only
    std::vector<Estimator> estimators{Estimator::rd, Estimator::ml};
    std::vector<PomKind> poms{PomKind::product, PomKind::sic};
    double d_thr = 0.1;
    std::uint64_t master_seed = 0;
    MlConfig ml{};
    // Execution: campaign runs are independent; the parallel path distributes
    // them over OpenMP threads, the serial path is the reference used by tests
    // and the benchmark. Results are identical byte for byte.
    bool parallel = true;
    int threads = 0;  // 0 keeps the OpenMP default
    bool keep_raw_runs = false;
    double biased_target_purity = 0.8;  // biased_mixed calibration target
    double biased_confidence = 0.9;
    double max_ml_exclusion_fraction = 0.01;

    static std::vector<long long> default_n_grid();  // 250, 500, ..., 6000
    void validate() const;
};

struct PointStat {
    long long n = 0;
    double d_avg = 0.0;
    double d_sd = 0.0;
    int runs = 0;            // runs included in the average
    int rd_unphysical = 0;   // rd series only
    int ml_nonconverged = 0; // ml series only (excluded from the average)
};

struct StateSeries {
    int state_index = 0;
    std::string state_label;
    PomKind pom = PomKind::product;
    Estimator estimator = Estimator::rd;
    std::vector<PointStat> points;
    PowerLawFit fit{};
    double n_thr = 0.0;
};

struct EtaRow {
    int state_index = 0;
    std::string state_label;
    Estimator estimator = Estimator::rd;
    EtaReport report{};
};

struct Aggregate {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation over states
    int count = 0;
};

struct NthrAggregate {
    PomKind pom = PomKind::product;
    Estimator estimator = Estimator::rd;
    Aggregate agg{};
};

struct EtaAggregate {
    Estimator estimator = Estimator::rd;
    Aggregate agg{};
};

struct RawRun {
    int state_index = 0;
    PomKind pom = PomKind::product;
    Estimator estimator = Estimator::rd;
    long long n = 0;
    int run = 0;
    double distance = 0.0;
    bool rd_physical = false;
    int ml_iterations = 0;
    bool ml_converged = false;
};

struct CampaignResult {
    CampaignConfig config;
    std::vector<std::string> state_labels;
    std::vector<StateSeries> series;  // state-major, then poms, then estimators in config order
    std::vector<EtaRow> etas;         // present when both POM kinds ran
    std::vector<NthrAggregate> n_thr_aggregates;
    std::vector<EtaAggregate> eta_aggregates;
    std::vector<RawRun> raw_runs;  // only when config.keep_raw_runs
    long long ml_runs_total = 0;
    long long ml_runs_excluded = 0;
    std::string code_version;

    const StateSeries& find_series(int state_index, PomKind pom, Estimator est) const;
    const Aggregate& n_thr_aggregate(PomKind pom, Estimator est) const;
    const Aggregate& eta_aggregate(Estimator est) const;
};

/// The true states a campaign runs on, in campaign order. Exposed so tests
/// can score results against the exact inputs.
std::vector<DensityMatrix> campaign_states(const CampaignConfig& cfg, std::vector<std::string>* labels = nullptr);

CampaignResult run_campaign(const CampaignConfig& cfg);
CampaignResult run_bell_campaign(CampaignConfig cfg);
CampaignResult run_ensemble_campaign(CampaignConfig cfg);

// --- file formats -----------------------------------------------------------

std::string fig1_points_csv(const CampaignResult& result);
std::string fig1_fits_csv(const CampaignResult& result);
std::string eta_csv(const CampaignResult& result);
std::string raw_runs_csv(const CampaignResult& result);
std::string table_summary_json(const CampaignResult& result);
std::string provenance_json(const CampaignResult& result);  // carries a timestamp; not determinism-checked

std::string config_to_json(const CampaignConfig& cfg);
CampaignConfig config_from_json(const std::string& text);
CampaignConfig load_config_file(const std::string& path);

/// Writes every campaign artifact (points/fits/eta CSVs, table summary for
/// ensemble campaigns, POM provenance, raw runs when kept) into out_dir.
void write_campaign_outputs(const CampaignResult& result, const std::string& out_dir);

}  // namespace qpt
