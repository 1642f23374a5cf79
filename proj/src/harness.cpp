#include "qpt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qpt/rng.hpp"

#ifdef QPT_HAVE_OPENMP
#include <omp.h>
#endif

namespace qpt {

const char* campaign_kind_label(CampaignKind k) {
    switch (k) {
        case CampaignKind::bell: return "bell";
        case CampaignKind::ensemble_average: return "ensemble_average";
        case CampaignKind::single_state: return "single_state";
    }
    return "?";
}

CampaignKind campaign_kind_from_label(const std::string& s) {
    if (s == "bell") return CampaignKind::bell;
    if (s == "ensemble_average") return CampaignKind::ensemble_average;
    if (s == "single_state") return CampaignKind::single_state;
    throw std::invalid_argument("unknown campaign kind: " + s);
}

const char* estimator_label(Estimator e) {
    return e == Estimator::rd ? "rd" : "ml";
}

Estimator estimator_from_label(const std::string& s) {
    if (s == "rd") return Estimator::rd;
    if (s == "ml") return Estimator::ml;
    throw std::invalid_argument("unknown estimator: " + s);
}

std::vector<long long> CampaignConfig::default_n_grid() {
    std::vector<long long> grid;
    for (long long n = 250; n <= 6000; n += 250) grid.push_back(n);
    return grid;
}

void CampaignConfig::validate() const {
    if (n_grid.size() < 3) throw std::invalid_argument("config: n_grid needs at least 3 points");
    long long prev = 0;
    for (long long n : n_grid) {
        if (n < 16) throw std::invalid_argument("config: n_grid entries must be >= 16");
        if (n <= prev) throw std::invalid_argument("config: n_grid must be strictly increasing");
        prev = n;
    }
    if (runs_per_point < 1) throw std::invalid_argument("config: runs_per_point must be >= 1");
    if (n_states < 1) throw std::invalid_argument("config: n_states must be >= 1");
    if (estimators.empty()) throw std::invalid_argument("config: no estimators selected");
    if (poms.empty()) throw std::invalid_argument("config: no POMs selected");
    if (!(d_thr > 0.0)) throw std::invalid_argument("config: d_thr must be positive");
    if (!(max_ml_exclusion_fraction >= 0.0)) throw std::invalid_argument("config: bad exclusion cap");
}

const StateSeries& CampaignResult::find_series(int state_index, PomKind pom, Estimator est) const {
    for (const StateSeries& s : series)
        if (s.state_index == state_index && s.pom == pom && s.estimator == est) return s;
    throw std::out_of_range("CampaignResult: no such series");
}

const Aggregate& CampaignResult::n_thr_aggregate(PomKind pom, Estimator est) const {
    for (const NthrAggregate& a : n_thr_aggregates)
        if (a.pom == pom && a.estimator == est) return a.agg;
    throw std::out_of_range("CampaignResult: no such n_thr aggregate");
}

const Aggregate& CampaignResult::eta_aggregate(Estimator est) const {
    for (const EtaAggregate& a : eta_aggregates)
        if (a.estimator == est) return a.agg;
    throw std::out_of_range("CampaignResult: no such eta aggregate");
}

namespace {

constexpr const char* kVersion = "qpt 1.0.0";

// Seed-path tags so that distinct sampling purposes never share a stream.
constexpr std::uint64_t kTagState = 0x5741;
constexpr std::uint64_t kTagCalibration = 0xCA11;
constexpr std::uint64_t kTagRun = 0x0C11C;

std::string indexed_label(int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "state_%03d", i);
    return buf;
}

Aggregate aggregate_of(const std::vector<double>& xs) {
    Aggregate a;
    a.count = static_cast<int>(xs.size());
    if (xs.empty()) return a;
    double s = 0.0;
    for (double x : xs) s += x;
    a.mean = s / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - a.mean) * (x - a.mean);
        a.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return a;
}

struct RunOutcome {
    double rd_distance = 0.0;
    double ml_distance = 0.0;
    bool rd_physical = false;
    bool ml_converged = false;
    int ml_iterations = 0;
};

}  // namespace

std::vector<DensityMatrix> campaign_states(const CampaignConfig& cfg, std::vector<std::string>* labels) {
    std::vector<DensityMatrix> states;
    std::vector<std::string> names;

    if (cfg.kind == CampaignKind::bell) {
        for (BellState b : {BellState::psi_minus, BellState::phi_minus, BellState::phi_plus, BellState::psi_plus}) {
            states.push_back(bell_state(b));
            names.push_back(bell_label(b));
        }
    } else {
        EnsembleSpec spec = cfg.ensemble;
        if (spec.kind == EnsembleKind::biased_mixed && spec.mean.max_abs() == 0.0) {
            RngStream cal_rng(derive_seed(cfg.master_seed, kTagCalibration, spec.seed));
            spec.mean = calibrate_biased_mean(cfg.biased_target_purity, cfg.biased_confidence, cal_rng);
        }
        const int count = cfg.kind == CampaignKind::single_state ? 1 : cfg.n_states;
        for (int i = 0; i < count; ++i) {
            RngStream rng(derive_seed(cfg.master_seed, kTagState, spec.seed, static_cast<std::uint64_t>(i)));
            states.push_back(random_state(spec, rng));
            names.push_back(count == 1 ? std::string("state_000") : indexed_label(i));
        }
    }
    if (labels) *labels = names;
    return states;
}

CampaignResult run_campaign(const CampaignConfig& cfg) {
    cfg.validate();

    CampaignResult result;
    result.config = cfg;
    result.code_version = kVersion;

    const std::vector<DensityMatrix> states = campaign_states(cfg, &result.state_labels);

    std::vector<Pom> poms;
    poms.reserve(cfg.poms.size());
    for (PomKind k : cfg.poms) poms.push_back(k == PomKind::product ? product_pom() : sic_pom());

    const bool want_rd = std::find(cfg.estimators.begin(), cfg.estimators.end(), Estimator::rd) != cfg.estimators.end();
    const bool want_ml = std::find(cfg.estimators.begin(), cfg.estimators.end(), Estimator::ml) != cfg.estimators.end();

    const int n_states = static_cast<int>(states.size());
    const int n_poms = static_cast<int>(poms.size());
    const int n_points = static_cast<int>(cfg.n_grid.size());
    const int runs = cfg.runs_per_point;
    const long long n_chunks = static_cast<long long>(n_states) * n_poms * n_points;
    std::vector<RunOutcome> outcomes(static_cast<std::size_t>(n_chunks) * static_cast<std::size_t>(runs));

    // One chunk per (state, POM, N); every run inside derives its stream from
    // the campaign seed and its own indices, so results do not depend on the
    // execution order or thread count.
    auto execute_chunk = [&](long long chunk) {
        const int s = static_cast<int>(chunk / (n_poms * n_points));
        const int rem = static_cast<int>(chunk % (n_poms * n_points));
        const int pi = rem / n_points;
        const int ni = rem % n_points;
        const Pom& pom = poms[pi];
        const DensityMatrix& rho = states[s];
        const long long n = cfg.n_grid[ni];
        const std::uint64_t pom_tag = pom.kind == PomKind::product ? 0u : 1u;
        RunOutcome* out = &outcomes[static_cast<std::size_t>(chunk) * static_cast<std::size_t>(runs)];
        for (int r = 0; r < runs; ++r) {
            const std::uint64_t seed = derive_seed(cfg.master_seed, kTagRun ^ (pom_tag << 32),
                                                   static_cast<std::uint64_t>(s),
                                                   static_cast<std::uint64_t>(n),
                                                   static_cast<std::uint64_t>(r));
            const ClickRecord rec = simulate_clicks(pom, rho, n, seed);
            const FrequencyVector f = frequencies(rec);
            RunOutcome& o = out[r];
            if (want_rd) {
                const RdEstimate rd = rd_estimate(pom, f);
                o.rd_distance = trace_distance(rd.matrix, rho.matrix());
                o.rd_physical = rd.physical;
            }
            if (want_ml) {
                const MlResult ml = ml_estimate(pom, f, n, cfg.ml);
                o.ml_distance = trace_distance(ml.estimate.matrix(), rho.matrix());
                o.ml_converged = ml.converged;
                o.ml_iterations = ml.iterations;
            }
        }
    };

    if (cfg.parallel) {
#ifdef QPT_HAVE_OPENMP
        if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#pragma omp parallel for schedule(dynamic)
        for (long long chunk = 0; chunk < n_chunks; ++chunk) execute_chunk(chunk);
#else
        for (long long chunk = 0; chunk < n_chunks; ++chunk) execute_chunk(chunk);
#endif
    } else {
        for (long long chunk = 0; chunk < n_chunks; ++chunk) execute_chunk(chunk);
    }

    // Serial aggregation in a fixed order so output files are byte-identical
    // for a given config and master seed.
    if (want_ml) {
        result.ml_runs_total = n_chunks * runs;
        for (const RunOutcome& o : outcomes)
            if (!o.ml_converged) ++result.ml_runs_excluded;
        const double frac = static_cast<double>(result.ml_runs_excluded) / static_cast<double>(result.ml_runs_total);
        if (result.ml_runs_excluded > 0)
            std::fprintf(stderr, "warning: %lld of %lld ML runs did not converge and are excluded\n",
                         result.ml_runs_excluded, result.ml_runs_total);
        if (frac > cfg.max_ml_exclusion_fraction)
            throw std::runtime_error("campaign failed: ML non-convergence above the exclusion cap");
    }

    auto outcome_at = [&](int s, int pi, int ni, int r) -> const RunOutcome& {
        const long long chunk = (static_cast<long long>(s) * n_poms + pi) * n_points + ni;
        return outcomes[static_cast<std::size_t>(chunk) * static_cast<std::size_t>(runs) + static_cast<std::size_t>(r)];
    };

    for (int s = 0; s < n_states; ++s) {
        for (int pi = 0; pi < n_poms; ++pi) {
            for (Estimator est : cfg.estimators) {
                StateSeries series;
                series.state_index = s;
                series.state_label = result.state_labels[s];
                series.pom = cfg.poms[pi];
                series.estimator = est;
                std::vector<std::pair<long long, double>> fit_points;
                for (int ni = 0; ni < n_points; ++ni) {
                    PointStat pt;
                    pt.n = cfg.n_grid[ni];
                    std::vector<double> ds;
                    ds.reserve(static_cast<std::size_t>(runs));
                    for (int r = 0; r < runs; ++r) {
                        const RunOutcome& o = outcome_at(s, pi, ni, r);
                        if (est == Estimator::rd) {
                            ds.push_back(o.rd_distance);
                            if (!o.rd_physical) ++pt.rd_unphysical;
                        } else {
                            if (!o.ml_converged) {
                                ++pt.ml_nonconverged;
                                continue;
                            }
                            ds.push_back(o.ml_distance);
                        }
                    }
                    if (ds.empty())
                        throw std::runtime_error("campaign failed: no converged runs at a grid point");
                    const Aggregate a = aggregate_of(ds);
                    pt.d_avg = a.mean;
                    pt.d_sd = a.sd;
                    pt.runs = a.count;
                    fit_points.emplace_back(pt.n, pt.d_avg);
                    series.points.push_back(pt);
                }
                series.fit = fit_power_law(fit_points);
                series.n_thr = n_to_threshold(series.fit, cfg.d_thr);
                result.series.push_back(std::move(series));
            }
        }
    }

    const bool has_prod = std::find(cfg.poms.begin(), cfg.poms.end(), PomKind::product) != cfg.poms.end();
    const bool has_sic = std::find(cfg.poms.begin(), cfg.poms.end(), PomKind::sic) != cfg.poms.end();
    if (has_prod && has_sic) {
        for (int s = 0; s < n_states; ++s)
            for (Estimator est : cfg.estimators) {
                EtaRow row;
                row.state_index = s;
                row.state_label = result.state_labels[s];
                row.estimator = est;
                row.report = eta(result.find_series(s, PomKind::product, est).fit,
                                 result.find_series(s, PomKind::sic, est).fit, cfg.d_thr);
                result.etas.push_back(row);
            }
    }

    for (PomKind pom : cfg.poms)
        for (Estimator est : cfg.estimators) {
            std::vector<double> xs;
            for (int s = 0; s < n_states; ++s) xs.push_back(result.find_series(s, pom, est).n_thr);
            result.n_thr_aggregates.push_back({pom, est, aggregate_of(xs)});
        }
    if (has_prod && has_sic)
        for (Estimator est : cfg.estimators) {
            std::vector<double> xs;
            for (const EtaRow& row : result.etas)
                if (row.estimator == est) xs.push_back(row.report.eta);
            result.eta_aggregates.push_back({est, aggregate_of(xs)});
        }

    if (cfg.keep_raw_runs) {
        for (int s = 0; s < n_states; ++s)
            for (int pi = 0; pi < n_poms; ++pi)
                for (Estimator est : cfg.estimators)
                    for (int ni = 0; ni < n_points; ++ni)
                        for (int r = 0; r < runs; ++r) {
                            const RunOutcome& o = outcome_at(s, pi, ni, r);
                            RawRun raw;
                            raw.state_index = s;
                            raw.pom = cfg.poms[pi];
                            raw.estimator = est;
                            raw.n = cfg.n_grid[ni];
                            raw.run = r;
                            raw.distance = est == Estimator::rd ? o.rd_distance : o.ml_distance;
                            raw.rd_physical = o.rd_physical;
                            raw.ml_iterations = o.ml_iterations;
                            raw.ml_converged = o.ml_converged;
                            result.raw_runs.push_back(raw);
                        }
    }

    return result;
}

CampaignResult run_bell_campaign(CampaignConfig cfg) {
    cfg.kind = CampaignKind::bell;
    return run_campaign(cfg);
}

CampaignResult run_ensemble_campaign(CampaignConfig cfg) {
    if (cfg.kind != CampaignKind::single_state) cfg.kind = CampaignKind::ensemble_average;
    return run_campaign(cfg);
}

}  // namespace qpt
