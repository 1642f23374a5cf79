#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qpt/harness.hpp"

namespace qpt {

namespace {

using ojson = nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << content;
}

}  // namespace

std::string fig1_points_csv(const CampaignResult& result) {
    std::ostringstream os;
    os << "state_label,pom,estimator,N,D_avg,D_sd,runs\n";
    for (const StateSeries& s : result.series)
        for (const PointStat& pt : s.points)
            os << s.state_label << ',' << pom_kind_label(s.pom) << ',' << estimator_label(s.estimator)
               << ',' << pt.n << ',' << fmt(pt.d_avg) << ',' << fmt(pt.d_sd) << ',' << pt.runs << '\n';
    return os.str();
}

std::string fig1_fits_csv(const CampaignResult& result) {
    std::ostringstream os;
    os << "state_label,pom,estimator,a,c,residual_rms\n";
    for (const StateSeries& s : result.series)
        os << s.state_label << ',' << pom_kind_label(s.pom) << ',' << estimator_label(s.estimator)
           << ',' << fmt(s.fit.a) << ',' << fmt(s.fit.c) << ',' << fmt(s.fit.residual_rms) << '\n';
    return os.str();
}

std::string eta_csv(const CampaignResult& result) {
    std::ostringstream os;
    os << "state_label,estimator,eta,n_prod_thr,n_sic_thr,d_thr\n";
    for (const EtaRow& row : result.etas)
        os << row.state_label << ',' << estimator_label(row.estimator) << ',' << fmt(row.report.eta)
           << ',' << fmt(row.report.n_prod_thr) << ',' << fmt(row.report.n_sic_thr) << ','
           << fmt(row.report.d_thr) << '\n';
    return os.str();
}

std::string raw_runs_csv(const CampaignResult& result) {
    std::ostringstream os;
    os << "state_label,pom,estimator,N,run,distance,rd_physical,ml_iterations,ml_converged\n";
    for (const RawRun& r : result.raw_runs)
        os << result.state_labels[r.state_index] << ',' << pom_kind_label(r.pom) << ','
           << estimator_label(r.estimator) << ',' << r.n << ',' << r.run << ',' << fmt(r.distance)
           << ',' << (r.rd_physical ? 1 : 0) << ',' << r.ml_iterations << ','
           << (r.ml_converged ? 1 : 0) << '\n';
    return os.str();
}

std::string table_summary_json(const CampaignResult& result) {
    ojson j;
    j["kind"] = campaign_kind_label(result.config.kind);
    if (result.config.kind != CampaignKind::bell)
        j["ensemble"] = ensemble_kind_label(result.config.ensemble.kind);
    j["n_states"] = static_cast<int>(result.state_labels.size());
    j["runs_per_point"] = result.config.runs_per_point;
    j["d_thr"] = result.config.d_thr;
    j["master_seed"] = result.config.master_seed;

    ojson cells;
    for (Estimator est : result.config.estimators) {
        ojson row;
        for (PomKind pom : result.config.poms) {
            const Aggregate& a = result.n_thr_aggregate(pom, est);
            row[pom_kind_label(pom)] = {{"mean", a.mean}, {"sd", a.sd}, {"count", a.count}};
        }
        for (const EtaAggregate& ea : result.eta_aggregates)
            if (ea.estimator == est)
                row["eta"] = {{"mean", ea.agg.mean}, {"sd", ea.agg.sd}, {"count", ea.agg.count}};
        cells[estimator_label(est)] = row;
    }
    j["n_to_threshold"] = cells;
    j["ml_runs_excluded"] = result.ml_runs_excluded;
    j["ml_runs_total"] = result.ml_runs_total;
    return j.dump(2) + "\n";
}

std::string config_to_json(const CampaignConfig& cfg) {
    ojson j;
    j["kind"] = campaign_kind_label(cfg.kind);

    ojson ens;
    ens["kind"] = ensemble_kind_label(cfg.ensemble.kind);
    ens["rank"] = cfg.ensemble.rank;
    ens["seed"] = cfg.ensemble.seed;
    if (cfg.ensemble.kind == EnsembleKind::bell) ens["bell"] = bell_label(cfg.ensemble.bell);
    if (cfg.ensemble.mean.max_abs() > 0.0) {
        ojson mean = ojson::array();
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) {
                mean.push_back(cfg.ensemble.mean(i, k).real());
                mean.push_back(cfg.ensemble.mean(i, k).imag());
            }
        ens["mean"] = mean;
    }
    if (cfg.ensemble.kind == EnsembleKind::fixed) {
        ojson st = ojson::array();
        const auto flat = state_to_reals(DensityMatrix(cfg.ensemble.fixed_state));
        for (double v : flat) st.push_back(v);
        ens["state"] = st;
    }
    j["ensemble"] = ens;

    j["n_grid"] = cfg.n_grid;
    j["runs_per_point"] = cfg.runs_per_point;
    j["n_states"] = cfg.n_states;
    ojson ests = ojson::array();
    for (Estimator e : cfg.estimators) ests.push_back(estimator_label(e));
    j["estimators"] = ests;
    ojson poms = ojson::array();
    for (PomKind p : cfg.poms) poms.push_back(pom_kind_label(p));
    j["poms"] = poms;
    j["d_thr"] = cfg.d_thr;
    j["master_seed"] = cfg.master_seed;
    j["ml"] = {{"stop_threshold", cfg.ml.stop_threshold},
               {"max_iterations", cfg.ml.max_iterations},
               {"trial_epsilons", {cfg.ml.trial_epsilon_a, cfg.ml.trial_epsilon_b}},
               {"epsilon_cap", cfg.ml.epsilon_cap},
               {"probability_floor", cfg.ml.probability_floor}};
    j["parallel"] = cfg.parallel;
    j["threads"] = cfg.threads;
    j["keep_raw_runs"] = cfg.keep_raw_runs;
    j["biased_target_purity"] = cfg.biased_target_purity;
    j["biased_confidence"] = cfg.biased_confidence;
    j["max_ml_exclusion_fraction"] = cfg.max_ml_exclusion_fraction;
    return j.dump(2) + "\n";
}

CampaignConfig config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }

    CampaignConfig cfg;
    if (j.contains("kind")) cfg.kind = campaign_kind_from_label(j["kind"].get<std::string>());
    if (j.contains("ensemble")) {
        const auto& ens = j["ensemble"];
        if (ens.contains("kind")) cfg.ensemble.kind = ensemble_kind_from_label(ens["kind"].get<std::string>());
        if (ens.contains("rank")) cfg.ensemble.rank = ens["rank"].get<int>();
        if (ens.contains("seed")) cfg.ensemble.seed = ens["seed"].get<std::uint64_t>();
        if (ens.contains("bell")) {
            const std::string b = ens["bell"].get<std::string>();
            bool found = false;
            for (BellState bs : {BellState::psi_minus, BellState::phi_minus, BellState::phi_plus, BellState::psi_plus})
                if (b == bell_label(bs)) {
                    cfg.ensemble.bell = bs;
                    found = true;
                }
            if (!found) throw std::invalid_argument("config: unknown bell state " + b);
        }
        if (ens.contains("mean")) {
            const auto mean = ens["mean"].get<std::vector<double>>();
            if (mean.size() != 32) throw std::invalid_argument("config: ensemble.mean needs 32 reals");
            for (int i = 0; i < 4; ++i)
                for (int k = 0; k < 4; ++k)
                    cfg.ensemble.mean(i, k) = cplx(mean[2 * (4 * i + k)], mean[2 * (4 * i + k) + 1]);
        }
        if (ens.contains("state")) {
            const auto flat = ens["state"].get<std::vector<double>>();
            if (flat.size() != 32) throw std::invalid_argument("config: ensemble.state needs 32 reals");
            std::array<double, 32> arr{};
            std::copy(flat.begin(), flat.end(), arr.begin());
            cfg.ensemble.fixed_state = state_from_reals(arr).matrix();
        }
        if (cfg.ensemble.kind == EnsembleKind::pure) cfg.ensemble.rank = ens.contains("rank") ? cfg.ensemble.rank : 1;
    }
    if (j.contains("n_grid")) cfg.n_grid = j["n_grid"].get<std::vector<long long>>();
    if (j.contains("runs_per_point")) cfg.runs_per_point = j["runs_per_point"].get<int>();
    if (j.contains("n_states")) cfg.n_states = j["n_states"].get<int>();
    if (j.contains("estimators")) {
        cfg.estimators.clear();
        for (const auto& e : j["estimators"]) cfg.estimators.push_back(estimator_from_label(e.get<std::string>()));
    }
    if (j.contains("poms")) {
        cfg.poms.clear();
        for (const auto& p : j["poms"]) cfg.poms.push_back(pom_kind_from_label(p.get<std::string>()));
    }
    if (j.contains("d_thr")) cfg.d_thr = j["d_thr"].get<double>();
    if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("ml")) {
        const auto& ml = j["ml"];
        if (ml.contains("stop_threshold")) cfg.ml.stop_threshold = ml["stop_threshold"].get<double>();
        if (ml.contains("max_iterations")) cfg.ml.max_iterations = ml["max_iterations"].get<int>();
        if (ml.contains("trial_epsilons")) {
            const auto eps = ml["trial_epsilons"].get<std::vector<double>>();
            if (eps.size() != 2) throw std::invalid_argument("config: ml.trial_epsilons needs 2 values");
            cfg.ml.trial_epsilon_a = eps[0];
            cfg.ml.trial_epsilon_b = eps[1];
        }
        if (ml.contains("epsilon_cap")) cfg.ml.epsilon_cap = ml["epsilon_cap"].get<double>();
        if (ml.contains("probability_floor")) cfg.ml.probability_floor = ml["probability_floor"].get<double>();
    }
    if (j.contains("parallel")) cfg.parallel = j["parallel"].get<bool>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("keep_raw_runs")) cfg.keep_raw_runs = j["keep_raw_runs"].get<bool>();
    if (j.contains("biased_target_purity")) cfg.biased_target_purity = j["biased_target_purity"].get<double>();
    if (j.contains("biased_confidence")) cfg.biased_confidence = j["biased_confidence"].get<double>();
    if (j.contains("max_ml_exclusion_fraction"))
        cfg.max_ml_exclusion_fraction = j["max_ml_exclusion_fraction"].get<double>();
    return cfg;
}

CampaignConfig load_config_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("cannot read config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return config_from_json(buf.str());
}

std::string provenance_json(const CampaignResult& result) {
    ojson j;
    j["code_version"] = result.code_version;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char ts[64];
    std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["timestamp_utc"] = ts;
    j["config"] = nlohmann::ordered_json::parse(config_to_json(result.config));
    j["state_labels"] = result.state_labels;
    return j.dump(2) + "\n";
}

void write_campaign_outputs(const CampaignResult& result, const std::string& out_dir) {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);

    write_file(dir / "fig1_points.csv", fig1_points_csv(result));
    write_file(dir / "fig1_fits.csv", fig1_fits_csv(result));
    if (!result.etas.empty()) write_file(dir / "eta.csv", eta_csv(result));
    if (result.config.kind != CampaignKind::bell)
        write_file(dir / "table_summary.json", table_summary_json(result));
    if (result.config.keep_raw_runs) write_file(dir / "raw_runs.csv", raw_runs_csv(result));
    write_file(dir / "provenance.json", provenance_json(result));

    for (PomKind kind : result.config.poms) {
        std::ostringstream os;
        write_pom_json(kind == PomKind::product ? product_pom() : sic_pom(), os);
        write_file(dir / (std::string("pom_") + pom_kind_label(kind) + ".json"), os.str());
    }
}

}  // namespace qpt
