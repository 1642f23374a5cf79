// Command-line front end: POM verification/export and simulation campaigns.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qpt/harness.hpp"

namespace {

using namespace qpt;

int cmd_verify_pom(const std::string& kind) {
    const Pom pom = pom_kind_from_label(kind) == PomKind::product ? product_pom() : sic_pom();
    const auto checks = verify_pom(pom);
    std::printf("%-28s %14s %14s %6s %s\n", "check", "value", "bound", "sense", "status");
    for (const PomCheck& c : checks) {
        std::printf("%-28s %14.6e %14.6e %6s %s%s\n", c.name.c_str(), c.value, c.bound,
                    c.at_least ? ">=" : "<=", c.pass ? "pass" : "FAIL",
                    c.required ? "" : " (informational)");
    }
    const bool ok = all_required_pass(checks);
    std::printf("%s POM: %s\n", pom_kind_label(pom.kind), ok ? "all required checks pass" : "FAILED");
    return ok ? 0 : 1;
}

int cmd_export_pom(const std::string& kind, const std::string& out) {
    const Pom pom = pom_kind_from_label(kind) == PomKind::product ? product_pom() : sic_pom();
    std::ofstream os(out, std::ios::binary);
    if (!os) {
        std::fprintf(stderr, "error: cannot open %s\n", out.c_str());
        return 1;
    }
    write_pom_json(pom, os);
    return 0;
}

void print_summary(const CampaignResult& result) {
    for (const NthrAggregate& a : result.n_thr_aggregates)
        std::printf("N_thr %-8s %-3s mean %10.1f sd %10.1f (%d states)\n", pom_kind_label(a.pom),
                    estimator_label(a.estimator), a.agg.mean, a.agg.sd, a.agg.count);
    for (const EtaAggregate& a : result.eta_aggregates)
        std::printf("eta   %-12s mean %10.3f sd %10.3f (%d states)\n", estimator_label(a.estimator),
                    a.agg.mean, a.agg.sd, a.agg.count);
    if (result.ml_runs_total > 0)
        std::printf("ML runs excluded: %lld of %lld\n", result.ml_runs_excluded, result.ml_runs_total);
}

int run_and_write(const CampaignConfig& cfg, const std::string& out_dir) {
    const CampaignResult result = run_campaign(cfg);
    write_campaign_outputs(result, out_dir);
    print_summary(result);
    std::printf("outputs written to %s\n", out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-qubit tomography simulator: product vs SIC measurements"};
    app.require_subcommand(1);

    std::string pom_kind = "sic";
    std::string out_path;
    std::string config_path;
    std::string ensemble_name;
    std::string bell_name;
    std::string kind_name;
    std::uint64_t seed = 0;
    int runs = 0;
    int states = 0;
    int threads = 0;
    bool serial = false;
    bool raw = false;

    auto add_campaign_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file; flags override its fields");
        cmd->add_option("--out", out_path, "output directory");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--runs", runs, "simulation runs per N point");
        cmd->add_option("--threads", threads, "OpenMP thread count (0 = default)");
        cmd->add_flag("--serial", serial, "run on the serial reference path");
        cmd->add_flag("--raw", raw, "also write per-run distances (raw_runs.csv)");
    };

    CLI::App* verify = app.add_subcommand("verify-pom", "check POM algebra and print a report");
    verify->add_option("--kind", pom_kind, "product or sic")->required();

    CLI::App* export_cmd = app.add_subcommand("export-pom", "write a POM as JSON");
    export_cmd->add_option("--kind", pom_kind, "product or sic")->required();
    export_cmd->add_option("--out", out_path, "output file")->required();

    CLI::App* bell = app.add_subcommand("bell", "Bell-state campaign over both POMs and estimators");
    add_campaign_flags(bell);

    CLI::App* table = app.add_subcommand("table", "ensemble-average campaign");
    add_campaign_flags(table);
    table->add_option("--ensemble", ensemble_name,
                      "unbiased_mixed | biased_mixed | pure | max_entangled");
    table->add_option("--states", states, "number of sampled states");

    CLI::App* single = app.add_subcommand("single", "campaign on one state");
    add_campaign_flags(single);
    single->add_option("--ensemble", ensemble_name, "ensemble to draw the state from");
    single->add_option("--bell", bell_name, "bell state label (psi_minus, ...)");

    CLI::App* run = app.add_subcommand("run", "run a campaign described by a config file");
    add_campaign_flags(run);
    run->add_option("--kind", kind_name, "bell | ensemble_average | single_state");
    run->add_option("--ensemble", ensemble_name, "override ensemble kind");
    run->add_option("--states", states, "number of sampled states");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2, --help exits 0
    }

    try {
        if (verify->parsed()) return cmd_verify_pom(pom_kind);
        if (export_cmd->parsed()) return cmd_export_pom(pom_kind, out_path);

        CampaignConfig cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path);

        CLI::App* cmd = app.get_subcommands().front();
        if (bell->parsed()) cfg.kind = CampaignKind::bell;
        if (table->parsed()) cfg.kind = CampaignKind::ensemble_average;
        if (single->parsed()) {
            cfg.kind = CampaignKind::single_state;
            if (!bell_name.empty()) {
                cfg.ensemble.kind = EnsembleKind::bell;
                bool found = false;
                for (BellState bs :
                     {BellState::psi_minus, BellState::phi_minus, BellState::phi_plus, BellState::psi_plus})
                    if (bell_name == bell_label(bs)) {
                        cfg.ensemble.bell = bs;
                        found = true;
                    }
                if (!found) {
                    std::fprintf(stderr, "error: unknown bell state %s\n", bell_name.c_str());
                    return 2;
                }
            }
        }
        if (run->parsed() && !kind_name.empty()) cfg.kind = campaign_kind_from_label(kind_name);
        if (!ensemble_name.empty()) {
            cfg.ensemble.kind = ensemble_kind_from_label(ensemble_name);
            cfg.ensemble.rank = cfg.ensemble.kind == EnsembleKind::pure ? 1 : 4;
        }
        if (cmd->count("--seed")) cfg.master_seed = seed;
        if (runs > 0) cfg.runs_per_point = runs;
        if (states > 0) cfg.n_states = states;
        if (threads > 0) cfg.threads = threads;
        if (serial) cfg.parallel = false;
        if (raw) cfg.keep_raw_runs = true;

        if (out_path.empty()) out_path = std::string("out_") + campaign_kind_label(cfg.kind);
        return run_and_write(cfg, out_path);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
