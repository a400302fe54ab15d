// robsub: detect interference-contaminated snapshots and re-estimate the signal subspace.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "robsub/dataset_io.hpp"
#include "robsub/harness.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<long> n, m, d, max_iters, reps;
    std::optional<double> p, sigma_delta, s_delta, q, eta, sigma_eps;
    std::optional<std::string> regime, sweep, out, convention;
    std::optional<unsigned> threads;
    bool no_dataset = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON experiment file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "base RNG seed");
    cmd->add_option("--n", o.n, "snapshot count");
    cmd->add_option("--m", o.m, "channel count");
    cmd->add_option("--d", o.d, "model order");
    cmd->add_option("--p", o.p, "interference probability");
    cmd->add_option("--sigma-delta", o.sigma_delta, "interference scale (random regimes)");
    cmd->add_option("--s-delta", o.s_delta, "interference amplitude (directed-const)");
    cmd->add_option("--sigma-eps", o.sigma_eps, "noise scale");
    cmd->add_option("--q", o.q, "target false discovery rate");
    cmd->add_option("--convention", o.convention, "noise convention for the penalty")
        ->check(CLI::IsMember({"circular", "independent-parts"}));
    cmd->add_option("--eta", o.eta, "convergence tolerance");
    cmd->add_option("--max-iters", o.max_iters, "iteration cap");
    cmd->add_option("--regime", o.regime, "interference regime")
        ->check(CLI::IsMember({"random", "directed-rand-amp", "directed-const"}));
    cmd->add_option("--reps", o.reps, "replications");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

robsub::ExperimentSpec build_spec(const Overrides& o) {
    robsub::ExperimentSpec spec = o.config.empty() ? robsub::ExperimentSpec{} : robsub::load_experiment(o.config);
    auto set = [&](const char* key, const auto& value) {
        if (value) robsub::apply_override(spec, key, static_cast<double>(*value));
    };
    if (o.regime) spec.scenario.regime = *o.regime;
    set("seed", o.seed);
    set("n", o.n);
    set("m", o.m);
    set("d", o.d);
    set("p", o.p);
    set("sigma_delta", o.sigma_delta);
    set("s_delta", o.s_delta);
    set("q", o.q);
    set("eta", o.eta);
    set("max_iters", o.max_iters);
    set("reps", o.reps);
    if (o.sigma_eps) spec.scenario.sigma_eps = *o.sigma_eps;
    if (o.convention) spec.convention = robsub::noise_convention_from_string(*o.convention);
    if (o.out) spec.output_dir = *o.out;
    if (o.threads) spec.threads = *o.threads;
    if (o.sweep) spec.sweep = robsub::parse_sweep(*o.sweep);
    if (o.no_dataset) spec.save_dataset = false;
    spec.validate();
    return spec;
}

void print_summary(const std::vector<robsub::RunRecord>& records) {
    for (const auto& rec : records) {
        const auto& r = rec.report;
        std::cout << "rep " << rec.replication;
        if (rec.sweep_value) std::cout << " value " << *rec.sweep_value;
        std::cout << " seed " << rec.seed << ": iterations " << r.solver.iterations
                  << (r.solver.converged ? "" : " (not converged)") << ", flagged " << r.discoveries();
        if (r.has_truth) {
            std::cout << ", TN " << r.confusion.tn << " FP " << r.confusion.fp << " FN " << r.confusion.fn << " TP "
                      << r.confusion.tp << ", FDP " << r.confusion.fdp();
        }
        std::cout << ", DOA cleaned " << r.doa_cleaned / 3.141592653589793 << "pi, all "
                  << r.doa_all / 3.141592653589793 << "pi, " << r.solver.solve_seconds << " s\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interference detection and robust signal subspace estimation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(robsub::version()));
    Overrides o;

    auto* generate = app.add_subcommand("generate", "simulate a dataset (dataset.bin + labels.txt)");
    add_common(generate, o);

    auto* run = app.add_subcommand("run", "full pipeline: simulate, detect, refit");
    add_common(run, o);
    run->add_flag("--no-dataset", o.no_dataset, "do not write dataset.bin/labels.txt");

    auto* sweep = app.add_subcommand("sweep", "parameter sweep, one row per (value, replication)");
    add_common(sweep, o);
    sweep->add_option("--sweep", o.sweep, "KEY=v1,v2,... with KEY in p, sigma_delta, s_delta, q, n");

    auto* lambda = app.add_subcommand("lambda", "write the chi-quantile penalty to lambda.txt");
    add_common(lambda, o);

    std::string bench_ns = "25000,50000";
    auto* bench = app.add_subcommand("bench", "solver timing at several snapshot counts");
    add_common(bench, o);
    bench->add_option("--ns", bench_ns, "comma-separated snapshot counts");

    std::string data_path, labels_path, lambda_path;
    auto* detect = app.add_subcommand("detect", "detect interference in an existing dataset");
    add_common(detect, o);
    detect->add_option("--data", data_path, "dataset.bin")->required()->check(CLI::ExistingFile);
    detect->add_option("--labels", labels_path, "ground-truth labels.txt")->check(CLI::ExistingFile);
    detect->add_option("--lambda-file", lambda_path, "penalty, one value per line")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        robsub::ExperimentSpec spec = build_spec(o);
        const auto& out = spec.output_dir;

        if (generate->parsed()) {
            const auto cfg = spec.scenario.to_config(spec.replication_seed(0));
            const auto data = robsub::generate(cfg);
            robsub::write_dataset(out / "dataset.bin", data.X, cfg.seed, robsub::regime_descriptor(cfg.regime));
            robsub::write_labels(out / "labels.txt", data.truth_flags());
            std::cout << "wrote " << (out / "dataset.bin").string() << " (" << cfg.m << " x " << cfg.n << ", "
                      << data.truth_support.size() << " interfered)\n";
        } else if (run->parsed()) {
            print_summary(robsub::run_single(spec));
        } else if (sweep->parsed()) {
            if (!spec.sweep) throw std::invalid_argument("sweep: pass --sweep KEY=v1,v2,... or set it in the config");
            print_summary(robsub::run_sweep(spec));
        } else if (lambda->parsed()) {
            const auto lam = robsub::lambda_chi(spec.lambda_spec());
            robsub::write_values(out / "lambda.txt", {lam.values().begin(), lam.values().end()});
            std::cout << "wrote " << (out / "lambda.txt").string() << " (" << lam.size() << " values, max "
                      << lam[0] << ")\n";
        } else if (bench->parsed()) {
            std::vector<robsub::Index> ns;
            for (double v : robsub::parse_sweep("n=" + bench_ns).values) ns.push_back(static_cast<robsub::Index>(v));
            const auto records = robsub::run_bench(spec, ns);
            for (const auto& rec : records) {
                std::cout << "n " << *rec.sweep_value << " rep " << rec.replication << ": " << rec.report.solver.iterations
                          << " iterations, " << rec.report.solver.solve_seconds << " s\n";
            }
        } else if (detect->parsed()) {
            const auto loaded = robsub::read_dataset(data_path);
            const auto& X = loaded.X;
            robsub::PenaltyVector lam;
            if (!lambda_path.empty()) {
                lam = robsub::PenaltyVector(robsub::read_values(lambda_path));
            } else {
                auto ls = spec.lambda_spec();
                ls.n = X.n();
                ls.m = X.m();
                lam = robsub::lambda_chi(ls);
            }
            std::vector<bool> truth;
            if (!labels_path.empty()) {
                truth = robsub::read_labels(labels_path);
                if (static_cast<robsub::Index>(truth.size()) != X.n()) {
                    throw std::runtime_error(labels_path + ": label count does not match the dataset");
                }
            }
            const robsub::ArrayGeometry geom{X.m(), spec.scenario.spacing_wavelengths};
            robsub::RunRecord rec;
            rec.seed = loaded.header.seed;
            rec.report = robsub::detect(X, spec.scenario.d, lam, spec.solver_config(), geom,
                                        truth.empty() ? nullptr : &truth, spec.doa_grid);
            rec.total_seconds = rec.report.solver.solve_seconds;
            spec.scenario.m = X.m();
            spec.scenario.n = X.n();
            std::filesystem::create_directories(out);
            std::ofstream(out / "report.csv") << robsub::report_csv_header(false)
                                              << robsub::report_csv_row(spec, rec, false);
            std::ofstream(out / "report.txt") << "descriptor=" << loaded.header.descriptor << '\n'
                                              << robsub::report_key_values(spec, rec);
            robsub::write_labels(out / "flags.txt", rec.report.flags);
            print_summary({rec});
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
