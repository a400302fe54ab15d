#include "robsub/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "robsub/dataset_io.hpp"

#ifndef ROBSUB_VERSION
#define ROBSUB_VERSION "unknown"
#endif

namespace robsub {

const char* version() noexcept { return ROBSUB_VERSION; }

namespace {

using json = nlohmann::json;
using clock_type = std::chrono::steady_clock;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

Index as_index(const std::string& key, double v) {
    if (!is_integer(v) || v < 0) throw std::invalid_argument(key + " must be a nonnegative integer");
    return static_cast<Index>(v);
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers; results land in index order.
template <class Fn>
auto run_tasks(std::size_t count, unsigned threads, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using Result = decltype(fn(std::size_t{}));
    std::vector<std::optional<Result>> slots(count);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    std::vector<Result> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::ofstream open_text(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out = open_text(path);
    out << body;
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

template <class T>
void read_if(const json& obj, const char* key, T& target) {
    if (obj.contains(key) && !obj.at(key).is_null()) target = obj.at(key).get<T>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
            throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
        }
    }
}

std::string join_rows(const std::vector<std::string>& rows) {
    std::string out;
    for (const auto& r : rows) out += r;
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Experiment description

double ScenarioParams::probability() const {
    if (p) return *p;
    return regime == "random" ? 0.33 : 0.1;
}

ScenarioConfig ScenarioParams::to_config(std::uint64_t seed_override) const {
    ScenarioConfig cfg;
    cfg.m = m;
    cfg.d = d;
    cfg.n = n;
    cfg.spacing_wavelengths = spacing_wavelengths;
    cfg.signal_freq_hz = signal_freq_hz;
    cfg.sample_rate_hz = sample_rate_hz;
    cfg.doa_rad = doa_rad;
    cfg.sigma_eps = sigma_eps;
    cfg.seed = seed_override;
    const double prob = probability();
    if (regime == "random") {
        cfg.regime = RandomInterference{prob, sigma_delta};
    } else if (regime == "directed-rand-amp") {
        cfg.regime = DirectedRandomAmplitude{prob, sigma_delta, doa_interf_rad};
    } else if (regime == "directed-const") {
        cfg.regime = DirectedConstant{prob, s_delta, doa_interf_rad};
    } else {
        throw std::invalid_argument("unknown regime '" + regime +
                                    "' (expected random, directed-rand-amp or directed-const)");
    }
    return cfg;
}

void ExperimentSpec::validate() const {
    scenario.to_config(scenario.seed).validate();
    lambda_spec().validate();
    solver_config().validate();
    if (replications < 1) throw std::invalid_argument("replications must be at least 1");
    if (!(doa_grid > 0.0)) throw std::invalid_argument("doa_grid must be positive");
    if (sweep && sweep->values.empty()) throw std::invalid_argument("sweep needs at least one value");
}

LambdaSpec ExperimentSpec::lambda_spec() const {
    return LambdaSpec{q, scenario.n, scenario.m, scenario.d, lambda_sigma.value_or(scenario.sigma_eps), convention};
}

SolverConfig ExperimentSpec::solver_config() const {
    SolverConfig cfg;
    cfg.eta = eta;
    cfg.max_iterations = max_iterations;
    return cfg;
}

std::uint64_t ExperimentSpec::replication_seed(int k) const { return scenario.seed + static_cast<std::uint64_t>(k); }

ExperimentSpec load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open config");
    json root;
    try {
        root = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    ExperimentSpec spec;
    try {
        reject_unknown(root, {"scenario", "lambda", "solver", "replications", "sweep", "output_dir", "threads",
                              "doa_grid", "save_dataset"},
                       "top level");
        if (root.contains("scenario")) {
            const json& s = root.at("scenario");
            reject_unknown(s, {"m", "d", "n", "spacing_wavelengths", "signal_freq_hz", "sample_rate_hz", "doa_rad",
                               "sigma_eps", "regime", "p", "sigma_delta", "s_delta", "doa_interf_rad", "seed"},
                           "scenario");
            auto& sc = spec.scenario;
            read_if(s, "m", sc.m);
            read_if(s, "d", sc.d);
            read_if(s, "n", sc.n);
            read_if(s, "spacing_wavelengths", sc.spacing_wavelengths);
            read_if(s, "signal_freq_hz", sc.signal_freq_hz);
            read_if(s, "sample_rate_hz", sc.sample_rate_hz);
            read_if(s, "doa_rad", sc.doa_rad);
            read_if(s, "sigma_eps", sc.sigma_eps);
            read_if(s, "regime", sc.regime);
            if (s.contains("p") && !s.at("p").is_null()) sc.p = s.at("p").get<double>();
            read_if(s, "sigma_delta", sc.sigma_delta);
            read_if(s, "s_delta", sc.s_delta);
            read_if(s, "doa_interf_rad", sc.doa_interf_rad);
            read_if(s, "seed", sc.seed);
        }
        if (root.contains("lambda")) {
            const json& l = root.at("lambda");
            reject_unknown(l, {"q", "convention", "sigma"}, "lambda");
            read_if(l, "q", spec.q);
            if (l.contains("convention")) spec.convention = noise_convention_from_string(l.at("convention").get<std::string>());
            if (l.contains("sigma") && !l.at("sigma").is_null()) spec.lambda_sigma = l.at("sigma").get<double>();
        }
        if (root.contains("solver")) {
            const json& s = root.at("solver");
            reject_unknown(s, {"eta", "max_iterations"}, "solver");
            read_if(s, "eta", spec.eta);
            read_if(s, "max_iterations", spec.max_iterations);
        }
        read_if(root, "replications", spec.replications);
        if (root.contains("sweep") && !root.at("sweep").is_null()) {
            const json& s = root.at("sweep");
            reject_unknown(s, {"key", "values"}, "sweep");
            Sweep sw{s.at("key").get<std::string>(), s.at("values").get<std::vector<double>>()};
            parse_sweep(sw.key + "=0");  // key validation
            if (sw.values.empty()) throw std::invalid_argument("sweep needs at least one value");
            spec.sweep = std::move(sw);
        }
        if (root.contains("output_dir")) spec.output_dir = root.at("output_dir").get<std::string>();
        read_if(root, "threads", spec.threads);
        read_if(root, "doa_grid", spec.doa_grid);
        read_if(root, "save_dataset", spec.save_dataset);
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    spec.validate();
    return spec;
}

void apply_override(ExperimentSpec& spec, const std::string& key, double value) {
    auto& sc = spec.scenario;
    if (key == "p") sc.p = value;
    else if (key == "sigma_delta") sc.sigma_delta = value;
    else if (key == "s_delta") sc.s_delta = value;
    else if (key == "q") spec.q = value;
    else if (key == "n") sc.n = as_index(key, value);
    else if (key == "m") sc.m = as_index(key, value);
    else if (key == "d") sc.d = as_index(key, value);
    else if (key == "eta") spec.eta = value;
    else if (key == "max_iters") spec.max_iterations = static_cast<int>(as_index(key, value));
    else if (key == "seed") sc.seed = static_cast<std::uint64_t>(as_index(key, value));
    else if (key == "reps") spec.replications = static_cast<int>(as_index(key, value));
    else throw std::invalid_argument("unknown parameter '" + key + "'");
}

Sweep parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("sweep must look like KEY=v1,v2,...");
    Sweep sw;
    sw.key = text.substr(0, eq);
    static const char* allowed[] = {"p", "sigma_delta", "s_delta", "q", "n"};
    if (std::none_of(std::begin(allowed), std::end(allowed), [&](const char* k) { return sw.key == k; })) {
        throw std::invalid_argument("sweep key must be one of p, sigma_delta, s_delta, q, n (got '" + sw.key + "')");
    }
    std::stringstream list(text.substr(eq + 1));
    std::string item;
    while (std::getline(list, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("sweep value '" + item + "' is not a number");
        sw.values.push_back(v);
    }
    if (sw.values.empty()) throw std::invalid_argument("sweep value list is empty");
    return sw;
}

// ---------------------------------------------------------------------------
// Pipeline

DetectionReport detect(const SnapshotMatrix& X, Index d, const PenaltyVector& lam, const SolverConfig& cfg,
                       const ArrayGeometry& geom, const std::vector<bool>* truth, double doa_grid) {
    const auto start = clock_type::now();
    SolverResult result = solve(X, d, lam, cfg);
    const double seconds = std::chrono::duration<double>(clock_type::now() - start).count();

    DetectionReport report;
    report.flags = result.interference.flags();
    if (truth) {
        report.confusion = confusion(report.flags, *truth);
        report.has_truth = true;
    } else {
        report.confusion.tn = static_cast<std::size_t>(std::count(report.flags.begin(), report.flags.end(), false));
        report.confusion.fp = report.flags.size() - report.confusion.tn;
    }
    report.solver.iterations = result.iterations;
    report.solver.converged = result.converged;
    report.solver.final_objective = result.objective_trace.empty() ? 0.0 : result.objective_trace.back();
    report.solver.solve_seconds = seconds;
    report.solver.iteration_seconds = std::move(result.iteration_seconds);

    if (d == 1 && geom.m == X.m()) {
        const std::vector<Index> keep = unflagged(report.flags);
        std::vector<Index> all(static_cast<std::size_t>(X.n()));
        for (Index i = 0; i < X.n(); ++i) all[static_cast<std::size_t>(i)] = i;
        report.doa_all = doa_grid_search(refit_subspace(X, all, d), geom, doa_grid);
        report.doa_cleaned = keep.empty() ? std::nan("") : doa_grid_search(refit_subspace(X, keep, d), geom, doa_grid);
    } else {
        report.doa_all = std::nan("");
        report.doa_cleaned = std::nan("");
    }
    return report;
}

RunRecord run_replication(const ExperimentSpec& spec, int replication) {
    const auto start = clock_type::now();
    RunRecord rec;
    rec.replication = replication;
    rec.seed = spec.replication_seed(replication);
    const ScenarioConfig cfg = spec.scenario.to_config(rec.seed);
    const LabeledDataset data = generate(cfg);
    const PenaltyVector lam = lambda_chi(spec.lambda_spec());
    const std::vector<bool> truth = data.truth_flags();
    rec.report = detect(data.X, cfg.d, lam, spec.solver_config(), cfg.geometry(), &truth, spec.doa_grid);
    rec.total_seconds = std::chrono::duration<double>(clock_type::now() - start).count();
    return rec;
}

std::vector<RunRecord> run_single(const ExperimentSpec& spec) {
    spec.validate();
    const auto& out = spec.output_dir;
    std::filesystem::create_directories(out);

    const PenaltyVector lam = lambda_chi(spec.lambda_spec());
    write_values(out / "lambda.txt", std::vector<double>(lam.values().begin(), lam.values().end()));
    if (spec.save_dataset) {
        const ScenarioConfig cfg = spec.scenario.to_config(spec.replication_seed(0));
        const LabeledDataset data = generate(cfg);
        write_dataset(out / "dataset.bin", data.X, cfg.seed, regime_descriptor(cfg.regime));
        write_labels(out / "labels.txt", data.truth_flags());
    }

    std::vector<RunRecord> records = run_tasks(static_cast<std::size_t>(spec.replications), spec.threads,
                                               [&](std::size_t k) { return run_replication(spec, static_cast<int>(k)); });

    std::vector<std::string> rows{report_csv_header(false)};
    std::vector<std::string> timing{timing_csv_header()};
    std::string kv;
    for (const auto& rec : records) {
        rows.push_back(report_csv_row(spec, rec, false));
        timing.push_back(timing_csv_row(spec, rec));
        kv += report_key_values(spec, rec) + "\n";
    }
    write_text(out / "report.csv", join_rows(rows));
    write_text(out / "timing.csv", join_rows(timing));
    write_text(out / "report.txt", kv);
    return records;
}

std::vector<RunRecord> run_sweep(const ExperimentSpec& spec) {
    spec.validate();
    if (!spec.sweep || spec.sweep->values.empty()) throw std::invalid_argument("run_sweep: no sweep values");
    const Sweep& sw = *spec.sweep;
    const auto reps = static_cast<std::size_t>(spec.replications);

    std::vector<ExperimentSpec> variants;
    for (double v : sw.values) {
        ExperimentSpec s = spec;
        s.sweep = Sweep{sw.key, {v}};  // keeps the key for the CSV rows
        apply_override(s, sw.key, v);
        s.validate();
        variants.push_back(std::move(s));
    }

    std::vector<RunRecord> records =
        run_tasks(variants.size() * reps, spec.threads, [&](std::size_t task) {
            const std::size_t vi = task / reps;
            RunRecord rec = run_replication(variants[vi], static_cast<int>(task % reps));
            rec.sweep_value = sw.values[vi];
            return rec;
        });
    std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(*a.sweep_value, a.replication) < std::tie(*b.sweep_value, b.replication);
    });

    std::filesystem::create_directories(spec.output_dir);
    std::vector<std::string> rows{report_csv_header(true)};
    std::vector<std::string> timing{timing_csv_header()};
    for (const auto& rec : records) {
        const auto vi = static_cast<std::size_t>(
            std::find(sw.values.begin(), sw.values.end(), *rec.sweep_value) - sw.values.begin());
        rows.push_back(report_csv_row(variants[vi], rec, true));
        timing.push_back(timing_csv_row(variants[vi], rec));
    }
    write_text(spec.output_dir / "sweep.csv", join_rows(rows));
    write_text(spec.output_dir / "timing.csv", join_rows(timing));
    return records;
}

std::vector<RunRecord> run_bench(const ExperimentSpec& spec, const std::vector<Index>& ns) {
    if (ns.empty()) throw std::invalid_argument("run_bench: no sizes given");
    std::vector<std::string> timing{timing_csv_header()};
    std::vector<RunRecord> all;
    for (Index n : ns) {
        ExperimentSpec s = spec;
        s.scenario.n = n;
        s.validate();
        // Timings are sequential so replications do not compete for cores.
        for (int k = 0; k < s.replications; ++k) {
            RunRecord rec = run_replication(s, k);
            rec.sweep_value = static_cast<double>(n);
            timing.push_back(timing_csv_row(s, rec));
            all.push_back(std::move(rec));
        }
    }
    std::filesystem::create_directories(spec.output_dir);
    write_text(spec.output_dir / "timing.csv", join_rows(timing));
    return all;
}

// ---------------------------------------------------------------------------
// Serialization

std::string report_csv_header(bool with_sweep) {
    std::string h = with_sweep ? "sweep_key,sweep_value," : "";
    h += "replication,seed,version,rng,regime,m,d,n,p,sigma_delta,s_delta,q,lambda_convention,iterations,converged,"
         "tn,fp,fn,tp,n0,fdp,fpr,fnr,sensitivity,fallout,miss_rate,doa_cleaned,doa_all,final_objective\n";
    return h;
}

std::string report_csv_row(const ExperimentSpec& spec, const RunRecord& rec, bool with_sweep) {
    const auto& sc = spec.scenario;
    const auto& r = rec.report;
    const auto& c = r.confusion;
    std::ostringstream os;
    if (with_sweep) os << (spec.sweep ? spec.sweep->key : std::string()) << ',' << fmt(rec.sweep_value.value_or(0.0)) << ',';
    os << rec.replication << ',' << rec.seed << ',' << version() << ',' << kRngName << ',' << sc.regime << ',' << sc.m
       << ',' << sc.d << ',' << sc.n << ',' << fmt(sc.probability()) << ',' << fmt(sc.sigma_delta) << ','
       << fmt(sc.s_delta) << ',' << fmt(spec.q) << ',' << to_string(spec.convention) << ',' << r.solver.iterations << ','
       << (r.solver.converged ? 1 : 0) << ',' << c.tn << ',' << c.fp << ',' << c.fn << ',' << c.tp << ',' << c.n0()
       << ',' << fmt(c.fdp()) << ',' << fmt(c.fpr()) << ',' << fmt(c.fnr()) << ',' << fmt(c.sensitivity()) << ','
       << fmt(c.fallout()) << ',' << fmt(c.miss_rate()) << ',' << fmt(r.doa_cleaned) << ',' << fmt(r.doa_all) << ','
       << fmt(r.solver.final_objective) << '\n';
    return os.str();
}

std::string timing_csv_header() {
    return "replication,seed,version,regime,m,d,n,iterations,converged,solve_seconds,median_iteration_seconds,"
           "total_seconds\n";
}

std::string timing_csv_row(const ExperimentSpec& spec, const RunRecord& rec) {
    const auto& sc = spec.scenario;
    const auto& s = rec.report.solver;
    std::ostringstream os;
    os << rec.replication << ',' << rec.seed << ',' << version() << ',' << sc.regime << ',' << sc.m << ',' << sc.d << ','
       << sc.n << ',' << s.iterations << ',' << (s.converged ? 1 : 0) << ',' << fmt(s.solve_seconds) << ','
       << fmt(median(s.iteration_seconds)) << ',' << fmt(rec.total_seconds) << '\n';
    return os.str();
}

std::string report_key_values(const ExperimentSpec& spec, const RunRecord& rec) {
    const auto& sc = spec.scenario;
    const auto& r = rec.report;
    const auto& c = r.confusion;
    std::ostringstream os;
    os << "replication=" << rec.replication << '\n'
       << "seed=" << rec.seed << '\n'
       << "version=" << version() << '\n'
       << "rng=" << kRngName << '\n'
       << "regime=" << regime_descriptor(sc.to_config(rec.seed).regime) << '\n'
       << "m=" << sc.m << '\n'
       << "d=" << sc.d << '\n'
       << "n=" << sc.n << '\n'
       << "q=" << fmt(spec.q) << '\n'
       << "lambda_convention=" << to_string(spec.convention) << '\n'
       << "iterations=" << r.solver.iterations << '\n'
       << "converged=" << (r.solver.converged ? "true" : "false") << '\n'
       << "tn=" << c.tn << '\n'
       << "fp=" << c.fp << '\n'
       << "fn=" << c.fn << '\n'
       << "tp=" << c.tp << '\n'
       << "n0=" << c.n0() << '\n'
       << "fdp=" << fmt(c.fdp()) << '\n'
       << "fpr=" << fmt(c.fpr()) << '\n'
       << "fnr=" << fmt(c.fnr()) << '\n'
       << "sensitivity=" << fmt(c.sensitivity()) << '\n'
       << "fallout=" << fmt(c.fallout()) << '\n'
       << "miss_rate=" << fmt(c.miss_rate()) << '\n'
       << "doa_cleaned=" << fmt(r.doa_cleaned) << '\n'
       << "doa_all=" << fmt(r.doa_all) << '\n'
       << "final_objective=" << fmt(r.solver.final_objective) << '\n';
    return os.str();
}

} // namespace robsub
