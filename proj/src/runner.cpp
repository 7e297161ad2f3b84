#include "gauss/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <map>
#include <sstream>

#include "gauss/analysis.hpp"
#include "gauss/dynamics.hpp"
#include "gauss/errors.hpp"
#include "gauss/io.hpp"

namespace gauss {

namespace fs = std::filesystem;

namespace {

std::string resolve_data_path(const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return path;
    const char* root = std::getenv("GAUSS_DATA_DIR");
    if (root == nullptr || *root == '\0') return path;
    return (fs::path(root) / p).string();
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string sanitize_cell(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

std::string curve_csv(const LearningCurve& curve) {
    std::ostringstream out;
    out << "round,train_size,test_accuracy,switch_min,switch_mean,switch_max\n";
    for (const auto& r : curve.rounds) {
        out << r.round << ',' << r.train_size << ',' << format_double(r.test_accuracy)
            << ',' << r.switch_min << ',' << format_double(r.switch_mean) << ','
            << r.switch_max << '\n';
    }
    return out.str();
}

std::string selections_csv(const LearningCurve& curve) {
    std::ostringstream out;
    out << "round,strategy,sample_index,score_or_weight\n";
    for (const auto& r : curve.rounds) {
        for (std::size_t i = 0; i < r.selected.size(); ++i) {
            out << r.round << ',' << curve.strategy << ',' << r.selected[i] << ','
                << format_double(r.selected_weights[i]) << '\n';
        }
    }
    return out.str();
}

std::string seed_set_csv(const LearningCurve& curve) {
    std::ostringstream out;
    out << "sample_index\n";
    for (std::size_t idx : curve.seed_train_idx) out << idx << '\n';
    return out.str();
}

std::string gmm_csv(const LearningCurve& curve) {
    std::ostringstream out;
    out << "round,degenerate,weight_u,mean_u,std_u,weight_f,mean_f,std_f,iterations,"
           "log_likelihood\n";
    for (const auto& r : curve.rounds) {
        if (!r.gmm.has_value()) continue;
        const GmmFit& fit = r.gmm->fit;
        out << r.gmm->round << ',' << (fit.degenerate() ? 1 : 0) << ',';
        if (fit.degenerate()) {
            out << ",,,,,," << fit.iterations << ',' << format_double(fit.final_log_likelihood)
                << '\n';
        } else {
            const Gmm1D& g = *fit.model;
            out << format_double(g.weight_u) << ',' << format_double(g.mean_u) << ','
                << format_double(g.std_u) << ',' << format_double(g.weight_f) << ','
                << format_double(g.mean_f) << ',' << format_double(g.std_f) << ','
                << fit.iterations << ',' << format_double(fit.final_log_likelihood) << '\n';
        }
    }
    return out.str();
}

std::string run_dir_name(const LearningCurve& curve) {
    return curve.strategy + "_s" + std::to_string(curve.seed);
}

ExperimentConfig experiment_for(const KeyValueConfig& cfg, const BuiltDataset& ds) {
    ExperimentConfig ec = experiment_from_config(cfg);
    ec.fixed_test_count = ds.fixed_test_count;
    return ec;
}

// ---- analyze/report input model ----

struct LoadedRun {
    std::string strategy;
    std::uint64_t seed = 0;
    std::string mode;
    fs::path dir;
    std::vector<double> accuracies;                      // per round
    std::vector<std::size_t> seed_set;                   // round-0 train set
    std::vector<std::vector<std::size_t>> batches;       // batch selected at round r
    std::map<std::size_t, std::int64_t> forget_by_idx;   // empty unless oracle dump
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::istringstream in(read_text_file(path));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

LoadedRun load_run(const fs::path& dir, const std::string& strategy, std::uint64_t seed,
                   const std::string& mode) {
    LoadedRun run;
    run.strategy = strategy;
    run.seed = seed;
    run.mode = mode;
    run.dir = dir;

    const auto curve_rows = read_csv(dir / "curve.csv");
    for (std::size_t i = 1; i < curve_rows.size(); ++i) {
        run.accuracies.push_back(std::stod(curve_rows[i][2]));
    }
    run.batches.assign(run.accuracies.size(), {});

    const auto seed_rows = read_csv(dir / "seed_set.csv");
    for (std::size_t i = 1; i < seed_rows.size(); ++i) {
        run.seed_set.push_back(std::stoull(seed_rows[i][0]));
    }

    const auto sel_rows = read_csv(dir / "selections.csv");
    for (std::size_t i = 1; i < sel_rows.size(); ++i) {
        const std::size_t round = std::stoull(sel_rows[i][0]);
        if (round < run.batches.size()) {
            run.batches[round].push_back(std::stoull(sel_rows[i][2]));
        }
    }

    const fs::path events = dir / "events.csv";
    if (fs::exists(events)) {
        const auto rows = read_csv(events);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].size() < 3 || rows[i][2].empty()) continue;
            run.forget_by_idx[std::stoull(rows[i][0])] = std::stoll(rows[i][2]);
        }
    }
    return run;
}

std::vector<LoadedRun> load_suite(const fs::path& suite_dir) {
    const fs::path index = suite_dir / "index.csv";
    if (!fs::exists(index)) {
        throw DataError("not a suite directory (no index.csv): " + suite_dir.string());
    }
    std::vector<LoadedRun> runs;
    const auto rows = read_csv(index);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() < 5 || rows[i][3] != "ok") continue;
        runs.push_back(load_run(suite_dir / rows[i][4], rows[i][0],
                                std::stoull(rows[i][1]), rows[i][2]));
    }
    return runs;
}

std::string suite_dataset_name(const fs::path& suite_dir) {
    const fs::path meta = suite_dir / "suite.txt";
    if (fs::exists(meta)) {
        std::istringstream in(read_text_file(meta));
        std::string line;
        while (std::getline(in, line)) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(0, eq);
            key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
            if (key == "dataset.name") {
                std::string v = line.substr(eq + 1);
                const auto a = v.find_first_not_of(" \t");
                return a == std::string::npos ? v : v.substr(a);
            }
        }
    }
    return "dataset";
}

std::vector<std::string> strategy_order(const std::vector<LoadedRun>& runs) {
    std::vector<std::string> names;
    for (const auto& r : runs) {
        if (std::find(names.begin(), names.end(), r.strategy) == names.end()) {
            names.push_back(r.strategy);
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

std::vector<const LoadedRun*> runs_for(const std::vector<LoadedRun>& runs,
                                       const std::string& strategy) {
    std::vector<const LoadedRun*> out;
    for (const auto& r : runs) {
        if (r.strategy == strategy) out.push_back(&r);
    }
    std::sort(out.begin(), out.end(),
              [](const LoadedRun* a, const LoadedRun* b) { return a->seed < b->seed; });
    return out;
}

}  // namespace

BuiltDataset build_dataset(const KeyValueConfig& cfg) {
    BuiltDataset out;
    const std::string kind = cfg.get_string("dataset.kind", "blobs");
    out.name = cfg.get_string("dataset.name", kind);

    if (kind == "blobs") {
        out.data = synth_blobs(cfg.get_size("dataset.classes", 4),
                               cfg.get_size("dataset.per_class", 250),
                               cfg.get_size("dataset.dim", 2),
                               cfg.get_double("dataset.spread", 1.0),
                               cfg.get_double("dataset.outlier_fraction", 0.0),
                               cfg.get_u64("dataset.seed", 0));
    } else if (kind == "idx") {
        const std::string images = resolve_data_path(cfg.require_string("dataset.path"));
        const std::string labels = resolve_data_path(cfg.require_string("dataset.labels"));
        out.data = load_idx(images, labels);
        if (cfg.has("dataset.test_images")) {
            const Dataset test = load_idx(
                resolve_data_path(cfg.require_string("dataset.test_images")),
                resolve_data_path(cfg.require_string("dataset.test_labels")));
            out.fixed_test_count = test.size();
            out.data = concat_datasets(out.data, test);
        }
    } else if (kind == "csv") {
        out.data = load_csv(resolve_data_path(cfg.require_string("dataset.path")),
                            cfg.get_size("dataset.label_column", 0));
    } else {
        throw ConfigError("dataset.kind must be blobs, idx or csv; got '" + kind + "'");
    }
    return out;
}

void write_run_outputs(const fs::path& dir, const KeyValueConfig& cfg,
                       const BuiltDataset& dataset, const LearningCurve& curve) {
    fs::create_directories(dir);

    std::vector<std::string> outputs = {"curve.csv", "seed_set.csv", "selections.csv",
                                        "events.csv", "summary.txt"};
    const bool has_gmm = curve.strategy == "gauss";
    if (has_gmm) outputs.push_back("gmm.csv");

    std::ostringstream manifest;
    manifest << "artifact.version = " << kArtifactVersion << "\n";
    manifest << "created_utc = " << utc_now() << "\n";
    manifest << "dataset.name = " << dataset.name << "\n";
    manifest << "dataset.hash = " << hex_u64(dataset.data.content_hash()) << "\n";
    manifest << "run.strategy = " << curve.strategy << "\n";
    manifest << "run.seed = " << curve.seed << "\n";
    manifest << "run.mode = "
             << (curve.mode == RunMode::OracleImportance ? "oracle_importance" : "standard")
             << "\n";
    for (const auto& [k, v] : cfg.entries()) manifest << "config." << k << " = " << v << "\n";
    manifest << "outputs = ";
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        manifest << (i > 0 ? "," : "") << outputs[i];
    }
    manifest << "\n";
    atomic_write_file(dir / "manifest.txt", manifest.str());  // manifest lands first

    atomic_write_file(dir / "curve.csv", curve_csv(curve));
    atomic_write_file(dir / "seed_set.csv", seed_set_csv(curve));
    atomic_write_file(dir / "selections.csv", selections_csv(curve));

    const std::vector<std::int64_t>* forgets =
        curve.events.forget_counts.has_value() ? &*curve.events.forget_counts : nullptr;
    atomic_write_file(dir / "events.csv",
                      events_to_csv(curve.events.sample_idx, curve.events.switch_counts,
                                    forgets, curve.events.epochs_seen));
    if (has_gmm) atomic_write_file(dir / "gmm.csv", gmm_csv(curve));

    double wall = 0.0;
    for (const auto& r : curve.rounds) wall += r.wall_seconds;
    std::ostringstream summary;
    summary << "strategy = " << curve.strategy << "\n";
    summary << "seed = " << curve.seed << "\n";
    summary << "rounds_completed = " << (curve.rounds.size() - 1) << "\n";
    summary << "final_train_size = " << curve.rounds.back().train_size << "\n";
    summary << "final_accuracy = " << format_double(curve.rounds.back().test_accuracy) << "\n";
    summary << "wall_seconds = " << format_double(wall) << "\n";
    atomic_write_file(dir / "summary.txt", summary.str());
}

LearningCurve run_single_to_dir(const KeyValueConfig& cfg, const fs::path& out_dir,
                                std::uint64_t seed_offset,
                                std::optional<RunMode> mode_override) {
    const BuiltDataset dataset = build_dataset(cfg);
    ExperimentConfig ec = experiment_for(cfg, dataset);
    if (mode_override.has_value()) ec.mode = *mode_override;

    const Strategy strategy = strategies_from_config(cfg).front();
    const std::uint64_t seed = seeds_from_config(cfg, seed_offset).front();

    LearningCurve curve = ec.mode == RunMode::OracleImportance
                              ? run_oracle_importance(ec, dataset.data, strategy, seed)
                              : run_experiment(ec, dataset.data, strategy, seed);
    write_run_outputs(out_dir, cfg, dataset, curve);
    return curve;
}

SuiteResult run_suite_to_dir(const KeyValueConfig& cfg, const fs::path& out_dir,
                             std::size_t jobs, std::uint64_t seed_offset) {
    const BuiltDataset dataset = build_dataset(cfg);
    const ExperimentConfig ec = experiment_for(cfg, dataset);
    const auto strategies = strategies_from_config(cfg);
    const auto seeds = seeds_from_config(cfg, seed_offset);

    SuiteResult result = run_suite(ec, dataset.data, strategies, seeds, jobs);

    fs::create_directories(out_dir);
    for (const auto& curve : result.curves) {
        write_run_outputs(out_dir / run_dir_name(curve), cfg, dataset, curve);
    }

    std::ostringstream index;
    index << "strategy,seed,mode,status,dir\n";
    for (const auto& curve : result.curves) {
        index << curve.strategy << ',' << curve.seed << ','
              << (curve.mode == RunMode::OracleImportance ? "oracle_importance" : "standard")
              << ",ok," << run_dir_name(curve) << '\n';
    }
    for (const auto& failure : result.failures) {
        index << failure.strategy << ',' << failure.seed << ",,failed,"
              << sanitize_cell(failure.message) << '\n';
    }

    std::ostringstream meta;
    meta << "artifact.version = " << kArtifactVersion << "\n";
    meta << "dataset.name = " << dataset.name << "\n";
    meta << "dataset.hash = " << hex_u64(dataset.data.content_hash()) << "\n";
    for (const auto& [k, v] : cfg.entries()) meta << "config." << k << " = " << v << "\n";
    atomic_write_file(out_dir / "suite.txt", meta.str());
    atomic_write_file(out_dir / "index.csv", index.str());
    return result;
}

void analyze_suite(const fs::path& suite_dir, double kl_sigma) {
    const auto runs = load_suite(suite_dir);
    const auto strategies = strategy_order(runs);
    if (std::find(strategies.begin(), strategies.end(), "random") == strategies.end()) {
        throw MissingBaselineError("suite has no 'random' baseline runs: " +
                                   suite_dir.string());
    }
    const std::string dataset_name = suite_dataset_name(suite_dir);

    // Every curve of a suite must cover the same rounds.
    std::size_t len = 0;
    for (const auto& r : runs) {
        if (len == 0) len = r.accuracies.size();
        if (r.accuracies.size() != len) {
            throw DataError("curve length mismatch across runs in " + suite_dir.string());
        }
    }

    // Mean random curve; per-seed strategy areas are taken against it.
    std::vector<std::vector<double>> random_curves;
    for (const LoadedRun* r : runs_for(runs, "random")) random_curves.push_back(r->accuracies);
    const CurveStats random_stats = curve_mean_and_spread(random_curves);

    std::ostringstream area;
    area << "strategy," << dataset_name << "\n";
    for (const auto& name : strategies) {
        std::vector<double> areas;
        for (const LoadedRun* r : runs_for(runs, name)) {
            areas.push_back(area_under_difference(r->accuracies, random_stats.mean));
        }
        double mean = 0.0;
        for (double a : areas) mean += a;
        mean /= double(areas.size());
        double sd = 0.0;
        if (areas.size() > 1) {
            for (double a : areas) sd += (a - mean) * (a - mean);
            sd = std::sqrt(sd / double(areas.size() - 1));
        }
        area << name << ',' << format_double(mean) << " ± " << format_double(sd) << "\n";
    }
    atomic_write_file(suite_dir / "area_table.csv", area.str());

    // Welch t-test per round against the reference strategy (Table 2 layout).
    const std::string reference =
        std::find(strategies.begin(), strategies.end(), "gauss") != strategies.end()
            ? "gauss"
            : "random";
    const auto ref_runs = runs_for(runs, reference);
    std::ostringstream ttest;
    ttest << "strategy,reference,round,t,df,p,significant\n";
    if (ref_runs.size() >= 2) {
        for (const auto& name : strategies) {
            if (name == reference) continue;
            const auto strat_runs = runs_for(runs, name);
            if (strat_runs.size() < 2) continue;
            for (std::size_t round = 0; round < len; ++round) {
                std::vector<double> a;
                std::vector<double> b;
                for (const LoadedRun* r : strat_runs) a.push_back(r->accuracies[round]);
                for (const LoadedRun* r : ref_runs) b.push_back(r->accuracies[round]);
                const TTestReport rep = welch_t_test(a, b);
                ttest << name << ',' << reference << ',' << round << ','
                      << format_double(rep.t) << ',' << format_double(rep.degrees_of_freedom)
                      << ',' << format_double(rep.p_value) << ','
                      << (rep.significant_at_0p05 ? 1 : 0) << '\n';
            }
        }
    }
    atomic_write_file(suite_dir / "ttest_table.csv", ttest.str());

    // Smoothed-KL matrix over per-round training-set importance histograms,
    // scored by frozen forgetting counts. Needs oracle-importance dumps.
    std::map<std::uint64_t, const LoadedRun*> scores_by_seed;
    for (const auto& r : runs) {
        if (!r.forget_by_idx.empty() && scores_by_seed.count(r.seed) == 0) {
            scores_by_seed[r.seed] = &r;
        }
    }
    if (!scores_by_seed.empty()) {
        auto trainset_hist = [&](const LoadedRun& run, std::size_t round,
                                 const std::map<std::size_t, std::int64_t>& scores) {
            std::vector<std::int64_t> vals;
            auto add = [&](std::size_t idx) {
                auto it = scores.find(idx);
                if (it != scores.end()) vals.push_back(it->second);
            };
            for (std::size_t idx : run.seed_set) add(idx);
            for (std::size_t r = 0; r < round; ++r) {
                for (std::size_t idx : run.batches[r]) add(idx);
            }
            return importance_histogram(vals);
        };

        std::ostringstream kl;
        kl << "strategy";
        for (const auto& name : strategies) kl << ',' << name;
        kl << ",sigma\n";
        for (const auto& row_name : strategies) {
            kl << row_name;
            for (const auto& col_name : strategies) {
                double acc = 0.0;
                std::size_t count = 0;
                for (const LoadedRun* row_run : runs_for(runs, row_name)) {
                    auto score_it = scores_by_seed.find(row_run->seed);
                    if (score_it == scores_by_seed.end()) continue;
                    for (const LoadedRun* col_run : runs_for(runs, col_name)) {
                        if (col_run->seed != row_run->seed) continue;
                        const auto& scores = score_it->second->forget_by_idx;
                        for (std::size_t round = 0; round < len; ++round) {
                            acc += smoothed_kl(trainset_hist(*row_run, round, scores),
                                               trainset_hist(*col_run, round, scores),
                                               kl_sigma);
                            ++count;
                        }
                    }
                }
                kl << ',' << (count > 0 ? format_double(acc / double(count)) : "");
            }
            kl << ',' << format_double(kl_sigma) << '\n';
        }
        atomic_write_file(suite_dir / "kl_matrix.csv", kl.str());
    }
}

void report_suite(const fs::path& suite_dir) {
    if (!fs::exists(suite_dir / "index.csv")) {
        throw ReportError("not a suite directory: " + suite_dir.string());
    }
    if (!fs::exists(suite_dir / "area_table.csv")) {
        throw ReportError("suite has not been analyzed (run analyze first): " +
                          suite_dir.string());
    }
    const auto runs = load_suite(suite_dir);
    if (runs.empty()) throw ReportError("suite contains no successful runs");

    std::ostringstream out;
    out << "round,strategy,mean_acc,std_acc\n";
    for (const auto& name : strategy_order(runs)) {
        std::vector<std::vector<double>> curves;
        for (const LoadedRun* r : runs_for(runs, name)) curves.push_back(r->accuracies);
        const CurveStats stats = curve_mean_and_spread(curves);
        for (std::size_t round = 0; round < stats.mean.size(); ++round) {
            out << round << ',' << name << ',' << format_double(stats.mean[round]) << ','
                << format_double(stats.stddev[round]) << '\n';
        }
    }
    atomic_write_file(suite_dir / "report.csv", out.str());
}

}  // namespace gauss
