#include "advfront/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "advfront/attack.hpp"
#include "advfront/data.hpp"
#include "advfront/error.hpp"
#include "advfront/evaluate.hpp"
#include "advfront/frontier.hpp"
#include "advfront/hypervolume.hpp"
#include "advfront/nnet.hpp"
#include "advfront/train.hpp"
#include "advfront/transforms.hpp"

namespace advfront {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

struct CommonFlags {
    std::uint64_t seed = 0;
    std::string norm = "l2";
    double eps = 0.5;
    std::size_t steps = 20;
    double step_size = 0.0;  // 0 selects 2.5 * eps / steps
    std::size_t restarts = 1;
    std::string schedule = "fixed";
    std::size_t levels = 10;
    std::string transform = "identity";
    std::size_t workers = 1;
    std::string out = ".";
    bool warm_start = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--seed", f.seed, "Seed for every random stream")->required();
    cmd->add_option("--norm", f.norm, "Threat model: l2|linf")->capture_default_str();
    cmd->add_option("--eps", f.eps, "Perturbation budget")->capture_default_str();
    cmd->add_option("--steps", f.steps, "PGD steps per attack")->capture_default_str();
    cmd->add_option("--step-size", f.step_size, "PGD step size (default 2.5*eps/steps)");
    cmd->add_option("--restarts", f.restarts, "PGD restarts")->capture_default_str();
    cmd->add_option("--schedule", f.schedule, "Step schedule: fixed|halving")->capture_default_str();
    cmd->add_option("--levels", f.levels, "Number of frontier levels N")->capture_default_str();
    cmd->add_option("--transform", f.transform, "identity|bits:<k>|median:<w>")->capture_default_str();
    cmd->add_option("--workers", f.workers, "Worker threads")->capture_default_str();
    cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
    cmd->add_flag("--warm-start", f.warm_start, "Frontier levels also start from the previous level's best");
}

AttackConfig attack_config(const CommonFlags& f) {
    AttackConfig cfg;
    cfg.norm = parse_norm(f.norm);
    cfg.epsilon = f.eps;
    cfg.steps = f.steps;
    cfg.step_size = f.step_size > 0.0 ? f.step_size : default_step_size(f.eps, f.steps == 0 ? 1 : f.steps);
    cfg.restarts = f.restarts;
    cfg.schedule = parse_schedule(f.schedule);
    cfg.seed = f.seed;
    cfg.warm_start_levels = f.warm_start;
    if (f.step_size < 0.0) {
        throw ConfigError("--step-size: must be > 0");
    }
    if (f.levels < 1) {
        throw ConfigError("--levels: must be >= 1");
    }
    if (f.workers < 1) {
        throw ConfigError("--workers: must be >= 1");
    }
    cfg.validate();
    return cfg;
}

json attack_json(const AttackConfig& cfg) {
    return {{"norm", to_string(cfg.norm)},   {"epsilon", cfg.epsilon},   {"steps", cfg.steps},
            {"step_size", cfg.step_size},    {"restarts", cfg.restarts}, {"schedule", to_string(cfg.schedule)},
            {"seed", cfg.seed},              {"warm_start_levels", cfg.warm_start_levels}};
}

std::string fmt10(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

fs::path prepare_out(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("--out: cannot create directory " + out + ": " + ec.message());
    }
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << text;
}

std::string dump(const json& j) {
    return j.dump(2) + "\n";
}

fs::path require_file(const std::string& path, const char* flag) {
    if (path.empty()) {
        throw ConfigError(std::string(flag) + ": required");
    }
    if (!fs::is_regular_file(path)) {
        throw ConfigError(std::string(flag) + ": file not found: " + path);
    }
    return path;
}

/// Output bookkeeping: the manifest lists every payload file with its format
/// and version; run.json carries the wall-clock timestamp and argv, and is
/// the only file whose bytes change between identical runs.
class OutputSet {
public:
    OutputSet(fs::path dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {}

    void add(const std::string& name, const std::string& format, const std::string& contents) {
        write_text(dir_ / name, contents);
        files_.push_back({{"path", name}, {"format", format}, {"version", kFormatVersion}});
    }

    void finish(const json& config, const std::vector<std::string>& argv, std::size_t workers) {
        json manifest{{"format", "advfront-manifest"},
                      {"version", kFormatVersion},
                      {"command", command_},
                      {"tool_version", kToolVersion},
                      {"config", config},
                      {"files", files_}};
        write_text(dir_ / "manifest.json", dump(manifest));

        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char stamp[32];
        std::tm tm{};
        gmtime_r(&now, &tm);
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
        json run{{"format", "advfront-run"}, {"version", kFormatVersion}, {"timestamp", stamp},
                 {"argv", argv},              {"workers", workers}};
        write_text(dir_ / "run.json", dump(run));
    }

private:
    fs::path dir_;
    std::string command_;
    json files_ = json::array();
};

std::vector<std::size_t> parse_sizes(const std::string& text, const char* flag) {
    std::vector<std::size_t> out;
    if (text.empty() || text == "none") {
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v <= 0) {
                throw std::invalid_argument(item);
            }
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ConfigError(std::string(flag) + ": cannot parse '" + item + "' as a positive integer");
        }
    }
    return out;
}

// ---------------------------------------------------------------- gen-data

struct GenDataFlags {
    CommonFlags common;
    std::string kind = "blobs";
    std::size_t n_per_class = 200;
    std::size_t classes = 2;
    std::size_t dim = 2;
    double separation = 0.5;
    double noise = 0.1;
    std::size_t side = 8;
    double test_fraction = 0.3;
};

void cmd_gen_data(const GenDataFlags& f, const std::vector<std::string>& argv) {
    LabeledDataset all;
    if (f.kind == "blobs") {
        all = gen_blobs(f.n_per_class, f.classes, f.dim, f.separation, f.noise, f.common.seed);
    } else if (f.kind == "moons") {
        all = gen_moons(f.n_per_class, f.noise, f.common.seed);
    } else if (f.kind == "images") {
        all = gen_images(f.n_per_class, f.classes, f.side, f.noise, f.common.seed);
    } else {
        throw ConfigError("--kind: expected blobs|moons|images, got '" + f.kind + "'");
    }
    auto [train_set, test_set] = split(all, f.test_fraction, f.common.seed);

    const auto dir = prepare_out(f.common.out);
    OutputSet outputs(dir, "gen-data");
    std::ostringstream train_csv;
    write_csv(train_set, train_csv);
    outputs.add("train.csv", "advfront-dataset-csv", train_csv.str());
    std::ostringstream test_csv;
    write_csv(test_set, test_csv);
    outputs.add("test.csv", "advfront-dataset-csv", test_csv.str());
    const json config{{"kind", f.kind},         {"n_per_class", f.n_per_class}, {"classes", all.num_classes},
                      {"dim", all.dim()},        {"separation", f.separation},   {"noise", f.noise},
                      {"side", f.side},          {"test_fraction", f.test_fraction}, {"seed", f.common.seed},
                      {"train_rows", train_set.size()}, {"test_rows", test_set.size()}};
    outputs.finish(config, argv, f.common.workers);
    std::cout << "wrote " << train_set.size() << " train / " << test_set.size() << " test rows to " << dir.string()
              << "\n";
}

// ------------------------------------------------------------------- train

struct TrainFlags {
    CommonFlags common;
    std::string data;
    std::string hidden = "16,16";
    std::string mode = "standard";
    std::string inner = "margin";
    std::size_t epochs = 30;
    std::size_t batch_size = 128;
    double lr = 0.1;
    double momentum = 0.9;
    double beta = 6.0;
};

void cmd_train(const TrainFlags& f, const std::vector<std::string>& argv) {
    const auto dataset = load_csv(require_file(f.data, "--data"));
    if (dataset.size() == 0) {
        throw ConfigError("--data: dataset is empty");
    }
    std::vector<std::size_t> dims{dataset.dim()};
    for (auto h : parse_sizes(f.hidden, "--hidden")) {
        dims.push_back(h);
    }
    dims.push_back(std::max<std::size_t>(dataset.num_classes, 2));

    TrainConfig cfg;
    cfg.epochs = f.epochs;
    cfg.batch_size = f.batch_size;
    cfg.learning_rate = f.lr;
    cfg.momentum = f.momentum;
    cfg.beta = f.beta;
    cfg.mode = parse_train_mode(f.mode);
    cfg.inner = parse_inner_objective(f.inner);
    cfg.attack = attack_config(f.common);
    cfg.seed = f.common.seed;

    auto result = train(make_mlp(dims, f.common.seed), dataset, cfg);

    const auto dir = prepare_out(f.common.out);
    OutputSet outputs(dir, "train");
    outputs.add("model.json", "advfront-model-v1", model_to_json(result.model));
    std::ostringstream log;
    write_train_log_csv(result.log, log);
    outputs.add("train_log.csv", "advfront-train-log-csv", log.str());
    json dims_json = dims;
    const json config{{"data", f.data},     {"dims", dims_json},       {"mode", f.mode},
                      {"inner", f.inner},   {"epochs", f.epochs},      {"batch_size", f.batch_size},
                      {"lr", f.lr},         {"momentum", f.momentum},  {"beta", f.beta},
                      {"attack", attack_json(cfg.attack)},              {"seed", f.common.seed}};
    outputs.finish(config, argv, f.common.workers);
    const auto& last = result.log.back();
    std::cout << "trained " << f.mode << " model: final clean loss " << fmt10(last.clean_loss) << ", train acc "
              << fmt10(last.clean_acc) << "\n";
}

// ---------------------------------------------------------------- frontier

struct EvalFlags {
    CommonFlags common;
    std::vector<std::string> models;
    std::string data;
    bool per_example = false;
};

struct LoadedEval {
    std::vector<MlpModel> models;
    LabeledDataset dataset;
    EvaluationOptions options;
};

LoadedEval load_eval(const EvalFlags& f) {
    if (f.models.empty()) {
        throw ConfigError("--model: at least one model is required");
    }
    LoadedEval out;
    out.dataset = load_csv(require_file(f.data, "--data"));
    if (out.dataset.size() == 0) {
        throw ConfigError("--data: dataset is empty");
    }
    for (const auto& path : f.models) {
        out.models.push_back(load_model(require_file(path, "--model")));
        if (out.models.back().input_dim() != out.dataset.dim()) {
            throw ConfigError("--model: " + path + " expects " + std::to_string(out.models.back().input_dim()) +
                              " features but --data has " + std::to_string(out.dataset.dim()));
        }
        for (int y : out.dataset.labels) {
            if (static_cast<std::size_t>(y) >= out.models.back().num_classes) {
                throw ConfigError("--data: label " + std::to_string(y) + " exceeds the classes of " + path);
            }
        }
    }
    if (!(f.common.eps > 0.0)) {
        throw ConfigError("--eps: must be > 0");
    }
    out.options.epsilon = f.common.eps;
    out.options.n_levels = f.common.levels;
    out.options.attack = attack_config(f.common);
    out.options.transform = InputTransform::parse(f.common.transform, out.dataset.dim());
    out.options.workers = f.common.workers;
    return out;
}

json eval_config_json(const EvalFlags& f, const LoadedEval& loaded) {
    return {{"models", f.models},
            {"data", f.data},
            {"epsilon", loaded.options.epsilon},
            {"n_levels", loaded.options.n_levels},
            {"attack", attack_json(loaded.options.attack)},
            {"transform", loaded.options.transform.describe()},
            {"gradient_rule", to_string(gradient_passthrough(loaded.options.transform))},
            {"seed", f.common.seed}};
}

void cmd_frontier(const EvalFlags& f, const std::vector<std::string>& argv) {
    const auto loaded = load_eval(f);
    AttackConfig attack = loaded.options.attack;
    const auto dir = prepare_out(f.common.out);
    OutputSet outputs(dir, "frontier");
    for (std::size_t k = 0; k < loaded.models.size(); ++k) {
        const auto frontiers = trace_frontiers(loaded.models[k], loaded.dataset, loaded.options.epsilon,
                                               loaded.options.n_levels, attack, loaded.options.transform,
                                               loaded.options.workers);
        std::ostringstream csv;
        write_frontier_csv(frontiers, csv);
        const std::string name = loaded.models.size() == 1 ? "frontier.csv" : "frontier_" + std::to_string(k) + ".csv";
        outputs.add(name, "advfront-frontier-csv", csv.str());
    }
    outputs.finish(eval_config_json(f, loaded), argv, f.common.workers);
    std::cout << "traced " << loaded.dataset.size() << " frontiers per model into " << dir.string() << "\n";
}

// ---------------------------------------------------------------- evaluate

json frontier_json(const AdversarialFrontier& fr, const AhResult& ah) {
    json points = json::array();
    for (const auto& p : fr.points) {
        points.push_back({{"level_index", p.level_index},
                          {"level_fraction", p.level_fraction},
                          {"epsilon", p.epsilon_abs},
                          {"confidence", p.confidence},
                          {"signed_margin", p.signed_margin}});
    }
    return {{"example_id", fr.example_id},
            {"ah", ah.ah},
            {"excluded", ah.excluded},
            {"clean_misclassified", fr.clean_misclassified},
            {"truncated_at", fr.truncated_at ? json(*fr.truncated_at) : json(nullptr)},
            {"points", points}};
}

void cmd_evaluate(const EvalFlags& f, const std::vector<std::string>& argv) {
    const auto loaded = load_eval(f);
    const auto dir = prepare_out(f.common.out);
    OutputSet outputs(dir, "evaluate");
    json reports = json::array();
    for (std::size_t k = 0; k < loaded.models.size(); ++k) {
        const auto report = evaluate_model(loaded.models[k], loaded.dataset, loaded.options);
        const std::string suffix = std::to_string(k);

        std::ostringstream frontier_csv;
        write_frontier_csv(report.frontiers, frontier_csv);
        outputs.add("frontier_" + suffix + ".csv", "advfront-frontier-csv", frontier_csv.str());

        std::ostringstream plot;
        plot << "level_fraction,mean_confidence\n";
        for (std::size_t i = 0; i < report.mean_confidence.size(); ++i) {
            plot << fmt10(static_cast<double>(i) / static_cast<double>(loaded.options.n_levels)) << ','
                 << fmt10(report.mean_confidence[i]) << '\n';
        }
        outputs.add("plot_" + suffix + ".csv", "advfront-plot-csv", plot.str());

        json r{{"model_path", f.models[k]},
               {"dataset", {{"path", f.data}, {"name", loaded.dataset.name}, {"size", loaded.dataset.size()},
                            {"dim", loaded.dataset.dim()}, {"classes", loaded.dataset.num_classes}}},
               {"norm", to_string(loaded.options.attack.norm)},
               {"epsilon", loaded.options.epsilon},
               {"n_levels", loaded.options.n_levels},
               {"clean_accuracy", report.clean_accuracy},
               {"robust_accuracy", report.robust_accuracy},
               {"ah_mean", report.ah.ah_mean},
               {"ah_std", report.ah.ah_std},
               {"excluded_count", report.ah.count_excluded},
               {"included_count", report.ah.count_included},
               {"all_excluded_warning", report.ah.all_excluded},
               {"attack", attack_json(loaded.options.attack)},
               {"transform", loaded.options.transform.describe()},
               {"gradient_rule", to_string(gradient_passthrough(loaded.options.transform))},
               {"frontier_csv", "frontier_" + suffix + ".csv"},
               {"plot_csv", "plot_" + suffix + ".csv"},
               {"tool_version", kToolVersion},
               {"seed", f.common.seed}};
        if (f.per_example) {
            json per = json::array();
            for (std::size_t i = 0; i < report.frontiers.size(); ++i) {
                per.push_back(frontier_json(report.frontiers[i], report.per_example[i]));
            }
            r["per_example"] = per;
        }
        if (report.ah.all_excluded) {
            std::cerr << "warning: every example of " << f.models[k] << " is misclassified; AH reported as 0\n";
        }
        std::cout << f.models[k] << ": clean " << fmt10(report.clean_accuracy) << "%, robust "
                  << fmt10(report.robust_accuracy) << "%, AH " << fmt10(report.ah.ah_mean) << " +- "
                  << fmt10(report.ah.ah_std) << "\n";
        reports.push_back(std::move(r));
    }
    const json doc{{"format", "advfront-eval-report"}, {"version", kFormatVersion}, {"reports", reports}};
    outputs.add("report.json", "advfront-eval-report", dump(doc));
    outputs.finish(eval_config_json(f, loaded), argv, f.common.workers);
}

// ---------------------------------------------------------------- converge

struct ConvergeFlags {
    CommonFlags common;
    std::string model;
    std::string data;
    std::string synthetic = "none";
    std::size_t proxy = 0;  // 0 selects 20 (attack) or 128 (synthetic)
    std::string n_values;
};

void cmd_converge(const ConvergeFlags& f, const std::vector<std::string>& argv) {
    const bool synthetic = f.synthetic != "none";
    const std::size_t proxy = f.proxy != 0 ? f.proxy : (synthetic ? 128 : 20);
    auto n_values = parse_sizes(f.n_values, "--n-values");
    if (n_values.empty()) {
        if (synthetic) {
            for (std::size_t n = 2; n < proxy; n *= 2) {
                n_values.push_back(n);
            }
        } else {
            for (std::size_t n = 1; n < proxy; ++n) {
                n_values.push_back(n);
            }
        }
    }
    if (!(f.common.eps > 0.0)) {
        throw ConfigError("--eps: must be > 0");
    }

    ConvergenceFit fit;
    json config{{"epsilon", f.common.eps}, {"n_proxy", proxy}, {"n_values", n_values}, {"synthetic", f.synthetic},
                {"seed", f.common.seed}};
    if (synthetic) {
        std::function<double(double)> curve;
        if (f.synthetic == "linear") {
            curve = [](double t) { return 1.0 - t; };
        } else if (f.synthetic == "constant") {
            curve = [](double) { return 0.5; };
        } else {
            throw ConfigError("--synthetic: expected none|linear|constant, got '" + f.synthetic + "'");
        }
        fit = convergence_from_curve(curve, f.common.eps, proxy, n_values);
    } else {
        EvalFlags ef;
        ef.common = f.common;
        ef.models = {f.model};
        ef.data = f.data;
        const auto loaded = load_eval(ef);
        fit = convergence_experiment(loaded.models[0], loaded.dataset, loaded.options.epsilon, proxy, n_values,
                                     loaded.options.attack, loaded.options.transform, loaded.options.workers);
        config["model"] = f.model;
        config["data"] = f.data;
        config["attack"] = attack_json(loaded.options.attack);
        config["transform"] = loaded.options.transform.describe();
    }

    const auto dir = prepare_out(f.common.out);
    OutputSet outputs(dir, "converge");
    std::ostringstream csv;
    csv << "n_levels,ah,observed_error,fitted_bound\n";
    json samples = json::array();
    for (std::size_t i = 0; i < fit.samples.size(); ++i) {
        const auto& s = fit.samples[i];
        csv << s.n_levels << ',' << fmt10(s.ah) << ',' << fmt10(s.observed_error) << ',' << fmt10(fit.bound_curve[i])
            << '\n';
        samples.push_back({{"n_levels", s.n_levels}, {"ah", s.ah}, {"observed_error", s.observed_error},
                           {"fitted_bound", fit.bound_curve[i]}});
    }
    outputs.add("convergence.csv", "advfront-convergence-csv", csv.str());
    const json doc{{"format", "advfront-convergence"},
                   {"version", kFormatVersion},
                   {"epsilon", fit.epsilon},
                   {"n_proxy", fit.n_proxy},
                   {"l0_fit", fit.l0_fit},
                   {"loglog_slope", loglog_slope(fit.samples)},
                   {"samples", samples}};
    outputs.add("convergence.json", "advfront-convergence", dump(doc));
    outputs.finish(config, argv, f.common.workers);
    std::cout << "fitted L0 = " << fmt10(fit.l0_fit) << "\n";
}

// Expands `--config <file>` into `--key=value` tokens placed right after the
// subcommand name, so that explicit flags (which come later) win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::vector<std::string> injected;
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string file;
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) {
                throw ConfigError("--config: missing file name");
            }
            file = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            file = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
            continue;
        }
        std::ifstream in(file);
        if (!in) {
            throw ConfigError("--config: cannot open " + file);
        }
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("--config: " + file + " line " + std::to_string(line_no) + " is not key=value");
            }
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                const auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
            };
            std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.rfind("--", 0) == 0) {
                key = key.substr(2);
            }
            injected.push_back("--" + key + "=" + value);
        }
    }
    if (injected.empty() || rest.empty()) {
        return rest;
    }
    std::vector<std::string> out{rest.front()};
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args) {
    CLI::App app{"Adversarial frontier and hypervolume toolkit"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", kToolVersion);

    GenDataFlags gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset and split it");
    add_common(gen_cmd, gen.common);
    gen_cmd->add_option("--kind", gen.kind, "blobs|moons|images")->capture_default_str();
    gen_cmd->add_option("--n-per-class", gen.n_per_class, "Samples per class")->capture_default_str();
    gen_cmd->add_option("--classes", gen.classes, "Number of classes")->capture_default_str();
    gen_cmd->add_option("--dim", gen.dim, "Feature dimension (blobs)")->capture_default_str();
    gen_cmd->add_option("--separation", gen.separation, "Distance between class centres (blobs)")
        ->capture_default_str();
    gen_cmd->add_option("--noise", gen.noise, "Gaussian noise sigma")->capture_default_str();
    gen_cmd->add_option("--side", gen.side, "Image side (images)")->capture_default_str();
    gen_cmd->add_option("--test-fraction", gen.test_fraction, "Held-out fraction")->capture_default_str();

    TrainFlags tr;
    auto* train_cmd = app.add_subcommand("train", "Train a model (standard, TRADES or ascending-budget)");
    add_common(train_cmd, tr.common);
    train_cmd->add_option("--data", tr.data, "Training CSV")->required();
    train_cmd->add_option("--hidden", tr.hidden, "Comma-separated hidden widths, or none")->capture_default_str();
    train_cmd->add_option("--mode", tr.mode, "standard|trades_fixed|ah_ascending")->capture_default_str();
    train_cmd->add_option("--inner", tr.inner, "Inner adversary objective: margin|kl")->capture_default_str();
    train_cmd->add_option("--epochs", tr.epochs, "Epochs T")->capture_default_str();
    train_cmd->add_option("--batch-size", tr.batch_size, "Mini-batch size")->capture_default_str();
    train_cmd->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
    train_cmd->add_option("--momentum", tr.momentum, "SGD momentum")->capture_default_str();
    train_cmd->add_option("--beta", tr.beta, "TRADES KL weight")->capture_default_str();

    EvalFlags fr;
    auto* frontier_cmd = app.add_subcommand("frontier", "Trace adversarial frontiers to CSV");
    add_common(frontier_cmd, fr.common);
    frontier_cmd->add_option("--model", fr.models, "Model checkpoint(s)")
        ->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    frontier_cmd->add_option("--data", fr.data, "Dataset CSV")->required();

    EvalFlags ev;
    auto* eval_cmd = app.add_subcommand("evaluate", "Clean/robust accuracy and adversarial hypervolume report");
    add_common(eval_cmd, ev.common);
    eval_cmd->add_option("--model", ev.models, "Model checkpoint(s)")
        ->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    eval_cmd->add_option("--data", ev.data, "Dataset CSV")->required();
    eval_cmd->add_flag("--per-example", ev.per_example, "Embed every frontier in report.json");

    ConvergeFlags cv;
    auto* conv_cmd = app.add_subcommand("converge", "AH convergence experiment and L0 fit");
    add_common(conv_cmd, cv.common);
    conv_cmd->add_option("--model", cv.model, "Model checkpoint");
    conv_cmd->add_option("--data", cv.data, "Dataset CSV");
    conv_cmd->add_option("--synthetic", cv.synthetic, "none|linear|constant (bypass the attack)")
        ->capture_default_str();
    conv_cmd->add_option("--proxy", cv.proxy, "Level count used as ground truth (default 20, 128 synthetic)");
    conv_cmd->add_option("--n-values", cv.n_values, "Comma-separated N values");

    std::vector<std::string> args;
    try {
        args = expand_config(raw_args);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*gen_cmd) {
            cmd_gen_data(gen, args);
        } else if (*train_cmd) {
            cmd_train(tr, args);
        } else if (*frontier_cmd) {
            cmd_frontier(fr, args);
        } else if (*eval_cmd) {
            cmd_evaluate(ev, args);
        } else if (*conv_cmd) {
            if (cv.synthetic == "none" && (cv.model.empty() || cv.data.empty())) {
                throw ConfigError("--model/--data: required unless --synthetic is given");
            }
            cmd_converge(cv, args);
        }
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run_cli(args);
}

}  // namespace advfront
