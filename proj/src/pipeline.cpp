#include "hlmrf/pipeline.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hlmrf/admm.hpp"
#include "hlmrf/errors.hpp"
#include "hlmrf/grounding.hpp"
#include "hlmrf/learn_likelihood.hpp"
#include "hlmrf/learn_margin.hpp"
#include "hlmrf/metrics.hpp"
#include "hlmrf/model_file.hpp"

namespace hlmrf {

namespace fs = std::filesystem;

std::string format_decimal(double value) {
    if (value == 0.0) value = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    std::string s(buf);
    if (s == "-0.000000") s = "0.000000";
    return s;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    for (std::string f; in >> f;) fields.push_back(f);
    return fields;
}

double to_double(const std::string& text, const fs::path& file, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw DataError(file.string() + ":" + std::to_string(line_no) + ": cannot parse number '" + text + "'");
    }
    return v;
}

template <typename Fn>
void read_rows(const fs::path& file, Fn&& fn) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_fields(line);
        if (fields.empty() || fields.front().front() == '#') continue;
        fn(fields, line_no);
    }
}

std::ofstream open_output(const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write " + file.string());
    return out;
}

struct Loaded {
    ModelFile file;
    Database db;
    GroundModel model;
};

Loaded load(const PipelineOptions& options) {
    std::ifstream in(options.model);
    if (!in) throw DataError("cannot open model file " + options.model.string());
    std::stringstream text;
    text << in.rdbuf();
    auto file = parse_model_file(text.str());
    if (!fs::is_directory(options.data)) throw DataError("data directory not found: " + options.data.string());
    auto db = load_database(file.predicates, options.data);
    auto model = ground_model(file.templates, file.constraints, db, file.templates.size());
    return {std::move(file), std::move(db), std::move(model)};
}

AdmmConfig admm_config(const PipelineOptions& options) {
    AdmmConfig cfg;
    cfg.rho = options.rho;
    cfg.max_iterations = options.max_iterations;
    cfg.deterministic = options.deterministic;
    cfg.validate();
    return cfg;
}

fs::path truth_dir(const PipelineOptions& options) {
    auto dir = options.truth.value_or(options.data / "truth");
    if (!fs::is_directory(dir)) throw DataError("truth directory not found: " + dir.string());
    return dir;
}

void write_diagnostics(const fs::path& file, const std::vector<std::pair<std::string, std::string>>& rows) {
    auto out = open_output(file);
    for (const auto& [key, value] : rows) out << key << '\t' << value << '\n';
}

void warn_unconverged(std::ostream& diagnostics, const std::string& what) {
    diagnostics << "warning: " << what << " did not converge; see diagnostics.tsv\n";
}

int command_ground(const PipelineOptions& options) {
    const auto loaded = load(options);
    auto out = open_output(options.out / "ground.tsv");
    out << "variables\t" << loaded.model.num_variables() << '\n';
    out << "constraints\t" << loaded.model.constraints().size() << '\n';
    for (std::size_t q = 0; q < loaded.model.template_count(); ++q) {
        out << "template_" << q << '\t' << loaded.model.grounding_count(q) << '\n';
    }
    return 0;
}

int command_infer(const PipelineOptions& options, std::ostream& diagnostics) {
    const auto loaded = load(options);
    auto weights = loaded.file.weights(1.0);
    if (options.weights) weights = read_weights_file(*options.weights, weights);
    const auto result = mpe_infer(loaded.model, weights, admm_config(options));

    auto out = open_output(options.out / "inferred.tsv");
    for (std::size_t v = 0; v < loaded.db.num_targets(); ++v) {
        const auto& atom = loaded.db.target_atom(v);
        out << loaded.db.predicates()[atom.predicate].name;
        for (const auto& a : atom.arguments) out << '\t' << a;
        out << '\t' << format_decimal(result.assignment[v]) << '\n';
    }
    const auto& d = result.diagnostics;
    write_diagnostics(options.out / "diagnostics.tsv",
                      {{"command", "infer"},
                       {"iterations", std::to_string(d.iterations)},
                       {"primal_residual", format_decimal(d.primal_residual)},
                       {"dual_residual", format_decimal(d.dual_residual)},
                       {"energy", format_decimal(d.energy)},
                       {"max_violation", format_decimal(max_constraint_violation(loaded.model, result.assignment))},
                       {"converged", d.converged ? "1" : "0"}});
    if (!d.converged) warn_unconverged(diagnostics, "inference");
    return 0;
}

int command_learn(const PipelineOptions& options, std::ostream& diagnostics) {
    const auto loaded = load(options);
    const auto truth = load_truth(loaded.db, truth_dir(options));
    const auto infer_cfg = admm_config(options);
    const auto initial = loaded.file.weights(1.0);
    const auto learnable = loaded.file.learnable();

    TemplateWeights learned;
    std::vector<std::pair<std::string, std::string>> diag{{"command", "learn"}, {"method", options.method}};
    bool converged = true;
    if (options.method == "mle" || options.method == "mple") {
        PerceptronConfig cfg;
        cfg.learnable = learnable;
        TrainingResult result;
        if (options.method == "mle") {
            result = mle_train(loaded.model, truth, cfg, infer_cfg, initial);
        } else {
            MpleConfig mple;
            mple.seed = options.seed;
            result = mple_train(loaded.model, truth, cfg, mple, initial);
        }
        learned = result.weights;
        diag.emplace_back("steps", std::to_string(result.steps));
        diag.emplace_back("unconverged_inferences", std::to_string(result.unconverged_inferences));
        converged = result.unconverged_inferences == 0;
    } else if (options.method == "lme") {
        LmeConfig cfg;
        cfg.learnable = learnable;
        const auto result = lme_train(loaded.model, truth, cfg, infer_cfg, initial);
        learned = result.weights;
        diag.emplace_back("oracle_calls", std::to_string(result.oracle_calls));
        diag.emplace_back("cuts", std::to_string(result.cuts.size()));
        diag.emplace_back("slack", format_decimal(result.slack));
        converged = result.converged;
    } else {
        throw std::invalid_argument("unknown learning method '" + options.method + "'");
    }
    diag.emplace_back("converged", converged ? "1" : "0");

    // Fit of the learned weights: MPE state on the training data against truth.
    const auto fit = mpe_infer(loaded.model, learned, infer_cfg);
    const auto groups = functional_blocks(loaded.file.constraints, loaded.db);
    if (!groups.empty()) {
        diag.emplace_back("train_accuracy", format_decimal(categorical_accuracy(fit.assignment, truth, groups)));
    }
    if (!truth.empty()) diag.emplace_back("train_mse", format_decimal(regression_errors(fit.assignment, truth).mse));

    auto out = open_output(options.out / "weights.tsv");
    for (std::size_t q = 0; q < learned.size(); ++q) out << q << '\t' << format_decimal(learned[q]) << '\n';
    write_diagnostics(options.out / "diagnostics.tsv", diag);
    if (!converged) warn_unconverged(diagnostics, "learning");
    return 0;
}

Assignment read_predictions(const Database& db, const fs::path& file) {
    Assignment values(db.num_targets(), 0.0);
    std::vector<bool> seen(db.num_targets(), false);
    read_rows(file, [&](const std::vector<std::string>& fields, std::size_t line_no) {
        const auto where = file.string() + ":" + std::to_string(line_no);
        const auto p = db.find_predicate(fields.front());
        if (!p || fields.size() != db.predicates()[*p].arity + 2) {
            throw DataError(where + ": row does not match a declared predicate");
        }
        const ConstantTuple args(fields.begin() + 1, fields.end() - 1);
        const auto hit = db.lookup(*p, args);
        if (!hit.is_target) throw DataError(where + ": atom is not a target");
        values[hit.variable] = to_double(fields.back(), file, line_no);
        seen[hit.variable] = true;
    });
    for (std::size_t v = 0; v < seen.size(); ++v) {
        if (!seen[v]) throw DataError(file.string() + ": no prediction for target atom " + std::to_string(v));
    }
    return values;
}

int command_eval(const PipelineOptions& options) {
    const auto loaded = load(options);
    const auto truth = load_truth(loaded.db, truth_dir(options));
    const auto predictions = read_predictions(loaded.db, options.predictions.value_or(options.out / "inferred.tsv"));

    std::vector<std::pair<std::string, double>> metrics;
    const auto groups = functional_blocks(loaded.file.constraints, loaded.db);
    if (!groups.empty()) metrics.emplace_back("accuracy", categorical_accuracy(predictions, truth, groups));

    std::vector<int> labels;
    for (double t : truth) labels.push_back(t >= 0.5 ? 1 : 0);
    std::size_t positives = 0;
    for (int l : labels) positives += static_cast<std::size_t>(l);
    if (positives > 0 && positives < labels.size()) {
        metrics.emplace_back("auc_roc", auc_roc(predictions, labels));
        metrics.emplace_back("auc_pr_positive", auc_pr(predictions, labels, 1));
        metrics.emplace_back("auc_pr_negative", auc_pr(predictions, labels, 0));
    }
    if (!truth.empty()) {
        const auto errors = regression_errors(predictions, truth);
        metrics.emplace_back("mse", errors.mse);
        metrics.emplace_back("mae", errors.mae);
    }
    auto out = open_output(options.out / "metrics.tsv");
    for (const auto& [name, value] : metrics) out << name << '\t' << format_decimal(value) << '\n';
    return 0;
}

}  // namespace

TemplateWeights read_weights_file(const fs::path& file, const TemplateWeights& defaults) {
    auto values = defaults.values();
    read_rows(file, [&](const std::vector<std::string>& fields, std::size_t line_no) {
        const auto where = file.string() + ":" + std::to_string(line_no);
        if (fields.size() != 2) throw DataError(where + ": expected template and weight");
        std::size_t q = 0;
        auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), q);
        if (ec != std::errc() || ptr != fields[0].data() + fields[0].size() || q >= values.size()) {
            throw DataError(where + ": invalid template index " + fields[0]);
        }
        values[q] = to_double(fields[1], file, line_no);
    });
    return TemplateWeights(std::move(values));
}

int run_pipeline(const PipelineOptions& options, std::ostream& diagnostics) {
    try {
        fs::create_directories(options.out);
        if (options.command == "ground") return command_ground(options);
        if (options.command == "infer") return command_infer(options, diagnostics);
        if (options.command == "learn") return command_learn(options, diagnostics);
        if (options.command == "eval") return command_eval(options);
        throw std::invalid_argument("unknown command '" + options.command + "'");
    } catch (const ParseError& e) {
        diagnostics << "error: " << options.model.string() << ": " << e.what() << '\n';
    } catch (const std::exception& e) {
        diagnostics << "error: " << e.what() << '\n';
    }
    return 1;
}

}  // namespace hlmrf
