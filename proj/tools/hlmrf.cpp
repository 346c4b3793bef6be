#include <iostream>

#include <CLI11.hpp>

#include "hlmrf/pipeline.hpp"

int main(int argc, char** argv) {
    hlmrf::PipelineOptions options;
    CLI::App app{"Hinge-loss MRF grounding, inference, learning and evaluation"};
    app.require_subcommand(1, 1);

    for (const char* name : {"ground", "infer", "learn", "eval"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--model", options.model, "model file")->required()->check(CLI::ExistingFile);
        sub->add_option("--data", options.data, "data directory")->required()->check(CLI::ExistingDirectory);
        sub->add_option("--out", options.out, "output directory")->capture_default_str();
        sub->add_option("--rho", options.rho, "ADMM step size")->capture_default_str();
        sub->add_option("--max-iters", options.max_iterations, "ADMM iteration limit")->capture_default_str();
        sub->add_option("--seed", options.seed, "random seed")->capture_default_str();
        sub->add_flag("--deterministic", options.deterministic, "sequential, reproducible solver sweeps");
        sub->add_option("--method", options.method, "learning method")
            ->check(CLI::IsMember({"mle", "mple", "lme"}))
            ->capture_default_str();
        sub->add_option("--weights", options.weights, "weights.tsv to use for inference");
        sub->add_option("--predictions", options.predictions, "inferred.tsv to evaluate");
        sub->add_option("--truth", options.truth, "truth directory");
    }

    CLI11_PARSE(app, argc, argv);
    options.command = app.get_subcommands().front()->get_name();
    return hlmrf::run_pipeline(options, std::cerr);
}
