#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cutph/continuous.hpp"
#include "cutph/discrete.hpp"
#include "cutph/em.hpp"
#include "cutph/gof.hpp"
#include "cutph/io.hpp"
#include "cutph/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

const char* kGeneratorNames[] = {"mixture-6.1", "frechet-6.2"};

// One flat record of every setting; a JSON config file provides defaults and
// command-line flags override individual fields. The effective record is
// echoed into every output file so runs can be reproduced from the outputs.
struct RunConfig {
    std::string input;
    std::string model_path;
    std::string out;
    std::string csv_out;
    std::string label = "model";
    std::string generator;
    std::string structure = "erlang";
    int phases = 1;
    std::vector<double> cutpoints;
    double epsilon = 1e-6;
    int max_iterations = 5000;
    int quadrature_nodes = 64;
    std::uint64_t seed = 1;
    std::size_t size = 200;
    double x_min = 0.0;
    double x_max = 0.0;  // 0 = auto (0.999 quantile)
    int points = 512;
    int bootstrap = 999;
    std::vector<std::vector<double>> cutpoint_grids;
};

void apply_config_file(const std::string& path, RunConfig& cfg) {
    const nlohmann::json doc = cutph::load_json_file(path);
    const auto get = [&doc](const char* key, auto& field) {
        if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("input", cfg.input);
    get("model", cfg.model_path);
    get("out", cfg.out);
    get("csv_out", cfg.csv_out);
    get("label", cfg.label);
    get("generator", cfg.generator);
    get("structure", cfg.structure);
    get("phases", cfg.phases);
    get("cutpoints", cfg.cutpoints);
    get("epsilon", cfg.epsilon);
    get("max_iterations", cfg.max_iterations);
    get("quadrature_nodes", cfg.quadrature_nodes);
    get("seed", cfg.seed);
    get("size", cfg.size);
    get("x_min", cfg.x_min);
    get("x_max", cfg.x_max);
    get("points", cfg.points);
    get("bootstrap", cfg.bootstrap);
    get("cutpoint_grids", cfg.cutpoint_grids);
}

nlohmann::json config_echo(const RunConfig& cfg, const std::string& command) {
    nlohmann::json doc;
    doc["command"] = command;
    doc["input"] = cfg.input;
    doc["model"] = cfg.model_path;
    doc["out"] = cfg.out;
    doc["label"] = cfg.label;
    doc["generator"] = cfg.generator;
    doc["structure"] = cfg.structure;
    doc["phases"] = cfg.phases;
    doc["cutpoints"] = cfg.cutpoints;
    doc["epsilon"] = cfg.epsilon;
    doc["max_iterations"] = cfg.max_iterations;
    doc["quadrature_nodes"] = cfg.quadrature_nodes;
    doc["seed"] = cfg.seed;
    doc["size"] = cfg.size;
    doc["x_min"] = cfg.x_min;
    doc["x_max"] = cfg.x_max;
    doc["points"] = cfg.points;
    doc["bootstrap"] = cfg.bootstrap;
    doc["cutpoint_grids"] = cfg.cutpoint_grids;
    return doc;
}

cutph::FitStructure parse_structure(const std::string& name) {
    if (name == "general") return cutph::FitStructure::general;
    if (name == "erlang") return cutph::FitStructure::erlang;
    throw std::runtime_error("unknown structure '" + name +
                             "' (expected general or erlang)");
}

cutph::FitConfig fit_config_of(const RunConfig& cfg) {
    cutph::FitConfig fc;
    fc.structure = parse_structure(cfg.structure);
    fc.phases = cfg.phases;
    fc.cutpoints = cfg.cutpoints;
    fc.epsilon = cfg.epsilon;
    fc.max_iterations = cfg.max_iterations;
    fc.quadrature_nodes = cfg.quadrature_nodes;
    fc.seed = cfg.seed;
    return fc;
}

std::vector<double> load_positive_data(const std::string& path) {
    std::vector<double> data = cutph::read_value_csv(path);
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!(data[i] > 0.0))
            throw std::runtime_error(path + ": observation row " +
                                     std::to_string(i + 1) +
                                     " is not positive (" +
                                     cutph::format_double(data[i]) + ")");
    return data;
}

// Accepts a model document or a fit-result document (model nested under
// "model"), so fit outputs feed straight into eval/gof/simulate.
cutph::AnyModel load_model(const std::string& path) {
    nlohmann::json doc = cutph::load_json_file(path);
    if (!doc.contains("kind") && doc.contains("model")) doc = doc.at("model");
    return cutph::model_from_json(doc);
}

cutph::ContinuousCutpointModel load_continuous_model(const std::string& path) {
    cutph::AnyModel any = load_model(path);
    if (!std::holds_alternative<cutph::ContinuousCutpointModel>(any))
        throw std::runtime_error(path + ": expected a continuous model");
    return std::get<cutph::ContinuousCutpointModel>(std::move(any));
}

void require(bool cond, const std::string& message) {
    if (!cond) throw std::runtime_error(message);
}

// ---------------------------------------------------------------------------

int cmd_fit(const RunConfig& cfg) {
    require(!cfg.input.empty(), "fit: --input is required");
    require(!cfg.out.empty(), "fit: --out is required");
    const std::vector<double> data = load_positive_data(cfg.input);
    const cutph::FitConfig fc = fit_config_of(cfg);

    cutph::FitResult result = fc.structure == cutph::FitStructure::erlang
                                  ? cutph::fit_erlang(data, fc)
                                  : cutph::fit(data, fc);

    nlohmann::json doc = cutph::to_json(result);
    doc["config"] = config_echo(cfg, "fit");
    cutph::save_json_file(cfg.out, doc);

    std::cout << "fit: logL = " << cutph::format_double(result.log_likelihood)
              << ", iterations = " << result.iterations
              << ", converged = " << (result.converged ? "yes" : "no") << '\n'
              << "model written to " << cfg.out << '\n';
    return result.converged ? kExitOk : kExitNotConverged;
}

int cmd_simulate(const RunConfig& cfg) {
    require(!cfg.out.empty(), "simulate: --out is required");
    require(cfg.size > 0, "simulate: --size must be >= 1");

    std::vector<double> values;
    std::vector<long> steps;
    bool discrete = false;
    if (!cfg.generator.empty()) {
        if (cfg.generator == "mixture-6.1")
            values = cutph::generate_mixture_dataset(cfg.seed, cfg.size);
        else if (cfg.generator == "frechet-6.2")
            values = cutph::generate_frechet_dataset(cfg.seed, cfg.size);
        else {
            std::string names;
            for (const char* n : kGeneratorNames)
                names += std::string(names.empty() ? "" : ", ") + n;
            throw std::runtime_error("unknown generator '" + cfg.generator +
                                     "' (valid: " + names + ")");
        }
    } else {
        require(!cfg.model_path.empty(),
                "simulate: --model or --generator is required");
        cutph::AnyModel any = load_model(cfg.model_path);
        if (std::holds_alternative<cutph::ContinuousCutpointModel>(any)) {
            values = cutph::sample_continuous(
                std::get<cutph::ContinuousCutpointModel>(any), cfg.seed,
                cfg.size);
        } else {
            discrete = true;
            steps = cutph::sample_discrete(
                std::get<cutph::DiscreteCutpointModel>(any), cfg.seed, cfg.size);
        }
    }
    if (discrete) {
        values.assign(steps.begin(), steps.end());
    }
    cutph::write_value_csv(cfg.out, values,
                           "config: " + config_echo(cfg, "simulate").dump());
    std::cout << "simulate: " << values.size() << " observations written to "
              << cfg.out << '\n';
    return kExitOk;
}

int cmd_eval(const RunConfig& cfg) {
    require(!cfg.model_path.empty(), "eval: --model is required");
    require(!cfg.out.empty(), "eval: --out is required");
    require(cfg.points >= 2, "eval: --points must be >= 2");

    cutph::AnyModel any = load_model(cfg.model_path);
    std::ofstream out(cfg.out, std::ios::binary);
    require(static_cast<bool>(out), "cannot open " + cfg.out + " for writing");
    out << "# config: " << config_echo(cfg, "eval").dump() << '\n';

    if (std::holds_alternative<cutph::ContinuousCutpointModel>(any)) {
        const cutph::ContinuousMeasures measures(
            std::get<cutph::ContinuousCutpointModel>(any));
        double hi = cfg.x_max;
        if (!(hi > cfg.x_min)) hi = measures.quantile(0.999);
        out << "x,pdf,cdf,survival,cumhazard\n";
        bool warned = false;
        for (int i = 0; i < cfg.points; ++i) {
            const double x =
                cfg.x_min + (hi - cfg.x_min) * i / (cfg.points - 1);
            const double s = measures.survival(x);
            out << cutph::format_double(x) << ','
                << cutph::format_double(x > 0.0 ? measures.pdf(x) : 0.0) << ','
                << cutph::format_double(measures.cdf(x)) << ','
                << cutph::format_double(s) << ',';
            if (s > 0.0) {
                out << cutph::format_double(-std::log(s));
            } else if (!warned) {
                std::cerr << "warning: survival underflowed at x = " << x
                          << "; cumhazard left empty\n";
                warned = true;
            }
            out << '\n';
        }
    } else {
        const cutph::DiscreteMeasures measures(
            std::get<cutph::DiscreteCutpointModel>(any));
        long hi = static_cast<long>(cfg.x_max);
        if (hi < 1) {
            hi = 1;
            while (measures.survival(hi) > 0.001 && hi < 1000000) ++hi;
        }
        out << "k,pmf,cdf,survival\n";
        for (long k = 1; k <= hi; ++k)
            out << k << ',' << cutph::format_double(measures.pmf(k)) << ','
                << cutph::format_double(measures.cdf(k)) << ','
                << cutph::format_double(measures.survival(k)) << '\n';
    }
    std::cout << "eval: curves written to " << cfg.out << '\n';
    return kExitOk;
}

int cmd_gof(const RunConfig& cfg) {
    require(!cfg.input.empty(), "gof: --input is required");
    require(!cfg.model_path.empty(), "gof: --model is required");
    require(!cfg.out.empty(), "gof: --out is required");
    const std::vector<double> data = load_positive_data(cfg.input);
    const cutph::ContinuousCutpointModel model =
        load_continuous_model(cfg.model_path);
    const cutph::FitConfig fc = fit_config_of(cfg);
    const cutph::FitStructure structure = fc.structure;

    const cutph::RefitProcedure refit =
        [&fc, structure](const std::vector<double>& replicate) {
            return (structure == cutph::FitStructure::erlang
                        ? cutph::fit_erlang(replicate, fc)
                        : cutph::fit(replicate, fc))
                .model;
        };

    const cutph::ContinuousMeasures measures(model);
    const auto cdf = [&measures](double x) { return measures.cdf(x); };

    cutph::GofReport report;
    report.ks_statistic = cutph::ks_statistic(data, cdf);
    report.ad_statistic = cutph::ad_statistic(data, cdf);
    report.ks_pvalue = cutph::bootstrap_pvalue(data, model, refit,
                                               cutph::GofStatistic::ks,
                                               cfg.bootstrap, cfg.seed);
    report.ad_pvalue = cutph::bootstrap_pvalue(data, model, refit,
                                               cutph::GofStatistic::ad,
                                               cfg.bootstrap, cfg.seed + 1);
    report.bootstrap_replicates = cfg.bootstrap;
    report.loglik = cutph::log_likelihood(data, model);
    report.parameter_count = cutph::parameter_count(
        structure, static_cast<int>(model.order()), model.cut_count());

    nlohmann::json doc = cutph::to_json(report);
    doc["label"] = cfg.label;
    doc["config"] = config_echo(cfg, "gof");
    cutph::save_json_file(cfg.out, doc);

    // one comparison row alongside the report
    std::string csv_path = cfg.csv_out;
    if (csv_path.empty()) {
        csv_path = cfg.out;
        const auto dot = csv_path.rfind('.');
        if (dot != std::string::npos) csv_path.resize(dot);
        csv_path += ".csv";
    }
    cutph::FittedModelSummary summary;
    summary.label = cfg.label;
    summary.structure = structure;
    summary.model = model;
    summary.gof = report;
    summary.data_hash = cutph::hash_data(data);
    const std::vector<cutph::ComparisonRow> rows = cutph::compare_models(
        data, std::span<const cutph::FittedModelSummary>(&summary, 1));
    std::ofstream csv(csv_path, std::ios::binary);
    require(static_cast<bool>(csv), "cannot open " + csv_path + " for writing");
    csv << "# config: " << config_echo(cfg, "gof").dump() << '\n';
    csv << "label,params,loglik,ks_stat,ks_p,ad_stat,ad_p\n";
    for (const auto& row : rows)
        csv << row.label << ',' << row.params << ','
            << cutph::format_double(row.loglik) << ','
            << cutph::format_double(row.ks_stat) << ','
            << cutph::format_double(row.ks_p) << ','
            << cutph::format_double(row.ad_stat) << ','
            << cutph::format_double(row.ad_p) << '\n';

    std::cout << "gof: K-S " << cutph::format_double(report.ks_statistic)
              << " (p = " << cutph::format_double(report.ks_pvalue) << "), A-D "
              << cutph::format_double(report.ad_statistic)
              << " (p = " << cutph::format_double(report.ad_pvalue) << ")\n"
              << "report written to " << cfg.out << " and " << csv_path << '\n';
    return kExitOk;
}

int cmd_grid(const RunConfig& cfg) {
    require(!cfg.input.empty(), "grid: --input is required");
    require(!cfg.out.empty(), "grid: --out is required");
    require(!cfg.cutpoint_grids.empty(),
            "grid: cut-point grids are required (--grids or config)");
    const std::vector<double> data = load_positive_data(cfg.input);
    const cutph::FitConfig fc = fit_config_of(cfg);

    const cutph::GridSearchResult result =
        cutph::grid_search_cutpoints(data, cfg.cutpoint_grids, fc);

    std::string csv_path = cfg.csv_out;
    if (csv_path.empty()) {
        csv_path = cfg.out;
        const auto dot = csv_path.rfind('.');
        if (dot != std::string::npos) csv_path.resize(dot);
        csv_path += ".csv";
    }
    std::ofstream csv(csv_path, std::ios::binary);
    require(static_cast<bool>(csv), "cannot open " + csv_path + " for writing");
    csv << "# config: " << config_echo(cfg, "grid").dump() << '\n';
    for (std::size_t i = 0; i < cfg.cutpoint_grids.size(); ++i)
        csv << 'a' << i + 1 << ',';
    csv << "loglik,iterations,converged\n";
    for (const auto& row : result.table) {
        for (const double a : row.cutpoints) csv << cutph::format_double(a) << ',';
        csv << cutph::format_double(row.log_likelihood) << ',' << row.iterations
            << ',' << (row.converged ? 1 : 0) << '\n';
    }

    nlohmann::json doc = cutph::to_json(result.best);
    doc["config"] = config_echo(cfg, "grid");
    cutph::save_json_file(cfg.out, doc);

    std::cout << "grid: " << result.table.size() << " combinations, best logL = "
              << cutph::format_double(result.best.log_likelihood)
              << " at cutpoints [";
    for (std::size_t i = 0; i < result.best.model.cutpoints.size(); ++i)
        std::cout << (i ? ", " : "")
                  << cutph::format_double(result.best.model.cutpoints[i]);
    std::cout << "]\nbest model written to " << cfg.out << ", table to "
              << csv_path << '\n';
    return result.best.converged ? kExitOk : kExitNotConverged;
}

std::vector<std::vector<double>> parse_grid_spec(const std::string& spec) {
    std::vector<std::vector<double>> grids;
    std::stringstream groups(spec);
    std::string group;
    while (std::getline(groups, group, ';')) {
        std::vector<double> grid;
        std::stringstream items(group);
        std::string item;
        while (std::getline(items, item, ',')) {
            if (item.empty()) continue;
            grid.push_back(std::stod(item));
        }
        if (!grid.empty()) grids.push_back(std::move(grid));
    }
    return grids;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;

    // load --config first so explicit flags override its values
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    try {
        if (!config_path.empty()) apply_config_file(config_path, cfg);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitError;
    }

    CLI::App app{"multiple cut-point phase-type distributions: fitting, "
                 "simulation, evaluation, and goodness of fit"};
    app.require_subcommand(1);
    std::string config_dummy;
    app.add_option("--config", config_dummy, "JSON config file with defaults");

    std::string grid_spec;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_dummy, "JSON config file with defaults");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_option("--out", cfg.out, "output path");
    };

    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model by EM");
    fit_cmd->add_option("-i,--input", cfg.input, "observations CSV");
    fit_cmd->add_option("--structure", cfg.structure, "general | erlang");
    fit_cmd->add_option("-m,--phases", cfg.phases, "number of phases");
    fit_cmd->add_option("--cutpoints", cfg.cutpoints, "fixed cut-points")
        ->delimiter(',');
    fit_cmd->add_option("--epsilon", cfg.epsilon, "stopping threshold");
    fit_cmd->add_option("--max-iterations", cfg.max_iterations, "iteration cap");
    fit_cmd->add_option("--quadrature-nodes", cfg.quadrature_nodes,
                        "Gauss-Legendre nodes per interval");
    add_common(fit_cmd);

    CLI::App* sim_cmd = app.add_subcommand("simulate", "draw samples");
    sim_cmd->add_option("--model", cfg.model_path, "model JSON");
    sim_cmd->add_option("--generator", cfg.generator,
                        "builtin generator (mixture-6.1, frechet-6.2)");
    sim_cmd->add_option("--size", cfg.size, "sample size");
    add_common(sim_cmd);

    CLI::App* eval_cmd = app.add_subcommand("eval", "export measure curves");
    eval_cmd->add_option("--model", cfg.model_path, "model JSON");
    eval_cmd->add_option("--x-min", cfg.x_min, "grid start");
    eval_cmd->add_option("--x-max", cfg.x_max, "grid end (0 = auto)");
    eval_cmd->add_option("--points", cfg.points, "grid points");
    add_common(eval_cmd);

    CLI::App* gof_cmd = app.add_subcommand("gof", "goodness-of-fit report");
    gof_cmd->add_option("-i,--input", cfg.input, "observations CSV");
    gof_cmd->add_option("--model", cfg.model_path, "fitted model JSON");
    gof_cmd->add_option("--label", cfg.label, "model label");
    gof_cmd->add_option("--structure", cfg.structure, "refit structure");
    gof_cmd->add_option("-m,--phases", cfg.phases, "refit phases");
    gof_cmd->add_option("--cutpoints", cfg.cutpoints, "refit cut-points")
        ->delimiter(',');
    gof_cmd->add_option("--epsilon", cfg.epsilon, "refit stopping threshold");
    gof_cmd->add_option("--max-iterations", cfg.max_iterations, "refit cap");
    gof_cmd->add_option("--quadrature-nodes", cfg.quadrature_nodes,
                        "refit quadrature nodes");
    gof_cmd->add_option("-B,--bootstrap", cfg.bootstrap,
                        "bootstrap replicates (>= 99)");
    gof_cmd->add_option("--csv-out", cfg.csv_out, "comparison row CSV path");
    add_common(gof_cmd);

    CLI::App* grid_cmd = app.add_subcommand("grid", "cut-point grid search");
    grid_cmd->add_option("-i,--input", cfg.input, "observations CSV");
    grid_cmd->add_option("--structure", cfg.structure, "general | erlang");
    grid_cmd->add_option("-m,--phases", cfg.phases, "number of phases");
    grid_cmd->add_option("--grids", grid_spec,
                         "candidate grids, ';' between cut-points, ',' within "
                         "(e.g. '0.4,0.5;1.0,1.5')");
    grid_cmd->add_option("--epsilon", cfg.epsilon, "stopping threshold");
    grid_cmd->add_option("--max-iterations", cfg.max_iterations, "iteration cap");
    grid_cmd->add_option("--quadrature-nodes", cfg.quadrature_nodes,
                         "quadrature nodes");
    grid_cmd->add_option("--csv-out", cfg.csv_out, "table CSV path");
    add_common(grid_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (!grid_spec.empty()) cfg.cutpoint_grids = parse_grid_spec(grid_spec);
        if (fit_cmd->parsed()) return cmd_fit(cfg);
        if (sim_cmd->parsed()) return cmd_simulate(cfg);
        if (eval_cmd->parsed()) return cmd_eval(cfg);
        if (gof_cmd->parsed()) return cmd_gof(cfg);
        if (grid_cmd->parsed()) return cmd_grid(cfg);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitError;
    }
    std::cerr << "error: no command\n";
    return kExitError;
}
