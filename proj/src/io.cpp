#include "cutph/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cutph {

namespace {

nlohmann::json matrices_to_json(const std::vector<Matrix>& matrices) {
    nlohmann::json out = nlohmann::json::array();
    for (const Matrix& t : matrices) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < t.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index j = 0; j < t.cols(); ++j) row.push_back(t(i, j));
            rows.push_back(std::move(row));
        }
        out.push_back(std::move(rows));
    }
    return out;
}

RowVector alpha_from_json(const nlohmann::json& doc) {
    const auto& arr = doc.at("alpha");
    RowVector alpha(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) alpha[i] = arr[i].get<double>();
    return alpha;
}

std::vector<Matrix> matrices_from_json(const nlohmann::json& doc) {
    std::vector<Matrix> out;
    for (const auto& rows : doc.at("matrices")) {
        const std::size_t m = rows.size();
        Matrix t(m, m);
        for (std::size_t i = 0; i < m; ++i) {
            if (rows[i].size() != m)
                throw std::runtime_error("model JSON: matrix is not square");
            for (std::size_t j = 0; j < m; ++j) t(i, j) = rows[i][j].get<double>();
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace

nlohmann::json to_json(const ContinuousCutpointModel& model) {
    nlohmann::json doc;
    doc["kind"] = "continuous";
    doc["alpha"] = std::vector<double>(model.alpha.begin(), model.alpha.end());
    doc["matrices"] = matrices_to_json(model.matrices);
    doc["cutpoints"] = model.cutpoints;
    return doc;
}

nlohmann::json to_json(const DiscreteCutpointModel& model) {
    nlohmann::json doc;
    doc["kind"] = "discrete";
    doc["alpha"] = std::vector<double>(model.alpha.begin(), model.alpha.end());
    doc["matrices"] = matrices_to_json(model.matrices);
    doc["cutpoints"] = model.cutpoints;
    return doc;
}

AnyModel model_from_json(const nlohmann::json& doc) {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "continuous") {
        ContinuousCutpointModel model;
        model.alpha = alpha_from_json(doc);
        model.matrices = matrices_from_json(doc);
        model.cutpoints = doc.at("cutpoints").get<std::vector<double>>();
        return model;
    }
    if (kind == "discrete") {
        DiscreteCutpointModel model;
        model.alpha = alpha_from_json(doc);
        model.matrices = matrices_from_json(doc);
        model.cutpoints = doc.at("cutpoints").get<std::vector<long>>();
        return model;
    }
    throw std::runtime_error("model JSON: unknown kind '" + kind + "'");
}

nlohmann::json to_json(const FitResult& result) {
    nlohmann::json doc;
    doc["model"] = to_json(result.model);
    doc["loglik"] = result.log_likelihood;
    doc["iterations"] = result.iterations;
    doc["converged"] = result.converged;
    doc["trace"] = result.loglik_trace;
    return doc;
}

FitResult fit_result_from_json(const nlohmann::json& doc) {
    FitResult result;
    AnyModel model = model_from_json(doc.at("model"));
    if (!std::holds_alternative<ContinuousCutpointModel>(model))
        throw std::runtime_error("fit result JSON: model must be continuous");
    result.model = std::get<ContinuousCutpointModel>(std::move(model));
    result.log_likelihood = doc.at("loglik").get<double>();
    result.iterations = doc.at("iterations").get<int>();
    result.converged = doc.at("converged").get<bool>();
    result.loglik_trace = doc.at("trace").get<std::vector<double>>();
    return result;
}

nlohmann::json to_json(const GofReport& report) {
    nlohmann::json doc;
    doc["ks_statistic"] = report.ks_statistic;
    doc["ad_statistic"] = report.ad_statistic;
    doc["ks_pvalue"] = report.ks_pvalue;
    doc["ad_pvalue"] = report.ad_pvalue;
    doc["bootstrap_replicates"] = report.bootstrap_replicates;
    doc["loglik"] = report.loglik;
    doc["parameter_count"] = report.parameter_count;
    return doc;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json doc;
    in >> doc;
    return doc;
}

void save_json_file(const std::string& path, const nlohmann::json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << doc.dump(2) << '\n';
}

std::vector<double> read_value_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') continue;
        if (!header_seen) {
            if (line != "value")
                throw std::runtime_error(path + " line " +
                                         std::to_string(line_no) +
                                         ": expected header 'value'");
            header_seen = true;
            continue;
        }
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || *end != '\0')
            throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                     ": not a number: '" + line + "'");
        values.push_back(v);
    }
    if (!header_seen)
        throw std::runtime_error(path + ": missing 'value' header");
    return values;
}

void write_value_csv(const std::string& path, std::span<const double> values,
                     const std::string& comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "value\n";
    for (const double v : values) out << format_double(v) << '\n';
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace cutph
