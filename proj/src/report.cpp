#include "bvs/report.hpp"

#include <cstdio>
#include <iomanip>

#include "bvs/error.hpp"

namespace bvs {

OutputFormat parse_format(std::string_view text) {
    if (text == "table" || text == "text") return OutputFormat::table;
    if (text == "json") return OutputFormat::json;
    if (text == "csv") return OutputFormat::csv;
    throw config_error("unknown output format '" + std::string(text) + "'");
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

std::vector<std::string> included_names(const ModelIndex& m, const std::vector<std::string>& names) {
    std::vector<std::string> out;
    for (int j : m.included()) out.push_back(names[j]);
    return out;
}

nlohmann::ordered_json matrix_json(const Eigen::MatrixXd& m, const std::vector<std::string>& names) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return {{"names", names}, {"rows", std::move(rows)}};
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

std::string join(const std::vector<std::string>& v) {
    if (v.empty()) return "(none)";
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) out += (k ? " " : "") + v[k];
    return out;
}

}  // namespace

nlohmann::ordered_json to_json(const PosteriorSummary& s, const RunInfo& info, const std::vector<double>& predictions) {
    using json = nlohmann::ordered_json;
    json run = {{"command", info.command},
                {"engine", info.engine},
                {"gprior", info.gprior},
                {"model_prior", info.model_prior}};
    if (!info.estimator.empty()) run["estimator"] = info.estimator;
    run["response"] = info.response;
    run["fixed"] = info.fixed;
    run["n"] = info.n;
    run["p"] = info.p;
    run["seed"] = info.seed;
    run["threads"] = info.threads;
    if (info.engine == "enumerate") {
        run["shard_bits"] = info.shard_bits;
    } else {
        run["chains"] = info.chains;
        run["iterations"] = info.iterations;
        run["burn_in"] = info.burn_in;
    }
    run["models"] = info.models;

    json pip = json::object(), coef = json::object(), caveat = json::object();
    for (std::size_t j = 0; j < s.names.size(); ++j) {
        pip[s.names[j]] = s.pip(static_cast<Eigen::Index>(j));
        coef[s.names[j]] = s.bma_coef(static_cast<Eigen::Index>(j));
        caveat[s.names[j]] = static_cast<bool>(s.sign_caveat[j]);
    }
    json top = json::array();
    for (const auto& t : s.top_models)
        top.push_back({{"model", t.model.to_string()}, {"probability", t.probability}, {"log_bf", t.log_bf}});
    json sizes = json::array();
    for (Eigen::Index k = 0; k < s.size_pmf.size(); ++k) sizes.push_back(s.size_pmf(k));

    json out = {{"run", std::move(run)},
                {"covariates", s.names},
                {"pip", std::move(pip)},
                {"hpm",
                 {{"model", s.hpm.to_string()},
                  {"covariates", included_names(s.hpm, s.names)},
                  {"probability", s.hpm_probability},
                  {"support_conditional", s.hpm_support_conditional}}},
                {"mpm", {{"model", s.mpm.to_string()}, {"covariates", included_names(s.mpm, s.names)}}},
                {"size_pmf", std::move(sizes)},
                {"top_models", std::move(top)},
                {"joint_inclusion", matrix_json(s.joint_incl, s.names)},
                {"conditional_inclusion", matrix_json(s.cond_incl, s.names)},
                {"bma", {{"intercept", s.bma_intercept}, {"coefficients", std::move(coef)}, {"sign_caveat", std::move(caveat)}}}};
    if (!predictions.empty()) out["predictions"] = predictions;
    out["notes"] = s.notes;
    return out;
}

void write_json(std::ostream& os, const PosteriorSummary& s, const RunInfo& info, const std::vector<double>& predictions) {
    os << to_json(s, info, predictions).dump(2) << '\n';
}

void write_table(std::ostream& os, const PosteriorSummary& s, const RunInfo& info, const std::vector<double>& predictions) {
    std::size_t w = 11;
    for (const auto& n : s.names) w = std::max(w, n.size() + 2);
    os << "engine " << info.engine << ", g-prior " << info.gprior << ", model prior " << info.model_prior;
    if (!info.estimator.empty()) os << ", estimator " << info.estimator;
    os << "\nn = " << info.n << ", p = " << info.p << ", models = " << info.models << "\n\n";

    os << pad("covariate", w) << pad("pip", 20) << pad("bma_coef", 20) << "caveat\n";
    for (std::size_t j = 0; j < s.names.size(); ++j) {
        const auto i = static_cast<Eigen::Index>(j);
        os << pad(s.names[j], w) << pad(format_number(s.pip(i)), 20) << pad(format_number(s.bma_coef(i)), 20)
           << (s.sign_caveat[j] ? "sign" : "") << '\n';
    }
    os << pad("intercept", w) << pad("", 20) << format_number(s.bma_intercept) << "\n\n";

    os << "HPM " << s.hpm.to_string() << " probability " << format_number(s.hpm_probability)
       << (s.hpm_support_conditional ? " (among visited models)" : "") << '\n';
    os << "    " << join(included_names(s.hpm, s.names)) << '\n';
    os << "MPM " << s.mpm.to_string() << '\n';
    os << "    " << join(included_names(s.mpm, s.names)) << "\n\n";

    os << "model size posterior\n";
    for (Eigen::Index k = 0; k < s.size_pmf.size(); ++k)
        os << "  " << pad(std::to_string(k), 4) << format_number(s.size_pmf(k)) << '\n';
    os << "\ntop models\n";
    for (std::size_t k = 0; k < s.top_models.size(); ++k)
        os << "  " << pad(std::to_string(k + 1), 4) << s.top_models[k].model.to_string() << "  "
           << format_number(s.top_models[k].probability) << '\n';
    if (!predictions.empty()) {
        os << "\npredictions\n";
        for (double v : predictions) os << "  " << format_number(v) << '\n';
    }
    for (const auto& n : s.notes) os << "\nnote: " << n;
    if (!s.notes.empty()) os << '\n';
}

void write_csv(std::ostream& os, const PosteriorSummary& s, const RunInfo&) {
    os << "covariate,pip,bma_coef,sign_caveat,in_hpm,in_mpm\n";
    for (std::size_t j = 0; j < s.names.size(); ++j) {
        const auto i = static_cast<Eigen::Index>(j);
        os << s.names[j] << ',' << format_number(s.pip(i)) << ',' << format_number(s.bma_coef(i)) << ','
           << (s.sign_caveat[j] ? 1 : 0) << ',' << s.hpm.test(static_cast<int>(j)) << ','
           << s.mpm.test(static_cast<int>(j)) << '\n';
    }
}

void write_report(std::ostream& os, OutputFormat f, const PosteriorSummary& s, const RunInfo& info,
                  const std::vector<double>& predictions) {
    switch (f) {
        case OutputFormat::table: write_table(os, s, info, predictions); break;
        case OutputFormat::json: write_json(os, s, info, predictions); break;
        case OutputFormat::csv: write_csv(os, s, info); break;
    }
}

}  // namespace bvs
