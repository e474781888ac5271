#include "bvs/model_prior.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bvs/error.hpp"
#include "bvs/numeric.hpp"

namespace bvs {

ModelPriorSpec ModelPriorSpec::mean_size(double w_star, int p) {
    if (!(w_star > 0) || !(w_star < p)) throw config_error("mean model size must lie in (0, p)");
    return beta_binomial(1.0, (p - w_star) / w_star);
}

void ModelPriorSpec::validate(int p) const {
    switch (kind) {
        case ModelPriorKind::fixed_theta:
            if (!(theta > 0 && theta < 1)) throw config_error("fixed theta must lie in (0,1)");
            break;
        case ModelPriorKind::uniform_theta: break;
        case ModelPriorKind::beta_binomial:
            if (!(a > 0 && b > 0)) throw config_error("beta-binomial parameters must be positive");
            break;
        case ModelPriorKind::user_size_probs: {
            if (static_cast<int>(size_weights.size()) != p + 1)
                throw config_error("user size probabilities need p+1 = " + std::to_string(p + 1) + " entries, got " +
                                   std::to_string(size_weights.size()));
            double total = 0;
            for (double w : size_weights) {
                if (!(w >= 0) || !std::isfinite(w)) throw config_error("user size probabilities must be nonnegative");
                total += w;
            }
            if (!(total > 0)) throw config_error("user size probabilities are all zero");
            break;
        }
    }
}

namespace {

double parse_number(std::string_view s, const char* what) {
    std::string str(s);
    char* end = nullptr;
    const double v = std::strtod(str.c_str(), &end);
    if (str.empty() || end != str.c_str() + str.size()) throw config_error(std::string("bad ") + what + " '" + str + "'");
    return v;
}

std::vector<double> read_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open size-probability file '" + path + "'");
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        std::stringstream parts(tok);
        std::string item;
        while (std::getline(parts, item, ','))
            if (!item.empty()) out.push_back(parse_number(item, "size probability"));
    }
    return out;
}

}  // namespace

ModelPriorSpec parse_model_prior(std::string_view text, int p) {
    std::string_view name = text, arg;
    if (const auto colon = text.find(':'); colon != std::string_view::npos) {
        name = text.substr(0, colon);
        arg = text.substr(colon + 1);
    }
    ModelPriorSpec spec;
    if (name == "fixed") {
        spec = ModelPriorSpec::fixed(arg.empty() ? 0.5 : parse_number(arg, "theta"));
    } else if (name == "scott-berger") {
        spec = ModelPriorSpec::scott_berger();
    } else if (name == "beta-binomial") {
        const auto comma = arg.find(',');
        if (comma == std::string_view::npos) throw config_error("beta-binomial needs 'a,b'");
        spec = ModelPriorSpec::beta_binomial(parse_number(arg.substr(0, comma), "a"),
                                             parse_number(arg.substr(comma + 1), "b"));
    } else if (name == "mean-size") {
        spec = ModelPriorSpec::mean_size(parse_number(arg, "mean size"), p);
    } else if (name == "user-size-probs") {
        if (arg.empty() || arg.front() != '@') throw config_error("user-size-probs expects '@file'");
        spec = ModelPriorSpec::user_sizes(read_weights(std::string(arg.substr(1))));
    } else {
        throw config_error("unknown model prior '" + std::string(text) + "'");
    }
    spec.validate(p);
    return spec;
}

std::string to_string(const ModelPriorSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    switch (spec.kind) {
        case ModelPriorKind::fixed_theta: os << "fixed:" << spec.theta; break;
        case ModelPriorKind::uniform_theta: os << "scott-berger"; break;
        case ModelPriorKind::beta_binomial: os << "beta-binomial:" << spec.a << "," << spec.b; break;
        case ModelPriorKind::user_size_probs: os << "user-size-probs"; break;
    }
    return os.str();
}

double log_model_prior_by_size(const ModelPriorSpec& spec, int size, int p) {
    if (size < 0 || size > p) throw config_error("model size out of range");
    switch (spec.kind) {
        case ModelPriorKind::fixed_theta:
            return size * std::log(spec.theta) + (p - size) * std::log1p(-spec.theta);
        case ModelPriorKind::uniform_theta:
            return -std::log(p + 1.0) - log_choose(p, size);
        case ModelPriorKind::beta_binomial:
            // Integrating theta^w (1-theta)^(p-w) against Beta(a, b).
            return log_beta(size + spec.a, p - size + spec.b) - log_beta(spec.a, spec.b);
        case ModelPriorKind::user_size_probs: {
            double total = 0;
            for (double w : spec.size_weights) total += w;
            const double w = spec.size_weights.at(size) / total;
            return (w > 0 ? std::log(w) : neg_inf<double>()) - log_choose(p, size);
        }
    }
    return neg_inf<double>();
}

Eigen::VectorXd log_model_prior_table(const ModelPriorSpec& spec, int p) {
    spec.validate(p);
    Eigen::VectorXd t(p + 1);
    for (int w = 0; w <= p; ++w) t(w) = log_model_prior_by_size(spec, w, p);
    return t;
}

Eigen::VectorXd size_prior_pmf(const ModelPriorSpec& spec, int p) {
    const Eigen::VectorXd lt = log_model_prior_table(spec, p);
    Eigen::VectorXd pmf(p + 1);
    for (int w = 0; w <= p; ++w) pmf(w) = std::exp(lt(w) + log_choose(p, w));
    return pmf / pmf.sum();
}

}  // namespace bvs
