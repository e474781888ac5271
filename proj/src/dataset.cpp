#include "bvs/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <Eigen/QR>

#include "bvs/error.hpp"

namespace bvs {

int Dataset::p_fixed() const {
    return static_cast<int>(std::count(fixed_mask.begin(), fixed_mask.end(), true));
}

std::vector<int> Dataset::free_columns() const {
    std::vector<int> out;
    for (int j = 0; j < p(); ++j)
        if (!fixed_mask[j]) out.push_back(j);
    return out;
}

ModelIndex Dataset::base_model() const { return ModelIndex::from_mask(fixed_mask); }

bool Dataset::admissible(const ModelIndex& m) const {
    return m.p() == p() && m.contains(base_model());
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

void check_rank(const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
    // Unit-norm columns so the relative pivot threshold does not depend on units.
    Eigen::MatrixXd Z = X;
    std::vector<std::string> zero;
    for (Eigen::Index j = 0; j < Z.cols(); ++j) {
        const double nrm = Z.col(j).norm();
        if (nrm == 0.0) {
            zero.push_back(names[j]);
        } else {
            Z.col(j) /= nrm;
        }
    }
    if (!zero.empty()) {
        std::string msg = "rank deficient design: constant column(s)";
        for (const auto& z : zero) msg += " " + z;
        throw data_error(msg);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();
    if (rank < Z.cols()) {
        std::string msg = "rank deficient design (rank " + std::to_string(rank) + " of " +
                          std::to_string(Z.cols()) + "); dependent column(s):";
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = rank; k < Z.cols(); ++k) msg += " " + names[perm(k)];
        throw data_error(msg);
    }
}

}  // namespace

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, delim)) {
        cur = trim(cur);
        if (cur.size() >= 2 && cur.front() == '"' && cur.back() == '"') cur = cur.substr(1, cur.size() - 2);
        out.push_back(cur);
    }
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

char detect_delimiter(const std::string& header) {
    char best = ',';
    std::ptrdiff_t best_count = -1;
    for (char c : {',', ';', '\t'}) {
        const auto k = std::count(header.begin(), header.end(), c);
        if (k > best_count) {
            best = c;
            best_count = k;
        }
    }
    return best;
}

Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y, std::vector<std::string> names,
                     std::vector<bool> fixed_mask, std::string response_name) {
    const auto n = X.rows();
    const auto p = X.cols();
    if (y.size() != n) throw data_error("response length does not match the number of rows");
    if (p < 1) throw data_error("need at least one covariate");
    if (n <= p)
        throw data_error("n <= p (" + std::to_string(n) + " rows, " + std::to_string(p) + " covariates)");
    if (names.empty()) {
        for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
    }
    if (static_cast<Eigen::Index>(names.size()) != p) throw config_error("covariate name count mismatch");
    if (fixed_mask.empty()) fixed_mask.assign(p, false);
    if (static_cast<Eigen::Index>(fixed_mask.size()) != p) throw config_error("fixed mask length mismatch");
    if (!X.allFinite() || !y.allFinite()) throw data_error("non-finite value in data");

    Dataset d;
    d.x_mean = center_columns(X);
    check_rank(X, names);
    d.X = std::move(X);
    d.y = std::move(y);
    d.names = std::move(names);
    d.fixed_mask = std::move(fixed_mask);
    d.response_name = std::move(response_name);
    return d;
}

Dataset load_dataset(std::istream& in, const std::string& response_column,
                     const std::vector<std::string>& fixed_columns) {
    std::string header_line;
    do {
        if (!std::getline(in, header_line)) throw data_error("empty input: missing header row");
    } while (trim(header_line).empty());
    const char delim = detect_delimiter(header_line);
    const auto header = split_fields(header_line, delim);

    const auto hits = std::count(header.begin(), header.end(), response_column);
    if (hits == 0) throw config_error("response column '" + response_column + "' not found in header");
    if (hits > 1) throw config_error("response column '" + response_column + "' appears more than once");
    const auto response_at =
        static_cast<std::size_t>(std::find(header.begin(), header.end(), response_column) - header.begin());

    std::vector<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (j != response_at) names.push_back(header[j]);
    for (const auto& f : fixed_columns) {
        if (f == response_column) throw config_error("fixed column '" + f + "' is the response");
        if (std::count(names.begin(), names.end(), f) != 1)
            throw config_error("fixed column '" + f + "' not found (or ambiguous) in header");
    }

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line, delim);
        if (fields.size() != header.size())
            throw data_error("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const char* s = fields[j].c_str();
            char* end = nullptr;
            errno = 0;
            row[j] = std::strtod(s, &end);
            if (fields[j].empty() || end != s + fields[j].size() || errno == ERANGE)
                throw data_error("line " + std::to_string(line_no) + ", column '" + header[j] +
                                 "': non-numeric value '" + fields[j] + "'");
        }
        rows.push_back(std::move(row));
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(names.size());
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index c = 0;
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (j == response_at) {
                y(i) = rows[i][j];
            } else {
                X(i, c++) = rows[i][j];
            }
        }
    }
    std::vector<bool> mask(p, false);
    for (const auto& f : fixed_columns)
        mask[std::find(names.begin(), names.end(), f) - names.begin()] = true;
    return make_dataset(std::move(X), std::move(y), std::move(names), std::move(mask), response_column);
}

Dataset load_dataset_file(const std::string& path, const std::string& response_column,
                          const std::vector<std::string>& fixed_columns) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open data file '" + path + "'");
    return load_dataset(in, response_column, fixed_columns);
}

}  // namespace bvs
