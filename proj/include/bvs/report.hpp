#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bvs/summary.hpp"

namespace bvs {

enum class OutputFormat { table, json, csv };

OutputFormat parse_format(std::string_view text);

/// Run description carried next to the summary. No timings, so equal runs render identically.
struct RunInfo {
    std::string command;
    std::string engine;  ///< enumerate, gibbs or mc3
    std::string gprior;
    std::string model_prior;
    std::string estimator;  ///< empty for exact runs
    std::string response;
    std::vector<std::string> fixed;
    int n = 0;
    int p = 0;
    std::uint64_t seed = 0;
    int threads = 1;
    int shard_bits = 0;         ///< enumeration partition
    int chains = 0;             ///< sampling partition
    std::uint64_t iterations = 0;
    std::uint64_t burn_in = 0;
    std::uint64_t models = 0;
};

/// %.12g, the precision shared by every rendering.
std::string format_number(double v);

nlohmann::ordered_json to_json(const PosteriorSummary& s, const RunInfo& info, const std::vector<double>& predictions = {});

void write_json(std::ostream& os, const PosteriorSummary& s, const RunInfo& info,
                const std::vector<double>& predictions = {});
void write_table(std::ostream& os, const PosteriorSummary& s, const RunInfo& info,
                 const std::vector<double>& predictions = {});
/// One row per covariate: name, pip, bma_coef, sign_caveat, in_hpm, in_mpm.
void write_csv(std::ostream& os, const PosteriorSummary& s, const RunInfo& info);

void write_report(std::ostream& os, OutputFormat f, const PosteriorSummary& s, const RunInfo& info,
                  const std::vector<double>& predictions = {});

}  // namespace bvs
