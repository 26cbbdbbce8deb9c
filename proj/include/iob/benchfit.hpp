#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iob/core_model.hpp"
#include "iob/errors.hpp"

namespace iob {

/// One surveyed analog-front-end data point.
struct BenchmarkRecord {
    std::string source_id;
    std::string kind; // e.g. biopotential / audio / video
    double power_w = 0.0;
    double data_rate_bps = 0.0;
    double sensitivity_v = 0.0;
    int resolution_bits = 0;
    std::string notes;
    std::size_t source_row = 0; // 1-based data file row, for error reporting

    void validate() const;
};

struct IngestResult {
    std::vector<BenchmarkRecord> records;
    // Populated only in lenient mode; strict mode throws the first error.
    std::vector<IngestError> skipped;
};

struct FitReport {
    EfficiencyModel model;
    std::size_t n_points = 0;
    double r_squared = 0.0;
    std::vector<double> residuals; // log10 residuals, input order
    std::string cohort_filter;     // description of applied iso-constraints
    std::optional<std::string> warning;
};

/// Parses the survey CSV schema
/// `source_id,kind,power_w,data_rate_bps,sensitivity_v,resolution_bits,notes`.
/// Lines starting with '#' are ignored. In strict mode the first malformed row
/// throws IngestError; in lenient mode bad rows are collected and skipped.
IngestResult ingest_records(std::istream& in, bool lenient = false);

/// Canonical CSV writer; output re-ingests to identical records.
void write_records(const std::vector<BenchmarkRecord>& records, std::ostream& out);

/// eta = power / rate (J/bit), rate passed through.
std::pair<double, double> to_efficiency(const BenchmarkRecord& record);

/// Iso-sensitivity / iso-resolution cohort selection; stable order.
std::vector<BenchmarkRecord> cohort_filter(
    const std::vector<BenchmarkRecord>& records,
    std::pair<double, double> sensitivity_band,
    std::optional<int> resolution_bits = std::nullopt);

/// Ordinary least squares on (log10 rate, log10 eta). The plateau clamp is not
/// applied to the fit inputs; it only takes effect when the model is evaluated.
FitReport fit_loglog(const std::vector<BenchmarkRecord>& records,
                     double plateau_floor,
                     std::string cohort_description = "none");

}  // namespace iob
