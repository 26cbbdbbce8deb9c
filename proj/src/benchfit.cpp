#include "iob/benchfit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace iob {

namespace {

const std::vector<std::string> kColumns = {
    "source_id", "kind",           "power_w", "data_rate_bps",
    "sensitivity_v", "resolution_bits", "notes"};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, std::size_t row, const std::string& col) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) {
            throw IngestError(row, col, "trailing characters in number '" + s + "'");
        }
        return v;
    } catch (const IngestError&) {
        throw;
    } catch (const std::exception&) {
        throw IngestError(row, col, "unparsable number '" + s + "'");
    }
}

int parse_int(const std::string& s, std::size_t row, const std::string& col) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) {
            throw IngestError(row, col, "trailing characters in integer '" + s + "'");
        }
        return v;
    } catch (const IngestError&) {
        throw;
    } catch (const std::exception&) {
        throw IngestError(row, col, "unparsable integer '" + s + "'");
    }
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

void BenchmarkRecord::validate() const {
    auto fail = [this](const std::string& col, const std::string& msg) {
        throw IngestError(source_row, col, msg);
    };
    if (!(power_w > 0.0) || !std::isfinite(power_w)) {
        fail("power_w", "power must be > 0");
    }
    if (!(data_rate_bps > 0.0) || !std::isfinite(data_rate_bps)) {
        fail("data_rate_bps", "data rate must be > 0");
    }
    if (!(sensitivity_v > 0.0) || !std::isfinite(sensitivity_v)) {
        fail("sensitivity_v", "sensitivity must be > 0");
    }
    if (resolution_bits < 1 || resolution_bits > 32) {
        fail("resolution_bits", "resolution must be in [1, 32]");
    }
}

IngestResult ingest_records(std::istream& in, bool lenient) {
    IngestResult result;
    std::string line;
    bool header_seen = false;
    std::size_t row = 0; // counts non-comment lines, header = row 0
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header_seen) {
            auto fields = split_csv(line);
            if (fields.size() < kColumns.size()) {
                throw IngestError(0, "header", "expected columns " +
                                                   [] {
                                                       std::string s;
                                                       for (const auto& c : kColumns) {
                                                           if (!s.empty()) s += ",";
                                                           s += c;
                                                       }
                                                       return s;
                                                   }());
            }
            for (std::size_t i = 0; i < kColumns.size(); ++i) {
                if (fields[i] != kColumns[i]) {
                    throw IngestError(0, kColumns[i],
                                      "missing or misplaced column, found '" +
                                          fields[i] + "'");
                }
            }
            header_seen = true;
            continue;
        }
        ++row;
        try {
            auto fields = split_csv(line);
            if (fields.size() < kColumns.size()) {
                throw IngestError(row, "row", "expected at least 7 fields, got " +
                                                  std::to_string(fields.size()));
            }
            BenchmarkRecord rec;
            rec.source_row = row;
            rec.source_id = fields[0];
            rec.kind = fields[1];
            rec.power_w = parse_double(fields[2], row, "power_w");
            rec.data_rate_bps = parse_double(fields[3], row, "data_rate_bps");
            rec.sensitivity_v = parse_double(fields[4], row, "sensitivity_v");
            rec.resolution_bits = parse_int(fields[5], row, "resolution_bits");
            rec.notes = fields[6];
            for (std::size_t i = 7; i < fields.size(); ++i) {
                rec.notes += "," + fields[i];
            }
            rec.validate();
            result.records.push_back(std::move(rec));
        } catch (const IngestError& e) {
            if (!lenient) {
                throw;
            }
            result.skipped.push_back(e);
        }
    }
    if (!header_seen) {
        throw IngestError(0, "header", "input has no header row");
    }
    return result;
}

void write_records(const std::vector<BenchmarkRecord>& records, std::ostream& out) {
    out << "source_id,kind,power_w,data_rate_bps,sensitivity_v,resolution_bits,notes\n";
    for (const auto& r : records) {
        out << r.source_id << ',' << r.kind << ',' << format_number(r.power_w)
            << ',' << format_number(r.data_rate_bps) << ','
            << format_number(r.sensitivity_v) << ',' << r.resolution_bits << ','
            << r.notes << '\n';
    }
}

std::pair<double, double> to_efficiency(const BenchmarkRecord& record) {
    record.validate();
    return {record.data_rate_bps, record.power_w / record.data_rate_bps};
}

std::vector<BenchmarkRecord> cohort_filter(
    const std::vector<BenchmarkRecord>& records,
    std::pair<double, double> sensitivity_band,
    std::optional<int> resolution_bits) {
    if (sensitivity_band.first > sensitivity_band.second) {
        throw DomainError("sensitivity band min must be <= max");
    }
    std::vector<BenchmarkRecord> out;
    for (const auto& r : records) {
        if (r.sensitivity_v < sensitivity_band.first ||
            r.sensitivity_v > sensitivity_band.second) {
            continue;
        }
        if (resolution_bits && r.resolution_bits != *resolution_bits) {
            continue;
        }
        out.push_back(r);
    }
    return out;
}

FitReport fit_loglog(const std::vector<BenchmarkRecord>& records,
                     double plateau_floor, std::string cohort_description) {
    std::set<double> distinct_rates;
    for (const auto& r : records) {
        distinct_rates.insert(r.data_rate_bps);
    }
    if (distinct_rates.size() < 2) {
        throw FitError("fewer than 2 distinct rates (" +
                       std::to_string(distinct_rates.size()) + ")");
    }

    const auto n = static_cast<Eigen::Index>(records.size());
    std::vector<std::pair<double, double>> points(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto [rate, eta] = to_efficiency(records[i]);
        points[i] = {std::log10(rate), std::log10(eta)};
    }
    // Solve in sorted order so the result is bit-identical under input
    // permutation; reported residuals keep the input order.
    auto sorted = points;
    std::sort(sorted.begin(), sorted.end());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = sorted[static_cast<std::size_t>(i)].first;
        design(i, 1) = 1.0;
        y(i) = sorted[static_cast<std::size_t>(i)].second;
    }
    Eigen::Vector2d coeff = design.colPivHouseholderQr().solve(y);

    Eigen::VectorXd fitted = design * coeff;
    Eigen::VectorXd sorted_residuals = y - fitted;
    double ss_res = sorted_residuals.squaredNorm();
    double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
    double r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    Eigen::VectorXd residuals(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        residuals(i) = p.second - (coeff(0) * p.first + coeff(1));
    }

    FitReport report;
    report.model = EfficiencyModel::fitted(
        coeff(0), coeff(1), plateau_floor, *distinct_rates.begin(),
        *distinct_rates.rbegin());
    report.n_points = records.size();
    report.r_squared = r_squared;
    report.residuals.assign(residuals.data(), residuals.data() + n);
    report.cohort_filter = std::move(cohort_description);
    if (coeff(0) >= 0.0) {
        report.warning = "fitted slope is non-negative; efficiency does not "
                         "improve with rate";
    }
    return report;
}

}  // namespace iob
