#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rejopt/csv.hpp"
#include "rejopt/format.hpp"

namespace rejopt {

struct ScoredSample {
    double score_r = 0.0;
    double score_g = 0.0;  // meaningful only when the dataset carries g scores
    bool is_ood = false;
    double loss = 0.0;  // prediction loss; must be 0 on OOD rows
};

class DatasetError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScoredDataset {
    std::vector<ScoredSample> samples;
    bool has_score_g = false;
    std::optional<double> pi_override;  // prior used for precision, if supplied

    std::size_t num_id() const {
        std::size_t n = 0;
        for (const auto& s : samples) n += !s.is_ood;
        return n;
    }
    std::size_t num_ood() const { return samples.size() - num_id(); }

    /// Prior used in precision estimates: the override, else the sample fraction.
    double pi_for_precision() const {
        if (pi_override) return *pi_override;
        if (samples.empty()) return 0.0;
        return static_cast<double>(num_ood()) / static_cast<double>(samples.size());
    }

    void validate() const {
        if (num_id() == 0) throw DatasetError("dataset: needs at least one ID sample");
        for (const auto& s : samples) {
            if (!(s.loss >= 0.0)) throw DatasetError("dataset: negative loss");
            if (s.is_ood && s.loss != 0.0) throw DatasetError("dataset: OOD row with nonzero loss");
        }
        if (pi_override && !(*pi_override >= 0.0 && *pi_override < 1.0))
            throw DatasetError("dataset: pi override must be in [0,1)");
    }
};



/**
 * Score file reader. Format: UTF-8, LF, '.' decimal, header
 * `id,is_ood,loss,score_r[,score_g]`. Malformed rows abort with the
 * offending line number.
 */
inline ScoredDataset read_score_csv(std::istream& in, const std::string& name) {
    ScoredDataset ds;
    std::string line;
    std::size_t lineno = 0;
    auto where = [&] { return name + ":" + std::to_string(lineno); };

    if (!std::getline(in, line)) throw DatasetError(name + ": empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "id,is_ood,loss,score_r")
        ds.has_score_g = false;
    else if (line == "id,is_ood,loss,score_r,score_g")
        ds.has_score_g = true;
    else
        throw DatasetError(where() + ": bad header \"" + line +
                           "\" (expected id,is_ood,loss,score_r[,score_g])");
    const std::size_t ncols = ds.has_score_g ? 5 : 4;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_csv(line);
        if (fields.size() != ncols)
            throw DatasetError(where() + ": expected " + std::to_string(ncols) +
                               " columns, got " + std::to_string(fields.size()));
        ScoredSample s;
        if (fields[1] == "0")
            s.is_ood = false;
        else if (fields[1] == "1")
            s.is_ood = true;
        else
            throw DatasetError(where() + ": is_ood must be 0 or 1");
        s.loss = detail::parse_double(fields[2], where());
        if (s.loss < 0.0) throw DatasetError(where() + ": negative loss");
        if (s.is_ood && s.loss != 0.0)
            throw DatasetError(where() + ": loss must be 0 when is_ood=1");
        s.score_r = detail::parse_double(fields[3], where());
        if (ds.has_score_g) s.score_g = detail::parse_double(fields[4], where());
        ds.samples.push_back(s);
    }
    if (ds.num_id() == 0) throw DatasetError(name + ": needs at least one ID sample");
    return ds;
}

inline ScoredDataset load_score_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open " + path);
    return read_score_csv(in, path);
}

inline void write_score_csv(std::ostream& out, const ScoredDataset& ds) {
    out << (ds.has_score_g ? "id,is_ood,loss,score_r,score_g\n" : "id,is_ood,loss,score_r\n");
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const auto& s = ds.samples[i];
        out << i << ',' << (s.is_ood ? 1 : 0) << ',' << format_double(s.loss) << ','
            << format_double(s.score_r);
        if (ds.has_score_g) out << ',' << format_double(s.score_g);
        out << '\n';
    }
}

}  // namespace rejopt
