#include "cirad/weight.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "cirad/error.hpp"
#include "io_util.hpp"

namespace cirad {

std::string_view to_string(WeightKind kind) { return kind == WeightKind::Diagonal ? "diagonal" : "full"; }

WeightMatrix WeightMatrix::identity(std::size_t n) { return from_diagonal(std::vector<cd>(n, cd{1.0, 0.0})); }

WeightMatrix WeightMatrix::from_diagonal(std::vector<cd> entries) {
    WeightMatrix w;
    w.kind = WeightKind::Diagonal;
    w.diagonal = std::move(entries);
    return w;
}

WeightMatrix WeightMatrix::from_full(CMatrix entries) {
    if (entries.rows() != entries.cols()) throw ValidationError("full weight matrix must be square");
    WeightMatrix w;
    w.kind = WeightKind::Full;
    w.full = std::move(entries);
    return w;
}

std::vector<cd> weighted_samples(const WeightMatrix& weight, const Code& code) {
    const std::size_t n = code.size();
    if (weight.size() != n) {
        throw ValidationError("weight dimension " + std::to_string(weight.size()) + " does not match code length " +
                              std::to_string(n));
    }
    std::vector<cd> out(n);
    if (weight.kind == WeightKind::Diagonal) {
        for (std::size_t i = 0; i < n; ++i) out[i] = weight.diagonal[i] * code[i];
    } else {
        for (std::size_t c = 0; c < n; ++c) {
            const cd x = code[c];
            const auto column = weight.full.col(c);
            for (std::size_t r = 0; r < n; ++r) out[r] += column[r] * x;
        }
    }
    return out;
}

double unimodularity_deviation(const WeightMatrix& weight, const Code& code) {
    const auto w = weighted_samples(weight, code);
    double dev = 0.0;
    for (const auto& z : w) dev = std::max(dev, std::abs(std::abs(z) - 1.0));
    return dev;
}

Code apply_weight(const WeightMatrix& weight, const Code& code) {
    auto samples = weighted_samples(weight, code);
    double dev = 0.0;
    for (const auto& z : samples) dev = std::max(dev, std::abs(std::abs(z) - 1.0));
    if (!(dev <= kWeightedCodeTolerance)) {
        std::ostringstream msg;
        msg << "weighted code is not unimodular: max deviation " << dev << " exceeds " << kWeightedCodeTolerance;
        throw ValidationError(msg.str());
    }
    return Code{std::move(samples), CodeFamily::Custom, code.seed};
}

void write_weight_csv(const WeightMatrix& weight, const std::filesystem::path& path) {
    if (weight.kind != WeightKind::Diagonal) throw ValidationError("only diagonal weights have a CSV payload");
    auto out = detail::open_output(path);
    out << "# kind=" << to_string(weight.kind) << " n=" << weight.size()
        << " residual=" << detail::fmt_double(weight.objective_residual) << '\n';
    out << "index,re,im\n";
    for (std::size_t i = 0; i < weight.diagonal.size(); ++i) {
        out << i << ',' << detail::fmt_double(weight.diagonal[i].real()) << ','
            << detail::fmt_double(weight.diagonal[i].imag()) << '\n';
    }
    if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

WeightMatrix read_weight_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    std::string line;
    std::vector<cd> entries;
    std::size_t declared_n = 0;
    double residual = 0.0;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = detail::trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            std::istringstream fields{std::string(text.substr(1))};
            std::string kv;
            while (fields >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                const auto key = kv.substr(0, eq);
                const auto value = kv.substr(eq + 1);
                if (key == "kind" && value != "diagonal") throw ValidationError("unsupported weight kind " + value);
                if (key == "n") declared_n = std::stoull(value);
                if (key == "residual") residual = std::stod(value);
            }
            continue;
        }
        if (!header_seen) {
            if (text != "index,re,im") {
                throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected 'index,re,im'");
            }
            header_seen = true;
            continue;
        }
        std::istringstream row{std::string(text)};
        std::string idx, re, im;
        if (!std::getline(row, idx, ',') || !std::getline(row, re, ',') || !std::getline(row, im)) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
        }
        entries.emplace_back(std::stod(re), std::stod(im));
    }
    if (declared_n != entries.size()) throw ValidationError(path.string() + ": entry count does not match header");
    auto w = WeightMatrix::from_diagonal(std::move(entries));
    w.objective_residual = residual;
    return w;
}

}  // namespace cirad
