#include "cirad/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "cirad/error.hpp"
#include "io_util.hpp"

namespace cirad {

std::string_view to_string(CodeFamily family) {
    switch (family) {
        case CodeFamily::RandomBinary: return "random-binary";
        case CodeFamily::Polyphase: return "polyphase";
        case CodeFamily::Custom: return "custom";
    }
    return "custom";
}

CodeFamily parse_code_family(std::string_view name) {
    if (name == "random-binary") return CodeFamily::RandomBinary;
    if (name == "polyphase") return CodeFamily::Polyphase;
    if (name == "custom") return CodeFamily::Custom;
    throw ValidationError("unsupported code family '" + std::string(name) + "'");
}

std::string_view to_string(CorrelationMode mode) {
    return mode == CorrelationMode::Cyclic ? "cyclic" : "linear";
}

CorrelationMode parse_correlation_mode(std::string_view name) {
    if (name == "cyclic") return CorrelationMode::Cyclic;
    if (name == "linear") return CorrelationMode::Linear;
    throw ValidationError("unsupported correlation mode '" + std::string(name) + "'");
}

namespace {

std::vector<cd> zadoff_chu(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> roots;
    for (std::size_t u = 1; u < std::max<std::size_t>(n, 2); ++u) {
        if (std::gcd(u, n) == 1) roots.push_back(u);
    }
    const std::uint64_t u = roots[seed % roots.size()];
    const double nn = static_cast<double>(n);
    std::vector<cd> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        // The exponent is periodic in 2N; reducing it first keeps the phase
        // argument small.
        const std::uint64_t q = (n % 2 == 0) ? (k * k) : (k * (k + 1));
        const auto reduced = static_cast<double>((u * (q % (2 * n))) % (2 * n));
        z[k] = std::polar(1.0, -std::numbers::pi * reduced / nn);
    }
    return z;
}

void require_same_length(const Code& a, const Code& b) {
    if (a.size() != b.size()) {
        throw ValidationError("code length mismatch: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    }
}

}  // namespace

Code generate_code(CodeFamily family, std::size_t n, std::uint64_t seed) {
    if (n < 2) throw ValidationError("code length must be >= 2 (got " + std::to_string(n) + ")");
    Code code;
    code.family = family;
    code.seed = seed;
    switch (family) {
        case CodeFamily::RandomBinary: {
            std::mt19937_64 eng(seed);
            code.samples.resize(n);
            for (auto& s : code.samples) s = (eng() >> 63) ? cd{1.0, 0.0} : cd{-1.0, 0.0};
            break;
        }
        case CodeFamily::Polyphase:
            code.samples = zadoff_chu(n, seed);
            break;
        case CodeFamily::Custom:
            throw ValidationError("custom codes cannot be generated; use make_custom_code");
    }
    return code;
}

Code make_custom_code(std::vector<cd> samples, std::uint64_t seed) {
    if (samples.size() < 2) throw ValidationError("code length must be >= 2");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double dev = std::abs(std::abs(samples[i]) - 1.0);
        if (!(dev <= 1e-9)) {
            throw ValidationError("custom code sample " + std::to_string(i) +
                                  " is not unimodular (| |c| - 1 | = " + std::to_string(dev) + ")");
        }
    }
    return Code{std::move(samples), CodeFamily::Custom, seed};
}

std::pair<Code, Code> make_orthogonal_pair(std::size_t n, std::uint64_t seed) {
    if (n < 4 || n % 2 != 0) throw ValidationError("orthogonal pair needs an even length >= 4");
    const std::size_t half = n / 2;
    const auto base = zadoff_chu(half, seed);
    std::vector<cd> a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
        a[k] = base[k % half];
        // Modulating by one DFT bin moves the even-bin spectrum onto odd bins.
        b[k] = base[k % half] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) /
                                                    static_cast<double>(n));
    }
    return {Code{std::move(a), CodeFamily::Custom, seed}, Code{std::move(b), CodeFamily::Custom, seed}};
}

std::vector<cd> correlation_sequence(const Code& a, const Code& b, CorrelationMode mode) {
    require_same_length(a, b);
    const auto n = static_cast<std::ptrdiff_t>(a.size());
    std::vector<cd> out(static_cast<std::size_t>(2 * n - 1));
    for (std::ptrdiff_t lag = -(n - 1); lag <= n - 1; ++lag) {
        cd acc{};
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            std::ptrdiff_t j = i - lag;
            if (mode == CorrelationMode::Cyclic) {
                j = ((j % n) + n) % n;
            } else if (j < 0 || j >= n) {
                continue;
            }
            acc += a.samples[static_cast<std::size_t>(i)] * std::conj(b.samples[static_cast<std::size_t>(j)]);
        }
        out[static_cast<std::size_t>(lag + n - 1)] = acc;
    }
    return out;
}

namespace {

std::vector<double> magnitudes(const std::vector<cd>& v) {
    std::vector<double> m(v.size());
    std::transform(v.begin(), v.end(), m.begin(), [](const cd& z) { return std::abs(z); });
    return m;
}

}  // namespace

double default_zcz_threshold(std::size_t n) { return 1e-9 * static_cast<double>(n); }

CorrelationReport cross_correlate(const Code& a, const Code& b, CorrelationMode mode) {
    require_same_length(a, b);
    CorrelationReport report;
    report.autocorr = magnitudes(correlation_sequence(a, a, mode));
    report.crosscorr = magnitudes(correlation_sequence(a, b, mode));

    const std::size_t zero = report.zero_lag();
    double sidelobe = 0.0;
    for (std::size_t i = 0; i < report.autocorr.size(); ++i) {
        if (i != zero) sidelobe = std::max(sidelobe, report.autocorr[i]);
    }
    const double peak = report.autocorr[zero];
    report.psl_db = sidelobe > 0.0 ? std::min(0.0, 20.0 * std::log10(sidelobe / peak)) : kPslFloorDb;
    report.zcz_length = zcz_length(a, b, default_zcz_threshold(a.size()));
    return report;
}

std::size_t zcz_length(const Code& a, const Code& b, double threshold) {
    require_same_length(a, b);
    if (!(threshold >= 0.0)) throw ValidationError("zcz threshold must be >= 0");
    const auto r = correlation_sequence(a, b, CorrelationMode::Cyclic);
    const std::size_t n = a.size();
    std::size_t len = 0;
    for (std::size_t lag = 1; lag <= n - 1; ++lag) {
        if (std::abs(r[lag + n - 1]) > threshold) break;
        len = lag;
    }
    return len;
}

void write_code_csv(const Code& code, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    out << "# family=" << to_string(code.family) << " n=" << code.size() << " seed=" << code.seed << '\n';
    out << "index,re,im\n";
    for (std::size_t i = 0; i < code.size(); ++i) {
        out << i << ',' << detail::fmt_double(code[i].real()) << ',' << detail::fmt_double(code[i].imag())
            << '\n';
    }
    if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

Code read_code_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    std::string line;
    Code code;
    std::size_t declared_n = 0;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto text = detail::trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            std::istringstream fields{std::string(text.substr(1))};
            std::string kv;
            while (fields >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                const auto key = kv.substr(0, eq);
                const auto value = kv.substr(eq + 1);
                if (key == "family") code.family = parse_code_family(value);
                else if (key == "n") declared_n = std::stoull(value);
                else if (key == "seed") code.seed = std::stoull(value);
            }
            continue;
        }
        if (!header_seen) {
            if (text != "index,re,im") {
                throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                      ": expected header 'index,re,im'");
            }
            header_seen = true;
            continue;
        }
        std::istringstream row{std::string(text)};
        std::string idx, re, im;
        if (!std::getline(row, idx, ',') || !std::getline(row, re, ',') || !std::getline(row, im)) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
        }
        if (std::stoull(idx) != code.samples.size()) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": index out of order");
        }
        code.samples.emplace_back(std::stod(re), std::stod(im));
    }
    if (declared_n != 0 && declared_n != code.samples.size()) {
        throw ValidationError(path.string() + ": header declares n=" + std::to_string(declared_n) + " but " +
                              std::to_string(code.samples.size()) + " rows were read");
    }
    auto family = code.family;
    auto checked = make_custom_code(std::move(code.samples), code.seed);
    checked.family = family;
    return checked;
}

}  // namespace cirad
