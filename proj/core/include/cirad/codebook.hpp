#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cirad/matrix.hpp"

namespace cirad {

enum class CodeFamily { RandomBinary, Polyphase, Custom };

std::string_view to_string(CodeFamily family);
CodeFamily parse_code_family(std::string_view name);

enum class CorrelationMode { Cyclic, Linear };

std::string_view to_string(CorrelationMode mode);
CorrelationMode parse_correlation_mode(std::string_view name);

/// Unimodular PMCW code. Samples always satisfy |c[n]| = 1.
struct Code {
    std::vector<cd> samples;
    CodeFamily family = CodeFamily::Custom;
    std::uint64_t seed = 0;

    std::size_t size() const { return samples.size(); }
    const cd& operator[](std::size_t i) const { return samples[i]; }
};

inline constexpr double kUnimodularTolerance = 1e-12;

/// Deterministic code generator.
///
/// random-binary draws i.i.d. +/-1 chips. polyphase is a Zadoff-Chu sequence
/// whose root is picked from the integers coprime to n by the seed; its cyclic
/// autocorrelation sidelobes are zero.
Code generate_code(CodeFamily family, std::size_t n, std::uint64_t seed);

/// Wraps caller-provided samples; throws if any |c[n]| deviates from 1.
Code make_custom_code(std::vector<cd> samples, std::uint64_t seed = 0);

/// Pair of unimodular codes with disjoint DFT support (even bins / odd bins),
/// so their cyclic cross-correlation vanishes at every lag. Each is a
/// half-length Zadoff-Chu sequence repeated twice, which leaves a second
/// autocorrelation peak at lag n/2. n must be even and >= 4.
std::pair<Code, Code> make_orthogonal_pair(std::size_t n, std::uint64_t seed);

/// R_ab[l] = sum_n a[n] conj(b[n - l]) for l = -(N-1) .. N-1, stored at
/// index l + N - 1. Cyclic mode wraps n - l modulo N.
std::vector<cd> correlation_sequence(const Code& a, const Code& b, CorrelationMode mode);

struct CorrelationReport {
    std::vector<double> autocorr;   // |R_aa[l]|, lags -(N-1)..N-1
    std::vector<double> crosscorr;  // |R_ab[l]|, same lag layout
    double psl_db = 0.0;            // autocorrelation PSL of a
    std::size_t zcz_length = 0;     // at the default threshold

    std::size_t zero_lag() const { return autocorr.size() / 2; }
};

CorrelationReport cross_correlate(const Code& a, const Code& b,
                                  CorrelationMode mode = CorrelationMode::Cyclic);

/// Default threshold for "numerically zero" cross-correlation: 1e-9 * N.
double default_zcz_threshold(std::size_t n);

/// Largest L such that |R_ab[l]| <= threshold for l = 1..L (cyclic), capped at N-1.
std::size_t zcz_length(const Code& a, const Code& b, double threshold);

/// Sentinel returned instead of -inf when every sidelobe is exactly zero.
inline constexpr double kPslFloorDb = -300.0;

void write_code_csv(const Code& code, const std::filesystem::path& path);
Code read_code_csv(const std::filesystem::path& path);

}  // namespace cirad
