#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

#include "cirad/codebook.hpp"
#include "cirad/matrix.hpp"

namespace cirad {

enum class WeightKind { Diagonal, Full };

std::string_view to_string(WeightKind kind);

/// Transmit-side weighting applied to the collaborator's code, W * c2.
///
/// Entries are indexed in transmit-chip coordinates: the code radar c2 puts on
/// air is (W c2)[p], and a target whose cross path delays it by s chips
/// contributes (W c2)[n - s] at receive chip n.
struct WeightMatrix {
    WeightKind kind = WeightKind::Diagonal;
    std::vector<cd> diagonal;  // used when kind == Diagonal
    CMatrix full;              // used when kind == Full
    double objective_residual = 0.0;  // ||Im(u)||_2 at the solution
    double constraint_gap = 0.0;      // || |y_s| |y_new| - Re(u) ||_2
    double u_norm = 0.0;              // ||u||_2
    std::size_t solver_iterations = 0;
    bool converged = true;
    std::size_t flagged_elements = 0;  // chips whose phase was undefined

    std::size_t size() const { return kind == WeightKind::Diagonal ? diagonal.size() : full.rows(); }

    static WeightMatrix identity(std::size_t n);
    static WeightMatrix from_diagonal(std::vector<cd> entries);
    static WeightMatrix from_full(CMatrix entries);
};

inline constexpr double kWeightedCodeTolerance = 1e-6;

/// Computes W * code without any unimodularity check.
std::vector<cd> weighted_samples(const WeightMatrix& weight, const Code& code);

/// Largest | |(W c)[n]| - 1 |.
double unimodularity_deviation(const WeightMatrix& weight, const Code& code);

/// Returns the code radar c2 transmits, W * c2. Throws ValidationError on a
/// dimension mismatch or when the result leaves the unit circle by more than
/// 1e-6 anywhere.
Code apply_weight(const WeightMatrix& weight, const Code& code);

/// Diagonal weights only; header records kind, N and the residual.
void write_weight_csv(const WeightMatrix& weight, const std::filesystem::path& path);
WeightMatrix read_weight_csv(const std::filesystem::path& path);

}  // namespace cirad
