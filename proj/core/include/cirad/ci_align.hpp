#pragma once

#include <cstddef>
#include <vector>

#include "cirad/codebook.hpp"
#include "cirad/matrix.hpp"
#include "cirad/scene.hpp"
#include "cirad/weight.hpp"

namespace cirad {

/// Receiver-side model of one cross path: the weighted code, delayed by
/// `shift` chips, is multiplied chip by chip by `response` (amplitude, fast-time
/// Doppler and the slow-time phase of the observation pulse).
struct CrossPathModel {
    std::size_t shift = 0;
    std::vector<cd> response;
};

/// One coordination round as seen by radar c1.
///
/// self_echo is pulse 1 (c1 transmitting c2), cross_echo is pulse 2 (c2
/// transmitting c2). paths is the channel knowledge used to predict the
/// weighted cross echo; when empty, make_problem installs a single zero-shift
/// path that reproduces cross_echo, i.e. the weight acts per receive chip.
struct AlignmentProblem {
    std::vector<cd> self_echo;
    std::vector<cd> cross_echo;
    Code code;
    std::vector<CrossPathModel> paths;

    std::size_t size() const { return self_echo.size(); }
};

AlignmentProblem make_problem(std::vector<cd> self_echo, std::vector<cd> cross_echo, Code code,
                              std::vector<CrossPathModel> paths = {});

/// Path models from (possibly stale) channel knowledge at a given pulse.
std::vector<CrossPathModel> cross_paths_from_channel(const ChannelParams& chan, const WaveformParams& wf,
                                                     std::size_t pulse_index);

/// y_new[n] = sum_k (W c)[n - s_k] response_k[n].
std::vector<cd> predicted_cross_echo(const AlignmentProblem& problem, const WeightMatrix& weight);

struct AlignmentMetrics {
    double im_norm = 0.0;         // ||Im(u)||_2
    double u_norm = 0.0;          // ||u||_2
    double constraint_gap = 0.0;  // || |y_s| |y_new| - Re(u) ||_2
    double objective = 0.0;       // ||Im u||^2 + gap^2, normalized by the problem scale
};

/// u = y_s . conj(y_new) with y_new predicted for the given weight.
AlignmentMetrics evaluate_alignment(const AlignmentProblem& problem, const WeightMatrix& weight);

/// Diagonal phase-only solution aligning the dominant cross path:
/// W[p] = exp(j(arg y_s[p+s] - arg y_c2[p+s])). Exact for a single target.
/// Chips where either phase is undefined get W = 1 and are counted in
/// flagged_elements.
WeightMatrix solve_alignment_closed_form(const AlignmentProblem& problem);

struct IterativeOptions {
    std::size_t max_iter = 500;
    double tol = 1e-8;
    double step = 0.1;
};

/// Projected gradient over unit-modulus diagonal weights, starting from the
/// identity. The objective is ||Im u||^2 plus the squared gap to the
/// Re(u) = |y_s||y_new| constraint, so anti-aligned chips are not accepted as
/// solutions. Steps are halved whenever the objective would increase.
/// converged == false means max_iter was reached; the best iterate is still
/// returned.
WeightMatrix solve_alignment_iterative(const AlignmentProblem& problem, const IterativeOptions& opts = {});

/// Largest per-element phase difference |arg(a[n] conj(b[n]))|. With
/// modulo_global the mean phase offset is removed first.
double phase_distance(const std::vector<cd>& a, const std::vector<cd>& b, bool modulo_global = false);

}  // namespace cirad
