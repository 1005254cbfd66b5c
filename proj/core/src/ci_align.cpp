#include "cirad/ci_align.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>

#include "cirad/error.hpp"

namespace cirad {

namespace {

// Below this fraction of the largest magnitude a chip's phase is treated as undefined.
constexpr double kSilentChip = 1e-12;

double max_abs(const std::vector<cd>& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace

AlignmentProblem make_problem(std::vector<cd> self_echo, std::vector<cd> cross_echo, Code code,
                              std::vector<CrossPathModel> paths) {
    const std::size_t n = self_echo.size();
    if (cross_echo.size() != n || code.size() != n) {
        throw ValidationError("alignment problem: self echo, cross echo and code must have equal length");
    }
    if (max_abs(self_echo) == 0.0) throw ValidationError("alignment problem: self echo is all zero");
    if (max_abs(cross_echo) == 0.0) throw ValidationError("alignment problem: cross echo is all zero");
    if (paths.empty()) {
        CrossPathModel path;
        path.shift = 0;
        path.response.resize(n);
        for (std::size_t i = 0; i < n; ++i) path.response[i] = cross_echo[i] * std::conj(code[i]);
        paths.push_back(std::move(path));
    }
    for (const auto& p : paths) {
        if (p.response.size() != n) throw ValidationError("alignment problem: path response length mismatch");
    }
    return AlignmentProblem{std::move(self_echo), std::move(cross_echo), std::move(code), std::move(paths)};
}

std::vector<CrossPathModel> cross_paths_from_channel(const ChannelParams& chan, const WaveformParams& wf,
                                                     std::size_t pulse_index) {
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<CrossPathModel> paths;
    for (const auto& t : chan.targets) {
        CrossPathModel p;
        p.shift = t.cross_chip_shift % wf.code_length;
        p.response.resize(wf.code_length);
        const cd slow = std::polar(1.0, two_pi * t.cross_doppler_hz * static_cast<double>(pulse_index) * wf.pulse_s);
        for (std::size_t i = 0; i < wf.code_length; ++i) {
            const cd fast = std::polar(1.0, -two_pi * t.cross_doppler_hz * static_cast<double>(i) * wf.chip_s);
            p.response[i] = t.cross_amplitude * fast * slow;
        }
        paths.push_back(std::move(p));
    }
    return paths;
}

namespace {

std::vector<cd> predict(const AlignmentProblem& problem, std::span<const cd> tx) {
    const std::size_t n = problem.size();
    std::vector<cd> y(n);
    for (const auto& path : problem.paths) {
        for (std::size_t i = 0; i < n; ++i) y[i] += tx[(i + n - path.shift) % n] * path.response[i];
    }
    return y;
}

std::vector<cd> diagonal_tx(const AlignmentProblem& problem, const std::vector<cd>& w) {
    std::vector<cd> tx(problem.size());
    for (std::size_t i = 0; i < tx.size(); ++i) tx[i] = w[i] * problem.code[i];
    return tx;
}

// Scale that makes the objective dimensionless: sum_n |y_s[n]|^2 sum_k |r_k[n]|^2.
double problem_scale(const AlignmentProblem& problem) {
    double scale = 0.0;
    for (std::size_t i = 0; i < problem.size(); ++i) {
        double r = 0.0;
        for (const auto& p : problem.paths) r += std::norm(p.response[i]);
        scale += std::norm(problem.self_echo[i]) * r;
    }
    return scale > 0.0 ? scale : 1.0;
}

AlignmentMetrics metrics_for(const AlignmentProblem& problem, const std::vector<cd>& y_new, double scale) {
    AlignmentMetrics m;
    double im2 = 0.0, u2 = 0.0, gap2 = 0.0;
    for (std::size_t i = 0; i < problem.size(); ++i) {
        const cd u = problem.self_echo[i] * std::conj(y_new[i]);
        const double target = std::abs(problem.self_echo[i]) * std::abs(y_new[i]);
        im2 += u.imag() * u.imag();
        u2 += std::norm(u);
        gap2 += (target - u.real()) * (target - u.real());
    }
    m.im_norm = std::sqrt(im2);
    m.u_norm = std::sqrt(u2);
    m.constraint_gap = std::sqrt(gap2);
    m.objective = (im2 + gap2) / scale;
    return m;
}

void record(WeightMatrix& w, const AlignmentMetrics& m) {
    w.objective_residual = m.im_norm;
    w.constraint_gap = m.constraint_gap;
    w.u_norm = m.u_norm;
}

}  // namespace

std::vector<cd> predicted_cross_echo(const AlignmentProblem& problem, const WeightMatrix& weight) {
    return predict(problem, weighted_samples(weight, problem.code));
}

AlignmentMetrics evaluate_alignment(const AlignmentProblem& problem, const WeightMatrix& weight) {
    return metrics_for(problem, predicted_cross_echo(problem, weight), problem_scale(problem));
}

WeightMatrix solve_alignment_closed_form(const AlignmentProblem& problem) {
    const std::size_t n = problem.size();
    if (problem.paths.empty()) throw ValidationError("closed-form alignment needs at least one cross path");
    std::size_t dominant = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < problem.paths.size(); ++k) {
        double e = 0.0;
        for (const auto& z : problem.paths[k].response) e += std::norm(z);
        if (e > best) {
            best = e;
            dominant = k;
        }
    }
    const std::size_t shift = problem.paths[dominant].shift;
    const double self_floor = kSilentChip * max_abs(problem.self_echo);
    const double cross_floor = kSilentChip * max_abs(problem.cross_echo);

    std::vector<cd> entries(n, cd{1.0, 0.0});
    std::size_t flagged = 0;
    for (std::size_t p = 0; p < n; ++p) {
        const std::size_t rx = (p + shift) % n;
        const cd ys = problem.self_echo[rx];
        const cd yc = problem.cross_echo[rx];
        if (std::abs(yc) <= cross_floor || std::abs(ys) <= self_floor) {
            ++flagged;
            continue;
        }
        entries[p] = std::polar(1.0, std::arg(ys * std::conj(yc)));
    }
    auto w = WeightMatrix::from_diagonal(std::move(entries));
    w.flagged_elements = flagged;
    w.solver_iterations = 0;
    w.converged = true;
    record(w, evaluate_alignment(problem, w));
    return w;
}

WeightMatrix solve_alignment_iterative(const AlignmentProblem& problem, const IterativeOptions& opts) {
    if (opts.max_iter == 0 || !(opts.tol > 0.0) || !(opts.step > 0.0)) {
        throw ValidationError("iterative solver: max_iter, tol and step must be positive");
    }
    const std::size_t n = problem.size();
    const double scale = problem_scale(problem);
    const auto& ys = problem.self_echo;

    // Diagonal curvature of the objective in each phase, used to precondition
    // the step so chips with weak echoes converge as fast as strong ones.
    std::vector<double> curvature(n, 0.0);
    for (const auto& path : problem.paths) {
        for (std::size_t i = 0; i < n; ++i) {
            curvature[(i + n - path.shift) % n] += 2.0 * std::norm(ys[i]) * std::norm(path.response[i]) / scale;
        }
    }
    const double curvature_floor = 1e-14 * *std::max_element(curvature.begin(), curvature.end());

    std::vector<cd> w(n, cd{1.0, 0.0});
    auto y_new = predict(problem, diagonal_tx(problem, w));
    double f = metrics_for(problem, y_new, scale).objective;
    const double f0 = f;
    double step = opts.step;
    std::size_t iter = 0;
    bool converged = false;

    std::vector<cd> grad_e(n), grad_w(n), candidate(n);
    while (iter < opts.max_iter) {
        if (f <= opts.tol * opts.tol * f0 || f == 0.0) {
            converged = true;
            break;
        }
        ++iter;
        // d f / d conj(u) for f = 2|u|(|u| - Re u), then chain through
        // u = y_s conj(y_new) and y_new = sum_k shift_k(w c) r_k.
        for (std::size_t i = 0; i < n; ++i) {
            const cd u = ys[i] * std::conj(y_new[i]);
            const double au = std::abs(u);
            if (au == 0.0) {
                grad_e[i] = {};
                continue;
            }
            const double re = u.real(), im = u.imag();
            const double d_re = 4.0 * re - 2.0 * re * re / au - 2.0 * au;
            const double d_im = 4.0 * im - 2.0 * im * re / au;
            const cd g_u = 0.5 * cd{d_re, d_im} / scale;
            grad_e[i] = ys[i] * std::conj(g_u);
        }
        std::fill(grad_w.begin(), grad_w.end(), cd{});
        for (const auto& path : problem.paths) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t p = (i + n - path.shift) % n;
                grad_w[p] += grad_e[i] * std::conj(problem.code[p] * path.response[i]);
            }
        }

        double f_new = f;
        std::vector<cd> y_candidate;
        while (true) {
            for (std::size_t p = 0; p < n; ++p) {
                if (curvature[p] <= curvature_floor) {
                    candidate[p] = w[p];
                    continue;
                }
                const double d_phase = -2.0 * (std::conj(grad_w[p]) * w[p]).imag();
                const cd moved = w[p] * std::polar(1.0, -step * d_phase / curvature[p]);
                candidate[p] = moved / std::abs(moved);
            }
            y_candidate = predict(problem, diagonal_tx(problem, candidate));
            f_new = metrics_for(problem, y_candidate, scale).objective;
            if (f_new <= f || step < 1e-12) break;
            step *= 0.5;
        }
        if (f_new > f) {
            converged = true;  // no descent direction left at this resolution
            break;
        }
        const double decrease = f - f_new;
        w = candidate;
        y_new = std::move(y_candidate);
        f = f_new;
        if (decrease <= opts.tol * (f + decrease)) {
            converged = true;
            break;
        }
    }
    if (!converged && (f <= opts.tol * opts.tol * f0 || f == 0.0)) converged = true;

    auto weight = WeightMatrix::from_diagonal(std::move(w));
    weight.solver_iterations = iter;
    weight.converged = converged;
    record(weight, evaluate_alignment(problem, weight));
    return weight;
}

double phase_distance(const std::vector<cd>& a, const std::vector<cd>& b, bool modulo_global) {
    if (a.size() != b.size()) throw ValidationError("phase_distance: length mismatch");
    cd offset{1.0, 0.0};
    if (modulo_global) {
        cd acc{};
        for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
        if (std::abs(acc) > 0.0) offset = acc / std::abs(acc);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(std::arg(a[i] * std::conj(b[i]) * std::conj(offset))));
    }
    return worst;
}

}  // namespace cirad
