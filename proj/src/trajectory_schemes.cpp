#include "tfmm/trajectory_schemes.hpp"

#include <cmath>

#include "tfmm/lambert_w.hpp"

namespace tfmm {

namespace {

constexpr double kE = 2.718281828459045;

double step_epsilon(const InterpolationRequest& req) {
    return std::min(req.w_start.epsilon_bound(), req.w_end.epsilon_bound());
}

}  // namespace

InterpolationRequest::InterpolationRequest(WeightVector start,
                                           WeightVector end, std::size_t f)
    : w_start(std::move(start)), w_end(std::move(end)), num_steps(f) {
    if (w_start.size() != w_end.size()) {
        throw DimensionMismatch("DimensionMismatch: w_start vs w_end");
    }
    if (num_steps < 1) {
        throw BadLength("BadLength: num_steps must be >= 1");
    }
}

Vec optimal_intermediate(const WeightVector& w0, const WeightVector& wf) {
    if (w0.size() != wf.size()) {
        throw DimensionMismatch("DimensionMismatch: w0 vs wf");
    }
    Vec out(w0.size());
    for (std::size_t i = 0; i < w0.size(); ++i) {
        out[i] = wf[i] / lambert_w0(kE * wf[i] / w0[i]);
    }
    return out;
}

Vec d_r_d_wtilde(const WeightVector& w0, const Vec& w_mid,
                 const WeightVector& wf) {
    if (w0.size() != wf.size() || w0.size() != w_mid.size()) {
        throw DimensionMismatch("DimensionMismatch: weight vector lengths");
    }
    for (double w : w_mid) {
        if (!(w > 0.0) || !(w < 1.0)) {
            throw OutOfBounds("OutOfBounds: w_mid must be inside (0,1)^N");
        }
    }
    double log_r = 0.0;
    for (std::size_t j = 0; j < w0.size(); ++j) {
        log_r += (wf[j] - w_mid[j]) * (std::log(w_mid[j]) - std::log(w0[j]));
    }
    const double r = std::exp(log_r);
    Vec grad(w0.size());
    for (std::size_t i = 0; i < w0.size(); ++i) {
        grad[i] = r * (wf[i] / w_mid[i] + std::log(w0[i] / w_mid[i]) - 1.0);
    }
    return grad;
}

Trajectory linear_trajectory(const InterpolationRequest& req) {
    const double eps = step_epsilon(req);
    const std::size_t f = req.num_steps;
    Trajectory traj;
    traj.scheme = SchemeLabel::Linear;
    traj.steps.reserve(f + 1);
    traj.steps.push_back(req.w_start);
    for (std::size_t k = 1; k < f; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(f);
        Vec w(req.w_start.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] = (1.0 - t) * req.w_start[i] + t * req.w_end[i];
        }
        traj.steps.push_back(WeightVector::validate(w, eps));
    }
    traj.steps.push_back(req.w_end);
    return traj;
}

GeometricCurve geometric_trajectory(const InterpolationRequest& req) {
    const double eps = step_epsilon(req);
    const std::size_t f = req.num_steps;
    const std::size_t n = req.w_start.size();
    GeometricCurve out;
    out.normalized.scheme = SchemeLabel::Geometric;
    out.raw.reserve(f + 1);
    out.normalized.steps.reserve(f + 1);
    for (std::size_t k = 0; k <= f; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(f);
        Vec raw(n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            raw[i] = std::pow(req.w_start[i], 1.0 - t) *
                     std::pow(req.w_end[i], t);
            sum += raw[i];
        }
        Vec norm(n);
        for (std::size_t i = 0; i < n; ++i) norm[i] = raw[i] / sum;
        out.raw.push_back(std::move(raw));
        out.normalized.steps.push_back(WeightVector::validate(norm, eps));
    }
    return out;
}

Trajectory approx_optimal_trajectory(const InterpolationRequest& req) {
    const double eps = step_epsilon(req);
    const std::size_t f = req.num_steps;
    const std::size_t n = req.w_start.size();
    Trajectory traj;
    traj.scheme = SchemeLabel::ApproxOptimal;
    traj.steps.reserve(f + 1);
    traj.steps.push_back(req.w_start);
    for (std::size_t k = 1; k < f; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(f);
        Vec w(n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double am =
                (1.0 - t) * req.w_start[i] + t * req.w_end[i];
            const double gm = std::pow(req.w_start[i], 1.0 - t) *
                              std::pow(req.w_end[i], t);
            w[i] = am + gm;
            sum += w[i];
        }
        for (std::size_t i = 0; i < n; ++i) w[i] /= sum;
        traj.steps.push_back(WeightVector::validate(w, eps));
    }
    traj.steps.push_back(req.w_end);
    return traj;
}

Trajectory one_step_trajectory(const InterpolationRequest& req) {
    Trajectory traj;
    traj.scheme = SchemeLabel::OneStep;
    traj.steps.reserve(req.num_steps + 1);
    traj.steps.push_back(req.w_start);
    for (std::size_t k = 1; k <= req.num_steps; ++k) {
        traj.steps.push_back(req.w_end);
    }
    return traj;
}

Trajectory make_trajectory(const InterpolationRequest& req, SchemeLabel s) {
    switch (s) {
        case SchemeLabel::OneStep: return one_step_trajectory(req);
        case SchemeLabel::Linear: return linear_trajectory(req);
        case SchemeLabel::Geometric:
            return geometric_trajectory(req).normalized;
        case SchemeLabel::ApproxOptimal:
            return approx_optimal_trajectory(req);
        case SchemeLabel::NumericalOptimal:
            break;
    }
    throw ValidationError(
        "numerical-optimal trajectories come from the optimizer, not "
        "make_trajectory");
}

}  // namespace tfmm
