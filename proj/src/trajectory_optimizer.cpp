#include "tfmm/trajectory_optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "tfmm/reserve_dynamics.hpp"

namespace tfmm {

namespace {

// The objective factorizes as p.R(t_f) = A * exp(L) where
//   A = sum_i p_i R_i(t_0) w_i(t_f) / w_i(t_0)
// depends only on the fixed endpoints and
//   L = sum_{k=1..f} sum_j w_j(t_k) (log w_j(t_{k-1}) - log w_j(t_k))
// is the log of the token-independent step-factor product. All
// optimization happens on L.

double endpoint_factor(const InterpolationRequest& req, const PoolState& pool,
                       const PriceVector& prices) {
    double a = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        a += prices[i] * pool.reserves[i] * req.w_end[i] / req.w_start[i];
    }
    return a;
}

// interior: f-1 rows of N weights. Endpoints passed separately.
struct Chain {
    const Vec* start;
    const Vec* end;
    const std::vector<Vec>* interior;

    const Vec& row(std::size_t k) const {
        const std::size_t f = interior->size() + 1;
        if (k == 0) return *start;
        if (k == f) return *end;
        return (*interior)[k - 1];
    }
    std::size_t segments() const { return interior->size() + 1; }
};

double chain_log_product(const Chain& c) {
    double L = 0.0;
    for (std::size_t k = 1; k <= c.segments(); ++k) {
        const Vec& prev = c.row(k - 1);
        const Vec& cur = c.row(k);
        for (std::size_t j = 0; j < cur.size(); ++j) {
            L += cur[j] * (std::log(prev[j]) - std::log(cur[j]));
        }
    }
    return L;
}

// dL/dw_j(t_k) for interior k: terms from segments k and k+1.
void chain_gradient(const Chain& c, std::vector<Vec>& grad) {
    const std::size_t f = c.segments();
    for (std::size_t k = 1; k < f; ++k) {
        const Vec& prev = c.row(k - 1);
        const Vec& cur = c.row(k);
        const Vec& next = c.row(k + 1);
        Vec& g = grad[k - 1];
        for (std::size_t j = 0; j < cur.size(); ++j) {
            g[j] = std::log(prev[j]) - std::log(cur[j]) - 1.0 +
                   next[j] / cur[j];
        }
    }
}

// Small dense LU with partial pivoting for the (N+1)-sized KKT blocks.
struct SmallLu {
    std::vector<double> lu;
    std::vector<std::size_t> piv;
    std::size_t n = 0;

    bool factor(std::vector<double> a, std::size_t n_in) {
        n = n_in;
        lu = std::move(a);
        piv.resize(n);
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t p = c;
            for (std::size_t r = c + 1; r < n; ++r) {
                if (std::abs(lu[r * n + c]) > std::abs(lu[p * n + c])) p = r;
            }
            piv[c] = p;
            if (p != c) {
                for (std::size_t l = 0; l < n; ++l)
                    std::swap(lu[c * n + l], lu[p * n + l]);
            }
            const double d = lu[c * n + c];
            if (d == 0.0) return false;
            for (std::size_t r = c + 1; r < n; ++r) {
                const double factor = lu[r * n + c] / d;
                lu[r * n + c] = factor;
                for (std::size_t l = c + 1; l < n; ++l)
                    lu[r * n + l] -= factor * lu[c * n + l];
            }
        }
        return true;
    }

    void solve(Vec& x) const {
        for (std::size_t c = 0; c < n; ++c) {
            if (piv[c] != c) std::swap(x[c], x[piv[c]]);
            for (std::size_t r = c + 1; r < n; ++r)
                x[r] -= lu[r * n + c] * x[c];
        }
        for (std::size_t c = n; c-- > 0;) {
            for (std::size_t l = c + 1; l < n; ++l)
                x[c] -= lu[c * n + l] * x[l];
            x[c] /= lu[c * n + c];
        }
    }
};

}  // namespace

std::vector<Vec> trajectory_objective_gradient(const Trajectory& traj,
                                               const PoolState& pool,
                                               const PriceVector& prices) {
    if (traj.steps.size() < 2) {
        throw BadLength("BadLength: trajectory needs at least two steps");
    }
    const std::size_t f = traj.num_segments();
    std::vector<Vec> interior;
    interior.reserve(f > 0 ? f - 1 : 0);
    for (std::size_t k = 1; k < f; ++k) {
        interior.push_back(traj.steps[k].weights());
    }
    Chain c{&traj.steps.front().weights(), &traj.steps.back().weights(),
            &interior};

    const Vec final_reserves = trajectory_final_reserves(pool, traj);
    const double value = pool_value(final_reserves, prices);

    std::vector<Vec> grad(interior.size(), Vec(pool.size()));
    chain_gradient(c, grad);
    for (Vec& g : grad) {
        for (double& x : g) x *= value;
    }
    return grad;
}

OptimizerResult optimize_trajectory(const InterpolationRequest& req,
                                    const PoolState& pool,
                                    const PriceVector& prices,
                                    const OptimizerConfig& cfg) {
    // Equilibrium precondition, same tolerance as reserve_update.
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double q = quoted_price(pool, i, prices.numeraire_index);
        if (std::abs(q - prices[i]) > kEquilibriumTol * prices[i]) {
            throw NotAtEquilibrium("NotAtEquilibrium: optimizer input pool");
        }
    }

    const std::size_t f = req.num_steps;
    const std::size_t n = req.w_start.size();
    const double value0 = pool_value(pool, prices);
    const double grad_tol = cfg.gradient_tolerance > 0.0
                                ? cfg.gradient_tolerance
                                : 1e-10 * value0;
    const double a_factor = endpoint_factor(req, pool, prices);

    OptimizerResult out;
    if (f == 1) {
        out.trajectory = one_step_trajectory(req);
        out.trajectory.scheme = SchemeLabel::NumericalOptimal;
        out.final_value = pool_value(
            trajectory_final_reserves(pool, out.trajectory), prices);
        out.converged = true;
        out.objective_history.push_back(out.final_value);
        return out;
    }

    // Mixing weight of the uniform point; keeps every component strictly
    // above epsilon_bound regardless of where softmax saturates.
    const double mix =
        std::max(1e-9, static_cast<double>(n) * cfg.epsilon_bound);

    const std::size_t m = f - 1;  // interior steps
    Trajectory init = approx_optimal_trajectory(req);

    // z: unconstrained softmax parameters, one row per interior step.
    std::vector<Vec> z(m, Vec(n));
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            z[k][j] = std::log(init.steps[k + 1][j]);
        }
    }

    std::vector<Vec> w(m, Vec(n));
    auto unpack = [&](const std::vector<Vec>& zs, std::vector<Vec>& ws) {
        for (std::size_t k = 0; k < m; ++k) {
            double zmax = zs[k][0];
            for (double v : zs[k]) zmax = std::max(zmax, v);
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                ws[k][j] = std::exp(zs[k][j] - zmax);
                sum += ws[k][j];
            }
            for (std::size_t j = 0; j < n; ++j) {
                ws[k][j] = (1.0 - mix) * ws[k][j] / sum +
                           mix / static_cast<double>(n);
            }
        }
    };

    Chain chain{&req.w_start.weights(), &req.w_end.weights(), &w};

    unpack(z, w);
    double L = chain_log_product(chain);

    std::vector<Vec> grad_w(m, Vec(n)), grad_z(m, Vec(n));
    std::vector<Vec> dir(m, Vec(n)), prev_grad_z(m, Vec(n));
    std::vector<Vec> z_trial(m, Vec(n)), w_trial(m, Vec(n));

    auto compute_grad_z = [&]() {
        chain_gradient(chain, grad_w);
        for (std::size_t k = 0; k < m; ++k) {
            // Softmax Jacobian: s has the mix removed before scaling.
            double dot = 0.0;
            Vec s(n);
            for (std::size_t j = 0; j < n; ++j) {
                s[j] = (w[k][j] - mix / static_cast<double>(n)) / (1.0 - mix);
                dot += s[j] * grad_w[k][j];
            }
            for (std::size_t j = 0; j < n; ++j) {
                grad_z[k][j] = (1.0 - mix) * s[j] * (grad_w[k][j] - dot);
            }
        }
    };

    // Projected gradient of p.R(t_f) w.r.t. the weights, for the
    // convergence test: per step, remove the simplex-normal component.
    auto projected_grad_norm = [&](double value) {
        double norm2 = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            double mean = 0.0;
            for (std::size_t j = 0; j < n; ++j) mean += grad_w[k][j];
            mean /= static_cast<double>(n);
            for (std::size_t j = 0; j < n; ++j) {
                const double g = value * (grad_w[k][j] - mean);
                norm2 += g * g;
            }
        }
        return std::sqrt(norm2);
    };

    compute_grad_z();
    double value = a_factor * std::exp(L);
    out.objective_history.push_back(value);

    bool converged = projected_grad_norm(value) <= grad_tol;
    double prev_gz_norm2 = 0.0;
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t j = 0; j < n; ++j)
            prev_gz_norm2 += grad_z[k][j] * grad_z[k][j];
    dir = grad_z;

    int iter = 0;
    const double armijo_c = 1e-4;
    while (!converged && iter < cfg.max_iterations) {
        ++iter;

        double gd = 0.0;  // directional derivative along dir
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t j = 0; j < n; ++j)
                gd += grad_z[k][j] * dir[k][j];

        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            if (attempt == 1) {
                // CG direction failed the line search; restart with the
                // raw gradient.
                dir = grad_z;
                gd = prev_gz_norm2;
            }
            if (gd <= 0.0) continue;
            double t = cfg.step_size;
            while (t > 1e-18) {
                for (std::size_t k = 0; k < m; ++k)
                    for (std::size_t j = 0; j < n; ++j)
                        z_trial[k][j] = z[k][j] + t * dir[k][j];
                unpack(z_trial, w_trial);
                std::swap(w, w_trial);
                const double L_trial = chain_log_product(chain);
                std::swap(w, w_trial);
                if (L_trial >= L + armijo_c * t * gd) {
                    std::swap(z, z_trial);
                    std::swap(w, w_trial);
                    L = L_trial;
                    accepted = true;
                    break;
                }
                t *= cfg.step_decay;
            }
        }
        if (!accepted) break;  // stationary to line-search resolution

        prev_grad_z.swap(grad_z);
        compute_grad_z();
        value = a_factor * std::exp(L);
        out.objective_history.push_back(value);
        if (projected_grad_norm(value) <= grad_tol) {
            converged = true;
            break;
        }

        // Polak-Ribiere+ coefficient.
        double gz_norm2 = 0.0, gz_dot_prev = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                gz_norm2 += grad_z[k][j] * grad_z[k][j];
                gz_dot_prev += grad_z[k][j] * prev_grad_z[k][j];
            }
        }
        const double beta =
            prev_gz_norm2 > 0.0
                ? std::max(0.0, (gz_norm2 - gz_dot_prev) / prev_gz_norm2)
                : 0.0;
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t j = 0; j < n; ++j)
                dir[k][j] = grad_z[k][j] + beta * dir[k][j];
        prev_gz_norm2 = gz_norm2;
    }

    // Tail refinement: line searches compare objective values, which stop
    // resolving once improvements drop below one ulp of L — far above the
    // stationarity tolerance. Finish by solving the first-order conditions
    //   log w_j(k-1) - log w_j(k) - 1 + w_j(k+1)/w_j(k) = mu_k,
    //   sum_j w_j(k) = 1
    // directly with damped Newton on the block-tridiagonal KKT system.
    if (!converged) {
        const std::size_t b = n + 1;  // per-step unknowns: N weights + mu
        std::vector<double> mu(m);
        for (std::size_t k = 0; k < m; ++k) {
            double mean = 0.0;
            for (std::size_t j = 0; j < n; ++j) mean += grad_w[k][j];
            mu[k] = mean / static_cast<double>(n);
        }

        auto residual = [&](const std::vector<Vec>& ws,
                            const std::vector<double>& mus,
                            std::vector<Vec>& out_f) {
            const Chain c{&req.w_start.weights(), &req.w_end.weights(), &ws};
            double norm2 = 0.0;
            for (std::size_t k = 1; k <= m; ++k) {
                const Vec& prev = c.row(k - 1);
                const Vec& cur = c.row(k);
                const Vec& next = c.row(k + 1);
                Vec& fk = out_f[k - 1];
                double sum = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    fk[j] = std::log(prev[j]) - std::log(cur[j]) - 1.0 +
                            next[j] / cur[j] - mus[k - 1];
                    sum += cur[j];
                    norm2 += fk[j] * fk[j];
                }
                fk[n] = sum - 1.0;
                norm2 += fk[n] * fk[n];
            }
            return std::sqrt(norm2);
        };

        std::vector<Vec> F(m, Vec(b)), F_trial(m, Vec(b));
        std::vector<Vec> y(m, Vec(b)), delta(m, Vec(b));
        std::vector<std::vector<double>> E(m);
        std::vector<Vec> w_trial_rows(m, Vec(n));
        std::vector<double> mu_trial(m);
        double res_norm = residual(w, mu, F);

        for (int nit = 0; nit < 80 && !converged; ++nit) {
            // Block Thomas elimination. Lower block C_k = diag(1/prev_j),
            // diagonal A_k has diag(-1/cur - next/cur^2), mu column/row
            // borders, upper block B_k = diag(1/cur_j).
            bool singular = false;
            for (std::size_t k = 0; k < m && !singular; ++k) {
                const Vec& cur = w[k];
                const Vec& next =
                    (k + 1 < m) ? w[k + 1] : req.w_end.weights();
                std::vector<double> D(b * b, 0.0);
                for (std::size_t j = 0; j < n; ++j) {
                    D[j * b + j] =
                        -1.0 / cur[j] - next[j] / (cur[j] * cur[j]);
                    D[j * b + n] = -1.0;
                    D[n * b + j] = 1.0;
                }
                Vec rhs(b);
                for (std::size_t j = 0; j < b; ++j) rhs[j] = -F[k][j];
                if (k > 0) {
                    const Vec& prev = w[k - 1];
                    const std::vector<double>& ep = E[k - 1];
                    for (std::size_t j = 0; j < n; ++j) {
                        const double c = 1.0 / prev[j];
                        for (std::size_t l = 0; l < b; ++l)
                            D[j * b + l] -= c * ep[j * b + l];
                        rhs[j] -= c * y[k - 1][j];
                    }
                }
                SmallLu lu;
                if (!lu.factor(D, b)) {
                    singular = true;
                    break;
                }
                lu.solve(rhs);
                y[k] = rhs;
                // E_k = D^{-1} B_k, column l (l < n) is D^{-1} e_l / cur_l.
                E[k].assign(b * b, 0.0);
                for (std::size_t l = 0; l < n; ++l) {
                    Vec col(b, 0.0);
                    col[l] = 1.0 / cur[l];
                    lu.solve(col);
                    for (std::size_t r = 0; r < b; ++r)
                        E[k][r * b + l] = col[r];
                }
            }
            if (singular) break;

            delta[m - 1] = y[m - 1];
            for (std::size_t k = m - 1; k-- > 0;) {
                for (std::size_t r = 0; r < b; ++r) {
                    double acc = y[k][r];
                    for (std::size_t l = 0; l < n; ++l)
                        acc -= E[k][r * b + l] * delta[k + 1][l];
                    delta[k][r] = acc;
                }
            }

            // Fraction-to-boundary damping, then backtrack on the residual.
            double s = 1.0;
            for (std::size_t k = 0; k < m; ++k) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (delta[k][j] < 0.0) {
                        s = std::min(s, 0.9 * (w[k][j] - cfg.epsilon_bound) /
                                            -delta[k][j]);
                    }
                }
            }
            if (s <= 0.0) break;

            bool improved = false;
            for (int bt = 0; bt < 40 && !improved; ++bt) {
                for (std::size_t k = 0; k < m; ++k) {
                    for (std::size_t j = 0; j < n; ++j)
                        w_trial_rows[k][j] = w[k][j] + s * delta[k][j];
                    mu_trial[k] = mu[k] + s * delta[k][n];
                }
                const double trial =
                    residual(w_trial_rows, mu_trial, F_trial);
                if (trial < res_norm) {
                    w.swap(w_trial_rows);
                    mu.swap(mu_trial);
                    F.swap(F_trial);
                    res_norm = trial;
                    improved = true;
                } else {
                    s *= 0.5;
                }
            }
            if (!improved) break;

            ++iter;
            L = chain_log_product(chain);
            value = a_factor * std::exp(L);
            out.objective_history.push_back(value);
            chain_gradient(chain, grad_w);
            converged = projected_grad_norm(value) <= grad_tol;
        }
    }

    out.iterations_used = iter;
    out.converged = converged;

    Trajectory traj;
    traj.scheme = SchemeLabel::NumericalOptimal;
    traj.steps.reserve(f + 1);
    traj.steps.push_back(req.w_start);
    for (std::size_t k = 0; k < m; ++k) {
        traj.steps.push_back(
            WeightVector::validate(w[k], cfg.epsilon_bound));
    }
    traj.steps.push_back(req.w_end);
    out.final_value =
        pool_value(trajectory_final_reserves(pool, traj), prices);
    out.trajectory = std::move(traj);
    return out;
}

}  // namespace tfmm
