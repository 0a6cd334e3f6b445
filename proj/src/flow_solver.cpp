#include "vortex/flow_solver.hpp"

#include "vortex/preconditioner.hpp"
#include "vortex/states.hpp"

#include <cmath>

namespace vortex {

void FlowParams::validate() const {
    if (!(step > 0) || !(max_step >= step)) throw ValidationError("step sizes must satisfy 0 < step <= max_step");
    if (!(backtrack > 0 && backtrack < 1)) throw ValidationError("backtracking factor must lie in (0, 1)");
    if (!(armijo > 0 && armijo < 1)) throw ValidationError("Armijo constant must lie in (0, 1)");
    if (!(tol_a > 0) || !(tol_J > 0)) throw ValidationError("tolerances must be positive");
    if (max_iterations < 0) throw ValidationError("max_iterations must be non-negative");
    if (stall_window < 1) throw ValidationError("stall_window must be at least 1");
    if (shift < 0) throw ValidationError("preconditioner shift must be non-negative");
}

std::string to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::stalled: return "stalled";
    case SolveStatus::max_iterations: return "max-iterations";
    case SolveStatus::diverged: return "diverged";
    }
    return "unknown";
}

namespace {

// h^{1/2} exp(-eta X) h^{1/2}, returned as its logarithm
MatrixField step_state(const Evaluation& ev, const MatrixField& X, double eta, Exec exec) {
    int cells = X.cells(), r = X.rows();
    MatrixField out(cells, r, r);
    auto body = [&](int c) {
        HermEig e = herm_eig(-eta * CMat(X[c]));
        CMat hs = ev.hs[c];
        CMat h = herm(hs * apply_fn(e, [](double x) { return std::exp(x); }) * hs);
        out[c] = apply_fn(herm_eig(h), [](double x) { return std::log(x); });
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int c = 0; c < cells; ++c) body(c);
    } else {
        for (int c = 0; c < cells; ++c) body(c);
    }
    return out;
}

// tangent of the step curve at eta = 0
MatrixField step_tangent(const Evaluation& ev, const MatrixField& X) {
    MatrixField out(X.cells(), X.rows(), X.rows());
    for (int c = 0; c < X.cells(); ++c) out[c] = -CMat(ev.hs[c]) * CMat(X[c]) * CMat(ev.hs[c]);
    return out;
}

// Removes the mean of tr S / r; the deviation is invariant under constant
// scalar rescaling of the metric.
void fix_scalar_gauge(MatrixField& S, const SphereGrid& g) {
    int r = S.rows();
    double mean = 0;
    for (int j = 0; j < g.N; ++j) {
        double row = 0;
        for (int l = 0; l < g.n_phi; ++l) row += S[g.index(j, l)].trace().real();
        mean += g.weight[j] * row;
    }
    mean /= r;
    for (int c = 0; c < S.cells(); ++c) S[c].diagonal().array() -= mean;
}

double largest_eigenvalue(const Evaluation& ev) {
    double m = 0;
    for (const auto& e : ev.eig) m = std::max(m, e.lambda.cwiseAbs().maxCoeff());
    return m;
}

} // namespace

SolveReport solve_vortex(const SplitSystemConfig& cfg, const AlphaParam& alpha, const SphereGrid& g,
                         const FlowParams& params, const MatrixField* S0) {
    params.validate();
    VortexModel model(cfg, g, alpha);
    double shift = params.shift > 0          ? params.shift
                   : model.k() > 0 ? 0.5 * model.alpha() * model.k() / model.rank()
                                   : 0.5;

    SolveReport rep;
    MatrixField S = S0 ? *S0 : model.zero_state();
    fix_scalar_gauge(S, g);
    Evaluation ev = model.evaluate(S, params.exec);
    rep.history.push_back({0, ev.J, ev.l2, ev.sup_residual, 0.0});
    rep.min_J = ev.J;
    rep.status = SolveStatus::max_iterations;
    double eta = params.step;
    int it = 0;
    for (;;) {
        if (ev.J < params.tol_J && ev.sup_residual < params.tol_a) {
            rep.status = SolveStatus::converged;
            break;
        }
        if (it >= params.max_iterations) break;
        if (largest_eigenvalue(ev) > params.divergence_limit) {
            rep.status = SolveStatus::diverged;
            break;
        }
        MatrixField X = precondition(ev.deviation, cfg, shift, g, params.exec);
        double slope = model.l2_derivative_h(ev, step_tangent(ev, X), params.exec);
        if (!(slope < 0)) {
            X = ev.deviation;
            slope = model.l2_derivative_h(ev, step_tangent(ev, X), params.exec);
            if (!(slope < 0)) {
                rep.status = SolveStatus::stalled;
                break;
            }
        }
        bool accepted = false;
        Evaluation next;
        MatrixField S_next;
        while (eta > 1e-14) {
            S_next = step_state(ev, X, eta, params.exec);
            fix_scalar_gauge(S_next, g);
            try {
                next = model.evaluate(S_next, params.exec);
                if (next.l2 <= ev.l2 + params.armijo * eta * slope) {
                    accepted = true;
                    break;
                }
            } catch (const NumericalError&) {
            }
            eta *= params.backtrack;
        }
        if (!accepted) {
            rep.status = SolveStatus::stalled;
            break;
        }
        ++it;
        S = std::move(S_next);
        ev = std::move(next);
        rep.history.push_back({it, ev.J, ev.l2, ev.sup_residual, eta});
        rep.min_J = std::min(rep.min_J, ev.J);
        eta = std::min(2 * eta, params.max_step);
        if (it >= params.stall_window) {
            double old = rep.history[it - params.stall_window].l2;
            if (old - ev.l2 < params.stall_tolerance * old) {
                rep.status = SolveStatus::stalled;
                break;
            }
        }
    }
    rep.converged = rep.status == SolveStatus::converged;
    rep.J = ev.J;
    rep.l2 = ev.l2;
    rep.sup_residual = ev.sup_residual;
    rep.iterations = it;
    rep.frame = model.frame(ev);
    rep.gram_residual = model.gram_residual(ev);
    rep.S = std::move(S);
    if (auto sys = cfg.decomposition()) {
        if (auto ob = decomposable_obstruction(*sys, alpha)) {
            rep.lower_bound = ob->bound;
            rep.margin = rep.min_J - to_double(ob->bound);
        }
    }
    return rep;
}

GradientCheck gradient_check(const SplitSystemConfig& cfg, const MatrixField& S, const AlphaParam& alpha,
                             const SphereGrid& g, std::uint64_t seed, int directions, double fd_step) {
    VortexModel model(cfg, g, alpha);
    Evaluation ev = model.evaluate(S);
    GradientCheck out;
    for (int d = 0; d < directions; ++d) {
        MatrixField dir = random_smooth_state(cfg, g, seed * 1000 + d, 1.0);
        double an = model.l2_derivative(ev, dir);
        MatrixField plus = S, minus = S;
        for (std::size_t i = 0; i < S.data().size(); ++i) {
            plus.data()[i] += fd_step * dir.data()[i];
            minus.data()[i] -= fd_step * dir.data()[i];
        }
        double fd = (model.evaluate(plus).l2 - model.evaluate(minus).l2) / (2 * fd_step);
        double scale = std::max(std::abs(an), std::abs(fd));
        out.max_abs_derivative = std::max(out.max_abs_derivative, std::abs(an));
        if (scale > 0) out.max_relative_error = std::max(out.max_relative_error, std::abs(an - fd) / scale);
    }
    return out;
}

double metric_distance(const MatrixField& S1, const MatrixField& S2, int reference_cell) {
    if (S1.cells() != S2.cells() || S1.rows() != S2.rows()) throw ValidationError("states have different shapes");
    int r = S1.rows();
    double t1 = S1[reference_cell].trace().real() / r, t2 = S2[reference_cell].trace().real() / r;
    double out = 0;
    for (int c = 0; c < S1.cells(); ++c) {
        CMat a = S1[c], b = S2[c];
        a.diagonal().array() -= t1;
        b.diagonal().array() -= t2;
        CMat ha = apply_fn(herm_eig(herm(a)), [](double x) { return std::exp(x); });
        CMat hb = apply_fn(herm_eig(herm(b)), [](double x) { return std::exp(x); });
        out = std::max(out, (ha - hb).norm());
    }
    return out;
}

namespace {

void check_split(const SystemType& total, const SubobjectType& sub, const SubobjectType& quotient) {
    if (sub.r < 1 || quotient.r < 1 || sub.r + quotient.r != total.r || sub.d + quotient.d != total.d ||
        sub.k + quotient.k != total.k)
        throw ValidationError("sub and quotient types must add up to the total type");
}

} // namespace

Rational obstruction_bound(const SystemType& total, const SubobjectType& sub, const SubobjectType& quotient,
                           const AlphaParam& alpha) {
    check_split(total, sub, quotient);
    Rational mu = alpha_slope(total, alpha), mu1 = alpha_slope(sub, alpha), mu2 = alpha_slope(quotient, alpha);
    if (mu1 < mu) throw PreconditionError("subobject slope is below the total slope");
    return Rational(sub.r) * (mu1 - mu) + Rational(quotient.r) * (mu - mu2);
}

Rational extension_gap(const SystemType& total, const SubobjectType& sub, const SubobjectType& quotient,
                       const AlphaParam& alpha) {
    check_split(total, sub, quotient);
    Rational mu = alpha_slope(total, alpha), mu1 = alpha_slope(sub, alpha), mu2 = alpha_slope(quotient, alpha);
    return Rational(sub.r) * (mu - mu1) + Rational(quotient.r) * (mu2 - mu);
}

std::optional<Obstruction> decomposable_obstruction(const DecomposableSystem& sys, const AlphaParam& alpha) {
    SystemType total = sys.type();
    Rational mu = alpha_slope(total, alpha);
    std::optional<Obstruction> best;
    for (const auto& sub : summand_subobjects(sys)) {
        if (alpha_slope(sub.type, alpha) <= mu) continue;
        SystemType q{total.d - sub.type.d, total.r - sub.type.r, total.k - sub.type.k};
        Rational b = obstruction_bound(total, sub.type, q, alpha);
        if (!best || b > best->bound) best = Obstruction{sub, b};
    }
    return best;
}

} // namespace vortex
