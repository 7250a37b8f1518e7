#include "triage/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "triage/cohort.hpp"
#include "triage/errors.hpp"

namespace triage {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

double multiplier_equation(double nu, const std::vector<double>& e) {
    double sum = 0.0;
    for (double ei : e) {
        double d = ei - 1.0;
        sum += d / (1.0 + nu * d);
    }
    return sum;
}

double multiplier_equation_deriv(double nu, const std::vector<double>& e) {
    double sum = 0.0;
    for (double ei : e) {
        double d = ei - 1.0;
        double den = 1.0 + nu * d;
        sum -= d * d / (den * den);
    }
    return sum;
}

}  // namespace

double solve_multiplier(double beta0_star, double beta1, const std::vector<double>& scores,
                        double prevalence) {
    std::vector<double> e;
    e.reserve(scores.size());
    double e_min = std::numeric_limits<double>::infinity();
    double e_max = 0.0;
    for (double s : scores) {
        double v = std::exp(beta0_star + beta1 * s);
        if (!std::isfinite(v)) throw NumericalError("tilt factor overflow");
        e.push_back(v);
        e_min = std::min(e_min, v);
        e_max = std::max(e_max, v);
    }
    if (e_max - 1.0 < 1e-12 && 1.0 - e_min < 1e-12) return prevalence;  // vacuous equation

    // admissible interval keeps all 1 + nu (e_i - 1) positive
    double lo = e_max > 1.0 ? -1.0 / (e_max - 1.0) : -1e12;
    double hi = e_min < 1.0 ? 1.0 / (1.0 - e_min) : 1e12;

    // nudge inside the poles until a sign change appears; the equation is
    // strictly decreasing from +inf to -inf on the open interval
    double span = hi - lo;
    double a = lo, b = hi;
    double fa = 0.0, fb = 0.0;
    bool bracketed = false;
    for (double frac = 1e-9; frac < 0.5; frac *= 10.0) {
        a = lo + frac * span;
        b = hi - frac * span;
        if (a >= b) break;
        fa = multiplier_equation(a, e);
        fb = multiplier_equation(b, e);
        if (std::isfinite(fa) && std::isfinite(fb) && fa > 0.0 && fb < 0.0) {
            bracketed = true;
            break;
        }
    }
    if (!bracketed) {
        if (std::isfinite(fa) && std::isfinite(fb) && fa * fb < 0.0) {
            bracketed = true;
            if (fa < 0.0) std::swap(a, b);
        } else {
            throw NumericalError("no sign change on the admissible multiplier bracket");
        }
    }

    // bisection to a tight interval, then Newton polish
    for (int i = 0; i < 200 && std::fabs(b - a) > 1e-14 * (1.0 + std::fabs(a)); ++i) {
        double mid = 0.5 * (a + b);
        double fm = multiplier_equation(mid, e);
        if (fm > 0.0)
            a = mid;
        else
            b = mid;
    }
    double nu = 0.5 * (a + b);
    for (int i = 0; i < 8; ++i) {
        double f = multiplier_equation(nu, e);
        double fp = multiplier_equation_deriv(nu, e);
        if (fp == 0.0) break;
        double next = nu - f / fp;
        if (next <= lo || next >= hi) break;
        if (next == nu) break;
        nu = next;
    }
    if (std::fabs(multiplier_equation(nu, e)) > 1e-10 * static_cast<double>(e.size()))
        throw NumericalError("multiplier equation residual too large");
    return nu;
}

TiltModel fit_tilt(const Cohort& cohort) {
    if (!cohort.has_both_statuses()) throw DataError("cohort must contain both statuses");

    TiltModel model;
    model.scores = cohort.scores();
    auto labels = cohort.statuses();
    model.logistic = fit_logistic_1d(model.scores, labels);
    if (!model.logistic.converged) throw NumericalError("logistic fit did not converge");
    model.beta0 = model.logistic.intercept;
    model.beta1 = model.logistic.coefficients[0];

    const double n = static_cast<double>(cohort.size());
    const double p_hat = static_cast<double>(cohort.count_status(1)) / n;
    model.beta0_star = model.beta0 - logit(p_hat);
    model.multiplier = solve_multiplier(model.beta0_star, model.beta1, model.scores, p_hat);

    model.masses.resize(cohort.size());
    std::vector<std::pair<double, double>> m0, m1;
    m0.reserve(cohort.size());
    m1.reserve(cohort.size());
    for (std::size_t i = 0; i < model.scores.size(); ++i) {
        double ei = std::exp(model.beta0_star + model.beta1 * model.scores[i]);
        double theta = 1.0 / (n * (1.0 + model.multiplier * (ei - 1.0)));
        if (!(theta > 0.0)) throw NumericalError("nonpositive profile mass");
        model.masses[i] = theta;
        m0.emplace_back(model.scores[i], theta);
        m1.emplace_back(model.scores[i], ei * theta);
    }
    model.cdfs.neg = StepCdf::from_masses(std::move(m0));
    model.cdfs.pos = StepCdf::from_masses(std::move(m1));
    model.cdfs.prevalence = p_hat;

    std::vector<std::pair<double, double>> mixed;
    mixed.reserve(model.cdfs.neg.points.size());
    double prev_neg = 0.0, prev_pos = 0.0;
    for (std::size_t i = 0; i < model.cdfs.neg.points.size(); ++i) {
        double neg_mass = model.cdfs.neg.cum[i] - prev_neg;
        double pos_mass = model.cdfs.pos.cum[i] - prev_pos;
        prev_neg = model.cdfs.neg.cum[i];
        prev_pos = model.cdfs.pos.cum[i];
        mixed.emplace_back(model.cdfs.neg.points[i],
                           (1.0 - p_hat) * neg_mass + p_hat * pos_mass);
    }
    model.cdfs.pooled = StepCdf::from_masses(std::move(mixed));
    return model;
}

OverlayTable gof_overlay(const TiltModel& tilt, const CdfSet& empirical,
                         const std::vector<double>& grid) {
    OverlayTable table;
    table.rows.reserve(grid.size());
    for (double s : grid) {
        OverlayRow row;
        row.score = s;
        row.neg_empirical = empirical.neg(s);
        row.neg_tilt = tilt.cdfs.neg(s);
        row.pos_empirical = empirical.pos(s);
        row.pos_tilt = tilt.cdfs.pos(s);
        table.sup_distance_neg =
            std::max(table.sup_distance_neg, std::fabs(row.neg_empirical - row.neg_tilt));
        table.sup_distance_pos =
            std::max(table.sup_distance_pos, std::fabs(row.pos_empirical - row.pos_tilt));
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace triage
