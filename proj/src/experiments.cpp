// Copyright 2026 The RQML Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rqml/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include <omp.h>

namespace rqml {

SessionConfig session_for_run(const EnsembleConfig& cfg, std::size_t run) {
    SessionConfig s = cfg.session;
    s.seed = cfg.seed + run;
    s.record_trace = false;
    if (cfg.random_target) {
        Rng rng = make_rng(s.seed, Stream::Target);
        s.target = random_state(s.d, rng);
    }
    return s;
}

SurvivalCurve::SurvivalCurve(std::size_t n_l, std::vector<std::uint64_t> halting_n)
    : n_l_(n_l), n_(std::move(halting_n)) {
    std::sort(n_.begin(), n_.end());
}

double SurvivalCurve::learning_probability(std::uint64_t n) const {
    if (n_.empty()) return 0.0;
    const auto halted = std::upper_bound(n_.begin(), n_.end(), n) - n_.begin();
    return static_cast<double>(halted) / static_cast<double>(n_.size());
}

double SurvivalCurve::survival_probability(std::uint64_t n) const {
    return 1.0 - learning_probability(n);
}

std::vector<std::uint64_t> SurvivalCurve::steps() const {
    std::vector<std::uint64_t> s = n_;
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

namespace {

SessionResult run_one(const EnsembleConfig& cfg, std::size_t run) {
    const SessionConfig s = session_for_run(cfg, run);
    std::unique_ptr<Adversary> adv;
    if (cfg.adversary) adv = cfg.adversary(s.seed);
    return run_session(s, adv.get());
}

EnsembleResult aggregate(const EnsembleConfig& cfg, std::vector<SessionResult> sessions) {
    EnsembleResult out;
    std::vector<std::uint64_t> halting;
    double n_sum = 0.0;
    double eps_sum = 0.0;
    for (std::size_t r = 0; r < sessions.size(); ++r) {
        const SessionResult& s = sessions[r];
        if (s.halted) {
            halting.push_back(s.n_effective);
            n_sum += static_cast<double>(s.n_effective);
            eps_sum += s.epsilon_l;
        } else {
            ++out.capped_runs;
            out.warnings.push_back("run " + std::to_string(r) + " did not halt within " +
                                   std::to_string(s.n_effective) +
                                   " effective iterations; excluded from fits");
        }
    }
    out.halted_runs = halting.size();
    if (!halting.empty()) {
        out.n_bar_sim = n_sum / static_cast<double>(halting.size());
        out.mean_epsilon = eps_sum / static_cast<double>(halting.size());
    }
    out.curve = SurvivalCurve(cfg.session.n_l, std::move(halting));
    out.sessions = std::move(sessions);
    return out;
}

}  // namespace

EnsembleResult run_ensemble_serial(const EnsembleConfig& cfg) {
    if (cfg.runs == 0) throw std::invalid_argument("ensemble needs at least one run");
    cfg.session.validate();
    std::vector<SessionResult> sessions;
    sessions.reserve(cfg.runs);
    for (std::size_t r = 0; r < cfg.runs; ++r) sessions.push_back(run_one(cfg, r));
    return aggregate(cfg, std::move(sessions));
}

EnsembleResult run_ensemble(const EnsembleConfig& cfg, int threads) {
    if (cfg.runs == 0) throw std::invalid_argument("ensemble needs at least one run");
    cfg.session.validate();
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
    const auto runs = static_cast<std::ptrdiff_t>(cfg.runs);
    std::vector<SessionResult> sessions(cfg.runs);
    std::vector<std::exception_ptr> errors(cfg.runs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
    for (std::ptrdiff_t r = 0; r < runs; ++r) {
        const auto run = static_cast<std::size_t>(r);
        try {
            sessions[run] = run_one(cfg, run);
        } catch (...) {
            errors[run] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return aggregate(cfg, std::move(sessions));
}

FitResult fit_survival_exponential(const SurvivalCurve& curve) {
    if (curve.runs() < 50) {
        throw FitUnavailable("exponential fit needs at least 50 halted runs, have " +
                             std::to_string(curve.runs()));
    }
    const double floor = std::max(0.02, 10.0 / static_cast<double>(curve.runs()));
    std::vector<double> xs;
    std::vector<double> ys;
    for (const std::uint64_t n : curve.steps()) {
        const double ps = curve.survival_probability(n);
        if (ps < floor) break;
        xs.push_back(static_cast<double>(n) + 1.0 - static_cast<double>(curve.n_l()));
        ys.push_back(std::log(ps));
    }
    if (xs.size() < 2) throw FitUnavailable("survival curve has fewer than two points in the fit window");

    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += xs[i] * ys[i];
        sxx += xs[i] * xs[i];
    }
    const double slope = sxy / sxx;
    if (!(slope < 0.0)) throw FitUnavailable("survival curve does not decay");

    const double ymean = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        ss_res += std::pow(ys[i] - slope * xs[i], 2);
        ss_tot += std::pow(ys[i] - ymean, 2);
    }
    FitResult fit;
    fit.model = FitModel::ExpDecay;
    fit.n_c = -1.0 / slope;
    fit.n_bar = fit.n_c + static_cast<double>(curve.n_l());
    fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    fit.window_lo = xs.front();
    fit.window_hi = xs.back();
    fit.points = xs.size();
    return fit;
}

FitResult fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("power-law fit needs paired samples");
    if (x.size() < 3) throw std::invalid_argument("power-law fit needs at least 3 points");
    std::vector<double> lx(x.size());
    std::vector<double> ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw std::domain_error("power-law fit needs strictly positive data");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw std::domain_error("power-law fit needs at least two distinct abscissae");
    FitResult fit;
    fit.model = FitModel::PowerLaw;
    fit.exponent = sxy / sxx;
    fit.coefficient = std::exp(my - fit.exponent * mx);
    double ss_res = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        ss_res += std::pow(ly[i] - (my + fit.exponent * (lx[i] - mx)), 2);
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.window_lo = *std::min_element(x.begin(), x.end());
    fit.window_hi = *std::max_element(x.begin(), x.end());
    fit.points = x.size();
    return fit;
}

std::uint64_t quantile(std::vector<std::uint64_t> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must lie in (0, 1]");
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    return values[std::max<std::size_t>(rank, 1) - 1];
}

double exceedance_fraction(std::span<const SessionResult> sessions, std::uint64_t threshold) {
    if (sessions.empty()) return 0.0;
    std::size_t over = 0;
    for (const SessionResult& s : sessions) {
        if (!s.halted || s.n_effective > threshold) ++over;
    }
    return static_cast<double>(over) / static_cast<double>(sessions.size());
}

CalibrationReport calibrate_baseline(const EnsembleConfig& honest, int threads,
                                     double threshold_quantile) {
    CalibrationReport rep;
    rep.baseline = run_ensemble(honest, threads);
    rep.runs = honest.runs;
    rep.n_bar_sim = rep.baseline.n_bar_sim;
    rep.mean_epsilon = rep.baseline.mean_epsilon;
    rep.threshold_quantile = threshold_quantile;
    try {
        rep.fit = fit_survival_exponential(rep.baseline.curve);
    } catch (const FitUnavailable& e) {
        rep.baseline.warnings.emplace_back(e.what());
    }
    std::vector<std::uint64_t> n;
    n.reserve(rep.baseline.sessions.size());
    for (const SessionResult& s : rep.baseline.sessions) n.push_back(s.n_effective);
    rep.threshold = quantile(n, threshold_quantile);
    rep.false_alarm_rate = exceedance_fraction(rep.baseline.sessions, rep.threshold);
    return rep;
}

ScalingFits fit_scaling(std::span<const MemorySweepRow> rows) {
    ScalingFits out;
    std::vector<double> nl;
    std::vector<double> nbar;
    std::vector<double> eps;
    for (const MemorySweepRow& r : rows) {
        if (r.halted == 0) continue;
        nl.push_back(static_cast<double>(r.n_l));
        nbar.push_back(r.n_bar_sim);
        eps.push_back(r.mean_epsilon);
    }
    if (nl.size() < 3) return out;
    out.time = fit_power_law(nl, nbar);
    if (std::all_of(eps.begin(), eps.end(), [](double e) { return e > 0.0; })) {
        out.error = fit_power_law(nl, eps);
        out.trade_off = fit_power_law(nbar, eps);
    }
    return out;
}

}  // namespace rqml
