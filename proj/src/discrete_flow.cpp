#include "kestrel/discrete_flow.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "kestrel/linalg.hpp"
#include "kestrel/ode.hpp"
#include "kestrel/optimize.hpp"

namespace kestrel {

DiscreteState DiscreteState::from_points(std::vector<double> pts) {
    DiscreteState s;
    double mean = 0.0;
    for (double p : pts) mean += p;
    mean /= pts.size();
    for (double& p : pts) p -= mean;
    s.x = std::move(pts);
    s.validate();
    return s;
}

DiscreteState DiscreteState::from_gaps(const std::vector<double>& gaps) {
    std::vector<double> pts(gaps.size() + 1, 0.0);
    for (std::size_t i = 0; i < gaps.size(); ++i) pts[i + 1] = pts[i] + gaps[i];
    return from_points(std::move(pts));
}

DiscreteState DiscreteState::from_uv(double u, double v) { return from_gaps({u, v}); }

void DiscreteState::validate() const {
    if (x.size() < 3) throw std::invalid_argument("DiscreteState: N >= 3 required");
    double mx = 0.0, sum = 0.0;
    for (double p : x) {
        mx = std::max(mx, std::abs(p));
        sum += p;
    }
    if (std::abs(sum) > 1e-12 * std::max(mx, 1.0) * x.size())
        throw std::invalid_argument("DiscreteState: center of mass not zero");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1]))
            throw std::invalid_argument("DiscreteState: points must strictly increase");
}

std::vector<double> DiscreteState::gaps() const {
    std::vector<double> g(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) g[i] = x[i + 1] - x[i];
    return g;
}

double DiscreteState::norm2() const {
    double s = 0.0;
    for (double p : x) s += p * p;
    return s;
}

namespace {

double energy_terms(const DiscreteConfig& c, const std::vector<double>& x, double* w_out) {
    const int n = static_cast<int>(x.size());
    double u_part = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double g = x[i + 1] - x[i];
        if (!(g > 0.0)) throw std::invalid_argument("energy: nonpositive gap");
        u_part -= std::log(g);
    }
    double w = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) w += std::pow(x[j] - x[i], -c.gamma);
    w *= c.chi() / c.gamma;
    if (w_out) *w_out = w;
    return u_part - w;
}

// returns false (and poisons g with NaN) when some gap is nonpositive, so an
// adaptive stage probing past the collapse gets rejected instead of throwing
bool gradient_raw_nothrow(const DiscreteConfig& c, const std::vector<double>& x,
                          std::vector<double>& g) {
    const int n = static_cast<int>(x.size());
    const double chi = c.chi();
    if (n == 3) {
        // written so that a bitwise-symmetric state (u == v) yields an exactly
        // antisymmetric gradient; otherwise rounding seeds the asymmetric
        // instability of the collapse
        const double u = x[1] - x[0], v = x[2] - x[1];
        if (!(u > 0.0) || !(v > 0.0)) {
            g.assign(n, std::numeric_limits<double>::quiet_NaN());
            return false;
        }
        const double w = u + v;
        const double pu = std::pow(u, -c.gamma - 1.0);
        const double pv = std::pow(v, -c.gamma - 1.0);
        const double pw = std::pow(w, -c.gamma - 1.0);
        g.resize(3);
        g[0] = 1.0 / u - chi * (pu + pw);
        g[1] = (1.0 / v - 1.0 / u) + chi * (pu - pv);
        g[2] = chi * (pv + pw) - 1.0 / v;
        return true;
    }
    g.assign(n, 0.0);
    for (int k = 0; k + 1 < n; ++k) {
        const double gap = x[k + 1] - x[k];
        if (!(gap > 0.0)) {
            g.assign(n, std::numeric_limits<double>::quiet_NaN());
            return false;
        }
        g[k] += 1.0 / gap;
        g[k + 1] -= 1.0 / gap;
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double att = chi * std::pow(x[j] - x[i], -c.gamma - 1.0);
            g[j] += att;
            g[i] -= att;
        }
    return true;
}

void gradient_raw(const DiscreteConfig& c, const std::vector<double>& x,
                  std::vector<double>& g) {
    if (!gradient_raw_nothrow(c, x, g))
        throw std::invalid_argument("gradient: nonpositive gap");
}

} // namespace

double energy(const DiscreteConfig& c, const DiscreteState& s) {
    c.validate();
    return energy_terms(c, s.x, nullptr);
}

double pair_sum(const DiscreteConfig& c, const DiscreteState& s) {
    c.validate();
    double w = 0.0;
    energy_terms(c, s.x, &w);
    return w;
}

std::vector<double> gradient(const DiscreteConfig& c, const DiscreteState& s) {
    c.validate();
    std::vector<double> g;
    gradient_raw(c, s.x, g);
    return g;
}

double gauge(const DiscreteConfig& c, const DiscreteState& s) {
    c.validate();
    double w = 0.0;
    const double g = energy_terms(c, s.x, &w);
    const double u_part = g + w;
    const double q = static_cast<double>(s.x.size()) - 1.0;
    return u_part - (q / c.gamma) * (std::log(c.gamma * w / q) + 1.0);
}

FlowOutcome integrate(const DiscreteConfig& c, const DiscreteState& s0,
                      const IntegrateOptions& opt) {
    c.validate();
    s0.validate();
    const int n = static_cast<int>(s0.x.size());

    OdeRhs rhs = [&c](const std::vector<double>& x, std::vector<double>& dx) {
        if (!gradient_raw_nothrow(c, x, dx)) return;  // NaN stage, step rejected
        for (double& v : dx) v = -v;
    };

    auto min_gap = [n](const std::vector<double>& x) {
        double m = x[1] - x[0];
        for (int i = 1; i + 1 < n; ++i) m = std::min(m, x[i + 1] - x[i]);
        return m;
    };
    std::vector<OdeEvent> events;
    events.push_back({[min_gap, &opt](const std::vector<double>& x) {
                          return min_gap(x) - opt.gap_tol;
                      },
                      -1});
    events.push_back({[&opt](const std::vector<double>& x) {
                          double s = 0.0;
                          for (double p : x) s += p * p;
                          return s - sq(opt.r_max);
                      },
                      +1});

    OdeOptions oopt;
    oopt.rel_tol = opt.rel_tol;
    oopt.abs_tol = opt.abs_tol;
    oopt.max_steps = opt.max_steps;

    FlowOutcome out;
    OdeObserver obs = nullptr;
    if (opt.record) {
        out.trajectory.push_back({0.0, s0.x, energy_terms(c, s0.x, nullptr), s0.norm2()});
        obs = [&](double t, const std::vector<double>& x) {
            double n2 = 0.0;
            for (double p : x) n2 += p * p;
            out.trajectory.push_back({t, x, energy_terms(c, x, nullptr), n2});
            return true;
        };
    }

    OdeResult res = integrate_adaptive(rhs, s0.x, 0.0, opt.t_max, oopt, events, obs);
    out.time = res.t;
    switch (res.outcome) {
        case OdeOutcome::Event: {
            if (res.event_index == 0) {
                out.classification = FlowClass::Collapse;
                int arg = 0;
                double m = res.y[1] - res.y[0];
                for (int i = 1; i + 1 < n; ++i)
                    if (res.y[i + 1] - res.y[i] < m) {
                        m = res.y[i + 1] - res.y[i];
                        arg = i;
                    }
                out.gap_index = arg;
            } else {
                out.classification = FlowClass::Dispersion;
            }
            break;
        }
        case OdeOutcome::StepUnderflow: {
            // never silently classified: flag the underflow, and call it a
            // collapse only when a gap is already far below the natural scale
            out.step_underflow = true;
            if (min_gap(res.y) < 100.0 * opt.gap_tol) {
                out.classification = FlowClass::Collapse;
                out.gap_index = 0;
                double m = res.y[1] - res.y[0];
                for (int i = 1; i + 1 < n; ++i)
                    if (res.y[i + 1] - res.y[i] < m) {
                        m = res.y[i + 1] - res.y[i];
                        out.gap_index = i;
                    }
            } else {
                out.classification = FlowClass::Undecided;
            }
            break;
        }
        default:
            out.classification = FlowClass::Undecided;
            break;
    }
    return out;
}

namespace {

CriterionReport make_threshold_report(const char* name, double lhs, double rhs, bool strict,
                                      const DiscreteConfig& c) {
    CriterionReport r;
    r.name = name;
    r.lhs = lhs;
    r.rhs = rhs;
    r.verdict = strict ? (lhs < rhs) : (lhs <= rhs);
    r.margin = rhs - lhs;
    r.boundary = lhs == rhs;
    r.inputs = {{"gamma", c.gamma}, {"mass", c.mass}, {"n_points", double(c.n_points)}};
    return r;
}

} // namespace

CriterionReport criterion_blowup_1(const DiscreteConfig& c, const DiscreteState& s0) {
    c.validate();
    s0.validate();
    const int n = static_cast<int>(s0.x.size());
    const double pairs = 0.5 * n * (n - 1);
    const double thr = std::pow(c.chi() * std::pow(pairs, 1.0 + 0.5 * c.gamma) *
                                    std::pow(double(n), -0.5 * c.gamma) / (n - 1),
                                2.0 / c.gamma);
    CriterionReport r = make_threshold_report("discrete_blowup_1", s0.norm2(), thr, true, c);
    r.inputs["norm2"] = s0.norm2();
    return r;
}

CriterionReport criterion_blowup_2(const DiscreteConfig& c, const DiscreteState& s0) {
    c.validate();
    s0.validate();
    const int n = static_cast<int>(s0.x.size());
    const double g = energy_terms(c, s0.x, nullptr);
    double thr;
    if (n == 3)
        thr = 2.0 * std::exp(-g - 2.0 / c.gamma);
    else
        thr = (n - 1.0) / n * std::exp(-2.0 * g / (n - 1.0) - 2.0 / c.gamma);
    CriterionReport r = make_threshold_report("discrete_blowup_2", s0.norm2(), thr, false, c);
    r.inputs["norm2"] = s0.norm2();
    r.extra["energy"] = g;
    return r;
}

CriterionReport criterion_global(const DiscreteConfig& c, double u0, double v0) {
    c.validate();
    if (c.n_points != 3)
        throw std::invalid_argument("criterion_global: stated for N = 3 only");
    if (!(u0 > 0.0 && v0 > 0.0)) throw std::invalid_argument("criterion_global: gaps > 0");
    const double lhs = c.chi() * (std::pow(u0, -c.gamma) + std::pow(v0, -c.gamma));
    CriterionReport r;
    r.name = "discrete_global";
    r.lhs = lhs;
    r.rhs = 1.0;
    r.verdict = lhs < 1.0;
    r.margin = r.rhs - r.lhs;
    r.boundary = lhs == 1.0;
    r.inputs = {{"gamma", c.gamma}, {"mass", c.mass}, {"u0", u0}, {"v0", v0}};
    return r;
}

DiscreteState critical_point(const DiscreteConfig& c) {
    c.validate();
    const int n = c.n_points;
    const int m = n - 1;  // gap coordinates
    // N = 3 closed form seeds the general Newton solve
    const double seed =
        std::pow(c.chi() * (2.0 + std::pow(2.0, -c.gamma)) / 2.0, 1.0 / c.gamma);
    std::vector<double> gaps(m, seed);

    auto to_state = [](const std::vector<double>& g) { return DiscreteState::from_gaps(g); };
    auto F = [&](const std::vector<double>& g, std::vector<double>& f) {
        std::vector<double> grad;
        gradient_raw(c, to_state(g).x, grad);
        f.assign(grad.begin(), grad.begin() + m);  // last component is -sum of these
    };
    auto J = [&](const std::vector<double>& g, Matrix& jac) {
        std::vector<double> fp, fm, gp;
        for (int j = 0; j < m; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(g[j]));
            gp = g;
            gp[j] += h;
            F(gp, fp);
            gp[j] = g[j] - h;
            F(gp, fm);
            for (int i = 0; i < m; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
        }
    };
    auto guard = [](const std::vector<double>& g) {
        for (double v : g)
            if (!(v > 0.0)) return false;
        return true;
    };
    NewtonResult res = newton_solve(F, J, gaps, 1e-12, 200, guard);
    if (!res.converged)
        throw numerical_error("critical_point: Newton did not converge (residual " +
                              std::to_string(res.residual_norm) + ")");
    return to_state(res.x);
}

double verify_discrete_gns(double gamma, const std::vector<double>& u_grid) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("verify_discrete_gns: gamma in (0,1)");
    double worst = -std::numeric_limits<double>::infinity();
    for (double U : u_grid) {
        if (!(U > 0.0)) throw std::invalid_argument("verify_discrete_gns: grid must be positive");
        const double lhs = 2.0 * std::pow(U, -2.0 * gamma - 2.0) + 2.0 -
                           2.0 * std::pow(U, -gamma - 1.0) +
                           std::pow(U + 1.0, -gamma - 1.0) * (std::pow(U, -gamma - 1.0) + 1.0);
        const double rhs = (std::pow(U, -gamma) + 1.0) *
                           (2.0 * std::pow(U, -gamma - 2.0) + 2.0 - std::pow(U, -gamma - 1.0) -
                            1.0 / U);
        worst = std::max(worst, lhs - rhs);
    }
    return worst;
}

// ---- separatrix ------------------------------------------------------------

namespace {

FlowClass classify_fast(const DiscreteConfig& c, double u, double v, double t_max) {
    IntegrateOptions opt;
    opt.record = false;
    opt.t_max = t_max;
    opt.gap_tol = 1e-7;
    opt.r_max = 300.0;
    opt.rel_tol = 1e-9;
    opt.abs_tol = 1e-12;
    return integrate(c, DiscreteState::from_uv(u, v), opt).classification;
}

} // namespace

Separatrix separatrix(const DiscreteConfig& c, double span) {
    c.validate();
    if (c.n_points != 3) throw std::invalid_argument("separatrix: N = 3 only");
    if (!(span > 0.0)) throw std::invalid_argument("separatrix: span > 0 required");

    Separatrix sep;
    const DiscreteState xs = critical_point(c);
    const double us = xs.u();
    sep.u_star = us;

    // Hessian of G at the critical point restricted to the zero-sum plane
    {
        const int n = 3;
        Matrix H(n);
        std::vector<double> gp, gm, xt;
        for (int j = 0; j < n; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(xs.x[j]));
            xt = xs.x;
            xt[j] += h;
            gradient_raw(c, xt, gp);
            xt[j] = xs.x[j] - h;
            gradient_raw(c, xt, gm);
            for (int i = 0; i < n; ++i) H(i, j) = (gp[i] - gm[i]) / (2.0 * h);
        }
        const double b1[3] = {1.0 / std::sqrt(2.0), 0.0, -1.0 / std::sqrt(2.0)};
        const double b2[3] = {1.0 / std::sqrt(6.0), -2.0 / std::sqrt(6.0), 1.0 / std::sqrt(6.0)};
        Matrix R(2);
        auto quad = [&](const double* a, const double* b) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) s += a[i] * H(i, j) * b[j];
            return s;
        };
        R(0, 0) = quad(b1, b1);
        R(0, 1) = quad(b1, b2);
        R(1, 0) = quad(b2, b1);
        R(1, 1) = quad(b2, b2);
        EigenSym e = eigen_symmetric(R);
        for (int k = 0; k < 2; ++k) {
            sep.hessian_eigenvalues[k] = e.values[k];
            double vec3[3];
            for (int i = 0; i < 3; ++i) vec3[i] = e.vectors[k][0] * b1[i] + e.vectors[k][1] * b2[i];
            sep.eigvec_uv[k] = {vec3[1] - vec3[0], vec3[2] - vec3[1]};
        }
    }

    // seeded eigenvector manifolds (diagnostic): forward trajectories from
    // +-delta0 offsets along each eigenvector
    const double delta0 = 1e-6 * std::sqrt(xs.norm2());
    for (int k = 0; k < 2; ++k)
        for (int sgn : {+1, -1}) {
            const double du = sgn * delta0 * sep.eigvec_uv[k][0];
            const double dv = sgn * delta0 * sep.eigvec_uv[k][1];
            const double scale = std::hypot(sep.eigvec_uv[k][0], sep.eigvec_uv[k][1]);
            if (scale <= 0) continue;
            DiscreteState s = DiscreteState::from_uv(us + du / scale, us + dv / scale);
            IntegrateOptions opt;
            opt.t_max = 1e4;
            opt.gap_tol = 1e-6;
            opt.r_max = 3.0 * span;
            std::vector<std::array<double, 2>> line;
            FlowOutcome fo = integrate(c, s, opt);
            line.reserve(fo.trajectory.size());
            for (const TrajectorySample& ts : fo.trajectory)
                line.push_back({ts.x[1] - ts.x[0], ts.x[2] - ts.x[1]});
            sep.seeded_manifolds.push_back(std::move(line));
        }

    // basin boundary: for each v-level above the critical point, bisect u
    // between a collapsing and a dispersing outcome
    const double asym = std::pow(c.chi(), 1.0 / c.gamma);  // global-criterion asymptote
    const int levels = 72;
    sep.branch_up.push_back({us, us});
    for (int k = 1; k <= levels; ++k) {
        const double frac = static_cast<double>(k) / levels;
        const double v = us + (span - us) * std::pow(frac, 1.6);
        double lo = 0.55 * asym;  // collapse side
        double hi = v;            // diagonal above the critical point disperses
        if (classify_fast(c, lo, v, 1e6) != FlowClass::Collapse)
            throw numerical_error("separatrix: collapse bracket failed");
        if (classify_fast(c, hi, v, 1e6) != FlowClass::Dispersion)
            throw numerical_error("separatrix: dispersion bracket failed");
        for (int it = 0; it < 44; ++it) {
            const double mid = 0.5 * (lo + hi);
            const FlowClass cl = classify_fast(c, mid, v, 1e6);
            if (cl == FlowClass::Collapse)
                lo = mid;
            else
                hi = mid;  // Undecided lands with the dispersal side; interval shrinks anyway
        }
        sep.branch_up.push_back({0.5 * (lo + hi), v});
    }
    sep.branch_down.reserve(sep.branch_up.size());
    for (const auto& p : sep.branch_up) sep.branch_down.push_back({p[1], p[0]});

    // calibrate the side-test sign on a point that criterion 1 guarantees to
    // collapse
    sep.collapse_side_sign = 1.0;
    const SideTest probe = separatrix_side(sep, 0.25 * us, 0.25 * us);
    if (probe.predicted != FlowClass::Collapse) sep.collapse_side_sign = -1.0;
    return sep;
}

SideTest separatrix_side(const Separatrix& sep, double u, double v) {
    // full boundary polyline ordered from (large u, small v) to (small u, large v)
    std::vector<std::array<double, 2>> curve(sep.branch_down.rbegin(), sep.branch_down.rend());
    curve.insert(curve.end(), sep.branch_up.begin() + 1, sep.branch_up.end());

    double best = std::numeric_limits<double>::infinity();
    double side = 0.0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const double ax = curve[i][0], ay = curve[i][1];
        const double bx = curve[i + 1][0], by = curve[i + 1][1];
        const double ex = bx - ax, ey = by - ay;
        const double len2 = ex * ex + ey * ey;
        double t = len2 > 0 ? ((u - ax) * ex + (v - ay) * ey) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double px = ax + t * ex, py = ay + t * ey;
        const double dist = std::hypot(u - px, v - py);
        if (dist < best) {
            best = dist;
            side = ex * (v - ay) - ey * (u - ax);  // cross product sign
        }
    }
    SideTest st;
    st.distance = best;
    const double sgn = sep.collapse_side_sign == 0.0 ? 1.0 : sep.collapse_side_sign;
    st.predicted = side * sgn > 0.0 ? FlowClass::Collapse : FlowClass::Dispersion;
    return st;
}

// ---- phase portrait ---------------------------------------------------------

PhasePortrait phase_portrait(const DiscreteConfig& c, const PortraitSpec& spec) {
    c.validate();
    if (c.n_points != 3) throw std::invalid_argument("phase_portrait: N = 3 only");
    if (spec.cells_u < 2 || spec.cells_v < 2)
        throw std::invalid_argument("phase_portrait: need at least 2x2 cells");
    PhasePortrait pp;
    pp.spec = spec;
    pp.config = c;
    const int nu = spec.cells_u, nv = spec.cells_v;
    pp.u_centers.resize(nu);
    pp.v_centers.resize(nv);
    for (int i = 0; i < nu; ++i)
        pp.u_centers[i] = spec.u_min + (i + 0.5) * (spec.u_max - spec.u_min) / nu;
    for (int j = 0; j < nv; ++j)
        pp.v_centers[j] = spec.v_min + (j + 0.5) * (spec.v_max - spec.v_min) / nv;

    const std::size_t cells = static_cast<std::size_t>(nu) * nv;
    pp.cls.assign(cells, FlowClass::Undecided);
    pp.gap_index.assign(cells, -1);
    pp.crit1.assign(cells, 0);
    pp.crit2.assign(cells, 0);
    pp.global.assign(cells, 0);

    int nthreads = spec.threads;
    if (nthreads <= 0) {
        nthreads = static_cast<int>(std::thread::hardware_concurrency());
        if (nthreads <= 0) nthreads = 4;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= cells) return;
            const int iu = static_cast<int>(idx % nu);
            const int iv = static_cast<int>(idx / nu);
            const double u = pp.u_centers[iu], v = pp.v_centers[iv];
            try {
                const DiscreteState s = DiscreteState::from_uv(u, v);
                pp.crit1[idx] = criterion_blowup_1(c, s).verdict ? 1 : 0;
                pp.crit2[idx] = criterion_blowup_2(c, s).verdict ? 1 : 0;
                pp.global[idx] = criterion_global(c, u, v).verdict ? 1 : 0;
                IntegrateOptions opt;
                opt.record = false;
                opt.t_max = spec.t_max;
                FlowOutcome fo = integrate(c, s, opt);
                pp.cls[idx] = fo.classification;
                pp.gap_index[idx] = fo.gap_index;
            } catch (const std::exception&) {
                pp.cls[idx] = FlowClass::Undecided;  // per-cell failures stay local
            }
        }
    };
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // overlays
    const double span = std::max(spec.u_max, spec.v_max);
    const double thr1 = criterion_blowup_1(c, DiscreteState::from_uv(1.0, 1.0)).rhs;
    for (int k = 0; k <= 256; ++k) {
        const double phi = 1e-3 + (0.5 * M_PI - 2e-3) * k / 256.0;
        const double cu = std::cos(phi), sv = std::sin(phi);
        const double rho = std::sqrt(thr1 / ((2.0 / 3.0) * (1.0 + cu * sv)));
        pp.crit1_boundary.push_back({rho * cu, rho * sv});
    }
    // criterion-2 region is star-shaped in rho at fixed angle
    for (int k = 0; k <= 256; ++k) {
        const double phi = 1e-3 + (0.5 * M_PI - 2e-3) * k / 256.0;
        const double cu = std::cos(phi), sv = std::sin(phi);
        auto margin = [&](double rho) {
            const DiscreteState s = DiscreteState::from_uv(rho * cu, rho * sv);
            return s.norm2() -
                   2.0 * std::exp(-energy_terms(c, s.x, nullptr) - 2.0 / c.gamma);
        };
        double lo = 1e-6, hi = 4.0 * span;
        if (margin(lo) < 0.0 && margin(hi) > 0.0) {
            const double rho = bisect_root(margin, lo, hi, 1e-12);
            pp.crit2_boundary.push_back({rho * cu, rho * sv});
        }
    }
    // W = 2/gamma line: for each u above the asymptote, solve in v
    {
        const double u_asym = std::pow(0.5 * c.chi(), 1.0 / c.gamma);
        const int nk = 192;
        std::vector<std::array<double, 2>> half;
        for (int k = 1; k <= nk; ++k) {
            const double u = u_asym * (1.0 + 1e-6) +
                             (span - u_asym) * std::pow(double(k) / nk, 2.0);
            auto f = [&](double v) {
                return pair_sum(c, DiscreteState::from_uv(u, v)) - 2.0 / c.gamma;
            };
            if (f(1e-9) < 0.0) continue;  // entire ray below the line
            double hi = span * 4.0;
            if (f(hi) > 0.0) continue;
            half.push_back({u, bisect_root(f, 1e-9, hi, 1e-12)});
        }
        // symmetric closure through the diagonal
        pp.maximal_line.assign(half.rbegin(), half.rend());
        for (auto& p : pp.maximal_line) std::swap(p[0], p[1]);
        pp.maximal_line.insert(pp.maximal_line.end(), half.begin(), half.end());
    }
    // global-existence boundary: chi(u^-g + v^-g) = 1
    {
        const double u_asym = std::pow(c.chi(), 1.0 / c.gamma);
        const int nk = 192;
        for (int k = 1; k <= nk; ++k) {
            const double u =
                u_asym * (1.0 + 1e-9) + (span - u_asym) * std::pow(double(k) / nk, 2.0);
            const double rest = 1.0 / c.chi() - std::pow(u, -c.gamma);
            if (!(rest > 0.0)) continue;
            const double v = std::pow(rest, -1.0 / c.gamma);
            pp.global_boundary.push_back({u, v});
        }
    }
    pp.sep = separatrix(c, 1.2 * span);
    return pp;
}

} // namespace kestrel
