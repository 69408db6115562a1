#include "kestrel/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kestrel/kernels.hpp"

namespace kestrel {

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Json to_json(const DimensionalConstants& c) {
    Json j;
    j["d"] = c.d;
    j["sphere_area"] = c.sphere_area;
    j["mu_d"] = c.mu_d;
    j["sobolev_sq"] = c.sobolev_sq;
    j["hls"] = c.hls;
    j["k1"] = c.k1;
    j["k2"] = c.k2;
    j["smallness_sobolev"] = c.smallness_sobolev;
    if (c.smallness_gn) j["smallness_gn"] = *c.smallness_gn;
    return j;
}

Json to_json(const CriterionReport& r) {
    Json j;
    j["name"] = r.name;
    j["verdict"] = r.verdict;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["margin"] = r.margin;
    j["inputs"] = Json::object();
    for (const auto& [k, v] : r.inputs) j["inputs"][k] = v;
    if (r.boundary) j["boundary"] = true;
    if (r.inconclusive) j["inconclusive"] = true;
    if (r.log_scale) j["log_scale"] = true;
    if (!r.extra.empty()) {
        j["extra"] = Json::object();
        for (const auto& [k, v] : r.extra) j["extra"][k] = v;
    }
    return j;
}

Json to_json(const MomentReport& r) {
    Json j;
    j["M"] = r.M;
    j["I"] = r.I;
    j["S"] = r.S;
    j["P"] = r.P;
    j["Lhalf"] = r.Lhalf;
    j["E"] = r.E;
    j["F"] = r.F;
    return j;
}

DensityProfile profile_from_json(const Json& j) {
    DensityProfile p;
    p.d = j.at("d").get<int>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "bumps") {
        for (const Json& jb : j.at("bumps")) {
            Bump b;
            b.weight = jb.at("w").get<double>();
            b.center = jb.at("a").get<std::vector<double>>();
            b.width = jb.at("lambda").get<double>();
            const std::string prof = jb.at("profile").get<std::string>();
            if (prof == "gaussian")
                b.shape = BumpShape::Gaussian;
            else if (prof == "poly")
                b.shape = BumpShape::PolyBump;
            else
                throw std::invalid_argument("profile_from_json: unknown profile " + prof);
            p.bumps.push_back(std::move(b));
        }
    } else if (kind == "grid") {
        p.radii = j.at("grid").at("r").get<std::vector<double>>();
        p.values = j.at("grid").at("n").get<std::vector<double>>();
    } else {
        throw std::invalid_argument("profile_from_json: unknown kind " + kind);
    }
    p.validate();
    return p;
}

Json to_json(const DensityProfile& p) {
    Json j;
    j["d"] = p.d;
    if (p.is_grid()) {
        j["kind"] = "grid";
        j["grid"] = Json::object();
        j["grid"]["r"] = p.radii;
        j["grid"]["n"] = p.values;
    } else {
        j["kind"] = "bumps";
        j["bumps"] = Json::array();
        for (const Bump& b : p.bumps) {
            Json jb;
            jb["w"] = b.weight;
            jb["a"] = b.center;
            jb["lambda"] = b.width;
            jb["profile"] = b.shape == BumpShape::Gaussian ? "gaussian" : "poly";
            j["bumps"].push_back(jb);
        }
    }
    return j;
}

ContinuumConfig continuum_config_from_json(const Json& j) {
    ContinuumConfig c;
    const std::string kernel = j.at("kernel").get<std::string>();
    if (kernel == "log" || kernel == "logarithmic")
        c.kernel = KernelType::Logarithmic;
    else if (kernel == "power")
        c.kernel = KernelType::Power;
    else
        throw std::invalid_argument("continuum config: kernel must be power or log");
    if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
    c.mass = j.at("mass").get<double>();
    c.n_particles = j.at("n_particles").get<int>();
    if (j.contains("rel_tol")) c.rel_tol = j.at("rel_tol").get<double>();
    if (j.contains("abs_tol")) c.abs_tol = j.at("abs_tol").get<double>();
    c.validate();
    return c;
}

Json to_json(const ContinuumConfig& c) {
    Json j;
    j["kernel"] = c.kernel == KernelType::Power ? "power" : "log";
    if (c.kernel == KernelType::Power) j["gamma"] = c.gamma;
    j["mass"] = c.mass;
    j["n_particles"] = c.n_particles;
    j["rel_tol"] = c.rel_tol;
    j["abs_tol"] = c.abs_tol;
    return j;
}

namespace {

const char* class_name(FlowClass c) {
    switch (c) {
        case FlowClass::Collapse: return "collapse";
        case FlowClass::Dispersion: return "dispersion";
        default: return "undecided";
    }
}

} // namespace

std::string trajectory_csv(const FlowOutcome& fo) {
    std::ostringstream os;
    const std::size_t n = fo.trajectory.empty() ? 0 : fo.trajectory.front().x.size();
    os << "t";
    for (std::size_t i = 1; i <= n; ++i) os << ",X" << i;
    os << ",G,norm2\n";
    for (const TrajectorySample& s : fo.trajectory) {
        os << format_double(s.t);
        for (double v : s.x) os << ',' << format_double(v);
        os << ',' << format_double(s.energy) << ',' << format_double(s.norm2) << '\n';
    }
    return os.str();
}

std::string continuum_csv(const TrajectoryRecord& rec) {
    std::ostringstream os;
    os << "t,I,G\n";
    for (const ContinuumSample& s : rec.samples)
        os << format_double(s.t) << ',' << format_double(s.I) << ',' << format_double(s.G)
           << '\n';
    return os.str();
}

std::string continuum_states_csv(const TrajectoryRecord& rec) {
    std::ostringstream os;
    const std::size_t n = rec.snapshots.empty() ? rec.final_state.x.size()
                                                : rec.snapshots.front().x.size();
    os << "t";
    for (std::size_t i = 1; i <= n; ++i) os << ",X" << i;
    os << '\n';
    for (const ParticleState& s : rec.snapshots) {
        os << format_double(s.t);
        for (double v : s.x) os << ',' << format_double(v);
        os << '\n';
    }
    return os.str();
}

std::string portrait_csv(const PhasePortrait& pp) {
    std::ostringstream os;
    os << "u,v,class,crit1,crit2,global\n";
    for (std::size_t j = 0; j < pp.v_centers.size(); ++j)
        for (std::size_t i = 0; i < pp.u_centers.size(); ++i) {
            const std::size_t idx = j * pp.u_centers.size() + i;
            os << format_double(pp.u_centers[i]) << ',' << format_double(pp.v_centers[j]) << ','
               << class_name(pp.cls[idx]) << ',' << int(pp.crit1[idx]) << ','
               << int(pp.crit2[idx]) << ',' << int(pp.global[idx]) << '\n';
        }
    return os.str();
}

std::string manifold_csv(const Separatrix& sep) {
    std::ostringstream os;
    os << "kind,branch,u,v\n";
    auto dump = [&os](const char* kind, int branch,
                      const std::vector<std::array<double, 2>>& line) {
        for (const auto& p : line)
            os << kind << ',' << branch << ',' << format_double(p[0]) << ','
               << format_double(p[1]) << '\n';
    };
    dump("boundary", 0, sep.branch_up);
    dump("boundary", 1, sep.branch_down);
    for (std::size_t k = 0; k < sep.seeded_manifolds.size(); ++k)
        dump("eigen", static_cast<int>(k), sep.seeded_manifolds[k]);
    return os.str();
}

std::string kernel_table_csv(int d, double alpha, const std::vector<double>& radii) {
    std::ostringstream os;
    os << "r,E,B,g\n";
    BesselParams par(d, alpha);
    for (double r : radii)
        os << format_double(r) << ',' << format_double(eval_E(d, r)) << ','
           << format_double(eval_B(par, r)) << ',' << format_double(eval_g(par, r)) << '\n';
    return os.str();
}

std::string gauge_csv(const DiscreteConfig& c, int samples) {
    std::ostringstream os;
    os << "u,v,H\n";
    for (int k = 1; k < samples; ++k) {
        const double u = static_cast<double>(k) / samples;
        const double v = 1.0 - u;
        os << format_double(u) << ',' << format_double(v) << ','
           << format_double(gauge(c, DiscreteState::from_uv(u, v))) << '\n';
    }
    return os.str();
}

// ---- SVG ---------------------------------------------------------------------

namespace {

struct SvgMapper {
    double u0, u1, v0, v1;
    double w = 840.0, hgt = 840.0, margin = 60.0;
    double px(double u) const { return margin + (u - u0) / (u1 - u0) * (w - 2 * margin); }
    double py(double v) const { return hgt - margin - (v - v0) / (v1 - v0) * (hgt - 2 * margin); }
};

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

void polyline(std::ostringstream& os, const SvgMapper& m,
              const std::vector<std::array<double, 2>>& pts, const char* stroke,
              const char* extra = "") {
    if (pts.size() < 2) return;
    os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" " << extra << " points=\"";
    bool first = true;
    for (const auto& p : pts) {
        if (p[0] < m.u0 - 1e-9 || p[0] > m.u1 * 1.5 || p[1] < m.v0 - 1e-9 ||
            p[1] > m.v1 * 1.5)
            continue;
        if (!first) os << ' ';
        os << fmt2(m.px(std::min(p[0], m.u1))) << ',' << fmt2(m.py(std::min(p[1], m.v1)));
        first = false;
    }
    os << "\"/>\n";
}

} // namespace

std::string portrait_svg(const PhasePortrait& pp) {
    const PortraitSpec& sp = pp.spec;
    SvgMapper m{sp.u_min, sp.u_max, sp.v_min, sp.v_max};
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt2(m.w) << "\" height=\""
       << fmt2(m.hgt) << "\" viewBox=\"0 0 " << fmt2(m.w) << ' ' << fmt2(m.hgt) << "\">\n";

    os << "<g id=\"portrait\">\n";
    const double cw = (m.w - 2 * m.margin) / sp.cells_u;
    const double ch = (m.hgt - 2 * m.margin) / sp.cells_v;
    for (std::size_t j = 0; j < pp.v_centers.size(); ++j)
        for (std::size_t i = 0; i < pp.u_centers.size(); ++i) {
            const std::size_t idx = j * pp.u_centers.size() + i;
            const char* fill = "#d9d9d9";
            if (pp.cls[idx] == FlowClass::Collapse)
                fill = (pp.gap_index[idx] == 0) ? "#d95f02" : "#e6a13c";
            else if (pp.cls[idx] == FlowClass::Dispersion)
                fill = "#7bafd4";
            os << "<rect x=\"" << fmt2(m.px(pp.u_centers[i]) - 0.5 * cw) << "\" y=\""
               << fmt2(m.py(pp.v_centers[j]) - 0.5 * ch) << "\" width=\"" << fmt2(cw)
               << "\" height=\"" << fmt2(ch) << "\" fill=\"" << fill << "\"/>\n";
        }
    os << "</g>\n";

    os << "<g id=\"crit1\">\n";
    polyline(os, m, pp.crit1_boundary, "#000000", "stroke-width=\"2.5\"");
    os << "</g>\n<g id=\"crit2\">\n";
    polyline(os, m, pp.crit2_boundary, "#4d4d4d", "stroke-width=\"2.5\" stroke-dasharray=\"7,4\"");
    os << "</g>\n<g id=\"maximal_line\">\n";
    polyline(os, m, pp.maximal_line, "#6a3d9a", "stroke-width=\"2\" stroke-dasharray=\"2,3\"");
    os << "</g>\n<g id=\"global\">\n";
    polyline(os, m, pp.global_boundary, "#1b7837", "stroke-width=\"2\"");
    os << "</g>\n<g id=\"separatrix\">\n";
    polyline(os, m, pp.sep.branch_up, "#c51b7d", "stroke-width=\"3\"");
    polyline(os, m, pp.sep.branch_down, "#c51b7d", "stroke-width=\"3\"");
    os << "</g>\n";

    // frame and tick labels
    os << "<g id=\"axes\">\n";
    os << "<rect x=\"" << fmt2(m.margin) << "\" y=\"" << fmt2(m.margin) << "\" width=\""
       << fmt2(m.w - 2 * m.margin) << "\" height=\"" << fmt2(m.hgt - 2 * m.margin)
       << "\" fill=\"none\" stroke=\"#000\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double u = sp.u_min + k * (sp.u_max - sp.u_min) / 4.0;
        const double v = sp.v_min + k * (sp.v_max - sp.v_min) / 4.0;
        os << "<text x=\"" << fmt2(m.px(u)) << "\" y=\"" << fmt2(m.hgt - m.margin + 22)
           << "\" font-size=\"13\" text-anchor=\"middle\">" << fmt2(u) << "</text>\n";
        os << "<text x=\"" << fmt2(m.margin - 8) << "\" y=\"" << fmt2(m.py(v) + 4)
           << "\" font-size=\"13\" text-anchor=\"end\">" << fmt2(v) << "</text>\n";
    }
    os << "<text x=\"" << fmt2(0.5 * m.w) << "\" y=\"" << fmt2(m.hgt - 14)
       << "\" font-size=\"15\" text-anchor=\"middle\">u</text>\n";
    os << "<text x=\"16\" y=\"" << fmt2(0.5 * m.hgt)
       << "\" font-size=\"15\" text-anchor=\"middle\">v</text>\n";
    os << "</g>\n</svg>\n";
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace kestrel
