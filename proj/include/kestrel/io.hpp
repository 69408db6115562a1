// Serialization: shortest round-trip float formatting, JSON representations
// of reports, CSV tables, and the layered portrait SVG.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "kestrel/constants.hpp"
#include "kestrel/continuum_flow.hpp"
#include "kestrel/criteria.hpp"
#include "kestrel/densities.hpp"
#include "kestrel/discrete_flow.hpp"

namespace kestrel {

using Json = nlohmann::ordered_json;

// shortest decimal that round-trips to the same double
std::string format_double(double v);

Json to_json(const DimensionalConstants& c);
Json to_json(const CriterionReport& r);
Json to_json(const MomentReport& r);

DensityProfile profile_from_json(const Json& j);
Json to_json(const DensityProfile& p);

// config file mirror of ContinuumConfig: {kernel, gamma, mass, n_particles,
// rel_tol, abs_tol}
ContinuumConfig continuum_config_from_json(const Json& j);
Json to_json(const ContinuumConfig& c);

std::string trajectory_csv(const FlowOutcome& fo);                  // t,X1..XN,G,norm2
std::string continuum_csv(const TrajectoryRecord& rec);             // t,I,G
std::string continuum_states_csv(const TrajectoryRecord& rec);      // t,X1..XN
std::string portrait_csv(const PhasePortrait& pp);                  // u,v,class,crit1,crit2,global
std::string manifold_csv(const Separatrix& sep);                    // kind,branch,u,v
std::string kernel_table_csv(int d, double alpha, const std::vector<double>& radii);  // r,E,B,g
std::string gauge_csv(const DiscreteConfig& c, int samples);        // u,v,H on u+v=1

// SVG with the fixed layer names portrait, crit1, crit2, maximal_line,
// global, separatrix.
std::string portrait_svg(const PhasePortrait& pp);

// writes text to path, or stdout when path is "-"
void write_text(const std::string& path, const std::string& text);

} // namespace kestrel
