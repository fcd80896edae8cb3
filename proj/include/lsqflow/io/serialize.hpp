#pragma once

#include "lsqflow/error.hpp"
#include "lsqflow/graph.hpp"
#include "lsqflow/linear_problem.hpp"
#include "lsqflow/simulate.hpp"
#include "lsqflow/spectral.hpp"

#include <ostream>
#include <string>

namespace lsqflow::io {

/// t,x_1_1,...,x_N_m,v_1_1,...,v_N_m,error,cost
std::string csv_header(int n_nodes, int dim);
void write_csv(std::ostream& out, const Trajectory& traj);
std::string to_csv(const Trajectory& traj);

/// Doubles use the shortest representation that round-trips.
std::string report_json(const SpectralReport& report, const LeastSquaresSolution& lsq);
std::string solution_json(const LeastSquaresSolution& lsq);
std::string error_envelope(const Error& error);

}  // namespace lsqflow::io
