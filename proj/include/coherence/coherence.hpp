#pragma once

#include "coherence/boundary_solver.hpp"
#include "coherence/full_hilbert.hpp"
#include "coherence/matrix_exp.hpp"
#include "coherence/optimality_search.hpp"
#include "coherence/reduced_dynamics.hpp"
#include "coherence/report.hpp"
#include "coherence/roots.hpp"
#include "coherence/sampling.hpp"
#include "coherence/serialization.hpp"
#include "coherence/spin_algebra.hpp"
#include "coherence/verification.hpp"
