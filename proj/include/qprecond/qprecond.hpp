#pragma once

#include "qprecond/analytic_p1.hpp"
#include "qprecond/angle_search.hpp"
#include "qprecond/bench.hpp"
#include "qprecond/diagnostics.hpp"
#include "qprecond/error.hpp"
#include "qprecond/generators.hpp"
#include "qprecond/io.hpp"
#include "qprecond/lightcone.hpp"
#include "qprecond/mpes.hpp"
#include "qprecond/parallel.hpp"
#include "qprecond/precond.hpp"
#include "qprecond/problem.hpp"
#include "qprecond/prune.hpp"
#include "qprecond/random.hpp"
#include "qprecond/solvers/anneal.hpp"
#include "qprecond/solvers/brute_force.hpp"
#include "qprecond/solvers/burer_monteiro.hpp"
#include "qprecond/solvers/local_search.hpp"
#include "qprecond/solvers/schedule.hpp"
#include "qprecond/statevector.hpp"
