#pragma once

#include "bornres/compensated_sum.hpp"
#include "bornres/csv.hpp"
#include "bornres/errors.hpp"
#include "bornres/model.hpp"
#include "bornres/pole_solver.hpp"
#include "bornres/quadrature.hpp"
#include "bornres/resonance_expansion.hpp"
#include "bornres/special_functions.hpp"
#include "bornres/time_evolution.hpp"
