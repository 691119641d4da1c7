#ifndef COGSENSE_COGSENSE_HPP_
#define COGSENSE_COGSENSE_HPP_

#include "cogsense/csv.hpp"
#include "cogsense/detector.hpp"
#include "cogsense/distributions.hpp"
#include "cogsense/errors.hpp"
#include "cogsense/montecarlo.hpp"
#include "cogsense/numeric.hpp"
#include "cogsense/radio_model.hpp"
#include "cogsense/specfun.hpp"
#include "cogsense/tradeoff.hpp"

#endif  // COGSENSE_COGSENSE_HPP_
