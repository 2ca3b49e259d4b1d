#ifndef TOTPOS_TOTPOS_HPP_
#define TOTPOS_TOTPOS_HPP_

#include "totpos/error.hpp"
#include "totpos/rational.hpp"
#include "totpos/varset.hpp"
#include "totpos/compare.hpp"
#include "totpos/table.hpp"
#include "totpos/mtp2.hpp"
#include "totpos/loglinear.hpp"
#include "totpos/ugraph.hpp"
#include "totpos/gaussian.hpp"
#include "totpos/indep.hpp"
#include "totpos/markov.hpp"
#include "totpos/construct.hpp"
#include "totpos/cg.hpp"
#include "totpos/montecarlo.hpp"
#include "totpos/data.hpp"
#include "totpos/io.hpp"

#endif  // TOTPOS_TOTPOS_HPP_
