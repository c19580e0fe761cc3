#pragma once

#include "anncap/errors.hpp"
#include "anncap/parallel.hpp"
#include "anncap/quadrature.hpp"
#include "anncap/fit.hpp"
#include "anncap/measure.hpp"
#include "anncap/decay.hpp"
#include "anncap/capacity.hpp"
#include "anncap/network.hpp"
#include "anncap/solver.hpp"
#include "anncap/maxflow.hpp"
#include "anncap/oracle.hpp"
#include "anncap/bounds.hpp"
#include "anncap/gallery.hpp"
#include "anncap/acceptance.hpp"
#include "anncap/report.hpp"
