#pragma once

#include <pdgeo/types.hpp>
#include <pdgeo/rng.hpp>
#include <pdgeo/linalg.hpp>
#include <pdgeo/convex_sets.hpp>
#include <pdgeo/geometric_sets.hpp>
#include <pdgeo/problem.hpp>
#include <pdgeo/penalty.hpp>
#include <pdgeo/inner_solver.hpp>
#include <pdgeo/altmin.hpp>
#include <pdgeo/run_record.hpp>
#include <pdgeo/pd.hpp>
#include <pdgeo/alm.hpp>
#include <pdgeo/zoo.hpp>
#include <pdgeo/bench.hpp>
