#pragma once

#include <advmap/error.hpp>
#include <advmap/gridworld.hpp>
#include <advmap/planner.hpp>
#include <advmap/random.hpp>
#include <advmap/perturb.hpp>
#include <advmap/taxonomy.hpp>
#include <advmap/imaging.hpp>
#include <advmap/textio.hpp>
#include <advmap/classifier.hpp>
#include <advmap/metrics.hpp>
#include <advmap/storage.hpp>
#include <advmap/pipeline.hpp>
