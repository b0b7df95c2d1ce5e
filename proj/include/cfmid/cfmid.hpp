#pragma once

// Umbrella header: identifiability analysis of cell-free massive MIMO
// networks deployed as Poisson point processes, via Karp-Sipser peeling on
// bipartite graphs, density evolution and closed-form Lambert-W thresholds.

#include "cfmid/params.hpp"
#include "cfmid/deployment.hpp"
#include "cfmid/bipartite_graph.hpp"
#include "cfmid/karp_sipser.hpp"
#include "cfmid/density_evolution.hpp"
#include "cfmid/thresholds.hpp"
#include "cfmid/bilinear_oracle.hpp"
#include "cfmid/experiments.hpp"
