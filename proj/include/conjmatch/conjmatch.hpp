#pragma once

#include "conjmatch/config.hpp"
#include "conjmatch/contour.hpp"
#include "conjmatch/energy.hpp"
#include "conjmatch/errors.hpp"
#include "conjmatch/evaluation.hpp"
#include "conjmatch/frames.hpp"
#include "conjmatch/geodesic.hpp"
#include "conjmatch/match_io.hpp"
#include "conjmatch/pipeline.hpp"
#include "conjmatch/product_graph.hpp"
#include "conjmatch/robust_loss.hpp"
#include "conjmatch/shapes.hpp"
#include "conjmatch/solver.hpp"
#include "conjmatch/thickness.hpp"
#include "conjmatch/transfer.hpp"
#include "conjmatch/trimesh.hpp"
