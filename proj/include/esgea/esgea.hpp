#pragma once

#include "esgea/augment.hpp"
#include "esgea/ego.hpp"
#include "esgea/embed.hpp"
#include "esgea/error.hpp"
#include "esgea/gnn/metrics.hpp"
#include "esgea/gnn/model.hpp"
#include "esgea/gnn/serialize.hpp"
#include "esgea/gnn/train.hpp"
#include "esgea/graph.hpp"
#include "esgea/io.hpp"
#include "esgea/lanczos.hpp"
#include "esgea/laplacian.hpp"
#include "esgea/spectral.hpp"
#include "esgea/synth.hpp"
#include "esgea/version.hpp"
