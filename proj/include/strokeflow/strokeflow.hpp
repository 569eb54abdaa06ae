#pragma once

#include "strokeflow/error.hpp"
#include "strokeflow/geometry.hpp"
#include "strokeflow/stroke.hpp"
#include "strokeflow/svg_path.hpp"
#include "strokeflow/svg_io.hpp"
#include "strokeflow/raster.hpp"
#include "strokeflow/png_io.hpp"
#include "strokeflow/parallel.hpp"
#include "strokeflow/sketch.hpp"
#include "strokeflow/vectorize.hpp"
#include "strokeflow/clustering.hpp"
#include "strokeflow/sequencing.hpp"
#include "strokeflow/render.hpp"
#include "strokeflow/pipeline.hpp"
